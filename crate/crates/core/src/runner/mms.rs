//! Manufactured-solution checks of the discrete operators on the unit square.

use std::f64::consts::PI;
use std::fmt;

use crate::error::RunError;
use crate::grid::StaggeredGrid;
use crate::linsolve::{poisson_neumann, CgOptions};
use crate::transport::{advect, diffuse};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MmsOperator {
    Diffusion,
    Upwind,
    Poisson,
}

impl MmsOperator {
    pub const ALL: [MmsOperator; 3] = [
        MmsOperator::Diffusion,
        MmsOperator::Upwind,
        MmsOperator::Poisson,
    ];

    /// Minimum acceptable observed order.
    pub fn threshold(self) -> f64 {
        match self {
            MmsOperator::Diffusion | MmsOperator::Poisson => 1.9,
            MmsOperator::Upwind => 0.9,
        }
    }
}

impl fmt::Display for MmsOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MmsOperator::Diffusion => "diffusion",
            MmsOperator::Upwind => "upwind",
            MmsOperator::Poisson => "poisson",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MmsRow {
    pub operator: MmsOperator,
    /// Discrete `L2` error at each level.
    pub errors: Vec<f64>,
    /// `log2(e_k / e_{k+1})` between consecutive levels.
    pub orders: Vec<f64>,
}

impl MmsRow {
    pub fn min_order(&self) -> f64 {
        self.orders.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn passed(&self) -> bool {
        self.min_order() >= self.operator.threshold()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MmsReport {
    pub levels: Vec<usize>,
    pub rows: Vec<MmsRow>,
}

impl MmsReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(MmsRow::passed)
    }
}

fn l2_error(numeric: &[f64], exact: &[f64], grid: &StaggeredGrid) -> f64 {
    let sum: f64 = numeric
        .iter()
        .zip(exact)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    (sum * grid.cell_measure()).sqrt()
}

fn cos_cos(x: f64, y: f64) -> f64 {
    (PI * x).cos() * (PI * y).cos()
}

/// `D lap c` against `-2 pi^2 c` for `c = cos(pi x) cos(pi y)`.
fn diffusion_error(n: usize) -> f64 {
    let g = StaggeredGrid::unit_square(n);
    let c = g.sample_cells(cos_cos);
    let exact: Vec<f64> = c.iter().map(|c| -2.0 * PI * PI * c).collect();
    l2_error(&diffuse(&c, 1.0, &g), &exact, &g)
}

/// Face velocity from the stream function `psi = sin(pi x) sin(pi y)`,
/// averaged over each face so the field is exactly solenoidal and vanishes
/// on the walls.
fn stream_velocity(g: &StaggeredGrid) -> (Vec<f64>, Vec<f64>) {
    let psi = |x: f64, y: f64| (PI * x).sin() * (PI * y).sin();
    let mut u = vec![0.0; g.u_count()];
    let mut v = vec![0.0; g.v_count()];
    for j in 0..g.ny {
        for i in 0..=g.nx {
            let x = i as f64 * g.hx;
            u[g.u_face(i, j)] = (psi(x, (j + 1) as f64 * g.hy) - psi(x, j as f64 * g.hy)) / g.hy;
        }
    }
    for j in 0..=g.ny {
        for i in 0..g.nx {
            let y = j as f64 * g.hy;
            v[g.v_face(i, j)] = -(psi((i + 1) as f64 * g.hx, y) - psi(i as f64 * g.hx, y)) / g.hx;
        }
    }
    (u, v)
}

/// `-div(u c)` against `-u . grad c` with `c = cos(pi x) cos(pi y)`.
fn upwind_error(n: usize) -> f64 {
    let g = StaggeredGrid::unit_square(n);
    let c = g.sample_cells(cos_cos);
    let (u, v) = stream_velocity(&g);
    let exact = g.sample_cells(|x, y| {
        let ux = PI * (PI * x).sin() * (PI * y).cos();
        let uy = -PI * (PI * x).cos() * (PI * y).sin();
        let cx = -PI * (PI * x).sin() * (PI * y).cos();
        let cy = -PI * (PI * x).cos() * (PI * y).sin();
        -(ux * cx + uy * cy)
    });
    l2_error(&advect(&c, &u, &v, &g), &exact, &g)
}

/// Neumann Poisson solve of `lap phi = -2 pi^2 cos(pi x) cos(pi y)`.
fn poisson_error(n: usize) -> Result<f64, RunError> {
    let g = StaggeredGrid::unit_square(n);
    let exact = g.sample_cells(cos_cos);
    let rhs: Vec<f64> = exact.iter().map(|p| -2.0 * PI * PI * p).collect();
    let options = CgOptions {
        tol: 1e-12,
        ..CgOptions::for_dim(g.cell_count())
    };
    let phi = poisson_neumann(&g, &rhs, options)
        .map_err(|e| RunError::Invalid(format!("Poisson MMS solve on {n}x{n}: {e}")))?
        .x;
    let mean_exact = exact.iter().sum::<f64>() / exact.len() as f64;
    let mean_phi = phi.iter().sum::<f64>() / phi.len() as f64;
    let shifted: Vec<f64> = phi.iter().map(|p| p - mean_phi + mean_exact).collect();
    Ok(l2_error(&shifted, &exact, &g))
}

/// Observed orders of the diffusion, upwind and Poisson discretizations
/// over `levels`, which must hold at least three successively doubled
/// resolutions.
pub fn mms_convergence(levels: &[usize]) -> Result<MmsReport, RunError> {
    if levels.len() < 3 {
        return Err(RunError::Invalid(format!(
            "MMS needs at least three levels, got {}",
            levels.len()
        )));
    }
    if levels[0] < 2 {
        return Err(RunError::Invalid(format!(
            "MMS levels must be >= 2, got {}",
            levels[0]
        )));
    }
    if let Some(w) = levels.windows(2).find(|w| w[1] != 2 * w[0]) {
        return Err(RunError::Invalid(format!(
            "MMS levels must double, got {} then {}",
            w[0], w[1]
        )));
    }
    let mut rows = Vec::new();
    for operator in MmsOperator::ALL {
        let errors = levels
            .iter()
            .map(|&n| match operator {
                MmsOperator::Diffusion => Ok(diffusion_error(n)),
                MmsOperator::Upwind => Ok(upwind_error(n)),
                MmsOperator::Poisson => poisson_error(n),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let orders = errors.windows(2).map(|e| (e[0] / e[1]).log2()).collect();
        rows.push(MmsRow {
            operator,
            errors,
            orders,
        });
    }
    Ok(MmsReport {
        levels: levels.to_vec(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_levels_converge() {
        let report = mms_convergence(&[8, 16, 32]).unwrap();
        for row in &report.rows {
            assert!(row.passed(), "{row:?}");
        }
        assert!(report.passed());
    }

    #[test]
    fn level_validation() {
        assert!(matches!(
            mms_convergence(&[32, 64]),
            Err(RunError::Invalid(_))
        ));
        assert!(matches!(
            mms_convergence(&[32, 48, 96]),
            Err(RunError::Invalid(_))
        ));
    }

    #[test]
    fn stream_velocity_is_solenoidal() {
        let g = StaggeredGrid::unit_square(16);
        let (u, v) = stream_velocity(&g);
        assert!(g.max_divergence(&u, &v) < 1e-12);
    }
}
