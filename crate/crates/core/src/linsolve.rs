//! Matrix-free symmetric solves: Jacobi-preconditioned conjugate gradients and
//! the pure-Neumann pressure Poisson problem.

use crate::error::SolveError;
use crate::grid::StaggeredGrid;

/// Kernel of an operator, as far as the solver needs to know.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NullSpace {
    None,
    /// Constant vectors are annihilated; right-hand sides and solutions are
    /// taken mean-zero.
    Constants,
}

/// A linear map on cell-centered fields.
pub trait LinearOperator {
    fn dim(&self) -> usize;

    /// `y = A x`.
    fn apply(&self, x: &[f64], y: &mut [f64]);

    /// Diagonal entries for Jacobi preconditioning, when known.
    fn diagonal(&self) -> Option<Vec<f64>> {
        None
    }

    fn is_symmetric(&self) -> bool {
        true
    }

    fn null_space(&self) -> NullSpace {
        NullSpace::None
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgOptions {
    /// Relative residual target `||A x - b'|| <= tol ||b'||`.
    pub tol: f64,
    /// Absolute residual at which the solve is accepted regardless of `tol`.
    pub abs_tol: f64,
    pub max_iter: usize,
}

impl CgOptions {
    /// Relative tolerance `1e-10` and `10 n` iterations.
    pub fn for_dim(n: usize) -> Self {
        CgOptions {
            tol: DEFAULT_TOL,
            abs_tol: 0.0,
            max_iter: 10 * n.max(1),
        }
    }
}

pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct CgSolution {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Final true residual `||A x - b'||_2`.
    pub residual: f64,
    /// `||b'||_2` (after mean removal where applicable).
    pub rhs_norm: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn remove_mean(x: &mut [f64]) {
    if x.is_empty() {
        return;
    }
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.iter_mut().for_each(|v| *v -= mean);
}

/// Preconditioned conjugate gradients.
///
/// When the operator's null space is the constants, the mean of `rhs` is
/// removed first, every preconditioned residual is projected to mean zero,
/// and the returned solution is mean-zero.
pub fn cg_solve(
    op: &dyn LinearOperator,
    rhs: &[f64],
    options: CgOptions,
) -> Result<CgSolution, SolveError> {
    let n = op.dim();
    if rhs.len() != n {
        return Err(SolveError::Dimension {
            expected: n,
            got: rhs.len(),
        });
    }
    if rhs.iter().any(|v| !v.is_finite()) {
        return Err(SolveError::NonFiniteRhs);
    }
    let singular = op.null_space() == NullSpace::Constants;

    let mut b = rhs.to_vec();
    if singular {
        remove_mean(&mut b);
    }
    let rhs_norm = norm(&b);
    let target = (options.tol * rhs_norm).max(options.abs_tol);
    let mut x = vec![0.0; n];
    if rhs_norm <= target {
        return Ok(CgSolution {
            x,
            iterations: 0,
            residual: rhs_norm,
            rhs_norm,
        });
    }

    let inv_diag: Option<Vec<f64>> = op.diagonal().map(|d| {
        d.iter()
            .map(|&v| if v != 0.0 { 1.0 / v } else { 1.0 })
            .collect()
    });
    let precondition = |r: &[f64], z: &mut [f64]| {
        match &inv_diag {
            Some(inv) => z
                .iter_mut()
                .zip(r.iter().zip(inv))
                .for_each(|(z, (r, d))| *z = r * d),
            None => z.copy_from_slice(r),
        }
        if singular {
            remove_mean(z);
        }
    };

    let mut r = b.clone();
    let mut z = vec![0.0; n];
    let mut ap = vec![0.0; n];
    precondition(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut iterations = 0;
    let mut residual = rhs_norm;

    while iterations < options.max_iter {
        op.apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 || !pap.is_finite() {
            break;
        }
        let alpha = rz / pap;
        x.iter_mut().zip(&p).for_each(|(x, p)| *x += alpha * p);
        r.iter_mut().zip(&ap).for_each(|(r, ap)| *r -= alpha * ap);
        iterations += 1;

        if norm(&r) <= target {
            // The recurrence drifts from the true residual; confirm before
            // accepting and restart from the true residual otherwise.
            op.apply(&x, &mut ap);
            r.iter_mut()
                .zip(b.iter().zip(&ap))
                .for_each(|(r, (b, ax))| *r = b - ax);
            if singular {
                remove_mean(&mut r);
            }
            residual = norm(&r);
            if residual <= target {
                if singular {
                    remove_mean(&mut x);
                }
                return Ok(CgSolution {
                    x,
                    iterations,
                    residual,
                    rhs_norm,
                });
            }
            precondition(&r, &mut z);
            p.copy_from_slice(&z);
            rz = dot(&r, &z);
            continue;
        }

        precondition(&r, &mut z);
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        p.iter_mut().zip(&z).for_each(|(p, z)| *p = z + beta * *p);
        residual = norm(&r);
    }

    Err(SolveError::NotConverged {
        iterations,
        residual: residual / rhs_norm,
    })
}

/// Negative 5-point Laplacian on cell centers with homogeneous Neumann walls.
///
/// Positive semidefinite with the constants as kernel. It is exactly
/// `-div(grad(.))` for the MAC divergence and a gradient that vanishes on
/// boundary faces.
#[derive(Debug, Clone, Copy)]
pub struct NeumannLaplacian<'a> {
    pub grid: &'a StaggeredGrid,
}

impl LinearOperator for NeumannLaplacian<'_> {
    fn dim(&self) -> usize {
        self.grid.cell_count()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let g = self.grid;
        let (ax, ay) = (1.0 / (g.hx * g.hx), 1.0 / (g.hy * g.hy));
        for j in 0..g.ny {
            for i in 0..g.nx {
                let k = g.cell(i, j);
                let xc = x[k];
                let mut acc = 0.0;
                if i > 0 {
                    acc += ax * (xc - x[k - 1]);
                }
                if i + 1 < g.nx {
                    acc += ax * (xc - x[k + 1]);
                }
                if j > 0 {
                    acc += ay * (xc - x[k - g.nx]);
                }
                if j + 1 < g.ny {
                    acc += ay * (xc - x[k + g.nx]);
                }
                y[k] = acc;
            }
        }
    }

    fn diagonal(&self) -> Option<Vec<f64>> {
        let g = self.grid;
        let (ax, ay) = (1.0 / (g.hx * g.hx), 1.0 / (g.hy * g.hy));
        let mut d = Vec::with_capacity(g.cell_count());
        for j in 0..g.ny {
            for i in 0..g.nx {
                let neighbours_x = (i > 0) as u8 + (i + 1 < g.nx) as u8;
                let neighbours_y = (j > 0) as u8 + (j + 1 < g.ny) as u8;
                d.push(ax * neighbours_x as f64 + ay * neighbours_y as f64);
            }
        }
        Some(d)
    }

    fn null_space(&self) -> NullSpace {
        NullSpace::Constants
    }
}

/// Solves `lap(phi) = rhs` with homogeneous Neumann walls. The mean of `rhs`
/// is removed (discrete compatibility) and `phi` is returned mean-zero.
pub fn poisson_neumann(
    grid: &StaggeredGrid,
    rhs: &[f64],
    options: CgOptions,
) -> Result<CgSolution, SolveError> {
    let negated: Vec<f64> = rhs.iter().map(|v| -v).collect();
    cg_solve(&NeumannLaplacian { grid }, &negated, options)
}
