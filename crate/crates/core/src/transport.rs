//! One time step of the convection-diffusion-reaction equation
//! `c_t + u . grad c = D lap c + kappa c (c - 1)` with no-flux walls.
//!
//! Transport (first-order upwind convection plus explicit diffusion) is
//! followed by the exact per-cell solution of the logistic reaction. Under
//! [`stable_dt`] the transport stage is monotone, so the step preserves
//! `0 <= c <= M0 <= 1` and any uniform lower bound above 1.

use crate::config::{ScalarField, SimConfig};
use crate::error::{BlowUp, StepError};
use crate::grid::StaggeredGrid;
use crate::linsolve::{LinearOperator, NeumannLaplacian};
use crate::state::State;

/// Values above this count as blown up even if the exact reaction step has
/// not crossed its singularity yet.
pub const BLOWUP_CAP: f64 = 1e6;

#[derive(Debug, Clone, Copy)]
pub struct TransportParams<'a> {
    pub diffusion: f64,
    pub reaction_rate: &'a ScalarField,
    pub dt: f64,
}

impl<'a> TransportParams<'a> {
    pub fn from_config(config: &'a SimConfig, dt: f64) -> Self {
        TransportParams {
            diffusion: config.diffusion,
            reaction_rate: &config.reaction_rate,
            dt,
        }
    }
}

/// `-div(u c)` with donor-cell fluxes. Wall fluxes vanish because the
/// wall-normal velocity does.
pub fn advect(c: &[f64], u: &[f64], v: &[f64], grid: &StaggeredGrid) -> Vec<f64> {
    let g = grid;
    let mut out = vec![0.0; g.cell_count()];
    for j in 0..g.ny {
        for i in 1..g.nx {
            let vel = u[g.u_face(i, j)];
            if vel == 0.0 {
                continue;
            }
            let (left, right) = (g.cell(i - 1, j), g.cell(i, j));
            let flux = vel * if vel > 0.0 { c[left] } else { c[right] } / g.hx;
            out[left] -= flux;
            out[right] += flux;
        }
    }
    for j in 1..g.ny {
        for i in 0..g.nx {
            let vel = v[g.v_face(i, j)];
            if vel == 0.0 {
                continue;
            }
            let (below, above) = (g.cell(i, j - 1), g.cell(i, j));
            let flux = vel * if vel > 0.0 { c[below] } else { c[above] } / g.hy;
            out[below] -= flux;
            out[above] += flux;
        }
    }
    out
}

/// `D lap(c)` with mirrored (zero normal gradient) ghost cells.
pub fn diffuse(c: &[f64], diffusion: f64, grid: &StaggeredGrid) -> Vec<f64> {
    let mut out = vec![0.0; grid.cell_count()];
    NeumannLaplacian { grid }.apply(c, &mut out);
    out.iter_mut().for_each(|x| *x *= -diffusion);
    out
}

/// Exact solution of `c' = kappa c (c - 1)` after `dt`, or the local
/// critical time if the solution blows up within the step.
#[inline]
pub fn logistic_step(c: f64, kappa: f64, dt: f64) -> Result<f64, f64> {
    let growth = (kappa * dt).exp();
    let denominator = c + (1.0 - c) * growth;
    if denominator > 0.0 {
        Ok(c / denominator)
    } else {
        Err(logistic_blowup_time(c, kappa))
    }
}

/// Time for `c' = kappa c (c - 1)` starting at `c > 1` to reach infinity.
#[inline]
pub fn logistic_blowup_time(c: f64, kappa: f64) -> f64 {
    (c / (c - 1.0)).ln() / kappa
}

/// Applies the exact reaction step to every cell. The error carries the
/// offending cell with the earliest critical time; `t0` is the time at the
/// start of the step.
pub fn react(c: &[f64], kappa: &ScalarField, dt: f64, t0: f64) -> Result<Vec<f64>, BlowUp> {
    let mut out = Vec::with_capacity(c.len());
    let mut first: Option<BlowUp> = None;
    for (cell, &value) in c.iter().enumerate() {
        match logistic_step(value, kappa.at(cell), dt) {
            Ok(next) => out.push(next),
            Err(t_local) => {
                if first.is_none_or(|b| t_local < b.t_local) {
                    first = Some(BlowUp {
                        cell,
                        t_local,
                        time: t0 + t_local,
                    });
                }
                out.push(f64::INFINITY);
            }
        }
    }
    match first {
        Some(event) => Err(event),
        None => Ok(out),
    }
}

/// Transport then reaction over `params.dt`; advances `t`.
///
/// The velocity in `state` must already be projected.
pub fn transport_step(
    state: &State,
    grid: &StaggeredGrid,
    params: &TransportParams<'_>,
) -> Result<State, StepError> {
    let dt = params.dt;
    let adv = advect(&state.c, &state.u, &state.v, grid);
    let dif = diffuse(&state.c, params.diffusion, grid);
    let transported: Vec<f64> = state
        .c
        .iter()
        .zip(adv.iter().zip(&dif))
        .map(|(c, (a, d))| c + dt * (a + d))
        .collect();
    if transported.iter().any(|x| !x.is_finite()) {
        return Err(StepError::Instability {
            field: "concentration",
            dt,
        });
    }

    let c = react(&transported, params.reaction_rate, dt, state.t)
        .map_err(StepError::BlowUpDetected)?;
    let t = state.t + dt;

    let (peak_cell, peak) =
        c.iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (k, x)| {
                if x > best.1 {
                    (k, x)
                } else {
                    best
                }
            });
    if peak.is_nan() || c.iter().any(|x| x.is_nan()) {
        return Err(StepError::Instability {
            field: "concentration",
            dt,
        });
    }
    if peak > BLOWUP_CAP {
        let t_local = dt + logistic_blowup_time(peak, params.reaction_rate.at(peak_cell));
        return Err(StepError::BlowUpDetected(BlowUp {
            cell: peak_cell,
            t_local,
            time: state.t + t_local,
        }));
    }

    Ok(State {
        u: state.u.clone(),
        v: state.v.clone(),
        p: state.p.clone(),
        c,
        t,
    })
}

/// Individual time-step limits; [`StableDt::bound`] is their minimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableDt {
    /// `0.9 / (|u|max/hx + |v|max/hy)`, infinite at rest.
    pub cfl: f64,
    /// `h_min^2 / (4 D)`.
    pub diffusion: f64,
    /// `h_min^2 / (4 mu_e)` for the explicit Brinkman term.
    pub viscous: f64,
    /// `1 / (|u|max/hx + |v|max/hy + 2 D (1/hx^2 + 1/hy^2))`: keeps the
    /// combined upwind-diffusion update a convex combination.
    pub monotone: f64,
}

impl StableDt {
    pub fn bound(&self) -> f64 {
        self.cfl
            .min(self.diffusion)
            .min(self.viscous)
            .min(self.monotone)
    }
}

pub fn stable_dt_limits(
    grid: &StaggeredGrid,
    state: &State,
    diffusion: f64,
    effective_viscosity: f64,
) -> StableDt {
    let u_max = state.u.iter().fold(0.0, |m: f64, x| m.max(x.abs()));
    let v_max = state.v.iter().fold(0.0, |m: f64, x| m.max(x.abs()));
    let rate = u_max / grid.hx + v_max / grid.hy;
    let h_min = grid.hx.min(grid.hy);
    let cfl = if rate > 0.0 {
        0.9 / rate
    } else {
        f64::INFINITY
    };
    let diffusive_rate = 2.0 * diffusion * (1.0 / (grid.hx * grid.hx) + 1.0 / (grid.hy * grid.hy));
    let monotone_rate = rate + diffusive_rate;
    StableDt {
        cfl,
        diffusion: h_min * h_min / (4.0 * diffusion),
        viscous: h_min * h_min / (4.0 * effective_viscosity),
        monotone: if monotone_rate > 0.0 {
            1.0 / monotone_rate
        } else {
            f64::INFINITY
        },
    }
}

/// Largest step for which transport is monotone and the explicit viscous
/// term is stable. Reaction is integrated exactly and adds no limit.
pub fn stable_dt(
    grid: &StaggeredGrid,
    state: &State,
    diffusion: f64,
    effective_viscosity: f64,
) -> f64 {
    stable_dt_limits(grid, state, diffusion, effective_viscosity).bound()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::enforce_no_slip;
    use std::f64::consts::PI;

    /// Face velocity from a nodal stream function; discretely solenoidal.
    fn stream_velocity(g: &StaggeredGrid, psi: impl Fn(f64, f64) -> f64) -> (Vec<f64>, Vec<f64>) {
        let mut u = vec![0.0; g.u_count()];
        let mut v = vec![0.0; g.v_count()];
        for j in 0..g.ny {
            for i in 0..=g.nx {
                let x = i as f64 * g.hx;
                u[g.u_face(i, j)] =
                    (psi(x, (j + 1) as f64 * g.hy) - psi(x, j as f64 * g.hy)) / g.hy;
            }
        }
        for j in 0..=g.ny {
            for i in 0..g.nx {
                let y = j as f64 * g.hy;
                v[g.v_face(i, j)] =
                    -(psi((i + 1) as f64 * g.hx, y) - psi(i as f64 * g.hx, y)) / g.hx;
            }
        }
        (u, v)
    }

    fn swirl(x: f64, y: f64) -> f64 {
        (PI * x).sin() * (PI * y).sin()
    }

    #[test]
    fn advect_trivial_cases() {
        let g = StaggeredGrid::new(1.0, 1.0, 9, 7).unwrap();
        let c = g.sample_cells(|x, y| x * x + y);
        let zero = advect(&c, &vec![0.0; g.u_count()], &vec![0.0; g.v_count()], &g);
        assert!(zero.iter().all(|&x| x == 0.0));

        let (u, v) = stream_velocity(&g, swirl);
        let constant = advect(&vec![0.7; g.cell_count()], &u, &v, &g);
        assert!(constant.iter().all(|x| x.abs() < 1e-12));

        let out = advect(&c, &u, &v, &g);
        let total: f64 = out.iter().map(|x| x * g.cell_measure()).sum();
        assert!(total.abs() < 1e-13);
    }

    #[test]
    fn advected_step_tracks_translation() {
        let g = StaggeredGrid::new(10.0, 0.4, 200, 4).unwrap();
        let big_u = 1.0;
        let dt = 0.5 * g.hx / big_u;
        let mut u = vec![big_u; g.u_count()];
        let mut v = vec![0.0; g.v_count()];
        enforce_no_slip(&g, &mut u, &mut v);
        let x0 = 5.0;
        let mut c = g.sample_cells(|x, _| if x < x0 { 1.0 } else { 0.0 });
        let steps = 100;
        for _ in 0..steps {
            let a = advect(&c, &u, &v, &g);
            c.iter_mut().zip(&a).for_each(|(c, a)| *c += dt * a);
        }
        let t = steps as f64 * dt;
        let front = x0 + big_u * t;
        // cells clear of the rarefaction leaving the left wall
        let interior: Vec<usize> = (80..190).collect();
        let mut l1 = 0.0;
        for &i in &interior {
            let (x, _) = g.cell_center(i, 0);
            let exact = if x < front { 1.0 } else { 0.0 };
            l1 += (c[g.cell(i, 0)] - exact).abs() * g.hx;
        }
        // numerical diffusion U h (1 - nu) / 2 widens the front like sqrt(D t)
        let d_num = big_u * g.hx * 0.5 / 2.0;
        assert!(l1 <= 2.0 * (d_num * t).sqrt(), "l1 {l1}");
        // the 1/2 crossing sits within a cell of the exact front
        let crossing = interior
            .iter()
            .find(|&&i| c[g.cell(i, 0)] < 0.5)
            .map(|&i| g.cell_center(i, 0).0)
            .unwrap();
        assert!((crossing - front).abs() <= g.hx, "{crossing} vs {front}");
        assert!(c.iter().all(|&x| (-1e-15..=1.0 + 1e-15).contains(&x)));
    }

    #[test]
    fn diffuse_cases() {
        let g = StaggeredGrid::new(2.0, 1.0, 20, 10).unwrap();
        assert!(diffuse(&vec![3.0; g.cell_count()], 0.1, &g)
            .iter()
            .all(|&x| x == 0.0));

        let d = 0.3;
        let c = g.sample_cells(|x, _| (PI * x / 2.0).cos());
        let out = diffuse(&c, d, &g);
        let k2 = (PI / 2.0).powi(2);
        let err = out
            .iter()
            .zip(&c)
            .map(|(o, c)| (o + d * k2 * c).abs())
            .fold(0.0, f64::max);
        assert!(err < d * k2 * k2 * g.hx * g.hx / 12.0 * 1.01, "{err}");

        let c = g.sample_cells(|x, y| ((x * 7.3).sin() * 1e3 + (y * 31.0).cos()).fract());
        let total: f64 = diffuse(&c, 0.7, &g)
            .iter()
            .map(|x| x * g.cell_measure())
            .sum();
        assert!(total.abs() < 1e-12);
    }

    /// Fine RK4 integration of the reaction ODE, independent of the closed form.
    fn rk4_logistic(c0: f64, kappa: f64, t: f64) -> f64 {
        let f = |c: f64| kappa * c * (c - 1.0);
        let n = 10_000;
        let h = t / n as f64;
        let mut c = c0;
        for _ in 0..n {
            let k1 = f(c);
            let k2 = f(c + 0.5 * h * k1);
            let k3 = f(c + 0.5 * h * k2);
            let k4 = f(c + h * k3);
            c += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        c
    }

    #[test]
    fn reaction_values() {
        assert_eq!(logistic_step(0.0, 0.3, 5.0), Ok(0.0));
        assert_eq!(logistic_step(1.0, 0.3, 5.0), Ok(1.0));

        let oracle = rk4_logistic(0.8, 0.01, 10.0);
        let got = logistic_step(0.8, 0.01, 10.0).unwrap();
        assert!((got - oracle).abs() < 1e-13, "{got} vs {oracle}");
        assert!((got - 0.783_519_310_947_529_9).abs() < 1e-15);

        let t_star = logistic_step(1.2, 0.01, 200.0).unwrap_err();
        assert!((t_star - 179.175_946_922_805_5).abs() < 1e-10);
    }

    #[test]
    fn react_reports_earliest_cell() {
        let kappa = ScalarField::Constant(0.01);
        let err = react(&[0.5, 1.2, 2.0, 1.5], &kappa, 200.0, 10.0).unwrap_err();
        assert_eq!(err.cell, 2);
        assert!((err.t_local - 100.0 * 2f64.ln()).abs() < 1e-12);
        assert!((err.time - 10.0 - 100.0 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn react_flow_property() {
        let kappa = ScalarField::Constant(0.013);
        let c: Vec<f64> = (0..50).map(|k| k as f64 * 0.03).collect();
        let full = react(&c, &kappa, 7.0, 0.0).unwrap();
        let half = react(&react(&c, &kappa, 3.5, 0.0).unwrap(), &kappa, 3.5, 3.5).unwrap();
        for (a, b) in full.iter().zip(&half) {
            assert!((a - b).abs() <= 4.0 * f64::EPSILON * a.abs().max(1.0));
        }
    }

    #[test]
    fn uniform_reaction_tracks_logistic() {
        let g = StaggeredGrid::new(4.0, 4.0, 4, 4).unwrap();
        let kappa = ScalarField::Constant(0.01);
        let params = TransportParams {
            diffusion: 1e-6,
            reaction_rate: &kappa,
            dt: 2.0,
        };
        let mut s = State::zeros(&g);
        s.c.fill(0.8);
        for _ in 0..100 {
            s = transport_step(&s, &g, &params).unwrap();
            let exact = 0.8 / (0.8 + 0.2 * (0.01 * s.t).exp());
            for &c in &s.c {
                assert!((c - exact).abs() <= 1e-12 * exact);
            }
        }
    }

    #[test]
    fn uniform_supercritical_blows_up_on_time() {
        let g = StaggeredGrid::new(8.0, 8.0, 4, 4).unwrap();
        let kappa = ScalarField::Constant(0.01);
        let params = TransportParams {
            diffusion: 0.005,
            reaction_rate: &kappa,
            dt: 1.0,
        };
        let mut s = State::zeros(&g);
        s.c.fill(1.2);
        let t_star = 100.0 * 6f64.ln();
        loop {
            match transport_step(&s, &g, &params) {
                Ok(next) => s = next,
                Err(StepError::BlowUpDetected(event)) => {
                    assert!((event.time - t_star).abs() < 0.02 * t_star);
                    break;
                }
                Err(other) => panic!("{other}"),
            }
            assert!(s.t < 2.0 * t_star);
        }
    }

    #[test]
    fn stable_dt_examples() {
        let g = StaggeredGrid::new(400.0, 200.0, 100, 50).unwrap();
        let rest = State::zeros(&g);
        let limits = stable_dt_limits(&g, &rest, 0.005, 1.0);
        assert_eq!(limits.diffusion, 800.0);
        assert_eq!(limits.cfl, f64::INFINITY);
        assert_eq!(limits.viscous, 4.0);
        assert_eq!(stable_dt(&g, &rest, 0.005, 1e-9), 800.0);
        assert_eq!(stable_dt(&g, &rest, 0.005, 1.0), 4.0);

        let mut moving = State::zeros(&g);
        moving.u[g.u_face(3, 3)] = 0.1;
        moving.v[g.v_face(3, 3)] = -0.1;
        let bound = stable_dt(&g, &moving, 1e-12, 1e-9);
        assert!((bound - 18.0).abs() < 1e-9, "{bound}");
    }
}
