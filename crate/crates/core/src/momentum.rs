//! One time step of the Darcy-Forchheimer-Brinkman momentum balance with
//! incompressibility enforced by Chorin projection.
//!
//! The predictor treats both drag terms implicitly with the speed frozen at
//! the old level, and the Brinkman term explicitly:
//!
//! ```text
//! u* = (u + dt (mu_e lap(u) + f)) / (1 + dt (mu(c)/K + beta |u|))
//! ```
//!
//! There is no convective momentum term in the model and none is added here.

use crate::config::{ScalarField, SimConfig, VectorField};
use crate::error::StepError;
use crate::grid::StaggeredGrid;
use crate::linsolve::{poisson_neumann, CgOptions, CgSolution};
use crate::state::State;

/// Momentum coefficients, borrowed from a [`SimConfig`].
#[derive(Debug, Clone, Copy)]
pub struct MomentumParams<'a> {
    pub permeability: f64,
    pub forchheimer: &'a ScalarField,
    pub effective_viscosity: f64,
    pub viscosity_contrast: f64,
    pub truncation: Option<f64>,
    pub forcing: &'a VectorField,
    pub dt: f64,
}

impl<'a> MomentumParams<'a> {
    pub fn from_config(config: &'a SimConfig, dt: f64) -> Self {
        MomentumParams {
            permeability: config.permeability,
            forchheimer: &config.forchheimer,
            effective_viscosity: config.effective_viscosity,
            viscosity_contrast: config.viscosity_contrast,
            truncation: config.viscosity_truncation,
            forcing: &config.forcing,
            dt,
        }
    }
}

/// `mu(c) = exp(R c)`, or `exp(R clamp(c, 0, level))` when truncated.
#[inline]
pub fn viscosity_at(c: f64, contrast: f64, truncation: Option<f64>) -> f64 {
    let arg = match truncation {
        Some(level) => c.clamp(0.0, level),
        None => c,
    };
    (contrast * arg).exp()
}

pub fn viscosity(c: &[f64], contrast: f64, truncation: Option<f64>) -> Vec<f64> {
    c.iter()
        .map(|&c| viscosity_at(c, contrast, truncation))
        .collect()
}

/// Predictor velocity on u-faces and v-faces. Boundary faces stay zero.
pub fn predictor(
    state: &State,
    grid: &StaggeredGrid,
    params: &MomentumParams<'_>,
) -> Result<(Vec<f64>, Vec<f64>), StepError> {
    let g = grid;
    let dt = params.dt;
    let mu_e = params.effective_viscosity;
    let (ax, ay) = (1.0 / (g.hx * g.hx), 1.0 / (g.hy * g.hy));
    let (u, v, c) = (&state.u, &state.v, &state.c);
    let face_update = |value: f64, lap: f64, force: f64, c_bar: f64, beta: f64, speed: f64| {
        let drag = viscosity_at(c_bar, params.viscosity_contrast, params.truncation)
            / params.permeability
            + beta * speed;
        (value + dt * (mu_e * lap + force)) / (1.0 + dt * drag)
    };

    let mut u_star = vec![0.0; g.u_count()];
    for j in 0..g.ny {
        for i in 1..g.nx {
            let k = g.u_face(i, j);
            let uc = u[k];
            // no-slip ghosts: the wall sits halfway between the face and its mirror
            let north = if j + 1 < g.ny {
                u[g.u_face(i, j + 1)]
            } else {
                -uc
            };
            let south = if j > 0 { u[g.u_face(i, j - 1)] } else { -uc };
            let lap = ax * (u[k + 1] - 2.0 * uc + u[k - 1]) + ay * (north - 2.0 * uc + south);

            let (left, right) = (g.cell(i - 1, j), g.cell(i, j));
            let c_bar = 0.5 * (c[left] + c[right]);
            let beta = 0.5 * (params.forchheimer.at(left) + params.forchheimer.at(right));
            let force = 0.5 * (params.forcing.at(left)[0] + params.forcing.at(right)[0]);
            let v_bar = 0.25
                * (v[g.v_face(i - 1, j)]
                    + v[g.v_face(i, j)]
                    + v[g.v_face(i - 1, j + 1)]
                    + v[g.v_face(i, j + 1)]);
            let speed = uc.hypot(v_bar);
            u_star[k] = face_update(uc, lap, force, c_bar, beta, speed);
        }
    }

    let mut v_star = vec![0.0; g.v_count()];
    for j in 1..g.ny {
        for i in 0..g.nx {
            let k = g.v_face(i, j);
            let vc = v[k];
            let east = if i + 1 < g.nx { v[k + 1] } else { -vc };
            let west = if i > 0 { v[k - 1] } else { -vc };
            let lap = ay * (v[k + g.nx] - 2.0 * vc + v[k - g.nx]) + ax * (east - 2.0 * vc + west);

            let (below, above) = (g.cell(i, j - 1), g.cell(i, j));
            let c_bar = 0.5 * (c[below] + c[above]);
            let beta = 0.5 * (params.forchheimer.at(below) + params.forchheimer.at(above));
            let force = 0.5 * (params.forcing.at(below)[1] + params.forcing.at(above)[1]);
            let u_bar = 0.25
                * (u[g.u_face(i, j - 1)]
                    + u[g.u_face(i + 1, j - 1)]
                    + u[g.u_face(i, j)]
                    + u[g.u_face(i + 1, j)]);
            let speed = vc.hypot(u_bar);
            v_star[k] = face_update(vc, lap, force, c_bar, beta, speed);
        }
    }

    if u_star.iter().chain(&v_star).any(|x| !x.is_finite()) {
        return Err(StepError::Instability {
            field: "predictor velocity",
            dt,
        });
    }
    Ok((u_star, v_star))
}

/// Result of a pressure projection.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    /// Mean-zero projection multiplier.
    pub p: Vec<f64>,
    /// `max |div u|` of the projected field.
    pub divergence: f64,
    /// Conjugate-gradient iterations spent.
    pub iterations: usize,
}

/// Absolute divergence floor below which the predictor is taken as
/// already solenoidal.
pub const DIVERGENCE_FLOOR: f64 = 1e-13;

/// Projects a face velocity onto the discretely divergence-free fields.
///
/// Guarantees `max |div u| <= 10 tol max|div u*| + 1e-12` unless the solver
/// fails.
pub fn project(
    u_star: &[f64],
    v_star: &[f64],
    grid: &StaggeredGrid,
    dt: f64,
    tol: f64,
) -> Result<Projection, StepError> {
    let g = grid;
    let div_star = g.divergence(u_star, v_star);
    let div_star_max = div_star.iter().fold(0.0, |m: f64, d| m.max(d.abs()));
    let bound = 10.0 * tol * div_star_max + 1e-12;
    let rhs: Vec<f64> = div_star.iter().map(|d| d / dt).collect();

    let apply = |phi: &[f64]| {
        let mut u = u_star.to_vec();
        let mut v = v_star.to_vec();
        for j in 0..g.ny {
            for i in 1..g.nx {
                u[g.u_face(i, j)] -= dt * (phi[g.cell(i, j)] - phi[g.cell(i - 1, j)]) / g.hx;
            }
        }
        for j in 1..g.ny {
            for i in 0..g.nx {
                v[g.v_face(i, j)] -= dt * (phi[g.cell(i, j)] - phi[g.cell(i, j - 1)]) / g.hy;
            }
        }
        (u, v)
    };

    // The solver's contract is in the 2-norm; tighten until the max-norm
    // divergence bound holds as well.
    let mut iterations = 0;
    let mut relative = tol;
    loop {
        let options = CgOptions {
            tol: relative,
            abs_tol: DIVERGENCE_FLOOR / dt,
            max_iter: 10 * g.cell_count(),
        };
        let CgSolution {
            x: phi,
            iterations: its,
            ..
        } = poisson_neumann(g, &rhs, options)?;
        iterations += its;
        let (u, v) = apply(&phi);
        let divergence = g.max_divergence(&u, &v);
        if divergence <= bound || relative < 1e-15 {
            return Ok(Projection {
                u,
                v,
                p: phi,
                divergence,
                iterations,
            });
        }
        relative *= 0.01;
    }
}

/// Predictor followed by projection. The returned state keeps `c` and `t`.
pub fn momentum_step(
    state: &State,
    grid: &StaggeredGrid,
    params: &MomentumParams<'_>,
    tol: f64,
) -> Result<(State, Projection), StepError> {
    let (u_star, v_star) = predictor(state, grid, params)?;
    let projection = project(&u_star, &v_star, grid, params.dt, tol)?;
    let next = State {
        u: projection.u.clone(),
        v: projection.v.clone(),
        p: projection.p.clone(),
        c: state.c.clone(),
        t: state.t,
    };
    Ok((next, projection))
}

/// `1/2 ||u||^2` with face quadrature weights (half cells on the walls).
pub fn kinetic_energy(u: &[f64], v: &[f64], grid: &StaggeredGrid) -> f64 {
    let mut sum = 0.0;
    for j in 0..grid.ny {
        for i in 0..=grid.nx {
            let x = u[grid.u_face(i, j)];
            sum += grid.u_face_measure(i) * x * x;
        }
    }
    for j in 0..=grid.ny {
        let w = grid.v_face_measure(j);
        for i in 0..grid.nx {
            let y = v[grid.v_face(i, j)];
            sum += w * y * y;
        }
    }
    0.5 * sum
}

/// `||u||_{L2}`.
pub fn velocity_l2(u: &[f64], v: &[f64], grid: &StaggeredGrid) -> f64 {
    (2.0 * kinetic_energy(u, v, grid)).sqrt()
}
