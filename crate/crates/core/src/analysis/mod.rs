//! Norms, decay-rate diagnostics, blow-up bounds and the comparison ODE
//! integrator.

mod blowup;
mod bounds;
mod decay;
mod norms;
mod ode;
mod series;

pub use blowup::{blowup_lower_bound, blowup_time, mass_ode_rate};
pub use bounds::{check_bounds, BoundsReport, Verdict, DEFAULT_EPS_TOL, MAX_PRINCIPLE_TOL};
pub use decay::{
    derivative, late_decay_rate, numerical_decay_rate, theoretical_decay_rate, LATE_LINF_THRESHOLD,
};
pub use norms::{interpolation_constant, interpolation_constant_from, lp_norm, mass, Norm};
pub use ode::{ode_integrate, Divergence, OdeTrajectory, DIVERGENCE_THRESHOLD};
pub use series::{NormRecord, NormSeries};
