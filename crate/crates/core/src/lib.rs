//! Unsteady Darcy-Forchheimer-Brinkman flow coupled with a
//! convection-diffusion equation with quadratic kinetics `kappa c (c - 1)`,
//! discretized on a staggered (MAC) grid, plus tools for checking runs
//! against decay and blow-up bounds.
//!
//! ```
//! use dfb_core::{run_simulation, InitialConcentration, InitialVelocity, SimConfig};
//!
//! let config = SimConfig {
//!     domain_extent: (40.0, 20.0),
//!     resolution: (10, 5),
//!     end_time: 20.0,
//!     initial_velocity: InitialVelocity::Constant(0.0, 0.0),
//!     initial_concentration: InitialConcentration::Constant(0.5),
//!     ..SimConfig::reference()
//! };
//! let outcome = run_simulation(&config).unwrap();
//! assert!(outcome.series.last().unwrap().linf < 0.5);
//! ```

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod config;
pub mod error;
pub mod grid;
pub mod linsolve;
pub mod momentum;
pub mod runner;
pub mod state;
pub mod transport;

pub use analysis::{check_bounds, BoundsReport, Norm, NormRecord, NormSeries, Verdict};
pub use config::{
    format_config, parse_config, DtPolicy, InitialConcentration, InitialVelocity, ScalarField,
    SimConfig, VectorField,
};
pub use error::{AnalysisError, BlowUp, ConfigError, RunError, SolveError, StepError};
pub use grid::StaggeredGrid;
pub use runner::{
    run_experiment, run_simulation, ExperimentReport, ExperimentSpec, RunOutcome, Scenario,
    Simulation,
};
pub use state::State;
