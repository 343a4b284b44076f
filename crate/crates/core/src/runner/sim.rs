use crate::analysis::{NormRecord, NormSeries};
use crate::config::{DtPolicy, SimConfig};
use crate::error::{BlowUp, RunError, StepError};
use crate::grid::{build_grid, StaggeredGrid};
use crate::linsolve::DEFAULT_TOL;
use crate::momentum::{momentum_step, project, MomentumParams};
use crate::state::{init_state, State};
use crate::transport::{stable_dt, transport_step, TransportParams};

/// Steps shorter than this fraction of `T` are merged into the previous one.
const SLIVER: f64 = 1e-9;

/// The coupled time loop: momentum predictor and projection, then transport
/// and reaction, recording norms after every step.
#[derive(Debug, Clone)]
pub struct Simulation {
    config: SimConfig,
    grid: StaggeredGrid,
    state: State,
    series: NormSeries,
    steps: usize,
    blowup: Option<BlowUp>,
    tol: f64,
}

impl Simulation {
    /// Validates the configuration, builds the initial state and projects
    /// the initial velocity onto divergence-free fields before recording
    /// `t = 0`.
    pub fn new(config: SimConfig) -> Result<Self, RunError> {
        config.validate()?;
        let grid = build_grid(&config)?;
        let mut state = init_state(&config, &grid)?;
        let tol = DEFAULT_TOL;
        let projection = project(&state.u, &state.v, &grid, 1.0, tol)
            .map_err(|source| RunError::Step { step: 0, source })?;
        state.u = projection.u;
        state.v = projection.v;
        let mut series = NormSeries::new();
        series.push(NormRecord::from_state(&state, &grid))?;
        Ok(Simulation {
            config,
            grid,
            state,
            series,
            steps: 0,
            blowup: None,
            tol,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn grid(&self) -> &StaggeredGrid {
        &self.grid
    }

    pub fn state(&self) -> &State {
        &self.state
    }

    pub fn series(&self) -> &NormSeries {
        &self.series
    }

    /// Completed steps.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn blowup(&self) -> Option<BlowUp> {
        self.blowup
    }

    /// True once `T` is reached or blow-up was detected.
    pub fn is_finished(&self) -> bool {
        self.blowup.is_some() || self.state.t >= self.config.end_time
    }

    /// Step the policy would take next, already shortened to land on `T`.
    pub fn next_dt(&self) -> Result<f64, RunError> {
        let bound = stable_dt(
            &self.grid,
            &self.state,
            self.config.diffusion,
            self.config.effective_viscosity,
        );
        let dt = match self.config.dt_policy {
            DtPolicy::Adaptive { max } => max.min(bound),
            DtPolicy::Fixed(dt) if dt <= bound => dt,
            DtPolicy::Fixed(dt) => {
                return Err(RunError::Step {
                    step: self.steps + 1,
                    source: StepError::UnstableTimeStep { dt, bound },
                })
            }
        };
        let remaining = self.config.end_time - self.state.t;
        if remaining - dt <= SLIVER * self.config.end_time {
            Ok(remaining)
        } else {
            Ok(dt)
        }
    }

    /// Advances one step with the policy's `dt`. Returns the blow-up event
    /// when the step crossed a singularity; the state is then left at the
    /// last finite level.
    pub fn advance(&mut self) -> Result<Option<BlowUp>, RunError> {
        let dt = self.next_dt()?;
        self.advance_by(dt)
    }

    /// Advances one step of length `dt`. If the projected velocity tightens
    /// the transport limit below `dt`, the step is retried with the new
    /// limit.
    pub fn advance_by(&mut self, dt: f64) -> Result<Option<BlowUp>, RunError> {
        if self.is_finished() {
            return Ok(self.blowup);
        }
        let step = self.steps + 1;
        let wrap = |source| RunError::Step { step, source };
        let mut dt = dt;
        let mut attempts = 0;
        let (flow, _) = loop {
            let params = MomentumParams::from_config(&self.config, dt);
            let (flow, projection) =
                momentum_step(&self.state, &self.grid, &params, self.tol).map_err(wrap)?;
            if let Some(field) = flow.non_finite_field() {
                return Err(wrap(StepError::Instability { field, dt }));
            }
            let bound = stable_dt(
                &self.grid,
                &flow,
                self.config.diffusion,
                self.config.effective_viscosity,
            );
            if dt <= bound || attempts == 8 {
                break (flow, projection);
            }
            if let DtPolicy::Fixed(_) = self.config.dt_policy {
                return Err(wrap(StepError::UnstableTimeStep { dt, bound }));
            }
            dt = bound;
            attempts += 1;
        };

        let params = TransportParams::from_config(&self.config, dt);
        match transport_step(&flow, &self.grid, &params) {
            Ok(mut next) => {
                if (self.config.end_time - next.t).abs() <= SLIVER * self.config.end_time {
                    next.t = self.config.end_time;
                }
                self.series
                    .push(NormRecord::from_state(&next, &self.grid))?;
                self.state = next;
                self.steps = step;
                Ok(None)
            }
            Err(StepError::BlowUpDetected(event)) => {
                self.blowup = Some(event);
                self.steps = step;
                Ok(Some(event))
            }
            Err(source) => Err(wrap(source)),
        }
    }

    /// Fills the `lambda_num` column and returns the outcome.
    pub fn finish(self) -> RunOutcome {
        let mut series = self.series;
        series.fill_lambda_num();
        RunOutcome {
            series,
            state: self.state,
            blowup: self.blowup,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub series: NormSeries,
    /// Last recorded state.
    pub state: State,
    pub blowup: Option<BlowUp>,
}

/// Runs to `T` or to blow-up.
pub fn run_simulation(config: &SimConfig) -> Result<RunOutcome, RunError> {
    run_simulation_with(config, |_, _, _| Ok(()))
}

/// Like [`run_simulation`], calling `observer(step, state, grid)` on the
/// initial state and after every completed step.
pub fn run_simulation_with(
    config: &SimConfig,
    mut observer: impl FnMut(usize, &State, &StaggeredGrid) -> Result<(), RunError>,
) -> Result<RunOutcome, RunError> {
    let mut sim = Simulation::new(config.clone())?;
    observer(0, sim.state(), sim.grid())?;
    while !sim.is_finished() {
        if sim.advance()?.is_none() {
            observer(sim.steps(), sim.state(), sim.grid())?;
        }
    }
    Ok(sim.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{InitialConcentration, InitialVelocity};

    fn small(c0: InitialConcentration) -> SimConfig {
        SimConfig {
            domain_extent: (40.0, 20.0),
            resolution: (20, 10),
            end_time: 50.0,
            initial_concentration: c0,
            ..SimConfig::reference()
        }
    }

    #[test]
    fn zero_data_stays_zero() {
        let mut config = small(InitialConcentration::Constant(0.0));
        config.initial_velocity = InitialVelocity::Constant(0.0, 0.0);
        let out = run_simulation(&config).unwrap();
        assert!(out.blowup.is_none());
        for r in out.series.records() {
            assert_eq!(
                (r.l1, r.l2, r.linf, r.mass, r.u_l2, r.div_residual),
                (0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
            );
            assert_eq!(r.lambda_num, None);
        }
        assert_eq!(out.series.last().unwrap().t, 50.0);
    }

    #[test]
    fn times_increase_and_land_on_end() {
        let mut config = small(InitialConcentration::Constant(0.5));
        config.end_time = 10.3;
        let out = run_simulation(&config).unwrap();
        let t = out.series.times();
        assert!(t.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(*t.last().unwrap(), 10.3);
        assert_eq!(t.len(), 12);
        assert!(out.series.records().iter().all(|r| r.lambda_num.is_some()));
    }

    #[test]
    fn initial_velocity_is_projected() {
        let sim = Simulation::new(small(InitialConcentration::Constant(0.5))).unwrap();
        let residual = sim.series().first().unwrap().div_residual;
        assert!(residual < 1e-10, "{residual}");
        assert!(sim.series().first().unwrap().u_l2 > 0.0);
    }

    #[test]
    fn fixed_step_above_bound_is_rejected() {
        let mut config = small(InitialConcentration::Constant(0.5));
        config.dt_policy = DtPolicy::Fixed(10.0);
        let err = run_simulation(&config).unwrap_err();
        assert!(matches!(
            err,
            RunError::Step {
                step: 1,
                source: StepError::UnstableTimeStep { .. }
            }
        ));
    }

    #[test]
    fn blowup_stops_the_run() {
        let mut config = small(InitialConcentration::Constant(2.0));
        config.initial_velocity = InitialVelocity::Constant(0.0, 0.0);
        config.end_time = 200.0;
        let out = run_simulation(&config).unwrap();
        let event = out.blowup.unwrap();
        let t_star = 100.0 * 2f64.ln();
        assert!(
            (event.time - t_star).abs() < 1e-9 * t_star,
            "{}",
            event.time
        );
        assert!(out.series.last().unwrap().t < t_star);
    }

    #[test]
    fn observer_sees_every_recorded_state() {
        let config = small(InitialConcentration::Constant(0.5));
        let mut seen = Vec::new();
        let out = run_simulation_with(&config, |step, state, _| {
            seen.push((step, state.t));
            Ok(())
        })
        .unwrap();
        assert_eq!(seen.len(), out.series.len());
        assert_eq!(seen[0], (0, 0.0));
    }

    #[test]
    fn invalid_config_is_reported() {
        let mut config = small(InitialConcentration::Constant(0.5));
        config.diffusion = -1.0;
        assert!(matches!(run_simulation(&config), Err(RunError::Config(_))));
    }
}
