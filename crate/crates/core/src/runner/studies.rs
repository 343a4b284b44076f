use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use crate::analysis::{
    blowup_time, check_bounds, late_decay_rate, numerical_decay_rate, theoretical_decay_rate,
    BoundsReport, NormSeries, DEFAULT_EPS_TOL,
};
use crate::config::{InitialConcentration, ScalarField, SimConfig};
use crate::error::RunError;
use crate::grid::build_grid;
use crate::state::init_state;

use super::sim::{run_simulation, Simulation};

/// One completed cell of a decay sweep.
#[derive(Debug, Clone)]
pub struct DecayRun {
    pub series: NormSeries,
    pub report: BoundsReport,
    /// `lambda_num` at `t = 0`.
    pub lambda_num_0: Option<f64>,
    /// Late-time mean of `lambda_num`.
    pub lambda_num_late: Option<f64>,
}

#[derive(Debug)]
pub struct DecayCell {
    pub kappa: f64,
    pub m0: f64,
    pub lambda_theory: f64,
    pub outcome: Result<DecayRun, RunError>,
}

impl DecayCell {
    pub fn summary(&self) -> SummaryRow {
        let run = self.outcome.as_ref().ok();
        SummaryRow {
            kappa: self.kappa,
            m0: self.m0,
            lambda_theory: self.lambda_theory,
            lambda_num_0: run.and_then(|r| r.lambda_num_0),
            lambda_num_late: run.and_then(|r| r.lambda_num_late),
            decay_pass: run.is_some_and(|r| r.report.decay.is_pass()),
            maxprin_pass: run.is_some_and(|r| r.report.max_principle.is_pass()),
        }
    }
}

/// One row of the decay-study summary table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryRow {
    pub kappa: f64,
    pub m0: f64,
    pub lambda_theory: f64,
    pub lambda_num_0: Option<f64>,
    pub lambda_num_late: Option<f64>,
    pub decay_pass: bool,
    pub maxprin_pass: bool,
}

/// Sweep results in sweep order: `m0` varies fastest.
#[derive(Debug)]
pub struct DecayStudy {
    pub cells: Vec<DecayCell>,
}

impl DecayStudy {
    pub fn summary(&self) -> Vec<SummaryRow> {
        self.cells.iter().map(DecayCell::summary).collect()
    }

    pub fn all_pass(&self) -> bool {
        self.cells
            .iter()
            .all(|c| matches!(&c.outcome, Ok(run) if run.report.all_pass()))
    }
}

/// The base configuration with `kappa` and a step of height `m0`. The step
/// keeps the base step's extent, or covers `Lx/8 <= x <= 3 Lx/8` otherwise.
pub fn decay_config(base: &SimConfig, kappa: f64, m0: f64) -> SimConfig {
    let (x_lo, x_hi) = match base.initial_concentration {
        InitialConcentration::Step { x_lo, x_hi, .. } => (x_lo, x_hi),
        _ => (base.domain_extent.0 / 8.0, 3.0 * base.domain_extent.0 / 8.0),
    };
    SimConfig {
        reaction_rate: ScalarField::Constant(kappa),
        initial_concentration: InitialConcentration::Step {
            value: m0,
            x_lo,
            x_hi,
        },
        ..base.clone()
    }
}

fn decay_run(config: &SimConfig) -> Result<DecayRun, RunError> {
    let outcome = run_simulation(config)?;
    let series = outcome.series;
    let rates = numerical_decay_rate(&series)?;
    let report = check_bounds(
        &series,
        config,
        outcome.blowup.map(|b| b.time),
        DEFAULT_EPS_TOL,
    );
    Ok(DecayRun {
        lambda_num_0: rates.first().map(|&(_, r)| r),
        lambda_num_late: late_decay_rate(&series, &rates),
        series,
        report,
    })
}

/// Runs `jobs` on up to `available_parallelism` threads and returns the
/// results in job order.
fn run_parallel<T: Sync, R: Send>(jobs: Vec<T>, work: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let workers = thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(jobs.len());
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<R>>> = jobs.iter().map(|_| Mutex::new(None)).collect();
    thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(job) = jobs.get(k) else { break };
                let result = work(job);
                *slots[k].lock().unwrap() = Some(result);
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| slot.into_inner().unwrap().expect("every job ran"))
        .collect()
}

/// Decay runs over every `(kappa, m0)` pair, executed concurrently. A
/// failed cell is recorded in place and does not stop the others.
pub fn decay_study(base: &SimConfig, kappas: &[f64], m0s: &[f64]) -> Result<DecayStudy, RunError> {
    if kappas.is_empty() || m0s.is_empty() {
        return Err(RunError::Invalid(
            "decay study needs nonempty kappa and m0 lists".into(),
        ));
    }
    if let Some(k) = kappas.iter().find(|k| !(**k > 0.0 && k.is_finite())) {
        return Err(RunError::Invalid(format!(
            "kappa must be positive, got {k}"
        )));
    }
    if let Some(m) = m0s.iter().find(|m| !(0.0..1.0).contains(*m)) {
        return Err(RunError::Invalid(format!(
            "decay study needs 0 <= m0 < 1, got {m}"
        )));
    }
    let mut jobs = Vec::with_capacity(kappas.len() * m0s.len());
    for &kappa in kappas {
        for &m0 in m0s {
            let config = decay_config(base, kappa, m0);
            config.validate()?;
            jobs.push((kappa, m0, config));
        }
    }
    let cells = run_parallel(jobs, |(kappa, m0, config)| DecayCell {
        kappa: *kappa,
        m0: *m0,
        lambda_theory: theoretical_decay_rate(*kappa, *m0).expect("checked above"),
        outcome: decay_run(config),
    });
    Ok(DecayStudy { cells })
}

#[derive(Debug, Clone)]
pub struct BlowupStudy {
    pub series: NormSeries,
    pub report: BoundsReport,
    pub t_star: f64,
    pub measured: Option<f64>,
}

impl BlowupStudy {
    pub fn passed(&self) -> bool {
        self.report.blowup.is_pass()
    }

    /// `(measured - T*) / T*`.
    pub fn relative_error(&self) -> Option<f64> {
        self.measured.map(|t| (t - self.t_star) / self.t_star)
    }
}

/// Runs until blow-up or `3 T*`, whichever comes first, and checks the
/// lower-bound envelope and the blow-up time.
pub fn blowup_study(base: &SimConfig) -> Result<BlowupStudy, RunError> {
    base.validate()?;
    let grid = build_grid(base)?;
    let state = init_state(base, &grid)?;
    let mass0 = crate::analysis::mass(&state.c, &grid);
    let measure = grid.measure();
    if !(mass0 > measure) {
        return Err(RunError::Invalid(format!(
            "blow-up study needs mean c0 > 1, got {}",
            mass0 / measure
        )));
    }
    let t_star = blowup_time(mass0, base.kappa_bounds().0, measure)?;
    let config = SimConfig {
        end_time: 3.0 * t_star,
        ..base.clone()
    };
    let outcome = run_simulation(&config)?;
    let measured = outcome.blowup.map(|b| b.time);
    let report = check_bounds(&outcome.series, &config, measured, DEFAULT_EPS_TOL);
    Ok(BlowupStudy {
        series: outcome.series,
        report,
        t_star,
        measured,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationReport {
    pub delta: f64,
    pub times: Vec<f64>,
    /// `||c1 - c2||_2 + ||u1 - u2||_2` at each time.
    pub difference: Vec<f64>,
    /// `difference / difference(0)`; identically 1 when `delta = 0`.
    pub ratio: Vec<f64>,
    /// Smallest `Gamma >= 0` with `ratio(t) <= exp(Gamma t)` at every sample.
    pub gamma: f64,
    pub passed: bool,
}

fn l2_difference(a: &[f64], b: &[f64], weights: impl Fn(usize) -> f64) -> f64 {
    a.iter()
        .zip(b)
        .enumerate()
        .map(|(k, (x, y))| weights(k) * (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Runs `c0` and `c0 + delta` side by side with a shared step sequence and
/// tracks the growth of their difference.
pub fn perturbation_study(config: &SimConfig, delta: f64) -> Result<PerturbationReport, RunError> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(RunError::Invalid(format!(
            "delta must be nonnegative, got {delta}"
        )));
    }
    config.validate()?;
    let grid = build_grid(config)?;
    let c0 = init_state(config, &grid)?.c;
    let m0 = c0.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(m0 + delta < 1.0) {
        return Err(RunError::Invalid(format!(
            "perturbation study needs M0 + delta < 1, got {}",
            m0 + delta
        )));
    }
    let shifted = SimConfig {
        initial_concentration: InitialConcentration::PerCell(
            c0.iter().map(|c| c + delta).collect(),
        ),
        ..config.clone()
    };
    let mut a = Simulation::new(config.clone())?;
    let mut b = Simulation::new(shifted)?;

    let g = *a.grid();
    let cell = g.cell_measure();
    let u_weight = |k: usize| g.u_face_measure(k % (g.nx + 1));
    let v_weight = |k: usize| g.v_face_measure(k / g.nx);
    let distance = |a: &Simulation, b: &Simulation| {
        let (sa, sb) = (a.state(), b.state());
        l2_difference(&sa.c, &sb.c, |_| cell)
            + (l2_difference(&sa.u, &sb.u, u_weight).powi(2)
                + l2_difference(&sa.v, &sb.v, v_weight).powi(2))
            .sqrt()
    };

    let mut times = vec![0.0];
    let mut difference = vec![distance(&a, &b)];
    while !a.is_finished() && !b.is_finished() {
        let dt = a.next_dt()?.min(b.next_dt()?);
        let blown = a.advance_by(dt)?.is_some() | b.advance_by(dt)?.is_some();
        if blown {
            break;
        }
        times.push(a.state().t);
        difference.push(distance(&a, &b));
    }
    let blew_up = a.blowup().is_some() || b.blowup().is_some();

    let d0 = difference[0];
    let ratio: Vec<f64> = if d0 > 0.0 {
        difference.iter().map(|d| d / d0).collect()
    } else {
        vec![1.0; difference.len()]
    };
    let gamma = times
        .iter()
        .zip(&ratio)
        .filter(|(&t, _)| t > 0.0)
        .map(|(t, r)| r.ln() / t)
        .fold(0.0, f64::max);
    let passed = !blew_up && ratio.iter().all(|r| r.is_finite()) && gamma.is_finite();
    Ok(PerturbationReport {
        delta,
        times,
        difference,
        ratio,
        gamma,
        passed,
    })
}
