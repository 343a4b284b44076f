//! The coupled time loop, the experiment scenarios and their CSV output.

mod csv;
mod mms;
mod sim;
mod studies;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

pub use csv::{
    format_series, read_series, write_series, write_snapshot, write_summary, SERIES_HEADER,
    SNAPSHOT_HEADER, SUMMARY_HEADER,
};
pub use mms::{mms_convergence, MmsOperator, MmsReport, MmsRow};
pub use sim::{run_simulation, run_simulation_with, RunOutcome, Simulation};
pub use studies::{
    blowup_study, decay_config, decay_study, perturbation_study, BlowupStudy, DecayCell, DecayRun,
    DecayStudy, PerturbationReport, SummaryRow,
};

use crate::analysis::{check_bounds, BoundsReport, DEFAULT_EPS_TOL};
use crate::config::SimConfig;
use crate::error::RunError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Simulate,
    DecayStudy,
    BlowupStudy,
    Mms,
    Perturbation,
}

/// Everything needed to reproduce one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub scenario: Scenario,
    pub base: SimConfig,
    pub kappas: Vec<f64>,
    pub m0s: Vec<f64>,
    pub mms_levels: Vec<usize>,
    pub delta: f64,
    /// Where CSV files go; nothing is written when `None`.
    pub out_dir: Option<PathBuf>,
    /// Write a concentration snapshot every this many steps.
    pub snapshot_stride: Option<usize>,
}

impl ExperimentSpec {
    pub fn new(scenario: Scenario, base: SimConfig) -> Self {
        ExperimentSpec {
            scenario,
            base,
            kappas: Vec::new(),
            m0s: Vec::new(),
            mms_levels: Vec::new(),
            delta: 0.0,
            out_dir: None,
            snapshot_stride: None,
        }
    }

    pub fn validate(&self) -> Result<(), RunError> {
        if self.snapshot_stride == Some(0) {
            return Err(RunError::Invalid("snapshot stride must be >= 1".into()));
        }
        match self.scenario {
            Scenario::DecayStudy if self.kappas.is_empty() || self.m0s.is_empty() => Err(
                RunError::Invalid("decay study needs nonempty kappa and m0 lists".into()),
            ),
            Scenario::Mms if self.mms_levels.len() < 3 => {
                Err(RunError::Invalid("MMS needs at least three levels".into()))
            }
            Scenario::Mms => Ok(()),
            _ => Ok(self.base.validate()?),
        }
    }
}

#[derive(Debug)]
pub enum ExperimentReport {
    Simulate {
        outcome: RunOutcome,
        report: BoundsReport,
    },
    Decay(DecayStudy),
    Blowup(BlowupStudy),
    Mms(MmsReport),
    Perturbation(PerturbationReport),
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        match self {
            ExperimentReport::Simulate { report, .. } => report.all_pass(),
            ExperimentReport::Decay(study) => study.all_pass(),
            ExperimentReport::Blowup(study) => study.passed(),
            ExperimentReport::Mms(report) => report.passed(),
            ExperimentReport::Perturbation(report) => report.passed,
        }
    }
}

fn prepare(dir: &Path) -> Result<(), RunError> {
    fs::create_dir_all(dir).map_err(|e| RunError::io(dir, e))
}

fn write_plain(path: &Path, text: &str) -> Result<(), RunError> {
    fs::write(path, text).map_err(|e| RunError::io(path, e))
}

/// Runs the scenario and writes its CSV files into `out_dir`.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport, RunError> {
    spec.validate()?;
    let out = spec.out_dir.as_deref();
    if let Some(dir) = out {
        prepare(dir)?;
    }
    match spec.scenario {
        Scenario::Simulate => {
            let stride = spec.snapshot_stride;
            let outcome =
                run_simulation_with(&spec.base, |step, state, grid| match (out, stride) {
                    (Some(dir), Some(stride)) if step % stride == 0 => {
                        write_snapshot(&state.c, grid, &dir.join(format!("snapshot_{step:06}.csv")))
                    }
                    _ => Ok(()),
                })?;
            if let Some(dir) = out {
                write_series(&outcome.series, &dir.join("series.csv"))?;
            }
            let report = check_bounds(
                &outcome.series,
                &spec.base,
                outcome.blowup.map(|b| b.time),
                DEFAULT_EPS_TOL,
            );
            Ok(ExperimentReport::Simulate { outcome, report })
        }
        Scenario::DecayStudy => {
            let study = decay_study(&spec.base, &spec.kappas, &spec.m0s)?;
            if let Some(dir) = out {
                for cell in &study.cells {
                    if let Ok(run) = &cell.outcome {
                        let name = format!("decay_kappa{}_m0{}.csv", cell.kappa, cell.m0);
                        write_series(&run.series, &dir.join(name))?;
                    }
                }
                write_summary(&study.summary(), &dir.join("summary.csv"))?;
            }
            Ok(ExperimentReport::Decay(study))
        }
        Scenario::BlowupStudy => {
            let study = blowup_study(&spec.base)?;
            if let Some(dir) = out {
                write_series(&study.series, &dir.join("series.csv"))?;
                let mut text = String::from("t,lower_bound\n");
                for (t, bound) in &study.report.lower_bound_curve {
                    let _ = writeln!(text, "{t:?},{bound:?}");
                }
                write_plain(&dir.join("lower_bound.csv"), &text)?;
            }
            Ok(ExperimentReport::Blowup(study))
        }
        Scenario::Mms => {
            let report = mms_convergence(&spec.mms_levels)?;
            if let Some(dir) = out {
                let mut text = String::from("operator,level,error,order\n");
                for row in &report.rows {
                    for (k, (level, error)) in report.levels.iter().zip(&row.errors).enumerate() {
                        let order = k
                            .checked_sub(1)
                            .map(|k| format!("{:?}", row.orders[k]))
                            .unwrap_or_default();
                        let _ = writeln!(text, "{},{level},{error:?},{order}", row.operator);
                    }
                }
                write_plain(&dir.join("mms.csv"), &text)?;
            }
            Ok(ExperimentReport::Mms(report))
        }
        Scenario::Perturbation => {
            let report = perturbation_study(&spec.base, spec.delta)?;
            if let Some(dir) = out {
                let mut text = String::from("t,difference,ratio\n");
                for ((t, d), r) in report
                    .times
                    .iter()
                    .zip(&report.difference)
                    .zip(&report.ratio)
                {
                    let _ = writeln!(text, "{t:?},{d:?},{r:?}");
                }
                write_plain(&dir.join("perturbation.csv"), &text)?;
            }
            Ok(ExperimentReport::Perturbation(report))
        }
    }
}
