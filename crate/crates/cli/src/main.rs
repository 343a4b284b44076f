//! `dfb`: run simulations and verification studies from the command line.
//!
//! Exit codes: 0 when every verdict passes, 1 on a verdict failure, 2 on a
//! usage or configuration error, 3 on a numerical failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dfb_core::runner::{run_experiment, ExperimentReport, ExperimentSpec, Scenario};
use dfb_core::{parse_config, RunError, SimConfig};

#[derive(Parser, Debug)]
#[command(
    name = "dfb",
    version,
    about = "Reactive Darcy-Forchheimer-Brinkman flow on a staggered grid"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one simulation and write its norm series.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Write the concentration field every N steps.
        #[arg(long, value_name = "N")]
        snapshot_stride: Option<usize>,
    },
    /// Sweep reaction rates and plateau heights of the step initial data.
    DecayStudy {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        kappa: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        m0: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run to blow-up and compare with the theoretical time and envelope.
    BlowupStudy {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Observed convergence orders of the discrete operators.
    Mms {
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        levels: Vec<usize>,
    },
    /// Growth of the difference between two runs with shifted initial data.
    Perturb {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        delta: f64,
    },
}

fn load(path: &Path) -> Result<SimConfig, RunError> {
    let text = fs::read_to_string(path).map_err(|source| RunError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(parse_config(&text)?)
}

fn spec_for(command: Command) -> Result<ExperimentSpec, RunError> {
    let spec = match command {
        Command::Simulate {
            config,
            out,
            snapshot_stride,
        } => ExperimentSpec {
            out_dir: Some(out),
            snapshot_stride,
            ..ExperimentSpec::new(Scenario::Simulate, load(&config)?)
        },
        Command::DecayStudy {
            config,
            kappa,
            m0,
            out,
        } => ExperimentSpec {
            kappas: kappa,
            m0s: m0,
            out_dir: Some(out),
            ..ExperimentSpec::new(Scenario::DecayStudy, load(&config)?)
        },
        Command::BlowupStudy { config, out } => ExperimentSpec {
            out_dir: Some(out),
            ..ExperimentSpec::new(Scenario::BlowupStudy, load(&config)?)
        },
        Command::Mms { levels } => ExperimentSpec {
            mms_levels: levels,
            ..ExperimentSpec::new(Scenario::Mms, SimConfig::reference())
        },
        Command::Perturb { config, delta } => ExperimentSpec {
            delta,
            ..ExperimentSpec::new(Scenario::Perturbation, load(&config)?)
        },
    };
    Ok(spec)
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), |x| format!("{x:.6e}"))
}

fn print_report(report: &ExperimentReport) {
    match report {
        ExperimentReport::Simulate { outcome, report } => {
            let last = outcome
                .series
                .last()
                .expect("series has the initial record");
            println!("steps recorded: {}", outcome.series.len());
            println!(
                "final t = {}  ||c||_inf = {:.6e}  ||c||_1 = {:.6e}",
                last.t, last.linf, last.l1
            );
            if let Some(event) = outcome.blowup {
                println!("blow-up in cell {} at t = {}", event.cell, event.time);
            }
            println!("decay envelope: {}", report.decay);
            println!("maximum principle: {}", report.max_principle);
            println!("blow-up bound: {}", report.blowup);
        }
        ExperimentReport::Decay(study) => {
            println!("kappa m0 lambda_theory lambda_num_0 lambda_num_late decay maxprin");
            for (cell, row) in study.cells.iter().zip(study.summary()) {
                if let Err(e) = &cell.outcome {
                    println!("{} {} failed: {e}", cell.kappa, cell.m0);
                    continue;
                }
                println!(
                    "{} {} {:.6e} {} {} {} {}",
                    row.kappa,
                    row.m0,
                    row.lambda_theory,
                    opt(row.lambda_num_0),
                    opt(row.lambda_num_late),
                    row.decay_pass,
                    row.maxprin_pass
                );
            }
        }
        ExperimentReport::Blowup(study) => {
            println!("T* (theory) = {}", study.t_star);
            println!("measured    = {}", opt(study.measured));
            if let Some(err) = study.relative_error() {
                println!("relative error = {:+.3}%", 100.0 * err);
            }
            println!("blow-up bound: {}", study.report.blowup);
        }
        ExperimentReport::Mms(report) => {
            println!("levels: {:?}", report.levels);
            for row in &report.rows {
                let orders: Vec<String> = row.orders.iter().map(|o| format!("{o:.3}")).collect();
                let verdict = if row.passed() { "PASS" } else { "FAIL" };
                println!(
                    "{:<10} orders [{}] (need >= {}) {verdict}",
                    row.operator.to_string(),
                    orders.join(", "),
                    row.operator.threshold()
                );
            }
        }
        ExperimentReport::Perturbation(report) => {
            let peak = report.ratio.iter().copied().fold(0.0, f64::max);
            println!("delta = {}", report.delta);
            println!(
                "samples = {}  max r(t) = {peak:.6}  Gamma = {:.6e}",
                report.times.len(),
                report.gamma
            );
            println!("verdict: {}", if report.passed { "PASS" } else { "FAIL" });
        }
    }
}

fn exit_code(error: &RunError) -> u8 {
    match error {
        RunError::Step { .. } | RunError::Analysis(_) => 3,
        RunError::Config(_) | RunError::Io { .. } | RunError::Csv { .. } | RunError::Invalid(_) => {
            2
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = spec_for(cli.command).and_then(|spec| run_experiment(&spec));
    match result {
        Ok(report) => {
            print_report(&report);
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(exit_code(&error))
        }
    }
}
