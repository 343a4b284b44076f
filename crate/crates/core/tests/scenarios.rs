use std::fs;
use std::path::Path;

use dfb_core::runner::{
    blowup_study, perturbation_study, read_series, run_experiment, ExperimentReport,
    ExperimentSpec, Scenario, SERIES_HEADER, SUMMARY_HEADER,
};
use dfb_core::{parse_config, InitialConcentration, InitialVelocity, RunError, SimConfig};

fn config_file(name: &str) -> SimConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name);
    parse_config(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn shipped_configs_parse() {
    assert_eq!(config_file("reference.cfg"), SimConfig::reference());
    let blowup = config_file("blowup.cfg");
    assert_eq!(
        blowup.initial_concentration,
        InitialConcentration::Constant(1.2)
    );
    assert_eq!(blowup.initial_velocity, InitialVelocity::Constant(0.0, 0.0));
}

#[test]
fn doubling_blowup() {
    let config = SimConfig {
        initial_concentration: InitialConcentration::Constant(2.0),
        initial_velocity: InitialVelocity::Constant(0.0, 0.0),
        ..SimConfig::reference()
    };
    let study = blowup_study(&config).unwrap();
    assert!((study.t_star - 69.314_718_055_994_53).abs() < 1e-9);
    assert!(study.relative_error().unwrap().abs() < 0.02);
    assert!(study.passed());
}

#[test]
fn subcritical_blowup_study_rejected() {
    let config = SimConfig {
        initial_concentration: InitialConcentration::Constant(0.5),
        ..SimConfig::reference()
    };
    assert!(matches!(blowup_study(&config), Err(RunError::Invalid(_))));
}

#[test]
fn reference_perturbation_stays_bounded() {
    let report = perturbation_study(&SimConfig::reference(), 1e-6).unwrap();
    assert!(report.passed);
    assert_eq!(report.times.last().copied(), Some(2000.0));
    let peak = report.ratio.iter().copied().fold(0.0, f64::max);
    assert!(peak.is_finite() && peak <= 1.0 + 1e-6, "{peak}");
}

#[test]
fn experiment_writes_csv_files() {
    let dir = tempfile::tempdir().unwrap();
    let base = SimConfig {
        domain_extent: (100.0, 50.0),
        resolution: (25, 12),
        end_time: 150.0,
        initial_concentration: InitialConcentration::Step {
            value: 0.8,
            x_lo: 12.0,
            x_hi: 36.0,
        },
        ..SimConfig::reference()
    };
    let spec = ExperimentSpec {
        kappas: vec![0.01, 0.02],
        m0s: vec![0.6],
        out_dir: Some(dir.path().join("decay")),
        ..ExperimentSpec::new(Scenario::DecayStudy, base.clone())
    };
    let report = run_experiment(&spec).unwrap();
    assert!(report.passed());
    let summary = fs::read_to_string(dir.path().join("decay/summary.csv")).unwrap();
    assert!(summary.starts_with(SUMMARY_HEADER));
    assert_eq!(summary.lines().count(), 3);
    let series = read_series(&dir.path().join("decay/decay_kappa0.02_m00.6.csv")).unwrap();
    assert_eq!(series.first().unwrap().linf, 0.6);

    let spec = ExperimentSpec {
        out_dir: Some(dir.path().join("sim")),
        snapshot_stride: Some(50),
        ..ExperimentSpec::new(Scenario::Simulate, base)
    };
    let ExperimentReport::Simulate { outcome, report } = run_experiment(&spec).unwrap() else {
        panic!("wrong report kind");
    };
    assert!(report.all_pass());
    let text = fs::read_to_string(dir.path().join("sim/series.csv")).unwrap();
    assert!(text.starts_with(SERIES_HEADER));
    assert_eq!(text.lines().count(), outcome.series.len() + 1);
    let snapshots = fs::read_dir(dir.path().join("sim"))
        .unwrap()
        .filter(|e| {
            e.as_ref()
                .unwrap()
                .file_name()
                .to_string_lossy()
                .starts_with("snapshot_")
        })
        .count();
    assert_eq!(snapshots, 4);
}

#[test]
fn experiment_validation() {
    let spec = ExperimentSpec::new(Scenario::DecayStudy, SimConfig::reference());
    assert!(matches!(run_experiment(&spec), Err(RunError::Invalid(_))));
    let spec = ExperimentSpec {
        snapshot_stride: Some(0),
        ..ExperimentSpec::new(Scenario::Simulate, SimConfig::reference())
    };
    assert!(matches!(run_experiment(&spec), Err(RunError::Invalid(_))));
    let spec = ExperimentSpec {
        mms_levels: vec![16, 32],
        ..ExperimentSpec::new(Scenario::Mms, SimConfig::reference())
    };
    assert!(matches!(run_experiment(&spec), Err(RunError::Invalid(_))));
}
