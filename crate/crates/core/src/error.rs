use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while building or validating a configuration.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("missing required key `{0}`")]
    MissingKey(&'static str),
    #[error("line {line}: cannot parse value `{value}` for `{key}`")]
    BadValue {
        line: usize,
        key: String,
        value: String,
    },
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: duplicate key `{key}`")]
    Duplicate { line: usize, key: String },
    #[error("{}constraint violated: {message}", line_prefix(*.line))]
    Constraint {
        line: Option<usize>,
        message: String,
    },
}

fn line_prefix(line: Option<usize>) -> String {
    match line {
        Some(l) => format!("line {l}: "),
        None => String::new(),
    }
}

impl ConfigError {
    pub(crate) fn constraint(message: impl Into<String>) -> Self {
        ConfigError::Constraint {
            line: None,
            message: message.into(),
        }
    }
}

/// Failure of the conjugate-gradient solver.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("right-hand side contains non-finite values")]
    NonFiniteRhs,
    #[error("dimension mismatch: operator has {expected} unknowns, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("no convergence after {iterations} iterations (relative residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
}

/// Event raised when the concentration leaves every bounded set within a step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlowUp {
    /// Linear index of the first cell to blow up.
    pub cell: usize,
    /// Offset of the critical time from the start of the step.
    pub t_local: f64,
    /// Absolute critical time.
    pub time: f64,
}

/// Errors from a single time step of the coupled model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum StepError {
    #[error("blow-up detected in cell {} at t = {}", .0.cell, .0.time)]
    BlowUpDetected(BlowUp),
    #[error("non-finite values in {field} (dt = {dt})")]
    Instability { field: &'static str, dt: f64 },
    #[error("fixed time step {dt} exceeds stability bound {bound}")]
    UnstableTimeStep { dt: f64, bound: f64 },
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Errors from the analysis toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("decay analysis needs 0 <= M0 < 1, got {0}")]
    DecayHypothesis(f64),
    #[error("no blow-up guarantee: M(0) = {mass0} does not exceed |Omega| = {measure}")]
    NoBlowupGuarantee { mass0: f64, measure: f64 },
    #[error("t = {t} is not before the blow-up time {t_star}")]
    PastBlowup { t: f64, t_star: f64 },
    #[error("norm must be positive to take its logarithm (sample {index}, value {value})")]
    NonPositiveNorm { index: usize, value: f64 },
    #[error("invalid argument: {0}")]
    Invalid(String),
}

/// Errors surfaced by the experiment runner.
#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: StepError,
    },
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: malformed CSV: {message}")]
    Csv { path: PathBuf, message: String },
    #[error("invalid experiment: {0}")]
    Invalid(String),
}

impl RunError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        RunError::Io {
            path: path.into(),
            source,
        }
    }
}
