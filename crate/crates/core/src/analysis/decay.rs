use crate::analysis::series::NormSeries;
use crate::error::AnalysisError;

/// Guaranteed exponential decay rate `lambda = kappa_1 (1 - M0)` for data
/// bounded by `0 <= c0 <= M0 < 1`.
pub fn theoretical_decay_rate(kappa_min: f64, m0: f64) -> Result<f64, AnalysisError> {
    if !(0.0..1.0).contains(&m0) {
        return Err(AnalysisError::DecayHypothesis(m0));
    }
    if !(kappa_min > 0.0) {
        return Err(AnalysisError::Invalid(format!(
            "kappa_1 must be positive, got {kappa_min}"
        )));
    }
    Ok(kappa_min * (1.0 - m0))
}

/// Second-order derivative estimate on a possibly non-uniform grid:
/// centered three-point formula inside, one-sided three-point formula at the
/// ends (two-point when only two samples exist).
pub fn derivative(t: &[f64], y: &[f64]) -> Result<Vec<f64>, AnalysisError> {
    let n = t.len();
    if n != y.len() {
        return Err(AnalysisError::Invalid(
            "time and value lengths differ".into(),
        ));
    }
    match n {
        0 | 1 => {
            return Err(AnalysisError::Invalid(format!(
                "need at least two samples to differentiate, got {n}"
            )))
        }
        2 => {
            let slope = (y[1] - y[0]) / (t[1] - t[0]);
            return Ok(vec![slope, slope]);
        }
        _ => {}
    }
    let mut out = vec![0.0; n];
    for i in 1..n - 1 {
        let (h1, h2) = (t[i] - t[i - 1], t[i + 1] - t[i]);
        out[i] = -h2 / (h1 * (h1 + h2)) * y[i - 1]
            + (h2 - h1) / (h1 * h2) * y[i]
            + h1 / (h2 * (h1 + h2)) * y[i + 1];
    }
    let (h1, h2) = (t[1] - t[0], t[2] - t[1]);
    out[0] = -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * y[0] + (h1 + h2) / (h1 * h2) * y[1]
        - h1 / (h2 * (h1 + h2)) * y[2];
    let (h1, h2) = (t[n - 2] - t[n - 3], t[n - 1] - t[n - 2]);
    out[n - 1] = h2 / (h1 * (h1 + h2)) * y[n - 3] - (h1 + h2) / (h1 * h2) * y[n - 2]
        + (h1 + 2.0 * h2) / (h2 * (h1 + h2)) * y[n - 1];
    Ok(out)
}

/// `lambda_num(t) = -d/dt log ||c(t)||_1` at every sample.
pub fn numerical_decay_rate(series: &NormSeries) -> Result<Vec<(f64, f64)>, AnalysisError> {
    let t = series.times();
    let mut log_l1 = Vec::with_capacity(series.len());
    for (index, record) in series.records().iter().enumerate() {
        if !(record.l1 > 0.0) {
            return Err(AnalysisError::NonPositiveNorm {
                index,
                value: record.l1,
            });
        }
        log_l1.push(record.l1.ln());
    }
    let slope = derivative(&t, &log_l1)?;
    Ok(t.into_iter().zip(slope).map(|(t, s)| (t, -s)).collect())
}

/// Peak concentration below which a sample counts as late-time.
pub const LATE_LINF_THRESHOLD: f64 = 0.05;

/// Mean of `lambda_num` over the final 10% (at least one) of the samples
/// whose `||c||_inf` is below [`LATE_LINF_THRESHOLD`].
pub fn late_decay_rate(series: &NormSeries, rates: &[(f64, f64)]) -> Option<f64> {
    let late: Vec<f64> = series
        .records()
        .iter()
        .zip(rates)
        .filter(|(record, _)| record.linf < LATE_LINF_THRESHOLD)
        .map(|(_, &(_, rate))| rate)
        .collect();
    if late.is_empty() {
        return None;
    }
    let count = (late.len() / 10).max(1);
    let tail = &late[late.len() - count..];
    Some(tail.iter().sum::<f64>() / tail.len() as f64)
}
