//! Finite-time blow-up bounds built on the mass functional `M(t) = int c`,
//! which satisfies `M' >= (kappa_1 / |Omega|) (M^2 - |Omega| M)` once
//! `c0 >= M > 1`.

use crate::error::AnalysisError;

fn check_supercritical(mass0: f64, measure: f64) -> Result<(), AnalysisError> {
    if !(measure > 0.0) {
        return Err(AnalysisError::Invalid(format!(
            "domain measure must be positive, got {measure}"
        )));
    }
    if !(mass0 > measure) {
        return Err(AnalysisError::NoBlowupGuarantee { mass0, measure });
    }
    Ok(())
}

/// Upper bound on the blow-up time,
/// `T* = ln(M(0) / (M(0) - |Omega|)) / kappa_1`.
pub fn blowup_time(mass0: f64, kappa_min: f64, measure: f64) -> Result<f64, AnalysisError> {
    check_supercritical(mass0, measure)?;
    if !(kappa_min > 0.0) {
        return Err(AnalysisError::Invalid(format!(
            "kappa_1 must be positive, got {kappa_min}"
        )));
    }
    Ok((mass0 / (mass0 - measure)).ln() / kappa_min)
}

/// Lower bound on `||c(t)||_inf`:
/// `M(0) / (M(0) - (M(0) - |Omega|) exp(kappa_1 t))`, valid for `t < T*`.
pub fn blowup_lower_bound(
    t: f64,
    mass0: f64,
    kappa_min: f64,
    measure: f64,
) -> Result<f64, AnalysisError> {
    let t_star = blowup_time(mass0, kappa_min, measure)?;
    if !(t < t_star) || t < 0.0 {
        return Err(AnalysisError::PastBlowup { t, t_star });
    }
    Ok(mass0 / (mass0 - (mass0 - measure) * (kappa_min * t).exp()))
}

/// Right-hand side of the comparison ODE for the mass functional.
pub fn mass_ode_rate(mass: f64, kappa_min: f64, measure: f64) -> f64 {
    kappa_min / measure * (mass * mass - measure * mass)
}
