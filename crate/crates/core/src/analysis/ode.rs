//! Classical fourth-order Runge-Kutta for scalar comparison ODEs.

use crate::error::AnalysisError;

/// Magnitude beyond which a trajectory is declared divergent.
pub const DIVERGENCE_THRESHOLD: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Divergence {
    /// Last sample time with a finite value below the threshold.
    pub last_finite_t: f64,
    /// Sample time at which the threshold was exceeded.
    pub flagged_t: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OdeTrajectory {
    pub t: Vec<f64>,
    pub y: Vec<f64>,
    pub divergence: Option<Divergence>,
}

/// Integrates `y' = f(t, y)` over `span` with fixed step `dt` (the last step
/// is shortened to land on the end). Stops at the first sample with
/// `|y| > 1e12` or a non-finite value.
pub fn ode_integrate(
    f: impl Fn(f64, f64) -> f64,
    y0: f64,
    span: (f64, f64),
    dt: f64,
) -> Result<OdeTrajectory, AnalysisError> {
    let (t0, t1) = span;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(AnalysisError::Invalid(format!(
            "dt must be positive, got {dt}"
        )));
    }
    if !(t1 >= t0) || !y0.is_finite() {
        return Err(AnalysisError::Invalid(format!(
            "bad span [{t0}, {t1}] or initial value {y0}"
        )));
    }
    let ratio = (t1 - t0) / dt;
    let steps = if (ratio - ratio.round()).abs() <= 1e-9 * ratio.max(1.0) {
        ratio.round() as usize
    } else {
        ratio.ceil() as usize
    };
    let mut t_out = Vec::with_capacity(steps + 1);
    let mut y_out = Vec::with_capacity(steps + 1);
    t_out.push(t0);
    y_out.push(y0);
    let (mut t, mut y) = (t0, y0);
    for k in 0..steps {
        let t_next = if k + 1 == steps {
            t1
        } else {
            t0 + (k + 1) as f64 * dt
        };
        let h = t_next - t;
        let k1 = f(t, y);
        let k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
        let k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
        let k4 = f(t + h, y + h * k3);
        let y_next = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if !y_next.is_finite() || y_next.abs() > DIVERGENCE_THRESHOLD {
            return Ok(OdeTrajectory {
                t: t_out,
                y: y_out,
                divergence: Some(Divergence {
                    last_finite_t: t,
                    flagged_t: t_next,
                }),
            });
        }
        t = t_next;
        y = y_next;
        t_out.push(t);
        y_out.push(y);
    }
    Ok(OdeTrajectory {
        t: t_out,
        y: y_out,
        divergence: None,
    })
}
