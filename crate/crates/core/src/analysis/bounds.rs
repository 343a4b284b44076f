//! Verdicts of a recorded run against the decay, maximum-principle and
//! blow-up bounds. Everything here is computed from a [`NormSeries`] and the
//! configuration alone.

use std::fmt;

use crate::analysis::blowup::{blowup_lower_bound, blowup_time};
use crate::analysis::decay::theoretical_decay_rate;
use crate::analysis::norms::{interpolation_constant_from, Norm};
use crate::analysis::series::NormSeries;
use crate::config::SimConfig;

/// Default relative slack on every envelope comparison.
pub const DEFAULT_EPS_TOL: f64 = 0.02;
/// Absolute slack on the maximum principle.
pub const MAX_PRINCIPLE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Pass,
    Fail(String),
    /// The hypothesis of the underlying bound does not hold for this data.
    NotApplicable,
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, Verdict::Fail(_))
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => f.write_str("PASS"),
            Verdict::Fail(why) => write!(f, "FAIL ({why})"),
            Verdict::NotApplicable => f.write_str("N/A"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    /// `kappa_1 (1 - M0)` when `0 <= c0 <= M0 < 1`.
    pub lambda_theory: Option<f64>,
    /// `C_p` for `L1`, `L2`, `Linf`.
    pub c_p: [(Norm, f64); 3],
    /// Blow-up time bound when the mean of `c0` exceeds 1.
    pub t_star: Option<f64>,
    /// `(t, lower bound on ||c||_inf)` at the recorded times before `T*`.
    pub lower_bound_curve: Vec<(f64, f64)>,
    pub measured_blowup: Option<f64>,
    pub decay: Verdict,
    pub max_principle: Verdict,
    pub blowup: Verdict,
}

impl BoundsReport {
    /// True when no verdict failed.
    pub fn all_pass(&self) -> bool {
        !(self.decay.is_fail() || self.max_principle.is_fail() || self.blowup.is_fail())
    }
}

/// Checks a series against the theoretical bounds with relative slack
/// `eps_tol`. `blowup_at` is the detected blow-up time, if any.
pub fn check_bounds(
    series: &NormSeries,
    config: &SimConfig,
    blowup_at: Option<f64>,
    eps_tol: f64,
) -> BoundsReport {
    let measure = config.domain_measure();
    let (kappa_min, _) = config.kappa_bounds();
    let Some(initial) = series.first() else {
        let missing = || Verdict::Fail("empty series".into());
        return BoundsReport {
            lambda_theory: None,
            c_p: Norm::ALL.map(|p| (p, 0.0)),
            t_star: None,
            lower_bound_curve: Vec::new(),
            measured_blowup: blowup_at,
            decay: missing(),
            max_principle: missing(),
            blowup: missing(),
        };
    };
    let m0 = initial.linf;
    let nonnegative = initial.c_min >= 0.0;
    let c_p = Norm::ALL.map(|p| {
        (
            p,
            interpolation_constant_from(initial.l1, initial.linf, p.exponent()),
        )
    });

    let lambda_theory = if nonnegative {
        theoretical_decay_rate(kappa_min, m0).ok()
    } else {
        None
    };
    let decay = match lambda_theory {
        None => Verdict::NotApplicable,
        Some(lambda) => {
            let violation = series.records().iter().find_map(|r| {
                c_p.iter().find_map(|&(p, c)| {
                    let envelope = c * (-lambda * r.t).exp() * (1.0 + eps_tol);
                    (r.norm(p) > envelope).then(|| {
                        format!(
                            "t = {}: {p} norm {} exceeds envelope {envelope}",
                            r.t,
                            r.norm(p)
                        )
                    })
                })
            });
            violation.map_or(Verdict::Pass, Verdict::Fail)
        }
    };

    let max_principle = if nonnegative && m0 <= 1.0 {
        let violation = series.records().iter().find_map(|r| {
            if r.c_min < -MAX_PRINCIPLE_TOL {
                Some(format!("t = {}: min c = {}", r.t, r.c_min))
            } else if r.linf > m0 + MAX_PRINCIPLE_TOL {
                Some(format!("t = {}: max c = {} > M0 = {m0}", r.t, r.linf))
            } else {
                None
            }
        });
        violation.map_or(Verdict::Pass, Verdict::Fail)
    } else {
        Verdict::NotApplicable
    };

    let mass0 = initial.mass;
    let t_star = blowup_time(mass0, kappa_min, measure).ok();
    let mut lower_bound_curve = Vec::new();
    let blowup = match t_star {
        None => Verdict::NotApplicable,
        Some(t_star) => {
            let mut failure = None;
            for r in series.records() {
                let Ok(bound) = blowup_lower_bound(r.t, mass0, kappa_min, measure) else {
                    continue;
                };
                lower_bound_curve.push((r.t, bound));
                if failure.is_none() && r.linf < bound * (1.0 - eps_tol) {
                    failure = Some(format!(
                        "t = {}: ||c||_inf = {} below bound {bound}",
                        r.t, r.linf
                    ));
                }
            }
            match (failure, blowup_at) {
                (Some(why), _) => Verdict::Fail(why),
                (None, None) => Verdict::Fail("no blow-up detected".into()),
                (None, Some(t)) if t > t_star * (1.0 + eps_tol) => {
                    Verdict::Fail(format!("blow-up at {t} later than T* = {t_star}"))
                }
                (None, Some(_)) => Verdict::Pass,
            }
        }
    };

    BoundsReport {
        lambda_theory,
        c_p,
        t_star,
        lower_bound_curve,
        measured_blowup: blowup_at,
        decay,
        max_principle,
        blowup,
    }
}
