//! Numeric evaluators for the concentration inequalities used as predictors
//! and sanity envelopes. Computed in log space, exponentiated last, clamped
//! to `[0,1]`.

use crate::error::{Error, Result};
use serde::Serialize;

/// A probability bound together with its log.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundValue {
    pub log_bound: f64,
    pub bound: f64,
}

impl BoundValue {
    fn from_log(log_bound: f64) -> Self {
        let log_bound = log_bound.min(0.0);
        BoundValue {
            log_bound,
            bound: log_bound.exp(),
        }
    }
}

/// `exp(-a² / (2 Σ c_i²))` for a martingale with increment sups `c_i`.
pub fn hoeffding_azuma(a: f64, c: &[f64]) -> Result<BoundValue> {
    if a < 0.0 {
        return Err(Error::invalid(format!("need a >= 0, got {a}")));
    }
    let sum_sq: f64 = c.iter().map(|x| x * x).sum();
    if sum_sq == 0.0 {
        // a deterministic martingale cannot deviate
        return Ok(BoundValue::from_log(if a > 0.0 {
            f64::NEG_INFINITY
        } else {
            0.0
        }));
    }
    Ok(BoundValue::from_log(-a * a / (2.0 * sum_sq)))
}

/// `exp(-a² / (8 ‖ψ‖²))` for a ψ-Lipschitz statistic of `G(n,m)`.
pub fn psi_lipschitz(a: f64, psi_norm_sq: f64) -> Result<BoundValue> {
    if a < 0.0 {
        return Err(Error::invalid(format!("need a >= 0, got {a}")));
    }
    if psi_norm_sq < 0.0 {
        return Err(Error::invalid("ψ-norm must be nonnegative"));
    }
    if psi_norm_sq == 0.0 {
        return Ok(BoundValue::from_log(if a > 0.0 {
            f64::NEG_INFINITY
        } else {
            0.0
        }));
    }
    Ok(BoundValue::from_log(-a * a / (8.0 * psi_norm_sq)))
}

/// `exp(-α² / (2(β + Rα)))`: deviation at most `α` with quadratic variation
/// budget `β` and increment sup `R`.
pub fn freedman_upper(alpha: f64, beta: f64, r: f64) -> Result<BoundValue> {
    if alpha < 0.0 || beta < 0.0 || r < 0.0 {
        return Err(Error::invalid("alpha, beta, R must be nonnegative"));
    }
    let denom = beta + r * alpha;
    if denom == 0.0 {
        return Err(Error::invalid("beta + R*alpha must be positive"));
    }
    Ok(BoundValue::from_log(-alpha * alpha / (2.0 * denom)))
}

/// Converse lower bound `½ exp(-α²(1+4δ)/(2β))` with the minimal feasible
/// slack `δ`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConverseFreedman {
    pub log_bound: f64,
    pub bound: f64,
    /// Minimal `δ > 0` with `β/α >= 9R/δ²` and `α²/β >= 16 log(64/δ²)/δ²`.
    pub delta: f64,
}

/// Default ceiling on the reported slack.
pub const DEFAULT_DELTA_MAX: f64 = 1e6;

pub fn freedman_converse(
    alpha: f64,
    beta: f64,
    r: f64,
    delta_max: f64,
) -> Result<ConverseFreedman> {
    if alpha <= 0.0 || beta <= 0.0 || r <= 0.0 {
        return Err(Error::invalid("alpha, beta, R must be positive"));
    }
    // constraint 1: delta >= 3 sqrt(R alpha / beta)
    let delta1 = 3.0 * (r * alpha / beta).sqrt();
    // constraint 2: g(delta) = 16 log(64/δ²)/δ² <= α²/β; g is decreasing on
    // (0, 8] and nonpositive beyond 8, so the minimal solution sits in (0, 8]
    let target = alpha * alpha / beta;
    let g = |d: f64| 16.0 * (64.0 / (d * d)).ln() / (d * d);
    let delta2 = {
        let mut hi = 8.0f64;
        let mut lo = 1e-12f64;
        if g(lo) <= target {
            lo
        } else {
            while (hi - lo) / hi > 1e-9 {
                let mid = 0.5 * (hi + lo);
                if g(mid) <= target {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            hi
        }
    };
    let delta = delta1.max(delta2);
    if delta > delta_max {
        return Err(Error::InfeasibleRegime(format!(
            "minimal slack delta={delta:.6} exceeds ceiling {delta_max}"
        )));
    }
    let log_bound = -(alpha * alpha) * (1.0 + 4.0 * delta) / (2.0 * beta) - 2f64.ln();
    Ok(ConverseFreedman {
        log_bound,
        bound: log_bound.exp(),
        delta,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HyperTailSide {
    /// `exp(-a²/(2μ+a))`.
    Upper,
    /// The sharper `exp(-a²/(2μ+2a/3))`.
    UpperSharp,
    /// `exp(-a²/(2μ))`.
    Lower,
}

/// Hypergeometric tail bounds around the mean `μ`.
pub fn hypergeometric_tail(mu: f64, a: f64, side: HyperTailSide) -> Result<BoundValue> {
    if mu <= 0.0 {
        return Err(Error::invalid(format!("need mu > 0, got {mu}")));
    }
    if a < 0.0 {
        return Err(Error::invalid(format!("need a >= 0, got {a}")));
    }
    let log = match side {
        HyperTailSide::Upper => -a * a / (2.0 * mu + a),
        HyperTailSide::UpperSharp => -a * a / (2.0 * mu + 2.0 * a / 3.0),
        HyperTailSide::Lower => -a * a / (2.0 * mu),
    };
    Ok(BoundValue::from_log(log))
}

/// Whole-range deviation envelope `exp(-c α min(α, sqrt(n)))`; `c` is supplied
/// by the caller, never asserted.
pub fn upto_bound(alpha: f64, n: f64, c: f64) -> Result<BoundValue> {
    if alpha <= 0.0 || n <= 0.0 || c <= 0.0 {
        return Err(Error::invalid("alpha, n, c must be positive"));
    }
    Ok(BoundValue::from_log(-c * alpha * alpha.min(n.sqrt())))
}
