//! The `G(n,p)` side: exact binomial tails, the corrective tail series, the
//! edge-count conditioning identity, and moderate-deviation rate formulas.
//!
//! All tail arithmetic happens in natural-log space; exponentials are applied
//! only at the presentation layer.

use crate::combin::{binomial_int, falling_u128, ln_falling, pair_count};
use crate::error::{Error, Result};
use crate::graph::{count_embeddings, DenseGraph, Pattern};
use crate::montecarlo::gamma_rate;
use crate::numeric::{ln_choose, log_add_exp, Kahan};
use crate::scalar::Scalar;
use crate::Exact;
use serde::Serialize;

/// Binomial law `Bin(trials, p)` with `0 < p < 1`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BinomialSpec {
    pub trials: u64,
    pub p: f64,
}

impl BinomialSpec {
    pub fn new(trials: u64, p: f64) -> Result<Self> {
        if !(0.0 < p && p < 1.0) {
            return Err(Error::invalid(format!("need 0 < p < 1, got {p}")));
        }
        if trials == 0 {
            return Err(Error::invalid("need at least one trial"));
        }
        Ok(BinomialSpec { trials, p })
    }

    pub fn q(&self) -> f64 {
        1.0 - self.p
    }

    pub fn mean(&self) -> f64 {
        self.trials as f64 * self.p
    }

    pub fn sigma(&self) -> f64 {
        (self.trials as f64 * self.p * self.q()).sqrt()
    }

    /// Standardised coordinate `x(k) = (k - pN)/sqrt(Npq)`.
    pub fn standardize(&self, k: f64) -> f64 {
        (k - self.mean()) / self.sigma()
    }

    pub fn ln_pmf(&self, k: u64) -> Result<f64> {
        if k > self.trials {
            return Err(Error::invalid(format!("k={k} out of 0..={}", self.trials)));
        }
        Ok(ln_choose(self.trials, k)
            + k as f64 * self.p.ln()
            + (self.trials - k) as f64 * self.q().ln())
    }

    pub fn pmf(&self, k: u64) -> Result<f64> {
        Ok(self.ln_pmf(k)?.exp())
    }

    /// `log P(Bin >= k)` by stable upward summation from `k`.
    pub fn ln_upper_tail(&self, k: u64) -> Result<f64> {
        if k == 0 {
            return Ok(0.0);
        }
        if k > self.trials {
            return Err(Error::invalid(format!("k={k} out of 0..={}", self.trials)));
        }
        let mode = ((self.trials + 1) as f64 * self.p).floor() as u64;
        let mut ln_term = self.ln_pmf(k)?;
        let mut acc = ln_term;
        for j in k..self.trials {
            ln_term += ((self.trials - j) as f64 * self.p).ln() - ((j + 1) as f64 * self.q()).ln();
            acc = log_add_exp(acc, ln_term);
            if j + 1 > mode && ln_term < acc - 60.0 {
                break;
            }
        }
        Ok(acc.min(0.0))
    }

    pub fn upper_tail(&self, k: u64) -> Result<f64> {
        Ok(self.ln_upper_tail(k)?.exp())
    }

    /// `log P(Bin <= k)` by downward summation from `k`.
    pub fn ln_lower_tail(&self, k: u64) -> Result<f64> {
        if k >= self.trials {
            return Ok(0.0);
        }
        let mode = ((self.trials + 1) as f64 * self.p).floor() as u64;
        let mut ln_term = self.ln_pmf(k)?;
        let mut acc = ln_term;
        let mut j = k;
        while j > 0 {
            // pmf(j-1) = pmf(j) * j q / ((N-j+1) p)
            ln_term += (j as f64 * self.q()).ln() - ((self.trials - j + 1) as f64 * self.p).ln();
            j -= 1;
            acc = log_add_exp(acc, ln_term);
            if j < mode && ln_term < acc - 60.0 {
                break;
            }
        }
        Ok(acc.min(0.0))
    }
}

fn exact_pow(base: &Exact, k: u64) -> Exact {
    let mut acc = Exact::from_nat(1);
    for _ in 0..k {
        acc *= base.clone();
    }
    acc
}

/// Exact-rational pmf, for oracle use at small trial counts.
pub fn pmf_exact(trials: u64, k: u64, p: &Exact) -> Exact {
    let q = Exact::from_nat(1) - p.clone();
    Exact::from_integer(binomial_int(trials, k)) * exact_pow(p, k) * exact_pow(&q, trials - k)
}

/// Exact-rational upper tail `P(Bin >= k)`.
pub fn upper_tail_exact(trials: u64, k: u64, p: &Exact) -> Exact {
    let mut acc = Exact::from_nat(0);
    for j in k..=trials {
        acc += pmf_exact(trials, j, p);
    }
    acc
}

/// Depth control for the corrective tail series.
#[derive(Debug, Clone, Copy)]
pub enum SeriesDepth {
    Terms(u32),
    Converged,
}

/// Corrective series
/// `E(x,N) = Σ_{i>=1} (p^{i+1} + (-1)^i q^{i+1}) x^{i+2} / ((i+1)(i+2) (pq N)^{i/2})`,
/// truncated at `J` terms or summed adaptively until relative 1e-15.
///
/// Defined for `0 < x < sqrt(N)/2`; the adaptive mode additionally insists the
/// term magnitudes are nonincreasing (divergence guard) and caps at 64 terms.
pub fn bahadur_series(x: f64, trials: u64, p: f64, depth: SeriesDepth) -> Result<f64> {
    if x <= 0.0 {
        return Err(Error::invalid(format!("need x > 0, got {x}")));
    }
    if !(0.0 < p && p < 1.0) {
        return Err(Error::invalid(format!("need 0 < p < 1, got {p}")));
    }
    let guard = (trials as f64).sqrt() / 2.0;
    if x >= guard {
        return Err(Error::Domain(format!(
            "x={x} outside the convergence guard x < sqrt(N)/2 = {guard}"
        )));
    }
    let q = 1.0 - p;
    let base = x / (p * q * trials as f64).sqrt();
    let max_terms = match depth {
        SeriesDepth::Terms(j) => j,
        SeriesDepth::Converged => 64,
    };
    let mut sum = Kahan::new();
    let mut p_pow = p; // p^{i+1} at i-th term start
    let mut q_pow = q;
    let mut base_pow = 1.0; // base^i
    let mut last_nonzero_mag = f64::INFINITY;
    for i in 1..=max_terms as u64 {
        p_pow *= p;
        q_pow *= q;
        base_pow *= base;
        let sign = if i % 2 == 1 { -1.0 } else { 1.0 };
        let term = (p_pow + sign * q_pow) * x * x * base_pow / ((i + 1) as f64 * (i + 2) as f64);
        let mag = term.abs();
        if matches!(depth, SeriesDepth::Converged) {
            if mag > last_nonzero_mag {
                return Err(Error::Domain(format!(
                    "series terms grow at i={i}; x={x} too large for N={trials}"
                )));
            }
            sum.add(term);
            if mag > 0.0 {
                if mag < 1e-15 * sum.value().abs().max(f64::MIN_POSITIVE) {
                    break;
                }
                last_nonzero_mag = mag;
            }
        } else {
            sum.add(term);
            if mag > 0.0 {
                last_nonzero_mag = mag;
            }
        }
    }
    Ok(sum.value())
}

/// Point and tail asymptotics of the binomial at standardised deviation `x`:
/// `pmf ~ exp(-x²/2 - E(x,N)) / sqrt(2πNpq)`,
/// `tail ~ exp(-x²/2 - E(x,N)) / (x sqrt(2π))`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BahadurAsymptotics {
    pub x: f64,
    pub series: f64,
    pub ln_pmf: f64,
    pub ln_tail: f64,
    pub pmf: f64,
    pub tail: f64,
    /// Soft check of the intended regime `1 << x << sqrt(Npq)`.
    pub regime_ok: bool,
}

pub fn bahadur_tail(spec: &BinomialSpec, x: f64) -> Result<BahadurAsymptotics> {
    if x <= 0.0 {
        return Err(Error::invalid(format!("need x > 0, got {x}")));
    }
    let series = bahadur_series(x, spec.trials, spec.p, SeriesDepth::Converged)?;
    let exponent = -x * x / 2.0 - series;
    let ln_pmf = exponent - 0.5 * (2.0 * std::f64::consts::PI * spec.sigma() * spec.sigma()).ln();
    let ln_tail = exponent - (x * (2.0 * std::f64::consts::PI).sqrt()).ln();
    Ok(BahadurAsymptotics {
        x,
        series,
        ln_pmf,
        ln_tail,
        pmf: ln_pmf.exp(),
        tail: ln_tail.exp(),
        regime_ok: x >= 1.0 && x * x <= spec.trials as f64 * spec.p * spec.q(),
    })
}

/// Derived quantities of a relative-deviation event `D_H(G_p) > δ p^e (n)_v`.
#[derive(Debug, Clone, Serialize)]
pub struct DeltaRegime {
    pub n: u64,
    pub p: f64,
    pub delta: f64,
    pub edge_count: u64,
    /// Pair count `N = n(n-1)/2`.
    pub trials: u64,
    /// `m* = pN (1+δ)^{1/e}`, where the `G(n,m)` count needs no deviation.
    pub m_star: f64,
    /// `x* = [(1+δ)^{1/e} - 1] sqrt(pN/q) = x(m*)`.
    pub x_star: f64,
    pub sigma: f64,
    /// `⌊m* ∓ δ^{-1/2} n^{1/4}⌋`.
    pub m_minus: i64,
    pub m_plus: i64,
    /// Sanity: `L_H(⌊m*⌋) <= (1+δ) p^e (n)_v`.
    pub l_at_m_star_ok: bool,
}

impl DeltaRegime {
    pub fn x_of_m(&self, m: f64) -> f64 {
        (m - self.p * self.trials as f64) / self.sigma
    }
}

pub fn delta_regime(n: u64, p: f64, h: &Pattern, delta: f64) -> Result<DeltaRegime> {
    if delta <= 0.0 {
        return Err(Error::invalid(format!("need delta > 0, got {delta}")));
    }
    if h.edge_count() == 0 {
        return Err(Error::invalid("pattern needs at least one edge"));
    }
    if !(0.0 < p && p < 1.0) {
        return Err(Error::invalid(format!("need 0 < p < 1, got {p}")));
    }
    let e = h.edge_count() as f64;
    let trials = pair_count(n as usize) as u64;
    let q = 1.0 - p;
    let root = (1.0 + delta).powf(1.0 / e);
    let m_star = p * trials as f64 * root;
    let sigma = (trials as f64 * p * q).sqrt();
    let x_star = (root - 1.0) * (p * trials as f64 / q).sqrt();
    let window = delta.powf(-0.5) * (n as f64).powf(0.25);
    let ln_l = ln_falling(n, h.vertex_count() as u64)
        + ln_falling(m_star.floor() as u64, h.edge_count() as u64)
        - ln_falling(trials, h.edge_count() as u64);
    let ln_target = (1.0 + delta).ln() + e * p.ln() + ln_falling(n, h.vertex_count() as u64);
    Ok(DeltaRegime {
        n,
        p,
        delta,
        edge_count: h.edge_count() as u64,
        trials,
        m_star,
        x_star,
        sigma,
        m_minus: (m_star - window).floor() as i64,
        m_plus: (m_star + window).floor() as i64,
        l_at_m_star_ok: ln_l <= ln_target + 1e-12,
    })
}

/// Log-probability prediction in the small-deviation range
/// (`n^{-1} << δ << n^{-1/2}`), with components exposed.
#[derive(Debug, Clone, Serialize)]
pub struct RateSmallDelta {
    /// `-δ² p n² / (4 e² q)`.
    pub leading: f64,
    /// `((3e-2) - (3e-1)p) δ³ p n² / (12 e³ q²)`.
    pub cubic: f64,
    /// `-log(nδ)`.
    pub log_correction: f64,
    /// `log sqrt(e² q / (π p))`.
    pub prefactor_log: f64,
    /// Sum of the above.
    pub log_prob: f64,
    pub regime_ok: bool,
}

pub fn rate_small_delta(n: u64, p: f64, h: &Pattern, delta: f64) -> Result<RateSmallDelta> {
    if delta <= 0.0 {
        return Err(Error::invalid(format!("need delta > 0, got {delta}")));
    }
    if !(0.0 < p && p < 1.0) {
        return Err(Error::invalid(format!("need 0 < p < 1, got {p}")));
    }
    let e = h.edge_count() as f64;
    if e < 1.0 {
        return Err(Error::invalid("pattern needs at least one edge"));
    }
    let q = 1.0 - p;
    let nf = n as f64;
    let leading = -delta * delta * p * nf * nf / (4.0 * e * e * q);
    let cubic = ((3.0 * e - 2.0) - (3.0 * e - 1.0) * p) * delta.powi(3) * p * nf * nf
        / (12.0 * e.powi(3) * q * q);
    let log_correction = -(nf * delta).ln();
    let prefactor_log = 0.5 * (e * e * q / (std::f64::consts::PI * p)).ln();
    Ok(RateSmallDelta {
        leading,
        cubic,
        log_correction,
        prefactor_log,
        log_prob: leading + cubic + log_correction + prefactor_log,
        regime_ok: delta > 1.0 / nf && delta < nf.powf(-0.5),
    })
}

/// Log-probability prediction across `n^{-1} << δ << 1`, as the three
/// components `-x*²/2`, `-E(x*,N)` and the variational gain, plus the quartic
/// closed form valid for `n^{-1/2} log n << δ << n^{-2/5}`.
#[derive(Debug, Clone, Serialize)]
pub struct RateLargerDelta {
    /// `-x*²/2`.
    pub gaussian: f64,
    /// `-E(x*, N)`: the tail series enters the exponent negatively, matching
    /// the binomial asymptotics.
    pub series: f64,
    /// `+δ² n / (16 γ_H(p) e⁴ p^{2e-2} q²)`.
    pub variational: f64,
    /// Sum of the three components.
    pub log_prob: f64,
    /// Quartic expansion of the same exponent (without the `O(log n)` slack).
    pub quartic_log_prob: f64,
    /// Optimal edge-count shift `f* = x* n / (8 γ_H(p) σ e² p^{2e-2})`.
    pub optimal_shift: f64,
    /// Scale of the unmodeled additive exponent slack, reported, never folded
    /// into the prediction.
    pub unmodeled_log_n: f64,
    pub unmodeled_delta_sq_n: f64,
    pub regime: DeltaRegime,
}

pub fn rate_larger_delta(n: u64, p: f64, h: &Pattern, delta: f64) -> Result<RateLargerDelta> {
    let regime = delta_regime(n, p, h, delta)?;
    let gamma = gamma_rate(h, p)?.gamma;
    let e = h.edge_count() as f64;
    let q = 1.0 - p;
    let nf = n as f64;
    let series_val = bahadur_series(regime.x_star, regime.trials, p, SeriesDepth::Converged)?;
    let gaussian = -regime.x_star * regime.x_star / 2.0;
    let series = -series_val;
    let variational =
        delta * delta * nf / (16.0 * gamma * e.powi(4) * p.powf(2.0 * e - 2.0) * q * q);
    // quartic expansion of -x*^2/2 - E(x*,N,2) in δ
    let c2 = -p / (4.0 * q * e * e);
    let c3 = p * ((3.0 * e - 1.0) * q - 1.0) / (12.0 * q * q * e.powi(3));
    let c4 = -p * (11.0 * e * e * q * q - 6.0 * e * q * (1.0 + q) + q * q + 2.0)
        / (48.0 * q.powi(3) * e.powi(4));
    let quartic =
        (c2 * delta * delta + c3 * delta.powi(3) + c4 * delta.powi(4)) * nf * nf + variational;
    let optimal_shift =
        regime.x_star * nf / (8.0 * gamma * regime.sigma * e * e * p.powf(2.0 * e - 2.0));
    Ok(RateLargerDelta {
        gaussian,
        series,
        variational,
        log_prob: gaussian + series + variational,
        quartic_log_prob: quartic,
        optimal_shift,
        unmodeled_log_n: nf.ln(),
        unmodeled_delta_sq_n: delta * delta * nf,
        regime,
    })
}

/// Both sides of the edge-count conditioning identity for an explicit
/// threshold on `D_H(G_p)`, by exhaustive enumeration of all `2^N` labelled
/// graphs (cap `n <= 7`).
#[derive(Debug, Clone, Serialize)]
pub struct ConditioningReport {
    /// `P(D_H(G_p) > threshold)` accumulated graph by graph.
    pub lhs: f64,
    /// `Σ_m b_N(m) · (fraction of m-edge graphs exceeding the threshold)`.
    pub rhs: f64,
    pub residual: f64,
}

pub fn conditioning_identity_check(
    n: usize,
    p: f64,
    h: &Pattern,
    threshold: f64,
) -> Result<ConditioningReport> {
    if n > 7 {
        return Err(Error::ResourceLimit(format!(
            "exhaustive enumeration capped at n <= 7, got {n}"
        )));
    }
    if h.vertex_count() > n {
        return Err(Error::invalid("pattern larger than host"));
    }
    let bign = pair_count(n);
    let spec = BinomialSpec::new(bign as u64, p)?;
    // event N_H(G) > cut, where cut = threshold + p^e (n)_v
    let cut = threshold
        + p.powi(h.edge_count() as i32) * falling_u128(n as u64, h.vertex_count() as u64) as f64;
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| ((u + 1)..n).map(move |w| (u, w)))
        .collect();
    let lnp = p.ln();
    let lnq = (1.0 - p).ln();
    let mut lhs = Kahan::new();
    let mut exceed = vec![0u64; bign + 1];
    let mut totals = vec![0u64; bign + 1];
    for mask in 0u64..(1 << bign) {
        let m = mask.count_ones() as usize;
        totals[m] += 1;
        let edges: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        let g = DenseGraph::from_edges(n, &edges)?;
        let count = count_embeddings(&g, h)? as f64;
        if count > cut {
            exceed[m] += 1;
            lhs.add((m as f64 * lnp + (bign - m) as f64 * lnq).exp());
        }
    }
    let mut rhs = Kahan::new();
    for m in 0..=bign {
        if exceed[m] == 0 {
            continue;
        }
        let frac = exceed[m] as f64 / totals[m] as f64;
        rhs.add(spec.pmf(m as u64)? * frac);
    }
    let lhs = lhs.value();
    let rhs = rhs.value();
    Ok(ConditioningReport {
        lhs,
        rhs,
        residual: lhs - rhs,
    })
}
