//! Seeded parallel Monte Carlo estimation of deviation-tail probabilities in
//! `G(n,m)` and empirical distributions of the deviation statistics.
//!
//! Replica `r` draws from stream `base_stream + r` of the counter-based
//! generator, so results are reproducible and independent of the degree of
//! parallelism; merging reduces integer hit counts or replica-ordered
//! vectors only.

use crate::combin::pair_count;
use crate::error::{Error, Result};
use crate::gnp::BinomialSpec;
use crate::graph::{count_embeddings, GraphState, Pattern, ProcessConfig};
use crate::martingale::lambda_combination;
use rayon::prelude::*;
use serde::Serialize;

/// The moderate-deviation rate function
/// `γ_H(t) = (4 w(H)² t^{2e-2} (1-t)² + 12 tr(H)² t^{2e-3} (1-t)³)^{-1}`
/// with its sparse-limit simplifications.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RateFunction {
    pub gamma: f64,
    pub wedge_term: f64,
    pub triangle_term: f64,
    /// `(4 w² t^{2e-2} (1-t)²)^{-1}`, the sparse form when `tr(H) = 0`.
    pub sparse_wedge_only: Option<f64>,
    /// `(12 tr² t^{2e-3} (1-t)³)^{-1}`, dominant in the sparse case when
    /// `tr(H) >= 1`.
    pub sparse_triangle_dominant: Option<f64>,
}

pub fn gamma_rate(h: &Pattern, t: f64) -> Result<RateFunction> {
    if !(0.0 < t && t < 1.0) {
        return Err(Error::invalid(format!("need t in (0,1), got {t}")));
    }
    let w = h.wedge_count() as f64;
    let tr = h.triangle_count() as f64;
    if w == 0.0 && tr == 0.0 {
        return Err(Error::DegenerateRate(format!(
            "pattern {:?} has no wedge and no triangle",
            h.edges()
        )));
    }
    let e = h.edge_count() as i32;
    let wedge_term = 4.0 * w * w * t.powi(2 * e - 2) * (1.0 - t) * (1.0 - t);
    let triangle_term = 12.0 * tr * tr * t.powi(2 * e - 3) * (1.0 - t).powi(3);
    Ok(RateFunction {
        gamma: 1.0 / (wedge_term + triangle_term),
        wedge_term,
        triangle_term,
        sparse_wedge_only: (tr == 0.0).then(|| 1.0 / wedge_term),
        sparse_triangle_dominant: (tr > 0.0).then(|| 1.0 / triangle_term),
    })
}

/// Predicted log-probability `-γ_H(t) α²` for the event
/// `D_H(G_{n,t}) > α n^{v-3/2}`, with soft regime diagnostics.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RatePrediction {
    pub gamma: f64,
    pub alpha: f64,
    pub log_prob_pred: f64,
    /// `1 << α << sqrt(n)` at constant `t`.
    pub regime_constant_t_ok: bool,
    /// The vanishing-`t` window
    /// `max(t^{1/2} n^{-1/2} log n, t^{e-3/2}) << α << min(t^{2e-5/2}, t^{e+2}) sqrt(n)`.
    pub regime_vanishing_t_ok: bool,
}

pub fn rate_prediction(h: &Pattern, t: f64, n: usize, alpha: f64) -> Result<RatePrediction> {
    let gamma = gamma_rate(h, t)?.gamma;
    let e = h.edge_count() as f64;
    let nf = n as f64;
    let lower_ii = (t.sqrt() * nf.ln() / nf.sqrt()).max(t.powf(e - 1.5));
    let upper_ii = (t.powf(2.0 * e - 2.5) * nf.sqrt()).min(t.powf(e + 2.0) * nf.sqrt());
    Ok(RatePrediction {
        gamma,
        alpha,
        log_prob_pred: -gamma * alpha * alpha,
        regime_constant_t_ok: alpha > 1.0 && alpha < nf.sqrt(),
        regime_vanishing_t_ok: alpha > lower_ii && alpha < upper_ii,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TailDirection {
    Upper,
    Lower,
}

/// How `D_H(G_m)` was evaluated per replica.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DeviationMode {
    /// Exact embedding count at `m`.
    Exact,
    /// The wedge/triangle linear predictor `Λ_H`, used for general patterns
    /// at large `n`.
    LambdaProxy,
}

#[derive(Debug, Clone, Serialize)]
pub struct TailEstimate {
    pub n: usize,
    pub t: f64,
    pub m: usize,
    pub pattern: String,
    pub alpha: f64,
    pub direction: TailDirection,
    pub threshold: f64,
    pub samples: u64,
    pub hits: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub ci_method: &'static str,
    pub seed: u64,
    pub base_stream: u64,
    pub streams: u64,
    pub rng_family: &'static str,
    pub deviation_mode: DeviationMode,
}

#[derive(Debug, Clone)]
pub struct TailConfig {
    pub n: usize,
    pub t: f64,
    pub alpha: f64,
    pub direction: TailDirection,
    pub samples: u64,
    pub seed: u64,
    /// Stream index of replica 0; replica `r` uses `base_stream + r`.
    pub base_stream: u64,
    /// Worker threads; 0 means the global default.
    pub threads: usize,
    /// Largest `n` at which general patterns are counted exactly per sample.
    pub exact_count_cap: usize,
}

impl TailConfig {
    pub fn new(n: usize, t: f64, alpha: f64, samples: u64, seed: u64) -> Self {
        TailConfig {
            n,
            t,
            alpha,
            direction: TailDirection::Upper,
            samples,
            seed,
            base_stream: 0,
            threads: 0,
            exact_count_cap: 64,
        }
    }
}

fn in_pool<T: Send>(threads: usize, job: impl FnOnce() -> T + Send) -> T {
    if threads == 0 {
        job()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool")
            .install(job)
    }
}

fn deviation_mode(h: &Pattern, n: usize, cap: usize) -> DeviationMode {
    let sig = (
        h.core_size(),
        h.edge_count(),
        h.wedge_count(),
        h.triangle_count(),
    );
    let fast = matches!(
        sig,
        (2, 1, _, _) | (3, 2, 1, 0) | (3, 3, 3, 1) | (4, 3, 2, 0)
    );
    if fast || n <= cap {
        DeviationMode::Exact
    } else {
        DeviationMode::LambdaProxy
    }
}

/// One replica's deviation statistics at `G_m`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct JointSample {
    pub d_wedge: f64,
    pub d_triangle: f64,
    pub lambda: f64,
    pub d_h: f64,
}

fn run_replica(
    state: &mut GraphState,
    h: &Pattern,
    seed: u64,
    stream: u64,
    m: usize,
    t_eff: f64,
    mode: DeviationMode,
) -> Result<JointSample> {
    state.reset(seed, stream);
    state.run_to(m)?;
    let d_wedge = state.wedge_deviation();
    let d_triangle = state.triangle_deviation();
    let lambda = lambda_combination(h, t_eff, state.n(), d_wedge, d_triangle)?;
    let d_h = match mode {
        DeviationMode::LambdaProxy => lambda,
        DeviationMode::Exact => {
            let count = count_embeddings(state, h)?;
            count as f64 - crate::graph::expected_count_f64(h, state.n() as u64, m as u64)
        }
    };
    Ok(JointSample {
        d_wedge,
        d_triangle,
        lambda,
        d_h,
    })
}

/// Estimate `P(D_H(G_m) > α n^{v-3/2})` (or the lower tail) over seeded
/// replicas with a Clopper–Pearson interval.
pub fn estimate_tail(h: &Pattern, cfg: &TailConfig) -> Result<TailEstimate> {
    if !(0.0 < cfg.t && cfg.t < 1.0) {
        return Err(Error::invalid(format!("need t in (0,1), got {}", cfg.t)));
    }
    if cfg.samples == 0 {
        return Err(Error::invalid("need at least one sample"));
    }
    let bign = pair_count(cfg.n);
    let m = (cfg.t * bign as f64).floor() as usize;
    if m < 1 {
        return Err(Error::invalid(format!("tN = {m} < 1 step")));
    }
    let v = h.vertex_count() as f64;
    let threshold = cfg.alpha * (cfg.n as f64).powf(v - 1.5);
    let mode = deviation_mode(h, cfg.n, cfg.exact_count_cap);
    let t_eff = m as f64 / bign as f64;
    let direction = cfg.direction;
    let hits: u64 = in_pool(cfg.threads, || {
        (0..cfg.samples)
            .into_par_iter()
            .map_init(
                || GraphState::with_config(cfg.n, cfg.seed, ProcessConfig::default()).unwrap(),
                |state, r| {
                    let s = run_replica(state, h, cfg.seed, cfg.base_stream + r, m, t_eff, mode)
                        .expect("replica");
                    let hit = match direction {
                        TailDirection::Upper => s.d_h > threshold,
                        TailDirection::Lower => s.d_h < -threshold,
                    };
                    hit as u64
                },
            )
            .sum()
    });
    let (ci_low, ci_high) = clopper_pearson(hits, cfg.samples, 0.05)?;
    Ok(TailEstimate {
        n: cfg.n,
        t: cfg.t,
        m,
        pattern: format!("{:?}", h.edges()),
        alpha: cfg.alpha,
        direction,
        threshold,
        samples: cfg.samples,
        hits,
        p_hat: hits as f64 / cfg.samples as f64,
        ci_low,
        ci_high,
        ci_method: "clopper-pearson",
        seed: cfg.seed,
        base_stream: cfg.base_stream,
        streams: cfg.samples,
        rng_family: crate::rng::RNG_FAMILY,
        deviation_mode: mode,
    })
}

/// Summary of the scaled deviation distribution plus joint replica samples.
#[derive(Debug, Clone, Serialize)]
pub struct DistributionSummary {
    pub n: usize,
    pub t: f64,
    pub m: usize,
    pub pattern: String,
    pub samples: u64,
    pub seed: u64,
    pub rng_family: &'static str,
    pub deviation_mode: DeviationMode,
    /// Statistics of `D_H(G_m) / n^{v-3/2}`.
    pub mean: f64,
    pub variance: f64,
    pub std_error: f64,
    /// `mean / std_error`; the exact mean is zero.
    pub z_score: f64,
    pub quantiles: Vec<(f64, f64)>,
    pub corr_dh_lambda: f64,
    pub joint: Vec<JointSample>,
}

pub fn empirical_distribution(h: &Pattern, cfg: &TailConfig) -> Result<DistributionSummary> {
    if !(0.0 < cfg.t && cfg.t < 1.0) {
        return Err(Error::invalid(format!("need t in (0,1), got {}", cfg.t)));
    }
    if cfg.samples == 0 {
        return Err(Error::invalid("need at least one sample"));
    }
    let bign = pair_count(cfg.n);
    let m = (cfg.t * bign as f64).floor() as usize;
    let mode = deviation_mode(h, cfg.n, cfg.exact_count_cap);
    let t_eff = m as f64 / bign as f64;
    let joint: Vec<JointSample> = in_pool(cfg.threads, || {
        (0..cfg.samples)
            .into_par_iter()
            .map_init(
                || GraphState::with_config(cfg.n, cfg.seed, ProcessConfig::default()).unwrap(),
                |state, r| {
                    run_replica(state, h, cfg.seed, cfg.base_stream + r, m, t_eff, mode)
                        .expect("replica")
                },
            )
            .collect()
    });
    let scale = (cfg.n as f64).powf(h.vertex_count() as f64 - 1.5);
    let mut scaled: Vec<f64> = joint.iter().map(|s| s.d_h / scale).collect();
    let k = scaled.len() as f64;
    let mean = scaled.iter().sum::<f64>() / k;
    let variance = scaled.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (k - 1.0).max(1.0);
    let std_error = (variance / k).sqrt();
    scaled.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let quantile = |q: f64| scaled[((q * (k - 1.0)).round() as usize).min(scaled.len() - 1)];
    let quantiles = [0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99]
        .iter()
        .map(|&q| (q, quantile(q)))
        .collect();
    let mean_l = joint.iter().map(|s| s.lambda).sum::<f64>() / k;
    let mean_d = joint.iter().map(|s| s.d_h).sum::<f64>() / k;
    let mut cov = 0.0;
    let mut var_l = 0.0;
    let mut var_d = 0.0;
    for s in &joint {
        cov += (s.lambda - mean_l) * (s.d_h - mean_d);
        var_l += (s.lambda - mean_l) * (s.lambda - mean_l);
        var_d += (s.d_h - mean_d) * (s.d_h - mean_d);
    }
    let corr = if var_l > 0.0 && var_d > 0.0 {
        cov / (var_l * var_d).sqrt()
    } else {
        f64::NAN
    };
    Ok(DistributionSummary {
        n: cfg.n,
        t: cfg.t,
        m,
        pattern: format!("{:?}", h.edges()),
        samples: cfg.samples,
        seed: cfg.seed,
        rng_family: crate::rng::RNG_FAMILY,
        deviation_mode: mode,
        mean,
        variance,
        std_error,
        z_score: if std_error > 0.0 {
            mean / std_error
        } else {
            0.0
        },
        quantiles,
        corr_dh_lambda: corr,
        joint,
    })
}

/// Exact Clopper–Pearson interval for `hits` successes in `samples` trials at
/// confidence `1 - alpha`, by bisection on the binomial tails in log space.
pub fn clopper_pearson(hits: u64, samples: u64, alpha: f64) -> Result<(f64, f64)> {
    if samples == 0 || hits > samples {
        return Err(Error::invalid(format!("bad counts {hits}/{samples}")));
    }
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::invalid(format!("need alpha in (0,1), got {alpha}")));
    }
    let half = (alpha / 2.0).ln();
    let lo = if hits == 0 {
        0.0
    } else {
        // largest p with P(Bin(samples, p) >= hits) = alpha/2: increasing in p
        bisect(|p| {
            let spec = BinomialSpec::new(samples, p).unwrap();
            spec.ln_upper_tail(hits).unwrap() - half
        })
    };
    let hi = if hits == samples {
        1.0
    } else {
        // P(Bin(samples, p) <= hits) = alpha/2: decreasing in p
        bisect(|p| {
            let spec = BinomialSpec::new(samples, p).unwrap();
            half - spec.ln_lower_tail(hits).unwrap()
        })
    };
    Ok((lo, hi))
}

/// Root of an increasing function of `p` on (0,1).
fn bisect(f: impl Fn(f64) -> f64) -> f64 {
    let mut lo = 1e-300;
    let mut hi = 1.0 - 1e-16;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_examples() {
        let g = gamma_rate(&Pattern::wedge(), 0.5).unwrap();
        assert!((g.gamma - 4.0).abs() < 1e-12);
        assert!(g.sparse_wedge_only.is_some());

        let g = gamma_rate(&Pattern::triangle(), 0.5).unwrap();
        assert!((g.gamma - 4.0 / 3.0).abs() < 1e-12);
        assert!(g.sparse_triangle_dominant.is_some());

        // gamma blows up as t -> 1
        let near = gamma_rate(&Pattern::triangle(), 0.999).unwrap().gamma;
        let nearer = gamma_rate(&Pattern::triangle(), 0.9999).unwrap().gamma;
        assert!(near > 1e4 && nearer > near);

        // a perfect matching has neither wedges nor triangles
        let matching = Pattern::new(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(matches!(
            gamma_rate(&matching, 0.5),
            Err(Error::DegenerateRate(_))
        ));
        assert!(gamma_rate(&Pattern::wedge(), 1.0).is_err());
    }

    #[test]
    fn certain_event_and_impossible_event() {
        // threshold far below any possible value: every sample hits
        let cfg = TailConfig {
            alpha: -1e9,
            ..TailConfig::new(12, 0.4, 0.0, 64, 5)
        };
        let est = estimate_tail(&Pattern::wedge(), &cfg).unwrap();
        assert_eq!(est.hits, 64);
        assert_eq!(est.p_hat, 1.0);
        assert!(est.ci_high == 1.0 && est.ci_low < 1.0);

        // the edge count never deviates
        let cfg = TailConfig::new(12, 0.4, 0.5, 64, 5);
        let est = estimate_tail(&Pattern::edge(), &cfg).unwrap();
        assert_eq!(est.hits, 0);
        assert_eq!(est.p_hat, 0.0);
        assert_eq!(est.ci_low, 0.0);
        assert!(est.ci_high > 0.0);
    }

    #[test]
    fn reproducible_across_thread_counts() {
        let mk = |threads| TailConfig {
            threads,
            ..TailConfig::new(20, 0.5, 0.4, 200, 99)
        };
        let a = estimate_tail(&Pattern::triangle(), &mk(1)).unwrap();
        let b = estimate_tail(&Pattern::triangle(), &mk(4)).unwrap();
        assert_eq!(a.hits, b.hits);
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn clopper_pearson_edge_cases() {
        let s = 50u64;
        let (lo, hi) = clopper_pearson(0, s, 0.05).unwrap();
        assert_eq!(lo, 0.0);
        let expect_hi = 1.0 - 0.025f64.powf(1.0 / s as f64);
        assert!((hi - expect_hi).abs() < 1e-9, "{hi} vs {expect_hi}");
        let (lo, hi) = clopper_pearson(s, s, 0.05).unwrap();
        assert_eq!(hi, 1.0);
        let expect_lo = 0.025f64.powf(1.0 / s as f64);
        assert!((lo - expect_lo).abs() < 1e-9);
    }

    #[test]
    fn clopper_pearson_is_self_consistent() {
        // plugging the bounds back into the binomial tails recovers alpha/2
        let (hits, samples) = (7u64, 100u64);
        let (lo, hi) = clopper_pearson(hits, samples, 0.05).unwrap();
        let p_hat = hits as f64 / samples as f64;
        assert!(lo < p_hat && p_hat < hi);
        let tail_lo = BinomialSpec::new(samples, lo)
            .unwrap()
            .upper_tail(hits)
            .unwrap();
        assert!((tail_lo - 0.025).abs() < 1e-9, "{tail_lo}");
        let tail_hi = BinomialSpec::new(samples, hi)
            .unwrap()
            .ln_lower_tail(hits)
            .unwrap()
            .exp();
        assert!((tail_hi - 0.025).abs() < 1e-9, "{tail_hi}");
    }

    #[test]
    fn empirical_distribution_is_centered() {
        let cfg = TailConfig::new(24, 0.5, 0.0, 400, 3);
        let d = empirical_distribution(&Pattern::triangle(), &cfg).unwrap();
        assert!(d.z_score.abs() <= 4.0, "z = {}", d.z_score);
        assert_eq!(d.joint.len(), 400);
        assert!(d.variance > 0.0);
        // quantiles are sorted
        for w in d.quantiles.windows(2) {
            assert!(w[0].1 <= w[1].1);
        }
    }

    #[test]
    fn lambda_proxy_used_for_large_general_patterns() {
        let k4 = Pattern::builtin("k4").unwrap();
        assert_eq!(deviation_mode(&k4, 100, 64), DeviationMode::LambdaProxy);
        assert_eq!(deviation_mode(&k4, 30, 64), DeviationMode::Exact);
        assert_eq!(
            deviation_mode(&Pattern::wedge(), 5000, 64),
            DeviationMode::Exact
        );
    }
}
