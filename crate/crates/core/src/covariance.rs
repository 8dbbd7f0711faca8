//! Exact conditional second moments of increments and their deterministic
//! surrogates.
//!
//! Given the state `G_{i-1}`, the next edge is uniform over the `N-i+1`
//! candidate pairs, so conditional moments of increments are plain averages
//! over candidates. Everything here evaluates those averages exactly
//! (no sampling) and compares them with the closed-form surrogates `V`, `W`.

use crate::combin::pair_count;
use crate::error::{Error, Result};
use crate::graph::{embeddings_through_pair, GraphState, Host, Pattern};
use crate::numeric::Kahan;
use crate::scalar::Scalar;
use crate::Exact;

/// Enumeration cap for exact conditional moments.
#[derive(Debug, Clone, Copy)]
pub struct CovConfig {
    pub max_candidates: usize,
}

impl Default for CovConfig {
    fn default() -> Self {
        CovConfig {
            max_candidates: 1 << 21,
        }
    }
}

/// Increment of `pat` for candidate pair `(u,w)`, with closed forms for the
/// edge, wedge and triangle cores.
fn candidate_increment(state: &GraphState, pat: &Pattern, u: usize, w: usize) -> Result<u128> {
    let iso = crate::combin::falling_u128(
        (state.n() - pat.core_size()) as u64,
        pat.isolated_count() as u64,
    );
    if iso == 0 || pat.edge_count() == 0 {
        return Ok(0);
    }
    let core = match (
        pat.core_size(),
        pat.edge_count(),
        pat.wedge_count(),
        pat.triangle_count(),
    ) {
        (2, 1, _, _) => 2,
        (3, 2, 1, 0) => 2 * (state.degree(u) as u128 + state.degree(w) as u128),
        (3, 3, 3, 1) => 6 * state.codegree(u, w) as u128,
        _ => return embeddings_through_pair(state, pat, u, w),
    };
    Ok(core * iso)
}

fn candidate_values(state: &GraphState, pat: &Pattern, cfg: CovConfig) -> Result<Vec<u128>> {
    let n = state.n();
    let remaining = state.pair_total() - state.inserted();
    if remaining == 0 {
        return Err(Error::ProcessExhausted(state.pair_total()));
    }
    if remaining > cfg.max_candidates {
        return Err(Error::ResourceLimit(format!(
            "{remaining} candidate pairs exceed enumeration cap {}",
            cfg.max_candidates
        )));
    }
    let mut values = Vec::with_capacity(remaining);
    for u in 0..n {
        for w in (u + 1)..n {
            if !state.has_edge(u, w) {
                values.push(candidate_increment(state, pat, u, w)?);
            }
        }
    }
    debug_assert_eq!(values.len(), remaining);
    Ok(values)
}

/// Exact conditional covariance `E[X_F X_F' | G_{i-1}]` over the uniform
/// candidate edge, as `f64`.
pub fn cond_cov_exact(
    f: &Pattern,
    fp: &Pattern,
    state: &GraphState,
    cfg: CovConfig,
) -> Result<f64> {
    let a = candidate_values(state, f, cfg)?;
    let b = if f == fp {
        None
    } else {
        Some(candidate_values(state, fp, cfg)?)
    };
    let b_ref: &[u128] = b.as_deref().unwrap_or(&a);
    let k = a.len() as f64;
    let mut sum_a = Kahan::new();
    let mut sum_b = Kahan::new();
    let mut sum_ab = Kahan::new();
    for (&x, &y) in a.iter().zip(b_ref) {
        sum_a.add(x as f64);
        sum_b.add(y as f64);
        sum_ab.add(x as f64 * y as f64);
    }
    Ok(sum_ab.value() / k - (sum_a.value() / k) * (sum_b.value() / k))
}

/// Exact-rational conditional covariance.
pub fn cond_cov_exact_rational(
    f: &Pattern,
    fp: &Pattern,
    state: &GraphState,
    cfg: CovConfig,
) -> Result<Exact> {
    let a = candidate_values(state, f, cfg)?;
    let b = if f == fp {
        None
    } else {
        Some(candidate_values(state, fp, cfg)?)
    };
    let b_ref: &[u128] = b.as_deref().unwrap_or(&a);
    let k = Exact::from_nat(a.len() as u64);
    let mut sum_a = crate::Int::from(0);
    let mut sum_b = crate::Int::from(0);
    let mut sum_ab = crate::Int::from(0);
    for (&x, &y) in a.iter().zip(b_ref) {
        sum_a += crate::Int::from(x);
        sum_b += crate::Int::from(y);
        sum_ab += crate::Int::from(x) * crate::Int::from(y);
    }
    let mean_a = Exact::from_integer(sum_a) / k.clone();
    let mean_b = Exact::from_integer(sum_b) / k.clone();
    Ok(Exact::from_integer(sum_ab) / k - mean_a * mean_b)
}

/// Deterministic covariance surrogate
/// `V_{F,F'}(i,n) = n^{v+v'-5} s^{e+e'-4} (1-s) (s θ1 + (1-s) θ2)`,
/// `θ1 = 8 w(F) w(F')`, `θ2 = 36 tr(F) tr(F')`, `s = i/N`.
pub fn v_surrogate(f: &Pattern, fp: &Pattern, i: usize, n: usize) -> f64 {
    let theta1 = 8.0 * f.wedge_count() as f64 * fp.wedge_count() as f64;
    let theta2 = 36.0 * f.triangle_count() as f64 * fp.triangle_count() as f64;
    if theta1 == 0.0 && theta2 == 0.0 {
        return 0.0;
    }
    let s = i as f64 / pair_count(n) as f64;
    let v = (f.vertex_count() + fp.vertex_count()) as i32;
    let e = (f.edge_count() + fp.edge_count()) as i32;
    (n as f64).powi(v - 5) * s.powi(e - 4) * (1.0 - s) * (s * theta1 + (1.0 - s) * theta2)
}

/// State-dependent correction
/// `W_{F,F'} = 8 n^{v+v'-7} s^{e+e'-4} w(F) w(F') D_wedge(G_{i-1})`.
pub fn w_correction(f: &Pattern, fp: &Pattern, i: usize, n: usize, d_wedge: f64) -> f64 {
    let ww = f.wedge_count() as f64 * fp.wedge_count() as f64;
    if ww == 0.0 {
        return 0.0;
    }
    let s = i as f64 / pair_count(n) as f64;
    let v = (f.vertex_count() + fp.vertex_count()) as i32;
    let e = (f.edge_count() + fp.edge_count()) as i32;
    8.0 * (n as f64).powi(v - 7) * s.powi(e - 4) * ww * d_wedge
}

/// Linearised increment
/// `A*_F = 2e s^{e-1} n^{v-2} + s^{e-2} n^{v-3} (2w - 6tr)(D_u + D_w)
///        + 6 s^{e-3} n^{v-3} tr D_{uw}`.
///
/// The degree/codegree deviations are supplied by the caller; this crate
/// evaluates them in the pre-insertion state `G_{i-1}` wherever it uses this
/// form (the increment formulas read degrees before the edge lands).
pub fn a_star_form(f: &Pattern, i: usize, n: usize, d_u: f64, d_w: f64, d_uw: f64) -> Result<f64> {
    if i == 0 {
        return Err(Error::invalid("a_star_form undefined at i = 0"));
    }
    let s = i as f64 / pair_count(n) as f64;
    let v = f.vertex_count() as i32;
    let e = f.edge_count() as i32;
    let w = f.wedge_count() as f64;
    let tr = f.triangle_count() as f64;
    let mut acc = 2.0 * e as f64 * s.powi(e - 1) * (n as f64).powi(v - 2);
    if w != 0.0 || tr != 0.0 {
        acc += s.powi(e - 2) * (n as f64).powi(v - 3) * (2.0 * w - 6.0 * tr) * (d_u + d_w);
    }
    if tr != 0.0 {
        acc += 6.0 * s.powi(e - 3) * (n as f64).powi(v - 3) * tr * d_uw;
    }
    Ok(acc)
}

/// Discrete quadratic-variation functional
/// `τ = n^{-2} Σ_{i<=tN} (8 s(1-s) κ(i)^2 + 36 s^2 (1-s)^2 ρ(i)^2)`.
pub fn tau_quadratic_variation(
    kappa: impl Fn(usize) -> f64,
    rho: impl Fn(usize) -> f64,
    n: usize,
    t: f64,
) -> Result<f64> {
    if !(0.0 < t && t <= 1.0) {
        return Err(Error::invalid(format!("need t in (0,1], got {t}")));
    }
    let bign = pair_count(n) as f64;
    let m = (t * bign).floor() as usize;
    let mut acc = Kahan::new();
    for i in 1..=m {
        let s = i as f64 / bign;
        let k = kappa(i);
        let r = rho(i);
        acc.add(8.0 * s * (1.0 - s) * k * k + 36.0 * s * s * (1.0 - s) * (1.0 - s) * r * r);
    }
    Ok(acc.value() / (n as f64 * n as f64))
}

/// The normalised coefficient functions of the wedge/triangle accumulant:
/// `κ(i) = w(H) (1-t)^2/(1-s)^2`, `ρ(i) = t^{-1} tr(H) (1-t)^3/(1-s)^3`.
pub fn lambda_star_coefficients(
    h: &Pattern,
    t: f64,
    n: usize,
) -> (impl Fn(usize) -> f64, impl Fn(usize) -> f64) {
    let bign = pair_count(n) as f64;
    let w = h.wedge_count() as f64;
    let tr = h.triangle_count() as f64;
    let kappa = move |i: usize| {
        let s = i as f64 / bign;
        let r = (1.0 - t) / (1.0 - s);
        w * r * r
    };
    let rho = move |i: usize| {
        let s = i as f64 / bign;
        let r = (1.0 - t) / (1.0 - s);
        tr * r * r * r / t
    };
    (kappa, rho)
}

/// Shared base sums `S1(m) = Σ s/(1-s)^3`, `S2(m) = Σ s^2/(1-s)^4` at the
/// prefix lengths `m = ⌊tN⌋` for each requested `t`; one pass over the steps.
#[derive(Debug, Clone, Copy)]
pub struct TauBase {
    pub s1: f64,
    pub s2: f64,
}

pub fn tau_base_sums(n: usize, ts: &[f64]) -> Result<Vec<TauBase>> {
    for &t in ts {
        if !(0.0 < t && t <= 1.0) {
            return Err(Error::invalid(format!("need t in (0,1], got {t}")));
        }
    }
    let bign = pair_count(n) as f64;
    let mut cuts: Vec<(usize, usize)> = ts
        .iter()
        .enumerate()
        .map(|(k, &t)| ((t * bign).floor() as usize, k))
        .collect();
    cuts.sort_unstable();
    let mut out = vec![TauBase { s1: 0.0, s2: 0.0 }; ts.len()];
    let mut s1 = Kahan::new();
    let mut s2 = Kahan::new();
    let mut next = 0usize;
    let max_m = cuts.last().map_or(0, |c| c.0);
    let inv_n = 1.0 / bign;
    for i in 1..=max_m {
        let s = i as f64 * inv_n;
        let g = 1.0 / (1.0 - s);
        let sg = s * g;
        s1.add(sg * g * g);
        s2.add(sg * sg * g * g);
        while next < cuts.len() && cuts[next].0 == i {
            out[cuts[next].1] = TauBase {
                s1: s1.value(),
                s2: s2.value(),
            };
            next += 1;
        }
    }
    // prefixes of length zero
    while next < cuts.len() {
        debug_assert_eq!(cuts[next].0, 0);
        next += 1;
    }
    Ok(out)
}

/// `τ` for the coefficient functions of [`lambda_star_coefficients`], via the
/// factored base sums. Algebraically identical to feeding those coefficient
/// functions to [`tau_quadratic_variation`].
pub fn tau_for_pattern_from(base: TauBase, h: &Pattern, t: f64, n: usize) -> f64 {
    let w = h.wedge_count() as f64;
    let tr = h.triangle_count() as f64;
    let one_t = 1.0 - t;
    let wedge = 8.0 * w * w * one_t.powi(4) * base.s1;
    let tri = 36.0 * tr * tr * one_t.powi(6) / (t * t) * base.s2;
    (wedge + tri) / (n as f64 * n as f64)
}

pub fn tau_for_pattern(h: &Pattern, t: f64, n: usize) -> Result<f64> {
    let base = tau_base_sums(n, &[t])?;
    Ok(tau_for_pattern_from(base[0], h, t, n))
}

/// Exact conditional second moment of the wedge/triangle accumulant
/// increment `𝕏_H(G_i; t)` at the upcoming step, by candidate-edge
/// enumeration. This is the per-step term of the quadratic variation `V(m)`
/// that the concentration envelopes consume.
pub fn accumulant_increment_second_moment(
    h: &Pattern,
    t: f64,
    state: &GraphState,
    cfg: CovConfig,
) -> Result<f64> {
    if !(0.0 < t && t < 1.0) {
        return Err(Error::invalid(format!("need t in (0,1), got {t}")));
    }
    let n = state.n();
    let i = state.inserted() + 1;
    let bign = pair_count(n) as f64;
    let s = i as f64 / bign;
    let r = (1.0 - t) / (1.0 - s);
    let v = h.vertex_count() as i32;
    let e = h.edge_count() as i32;
    let nv = (n as f64).powi(v - 3);
    let kappa = nv * t.powi(e - 2) * h.wedge_count() as f64 * r * r;
    let rho = nv * t.powi(e - 3) * h.triangle_count() as f64 * r * r * r;
    let remaining = state.pair_total() - state.inserted();
    if remaining == 0 {
        return Err(Error::ProcessExhausted(state.pair_total()));
    }
    if remaining > cfg.max_candidates {
        return Err(Error::ResourceLimit(format!(
            "{remaining} candidate pairs exceed enumeration cap {}",
            cfg.max_candidates
        )));
    }
    let mut a_w = Vec::with_capacity(remaining);
    let mut a_t = Vec::with_capacity(remaining);
    for u in 0..n {
        for x in (u + 1)..n {
            if state.has_edge(u, x) {
                continue;
            }
            a_w.push(2.0 * (state.degree(u) + state.degree(x)) as f64);
            a_t.push(6.0 * state.codegree(u, x) as f64);
        }
    }
    let k = a_w.len() as f64;
    let mw = a_w.iter().sum::<f64>() / k;
    let mt = a_t.iter().sum::<f64>() / k;
    let mut acc = Kahan::new();
    for j in 0..a_w.len() {
        let xw = a_w[j] - mw;
        let xt = a_t[j] - mt;
        let inc = kappa * xw + rho * (xt - 3.0 * s * xw);
        acc.add(inc * inc);
    }
    Ok(acc.value() / k)
}

/// Exact `E[Y_F^2 | G_{i-1}]` by candidate-edge enumeration, where
/// `Y_F = X_F - X*_F` and `i` is the upcoming step index.
pub fn y_second_moment_exact(f: &Pattern, state: &GraphState, cfg: CovConfig) -> Result<f64> {
    let n = state.n();
    let i = state.inserted() + 1;
    let bign = pair_count(n) as f64;
    let s = i as f64 / bign;
    let v = f.vertex_count() as i32;
    let e = f.edge_count() as i32;
    let w = f.wedge_count() as f64;
    let tr = f.triangle_count() as f64;
    let nv = (n as f64).powi(v - 3);
    let coef_wedge = if w != 0.0 || tr != 0.0 {
        nv * s.powi(e - 2) * (w - 3.0 * tr)
    } else {
        0.0
    };
    let coef_tri = if tr != 0.0 {
        nv * s.powi(e - 3) * tr
    } else {
        0.0
    };

    let remaining = state.pair_total() - state.inserted();
    if remaining > cfg.max_candidates {
        return Err(Error::ResourceLimit(format!(
            "{remaining} candidate pairs exceed enumeration cap {}",
            cfg.max_candidates
        )));
    }
    let mut a_f = Vec::with_capacity(remaining);
    let mut a_w = Vec::with_capacity(remaining);
    let mut a_t = Vec::with_capacity(remaining);
    for u in 0..n {
        for x in (u + 1)..n {
            if state.has_edge(u, x) {
                continue;
            }
            a_f.push(candidate_increment(state, f, u, x)? as f64);
            a_w.push(2.0 * (state.degree(u) + state.degree(x)) as f64);
            a_t.push(6.0 * state.codegree(u, x) as f64);
        }
    }
    let k = a_f.len() as f64;
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / k;
    let (mf, mw, mt) = (mean(&a_f), mean(&a_w), mean(&a_t));
    let mut acc = Kahan::new();
    for j in 0..a_f.len() {
        let y = (a_f[j] - mf) - coef_wedge * (a_w[j] - mw) - coef_tri * (a_t[j] - mt);
        acc.add(y * y);
    }
    Ok(acc.value() / k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::count_embeddings_brute;
    use num_traits::Zero;

    fn state_at(n: usize, seed: u64, m: usize) -> GraphState {
        let mut st = GraphState::new(n, seed).unwrap();
        st.run_to(m).unwrap();
        st
    }

    #[test]
    fn empty_graph_wedge_variance_is_zero() {
        let st = GraphState::new(6, 1).unwrap();
        let c = cond_cov_exact(
            &Pattern::wedge(),
            &Pattern::wedge(),
            &st,
            CovConfig::default(),
        )
        .unwrap();
        assert_eq!(c, 0.0);
    }

    #[test]
    fn single_candidate_state_has_zero_variance() {
        let st = state_at(4, 9, 5);
        for p in [Pattern::wedge(), Pattern::triangle()] {
            let c = cond_cov_exact(&p, &p, &st, CovConfig::default()).unwrap();
            assert_eq!(c, 0.0);
            let r = cond_cov_exact_rational(&p, &p, &st, CovConfig::default()).unwrap();
            assert!(r.is_zero());
        }
    }

    #[test]
    fn fast_candidate_increments_match_brute_force_route() {
        // two independent evaluation paths for the same conditional moment
        let st = state_at(7, 5, 10);
        let w = Pattern::wedge();
        let t = Pattern::triangle();
        let via_formulas = cond_cov_exact_rational(&w, &t, &st, CovConfig::default()).unwrap();

        // brute-force route: recount embeddings before/after each candidate
        let mut aw = Vec::new();
        let mut at = Vec::new();
        for u in 0..7 {
            for x in (u + 1)..7 {
                if st.has_edge(u, x) {
                    continue;
                }
                let before_w = count_embeddings_brute(&st, &w).unwrap();
                let before_t = count_embeddings_brute(&st, &t).unwrap();
                let mut host = crate::graph::DenseGraph::empty(7);
                st.for_each_edge(|a, b| host.add_edge(a, b).unwrap());
                host.add_edge(u, x).unwrap();
                aw.push(count_embeddings_brute(&host, &w).unwrap() - before_w);
                at.push(count_embeddings_brute(&host, &t).unwrap() - before_t);
            }
        }
        let k = Exact::from_nat(aw.len() as u64);
        let sum = |xs: &[u128]| {
            xs.iter()
                .map(|&x| Exact::from_count(x))
                .fold(Exact::zero(), |a, b| a + b)
        };
        let cross: Exact = aw
            .iter()
            .zip(&at)
            .map(|(&x, &y)| Exact::from_count(x * y))
            .fold(Exact::zero(), |a, b| a + b);
        let direct = cross / k.clone() - (sum(&aw) / k.clone()) * (sum(&at) / k);
        assert_eq!(via_formulas, direct);
    }

    #[test]
    fn covariance_is_symmetric_and_psd() {
        let st = state_at(10, 3, 20);
        let w = Pattern::wedge();
        let t = Pattern::triangle();
        let cfg = CovConfig::default();
        let cwt = cond_cov_exact_rational(&w, &t, &st, cfg).unwrap();
        let ctw = cond_cov_exact_rational(&t, &w, &st, cfg).unwrap();
        assert_eq!(cwt, ctw);
        let cww = cond_cov_exact(&w, &w, &st, cfg).unwrap();
        let ctt = cond_cov_exact(&t, &t, &st, cfg).unwrap();
        let cwt = cwt.as_f64();
        // 2x2 covariance matrix: nonnegative diagonal and determinant
        assert!(cww >= 0.0 && ctt >= 0.0);
        assert!(cww * ctt - cwt * cwt >= -1e-9 * (cww * ctt).abs().max(1.0));
    }

    #[test]
    fn surrogate_closed_forms() {
        let w = Pattern::wedge();
        let t = Pattern::triangle();
        for &(i, n) in &[(10usize, 12usize), (30, 20), (100, 40)] {
            let s = i as f64 / pair_count(n) as f64;
            let vww = v_surrogate(&w, &w, i, n);
            assert!((vww - 8.0 * n as f64 * s * (1.0 - s)).abs() < 1e-9);
            let vwt = v_surrogate(&w, &t, i, n);
            assert!((vwt - 24.0 * n as f64 * s * s * (1.0 - s)).abs() < 1e-9);
            let vtt = v_surrogate(&t, &t, i, n);
            assert!((vtt - 36.0 * n as f64 * s * s * (1.0 - s * s)).abs() < 1e-9);
            // orthogonality identity
            assert!((vwt - 3.0 * s * vww).abs() < 1e-10 * vwt.abs().max(1.0));
        }
    }

    #[test]
    fn w_correction_examples() {
        let w = Pattern::wedge();
        assert_eq!(w_correction(&w, &w, 10, 20, 0.0), 0.0);
        assert_eq!(w_correction(&Pattern::edge(), &w, 10, 20, 5.0), 0.0);
        // F = F' = wedge, n=20, s=1/2, D_wedge=10 -> 8/20 * 10 = 4
        let i = pair_count(20) / 2;
        let got = w_correction(&w, &w, i, 20, 10.0);
        assert!((got - 4.0).abs() < 1e-12);
    }

    #[test]
    fn a_star_examples() {
        // wedge with vanishing deviations: mean-field rate 4 s n
        let n = 30;
        let i = 100;
        let s = i as f64 / pair_count(n) as f64;
        let got = a_star_form(&Pattern::wedge(), i, n, 0.0, 0.0, 0.0).unwrap();
        assert!((got - 4.0 * s * n as f64).abs() < 1e-12);
        // single edge: constant 2, matching the edge increment identically
        let got = a_star_form(&Pattern::edge(), i, n, 3.0, -1.0, 2.0).unwrap();
        assert!((got - 2.0).abs() < 1e-12);
        assert!(a_star_form(&Pattern::wedge(), 0, n, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn a_star_tracks_wedge_increment_up_to_meanfield_mismatch() {
        // A_wedge - A*_wedge = 8(i-1)/n - 4 s n = -8 (i+n-1) / (n(n-1)) exactly
        let n = 24;
        let mut st = GraphState::new(n, 8).unwrap();
        for _ in 0..60 {
            let edge = st.edge_at(st.inserted());
            let i = st.inserted() + 1;
            let du = st.degree_deviation(edge.0);
            let dw = st.degree_deviation(edge.1);
            let raw = st.step_raw().unwrap();
            let astar = a_star_form(&Pattern::wedge(), i, n, du, dw, 0.0).unwrap();
            let expect_gap = -8.0 * (i as f64 + n as f64 - 1.0) / (n as f64 * (n as f64 - 1.0));
            let gap = raw.wedge_created as f64 - astar;
            assert!(
                (gap - expect_gap).abs() < 1e-9,
                "i={i}: gap {gap} vs {expect_gap}"
            );
        }
    }

    #[test]
    fn tau_zero_coefficients() {
        let tau = tau_quadratic_variation(|_| 0.0, |_| 0.0, 100, 0.5).unwrap();
        assert_eq!(tau, 0.0);
    }

    #[test]
    fn tau_unit_kappa_approaches_two_thirds() {
        // Riemann sum of 8 s (1-s) over the whole process, halved by N/n^2
        let n = 2000;
        let tau = tau_quadratic_variation(|_| 1.0, |_| 0.0, n, 1.0).unwrap();
        assert!((tau - 2.0 / 3.0).abs() < 3.0 / n as f64, "tau = {tau}");
    }

    #[test]
    fn factored_tau_matches_generic() {
        for h in [
            Pattern::wedge(),
            Pattern::triangle(),
            Pattern::builtin("k4").unwrap(),
        ] {
            for &t in &[0.3, 0.5, 0.7] {
                let n = 300;
                let (kappa, rho) = lambda_star_coefficients(&h, t, n);
                let generic = tau_quadratic_variation(kappa, rho, n, t).unwrap();
                let fast = tau_for_pattern(&h, t, n).unwrap();
                assert!(
                    (generic - fast).abs() <= 1e-12 * generic.abs(),
                    "{:?} t={t}: {generic} vs {fast}",
                    h.edges()
                );
            }
        }
    }

    #[test]
    fn candidate_cap_is_enforced() {
        let st = GraphState::new(40, 1).unwrap();
        let res = cond_cov_exact(
            &Pattern::wedge(),
            &Pattern::wedge(),
            &st,
            CovConfig { max_candidates: 10 },
        );
        assert!(matches!(res, Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn y_second_moment_vanishes_for_wedge_and_triangle() {
        // X*_F reproduces X_F exactly for the standalone wedge and triangle
        let st = state_at(12, 21, 30);
        let cfg = CovConfig::default();
        let yw = y_second_moment_exact(&Pattern::wedge(), &st, cfg).unwrap();
        let yt = y_second_moment_exact(&Pattern::triangle(), &st, cfg).unwrap();
        assert!(yw.abs() < 1e-14, "wedge Y^2 = {yw}");
        assert!(yt.abs() < 1e-12, "triangle Y^2 = {yt}");
    }
}
