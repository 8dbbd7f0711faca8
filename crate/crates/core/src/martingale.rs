//! Per-step increments, conditional centering, the exact decomposition of the
//! count deviation, and its wedge/triangle approximants.
//!
//! For a pattern `H` with edge set indexed by bits, every spanning subgraph
//! `F ⊆ E(H)` contributes a centered increment `X_F(G_i)`; the deviation
//! `D_H(G_m)` is exactly the double sum of those increments weighted by
//! falling-factorial coefficients. Recording a [`LatticeTrace`] materialises
//! everything needed to evaluate the decomposition, the residuals
//! `Y_F = X_F - X*_F`, and the accumulants `Λ*`, `Λ**`.

use crate::combin::{falling, pair_count};
use crate::error::{Error, Result};
use crate::graph::{
    count_embeddings, embeddings_through_pair, GraphState, Pattern, ProcessConfig, SubgraphLattice,
};
use crate::numeric::Kahan;
use crate::scalar::Scalar;
use crate::Exact;
use std::io::Write;

fn pow_u<S: Scalar>(base: &S, k: u32) -> S {
    let mut acc = S::one();
    for _ in 0..k {
        acc *= base.clone();
    }
    acc
}

/// Conditional mean of the embedding increment of `F` given the current state:
/// `(N-i+1)^{-1} Σ_{f ∈ E(F)} (N_{F\f}(G_{i-1}) - N_F(G_{i-1}))`,
/// where the state plays the role of `G_{i-1}`.
pub fn cond_exp_increment<S: Scalar>(f: &Pattern, state: &GraphState) -> Result<S> {
    let remaining = (state.pair_total() - state.inserted()) as u64;
    if remaining == 0 {
        return Err(Error::ProcessExhausted(state.pair_total()));
    }
    let base = count_embeddings(state, f)?;
    let mut sum = S::zero();
    for k in 0..f.edge_count() {
        let sub = f.remove_edge(k)?;
        let cnt = count_embeddings(state, &sub)?;
        sum += S::from_count(cnt) - S::from_count(base);
    }
    Ok(sum / S::from_nat(remaining))
}

/// Realized increment `A_F` for inserting `edge` into the current state and
/// its centered version `X_F = A_F - E[A_F | state]`.
pub fn increment_and_center<S: Scalar>(
    f: &Pattern,
    state: &GraphState,
    edge: (usize, usize),
) -> Result<(u128, S)> {
    use crate::graph::Host;
    if state.has_edge(edge.0, edge.1) {
        return Err(Error::invalid(format!("edge {edge:?} already present")));
    }
    let a = embeddings_through_pair(state, f, edge.0, edge.1)?;
    let cond = cond_exp_increment::<S>(f, state)?;
    Ok((a, S::from_count(a) - cond))
}

/// Decomposition coefficient `(N-m)_{e_F} (m-i)_{e-e_F} / (N-i)_e`.
///
/// Defined for `i <= N - e`; closer to the end of the process the ratio
/// degenerates to `0/0` and the coefficient is instead given by the one-step
/// recursion, see [`decomposition_coefficient_rows`].
pub fn mart_coefficient<S: Scalar>(e_f: u64, e: u64, i: u64, m: u64, bign: u64) -> Result<S> {
    if e_f > e || i > m || m > bign {
        return Err(Error::invalid(format!(
            "need e_F <= e and i <= m <= N; got e_F={e_f}, e={e}, i={i}, m={m}, N={bign}"
        )));
    }
    if bign - i < e {
        return Err(Error::Domain(format!(
            "coefficient is 0/0 for i > N - e (i={i}, e={e}, N={bign}); \
             use the recursion form"
        )));
    }
    Ok(falling::<S>(bign - m, e_f) * falling::<S>(m - i, e - e_f) / falling::<S>(bign - i, e))
}

/// Coefficient rows of the decomposition at prefix `m`: `rows[i-1][k]` is the
/// weight of `X_F(G_i)` for any lattice member with `e(F) = k`.
///
/// The rows are products of the one-step update
/// `D_F(G_j) = (1 - e_F/(N-j+1)) D_F(G_{j-1})
///            + (N-j+1)^{-1} Σ_f D_{F\f}(G_{j-1}) + X_F(G_j)`,
/// which equal the falling-factorial ratio wherever that ratio is defined
/// and extend it across the final `e` steps of the process where the printed
/// form is `0/0`.
pub fn decomposition_coefficient_rows(e: usize, m: usize, bign: usize) -> Result<Vec<Vec<Exact>>> {
    if m == 0 || m > bign {
        return Err(Error::invalid(format!(
            "need 1 <= m <= N, got m={m}, N={bign}"
        )));
    }
    let mut rows = vec![vec![Exact::from_int(0); e + 1]; m];
    rows[m - 1][e] = Exact::from_int(1);
    for i in (1..m).rev() {
        // rows[i-1] = rows[i] * A_{i+1}, with A_{i+1} dividing by N - i
        let rem = Exact::from_nat((bign - i) as u64);
        let prev = rows[i].clone();
        for k in 0..=e {
            let mut v = prev[k].clone() * (rem.clone() - Exact::from_nat(k as u64)) / rem.clone();
            if k < e {
                v += prev[k + 1].clone() * Exact::from_nat((e - k) as u64) / rem.clone();
            }
            rows[i - 1][k] = v;
        }
    }
    Ok(rows)
}

/// Coefficient error `ν_{c,e}(i,m)` between the falling-factorial weight and
/// its continuous limit `(1-t)^c (t-s)^{e-c} / (1-s)^e`, `t = m/N`, `s = i/N`.
pub fn nu_coefficient(c: u64, e: u64, i: u64, m: u64, bign: u64) -> Result<f64> {
    if c > e || i == 0 || i > m || m > bign {
        return Err(Error::invalid(format!(
            "need c <= e and 1 <= i <= m <= N; got c={c}, e={e}, i={i}, m={m}, N={bign}"
        )));
    }
    let discrete: f64 = mart_coefficient::<f64>(c, e, i, m, bign)?;
    let t = m as f64 / bign as f64;
    let s = i as f64 / bign as f64;
    let continuous =
        (1.0 - t).powi(c as i32) * (t - s).powi((e - c) as i32) / (1.0 - s).powi(e as i32);
    Ok(discrete - continuous)
}

/// Wedge/triangle projection `X*_F` of a centered increment:
/// `n^{v-3} s^{e(F)-2} (w(F) - 3 tr(F)) X_wedge + n^{v-3} s^{e(F)-3} tr(F) X_tri`
/// with `s = i/N` and `v` the (spanning) vertex count of `F`.
pub fn x_star<S: Scalar>(f: &Pattern, n: usize, i: usize, x_wedge: S, x_triangle: S) -> Result<S> {
    if i == 0 {
        return Err(Error::invalid("x_star undefined at i = 0"));
    }
    let w = f.wedge_count();
    let t = f.triangle_count();
    if w == 0 && t == 0 {
        return Ok(S::zero());
    }
    let bign = pair_count(n) as u64;
    let s = S::from_nat(i as u64) / S::from_nat(bign);
    let v = f.vertex_count() as u32;
    let e = f.edge_count() as u32;
    let nv = pow_u(&S::from_nat(n as u64), v - 3);
    let mut acc = S::zero();
    // wedge coefficient w - 3t can be negative; triangles imply e >= 3
    if w != 0 || t != 0 {
        let coef = S::from_int(w as i128 - 3 * t as i128);
        acc += nv.clone() * pow_u(&s, e - 2) * coef * x_wedge;
    }
    if t != 0 {
        acc += nv * pow_u(&s, e - 3) * S::from_nat(t) * x_triangle;
    }
    Ok(acc)
}

/// Residual `Y_F = X_F - X*_F`.
pub fn y_residual<S: Scalar>(x: S, x_star: S) -> S {
    x - x_star
}

/// Linear predictor
/// `Λ_H = n^{v-3} t^{e-2} (w(H) - 3 tr(H)) D_wedge + n^{v-3} t^{e-3} tr(H) D_tri`.
pub fn lambda_combination(
    h: &Pattern,
    t: f64,
    n: usize,
    d_wedge: f64,
    d_triangle: f64,
) -> Result<f64> {
    if !(0.0 < t && t < 1.0) {
        return Err(Error::invalid(format!("need t in (0,1), got {t}")));
    }
    let v = h.vertex_count() as i32;
    let e = h.edge_count() as i32;
    let w = h.wedge_count() as f64;
    let tr = h.triangle_count() as f64;
    let nv = (n as f64).powi(v - 3);
    Ok(nv * t.powi(e - 2) * (w - 3.0 * tr) * d_wedge + nv * t.powi(e - 3) * tr * d_triangle)
}

/// Per-step integrand of `Λ*_H` at step `i` (in `[1, tN]`):
/// `n^{v-3} [ t^{e-2} w(H) r² X_w + t^{e-3} tr(H) r³ (X_t - 3 s X_w) ]`
/// with `r = (1-t)/(1-s)` kept in ratio form.
fn lambda_star_term(h: &Pattern, t: f64, n: usize, i: usize, x_w: f64, x_t: f64) -> f64 {
    let bign = pair_count(n) as f64;
    let s = i as f64 / bign;
    let r = (1.0 - t) / (1.0 - s);
    let v = h.vertex_count() as i32;
    let e = h.edge_count() as i32;
    let nv = (n as f64).powi(v - 3);
    let wedge_part = t.powi(e - 2) * h.wedge_count() as f64 * r * r * x_w;
    let tri_part = t.powi(e - 3) * h.triangle_count() as f64 * r * r * r * (x_t - 3.0 * s * x_w);
    nv * (wedge_part + tri_part)
}

/// Accumulate `Λ*_H(G_{n,t}) = Σ_{i<=tN} 𝕏_H(G_i;t)` from standalone
/// wedge/triangle centered increments, with compensated summation.
pub fn lambda_star_accumulate(
    h: &Pattern,
    t: f64,
    n: usize,
    x_wedge: &[f64],
    x_triangle: &[f64],
) -> Result<f64> {
    if !(0.0 < t && t < 1.0) {
        return Err(Error::invalid(format!("need t in (0,1), got {t}")));
    }
    let m = (t * pair_count(n) as f64).floor() as usize;
    if x_wedge.len() < m || x_triangle.len() < m {
        return Err(Error::invalid(format!(
            "trace covers {} steps but tN = {m}",
            x_wedge.len().min(x_triangle.len())
        )));
    }
    let mut acc = Kahan::new();
    for i in 1..=m {
        acc.add(lambda_star_term(
            h,
            t,
            n,
            i,
            x_wedge[i - 1],
            x_triangle[i - 1],
        ));
    }
    Ok(acc.value())
}

/// Continuous-coefficient form of the decomposition,
/// `Λ**_H = Σ_i Σ_F (1-t)^{e(F)} (t-s)^{e-e(F)} (1-s)^{-e} X_F(G_i)`.
pub fn lambda_double_star(h: &Pattern, t: f64, trace: &LatticeTrace<f64>) -> Result<f64> {
    if !(0.0 < t && t < 1.0) {
        return Err(Error::invalid(format!("need t in (0,1), got {t}")));
    }
    let n = trace.n;
    let bign = pair_count(n) as f64;
    let m = (t * bign).floor() as usize;
    if trace.steps.len() < m {
        return Err(Error::invalid(format!(
            "trace covers {} steps but tN = {m}",
            trace.steps.len()
        )));
    }
    let e = h.edge_count() as i32;
    let mut acc = Kahan::new();
    for step in &trace.steps[..m] {
        let s = step.index as f64 / bign;
        for (mask, x) in step.centered.iter().enumerate() {
            let ef = mask.count_ones() as i32;
            let coeff = (1.0 - t).powi(ef) * (t - s).powi(e - ef) / (1.0 - s).powi(e);
            acc.add(coeff * x);
        }
    }
    Ok(acc.value())
}

/// One recorded step of a lattice trace.
#[derive(Debug, Clone)]
pub struct StepRecord<S: Scalar> {
    /// 1-based step index.
    pub index: usize,
    pub edge: (usize, usize),
    /// `A_F` per lattice mask.
    pub created: Vec<u128>,
    /// `E[A_F | G_{i-1}]` per mask.
    pub cond_exp: Vec<S>,
    /// `X_F` per mask.
    pub centered: Vec<S>,
    /// `X*_F` per mask.
    pub x_star: Vec<S>,
    /// `Y_F = X_F - X*_F` per mask.
    pub y: Vec<S>,
    /// Standalone wedge/triangle centered increments.
    pub x_wedge: S,
    pub x_triangle: S,
}

/// Materialised per-step record of all lattice increments along one seeded
/// trajectory.
pub struct LatticeTrace<S: Scalar> {
    pub pattern: Pattern,
    pub lattice: SubgraphLattice,
    pub n: usize,
    pub seed: u64,
    pub stream: u64,
    pub steps: Vec<StepRecord<S>>,
    /// `N_H(G_i)` for the full pattern, indexed by step (i = 1..=m).
    pub full_counts: Vec<u128>,
    /// Per-step `E[𝕏_H(G_i;t)² | G_{i-1}]` with `t = m/N`, when tracked.
    pub step_variance: Option<Vec<f64>>,
    /// Final wedge/triangle deviations `D_wedge(G_m)`, `D_tri(G_m)`.
    pub d_wedge_final: f64,
    pub d_triangle_final: f64,
}

/// Memory cap and optional extras for materialised traces.
#[derive(Debug, Clone, Copy)]
pub struct TraceConfig {
    pub memory_budget_bytes: usize,
    /// Track the exact per-step conditional second moment of the accumulant
    /// increment (`O(N)` extra work per step); enables `quadratic_variation`.
    pub track_variance: bool,
}

impl Default for TraceConfig {
    fn default() -> Self {
        TraceConfig {
            memory_budget_bytes: 1 << 30,
            track_variance: false,
        }
    }
}

impl<S: Scalar> LatticeTrace<S> {
    /// Record the first `m` steps of the `(n, seed, stream)` trajectory.
    pub fn record(h: &Pattern, n: usize, seed: u64, stream: u64, m: usize) -> Result<Self> {
        Self::record_with(h, n, seed, stream, m, TraceConfig::default())
    }

    pub fn record_with(
        h: &Pattern,
        n: usize,
        seed: u64,
        stream: u64,
        m: usize,
        cfg: TraceConfig,
    ) -> Result<Self> {
        let masks = 1usize << h.edge_count();
        // 5 lattice columns of ~16 bytes plus fixed overhead per step
        let estimate = m.saturating_mul(masks * 5 * 16 + 128);
        if estimate > cfg.memory_budget_bytes {
            return Err(Error::ResourceLimit(format!(
                "materialised trace of {m} steps x {masks} masks (~{estimate} bytes) exceeds budget"
            )));
        }
        let mut steps = Vec::with_capacity(m);
        let mut full_counts = Vec::with_capacity(m);
        let mut step_variance = cfg.track_variance.then(|| Vec::with_capacity(m));
        let mut state = GraphState::with_config(
            n,
            seed,
            ProcessConfig {
                materialize_codegrees: false,
                stream,
            },
        )?;
        if m > state.pair_total() {
            return Err(Error::invalid(format!(
                "m={m} exceeds pair count {}",
                state.pair_total()
            )));
        }
        let lattice = h.lattice();
        // running N_F(G_{i-1}) per mask; the empty mask counts all injections
        let mut counts: Vec<u128> = (0..masks)
            .map(|mask| {
                if mask == 0 {
                    crate::combin::falling_u128(n as u64, h.vertex_count() as u64)
                } else {
                    0
                }
            })
            .collect();
        let t_eff = m as f64 / state.pair_total() as f64;
        for _ in 0..m {
            if let Some(vs) = &mut step_variance {
                if t_eff < 1.0 {
                    vs.push(crate::covariance::accumulant_increment_second_moment(
                        h,
                        t_eff,
                        &state,
                        crate::covariance::CovConfig::default(),
                    )?);
                } else {
                    vs.push(0.0);
                }
            }
            let edge = state.edge_at(state.inserted());
            let remaining = (state.pair_total() - state.inserted()) as u64;
            let mut created = vec![0u128; masks];
            let mut cond_exp = vec![S::zero(); masks];
            let mut centered = vec![S::zero(); masks];
            for mask in 0..masks {
                if mask == 0 {
                    continue;
                }
                created[mask] =
                    embeddings_through_pair(&state, lattice.member(mask), edge.0, edge.1)?;
                let mut sum_bits = S::zero();
                let mut bits = mask;
                while bits != 0 {
                    let k = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    let sub = mask & !(1 << k);
                    sum_bits += S::from_count(counts[sub]) - S::from_count(counts[mask]);
                }
                cond_exp[mask] = sum_bits / S::from_nat(remaining);
                centered[mask] = S::from_count(created[mask]) - cond_exp[mask].clone();
            }
            let raw = state.step_raw()?;
            debug_assert_eq!(raw.edge, edge);
            let x_wedge = wedge_centered_exact::<S>(&raw, n);
            let x_triangle = triangle_centered_exact::<S>(&raw);
            let mut xs = vec![S::zero(); masks];
            let mut ys = vec![S::zero(); masks];
            for mask in 0..masks {
                xs[mask] = x_star(
                    lattice.member(mask),
                    n,
                    raw.index,
                    x_wedge.clone(),
                    x_triangle.clone(),
                )?;
                ys[mask] = y_residual(centered[mask].clone(), xs[mask].clone());
            }
            for mask in 0..masks {
                counts[mask] += created[mask];
            }
            full_counts.push(counts[masks - 1]);
            steps.push(StepRecord {
                index: raw.index,
                edge,
                created,
                cond_exp,
                centered,
                x_star: xs,
                y: ys,
                x_wedge,
                x_triangle,
            });
        }
        Ok(LatticeTrace {
            pattern: h.clone(),
            lattice,
            n,
            seed,
            stream,
            steps,
            full_counts,
            step_variance,
            d_wedge_final: state.wedge_deviation(),
            d_triangle_final: state.triangle_deviation(),
        })
    }

    /// Quadratic variation `V(m) = Σ_{i<=m} E[𝕏_H(G_i;t)² | G_{i-1}]`.
    pub fn quadratic_variation(&self) -> Option<f64> {
        self.step_variance.as_ref().map(|vs| {
            let mut acc = Kahan::new();
            for &v in vs {
                acc.add(v);
            }
            acc.value()
        })
    }

    pub fn recorded_steps(&self) -> usize {
        self.steps.len()
    }

    pub fn x_wedge_series(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.x_wedge.as_f64()).collect()
    }

    /// Running accumulant values: entry `k` is `Σ_{i<=k+1} 𝕏_H(G_i;t)`.
    pub fn lambda_star_partials(&self, t: f64) -> Result<Vec<f64>> {
        if !(0.0 < t && t < 1.0) {
            return Err(Error::invalid(format!("need t in (0,1), got {t}")));
        }
        let mut acc = Kahan::new();
        let mut out = Vec::with_capacity(self.steps.len());
        for step in &self.steps {
            acc.add(lambda_star_term(
                &self.pattern,
                t,
                self.n,
                step.index,
                step.x_wedge.as_f64(),
                step.x_triangle.as_f64(),
            ));
            out.push(acc.value());
        }
        Ok(out)
    }

    pub fn x_triangle_series(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.x_triangle.as_f64()).collect()
    }
}

fn wedge_centered_exact<S: Scalar>(raw: &crate::graph::RawStep, n: usize) -> S {
    // E[A_wedge | G_{i-1}] = 2 (2(i-1)(n-2) - N_wedge(G_{i-1})) / (N-i+1)
    let prior = 2 * (raw.index as u128 - 1) * (n as u128 - 2);
    let cond = S::from_nat(2) * (S::from_count(prior) - S::from_count(raw.wedge_before as u128))
        / S::from_nat(raw.remaining);
    S::from_count(raw.wedge_created as u128) - cond
}

fn triangle_centered_exact<S: Scalar>(raw: &crate::graph::RawStep) -> S {
    // E[A_tri | G_{i-1}] = 3 (N_wedge - N_tri)(G_{i-1}) / (N-i+1)
    let cond = S::from_nat(3)
        * (S::from_count(raw.wedge_before as u128) - S::from_count(raw.triangle_before as u128))
        / S::from_nat(raw.remaining);
    S::from_count(raw.triangle_created as u128) - cond
}

/// Both sides of the exact decomposition at prefix length `m`.
#[derive(Debug, Clone)]
pub struct DecompositionReport {
    /// `D_H(G_m)` computed directly from the count.
    pub lhs: Exact,
    /// The coefficient-weighted double sum of centered increments.
    pub rhs: Exact,
    /// `lhs - rhs`; zero on every input, anything else is a bug.
    pub residual: Exact,
}

/// Evaluate the decomposition identity at prefix `m` of a recorded exact
/// trace. The residual must be literally zero.
pub fn verify_decomposition(trace: &LatticeTrace<Exact>, m: usize) -> Result<DecompositionReport> {
    if m == 0 || m > trace.steps.len() {
        return Err(Error::invalid(format!(
            "m={m} outside recorded range 1..={}",
            trace.steps.len()
        )));
    }
    let bign = pair_count(trace.n);
    let e = trace.pattern.edge_count();
    let lhs = Exact::from_count(trace.full_counts[m - 1])
        - crate::graph::expected_count::<Exact>(&trace.pattern, trace.n as u64, m as u64)?;
    let rows = decomposition_coefficient_rows(e, m, bign)?;
    let mut rhs = Exact::from_int(0);
    for step in &trace.steps[..m] {
        let row = &rows[step.index - 1];
        for (mask, x) in step.centered.iter().enumerate() {
            rhs += row[mask.count_ones() as usize].clone() * x.clone();
        }
    }
    let residual = lhs.clone() - rhs.clone();
    Ok(DecompositionReport { lhs, rhs, residual })
}

/// Lightweight trace of standalone wedge/triangle centered increments, for
/// large-`n` runs where the full lattice is not needed.
pub struct WedgeTriangleTrace {
    pub n: usize,
    pub seed: u64,
    pub stream: u64,
    pub x_wedge: Vec<f64>,
    pub x_triangle: Vec<f64>,
    /// Running quadratic variation terms `E[X_wedge^2 | G_{i-1}]`, if tracked.
    pub wedge_variance: Option<Vec<f64>>,
    pub d_wedge_final: f64,
    pub d_triangle_final: f64,
    /// Largest realised `|X_wedge(G_i)|`.
    pub max_abs_x_wedge: f64,
}

impl WedgeTriangleTrace {
    pub fn record(n: usize, seed: u64, stream: u64, m: usize) -> Result<Self> {
        Self::record_impl(n, seed, stream, m, false)
    }

    /// Also track `E[X_wedge^2 | G_{i-1}]` per step by candidate-edge
    /// enumeration (`O(N)` extra work per step).
    pub fn record_with_variance(n: usize, seed: u64, stream: u64, m: usize) -> Result<Self> {
        Self::record_impl(n, seed, stream, m, true)
    }

    fn record_impl(n: usize, seed: u64, stream: u64, m: usize, variance: bool) -> Result<Self> {
        use crate::graph::Host;
        let mut state = GraphState::with_config(
            n,
            seed,
            ProcessConfig {
                materialize_codegrees: false,
                stream,
            },
        )?;
        if m > state.pair_total() {
            return Err(Error::invalid(format!(
                "m={m} exceeds pair count {}",
                state.pair_total()
            )));
        }
        let mut x_wedge = Vec::with_capacity(m);
        let mut x_triangle = Vec::with_capacity(m);
        let mut wedge_variance = variance.then(|| Vec::with_capacity(m));
        let mut max_abs = 0.0f64;
        for _ in 0..m {
            if let Some(vs) = &mut wedge_variance {
                // Var(A_wedge | G_{i-1}) over uniform candidate non-edges
                let mut sum = 0.0;
                let mut sum_sq = 0.0;
                let mut k = 0u64;
                for u in 0..n {
                    for w in (u + 1)..n {
                        if state.has_edge(u, w) {
                            continue;
                        }
                        let a = 2.0 * (state.degree(u) + state.degree(w)) as f64;
                        sum += a;
                        sum_sq += a * a;
                        k += 1;
                    }
                }
                let mean = sum / k as f64;
                vs.push(sum_sq / k as f64 - mean * mean);
            }
            let raw = state.step_raw()?;
            let xw = raw.wedge_centered(n);
            x_wedge.push(xw);
            x_triangle.push(raw.triangle_centered());
            max_abs = max_abs.max(xw.abs());
        }
        Ok(WedgeTriangleTrace {
            n,
            seed,
            stream,
            x_wedge,
            x_triangle,
            wedge_variance,
            d_wedge_final: state.wedge_deviation(),
            d_triangle_final: state.triangle_deviation(),
            max_abs_x_wedge: max_abs,
        })
    }

    /// Quadratic variation `V(m) = Σ_{i<=m} E[X_wedge^2 | G_{i-1}]`.
    pub fn wedge_quadratic_variation(&self, m: usize) -> Option<f64> {
        self.wedge_variance
            .as_ref()
            .map(|vs| vs[..m.min(vs.len())].iter().sum())
    }
}

/// CSV export: one row per step with per-mask columns `a_k,x_k,xstar_k,y_k`.
pub fn write_trace_csv<S: Scalar, W: Write>(
    trace: &LatticeTrace<S>,
    out: &mut W,
) -> std::io::Result<()> {
    let masks = trace.lattice.len();
    write!(out, "i,s,edge_u,edge_w")?;
    for mask in 0..masks {
        write!(out, ",a_{mask},x_{mask},xstar_{mask},y_{mask}")?;
    }
    writeln!(out)?;
    let bign = pair_count(trace.n) as f64;
    for step in &trace.steps {
        write!(
            out,
            "{},{},{},{}",
            step.index,
            step.index as f64 / bign,
            step.edge.0,
            step.edge.1
        )?;
        for mask in 0..masks {
            write!(
                out,
                ",{},{},{},{}",
                step.created[mask],
                step.centered[mask].as_f64(),
                step.x_star[mask].as_f64(),
                step.y[mask].as_f64()
            )?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// JSON summary of a trace at its recorded length: deviation, predictors and
/// accumulants.
pub fn trace_summary<S: Scalar>(trace: &LatticeTrace<S>, t: f64) -> Result<serde_json::Value> {
    let m = trace.steps.len();
    let d_h = Exact::from_count(trace.full_counts[m - 1])
        - crate::graph::expected_count::<Exact>(&trace.pattern, trace.n as u64, m as u64)?;
    let lambda = lambda_combination(
        &trace.pattern,
        t,
        trace.n,
        trace.d_wedge_final,
        trace.d_triangle_final,
    )?;
    let xw = trace.x_wedge_series();
    let xt = trace.x_triangle_series();
    let lambda_star = lambda_star_accumulate(&trace.pattern, t, trace.n, &xw, &xt)?;
    // continuous-coefficient double sum over the same step data
    let e = trace.pattern.edge_count() as i32;
    let bign = pair_count(trace.n) as f64;
    let mut dstar = Kahan::new();
    for step in &trace.steps {
        let s = step.index as f64 / bign;
        for (mask, x) in step.centered.iter().enumerate() {
            let ef = mask.count_ones() as i32;
            let coeff = (1.0 - t).powi(ef) * (t - s).powi(e - ef) / (1.0 - s).powi(e);
            dstar.add(coeff * x.as_f64());
        }
    }
    Ok(serde_json::json!({
        "n": trace.n,
        "m": m,
        "t": t,
        "seed": trace.seed,
        "stream": trace.stream,
        "rng_family": crate::rng::RNG_FAMILY,
        "d_h": d_h.to_string(),
        "d_h_float": d_h.as_f64(),
        "d_wedge": trace.d_wedge_final,
        "d_triangle": trace.d_triangle_final,
        "lambda": lambda,
        "lambda_star": lambda_star,
        "lambda_double_star": dstar.value(),
        "quadratic_variation": trace.quadratic_variation(),
    }))
}
