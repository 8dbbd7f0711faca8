//! The Erdős–Rényi edge-insertion process with incremental bookkeeping.
//!
//! A state fixes a uniformly random permutation of all `N = n(n-1)/2` vertex
//! pairs at construction (Fisher–Yates over the seeded stream), so the whole
//! trajectory `G_0 ⊂ G_1 ⊂ … ⊂ G_N` is determined by `(n, seed, stream)` and
//! any prefix length `m` realises `G(n,m)`.

use super::host::Host;
use crate::combin::{falling_u128, index_pair, pair_count};
use crate::error::{Error, Result};
use crate::rng::{StreamRng, RNG_FAMILY};

#[derive(Debug, Clone, Copy, Default)]
pub struct ProcessConfig {
    /// Keep the full `n x n` codegree matrix up to date (`O(n)` extra work per
    /// step). Triangle counting itself does not need it; the bulk codegree
    /// diagnostics do.
    pub materialize_codegrees: bool,
    /// Stream index for parallel replicas; distinct streams never overlap.
    pub stream: u64,
}

/// Evolving graph of the edge-insertion process.
pub struct GraphState {
    n: usize,
    words: usize,
    pair_total: usize,
    inserted: usize,
    rows: Vec<u64>,
    degree: Vec<u32>,
    codegree: Option<Vec<u32>>,
    edge_order: Vec<u32>,
    wedge_embeddings: u64,
    triangle_embeddings: u64,
    seed: u64,
    stream: u64,
}

/// Raw per-step increments of the wedge and triangle embedding counts,
/// together with the pre-insertion state needed to center them exactly.
#[derive(Debug, Clone, Copy)]
pub struct RawStep {
    /// 1-based step index `i`.
    pub index: usize,
    pub edge: (usize, usize),
    /// Embeddings created: `2 (d_u + d_w)` for the wedge, `6 d_{u,w}` for the
    /// triangle, all read in the pre-insertion state.
    pub wedge_created: u64,
    pub triangle_created: u64,
    pub wedge_before: u64,
    pub triangle_before: u64,
    /// Candidate pairs available at this step, `N - i + 1`.
    pub remaining: u64,
}

impl RawStep {
    /// Conditional mean of the wedge increment given the pre-insertion state.
    pub fn wedge_cond_exp(&self, n: usize) -> f64 {
        let prior = 2.0 * (self.index as f64 - 1.0) * (n as f64 - 2.0);
        2.0 * (prior - self.wedge_before as f64) / self.remaining as f64
    }

    /// Conditional mean of the triangle increment.
    pub fn triangle_cond_exp(&self) -> f64 {
        3.0 * (self.wedge_before as f64 - self.triangle_before as f64) / self.remaining as f64
    }

    pub fn wedge_centered(&self, n: usize) -> f64 {
        self.wedge_created as f64 - self.wedge_cond_exp(n)
    }

    pub fn triangle_centered(&self) -> f64 {
        self.triangle_created as f64 - self.triangle_cond_exp()
    }
}

impl GraphState {
    pub fn new(n: usize, seed: u64) -> Result<Self> {
        Self::with_config(n, seed, ProcessConfig::default())
    }

    pub fn with_config(n: usize, seed: u64, cfg: ProcessConfig) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("need n >= 2, got {n}")));
        }
        let total = pair_count(n);
        if total > u32::MAX as usize {
            return Err(Error::invalid(format!(
                "n={n} yields more pairs than supported"
            )));
        }
        let words = n.div_ceil(64);
        let mut state = GraphState {
            n,
            words,
            pair_total: total,
            inserted: 0,
            rows: vec![0; n * words],
            degree: vec![0; n],
            codegree: cfg.materialize_codegrees.then(|| vec![0; n * n]),
            edge_order: (0..total as u32).collect(),
            wedge_embeddings: 0,
            triangle_embeddings: 0,
            seed,
            stream: cfg.stream,
        };
        state.shuffle_order();
        Ok(state)
    }

    fn shuffle_order(&mut self) {
        let mut rng = StreamRng::new(self.seed, self.stream);
        rng.shuffle(&mut self.edge_order);
    }

    /// Rewind to `G_0` and fix a fresh trajectory for `(seed, stream)`.
    pub fn reset(&mut self, seed: u64, stream: u64) {
        self.seed = seed;
        self.stream = stream;
        self.inserted = 0;
        self.rows.fill(0);
        self.degree.fill(0);
        if let Some(c) = &mut self.codegree {
            c.fill(0);
        }
        self.wedge_embeddings = 0;
        self.triangle_embeddings = 0;
        for (k, slot) in self.edge_order.iter_mut().enumerate() {
            *slot = k as u32;
        }
        self.shuffle_order();
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Total pair count `N`.
    pub fn pair_total(&self) -> usize {
        self.pair_total
    }

    /// Current edge count `i`.
    pub fn inserted(&self) -> usize {
        self.inserted
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn rng_family(&self) -> &'static str {
        RNG_FAMILY
    }

    pub fn codegrees_materialized(&self) -> bool {
        self.codegree.is_some()
    }

    /// The realized insertion order (pair indices); the first `inserted`
    /// entries are the current edge set.
    pub fn edge_order(&self) -> &[u32] {
        &self.edge_order
    }

    pub fn edge_at(&self, step: usize) -> (usize, usize) {
        index_pair(self.n, self.edge_order[step] as usize)
    }

    /// Running embedding count of the wedge, `Σ_u d_u (d_u - 1)`.
    pub fn wedge_embeddings(&self) -> u64 {
        self.wedge_embeddings
    }

    /// Running embedding count of the triangle (6 per unlabelled triangle).
    pub fn triangle_embeddings(&self) -> u64 {
        self.triangle_embeddings
    }

    pub fn step(&mut self) -> Result<(usize, usize)> {
        Ok(self.step_raw()?.edge)
    }

    /// Insert the next edge, returning the raw increment record.
    pub fn step_raw(&mut self) -> Result<RawStep> {
        if self.inserted == self.pair_total {
            return Err(Error::ProcessExhausted(self.pair_total));
        }
        let (u, w) = index_pair(self.n, self.edge_order[self.inserted] as usize);
        let du = self.degree[u] as u64;
        let dw = self.degree[w] as u64;
        let co = self.codegree_now(u, w) as u64;
        let raw = RawStep {
            index: self.inserted + 1,
            edge: (u, w),
            wedge_created: 2 * (du + dw),
            triangle_created: 6 * co,
            wedge_before: self.wedge_embeddings,
            triangle_before: self.triangle_embeddings,
            remaining: (self.pair_total - self.inserted) as u64,
        };
        if let Some(codeg) = &mut self.codegree {
            let n = self.n;
            let words = self.words;
            // every neighbour of u gains a common neighbour with w, and vice versa
            for k in 0..words {
                let mut word = self.rows[u * words + k];
                while word != 0 {
                    let x = k * 64 + word.trailing_zeros() as usize;
                    word &= word - 1;
                    codeg[x * n + w] += 1;
                    codeg[w * n + x] += 1;
                }
                let mut word = self.rows[w * words + k];
                while word != 0 {
                    let x = k * 64 + word.trailing_zeros() as usize;
                    word &= word - 1;
                    codeg[x * n + u] += 1;
                    codeg[u * n + x] += 1;
                }
            }
        }
        self.rows[u * self.words + w / 64] |= 1 << (w % 64);
        self.rows[w * self.words + u / 64] |= 1 << (u % 64);
        self.degree[u] += 1;
        self.degree[w] += 1;
        self.wedge_embeddings += raw.wedge_created;
        self.triangle_embeddings += raw.triangle_created;
        self.inserted += 1;
        Ok(raw)
    }

    /// Advance until `m` edges are present.
    pub fn run_to(&mut self, m: usize) -> Result<()> {
        if m > self.pair_total {
            return Err(Error::invalid(format!(
                "m={m} exceeds pair count {}",
                self.pair_total
            )));
        }
        if m < self.inserted {
            return Err(Error::invalid("process cannot rewind; use reset"));
        }
        while self.inserted < m {
            self.step_raw()?;
        }
        Ok(())
    }

    fn codegree_now(&self, u: usize, w: usize) -> usize {
        match &self.codegree {
            Some(c) => c[u * self.n + w] as usize,
            None => Host::codegree(self, u, w),
        }
    }

    /// Mean degree `2m/n` of `G(n,m)`.
    pub fn mean_degree(n: usize, m: usize) -> f64 {
        2.0 * m as f64 / n as f64
    }

    /// Mean codegree `(n-2)(m)_2 / (N)_2` of `G(n,m)`.
    pub fn mean_codegree(n: usize, m: usize) -> f64 {
        let bign = pair_count(n) as u64;
        (n as f64 - 2.0) * falling_u128(m as u64, 2) as f64 / falling_u128(bign, 2) as f64
    }

    /// Degree deviation `D_u = d_u - 2m/n` at the current state.
    pub fn degree_deviation(&self, u: usize) -> f64 {
        self.degree[u] as f64 - Self::mean_degree(self.n, self.inserted)
    }

    /// Codegree deviation `D_{u,w} = d_{u,w} - (n-2)(m)_2/(N)_2`.
    pub fn codegree_deviation(&self, u: usize, w: usize) -> f64 {
        self.codegree_now(u, w) as f64 - Self::mean_codegree(self.n, self.inserted)
    }

    /// Squared deviation score `D_u^2 + D_w^2 + D_{u,w}^2` of a candidate pair.
    pub fn pair_deviation_score(&self, u: usize, w: usize) -> f64 {
        let du = self.degree_deviation(u);
        let dw = self.degree_deviation(w);
        let co = self.codegree_deviation(u, w);
        du * du + dw * dw + co * co
    }

    /// Deviation of the wedge embedding count from its `G(n,m)` mean.
    pub fn wedge_deviation(&self) -> f64 {
        let l: f64 = crate::graph::expected_count_f64(
            &super::pattern::Pattern::wedge(),
            self.n as u64,
            self.inserted as u64,
        );
        self.wedge_embeddings as f64 - l
    }

    /// Deviation of the triangle embedding count from its `G(n,m)` mean.
    pub fn triangle_deviation(&self) -> f64 {
        let l: f64 = crate::graph::expected_count_f64(
            &super::pattern::Pattern::triangle(),
            self.n as u64,
            self.inserted as u64,
        );
        self.triangle_embeddings as f64 - l
    }

    /// Summary statistics of degree (and optionally codegree) deviations.
    pub fn diagnostics(&self, include_codegrees: bool) -> Result<DegreeDiagnostics> {
        let mut d_max = f64::NEG_INFINITY;
        let mut d_min = f64::INFINITY;
        let mut sum_sq = 0.0;
        let mut sum_4 = 0.0;
        for u in 0..self.n {
            let d = self.degree_deviation(u);
            d_max = d_max.max(d);
            d_min = d_min.min(d);
            sum_sq += d * d;
            sum_4 += d * d * d * d;
        }
        let co = if include_codegrees {
            let codeg = self
                .codegree
                .as_ref()
                .ok_or(Error::CodegreesNotMaterialized)?;
            let mean = Self::mean_codegree(self.n, self.inserted);
            let mut co_max = f64::NEG_INFINITY;
            let mut co_sum_sq = 0.0;
            let mut co_sum_4 = 0.0;
            for u in 0..self.n {
                for w in (u + 1)..self.n {
                    let d = codeg[u * self.n + w] as f64 - mean;
                    co_max = co_max.max(d);
                    co_sum_sq += d * d;
                    co_sum_4 += d * d * d * d;
                }
            }
            Some(CodegreeDiagnostics {
                co_max_dev: co_max,
                co_sum_sq,
                co_sum_4,
            })
        } else {
            None
        };
        Ok(DegreeDiagnostics {
            d_max_dev: d_max,
            d_min_dev: d_min,
            sum_sq,
            sum_4,
            codegrees: co,
        })
    }
}

impl Host for GraphState {
    fn n(&self) -> usize {
        self.n
    }
    fn edge_count(&self) -> usize {
        self.inserted
    }
    fn words(&self) -> usize {
        self.words
    }
    fn adj_word(&self, u: usize, word: usize) -> u64 {
        self.rows[u * self.words + word]
    }
    fn degree(&self, u: usize) -> usize {
        self.degree[u] as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeDiagnostics {
    pub d_max_dev: f64,
    pub d_min_dev: f64,
    pub sum_sq: f64,
    pub sum_4: f64,
    pub codegrees: Option<CodegreeDiagnostics>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodegreeDiagnostics {
    pub co_max_dev: f64,
    pub co_sum_sq: f64,
    pub co_sum_4: f64,
}
