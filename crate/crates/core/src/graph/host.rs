//! Host graphs that patterns are counted in.

use crate::combin::pair_count;
use crate::error::{Error, Result};

/// Read access to a host graph with bitset adjacency rows.
pub trait Host {
    fn n(&self) -> usize;
    fn edge_count(&self) -> usize;
    /// 64-vertex blocks per adjacency row.
    fn words(&self) -> usize;
    fn adj_word(&self, u: usize, word: usize) -> u64;

    fn has_edge(&self, u: usize, w: usize) -> bool {
        self.adj_word(u, w / 64) >> (w % 64) & 1 == 1
    }

    fn degree(&self, u: usize) -> usize {
        (0..self.words())
            .map(|k| self.adj_word(u, k).count_ones() as usize)
            .sum()
    }

    /// Number of common neighbours of `u` and `w`.
    fn codegree(&self, u: usize, w: usize) -> usize {
        (0..self.words())
            .map(|k| (self.adj_word(u, k) & self.adj_word(w, k)).count_ones() as usize)
            .sum()
    }

    fn for_each_neighbor(&self, u: usize, mut f: impl FnMut(usize)) {
        for k in 0..self.words() {
            let mut word = self.adj_word(u, k);
            while word != 0 {
                let b = word.trailing_zeros() as usize;
                word &= word - 1;
                f(k * 64 + b);
            }
        }
    }

    fn for_each_edge(&self, mut f: impl FnMut(usize, usize)) {
        for u in 0..self.n() {
            for k in 0..self.words() {
                let mut word = self.adj_word(u, k);
                // keep only w > u
                if k * 64 <= u {
                    let cut = u + 1 - k * 64;
                    if cut >= 64 {
                        word = 0;
                    } else {
                        word &= !0u64 << cut;
                    }
                }
                while word != 0 {
                    let b = word.trailing_zeros() as usize;
                    word &= word - 1;
                    f(u, k * 64 + b);
                }
            }
        }
    }
}

/// Explicit host graph with bitset rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseGraph {
    n: usize,
    words: usize,
    rows: Vec<u64>,
    m: usize,
}

impl DenseGraph {
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(64);
        DenseGraph {
            n,
            words,
            rows: vec![0; n * words],
            m: 0,
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n);
        for &(u, w) in edges {
            g.add_edge(u, w)?;
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for u in 0..n {
            for w in (u + 1)..n {
                g.add_edge(u, w).unwrap();
            }
        }
        g
    }

    pub fn add_edge(&mut self, u: usize, w: usize) -> Result<()> {
        if u == w || u >= self.n || w >= self.n {
            return Err(Error::invalid(format!(
                "bad edge ({u},{w}) for n={}",
                self.n
            )));
        }
        if self.has_edge(u, w) {
            return Err(Error::invalid(format!("edge ({u},{w}) already present")));
        }
        self.rows[u * self.words + w / 64] |= 1 << (w % 64);
        self.rows[w * self.words + u / 64] |= 1 << (u % 64);
        self.m += 1;
        Ok(())
    }

    /// The complement graph on the same vertex set.
    pub fn complement(&self) -> Self {
        let mut g = Self::empty(self.n);
        for u in 0..self.n {
            for w in (u + 1)..self.n {
                if !self.has_edge(u, w) {
                    g.add_edge(u, w).unwrap();
                }
            }
        }
        debug_assert_eq!(g.m + self.m, pair_count(self.n));
        g
    }

    /// Uniform random graph with `m` edges, drawn from the given stream.
    pub fn random_gnm(n: usize, m: usize, rng: &mut crate::rng::StreamRng) -> Result<Self> {
        let total = pair_count(n);
        if m > total {
            return Err(Error::invalid(format!("m={m} exceeds {total} pairs")));
        }
        let mut idx: Vec<u32> = (0..total as u32).collect();
        rng.shuffle(&mut idx);
        let mut g = Self::empty(n);
        for &k in idx.iter().take(m) {
            let (u, w) = crate::combin::index_pair(n, k as usize);
            g.add_edge(u, w)?;
        }
        Ok(g)
    }
}

impl Host for DenseGraph {
    fn n(&self) -> usize {
        self.n
    }
    fn edge_count(&self) -> usize {
        self.m
    }
    fn words(&self) -> usize {
        self.words
    }
    fn adj_word(&self, u: usize, word: usize) -> u64 {
        self.rows[u * self.words + word]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_iteration_covers_all_pairs_once() {
        let g = DenseGraph::complete(67);
        let mut count = 0;
        g.for_each_edge(|u, w| {
            assert!(u < w);
            count += 1;
        });
        assert_eq!(count, pair_count(67));
    }

    #[test]
    fn complement_partitions_pairs() {
        let mut rng = crate::rng::StreamRng::new(5, 0);
        let g = DenseGraph::random_gnm(10, 23, &mut rng).unwrap();
        let gc = g.complement();
        assert_eq!(gc.edge_count(), 45 - 23);
        for u in 0..10 {
            for w in (u + 1)..10 {
                assert!(g.has_edge(u, w) ^ gc.has_edge(u, w));
            }
        }
    }

    #[test]
    fn codegree_counts_common_neighbors() {
        let g = DenseGraph::from_edges(5, &[(0, 2), (1, 2), (0, 3), (1, 3), (0, 4)]).unwrap();
        assert_eq!(g.codegree(0, 1), 2);
        assert_eq!(g.degree(0), 3);
    }
}
