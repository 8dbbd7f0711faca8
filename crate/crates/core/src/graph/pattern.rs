//! Small pattern graphs and their spanning-subgraph lattice.

use crate::error::{Error, Result};

/// A small fixed graph `H` on vertices `{0..v-1}`, possibly with isolated
/// vertices (lattice members keep the full vertex set of their parent).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    v: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<u64>,
    wedge_count: u64,
    triangle_count: u64,
    aut_embeddings: u64,
    /// Non-isolated vertices in backtracking order (each vertex adjacent to an
    /// earlier one whenever the component allows).
    core_order: Vec<usize>,
}

impl Pattern {
    pub fn new(v: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if v == 0 || v > 64 {
            return Err(Error::invalid(format!(
                "pattern vertex count {v} out of range 1..=64"
            )));
        }
        let mut norm: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a == b {
                return Err(Error::invalid(format!("self-loop at vertex {a}")));
            }
            if a >= v || b >= v {
                return Err(Error::invalid(format!(
                    "edge ({a},{b}) outside vertex range 0..{v}"
                )));
            }
            norm.push((a.min(b), a.max(b)));
        }
        norm.sort_unstable();
        if norm.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("multi-edge in pattern"));
        }
        let mut adj = vec![0u64; v];
        for &(a, b) in &norm {
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
        let wedge_count: u64 = adj
            .iter()
            .map(|&m| {
                let d = m.count_ones() as u64;
                d * d.saturating_sub(1) / 2
            })
            .sum();
        let mut triangle_count = 0u64;
        for &(a, b) in &norm {
            let common = adj[a] & adj[b];
            triangle_count += common.count_ones() as u64;
        }
        triangle_count /= 3;
        let core_order = backtracking_order(v, &adj);
        let aut_embeddings = embeddings_into_self(v, &adj, &core_order);
        Ok(Pattern {
            v,
            edges: norm,
            adj,
            wedge_count,
            triangle_count,
            aut_embeddings,
            core_order,
        })
    }

    /// Parse either a built-in name or the text form `v=4; edges=0-1,1-2,2-3`
    /// (whitespace-insensitive, `edges=` may be empty).
    pub fn parse(text: &str) -> Result<Self> {
        if let Some(p) = Self::builtin(text.trim()) {
            return Ok(p);
        }
        let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut v: Option<usize> = None;
        let mut edges: Vec<(usize, usize)> = Vec::new();
        for field in cleaned.split(';').filter(|f| !f.is_empty()) {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got `{field}`")))?;
            match key {
                "v" => {
                    v = Some(
                        value
                            .parse()
                            .map_err(|_| Error::Parse(format!("bad vertex count `{value}`")))?,
                    );
                }
                "edges" => {
                    for pair in value.split(',').filter(|p| !p.is_empty()) {
                        let (a, b) = pair
                            .split_once('-')
                            .ok_or_else(|| Error::Parse(format!("bad edge `{pair}`")))?;
                        let a = a
                            .parse()
                            .map_err(|_| Error::Parse(format!("bad endpoint `{a}`")))?;
                        let b = b
                            .parse()
                            .map_err(|_| Error::Parse(format!("bad endpoint `{b}`")))?;
                        edges.push((a, b));
                    }
                }
                other => return Err(Error::Parse(format!("unknown field `{other}`"))),
            }
        }
        let v = v.ok_or_else(|| Error::Parse("missing `v=` field".into()))?;
        Self::new(v, &edges)
    }

    pub fn builtin(name: &str) -> Option<Self> {
        let spec: (usize, &[(usize, usize)]) = match name {
            "edge" => (2, &[(0, 1)]),
            "wedge" => (3, &[(0, 1), (1, 2)]),
            "triangle" => (3, &[(0, 1), (1, 2), (0, 2)]),
            "path3" => (4, &[(0, 1), (1, 2), (2, 3)]),
            "c4" => (4, &[(0, 1), (1, 2), (2, 3), (0, 3)]),
            "k4" => (4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]),
            _ => return None,
        };
        Some(Self::new(spec.0, spec.1).expect("built-in patterns are valid"))
    }

    pub fn edge() -> Self {
        Self::builtin("edge").unwrap()
    }
    pub fn wedge() -> Self {
        Self::builtin("wedge").unwrap()
    }
    pub fn triangle() -> Self {
        Self::builtin("triangle").unwrap()
    }

    pub fn vertex_count(&self) -> usize {
        self.v
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Number of two-edge paths in the pattern.
    pub fn wedge_count(&self) -> u64 {
        self.wedge_count
    }

    pub fn triangle_count(&self) -> u64 {
        self.triangle_count
    }

    /// Number of embeddings of the pattern into itself.
    pub fn aut_embeddings(&self) -> u64 {
        self.aut_embeddings
    }

    pub fn adjacency_mask(&self, u: usize) -> u64 {
        self.adj[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].count_ones() as usize
    }

    pub(crate) fn core_order(&self) -> &[usize] {
        &self.core_order
    }

    /// Non-isolated vertex count.
    pub fn core_size(&self) -> usize {
        self.core_order.len()
    }

    pub fn isolated_count(&self) -> usize {
        self.v - self.core_order.len()
    }

    /// Spanning subgraph keeping the edges selected by `mask` (bit `k` keeps
    /// `self.edges()[k]`); the vertex set is unchanged.
    pub fn spanning_subgraph(&self, mask: usize) -> Result<Self> {
        if mask >> self.edges.len() != 0 {
            return Err(Error::invalid(format!(
                "mask {mask:#x} has bits beyond the {} pattern edges",
                self.edges.len()
            )));
        }
        let kept: Vec<_> = self
            .edges
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        Self::new(self.v, &kept)
    }

    /// Subgraph with one edge removed, keeping the vertex set.
    pub fn remove_edge(&self, k: usize) -> Result<Self> {
        let full = (1usize << self.edges.len()) - 1;
        self.spanning_subgraph(full & !(1 << k))
    }

    /// All `2^e` spanning subgraphs, indexed by edge mask.
    pub fn lattice(&self) -> SubgraphLattice {
        let members = (0..1usize << self.edges.len())
            .map(|mask| self.spanning_subgraph(mask).expect("mask in range"))
            .collect();
        SubgraphLattice {
            parent_edges: self.edges.clone(),
            members,
        }
    }
}

/// The `2^e` spanning subgraphs `F` with `V(F) = V(H)`, `E(F) ⊆ E(H)`.
#[derive(Debug, Clone)]
pub struct SubgraphLattice {
    parent_edges: Vec<(usize, usize)>,
    members: Vec<Pattern>,
}

impl SubgraphLattice {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn member(&self, mask: usize) -> &Pattern {
        &self.members[mask]
    }

    pub fn members(&self) -> &[Pattern] {
        &self.members
    }

    pub fn full_mask(&self) -> usize {
        self.members.len() - 1
    }

    pub fn parent_edge_count(&self) -> usize {
        self.parent_edges.len()
    }
}

/// Order putting connected vertices after an already-placed neighbour where
/// possible, higher degree first among candidates. Isolated vertices are
/// excluded (they contribute a falling-factorial factor, not enumeration).
fn backtracking_order(v: usize, adj: &[u64]) -> Vec<usize> {
    let mut order = Vec::new();
    let mut placed = 0u64;
    let core: Vec<usize> = (0..v).filter(|&u| adj[u] != 0).collect();
    while order.len() < core.len() {
        let next = core
            .iter()
            .copied()
            .filter(|&u| placed >> u & 1 == 0)
            .max_by_key(|&u| {
                let attached = (adj[u] & placed).count_ones();
                (attached, adj[u].count_ones())
            })
            .unwrap();
        order.push(next);
        placed |= 1 << next;
    }
    order
}

/// Count injective maps of the graph into itself sending edges to edges.
fn embeddings_into_self(v: usize, adj: &[u64], core_order: &[usize]) -> u64 {
    // Isolated vertices permute freely among the leftovers.
    let mut count = 0u64;
    let mut image = vec![usize::MAX; v];
    let mut used = 0u64;
    fn rec(
        pos: usize,
        order: &[usize],
        adj: &[u64],
        v: usize,
        image: &mut [usize],
        used: &mut u64,
        count: &mut u64,
    ) {
        if pos == order.len() {
            *count += 1;
            return;
        }
        let p = order[pos];
        for cand in 0..v {
            if *used >> cand & 1 == 1 {
                continue;
            }
            let mut ok = true;
            let mut nb = adj[p];
            while nb != 0 {
                let q = nb.trailing_zeros() as usize;
                nb &= nb - 1;
                let iq = image[q];
                if iq != usize::MAX && adj[cand] >> iq & 1 == 0 {
                    ok = false;
                    break;
                }
            }
            if ok {
                image[p] = cand;
                *used |= 1 << cand;
                rec(pos + 1, order, adj, v, image, used, count);
                *used &= !(1 << cand);
                image[p] = usize::MAX;
            }
        }
    }
    rec(0, core_order, adj, v, &mut image, &mut used, &mut count);
    // isolated vertices: injective maps into the remaining slots
    let iso = v - core_order.len();
    let mut ff = 1u64;
    for j in 0..iso {
        ff *= (iso - j) as u64;
    }
    count * ff
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_invariants() {
        let w = Pattern::wedge();
        assert_eq!((w.vertex_count(), w.edge_count()), (3, 2));
        assert_eq!(w.wedge_count(), 1);
        assert_eq!(w.triangle_count(), 0);
        assert_eq!(w.aut_embeddings(), 2);

        let t = Pattern::triangle();
        assert_eq!(t.wedge_count(), 3);
        assert_eq!(t.triangle_count(), 1);
        assert_eq!(t.aut_embeddings(), 6);

        let k4 = Pattern::builtin("k4").unwrap();
        assert_eq!(k4.wedge_count(), 12);
        assert_eq!(k4.triangle_count(), 4);
        assert_eq!(k4.aut_embeddings(), 24);

        let c4 = Pattern::builtin("c4").unwrap();
        assert_eq!(c4.wedge_count(), 4);
        assert_eq!(c4.triangle_count(), 0);
        assert_eq!(c4.aut_embeddings(), 8);

        let p3 = Pattern::builtin("path3").unwrap();
        assert_eq!(p3.wedge_count(), 2);
        assert_eq!(p3.aut_embeddings(), 2);
    }

    #[test]
    fn parser_accepts_spec_format() {
        let p = Pattern::parse(" v = 4 ; edges = 0-1 , 1-2 , 2-3 ").unwrap();
        assert_eq!(p.edges(), Pattern::builtin("path3").unwrap().edges());
        let empty = Pattern::parse("v=3; edges=").unwrap();
        assert_eq!(empty.edge_count(), 0);
        assert_eq!(empty.core_size(), 0);
    }

    #[test]
    fn parser_rejects_malformed() {
        assert!(Pattern::parse("v=3; edges=0-0").is_err());
        assert!(Pattern::parse("v=2; edges=0-1,1-0").is_err());
        assert!(Pattern::parse("edges=0-1").is_err());
        assert!(Pattern::parse("v=2; edges=0-5").is_err());
    }

    #[test]
    fn lattice_has_all_spanning_subgraphs() {
        let t = Pattern::triangle();
        let lat = t.lattice();
        assert_eq!(lat.len(), 8);
        assert_eq!(lat.member(0).edge_count(), 0);
        assert_eq!(lat.member(0).vertex_count(), 3);
        assert_eq!(lat.member(lat.full_mask()), &t);
        // single-edge members keep the spanning vertex set
        assert_eq!(lat.member(1).vertex_count(), 3);
        assert_eq!(lat.member(1).core_size(), 2);
    }

    #[test]
    fn wedge_count_matches_degree_formula() {
        // two disjoint edges: no wedges, no triangles
        let m = Pattern::new(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(m.wedge_count(), 0);
        assert_eq!(m.triangle_count(), 0);
        assert_eq!(m.aut_embeddings(), 8);
    }
}
