//! The ≤4-edge pattern catalog is complete and irredundant: every subgraph of
//! K8 with 1..=4 edges is isomorphic to exactly one entry.

mod common;

use gdev_core::graph::{count_embeddings_brute, DenseGraph, Pattern};

fn signature(p: &Pattern) -> (usize, usize, u64, u64, Vec<usize>) {
    let mut degs: Vec<usize> = (0..p.vertex_count())
        .map(|u| p.degree(u))
        .filter(|&d| d > 0)
        .collect();
    degs.sort_unstable();
    (
        p.core_size(),
        p.edge_count(),
        p.wedge_count(),
        p.triangle_count(),
        degs,
    )
}

/// Isomorphism of patterns without isolated vertices: equal signatures plus a
/// witness embedding (equal edge counts make any embedding edge-bijective).
fn isomorphic(a: &Pattern, b: &Pattern) -> bool {
    if signature(a) != signature(b) {
        return false;
    }
    let host = DenseGraph::from_edges(b.vertex_count(), b.edges()).unwrap();
    count_embeddings_brute(&host, a).unwrap() > 0
}

#[test]
fn catalog_is_pairwise_nonisomorphic() {
    let catalog = common::patterns_up_to_four_edges();
    for (i, (na, a)) in catalog.iter().enumerate() {
        for (nb, b) in catalog.iter().skip(i + 1) {
            assert!(!isomorphic(a, b), "{na} and {nb} are isomorphic");
        }
    }
}

#[test]
fn catalog_covers_every_small_edge_set() {
    let catalog = common::patterns_up_to_four_edges();
    let pairs: Vec<(usize, usize)> = (0..8)
        .flat_map(|u| ((u + 1)..8).map(move |w| (u, w)))
        .collect();
    let mut covered = 0u64;
    // iterate all <=4-edge subsets via combinations of pair indices
    let mut stack: Vec<usize> = Vec::new();
    fn visit(
        start: usize,
        stack: &mut Vec<usize>,
        pairs: &[(usize, usize)],
        catalog: &[(&str, Pattern)],
        covered: &mut u64,
    ) {
        if !stack.is_empty() {
            let edges: Vec<(usize, usize)> = stack.iter().map(|&k| pairs[k]).collect();
            // relabel onto the core vertex set
            let mut verts: Vec<usize> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
            verts.sort_unstable();
            verts.dedup();
            let relabel = |v: usize| verts.iter().position(|&x| x == v).unwrap();
            let rel: Vec<(usize, usize)> = edges
                .iter()
                .map(|&(a, b)| (relabel(a), relabel(b)))
                .collect();
            let p = Pattern::new(verts.len(), &rel).unwrap();
            let matches = catalog.iter().filter(|(_, c)| isomorphic(&p, c)).count();
            assert_eq!(matches, 1, "edges {edges:?} matched {matches} entries");
            *covered += 1;
        }
        if stack.len() == 4 {
            return;
        }
        for k in start..pairs.len() {
            stack.push(k);
            visit(k + 1, stack, pairs, catalog, covered);
            stack.pop();
        }
    }
    visit(0, &mut stack, &pairs, &catalog, &mut covered);
    // C(28,1) + C(28,2) + C(28,3) + C(28,4)
    assert_eq!(covered, 28 + 378 + 3276 + 20475);
}
