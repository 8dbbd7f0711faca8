//! Shared helpers for integration tests.

use gdev_core::graph::Pattern;

/// Every isomorphism class of graphs with `1..=4` edges and no isolated
/// vertices (19 classes). Completeness is verified exhaustively in
/// `patterns_catalog.rs`.
pub fn patterns_up_to_four_edges() -> Vec<(&'static str, Pattern)> {
    let specs: [(&str, usize, &[(usize, usize)]); 19] = [
        ("k2", 2, &[(0, 1)]),
        ("wedge", 3, &[(0, 1), (1, 2)]),
        ("2k2", 4, &[(0, 1), (2, 3)]),
        ("triangle", 3, &[(0, 1), (1, 2), (0, 2)]),
        ("path3", 4, &[(0, 1), (1, 2), (2, 3)]),
        ("k13", 4, &[(0, 1), (0, 2), (0, 3)]),
        ("wedge+k2", 5, &[(0, 1), (1, 2), (3, 4)]),
        ("3k2", 6, &[(0, 1), (2, 3), (4, 5)]),
        ("c4", 4, &[(0, 1), (1, 2), (2, 3), (0, 3)]),
        ("paw", 4, &[(0, 1), (1, 2), (0, 2), (0, 3)]),
        ("k14", 5, &[(0, 1), (0, 2), (0, 3), (0, 4)]),
        ("path4", 5, &[(0, 1), (1, 2), (2, 3), (3, 4)]),
        ("chair", 5, &[(0, 1), (1, 2), (1, 3), (3, 4)]),
        ("triangle+k2", 5, &[(0, 1), (1, 2), (0, 2), (3, 4)]),
        ("path3+k2", 6, &[(0, 1), (1, 2), (2, 3), (4, 5)]),
        ("k13+k2", 6, &[(0, 1), (0, 2), (0, 3), (4, 5)]),
        ("2wedge", 6, &[(0, 1), (1, 2), (3, 4), (4, 5)]),
        ("wedge+2k2", 7, &[(0, 1), (1, 2), (3, 4), (5, 6)]),
        ("4k2", 8, &[(0, 1), (2, 3), (4, 5), (6, 7)]),
    ];
    specs
        .iter()
        .map(|&(name, v, edges)| (name, Pattern::new(v, edges).unwrap()))
        .collect()
}
