//! Embedding counters: closed-form fast paths, a general backtracking
//! enumerator, and a plain brute-force oracle.
//!
//! `N_H(G)` counts injective vertex maps sending pattern edges to host edges.
//! Isolated pattern vertices multiply the core count by a falling factorial
//! over the leftover host vertices.

use super::host::Host;
use super::pattern::Pattern;
use crate::combin::falling_u128;
use crate::error::{Error, Result};

/// Enumeration limits for the general counting path.
#[derive(Debug, Clone, Copy)]
pub struct CountConfig {
    pub max_pattern_core: usize,
    pub max_host_vertices: usize,
}

impl Default for CountConfig {
    fn default() -> Self {
        CountConfig {
            max_pattern_core: 8,
            max_host_vertices: 1 << 12,
        }
    }
}

fn isolated_factor(host_n: usize, pat: &Pattern) -> u128 {
    falling_u128(
        (host_n - pat.core_size()) as u64,
        pat.isolated_count() as u64,
    )
}

/// `N_H(G)` with closed-form fast paths for the edge, wedge, triangle and
/// three-edge path; general patterns fall back to backtracking enumeration.
pub fn count_embeddings<G: Host>(host: &G, pat: &Pattern) -> Result<u128> {
    count_embeddings_with(host, pat, CountConfig::default())
}

pub fn count_embeddings_with<G: Host>(host: &G, pat: &Pattern, cfg: CountConfig) -> Result<u128> {
    let n = host.n();
    if pat.vertex_count() > n {
        return Err(Error::invalid(format!(
            "pattern has {} vertices but host only {n}",
            pat.vertex_count()
        )));
    }
    let iso = isolated_factor(n, pat);
    if iso == 0 {
        return Ok(0);
    }
    Ok(core_embeddings(host, pat, cfg)? * iso)
}

fn core_embeddings<G: Host>(host: &G, pat: &Pattern, cfg: CountConfig) -> Result<u128> {
    let e = pat.edge_count();
    let core = pat.core_size();
    let w = pat.wedge_count();
    let t = pat.triangle_count();
    if e == 0 {
        return Ok(1);
    }
    // dispatch on the isomorphism signature of the core
    match (core, e, w, t) {
        (2, 1, _, _) => Ok(2 * host.edge_count() as u128),
        (3, 2, 1, 0) => {
            let mut acc: u128 = 0;
            for u in 0..host.n() {
                let d = host.degree(u) as u128;
                acc += d * d.saturating_sub(1);
            }
            Ok(acc)
        }
        (3, 3, 3, 1) => {
            let mut acc: u128 = 0;
            host.for_each_edge(|u, v| acc += host.codegree(u, v) as u128);
            Ok(2 * acc)
        }
        (4, 3, 2, 0) if is_path3(pat) => {
            let mut acc: u128 = 0;
            host.for_each_edge(|u, v| {
                let du = host.degree(u) as u128;
                let dv = host.degree(v) as u128;
                let co = host.codegree(u, v) as u128;
                acc += 2 * (du.saturating_sub(1) * dv.saturating_sub(1) - co);
            });
            Ok(acc)
        }
        _ => {
            if core > cfg.max_pattern_core {
                return Err(Error::ResourceLimit(format!(
                    "pattern core {core} exceeds enumeration cap {}",
                    cfg.max_pattern_core
                )));
            }
            if host.n() > cfg.max_host_vertices {
                return Err(Error::ResourceLimit(format!(
                    "host n={} exceeds enumeration cap {}",
                    host.n(),
                    cfg.max_host_vertices
                )));
            }
            Ok(backtrack(host, pat, &[]))
        }
    }
}

fn is_path3(pat: &Pattern) -> bool {
    let mut degs: Vec<usize> = (0..pat.vertex_count())
        .map(|u| pat.degree(u))
        .filter(|&d| d > 0)
        .collect();
    degs.sort_unstable();
    degs == [1, 1, 2, 2]
}

/// Plain enumeration over all injective core maps; intentionally free of the
/// pruning and fast paths above so it can serve as an independent oracle.
pub fn count_embeddings_brute<G: Host>(host: &G, pat: &Pattern) -> Result<u128> {
    let n = host.n();
    if pat.vertex_count() > n {
        return Err(Error::invalid("pattern larger than host"));
    }
    if pat.core_size() > 8 {
        return Err(Error::ResourceLimit(
            "brute-force oracle capped at 8 core vertices".into(),
        ));
    }
    let core: Vec<usize> = (0..pat.vertex_count())
        .filter(|&u| pat.degree(u) > 0)
        .collect();
    let mut image = vec![usize::MAX; pat.vertex_count()];
    let mut used = vec![false; n];
    let mut count: u128 = 0;
    fn rec<G: Host>(
        pos: usize,
        core: &[usize],
        pat: &Pattern,
        host: &G,
        image: &mut [usize],
        used: &mut [bool],
        count: &mut u128,
    ) {
        if pos == core.len() {
            *count += 1;
            return;
        }
        let p = core[pos];
        'cand: for cand in 0..host.n() {
            if used[cand] {
                continue;
            }
            for &q in &core[..pos] {
                if pat.adjacency_mask(p) >> q & 1 == 1 && !host.has_edge(cand, image[q]) {
                    continue 'cand;
                }
            }
            image[p] = cand;
            used[cand] = true;
            rec(pos + 1, core, pat, host, image, used, count);
            used[cand] = false;
            image[p] = usize::MAX;
        }
    }
    rec(0, &core, pat, host, &mut image, &mut used, &mut count);
    Ok(count * isolated_factor(n, pat))
}

/// Backtracking over the pattern's core order with optional pinned images.
/// `pins` is a list of `(pattern_vertex, host_vertex)` assignments.
fn backtrack<G: Host>(host: &G, pat: &Pattern, pins: &[(usize, usize)]) -> u128 {
    let order: Vec<usize> = {
        let pinned: Vec<usize> = pins.iter().map(|&(p, _)| p).collect();
        pinned
            .iter()
            .copied()
            .chain(
                pat.core_order()
                    .iter()
                    .copied()
                    .filter(|u| !pinned.contains(u)),
            )
            .collect()
    };
    let n = host.n();
    let mut image = vec![usize::MAX; pat.vertex_count()];
    let mut used = vec![false; n];
    for &(p, h) in pins {
        // pinned pattern edges between pins must already hold; caller checks
        image[p] = h;
        used[h] = true;
    }
    let mut count: u128 = 0;
    rec_backtrack(
        host,
        pat,
        &order,
        pins.len(),
        &mut image,
        &mut used,
        &mut count,
    );
    count
}

fn rec_backtrack<G: Host>(
    host: &G,
    pat: &Pattern,
    order: &[usize],
    pos: usize,
    image: &mut [usize],
    used: &mut [bool],
    count: &mut u128,
) {
    if pos == order.len() {
        *count += 1;
        return;
    }
    let p = order[pos];
    // mapped pattern neighbours constrain the candidate set
    let mut anchor = usize::MAX;
    let mut others: u64 = 0;
    let mut nb = pat.adjacency_mask(p);
    while nb != 0 {
        let q = nb.trailing_zeros() as usize;
        nb &= nb - 1;
        if image[q] != usize::MAX {
            if anchor == usize::MAX {
                anchor = image[q];
            } else {
                others |= 1 << q;
            }
        }
    }
    let try_candidate = |cand: usize, image: &mut [usize], used: &mut [bool], count: &mut u128| {
        if used[cand] {
            return;
        }
        let mut rest = others;
        while rest != 0 {
            let q = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if !host.has_edge(cand, image[q]) {
                return;
            }
        }
        image[p] = cand;
        used[cand] = true;
        rec_backtrack(host, pat, order, pos + 1, image, used, count);
        used[cand] = false;
        image[p] = usize::MAX;
    };
    if anchor != usize::MAX {
        host.for_each_neighbor(anchor, |cand| try_candidate(cand, image, used, count));
    } else {
        for cand in 0..host.n() {
            try_candidate(cand, image, used, count);
        }
    }
}

/// Embeddings of `pat` into `host + {u,w}` that use the pair `{u,w}`:
/// the count gained when `{u,w}` is inserted. Requires `{u,w}` absent.
pub fn embeddings_through_pair<G: Host>(
    host: &G,
    pat: &Pattern,
    u: usize,
    w: usize,
) -> Result<u128> {
    if host.has_edge(u, w) {
        return Err(Error::invalid(format!("pair ({u},{w}) already an edge")));
    }
    if pat.vertex_count() > host.n() {
        return Err(Error::invalid("pattern larger than host"));
    }
    let iso = isolated_factor(host.n(), pat);
    if iso == 0 || pat.edge_count() == 0 {
        return Ok(0);
    }
    let mut total: u128 = 0;
    for &(a, b) in pat.edges() {
        for (pa, pb) in [(a, b), (b, a)] {
            // remaining pattern edges must land in the old host, so pin and
            // count in `host` (which lacks {u,w})
            total += backtrack(host, pat, &[(pa, u), (pb, w)]);
        }
    }
    Ok(total * iso)
}
