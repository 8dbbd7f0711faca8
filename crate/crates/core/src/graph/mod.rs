//! Graphs: the random process, small patterns, counting, expectations and
//! deviations.

pub mod count;
pub mod host;
pub mod pattern;
pub mod process;

pub use count::{count_embeddings, count_embeddings_brute, embeddings_through_pair, CountConfig};
pub use host::{DenseGraph, Host};
pub use pattern::{Pattern, SubgraphLattice};
pub use process::{DegreeDiagnostics, GraphState, ProcessConfig, RawStep};

use crate::combin::{falling, ln_falling, pair_count};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::Exact;

/// Expected embedding count `L_H(m) = (n)_v (m)_e / (N)_e` in `G(n,m)`.
///
/// Exact for rational scalars; the float instantiation is a direct product
/// (see [`expected_count_f64`] for a ratio-paired form and
/// [`ln_expected_count`] for log space).
pub fn expected_count<S: Scalar>(h: &Pattern, n: u64, m: u64) -> Result<S> {
    let bign = pair_count(n as usize) as u64;
    if m > bign {
        return Err(Error::invalid(format!("m={m} exceeds N={bign}")));
    }
    let v = h.vertex_count() as u64;
    let e = h.edge_count() as u64;
    Ok(falling::<S>(n, v) * falling::<S>(m, e) / falling::<S>(bign, e))
}

/// `L_H(m)` in `f64` with the edge factors paired as `(m-j)/(N-j)` so that
/// intermediate magnitudes stay tame for large `n`.
pub fn expected_count_f64(h: &Pattern, n: u64, m: u64) -> f64 {
    let bign = pair_count(n as usize) as u64;
    let v = h.vertex_count() as u64;
    let e = h.edge_count() as u64;
    if m > bign || e > m {
        return if e > m { 0.0 } else { f64::NAN };
    }
    let mut acc = 1.0f64;
    for j in 0..v {
        acc *= (n - j) as f64;
    }
    for j in 0..e {
        acc *= (m - j) as f64 / (bign - j) as f64;
    }
    acc
}

/// `log L_H(m)`; `-inf` when `m < e`.
pub fn ln_expected_count(h: &Pattern, n: u64, m: u64) -> f64 {
    let bign = pair_count(n as usize) as u64;
    let v = h.vertex_count() as u64;
    let e = h.edge_count() as u64;
    ln_falling(n, v) + ln_falling(m, e) - ln_falling(bign, e)
}

/// Check the expectation increment identity
/// `L_H(m) - L_H(m-1) = (N-m+1)^{-1} Σ_f (L_{H\f}(m-1) - L_H(m-1))`
/// in exact rational arithmetic. Both sides also equal
/// `e (n)_v (m-1)_{e-1} / (N)_e`.
pub fn l_increment_identity_check(h: &Pattern, n: u64, m: u64) -> Result<bool> {
    let bign = pair_count(n as usize) as u64;
    if m == 0 || m > bign {
        return Err(Error::invalid(format!(
            "need 1 <= m <= N, got m={m}, N={bign}"
        )));
    }
    let lhs = expected_count::<Exact>(h, n, m)? - expected_count::<Exact>(h, n, m - 1)?;
    let l_prev = expected_count::<Exact>(h, n, m - 1)?;
    let mut sum = Exact::from_int(0);
    for k in 0..h.edge_count() {
        let sub = h.remove_edge(k)?;
        sum += expected_count::<Exact>(&sub, n, m - 1)? - l_prev.clone();
    }
    let rhs = sum / Exact::from_nat(bign - m + 1);
    let closed = Exact::from_nat(h.edge_count() as u64)
        * falling::<Exact>(n, h.vertex_count() as u64)
        * falling::<Exact>(m - 1, h.edge_count() as u64 - 1)
        / falling::<Exact>(bign, h.edge_count() as u64);
    Ok(lhs == rhs && lhs == closed)
}

/// Count deviation `D_H(G_m) = N_H(G_m) - L_H(m)` as `f64`.
///
/// The host must hold exactly `m` edges.
pub fn deviation_f64<G: Host>(host: &G, h: &Pattern, m: u64) -> Result<f64> {
    if host.edge_count() as u64 != m {
        return Err(Error::invalid(format!(
            "host has {} edges, expected m={m}",
            host.edge_count()
        )));
    }
    let count = count_embeddings(host, h)?;
    Ok(count as f64 - expected_count_f64(h, host.n() as u64, m))
}

/// Exact-rational count deviation.
pub fn deviation_exact<G: Host>(host: &G, h: &Pattern, m: u64) -> Result<Exact> {
    if host.edge_count() as u64 != m {
        return Err(Error::invalid(format!(
            "host has {} edges, expected m={m}",
            host.edge_count()
        )));
    }
    let count = count_embeddings(host, h)?;
    Ok(Exact::from_count(count) - expected_count::<Exact>(h, host.n() as u64, m)?)
}

/// Alternating complement sum `Σ_{F ⊆ E(H)} (-1)^{e(F)} D_F(G^c)`.
///
/// `complement_devs[mask]` must hold `D_F(G^c)` for the spanning subgraph
/// selected by `mask`, for every one of the `2^e` masks.
pub fn complement_deviation<S: Scalar>(h: &Pattern, complement_devs: &[S]) -> Result<S> {
    let expect = 1usize << h.edge_count();
    if complement_devs.len() != expect {
        return Err(Error::invalid(format!(
            "need {expect} lattice deviations, got {}",
            complement_devs.len()
        )));
    }
    let mut acc = S::zero();
    for (mask, dev) in complement_devs.iter().enumerate() {
        if (mask.count_ones() & 1) == 0 {
            acc += dev.clone();
        } else {
            acc -= dev.clone();
        }
    }
    Ok(acc)
}

/// Recompute both sides of the complement identity for an explicit host:
/// returns `(D_H(G), Σ (-1)^{e(F)} D_F(G^c))`, which must agree exactly.
pub fn complement_identity_sides(host: &DenseGraph, h: &Pattern) -> Result<(Exact, Exact)> {
    let m = host.edge_count() as u64;
    let direct = deviation_exact(host, h, m)?;
    let comp = host.complement();
    let mc = comp.edge_count() as u64;
    let lat = h.lattice();
    let devs: Vec<Exact> = lat
        .members()
        .iter()
        .map(|f| deviation_exact(&comp, f, mc))
        .collect::<Result<_>>()?;
    let alternating = complement_deviation(h, &devs)?;
    Ok((direct, alternating))
}

/// Unlabelled copy count `binom(G,H) = N_H(G) / N_H(H)`.
pub fn count_copies<G: Host>(host: &G, h: &Pattern) -> Result<u128> {
    Ok(count_embeddings(host, h)? / h.aut_embeddings() as u128)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamRng;
    use num_traits::{One, Zero};

    #[test]
    fn expected_triangles_small_case() {
        // n=4, m=3: enumerate all 20 three-edge graphs; 4 contain a triangle,
        // so the mean embedding count is 4*6/20 = 1.2
        let t = Pattern::triangle();
        let mut total: u128 = 0;
        let all_pairs: Vec<(usize, usize)> = (0..4)
            .flat_map(|u| ((u + 1)..4).map(move |w| (u, w)))
            .collect();
        let mut graphs = 0u32;
        for mask in 0u32..64 {
            if mask.count_ones() != 3 {
                continue;
            }
            graphs += 1;
            let edges: Vec<_> = all_pairs
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            let g = DenseGraph::from_edges(4, &edges).unwrap();
            total += count_embeddings_brute(&g, &t).unwrap();
        }
        assert_eq!(graphs, 20);
        let mean = total as f64 / graphs as f64;
        assert!((mean - 1.2).abs() < 1e-12);
        assert!((expected_count_f64(&t, 4, 3) - 1.2).abs() < 1e-12);
        assert_eq!(
            expected_count::<Exact>(&t, 4, 3).unwrap(),
            Exact::new(6.into(), 5.into())
        );
    }

    #[test]
    fn expected_count_boundary_cases() {
        let k4 = Pattern::builtin("k4").unwrap();
        // complete graph: every injective map embeds
        let n = 7u64;
        let bign = pair_count(7) as u64;
        assert_eq!(
            expected_count::<Exact>(&k4, n, bign).unwrap(),
            crate::combin::falling::<Exact>(n, 4)
        );
        // fewer edges than the pattern: zero
        assert!(expected_count::<Exact>(&k4, 7, 5).unwrap().is_zero());
        assert_eq!(expected_count_f64(&k4, 7, 5), 0.0);
    }

    #[test]
    fn ln_expected_count_agrees_with_exact() {
        let t = Pattern::triangle();
        for (n, m) in [(10u64, 20u64), (40, 100), (100, 2000)] {
            let exact = expected_count::<Exact>(&t, n, m).unwrap().as_f64().ln();
            assert!((ln_expected_count(&t, n, m) - exact).abs() < 1e-9 * exact.abs());
            let plain = expected_count_f64(&t, n, m).ln();
            assert!((plain - exact).abs() < 1e-9 * exact.abs());
        }
    }

    #[test]
    fn increment_identity_spec_cases() {
        let wedge = Pattern::wedge();
        assert!(l_increment_identity_check(&wedge, 5, 3).unwrap());
        let edge = Pattern::edge();
        for m in 1..=15 {
            assert!(l_increment_identity_check(&edge, 6, m).unwrap());
        }
        let tri = Pattern::triangle();
        for m in 1..=15 {
            assert!(l_increment_identity_check(&tri, 6, m).unwrap());
        }
    }

    #[test]
    fn deviation_examples() {
        // K2: deviation vanishes identically
        let mut st = GraphState::new(6, 9).unwrap();
        st.run_to(7).unwrap();
        assert_eq!(
            deviation_exact(&st, &Pattern::edge(), 7).unwrap(),
            Exact::zero()
        );

        // K4 minus an edge, triangles: 12 embeddings, L = 12
        let g = DenseGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]).unwrap();
        assert_eq!(
            deviation_exact(&g, &Pattern::triangle(), 5).unwrap(),
            Exact::zero()
        );

        // star K_{1,3}, wedges: count 6, mean 4.8
        let star = DenseGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let d = deviation_f64(&star, &Pattern::wedge(), 3).unwrap();
        assert!((d - 1.2).abs() < 1e-12);

        // edge-count mismatch is rejected
        assert!(deviation_f64(&star, &Pattern::wedge(), 2).is_err());
    }

    #[test]
    fn complement_identity_wedge_and_triangle_forms() {
        let mut rng = StreamRng::new(31, 0);
        for n in [5usize, 7, 9] {
            let m = pair_count(n) / 3;
            let g = DenseGraph::random_gnm(n, m, &mut rng).unwrap();
            let gc = g.complement();
            let mc = gc.edge_count() as u64;
            let m = m as u64;

            // D_wedge(G) = D_wedge(G^c)
            let dw = deviation_exact(&g, &Pattern::wedge(), m).unwrap();
            let dwc = deviation_exact(&gc, &Pattern::wedge(), mc).unwrap();
            assert_eq!(dw, dwc);

            // D_tri(G) = -D_tri(G^c) + 3 D_wedge(G^c)
            let dt = deviation_exact(&g, &Pattern::triangle(), m).unwrap();
            let dtc = deviation_exact(&gc, &Pattern::triangle(), mc).unwrap();
            assert_eq!(dt, -dtc.clone() + Exact::from_nat(3) * dwc);

            // the generic alternating sum agrees with the direct deviation
            for h in [
                Pattern::wedge(),
                Pattern::triangle(),
                Pattern::builtin("c4").unwrap(),
            ] {
                let (direct, alternating) = complement_identity_sides(&g, &h).unwrap();
                assert_eq!(direct, alternating, "pattern {:?} n={n}", h.edges());
            }
        }
    }

    #[test]
    fn complement_deviation_requires_full_lattice() {
        let t = Pattern::triangle();
        let short = vec![Exact::one(); 7];
        assert!(complement_deviation(&t, &short).is_err());
    }

    #[test]
    fn counts_monotone_along_process() {
        let mut st = GraphState::new(7, 13).unwrap();
        let c4 = Pattern::builtin("c4").unwrap();
        let mut last = 0u128;
        for _ in 0..st.pair_total() {
            st.step().unwrap();
            let now = count_embeddings(&st, &c4).unwrap();
            assert!(now >= last);
            last = now;
        }
        assert_eq!(
            last,
            count_embeddings(&DenseGraph::complete(7), &c4).unwrap()
        );
    }

    #[test]
    fn copies_of_triangle_in_k4() {
        let k4 = DenseGraph::complete(4);
        assert_eq!(count_copies(&k4, &Pattern::triangle()).unwrap(), 4);
    }

    #[test]
    fn mean_count_converges_to_expectation() {
        // law of large numbers smoke test at n=8, m=14
        let t = Pattern::triangle();
        let l = expected_count_f64(&t, 8, 14);
        let mut acc = 0.0;
        let reps = 400;
        let mut st = GraphState::new(8, 0).unwrap();
        for rep in 0..reps {
            st.reset(1000 + rep, 0);
            st.run_to(14).unwrap();
            acc += st.triangle_embeddings() as f64;
        }
        let mean = acc / reps as f64;
        // sd of the mean is about 8.5/sqrt(400) ~ 0.43
        assert!((mean - l).abs() < 2.5, "mean {mean} vs L {l}");
    }
}
