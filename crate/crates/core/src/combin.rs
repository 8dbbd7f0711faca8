//! Falling factorials, binomial coefficients and pair indexing.

use crate::scalar::Scalar;
use crate::Int;
use num_traits::{One, Zero};

/// Falling factorial `(top)_k = top (top-1) … (top-k+1)` as a scalar.
///
/// Zero whenever `k > top` (a zero factor appears), one when `k = 0`.
pub fn falling<S: Scalar>(top: u64, k: u64) -> S {
    if k > top {
        return S::zero();
    }
    let mut acc = S::one();
    for j in 0..k {
        acc *= S::from_nat(top - j);
    }
    acc
}

/// Falling factorial over `u128`; panics on overflow in debug builds.
pub fn falling_u128(top: u64, k: u64) -> u128 {
    if k > top {
        return 0;
    }
    let mut acc: u128 = 1;
    for j in 0..k {
        acc *= (top - j) as u128;
    }
    acc
}

/// Falling factorial as a big integer, for counts beyond `u128`.
pub fn falling_int(top: u64, k: u64) -> Int {
    if k > top {
        return Int::zero();
    }
    let mut acc = Int::one();
    for j in 0..k {
        acc *= Int::from(top - j);
    }
    acc
}

/// `log (top)_k`, `-inf` when `k > top`. Float fast path for large arguments.
pub fn ln_falling(top: u64, k: u64) -> f64 {
    if k > top {
        return f64::NEG_INFINITY;
    }
    if k == 0 {
        return 0.0;
    }
    crate::numeric::ln_gamma((top + 1) as f64) - crate::numeric::ln_gamma((top - k + 1) as f64)
}

/// Exact binomial coefficient.
pub fn binomial_int(n: u64, k: u64) -> Int {
    if k > n {
        return Int::zero();
    }
    let k = k.min(n - k);
    let mut acc = Int::one();
    for j in 0..k {
        acc = acc * Int::from(n - j) / Int::from(j + 1);
    }
    acc
}

/// Number of unordered vertex pairs `n(n-1)/2`.
pub fn pair_count(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Index of the pair `{u,w}` (`u < w`) in row-major upper-triangle order.
pub fn pair_index(n: usize, u: usize, w: usize) -> usize {
    debug_assert!(u < w && w < n);
    u * n - u * (u + 1) / 2 + (w - u - 1)
}

/// Inverse of [`pair_index`].
pub fn index_pair(n: usize, mut k: usize) -> (usize, usize) {
    debug_assert!(k < pair_count(n));
    let mut u = 0;
    loop {
        let row = n - 1 - u;
        if k < row {
            return (u, u + 1 + k);
        }
        k -= row;
        u += 1;
    }
}
