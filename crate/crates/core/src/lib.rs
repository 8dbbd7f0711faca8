//! Simulation and analytics for subgraph-count deviations in the
//! Erdős–Rényi random graph models `G(n,m)` and `G(n,p)`.
//!
//! The crate is organised around the edge-insertion process `G_0 ⊂ G_1 ⊂ … ⊂ G_N`:
//!
//! * [`graph`] — the seeded process itself, small pattern graphs, and
//!   embedding counters (fast paths plus a brute-force oracle);
//! * [`martingale`] — per-step increments, their conditional centering, the
//!   exact decomposition of the count deviation `D_H(G_m)`, and the
//!   approximants `Λ_H`, `Λ*_H`, `Λ**_H`;
//! * [`covariance`] — exact conditional second moments by candidate-edge
//!   enumeration and their deterministic surrogates;
//! * [`bounds`] — numeric evaluators for the concentration inequalities used
//!   as predictors and sanity envelopes;
//! * [`gnp`] — everything `G(n,p)`: exact binomial tails, the corrective
//!   tail series, conditioning over the edge count, moderate-deviation rates;
//! * [`montecarlo`] — seeded, parallel tail-probability estimation.
//!
//! Exact identity checks run over arbitrary-precision rationals ([`Exact`]);
//! simulations run over `f64`. Core combinatorial quantities are generic over
//! the scalar type via [`scalar::Scalar`], so both routes share one
//! definition.

pub mod bounds;
pub mod combin;
pub mod covariance;
pub mod error;
pub mod gnp;
pub mod graph;
pub mod martingale;
pub mod montecarlo;
pub mod numeric;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Arbitrary-precision rational scalar used by every exact identity check.
pub type Exact = num_rational::BigRational;

/// Big integer used for exact counts and binomial coefficients.
pub type Int = num_bigint::BigInt;
