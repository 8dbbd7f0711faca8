//! Scalar abstraction shared by the exact (rational) and floating routes.

use num_rational::BigRational;
use num_traits::{Num, NumAssign, ToPrimitive};
use std::fmt::Debug;
use std::iter::Sum;
use std::ops::Neg;

/// Field-like scalar the combinatorial core is generic over.
///
/// `f32`/`f64` give the floating route; [`BigRational`] gives the exact route
/// used by every identity check. Conversions from counts are exact for the
/// rational type and rounded for floats.
pub trait Scalar:
    Num + NumAssign + Neg<Output = Self> + Clone + PartialOrd + Sum<Self> + Debug
{
    fn from_nat(v: u64) -> Self;
    fn from_count(v: u128) -> Self;
    fn from_int(v: i128) -> Self;
    fn as_f64(&self) -> f64;
}

impl Scalar for f64 {
    fn from_nat(v: u64) -> Self {
        v as f64
    }
    fn from_count(v: u128) -> Self {
        v as f64
    }
    fn from_int(v: i128) -> Self {
        v as f64
    }
    fn as_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    fn from_nat(v: u64) -> Self {
        v as f32
    }
    fn from_count(v: u128) -> Self {
        v as f32
    }
    fn from_int(v: i128) -> Self {
        v as f32
    }
    fn as_f64(&self) -> f64 {
        f64::from(*self)
    }
}

impl Scalar for BigRational {
    fn from_nat(v: u64) -> Self {
        BigRational::from_integer(v.into())
    }
    fn from_count(v: u128) -> Self {
        BigRational::from_integer(v.into())
    }
    fn from_int(v: i128) -> Self {
        BigRational::from_integer(v.into())
    }
    fn as_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}
