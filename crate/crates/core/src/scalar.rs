//! Scalar abstraction shared by the counting and matrix layers.
//!
//! Distributions, local walks, and certificate matrices are all built from
//! ratios of arbitrary-precision extension counts. [`CountScalar`] captures
//! exactly that: a field-like type constructible from a `BigInt` ratio. The
//! `BigRational` impl keeps every identity exact (the oracle mode); `f64` is
//! the working scalar everywhere an eigensolve enters, via [`EigScalar`].

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Num, Signed, ToPrimitive};
use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::Neg;

/// Field scalar constructible from exact count ratios.
pub trait CountScalar:
    Clone
    + PartialEq
    + PartialOrd
    + Num
    + Signed
    + Neg<Output = Self>
    + Sum
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Value of `num / den`. `den` must be nonzero.
    fn from_count_ratio(num: &BigInt, den: &BigInt) -> Self;

    /// Value of an integer count.
    fn from_count(n: &BigInt) -> Self;

    fn from_int(n: i64) -> Self;

    /// Lossy conversion for reporting.
    fn to_f64_lossy(&self) -> f64;

    /// Whether arithmetic in this scalar is exact (no rounding).
    const EXACT: bool;
}

impl CountScalar for f64 {
    fn from_count_ratio(num: &BigInt, den: &BigInt) -> Self {
        BigRational::new(num.clone(), den.clone())
            .to_f64()
            .expect("finite ratio")
    }
    fn from_count(n: &BigInt) -> Self {
        n.to_f64().expect("finite count")
    }
    fn from_int(n: i64) -> Self {
        n as f64
    }
    fn to_f64_lossy(&self) -> f64 {
        *self
    }
    const EXACT: bool = false;
}

impl CountScalar for f32 {
    fn from_count_ratio(num: &BigInt, den: &BigInt) -> Self {
        <f64 as CountScalar>::from_count_ratio(num, den) as f32
    }
    fn from_count(n: &BigInt) -> Self {
        n.to_f64().expect("finite count") as f32
    }
    fn from_int(n: i64) -> Self {
        n as f32
    }
    fn to_f64_lossy(&self) -> f64 {
        *self as f64
    }
    const EXACT: bool = false;
}

impl CountScalar for BigRational {
    fn from_count_ratio(num: &BigInt, den: &BigInt) -> Self {
        BigRational::new(num.clone(), den.clone())
    }
    fn from_count(n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }
    fn from_int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().expect("finite rational")
    }
    const EXACT: bool = true;
}

/// Scalars supported by the dense symmetric eigensolver.
pub trait EigScalar: CountScalar + Float + FromPrimitive + nalgebra::RealField + Copy {}

impl EigScalar for f64 {}
impl EigScalar for f32 {}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn ratio_conversion_is_exact_for_small_values() {
        let num = BigInt::from(3);
        let den = BigInt::from(4);
        assert_eq!(f64::from_count_ratio(&num, &den), 0.75);
        let r = BigRational::from_count_ratio(&num, &den);
        assert_eq!(r, BigRational::new(3.into(), 4.into()));
    }

    #[test]
    fn huge_count_ratio_rounds_instead_of_overflowing() {
        let num = BigInt::from(10u8).pow(40) * 3;
        let den = BigInt::from(10u8).pow(40) * 4;
        let v = f64::from_count_ratio(&num, &den);
        assert!((v - 0.75).abs() < 1e-15);
    }
}
