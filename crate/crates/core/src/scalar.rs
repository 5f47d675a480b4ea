//! Numeric field abstraction shared by the closed-form polynomial formulas and
//! the generator construction, so both run either in `f64` or in exact
//! rational arithmetic.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

/// Exact rational number with arbitrary precision.
pub type Rational = BigRational;

pub trait Scalar:
    Clone + Debug + PartialEq + PartialOrd + Signed + Send + Sync + 'static
{
    /// Exact conversion for rationals (every finite double is a dyadic rational).
    fn from_f64(x: f64) -> Self;
    fn from_i64(x: i64) -> Self;
    fn to_f64(&self) -> f64;
}

impl Scalar for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn from_i64(x: i64) -> Self {
        x as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for BigRational {
    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).expect("finite double")
    }
    fn from_i64(x: i64) -> Self {
        BigRational::from_integer(BigInt::from(x))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// `a / b` as an exact rational.
pub fn ratio(a: i64, b: i64) -> Rational {
    Rational::new(BigInt::from(a), BigInt::from(b))
}

/// Integer power with a possibly negative exponent.
pub fn powi<T: Scalar>(base: &T, exp: i64) -> T {
    let mut acc = T::one();
    for _ in 0..exp.unsigned_abs() {
        acc = acc * base.clone();
    }
    if exp < 0 {
        T::one() / acc
    } else {
        acc
    }
}

/// Binomial coefficient as a scalar; exact for both instances up to n = 60.
pub fn binomial<T: Scalar>(n: u64, k: u64) -> T {
    if k > n {
        return T::zero();
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    match i64::try_from(acc) {
        Ok(v) => T::from_i64(v),
        Err(_) => T::from_f64(acc as f64),
    }
}
