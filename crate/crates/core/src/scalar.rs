//! Scalar traits shared by the polynomial and matrix code.
//!
//! The generic containers only need ring operations (plus division for the
//! elimination routines), so they are written against these traits and
//! instantiated with exact rationals everywhere the library makes decisions.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Num, One, Signed, Zero};

/// A commutative ring scalar.
pub trait Scalar: Num + Clone + Debug + Neg<Output = Self> {}

impl<T> Scalar for T where T: Num + Clone + Debug + Neg<Output = T> {}

/// A scalar whose `/` is exact field division.
pub trait Field: Scalar {}

impl<T: Clone + Integer + Debug + Signed> Field for Ratio<T> {}
impl Field for f32 {}
impl Field for f64 {}

/// Arbitrary-precision exact rational.
pub type Rat = Ratio<BigInt>;

/// Arbitrary-precision integer.
pub type Int = BigInt;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn is_integral(x: &Rat) -> bool {
    x.denom().is_one()
}

/// Least common multiple of the denominators of `xs` (1 for an empty slice).
pub fn common_denominator<'a, I>(xs: I) -> Int
where
    I: IntoIterator<Item = &'a Rat>,
{
    xs.into_iter().fold(Int::one(), |acc, x| acc.lcm(x.denom()))
}

/// Exact power by repeated squaring for any ring scalar.
pub fn pow<T: Scalar>(base: &T, mut exp: u64) -> T {
    let mut acc = T::one();
    let mut b = base.clone();
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b.clone();
        }
        exp >>= 1;
        if exp > 0 {
            b = b.clone() * b;
        }
    }
    acc
}

pub fn is_zero_slice<T: Scalar>(xs: &[T]) -> bool {
    xs.iter().all(Zero::is_zero)
}
