use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// Coefficient domain of a computation. The two domains never mix implicitly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Int,
    Rat,
}

impl Display for Domain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Domain::Int => write!(f, "int"),
            Domain::Rat => write!(f, "rat"),
        }
    }
}

/// An exact Euclidean coefficient ring: the integers or the rationals.
///
/// Every algorithm in this crate is written once against this trait. The
/// Euclidean structure is all the Smith normal form needs; over the rationals
/// every nonzero element is a unit and division never leaves a remainder.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + Eq
    + Hash
    + Zero
    + One
    + Send
    + Sync
    + std::ops::Neg<Output = Self>
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + for<'a> std::ops::AddAssign<&'a Self>
    + for<'a> std::ops::SubAssign<&'a Self>
    + 'static
{
    const DOMAIN: Domain;

    /// Euclidean size used for pivot selection; smaller is preferred.
    fn size(&self) -> BigInt;

    /// `(q, r)` with `self = q * d + r` and `r` strictly smaller than `d`
    /// in Euclidean size (or zero).
    fn div_rem_euclid(&self, d: &Self) -> (Self, Self);

    fn is_unit(&self) -> bool;

    /// Unit `u` such that `u * self` is the canonical associate
    /// (nonnegative integer, or `1` for a nonzero rational).
    fn normalizing_unit(&self) -> Self;

    /// Exact quotient, if `d` divides `self` in this domain.
    fn exact_div(&self, d: &Self) -> Option<Self>;

    fn from_i64(v: i64) -> Self;

    /// Embed an integer. Every domain contains the integers.
    fn from_bigint(v: BigInt) -> Self;

    /// Parse a decimal string (`"12"`, `"-3"`, or `"1/2"` over the rationals).
    fn parse_decimal(s: &str) -> Option<Self>;

    /// The value as an integer, if it is one.
    fn as_integer(&self) -> Option<BigInt>;

    /// `(−1)^i`.
    fn parity_sign(i: usize) -> Self {
        if i % 2 == 0 {
            Self::one()
        } else {
            -Self::one()
        }
    }
}

impl Scalar for BigInt {
    const DOMAIN: Domain = Domain::Int;

    fn size(&self) -> BigInt {
        self.abs()
    }

    fn div_rem_euclid(&self, d: &Self) -> (Self, Self) {
        // Round to nearest so that |r| <= |d| / 2.
        let (mut q, mut r) = self.div_mod_floor(d);
        let twice: BigInt = &r * 2;
        if twice.abs() > d.abs() {
            q += 1;
            r -= d;
        }
        (q, r)
    }

    fn is_unit(&self) -> bool {
        self.abs().is_one()
    }

    fn normalizing_unit(&self) -> Self {
        if self.is_negative() {
            -BigInt::one()
        } else {
            BigInt::one()
        }
    }

    fn exact_div(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return if self.is_zero() { Some(BigInt::zero()) } else { None };
        }
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }

    fn from_bigint(v: BigInt) -> Self {
        v
    }

    fn parse_decimal(s: &str) -> Option<Self> {
        BigInt::from_str(s.trim()).ok()
    }

    fn as_integer(&self) -> Option<BigInt> {
        Some(self.clone())
    }
}

impl Scalar for BigRational {
    const DOMAIN: Domain = Domain::Rat;

    fn size(&self) -> BigInt {
        if self.is_zero() {
            BigInt::zero()
        } else {
            self.numer().abs() + self.denom().abs()
        }
    }

    fn div_rem_euclid(&self, d: &Self) -> (Self, Self) {
        (self / d, BigRational::zero())
    }

    fn is_unit(&self) -> bool {
        !self.is_zero()
    }

    fn normalizing_unit(&self) -> Self {
        if self.is_zero() {
            BigRational::one()
        } else {
            self.recip()
        }
    }

    fn exact_div(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return self.is_zero().then(BigRational::zero);
        }
        Some(self / d)
    }

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_bigint(v: BigInt) -> Self {
        BigRational::from_integer(v)
    }

    fn parse_decimal(s: &str) -> Option<Self> {
        let s = s.trim();
        match s.split_once('/') {
            Some((n, d)) => {
                let n = BigInt::from_str(n.trim()).ok()?;
                let d = BigInt::from_str(d.trim()).ok()?;
                if d.is_zero() {
                    None
                } else {
                    Some(BigRational::new(n, d))
                }
            }
            None => BigInt::from_str(s).ok().map(BigRational::from_integer),
        }
    }

    fn as_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.to_integer())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_remainder_is_small() {
        for a in -20i64..=20 {
            for d in [-7i64, -3, -2, 2, 3, 5] {
                let (q, r) = BigInt::from(a).div_rem_euclid(&BigInt::from(d));
                assert_eq!(q * d + &r, BigInt::from(a));
                assert!(r.abs() * 2 <= BigInt::from(d).abs());
            }
        }
    }

    #[test]
    fn parse_rationals() {
        let half = BigRational::parse_decimal("1/2").unwrap();
        assert_eq!(half, BigRational::new(1.into(), 2.into()));
        assert!(BigRational::parse_decimal("1/0").is_none());
        assert!(BigInt::parse_decimal("1/2").is_none());
        assert_eq!(BigInt::parse_decimal("-17"), Some(BigInt::from(-17)));
    }
}
