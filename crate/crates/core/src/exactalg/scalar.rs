use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::AlgError;

/// Exact rational numbers, always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Commutative ring operations by reference.
///
/// Elements are self-describing: a prime-field element knows its modulus and a
/// tower element knows its radicands, so `zero_like` produces the additive
/// identity of the ring the receiver lives in.
pub trait Ring: Clone + PartialEq + Debug + Send + Sync {
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negate(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn zero_like(&self) -> Self;

    fn add_assign_ref(&mut self, other: &Self) {
        *self = self.plus(other);
    }

    /// Number of polynomial variables, for ring elements that are polynomials.
    fn arity(&self) -> Option<usize> {
        None
    }
}

/// A field element.
pub trait Scalar: Ring {
    fn one_like(&self) -> Self;
    fn from_i64_like(&self, n: i64) -> Self;
    fn inv(&self) -> Option<Self>;
    /// A square root inside the same field, if one exists.
    fn sqrt(&self) -> Option<Self>;
    /// 0 for fields of characteristic zero.
    fn characteristic(&self) -> u64;

    fn is_one(&self) -> bool {
        self.minus(&self.one_like()).is_zero()
    }

    fn div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|i| self.times(&i))
    }
}

/// Integral domain with exact division, as needed by fraction-free elimination.
pub trait Domain: Ring {
    /// `self / d` when the quotient exists in the ring.
    fn exact_div(&self, d: &Self) -> Option<Self>;
}

impl<S: Scalar> Domain for S {
    fn exact_div(&self, d: &Self) -> Option<Self> {
        self.div(d)
    }
}

impl Ring for Rational {
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negate(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        Rational::zero()
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
}

impl Scalar for Rational {
    fn one_like(&self) -> Self {
        Rational::one()
    }
    fn from_i64_like(&self, n: i64) -> Self {
        rat(n)
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn sqrt(&self) -> Option<Self> {
        rational_sqrt(self)
    }
    fn characteristic(&self) -> u64 {
        0
    }
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact square root of a rational, if it is a perfect square.
pub fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer();
    let d = q.denom();
    let rn = n.sqrt();
    let rd = d.sqrt();
    if &(&rn * &rn) == n && &(&rd * &rd) == d {
        Some(Rational::new(rn, rd))
    } else {
        None
    }
}

/// Formats a rational as `"p"` or `"p/q"`.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational, AlgError> {
    let s = s.trim();
    let bad = || AlgError::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Rational::from_integer(n))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_stay_reduced() {
        let q = ratio(6, -4);
        assert_eq!(q.numer(), &BigInt::from(-3));
        assert_eq!(q.denom(), &BigInt::from(2));
        assert_eq!(format_rational(&q), "-3/2");
    }

    #[test]
    fn parse_round_trip() {
        for s in ["0", "-7", "3/5", "-12/7"] {
            assert_eq!(format_rational(&parse_rational(s).unwrap()), s);
        }
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn square_roots() {
        assert_eq!(rational_sqrt(&ratio(9, 4)), Some(ratio(3, 2)));
        assert_eq!(rational_sqrt(&rat(2)), None);
        assert_eq!(rational_sqrt(&rat(-4)), None);
        assert_eq!(rational_sqrt(&rat(0)), Some(rat(0)));
    }
}
