use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::scalar::{Rational, Ring, Scalar};

/// Element of the prime field F_p, carrying its modulus.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    v: u64,
    p: u64,
}

impl Fp {
    pub fn new(v: i64, p: u64) -> Self {
        let r = v.rem_euclid(p as i64) as u64;
        Fp { v: r, p }
    }

    pub fn zero(p: u64) -> Self {
        Fp { v: 0, p }
    }

    pub fn one(p: u64) -> Self {
        Fp { v: 1 % p, p }
    }

    pub fn value(self) -> u64 {
        self.v
    }

    pub fn modulus(self) -> u64 {
        self.p
    }

    /// Reduction of a rational; `None` when p divides the denominator.
    pub fn from_rational(q: &Rational, p: u64) -> Option<Self> {
        let pb = BigInt::from(p);
        let n = ((q.numer() % &pb) + &pb) % &pb;
        let d = ((q.denom() % &pb) + &pb) % &pb;
        if d.is_zero() {
            return None;
        }
        let n = Fp { v: n.to_u64()?, p };
        let d = Fp { v: d.to_u64()?, p };
        d.inv().map(|di| n.times(&di))
    }

    pub fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = Fp::one(self.p);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.times(&base);
            }
            base = base.times(&base);
            e >>= 1;
        }
        acc
    }

    fn check(self, other: Self) {
        debug_assert_eq!(self.p, other.p, "mixed prime fields");
    }

    /// Tonelli-Shanks square root.
    fn tonelli(self) -> Option<Self> {
        let p = self.p;
        if self.v == 0 {
            return Some(self);
        }
        if p == 2 {
            return Some(self);
        }
        if self.pow((p - 1) / 2).v != 1 {
            return None;
        }
        let mut q = p - 1;
        let mut s = 0;
        while q % 2 == 0 {
            q /= 2;
            s += 1;
        }
        let mut z = Fp::new(2, p);
        while z.pow((p - 1) / 2).v == 1 {
            z = Fp::new(z.v as i64 + 1, p);
        }
        let mut m = s;
        let mut c = z.pow(q);
        let mut t = self.pow(q);
        let mut r = self.pow(q.div_ceil(2));
        while t.v != 1 {
            let mut i = 0;
            let mut t2 = t;
            while t2.v != 1 {
                t2 = t2.times(&t2);
                i += 1;
            }
            let b = c.pow(1 << (m - i - 1));
            m = i;
            c = b.times(&b);
            t = t.times(&c);
            r = r.times(&b);
        }
        Some(r)
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.v, self.p)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}

impl Ring for Fp {
    fn plus(&self, other: &Self) -> Self {
        self.check(*other);
        let s = self.v + other.v;
        Fp { v: if s >= self.p { s - self.p } else { s }, p: self.p }
    }
    fn minus(&self, other: &Self) -> Self {
        self.check(*other);
        let v = if self.v >= other.v { self.v - other.v } else { self.v + self.p - other.v };
        Fp { v, p: self.p }
    }
    fn times(&self, other: &Self) -> Self {
        self.check(*other);
        Fp { v: ((self.v as u128 * other.v as u128) % self.p as u128) as u64, p: self.p }
    }
    fn negate(&self) -> Self {
        Fp { v: if self.v == 0 { 0 } else { self.p - self.v }, p: self.p }
    }
    fn is_zero(&self) -> bool {
        self.v == 0
    }
    fn zero_like(&self) -> Self {
        Fp::zero(self.p)
    }
}

impl Scalar for Fp {
    fn one_like(&self) -> Self {
        Fp::one(self.p)
    }
    fn from_i64_like(&self, n: i64) -> Self {
        Fp::new(n, self.p)
    }
    fn inv(&self) -> Option<Self> {
        if self.v == 0 {
            None
        } else {
            Some(self.pow(self.p - 2))
        }
    }
    fn sqrt(&self) -> Option<Self> {
        self.tonelli()
    }
    fn characteristic(&self) -> u64 {
        self.p
    }
}

/// Trial-division primality test, adequate for the moduli used in scans.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::scalar::ratio;

    #[test]
    fn field_axioms_small_prime() {
        let p = 17;
        for a in 1..p {
            let x = Fp::new(a as i64, p);
            assert!(x.times(&x.inv().unwrap()).is_one());
        }
        assert_eq!(Fp::new(-1, p).value(), 16);
    }

    #[test]
    fn rational_reduction() {
        let x = Fp::from_rational(&ratio(1, 2), 101).unwrap();
        assert_eq!(x.times(&Fp::new(2, 101)).value(), 1);
        assert!(Fp::from_rational(&ratio(1, 101), 101).is_none());
    }

    #[test]
    fn square_roots_match_brute_force() {
        for p in [17u64, 101, 103, 107] {
            for a in 0..p {
                let x = Fp::new(a as i64, p);
                let brute = (0..p).any(|r| (r * r) % p == a);
                match x.sqrt() {
                    Some(r) => assert_eq!(r.times(&r), x),
                    None => assert!(!brute, "missed root of {a} mod {p}"),
                }
            }
        }
    }

    #[test]
    fn primality() {
        assert!(is_prime(101) && is_prime(103) && is_prime(107) && is_prime(17));
        assert!(!is_prime(1) && !is_prime(91) && !is_prime(105));
    }
}
