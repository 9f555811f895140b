//! Sparse multivariate polynomials with terms kept in graded-lex order.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde_json::{json, Value};

use super::scalar::{format_rational, parse_rational, Domain, Rational, Ring, Scalar};
use super::AlgError;

pub const MAX_VARS: usize = 8;

/// Exponent vector. The derived ordering compares total degree first and then
/// exponents lexicographically, which is graded-lex with `x_0 > x_1 > ...`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    degree: u16,
    exps: [u8; MAX_VARS],
}

impl Monomial {
    pub fn one() -> Self {
        Monomial { degree: 0, exps: [0; MAX_VARS] }
    }

    pub fn from_exps(exps: &[u32]) -> Self {
        assert!(exps.len() <= MAX_VARS, "too many variables");
        let mut m = Monomial::one();
        for (i, &e) in exps.iter().enumerate() {
            let e = u8::try_from(e).expect("exponent overflow");
            m.exps[i] = e;
            m.degree += e as u16;
        }
        m
    }

    pub fn var(i: usize) -> Self {
        let mut m = Monomial::one();
        m.exps[i] = 1;
        m.degree = 1;
        m
    }

    pub fn degree(&self) -> u32 {
        self.degree as u32
    }

    pub fn exp(&self, i: usize) -> u32 {
        self.exps[i] as u32
    }

    pub fn exps(&self, nvars: usize) -> Vec<u32> {
        self.exps[..nvars].iter().map(|&e| e as u32).collect()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut m = *self;
        for i in 0..MAX_VARS {
            m.exps[i] = m.exps[i].checked_add(other.exps[i]).expect("exponent overflow");
        }
        m.degree += other.degree;
        m
    }

    /// `self / other` if `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut m = *self;
        for i in 0..MAX_VARS {
            m.exps[i] = m.exps[i].checked_sub(other.exps[i])?;
        }
        m.degree -= other.degree;
        Some(m)
    }

    fn with_exp(&self, i: usize, e: u32) -> Monomial {
        let mut m = *self;
        m.degree = m.degree - m.exps[i] as u16 + e as u16;
        m.exps[i] = e as u8;
        m
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &self.exps)
    }
}

/// A polynomial in a fixed number of variables with nonzero coefficients only.
#[derive(Clone, PartialEq)]
pub struct MultiPoly<S> {
    nvars: usize,
    terms: BTreeMap<Monomial, S>,
}

impl<S: Scalar> MultiPoly<S> {
    pub fn zero(nvars: usize) -> Self {
        assert!(nvars <= MAX_VARS);
        MultiPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: S) -> Self {
        Self::monomial(nvars, Monomial::one(), c)
    }

    pub fn monomial(nvars: usize, m: Monomial, c: S) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// The variable `x_i` with coefficient `one`.
    pub fn var(nvars: usize, i: usize, one: S) -> Self {
        assert!(i < nvars);
        Self::monomial(nvars, Monomial::var(i), one)
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, S)>) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in descending graded-lex order (leading term first).
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &S)> {
        self.terms.iter().rev()
    }

    pub fn coeff(&self, m: &Monomial) -> Option<&S> {
        self.terms.get(m)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &S)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.leading_term().map(|(m, _)| m.degree())
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.keys();
        match it.next() {
            None => true,
            Some(first) => it.all(|m| m.degree == first.degree),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree == 0)
    }

    /// The constant coefficient (zero polynomial gives `None`).
    pub fn constant_term(&self) -> Option<&S> {
        self.terms.get(&Monomial::one())
    }

    pub fn add_term(&mut self, m: Monomial, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                existing.add_assign_ref(&c);
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    fn check_arity(&self, other: &Self) {
        assert_eq!(self.nvars, other.nvars, "polynomial arity mismatch");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_arity(other);
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_term(*m, c.clone());
        }
        r
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_arity(other);
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_term(*m, c.negate());
        }
        r
    }

    pub fn neg(&self) -> Self {
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (*m, c.negate())).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_arity(other);
        let mut r = Self::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                r.add_term(ma.mul(mb), ca.times(cb));
            }
        }
        r
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, x)| (*m, x.times(c))).collect(),
        }
    }

    pub fn mul_monomial(&self, mono: &Monomial) -> Self {
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, x)| (m.mul(mono), x.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32, one: &S) -> Self {
        let mut acc = Self::constant(self.nvars, one.clone());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Evaluation after mapping each coefficient into the target field.
    pub fn eval_with<T: Scalar>(&self, point: &[T], map: impl Fn(&S) -> T) -> T {
        assert_eq!(point.len(), self.nvars, "evaluation point arity mismatch");
        assert!(!point.is_empty(), "cannot infer target field from an empty point");
        let mut acc = point[0].zero_like();
        for (m, c) in &self.terms {
            let mut t = map(c);
            for (i, x) in point.iter().enumerate() {
                for _ in 0..m.exp(i) {
                    t = t.times(x);
                }
            }
            acc.add_assign_ref(&t);
        }
        acc
    }

    pub fn eval(&self, point: &[S]) -> S {
        self.eval_with(point, |c| c.clone())
    }

    pub fn map_coeffs<T: Scalar>(&self, map: impl Fn(&S) -> T) -> MultiPoly<T> {
        MultiPoly::from_terms(self.nvars, self.terms.iter().map(|(m, c)| (*m, map(c))))
    }

    pub fn derivative(&self, i: usize) -> Self {
        assert!(i < self.nvars);
        let mut r = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.exp(i);
            if e > 0 {
                r.add_term(m.with_exp(i, e - 1), c.times(&c.from_i64_like(e as i64)));
            }
        }
        r
    }

    pub fn gradient(&self) -> Vec<Self> {
        (0..self.nvars).map(|i| self.derivative(i)).collect()
    }

    /// Composition: substitutes `images[i]` for `x_i`. The images share an arity,
    /// which becomes the arity of the result.
    pub fn substitute(&self, images: &[MultiPoly<S>], one: &S) -> MultiPoly<S> {
        assert_eq!(images.len(), self.nvars);
        let target = images.first().map(|p| p.nvars).unwrap_or(0);
        let mut r = MultiPoly::zero(target);
        for (m, c) in &self.terms {
            let mut t = MultiPoly::constant(target, c.clone());
            for (i, img) in images.iter().enumerate() {
                if m.exp(i) > 0 {
                    t = t.mul(&img.pow(m.exp(i), one));
                }
            }
            r = r.add(&t);
        }
        r
    }

    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.exp(var)).max()
    }

    /// Coefficients with respect to `var`: entry k is the coefficient of
    /// `var^k`, a polynomial in the remaining variables (same arity, `var` absent).
    pub fn coeffs_in(&self, var: usize) -> Vec<Self> {
        let deg = match self.degree_in(var) {
            Some(d) => d as usize,
            None => return Vec::new(),
        };
        let mut out = vec![Self::zero(self.nvars); deg + 1];
        for (m, c) in &self.terms {
            let e = m.exp(var) as usize;
            out[e].add_term(m.with_exp(var, 0), c.clone());
        }
        out
    }

    /// Exact division by multivariate long division in graded-lex order.
    pub fn exact_div(&self, d: &Self) -> Option<Self> {
        self.check_arity(d);
        let (lm, lc) = d.leading_term()?;
        let lc_inv = lc.inv()?;
        let mut rem = self.clone();
        let mut quot = Self::zero(self.nvars);
        while let Some((m, c)) = rem.leading_term() {
            let qm = m.div(lm)?;
            let qc = c.times(&lc_inv);
            let step = d.mul_monomial(&qm).scale(&qc);
            rem = rem.sub(&step);
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    /// Variables that actually occur.
    pub fn support_vars(&self) -> Vec<usize> {
        (0..self.nvars).filter(|&i| self.terms.keys().any(|m| m.exp(i) > 0)).collect()
    }
}

impl<S: Scalar> Ring for MultiPoly<S> {
    fn plus(&self, other: &Self) -> Self {
        MultiPoly::add(self, other)
    }
    fn minus(&self, other: &Self) -> Self {
        MultiPoly::sub(self, other)
    }
    fn times(&self, other: &Self) -> Self {
        MultiPoly::mul(self, other)
    }
    fn negate(&self) -> Self {
        MultiPoly::neg(self)
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn zero_like(&self) -> Self {
        MultiPoly::zero(self.nvars)
    }
    fn arity(&self) -> Option<usize> {
        Some(self.nvars)
    }
    fn add_assign_ref(&mut self, other: &Self) {
        self.check_arity(other);
        for (m, c) in &other.terms {
            self.add_term(*m, c.clone());
        }
    }
}

impl<S: Scalar> Domain for MultiPoly<S> {
    fn exact_div(&self, d: &Self) -> Option<Self> {
        MultiPoly::exact_div(self, d)
    }
}

impl<'a, S: Scalar> Add for &'a MultiPoly<S> {
    type Output = MultiPoly<S>;
    fn add(self, rhs: Self) -> MultiPoly<S> {
        MultiPoly::add(self, rhs)
    }
}

impl<'a, S: Scalar> Sub for &'a MultiPoly<S> {
    type Output = MultiPoly<S>;
    fn sub(self, rhs: Self) -> MultiPoly<S> {
        MultiPoly::sub(self, rhs)
    }
}

impl<'a, S: Scalar> Mul for &'a MultiPoly<S> {
    type Output = MultiPoly<S>;
    fn mul(self, rhs: Self) -> MultiPoly<S> {
        MultiPoly::mul(self, rhs)
    }
}

impl<'a, S: Scalar> Neg for &'a MultiPoly<S> {
    type Output = MultiPoly<S>;
    fn neg(self) -> MultiPoly<S> {
        MultiPoly::neg(self)
    }
}

/// Shorthand constructors for rational polynomials.
pub type QPoly = MultiPoly<Rational>;

impl QPoly {
    pub fn q_const(nvars: usize, c: i64) -> Self {
        Self::constant(nvars, super::scalar::rat(c))
    }

    pub fn q_var(nvars: usize, i: usize) -> Self {
        Self::var(nvars, i, super::scalar::rat(1))
    }

    /// `Σ coeffs[i] x_i`.
    pub fn linear_form(coeffs: &[Rational]) -> Self {
        let n = coeffs.len();
        Self::from_terms(n, coeffs.iter().enumerate().map(|(i, c)| (Monomial::var(i), c.clone())))
    }

    /// Graded-lex term list `[[exponents], "p/q"]`, leading term first.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms()
                .map(|(m, c)| json!([m.exps(self.nvars), format_rational(c)]))
                .collect(),
        )
    }

    pub fn from_json(nvars: usize, v: &Value) -> Result<Self, AlgError> {
        let bad = |msg: &str| AlgError::Parse(format!("polynomial term list: {msg}"));
        let arr = v.as_array().ok_or_else(|| bad("expected an array"))?;
        let mut p = Self::zero(nvars);
        for t in arr {
            let pair = t.as_array().filter(|a| a.len() == 2).ok_or_else(|| bad("term must be a pair"))?;
            let exps: Vec<u32> = pair[0]
                .as_array()
                .ok_or_else(|| bad("exponents must be an array"))?
                .iter()
                .map(|e| e.as_u64().map(|x| x as u32).ok_or_else(|| bad("exponent")))
                .collect::<Result<_, _>>()?;
            if exps.len() != nvars {
                return Err(AlgError::Arity { expected: nvars, found: exps.len() });
            }
            let c = parse_rational(pair[1].as_str().ok_or_else(|| bad("coefficient must be a string"))?)?;
            p.add_term(Monomial::from_exps(&exps), c);
        }
        Ok(p)
    }

    /// Human-readable rendering with the given variable names.
    pub fn render(&self, names: &[&str]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms().enumerate() {
            let neg = num_traits::Signed::is_negative(c);
            let abs = num_traits::Signed::abs(c);
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono: Vec<String> = (0..self.nvars)
                .filter(|&i| m.exp(i) > 0)
                .map(|i| if m.exp(i) == 1 { names[i].to_string() } else { format!("{}^{}", names[i], m.exp(i)) })
                .collect();
            let one = num_traits::One::is_one(&abs);
            if mono.is_empty() {
                out.push_str(&format_rational(&abs));
            } else {
                if !one {
                    out.push_str(&format_rational(&abs));
                    out.push('*');
                }
                out.push_str(&mono.join("*"));
            }
        }
        out
    }
}

impl<S: Scalar> fmt::Debug for MultiPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ts: Vec<String> = self.terms().map(|(m, c)| format!("{c:?}*{m:?}")).collect();
        write!(f, "MultiPoly[{}]({})", self.nvars, ts.join(" + "))
    }
}
