//! Sylvester resultants and univariate gcd machinery.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::matrix::det_bareiss;
use super::poly::{Monomial, MultiPoly};
use super::scalar::{Rational, Scalar};
use super::AlgError;

/// Resultant of `f` and `g` with respect to `var`, as the determinant of the
/// Sylvester matrix whose entries are polynomials in the other variables.
pub fn resultant_elim<S: Scalar>(f: &MultiPoly<S>, g: &MultiPoly<S>, var: usize) -> Result<MultiPoly<S>, AlgError> {
    if f.is_zero() || g.is_zero() {
        return Err(AlgError::ZeroInput("resultant_elim"));
    }
    if f.nvars() != g.nvars() {
        return Err(AlgError::Arity { expected: f.nvars(), found: g.nvars() });
    }
    let a = f.coeffs_in(var);
    let b = g.coeffs_in(var);
    let (m, n) = (a.len() - 1, b.len() - 1);
    let zero = MultiPoly::zero(f.nvars());
    if m == 0 && n == 0 {
        return Ok(MultiPoly::constant(f.nvars(), one_of(f)));
    }
    if m == 0 {
        return Ok(a[0].pow(n as u32, &one_of(f)));
    }
    if n == 0 {
        return Ok(b[0].pow(m as u32, &one_of(f)));
    }
    let size = m + n;
    let mut rows = vec![vec![zero.clone(); size]; size];
    // Coefficients go highest degree first, each row shifted one column right.
    for r in 0..n {
        for (k, c) in a.iter().rev().enumerate() {
            rows[r][r + k] = c.clone();
        }
    }
    for r in 0..m {
        for (k, c) in b.iter().rev().enumerate() {
            rows[n + r][r + k] = c.clone();
        }
    }
    det_bareiss(&rows)
}

fn one_of<S: Scalar>(p: &MultiPoly<S>) -> S {
    p.terms().next().expect("nonzero").1.one_like()
}

/// Dense univariate polynomial, coefficients from the constant term up, with no
/// trailing zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct UniPoly<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> UniPoly<S> {
    pub fn new(mut coeffs: Vec<S>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    /// Reads off the coefficients of a multivariate polynomial that only
    /// involves `var`.
    pub fn from_multi(h: &MultiPoly<S>, var: usize) -> Result<Self, AlgError> {
        if h.support_vars().iter().any(|&v| v != var) {
            return Err(AlgError::Degenerate(format!("polynomial is not univariate in variable {var}")));
        }
        let mut out = Vec::new();
        for c in h.coeffs_in(var) {
            out.push(c.constant_term().cloned().unwrap_or_else(|| one_of(h).zero_like()));
        }
        Ok(UniPoly::new(out))
    }

    pub fn to_multi(&self, nvars: usize, var: usize) -> MultiPoly<S> {
        MultiPoly::from_terms(
            nvars,
            self.coeffs.iter().enumerate().map(|(k, c)| {
                let mut e = vec![0u32; nvars];
                e[var] = k as u32;
                (Monomial::from_exps(&e), c.clone())
            }),
        )
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &S) -> S {
        let mut acc = x.zero_like();
        for c in self.coeffs.iter().rev() {
            acc = acc.times(x).plus(c);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        UniPoly::new(self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c.times(&c.from_i64_like(k as i64))).collect())
    }

    pub fn monic(&self) -> Self {
        match self.coeffs.last() {
            None => self.clone(),
            Some(lc) => {
                let inv = lc.inv().expect("nonzero leading coefficient");
                UniPoly::new(self.coeffs.iter().map(|c| c.times(&inv)).collect())
            }
        }
    }

    pub fn rem(&self, d: &Self) -> Self {
        let dd = d.degree().expect("division by zero polynomial");
        let inv = d.coeffs[dd].inv().expect("nonzero leading coefficient");
        let mut r = self.coeffs.clone();
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1;
            let q = r[k].times(&inv);
            if !q.is_zero() {
                for (j, c) in d.coeffs.iter().enumerate() {
                    let idx = k - dd + j;
                    r[idx] = r[idx].minus(&q.times(c));
                }
            }
            r.pop();
        }
        UniPoly::new(r)
    }

    /// Monic greatest common divisor (zero when both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Roots in the coefficient field by exhaustive search, for prime fields.
    pub fn roots_by_search(&self, field: impl Iterator<Item = S>) -> Vec<S> {
        field.filter(|x| self.eval(x).is_zero()).collect()
    }
}

/// Whether `h` (univariate in `var`) has no repeated factor, together with
/// `gcd(h, h')` as a witness.
pub fn squarefree_univariate<S: Scalar>(h: &MultiPoly<S>, var: usize) -> Result<(bool, MultiPoly<S>), AlgError> {
    if h.is_zero() {
        return Err(AlgError::ZeroInput("squarefree_univariate"));
    }
    let u = UniPoly::from_multi(h, var)?;
    let g = u.gcd(&u.derivative());
    Ok((g.degree() == Some(0), g.to_multi(h.nvars(), var)))
}

/// Restricts a binary form in variables `(a, b)` to a random affine chart.
///
/// The substitution `a = α t + β, b = γ t + δ` uses small seeded integers with
/// `αδ − βγ ≠ 0`. A chart is accepted only when the form does not vanish at the
/// point at infinity `(α : γ)`, so the univariate image keeps the full degree and
/// its roots correspond one-to-one to the roots of the form.
pub fn dehomogenize_binary(
    form: &MultiPoly<Rational>,
    a: usize,
    b: usize,
    seed: u64,
) -> Result<UniPoly<Rational>, AlgError> {
    if form.is_zero() {
        return Err(AlgError::ZeroInput("dehomogenize_binary"));
    }
    if form.support_vars().iter().any(|&v| v != a && v != b) || !form.is_homogeneous() {
        return Err(AlgError::Degenerate("not a binary form".into()));
    }
    let deg = form.total_degree().unwrap_or(0) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..5 {
        let [al, be, ga, de]: [i64; 4] = std::array::from_fn(|_| rng.gen_range(-9..=9));
        if al * de - be * ga == 0 {
            continue;
        }
        let n = form.nvars();
        let t = MultiPoly::var(n, a, super::scalar::rat(1));
        let lin = |x: i64, y: i64| t.scale(&super::scalar::rat(x)).add(&MultiPoly::constant(n, super::scalar::rat(y)));
        let mut images: Vec<MultiPoly<Rational>> = (0..n).map(|_| MultiPoly::zero(n)).collect();
        images[a] = lin(al, be);
        images[b] = lin(ga, de);
        let h = form.substitute(&images, &super::scalar::rat(1));
        let u = UniPoly::from_multi(&h, a)?;
        if u.degree() == Some(deg) {
            return Ok(u);
        }
    }
    Err(AlgError::Degenerate("no affine chart found after 5 attempts".into()))
}
