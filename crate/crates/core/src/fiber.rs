//! Fibers of the Clifford algebras at points of ℙW, as finite-dimensional
//! algebras over ℚ, F_p or a biquadratic extension of ℚ, and their
//! certification as (products of) matrix algebras.

use std::fmt;
use std::sync::Arc;

use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clifford::{central_odd_in, CliffordAlgebra, CliffordElement, Variant};
use crate::exactalg::matrix::{sparse_from_dense, SparseVec};
use crate::exactalg::scalar::rational_sqrt;
use crate::exactalg::{rat, Echelon, Fp, Matrix, QPoly, Rational, Ring, Scalar};
use crate::geometry::{corank3, curve_points};
use crate::pencil::{InvariantPencil, Side};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FiberError {
    #[error("the point u must be nonzero")]
    ZeroPoint,
    #[error("y² does not equal f(u)")]
    BadCharacter,
    #[error("{0}")]
    Unsupported(String),
    #[error("f(u) = 0, the point lies on the determinant curve")]
    OnCurve,
    #[error("f(u) ≠ 0, the point is not on the determinant curve")]
    OffCurve,
    #[error("corank {0} at u; expected corank 1")]
    Corank(usize),
    #[error("structure constants are not associative at ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("idempotent laws fail")]
    Idempotents,
    #[error("clifford: {0}")]
    Clifford(#[from] crate::clifford::CliffordError),
}

/// `ℚ ⊂ ℚ(√a) ⊂ ℚ(√a, √b)`, with radicands that are not squares at their level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldTower {
    radicands: Vec<Rational>,
}

impl FieldTower {
    /// Adjoins the square roots of `rads` in order, skipping any that already
    /// has a root in the field built so far. At most two survive.
    pub fn new(rads: &[Rational]) -> Arc<Self> {
        let mut t = FieldTower { radicands: Vec::new() };
        for r in rads {
            if t.rational_sqrt_coords(r).is_none() {
                t.radicands.push(r.clone());
            }
        }
        assert!(t.radicands.len() <= 2, "tower level is capped at 2");
        Arc::new(t)
    }

    pub fn rationals() -> Arc<Self> {
        Arc::new(FieldTower { radicands: Vec::new() })
    }

    pub fn level(&self) -> usize {
        self.radicands.len()
    }

    pub fn degree(&self) -> usize {
        1 << self.level()
    }

    pub fn radicands(&self) -> &[Rational] {
        &self.radicands
    }

    fn product_over(&self, s: usize) -> Rational {
        let mut acc = rat(1);
        for (i, r) in self.radicands.iter().enumerate() {
            if s >> i & 1 == 1 {
                acc *= r;
            }
        }
        acc
    }

    /// Coordinates of `√q` when it lies in the field: `√q = (t / r_S) √r_S`
    /// whenever `q · r_S = t²` for a product `r_S` of radicands.
    fn rational_sqrt_coords(&self, q: &Rational) -> Option<Vec<Rational>> {
        if Zero::is_zero(q) {
            return Some(vec![rat(0); self.degree()]);
        }
        for s in 0..self.degree() {
            let rs = self.product_over(s);
            if let Some(t) = rational_sqrt(&(q * &rs)) {
                let mut c = vec![rat(0); self.degree()];
                c[s] = t / rs;
                return Some(c);
            }
        }
        None
    }

    pub fn label(&self) -> String {
        if self.radicands.is_empty() {
            return "Q".into();
        }
        let parts: Vec<String> = self.radicands.iter().map(|r| format!("sqrt {r}")).collect();
        format!("Q({})", parts.join(", "))
    }
}

/// Element of a [`FieldTower`], in the basis `√r_S` over subsets `S` of radicands.
#[derive(Clone)]
pub struct TowerElem {
    tower: Arc<FieldTower>,
    c: Vec<Rational>,
}

impl PartialEq for TowerElem {
    fn eq(&self, o: &Self) -> bool {
        self.c == o.c && (Arc::ptr_eq(&self.tower, &o.tower) || self.tower == o.tower)
    }
}

impl fmt::Debug for TowerElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.c.iter().map(|x| x.to_string()).collect();
        write!(f, "[{}] in {}", parts.join(", "), self.tower.label())
    }
}

impl TowerElem {
    pub fn from_rational(tower: &Arc<FieldTower>, q: Rational) -> Self {
        let mut c = vec![rat(0); tower.degree()];
        c[0] = q;
        TowerElem { tower: tower.clone(), c }
    }

    /// `√q`, if it lies in the tower.
    pub fn sqrt_rational(tower: &Arc<FieldTower>, q: &Rational) -> Option<Self> {
        tower.rational_sqrt_coords(q).map(|c| TowerElem { tower: tower.clone(), c })
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    pub fn coords(&self) -> &[Rational] {
        &self.c
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        if self.c[1..].iter().all(Zero::is_zero) {
            Some(&self.c[0])
        } else {
            None
        }
    }

    fn with(&self, c: Vec<Rational>) -> Self {
        TowerElem { tower: self.tower.clone(), c }
    }
}

impl Ring for TowerElem {
    fn plus(&self, o: &Self) -> Self {
        self.with(self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect())
    }
    fn minus(&self, o: &Self) -> Self {
        self.with(self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect())
    }
    fn times(&self, o: &Self) -> Self {
        let n = self.c.len();
        if n == 1 {
            return self.with(vec![&self.c[0] * &o.c[0]]);
        }
        let mut out = vec![rat(0); n];
        for s in 0..n {
            if Zero::is_zero(&self.c[s]) {
                continue;
            }
            for t in 0..n {
                if Zero::is_zero(&o.c[t]) {
                    continue;
                }
                let k = self.tower.product_over(s & t);
                out[s ^ t] += &self.c[s] * &o.c[t] * k;
            }
        }
        self.with(out)
    }
    fn negate(&self) -> Self {
        self.with(self.c.iter().map(|a| -a).collect())
    }
    fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }
    fn zero_like(&self) -> Self {
        self.with(vec![rat(0); self.c.len()])
    }
    fn add_assign_ref(&mut self, o: &Self) {
        for (a, b) in self.c.iter_mut().zip(&o.c) {
            *a += b;
        }
    }
}

impl Scalar for TowerElem {
    fn one_like(&self) -> Self {
        TowerElem::from_rational(&self.tower, rat(1))
    }
    fn from_i64_like(&self, n: i64) -> Self {
        TowerElem::from_rational(&self.tower, rat(n))
    }
    fn inv(&self) -> Option<Self> {
        if Ring::is_zero(self) {
            return None;
        }
        let n = self.c.len();
        if n == 1 {
            return Some(self.with(vec![self.c[0].recip()]));
        }
        // Solve x·z = 1 via the matrix of multiplication by x.
        let cols: Vec<Vec<Rational>> = (0..n)
            .map(|t| {
                let mut e = vec![rat(0); n];
                e[t] = rat(1);
                self.times(&self.with(e)).c
            })
            .collect();
        let rows: Vec<Vec<Rational>> = (0..n).map(|i| (0..n).map(|t| cols[t][i].clone()).collect()).collect();
        let mut rhs = vec![rat(0); n];
        rhs[0] = rat(1);
        Matrix::from_rows(rows).solve(&rhs).map(|z| self.with(z))
    }
    /// Square roots of elements that are rational; other elements report `None`.
    fn sqrt(&self) -> Option<Self> {
        self.as_rational().and_then(|q| TowerElem::sqrt_rational(&self.tower, q))
    }
    fn characteristic(&self) -> u64 {
        0
    }
}

/// Fields into which the rationals map.
pub trait Field: Scalar {
    /// Image of `q`, in the same field as `self`.
    fn embed(&self, q: &Rational) -> Self;
}

impl Field for Rational {
    fn embed(&self, q: &Rational) -> Self {
        q.clone()
    }
}

impl Field for Fp {
    fn embed(&self, q: &Rational) -> Self {
        Fp::from_rational(q, self.modulus()).expect("denominator prime to p")
    }
}

impl Field for TowerElem {
    fn embed(&self, q: &Rational) -> Self {
        TowerElem::from_rational(&self.tower, q.clone())
    }
}

/// Finite-dimensional unital associative algebra given by structure constants:
/// `e_i e_j = Σ_k mult[i][j][k] e_k`.
#[derive(Clone, Debug)]
pub struct FinAlg<S> {
    dim: usize,
    mult: Vec<Vec<SparseVec<S>>>,
    unit: Vec<S>,
    zero: S,
}

impl<S: Scalar> FinAlg<S> {
    /// Builds the algebra, checking the unit and, for dimension ≤ 16, every
    /// associativity triple.
    pub fn new(mult: Vec<Vec<SparseVec<S>>>, unit: Vec<S>, zero: S) -> Result<Self, FiberError> {
        let a = FinAlg { dim: unit.len(), mult, unit, zero };
        if a.dim <= 16 {
            a.check_associative()?;
        }
        Ok(a)
    }

    /// For algebras derived from one already known to be associative
    /// (quotients, corners, tensor products, specialisations).
    fn derived(mult: Vec<Vec<SparseVec<S>>>, unit: Vec<S>, zero: S) -> Self {
        FinAlg { dim: unit.len(), mult, unit, zero }
    }

    pub fn check_associative(&self) -> Result<(), FiberError> {
        for i in 0..self.dim {
            for j in 0..self.dim {
                let ij = self.dense(&self.mult[i][j]);
                for k in 0..self.dim {
                    let left = self.mul(&ij, &self.basis(k));
                    let right = self.mul(&self.basis(i), &self.dense(&self.mult[j][k]));
                    if left != right {
                        return Err(FiberError::NotAssociative(i, j, k));
                    }
                }
            }
        }
        let u = &self.unit;
        for i in 0..self.dim {
            let b = self.basis(i);
            if self.mul(u, &b) != b || self.mul(&b, u) != b {
                return Err(FiberError::Unsupported("unit element is not a two-sided identity".into()));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn unit(&self) -> &[S] {
        &self.unit
    }

    pub fn zero_scalar(&self) -> &S {
        &self.zero
    }

    pub fn basis(&self, i: usize) -> Vec<S> {
        let mut v = vec![self.zero.clone(); self.dim];
        v[i] = self.zero.one_like();
        v
    }

    fn dense(&self, v: &SparseVec<S>) -> Vec<S> {
        let mut out = vec![self.zero.clone(); self.dim];
        for (i, x) in v {
            out[*i] = x.clone();
        }
        out
    }

    pub fn mul(&self, x: &[S], y: &[S]) -> Vec<S> {
        let mut out = vec![self.zero.clone(); self.dim];
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let ab = a.times(b);
                for (k, c) in &self.mult[i][j] {
                    out[*k].add_assign_ref(&ab.times(c));
                }
            }
        }
        out
    }

    pub fn add(&self, x: &[S], y: &[S]) -> Vec<S> {
        x.iter().zip(y).map(|(a, b)| a.plus(b)).collect()
    }

    pub fn sub(&self, x: &[S], y: &[S]) -> Vec<S> {
        x.iter().zip(y).map(|(a, b)| a.minus(b)).collect()
    }

    pub fn scale(&self, c: &S, x: &[S]) -> Vec<S> {
        x.iter().map(|a| c.times(a)).collect()
    }

    pub fn is_central(&self, z: &[S]) -> bool {
        (0..self.dim).all(|i| {
            let b = self.basis(i);
            self.mul(z, &b) == self.mul(&b, z)
        })
    }

    /// Dimension of the centre.
    pub fn center_dim(&self) -> usize {
        self.dim - self.center_system().rank()
    }

    fn center_system(&self) -> Echelon<S> {
        let mut e = Echelon::new(self.dim);
        for j in 0..self.dim {
            for k in 0..self.dim {
                let row: Vec<S> = (0..self.dim).map(|i| self.coeff(i, j, k).minus(&self.coeff(j, i, k))).collect();
                e.insert(sparse_from_dense(&row));
            }
        }
        e
    }

    pub fn center_basis(&self) -> Vec<Vec<S>> {
        self.center_system().kernel(&self.zero)
    }

    fn coeff(&self, i: usize, j: usize, k: usize) -> S {
        self.mult[i][j].iter().find(|(c, _)| *c == k).map(|(_, x)| x.clone()).unwrap_or_else(|| self.zero.clone())
    }

    /// Kernel dimension of the trace form `(a, b) ↦ Tr(L_a L_b)`. Since
    /// `L_a L_b = L_{ab}`, the form is `Σ_c m[a][b][c] Tr(L_c)`.
    pub fn radical_dim(&self) -> usize {
        let n = self.dim;
        let traces: Vec<S> = (0..n)
            .map(|c| {
                let mut acc = self.zero.clone();
                for l in 0..n {
                    if let Some((_, x)) = self.mult[c][l].iter().find(|(k, _)| *k == l) {
                        acc.add_assign_ref(x);
                    }
                }
                acc
            })
            .collect();
        let gram: Vec<Vec<S>> = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        let mut acc = self.zero.clone();
                        for (c, x) in &self.mult[a][b] {
                            if !traces[*c].is_zero() {
                                acc.add_assign_ref(&x.times(&traces[*c]));
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        n - Matrix::from_rows(gram).rank()
    }

    /// Quotient by the two-sided ideal generated by `gens`.
    pub fn quotient(&self, gens: &[Vec<S>]) -> Result<FinAlg<S>, FiberError> {
        let mut ideal = Echelon::new(self.dim);
        let all_central = gens.iter().all(|g| self.is_central(g));
        for g in gens {
            for i in 0..self.dim {
                let left = self.mul(&self.basis(i), g);
                if all_central {
                    ideal.insert(sparse_from_dense(&left));
                } else {
                    for j in 0..self.dim {
                        ideal.insert(sparse_from_dense(&self.mul(&left, &self.basis(j))));
                    }
                }
            }
        }
        let keep: Vec<usize> = (0..self.dim).filter(|&c| !ideal.is_pivot(c)).collect();
        let project = |v: Vec<S>| -> Vec<S> {
            let r = self.dense(&ideal.reduce(sparse_from_dense(&v)));
            keep.iter().map(|&c| r[c].clone()).collect()
        };
        let mult = keep
            .iter()
            .map(|&i| keep.iter().map(|&j| sparse_from_dense(&project(self.dense(&self.mult[i][j])))).collect())
            .collect();
        Ok(FinAlg::derived(mult, project(self.unit.clone()), self.zero.clone()))
    }

    /// `e A e` for an idempotent `e`, with `e` as unit.
    pub fn corner(&self, e: &[S]) -> Result<FinAlg<S>, FiberError> {
        let mut span = Echelon::new(self.dim);
        for i in 0..self.dim {
            span.insert(sparse_from_dense(&self.mul(&self.mul(e, &self.basis(i)), e)));
        }
        let basis = reduced_rows(&span);
        let coords = |v: &[S]| -> Vec<S> { basis.iter().map(|(p, _)| v[*p].clone()).collect() };
        let dense_basis: Vec<Vec<S>> = basis.iter().map(|(_, r)| self.dense(r)).collect();
        let mult = dense_basis
            .iter()
            .map(|a| dense_basis.iter().map(|b| sparse_from_dense(&coords(&self.mul(a, b)))).collect())
            .collect();
        Ok(FinAlg::derived(mult, coords(e), self.zero.clone()))
    }

    pub fn tensor(&self, o: &FinAlg<S>) -> Result<FinAlg<S>, FiberError> {
        let (n, m) = (self.dim, o.dim);
        let mut mult = vec![vec![Vec::new(); n * m]; n * m];
        for i1 in 0..n {
            for j1 in 0..m {
                for i2 in 0..n {
                    for j2 in 0..m {
                        let mut out = Vec::new();
                        for (k1, a) in &self.mult[i1][i2] {
                            for (k2, b) in &o.mult[j1][j2] {
                                out.push((k1 * m + k2, a.times(b)));
                            }
                        }
                        out.sort_by_key(|(k, _)| *k);
                        mult[i1 * m + j1][i2 * m + j2] = out;
                    }
                }
            }
        }
        let mut unit = vec![self.zero.clone(); n * m];
        for (i, a) in self.unit.iter().enumerate() {
            for (j, b) in o.unit.iter().enumerate() {
                unit[i * m + j] = a.times(b);
            }
        }
        Ok(FinAlg::derived(mult, unit, self.zero.clone()))
    }

    /// `M_n` with matrix units `E_ab` at index `a·n + b`.
    pub fn matrix_algebra(n: usize, like: &S) -> Self {
        let one = like.one_like();
        let mut mult = vec![vec![Vec::new(); n * n]; n * n];
        for a in 0..n {
            for b in 0..n {
                for d in 0..n {
                    mult[a * n + b][b * n + d] = vec![(a * n + d, one.clone())];
                }
            }
        }
        let mut unit = vec![like.zero_like(); n * n];
        for a in 0..n {
            unit[a * n + a] = one.clone();
        }
        FinAlg::new(mult, unit, like.zero_like()).expect("matrix units are associative")
    }

    /// `k[x]/(x^n − Σ c_i x^i)` from the coefficients `c_0..c_{n-1}`.
    pub fn monogenic(tail: &[S]) -> Self {
        let n = tail.len();
        let zero = tail[0].zero_like();
        let one = zero.one_like();
        // x^k for k < 2n − 1 in the basis 1, x, ..., x^{n−1}.
        let mut powers: Vec<Vec<S>> = (0..n)
            .map(|k| {
                let mut v = vec![zero.clone(); n];
                v[k] = one.clone();
                v
            })
            .collect();
        for k in n..2 * n - 1 {
            let prev = &powers[k - 1];
            let mut v = vec![zero.clone(); n];
            for i in 0..n - 1 {
                v[i + 1] = prev[i].clone();
            }
            for (i, c) in tail.iter().enumerate() {
                v[i].add_assign_ref(&c.times(&prev[n - 1]));
            }
            powers.push(v);
        }
        let mult = (0..n).map(|i| (0..n).map(|j| sparse_from_dense(&powers[i + j])).collect()).collect();
        FinAlg::new(mult, powers[0].clone(), zero).expect("commutative")
    }
}

/// Echelon rows with every pivot column cleared in the other rows, sorted by
/// pivot. A vector in the span equals `Σ v[pivot] · row`.
fn reduced_rows<S: Scalar>(e: &Echelon<S>) -> Vec<(usize, SparseVec<S>)> {
    let mut rows: Vec<(usize, SparseVec<S>)> = e.rows().map(|r| (r[0].0, r.clone())).collect();
    rows.sort_by_key(|(p, _)| *p);
    for k in (0..rows.len()).rev() {
        let (pk, rk) = rows[k].clone();
        for row in rows.iter_mut().take(k) {
            if let Some((_, x)) = row.1.iter().find(|(c, _)| *c == pk) {
                let x = x.negate();
                row.1 = crate::exactalg::matrix::sparse_axpy(&row.1, &x, &rk);
            }
        }
    }
    rows
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub enum Verdict {
    MatrixAlgebra(usize),
    ProductOfTwo(usize),
    Fails(String),
}

impl Verdict {
    pub fn label(&self) -> String {
        match self {
            Verdict::MatrixAlgebra(n) => format!("M{n}"),
            Verdict::ProductOfTwo(n) => format!("M{n}xM{n}"),
            Verdict::Fails(r) => format!("fail:{r}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct AzumayaCert {
    pub dim: usize,
    pub center_dim: usize,
    pub radical_dim: usize,
    pub verdict: Verdict,
}

fn isqrt_exact(n: usize) -> Option<usize> {
    let r = (n as f64).sqrt().round() as usize;
    (r * r == n).then_some(r)
}

/// Central simple of square dimension (certified over the algebraic closure),
/// or a product of two such algebras split by a central idempotent.
pub fn certify<S: Scalar>(a: &FinAlg<S>) -> AzumayaCert {
    let center_dim = a.center_dim();
    let radical_dim = a.radical_dim();
    let verdict = match (center_dim, radical_dim) {
        (_, r) if r > 0 => Verdict::Fails(format!("radical of dimension {r}")),
        (1, 0) => match isqrt_exact(a.dim) {
            Some(n) => Verdict::MatrixAlgebra(n),
            None => Verdict::Fails(format!("dimension {} is not a square", a.dim)),
        },
        (2, 0) => split_by_center(a),
        (c, _) => Verdict::Fails(format!("centre of dimension {c}")),
    };
    AzumayaCert { dim: a.dim, center_dim, radical_dim, verdict }
}

/// For a two-dimensional semisimple centre `k[z]/(z² − αz − β)`, splits along
/// the idempotent built from the roots of the quadratic when they lie in the field.
fn split_by_center<S: Scalar>(a: &FinAlg<S>) -> Verdict {
    let unit = a.unit().to_vec();
    let Some(z) = a
        .center_basis()
        .into_iter()
        .find(|v| Matrix::from_rows(vec![v.clone(), unit.clone()]).rank() == 2)
    else {
        return Verdict::Fails("centre has no element independent of 1".into());
    };
    let z2 = a.mul(&z, &z);
    let cols = Matrix::from_rows((0..a.dim()).map(|i| vec![z[i].clone(), unit[i].clone()]).collect());
    let Some(ab) = cols.solve(&z2) else {
        return Verdict::Fails("z² is not in the centre span".into());
    };
    let (alpha, beta) = (&ab[0], &ab[1]);
    let four = alpha.from_i64_like(4);
    let disc = alpha.times(alpha).plus(&four.times(beta));
    let Some(s) = disc.sqrt() else {
        return Verdict::Fails("centre is a quadratic field extension".into());
    };
    let two_inv = alpha.from_i64_like(2).inv().expect("odd characteristic");
    let r1 = alpha.plus(&s).times(&two_inv);
    let r2 = alpha.minus(&s).times(&two_inv);
    let Some(d) = r1.minus(&r2).inv() else {
        return Verdict::Fails("centre is not reduced".into());
    };
    let e = a.scale(&d, &a.sub(&z, &a.scale(&r2, &unit)));
    let f = a.sub(&unit, &e);
    let corners = (a.corner(&e), a.corner(&f));
    match corners {
        (Ok(c1), Ok(c2)) => match (certify(&c1).verdict, certify(&c2).verdict) {
            (Verdict::MatrixAlgebra(n), Verdict::MatrixAlgebra(m)) if n == m => Verdict::ProductOfTwo(n),
            (v1, v2) => Verdict::Fails(format!("corners certify as {} and {}", v1.label(), v2.label())),
        },
        _ => Verdict::Fails("corner algebra construction failed".into()),
    }
}

/// Coordinates of a Clifford element in the fiber basis (masks of the variant in
/// increasing order), evaluated at `u`.
pub fn element_vector<S: Field>(alg: &CliffordAlgebra, e: &CliffordElement, u: &[S]) -> Vec<S> {
    let masks = alg.variant().masks();
    let like = &u[0];
    masks
        .iter()
        .map(|m| {
            let p = e.coeff(*m);
            eval_poly(&p, u, like)
        })
        .collect()
}

fn eval_poly<S: Field>(p: &QPoly, u: &[S], like: &S) -> S {
    if p.is_zero() {
        return like.zero_like();
    }
    p.eval_with(u, |c| like.embed(c))
}

/// The fiber of the whole algebra at `u`, before fixing any central character.
pub fn fiber_at<S: Field>(alg: &CliffordAlgebra, u: &[S]) -> FinAlg<S> {
    let masks = alg.variant().masks();
    let mut index = [usize::MAX; 64];
    for (i, m) in masks.iter().enumerate() {
        index[*m as usize] = i;
    }
    let like = &u[0];
    let mult: Vec<Vec<SparseVec<S>>> = masks
        .iter()
        .map(|&a| {
            masks
                .iter()
                .map(|&b| {
                    let mut out: SparseVec<S> = alg
                        .basis_product(a, b)
                        .iter()
                        .map(|(m, p)| (index[*m as usize], eval_poly(p, u, like)))
                        .filter(|(_, x)| !x.is_zero())
                        .collect();
                    out.sort_by_key(|(k, _)| *k);
                    out
                })
                .collect()
        })
        .collect();
    let mut unit = vec![like.zero_like(); masks.len()];
    unit[0] = like.one_like();
    FinAlg { dim: masks.len(), mult, unit, zero: like.zero_like() }
}

/// Values of the central characters: `y₊` and/or `y₋`.
#[derive(Clone, Debug, Default)]
pub struct Characters<S> {
    pub y_plus: Option<S>,
    pub y_minus: Option<S>,
}

/// The fiber at `u` of the given variant, with `d± − y±` divided out for each
/// character supplied.
pub fn specialize<S: Field>(
    pencil: &InvariantPencil,
    alg: &CliffordAlgebra,
    u: &[S],
    chars: &Characters<S>,
) -> Result<FinAlg<S>, FiberError> {
    if u.len() != 3 || u.iter().all(|x| x.is_zero()) {
        return Err(FiberError::ZeroPoint);
    }
    let full = fiber_at(alg, u);
    let mut gens = Vec::new();
    for (side, y) in [(Side::Plus, &chars.y_plus), (Side::Minus, &chars.y_minus)] {
        let Some(y) = y else { continue };
        let ok = match (alg.variant(), side) {
            (Variant::Ordinary, _) | (Variant::PlusOnly, Side::Plus) | (Variant::MinusOnly, Side::Minus) => true,
            _ => false,
        };
        if !ok {
            return Err(FiberError::Unsupported(format!(
                "no central character for the {} block in {:?}",
                side.label(),
                alg.variant()
            )));
        }
        let f = pencil.det_curves().get(side).clone();
        if y.times(y) != eval_poly(&f, u, &u[0]) {
            return Err(FiberError::BadCharacter);
        }
        let d = central_odd_in(&CliffordAlgebra::new(pencil, Variant::for_side(side)), pencil, side)?.d;
        let d = element_vector(alg, &d.reinterpret(alg.variant()), u);
        let g = full.sub(&d, &full.scale(y, full.unit()));
        gens.push(g);
    }
    if gens.is_empty() {
        return Ok(full);
    }
    full.quotient(&gens)
}

/// The two halves of a fiber off the curve, cut out by `e± = (1 ± d/y)/2`.
#[derive(Clone, Debug)]
pub struct FullRankSplit {
    pub tower: Arc<FieldTower>,
    pub y: TowerElem,
    pub e_plus: Vec<TowerElem>,
    pub e_minus: Vec<TowerElem>,
    pub fiber: FinAlg<TowerElem>,
    pub corners: (FinAlg<TowerElem>, FinAlg<TowerElem>),
}

pub fn split_full_rank(pencil: &InvariantPencil, side: Side, u: &[Rational]) -> Result<FullRankSplit, FiberError> {
    split_full_rank_with(pencil, side, u, &[])
}

/// As [`split_full_rank`], over a tower that also contains `√r` for each `r` in `extra`.
pub fn split_full_rank_with(
    pencil: &InvariantPencil,
    side: Side,
    u: &[Rational],
    extra: &[Rational],
) -> Result<FullRankSplit, FiberError> {
    let f = pencil.det_curves().get(side).eval(u);
    if Zero::is_zero(&f) {
        return Err(FiberError::OnCurve);
    }
    let mut rads = vec![f.clone()];
    rads.extend_from_slice(extra);
    let tower = FieldTower::new(&rads);
    let y = TowerElem::sqrt_rational(&tower, &f).expect("adjoined root");
    let ut: Vec<TowerElem> = u.iter().map(|x| TowerElem::from_rational(&tower, x.clone())).collect();
    let alg = CliffordAlgebra::new(pencil, Variant::for_side(side));
    let fiber = fiber_at(&alg, &ut);
    let d = element_vector(&alg, &central_odd_in(&alg, pencil, side)?.d, &ut);
    let half = y.from_i64_like(2).inv().expect("char 0");
    let d_over_y = fiber.scale(&y.inv().expect("y ≠ 0"), &d);
    let e_plus = fiber.scale(&half, &fiber.add(fiber.unit(), &d_over_y));
    let e_minus = fiber.scale(&half, &fiber.sub(fiber.unit(), &d_over_y));
    let zero = vec![y.zero_like(); fiber.dim()];
    let laws = fiber.mul(&e_plus, &e_plus) == e_plus
        && fiber.mul(&e_minus, &e_minus) == e_minus
        && fiber.mul(&e_plus, &e_minus) == zero
        && fiber.add(&e_plus, &e_minus) == fiber.unit();
    if !laws {
        return Err(FiberError::Idempotents);
    }
    let corners = (fiber.corner(&e_plus)?, fiber.corner(&e_minus)?);
    Ok(FullRankSplit { tower, y, e_plus, e_minus, fiber, corners })
}

/// `Cl(q_u)/⟨d⟩` at a point of the curve where `q_u` has corank 1.
pub fn corank1_quotient<S: Field>(pencil: &InvariantPencil, side: Side, u: &[S]) -> Result<FinAlg<S>, FiberError> {
    let block = pencil.block_at(side, u);
    match corank3(&block) {
        0 => return Err(FiberError::OffCurve),
        1 => {}
        c => return Err(FiberError::Corank(c)),
    }
    let alg = CliffordAlgebra::new(pencil, Variant::for_side(side));
    let chars = match side {
        Side::Plus => Characters { y_plus: Some(u[0].zero_like()), y_minus: None },
        Side::Minus => Characters { y_plus: None, y_minus: Some(u[0].zero_like()) },
    };
    specialize(pencil, &alg, u, &chars)
}

/// Rational points of `f = 0` found on random lines through pairs of integer
/// points, using the rational root test on the restricted cubic.
pub fn rational_points_on_lines(f: &QPoly, lines: usize, seed: u64) -> Vec<[Rational; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<[Rational; 3]> = Vec::new();
    for _ in 0..lines {
        let p: [i64; 3] = std::array::from_fn(|_| rng.gen_range(-6..=6));
        let q: [i64; 3] = std::array::from_fn(|_| rng.gen_range(-6..=6));
        let t = QPoly::q_var(1, 0);
        let images: Vec<QPoly> =
            (0..3).map(|i| QPoly::q_const(1, p[i]).add(&t.scale(&rat(q[i])))).collect();
        let g = f.substitute(&images, &rat(1));
        let coeffs: Vec<i128> = match (0..=3)
            .map(|k| {
                let c = g.coeff(&crate::exactalg::Monomial::from_exps(&[k])).cloned().unwrap_or_else(|| rat(0));
                if c.is_integer() {
                    c.to_integer().to_i128()
                } else {
                    None
                }
            })
            .collect::<Option<Vec<_>>>()
        {
            Some(c) => c,
            None => continue,
        };
        for root in rational_roots(&coeffs) {
            let pt: [Rational; 3] = std::array::from_fn(|i| rat(p[i]) + &root * rat(q[i]));
            if pt.iter().all(Zero::is_zero) {
                continue;
            }
            if !out.iter().any(|o| proportional(o, &pt)) {
                out.push(pt);
            }
        }
    }
    out
}

fn proportional(a: &[Rational; 3], b: &[Rational; 3]) -> bool {
    (0..3).all(|i| (0..3).all(|j| &a[i] * &b[j] == &a[j] * &b[i]))
}

fn divisors(n: i128) -> Vec<i128> {
    let n = n.abs();
    if n > 1_000_000_000_000 {
        return vec![];
    }
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            out.push(n / d);
        }
        d += 1;
    }
    out
}

/// Rational roots of `Σ c_k t^k` with integer coefficients.
fn rational_roots(c: &[i128]) -> Vec<Rational> {
    let Some(top) = c.iter().rposition(|x| *x != 0) else { return vec![] };
    let low = c.iter().position(|x| *x != 0).unwrap();
    let mut out = Vec::new();
    if low > 0 {
        out.push(rat(0));
    }
    if top == low {
        return out;
    }
    let eval = |r: &Rational| {
        let mut acc = rat(0);
        for k in (0..=top).rev() {
            acc = acc * r + Rational::from_integer(c[k].into());
        }
        acc
    };
    for n in divisors(c[low]) {
        for d in divisors(c[top]) {
            for s in [1, -1] {
                let r = Rational::new((s * n).into(), d.into());
                if !out.contains(&r) && Zero::is_zero(&eval(&r)) {
                    out.push(r);
                }
            }
        }
    }
    out
}

/// A smooth point of `E±` at which to test the corank-1 fiber.
#[derive(Clone, Debug, PartialEq)]
pub enum CurvePoint {
    Rational([Rational; 3]),
    Finite([Fp; 3]),
}

impl CurvePoint {
    pub fn label(&self) -> (Vec<String>, String) {
        match self {
            CurvePoint::Rational(u) => (u.iter().map(|x| x.to_string()).collect(), "Q".into()),
            CurvePoint::Finite(u) => {
                (u.iter().map(|x| x.value().to_string()).collect(), format!("F_{}", u[0].modulus()))
            }
        }
    }
}

/// Prime used when no rational points turn up; `p ≡ 1 (mod 4)` so that `√−1`
/// is available.
pub const FALLBACK_PRIME: u64 = 101;

/// Up to `count` corank-1 points on `E_side`: rational ones from 200 random
/// lines first, then `F_p` points to make up the number.
pub fn corank1_points(pencil: &InvariantPencil, side: Side, count: usize, seed: u64) -> Vec<CurvePoint> {
    let f = pencil.det_curves().get(side).clone();
    let mut out: Vec<CurvePoint> = rational_points_on_lines(&f, 200, seed)
        .into_iter()
        .filter(|u| corank3(&pencil.block_at(side, u)) == 1)
        .take(count)
        .map(CurvePoint::Rational)
        .collect();
    if out.len() < count {
        for pt in curve_points(pencil, side, FALLBACK_PRIME) {
            if out.len() >= count {
                break;
            }
            if corank3(&pencil.block_at(side, &pt.coords)) == 1 {
                out.push(CurvePoint::Finite(pt.coords));
            }
        }
    }
    out
}

/// Integer points with `f₊(u) f₋(u) ≠ 0`, pairwise non-proportional.
pub fn off_curve_points(pencil: &InvariantPencil, count: usize, seed: u64) -> Vec<[Rational; 3]> {
    let curves = pencil.det_curves();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<[Rational; 3]> = Vec::new();
    while out.len() < count {
        let u: [Rational; 3] = std::array::from_fn(|_| rat(rng.gen_range(-7..=7)));
        if u.iter().all(Zero::is_zero) || out.iter().any(|o| proportional(o, &u)) {
            continue;
        }
        if Zero::is_zero(&curves.f_plus.eval(&u)) || Zero::is_zero(&curves.f_minus.eval(&u)) {
            continue;
        }
        out.push(u);
    }
    out
}

/// The `Cl̃` fiber at an off-curve rational point with both characters fixed,
/// over `ℚ(√f₊(u), √f₋(u))`.
pub fn ordinary_fiber(pencil: &InvariantPencil, alg: &CliffordAlgebra, u: &[Rational]) -> Result<FinAlg<TowerElem>, FiberError> {
    let curves = pencil.det_curves();
    let (fp, fm) = (curves.f_plus.eval(u), curves.f_minus.eval(u));
    if Zero::is_zero(&fp) || Zero::is_zero(&fm) {
        return Err(FiberError::OnCurve);
    }
    let tower = FieldTower::new(&[fp.clone(), fm.clone()]);
    let ut: Vec<TowerElem> = u.iter().map(|x| TowerElem::from_rational(&tower, x.clone())).collect();
    let chars = Characters {
        y_plus: TowerElem::sqrt_rational(&tower, &fp),
        y_minus: TowerElem::sqrt_rational(&tower, &fm),
    };
    specialize(pencil, alg, &ut, &chars)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::ratio;

    #[test]
    fn tower_arithmetic() {
        let t = FieldTower::new(&[rat(2), rat(3)]);
        assert_eq!(t.level(), 2);
        let s2 = TowerElem::sqrt_rational(&t, &rat(2)).unwrap();
        let s6 = TowerElem::sqrt_rational(&t, &rat(6)).unwrap();
        assert_eq!(s2.times(&s2), TowerElem::from_rational(&t, rat(2)));
        assert_eq!(s6.times(&s6), TowerElem::from_rational(&t, rat(6)));
        assert!(TowerElem::sqrt_rational(&t, &rat(5)).is_none());
        let x = s2.plus(&s6).plus(&TowerElem::from_rational(&t, ratio(1, 3)));
        assert!(x.times(&x.inv().unwrap()).is_one());
    }

    #[test]
    fn tower_collapses_on_squares() {
        assert_eq!(FieldTower::new(&[rat(4)]).level(), 0);
        assert_eq!(FieldTower::new(&[rat(2), rat(8)]).level(), 1);
        assert_eq!(FieldTower::new(&[rat(2), rat(18)]).level(), 1);
        assert_eq!(FieldTower::new(&[rat(-1), rat(-4)]).level(), 1);
    }

    #[test]
    fn golden_matrix_algebras() {
        for n in [1, 2, 4] {
            let m = FinAlg::matrix_algebra(n, &rat(0));
            assert_eq!(certify(&m).verdict, Verdict::MatrixAlgebra(n));
        }
        let m2 = FinAlg::matrix_algebra(2, &rat(0));
        assert_eq!(m2.center_dim(), 1);
        assert_eq!(m2.radical_dim(), 0);
    }

    #[test]
    fn small_commutative_examples() {
        let dual = FinAlg::monogenic(&[rat(0), rat(0)]);
        assert_eq!(dual.radical_dim(), 1);
        let split = FinAlg::monogenic(&[rat(1), rat(0)]);
        assert_eq!(split.radical_dim(), 0);
        assert_eq!(split.center_dim(), 2);
        let cubic = FinAlg::monogenic(&[rat(2), rat(-1), rat(3)]);
        assert_eq!(cubic.center_dim(), 3);
    }

    #[test]
    fn product_of_two_matrix_algebras() {
        let m2 = FinAlg::matrix_algebra(2, &rat(0));
        let split = FinAlg::monogenic(&[rat(1), rat(0)]);
        let prod = split.tensor(&m2).unwrap();
        assert_eq!(prod.center_dim(), 2);
        assert_eq!(certify(&prod).verdict, Verdict::ProductOfTwo(2));
        let m4 = m2.tensor(&m2).unwrap();
        assert_eq!(certify(&m4).verdict, Verdict::MatrixAlgebra(4));
        assert_eq!(m4.radical_dim(), 0);
        let field = FinAlg::monogenic(&[rat(2), rat(0)]);
        assert!(matches!(certify(&field.tensor(&m2).unwrap()).verdict, Verdict::Fails(_)));
    }

    #[test]
    fn rational_root_test() {
        // (t − 1)(2t + 3)(t + 5) = 2t³ + 11t² + 2t − 15
        let mut r = rational_roots(&[-15, 2, 11, 2]);
        r.sort();
        assert_eq!(r, vec![rat(-5), ratio(-3, 2), rat(1)]);
    }

    #[test]
    fn corank_one_diagonal_form() {
        // q⁺_u = diag(u₁, u₂, u₃) at (1:1:0).
        let p = InvariantPencil::diagonal();
        let u = [rat(1), rat(1), rat(0)];
        let q = corank1_quotient(&p, Side::Plus, &u).unwrap();
        assert_eq!(q.dim(), 4);
        assert_eq!(q.radical_dim(), 0);
        assert_eq!(certify(&q).verdict, Verdict::MatrixAlgebra(2));
        let bad = [rat(1), rat(0), rat(0)];
        assert_eq!(corank1_quotient(&p, Side::Plus, &bad).unwrap_err(), FiberError::Corank(2));
    }
}
