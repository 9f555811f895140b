//! Exact linear algebra: sparse row echelon reduction over a field, fraction-free
//! determinants over integral domains, and the 3×3 symmetric helpers.

use super::scalar::{Domain, Ring, Scalar};
use super::AlgError;

/// Sparse vector as `(column, value)` pairs sorted by column, no zeros stored.
pub type SparseVec<S> = Vec<(usize, S)>;

pub fn sparse_from_dense<S: Scalar>(v: &[S]) -> SparseVec<S> {
    v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect()
}

pub fn dense_from_sparse<S: Scalar>(v: &SparseVec<S>, len: usize, zero: &S) -> Vec<S> {
    let mut out = vec![zero.clone(); len];
    for (i, x) in v {
        out[*i] = x.clone();
    }
    out
}

/// `a + c·b` for sparse vectors.
pub fn sparse_axpy<S: Scalar>(a: &SparseVec<S>, c: &S, b: &SparseVec<S>) -> SparseVec<S> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i >= a.len() || b[j].0 < a[i].0 {
            let v = c.times(&b[j].1);
            if !v.is_zero() {
                out.push((b[j].0, v));
            }
            j += 1;
        } else {
            let v = a[i].1.plus(&c.times(&b[j].1));
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Incrementally built semi-echelon basis of a row space.
///
/// Every stored row has a leading entry 1 at its pivot column and zeros at all
/// smaller columns. A vector reduced against the basis has zeros at every pivot
/// column, which makes the reduction a canonical normal form modulo the span.
#[derive(Clone, Debug)]
pub struct Echelon<S> {
    ncols: usize,
    rows: Vec<SparseVec<S>>,
    pivot_row: Vec<Option<usize>>,
}

impl<S: Scalar> Echelon<S> {
    pub fn new(ncols: usize) -> Self {
        Echelon { ncols, rows: Vec::new(), pivot_row: vec![None; ncols] }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.pivot_row[col].is_some()
    }

    pub fn pivots(&self) -> Vec<usize> {
        (0..self.ncols).filter(|&c| self.pivot_row[c].is_some()).collect()
    }

    pub fn rows(&self) -> impl Iterator<Item = &SparseVec<S>> {
        self.rows.iter()
    }

    pub fn reduce(&self, mut v: SparseVec<S>) -> SparseVec<S> {
        loop {
            let hit = v.iter().find(|(c, _)| self.pivot_row[*c].is_some()).map(|(c, x)| (*c, x.clone()));
            match hit {
                None => return v,
                Some((c, x)) => {
                    let r = &self.rows[self.pivot_row[c].unwrap()];
                    v = sparse_axpy(&v, &x.negate(), r);
                }
            }
        }
    }

    /// Adds a row; returns `true` if it enlarged the span.
    pub fn insert(&mut self, v: SparseVec<S>) -> bool {
        let v = self.reduce(v);
        match v.first() {
            None => false,
            Some((c, lead)) => {
                let c = *c;
                let inv = lead.inv().expect("nonzero leading entry");
                let row: SparseVec<S> = v.iter().map(|(i, x)| (*i, x.times(&inv))).collect();
                self.pivot_row[c] = Some(self.rows.len());
                self.rows.push(row);
                true
            }
        }
    }

    pub fn contains(&self, v: SparseVec<S>) -> bool {
        self.reduce(v).is_empty()
    }

    /// Basis of the solution space `{x : r·x = 0 for all stored rows r}`.
    pub fn kernel(&self, zero: &S) -> Vec<Vec<S>> {
        let one = zero.one_like();
        let free: Vec<usize> = (0..self.ncols).filter(|&c| self.pivot_row[c].is_none()).collect();
        let mut pivots = self.pivots();
        pivots.reverse();
        let mut basis = Vec::with_capacity(free.len());
        for &f in &free {
            let mut x = vec![zero.clone(); self.ncols];
            x[f] = one.clone();
            for &p in &pivots {
                let row = &self.rows[self.pivot_row[p].unwrap()];
                let mut acc = zero.clone();
                for (j, a) in row.iter().skip(1) {
                    if !x[*j].is_zero() {
                        acc.add_assign_ref(&a.times(&x[*j]));
                    }
                }
                x[p] = acc.negate();
            }
            basis.push(x);
        }
        basis
    }
}

/// Dense matrix given by rows.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    rows: Vec<Vec<S>>,
    ncols: usize,
}

impl<S: Scalar> Matrix<S> {
    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged matrix");
        Matrix { rows, ncols }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.rows[i][j]
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.rows[i]
    }

    pub fn into_rows(self) -> Vec<Vec<S>> {
        self.rows
    }

    pub fn transpose(&self) -> Self {
        let rows = (0..self.ncols).map(|j| self.rows.iter().map(|r| r[j].clone()).collect()).collect();
        Matrix { rows, ncols: self.nrows() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows());
        let zero = self.rows[0][0].zero_like();
        let rows = self
            .rows
            .iter()
            .map(|r| {
                (0..other.ncols)
                    .map(|j| {
                        let mut acc = zero.clone();
                        for (k, a) in r.iter().enumerate() {
                            if !a.is_zero() {
                                acc.add_assign_ref(&a.times(&other.rows[k][j]));
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        Matrix { rows, ncols: other.ncols }
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        self.rows
            .iter()
            .map(|r| {
                let mut acc = v[0].zero_like();
                for (a, x) in r.iter().zip(v) {
                    acc.add_assign_ref(&a.times(x));
                }
                acc
            })
            .collect()
    }

    pub fn echelon(&self) -> Echelon<S> {
        let mut e = Echelon::new(self.ncols);
        for r in &self.rows {
            e.insert(sparse_from_dense(r));
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.echelon().rank()
    }

    /// Right kernel basis.
    pub fn kernel(&self) -> Vec<Vec<S>> {
        let zero = self.rows[0][0].zero_like();
        self.echelon().kernel(&zero)
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.iter().all(|x| x.is_zero()))
    }

    /// Determinant by Gaussian elimination with pivoting.
    pub fn det(&self) -> S {
        assert_eq!(self.nrows(), self.ncols, "determinant of a non-square matrix");
        let n = self.ncols;
        let mut a = self.rows.clone();
        let mut det = a[0][0].one_like();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
                return det.zero_like();
            };
            if p != col {
                a.swap(p, col);
                det = det.negate();
            }
            let piv = a[col][col].clone();
            det = det.times(&piv);
            let inv = piv.inv().unwrap();
            for r in col + 1..n {
                if a[r][col].is_zero() {
                    continue;
                }
                let f = a[r][col].times(&inv);
                for c in col..n {
                    let t = f.times(&a[col][c]);
                    a[r][c] = a[r][c].minus(&t);
                }
            }
        }
        det
    }

    /// Solves `self · x = b`, returning one solution if consistent.
    pub fn solve(&self, b: &[S]) -> Option<Vec<S>> {
        let n = self.ncols;
        let zero = b[0].zero_like();
        let mut e = Echelon::new(n + 1);
        for (r, bi) in self.rows.iter().zip(b) {
            let mut row = r.clone();
            row.push(bi.clone());
            e.insert(sparse_from_dense(&row));
        }
        if e.is_pivot(n) {
            return None;
        }
        // Particular solution: free variables zero, back substitution.
        let mut x = vec![zero.clone(); n + 1];
        x[n] = zero.one_like().negate();
        let mut pivots = e.pivots();
        pivots.reverse();
        for p in pivots {
            let row = &e.rows[e.pivot_row[p].unwrap()];
            let mut acc = zero.clone();
            for (j, a) in row.iter().skip(1) {
                acc.add_assign_ref(&a.times(&x[*j]));
            }
            x[p] = acc.negate();
        }
        x.truncate(n);
        Some(x)
    }
}

/// Determinant over an integral domain by Bareiss fraction-free elimination.
pub fn det_bareiss<D: Domain>(m: &[Vec<D>]) -> Result<D, AlgError> {
    let n = m.len();
    if n == 0 {
        return Err(AlgError::Degenerate("determinant of an empty matrix".into()));
    }
    if m.iter().any(|r| r.len() != n) {
        return Err(AlgError::Shape("determinant of a non-square matrix".into()));
    }
    let mut a: Vec<Vec<D>> = m.to_vec();
    let mut sign_flip = false;
    let mut prev: Option<D> = None;
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign_flip = !sign_flip;
                }
                None => return Ok(a[0][0].zero_like()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[i][j].times(&a[k][k]).minus(&a[i][k].times(&a[k][j]));
                a[i][j] = match &prev {
                    None => num,
                    Some(p) => num
                        .exact_div(p)
                        .ok_or_else(|| AlgError::Degenerate("inexact Bareiss division".into()))?,
                };
            }
            a[i][k] = a[i][k].zero_like();
        }
        prev = Some(a[k][k].clone());
    }
    let d = a[n - 1][n - 1].clone();
    Ok(if sign_flip { d.negate() } else { d })
}

/// Symmetric n×n matrix stored by its upper triangle.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix<D> {
    n: usize,
    upper: Vec<D>,
}

impl<D: Ring> SymMatrix<D> {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> D) -> Self {
        let mut upper = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                upper.push(f(i, j));
            }
        }
        SymMatrix { n, upper }
    }

    /// Builds from a full square matrix, rejecting asymmetric input.
    pub fn from_rows(rows: &[Vec<D>]) -> Result<Self, AlgError> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(AlgError::Shape("symmetric matrix must be square".into()));
        }
        for i in 0..n {
            for j in 0..i {
                if rows[i][j] != rows[j][i] {
                    return Err(AlgError::Shape(format!("entry ({i},{j}) differs from ({j},{i})")));
                }
            }
        }
        Ok(Self::from_fn(n, |i, j| rows[i][j].clone()))
    }

    pub fn size(&self) -> usize {
        self.n
    }

    fn index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * self.n - i * (i + 1) / 2 + j
    }

    pub fn get(&self, i: usize, j: usize) -> &D {
        &self.upper[self.index(i, j)]
    }

    pub fn to_rows(&self) -> Vec<Vec<D>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j).clone()).collect()).collect()
    }

    pub fn map<E: Ring>(&self, f: impl Fn(&D) -> E) -> SymMatrix<E> {
        SymMatrix { n: self.n, upper: self.upper.iter().map(f).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.upper.iter().all(|x| x.is_zero())
    }
}

impl<D: Ring> SymMatrix<D> {
    /// Rejects polynomial entries that live in rings of different arity.
    pub fn check_arity(&self) -> Result<(), AlgError> {
        let n = self.upper[0].arity();
        match self.upper.iter().find(|p| p.arity() != n) {
            Some(p) => Err(AlgError::Arity { expected: n.unwrap_or(0), found: p.arity().unwrap_or(0) }),
            None => Ok(()),
        }
    }
}

/// Determinant of a 3×3 symmetric matrix by cofactor expansion.
pub fn det3<D: Ring>(m: &SymMatrix<D>) -> Result<D, AlgError> {
    if m.size() != 3 {
        return Err(AlgError::Shape(format!("det3 expects 3×3, got {}×{}", m.size(), m.size())));
    }
    m.check_arity()?;
    let a = |i: usize, j: usize| m.get(i, j);
    let t1 = a(0, 0).times(a(1, 1)).times(a(2, 2));
    let t2 = a(0, 1).times(a(1, 2)).times(a(2, 0));
    let t3 = a(0, 2).times(a(1, 0)).times(a(2, 1));
    let t4 = a(0, 0).times(a(1, 2)).times(a(2, 1));
    let t5 = a(0, 1).times(a(1, 0)).times(a(2, 2));
    let t6 = a(0, 2).times(a(1, 1)).times(a(2, 0));
    Ok(t1.plus(&t2).plus(&t3).minus(&t4).minus(&t5).minus(&t6))
}

/// Adjugate (transposed cofactor matrix) of a 3×3 symmetric matrix.
pub fn adj3<D: Ring>(m: &SymMatrix<D>) -> Result<SymMatrix<D>, AlgError> {
    if m.size() != 3 {
        return Err(AlgError::Shape(format!("adj3 expects 3×3, got {}×{}", m.size(), m.size())));
    }
    m.check_arity()?;
    let a = |i: usize, j: usize| m.get(i, j);
    // Cofactor C_ij = (-1)^{i+j} minor_ij; for symmetric input adj is symmetric.
    Ok(SymMatrix::from_fn(3, |i, j| {
        let ri: Vec<usize> = (0..3).filter(|&r| r != j).collect();
        let ci: Vec<usize> = (0..3).filter(|&c| c != i).collect();
        let minor = a(ri[0], ci[0]).times(a(ri[1], ci[1])).minus(&a(ri[0], ci[1]).times(a(ri[1], ci[0])));
        if (i + j) % 2 == 0 {
            minor
        } else {
            minor.negate()
        }
    }))
}

/// Full-matrix product of two symmetric matrices (the result need not be symmetric).
pub fn sym_product<D: Ring>(a: &SymMatrix<D>, b: &SymMatrix<D>) -> Vec<Vec<D>> {
    let n = a.size();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut acc = a.get(0, 0).zero_like();
                    for k in 0..n {
                        acc.add_assign_ref(&a.get(i, k).times(b.get(k, j)));
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::fp::Fp;
    use crate::exactalg::poly::QPoly;
    use crate::exactalg::scalar::{rat, Rational};

    fn qm(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect())
    }

    #[test]
    fn rank_and_kernel() {
        let m = qm(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(m.rank(), 2);
        let k = m.kernel();
        assert_eq!(k.len(), 1);
        assert!(m.mul_vec(&k[0]).iter().all(|x| Ring::is_zero(x)));
    }

    #[test]
    fn determinant_routes_agree() {
        let m = qm(&[&[2, -1, 0, 3], &[1, 1, 4, 0], &[0, 5, -2, 1], &[7, 0, 1, 1]]);
        let bareiss = det_bareiss(&m.clone().into_rows()).unwrap();
        assert_eq!(m.det(), bareiss);
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let m = qm(&[&[1, 1], &[1, -1]]);
        let x = m.solve(&[rat(3), rat(1)]).unwrap();
        assert_eq!(x, vec![rat(2), rat(1)]);
        let s = qm(&[&[1, 1], &[2, 2]]);
        assert!(s.solve(&[rat(1), rat(3)]).is_none());
    }

    #[test]
    fn diagonal_det_and_adjugate() {
        let u = |i| QPoly::q_var(3, i);
        let m = SymMatrix::from_fn(3, |i, j| if i == j { u(i) } else { QPoly::zero(3) });
        assert_eq!(det3(&m).unwrap(), &(&u(0) * &u(1)) * &u(2));
        let a = adj3(&m).unwrap();
        assert_eq!(*a.get(0, 0), &u(1) * &u(2));
        assert_eq!(*a.get(2, 2), &u(0) * &u(1));
        assert!(a.get(0, 1).is_zero());
    }

    #[test]
    fn identity_and_corank_two() {
        let id = SymMatrix::from_fn(3, |i, j| rat((i == j) as i64));
        assert_eq!(det3(&id).unwrap(), rat(1));
        assert_eq!(adj3(&id).unwrap(), id);
        let c = SymMatrix::from_fn(3, |i, j| rat(if i == 2 && j == 2 { 5 } else { 0 }));
        assert!(adj3(&c).unwrap().is_zero());
    }

    #[test]
    fn adjugate_identity_over_fp() {
        let p = 17;
        let m = SymMatrix::from_fn(3, |i, j| Fp::new((3 * i + 5 * j + i * j) as i64, p));
        let d = det3(&m).unwrap();
        let prod = sym_product(&m, &adj3(&m).unwrap());
        for (i, row) in prod.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                assert_eq!(*x, if i == j { d } else { Fp::zero(p) });
            }
        }
    }

    #[test]
    fn arity_mismatch_is_reported() {
        let m = SymMatrix::from_fn(3, |i, _| if i == 0 { QPoly::q_var(2, 0) } else { QPoly::q_var(3, 0) });
        assert!(matches!(det3(&m), Err(AlgError::Arity { .. })));
    }
}
