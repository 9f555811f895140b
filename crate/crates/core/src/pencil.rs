//! σ-invariant nets of quadrics: the instance model, determinant cubics and
//! seeded generation of generic instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::exactalg::{
    adj3, dehomogenize_binary, det3, rat, resultant_elim, squarefree_univariate, Fp, Matrix, QPoly, Rational,
    Ring, Scalar, SymMatrix,
};
use crate::geometry::{self, ProjPoint};

pub type Block = [[[i64; 3]; 3]; 3];

#[derive(Debug, thiserror::Error)]
pub enum PencilError {
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("coefficient bound must be at least 1 (bound 0 only produces zero forms)")]
    ZeroBound,
    #[error("no generic instance found after {0} attempts; the coefficient bound is probably too small")]
    Exhausted(usize),
    #[error("evaluation point must be nonzero")]
    ZeroPoint,
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Which block of the decomposition `q = q⁺ + q⁻`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn label(self) -> &'static str {
        match self {
            Side::Plus => "plus",
            Side::Minus => "minus",
        }
    }

    pub fn both() -> [Side; 2] {
        [Side::Plus, Side::Minus]
    }
}

/// The net `W = ⟨q₁, q₂, q₃⟩`. Each `q_k` is block diagonal; `q_plus[k]` and
/// `q_minus[k]` are its blocks on `V₊` and `V₋`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantPencil {
    pub seed: u64,
    pub coeff_bound: i64,
    pub q_plus: Block,
    pub q_minus: Block,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DetCurves {
    pub f_plus: QPoly,
    pub f_minus: QPoly,
}

impl DetCurves {
    pub fn get(&self, side: Side) -> &QPoly {
        match side {
            Side::Plus => &self.f_plus,
            Side::Minus => &self.f_minus,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub kind: String,
    pub field: String,
    pub point: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenericityReport {
    pub e_plus_smooth: bool,
    pub e_minus_smooth: bool,
    pub transversal: bool,
    pub nine_points: bool,
    pub rank_ge_4: bool,
    pub resultant_degree: Option<u32>,
    pub resultant_squarefree: Option<bool>,
    pub points_visited: Vec<(u64, usize)>,
    pub witnesses: Vec<Witness>,
}

impl GenericityReport {
    pub fn all_pass(&self) -> bool {
        self.e_plus_smooth && self.e_minus_smooth && self.transversal && self.nine_points && self.rank_ge_4
    }
}

fn is_symmetric(m: &[[i64; 3]; 3]) -> bool {
    (0..3).all(|i| (0..3).all(|j| m[i][j] == m[j][i]))
}

impl InvariantPencil {
    pub fn new(seed: u64, coeff_bound: i64, q_plus: Block, q_minus: Block) -> Result<Self, PencilError> {
        let p = InvariantPencil { seed, coeff_bound, q_plus, q_minus };
        p.validate()?;
        Ok(p)
    }

    /// `q_k⁺ = E_kk` and `q_k⁻ = E_kk`, so `f± = u₁u₂u₃`.
    pub fn diagonal() -> Self {
        let mut b = [[[0; 3]; 3]; 3];
        for (k, m) in b.iter_mut().enumerate() {
            m[k][k] = 1;
        }
        InvariantPencil { seed: 0, coeff_bound: 1, q_plus: b, q_minus: b }
    }

    pub fn validate(&self) -> Result<(), PencilError> {
        if self.coeff_bound < 1 {
            return Err(PencilError::Invalid("coeff_bound must be positive".into()));
        }
        for (name, block) in [("q_plus", &self.q_plus), ("q_minus", &self.q_minus)] {
            for (k, m) in block.iter().enumerate() {
                if !is_symmetric(m) {
                    return Err(PencilError::Invalid(format!("{name}[{k}] is not symmetric")));
                }
                if m.iter().flatten().any(|x| x.abs() > self.coeff_bound) {
                    return Err(PencilError::Invalid(format!("{name}[{k}] has an entry above coeff_bound")));
                }
            }
        }
        Ok(())
    }

    pub fn from_json_str(s: &str) -> Result<Self, PencilError> {
        let p: InvariantPencil = serde_json::from_str(s)?;
        p.validate()?;
        Ok(p)
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    /// SHA-256 of the canonical JSON serialization, hex encoded.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_json_string().as_bytes()))
    }

    pub fn block(&self, side: Side) -> &Block {
        match side {
            Side::Plus => &self.q_plus,
            Side::Minus => &self.q_minus,
        }
    }

    /// Matrix entry `(i, j)` of `q_u^side` as a linear form in u.
    pub fn entry_form(&self, side: Side, i: usize, j: usize) -> QPoly {
        let b = self.block(side);
        QPoly::linear_form(&[rat(b[0][i][j]), rat(b[1][i][j]), rat(b[2][i][j])])
    }

    /// `q_u^side` with linear-form entries.
    pub fn linear_block(&self, side: Side) -> SymMatrix<QPoly> {
        SymMatrix::from_fn(3, |i, j| self.entry_form(side, i, j))
    }

    /// `q_u^side` evaluated at a point of any field.
    pub fn block_at<S: Scalar>(&self, side: Side, u: &[S]) -> SymMatrix<S> {
        let b = self.block(side);
        SymMatrix::from_fn(3, |i, j| {
            let mut acc = u[0].zero_like();
            for (k, uk) in u.iter().enumerate() {
                acc = acc.plus(&uk.times(&uk.from_i64_like(b[k][i][j])));
            }
            acc
        })
    }

    /// The 6×6 Gram matrix of `q_u = Σ uᵢ qᵢ` in the basis `x₁⁺, x₂⁺, x₃⁺, x₁⁻, x₂⁻, x₃⁻`.
    pub fn quadric_at(&self, u: &[Rational]) -> Result<SymMatrix<Rational>, PencilError> {
        if u.len() != 3 || u.iter().all(|x| Ring::is_zero(x)) {
            return Err(PencilError::ZeroPoint);
        }
        let p = self.block_at(Side::Plus, u);
        let m = self.block_at(Side::Minus, u);
        Ok(SymMatrix::from_fn(6, |i, j| match (i < 3, j < 3) {
            (true, true) => p.get(i, j).clone(),
            (false, false) => m.get(i - 3, j - 3).clone(),
            _ => rat(0),
        }))
    }

    /// The 6×6 matrix with linear-form entries.
    pub fn symbolic_quadric(&self) -> SymMatrix<QPoly> {
        SymMatrix::from_fn(6, |i, j| match (i < 3, j < 3) {
            (true, true) => self.entry_form(Side::Plus, i, j),
            (false, false) => self.entry_form(Side::Minus, i - 3, j - 3),
            _ => QPoly::zero(3),
        })
    }

    pub fn det_curves(&self) -> DetCurves {
        DetCurves {
            f_plus: det3(&self.linear_block(Side::Plus)).expect("uniform arity"),
            f_minus: det3(&self.linear_block(Side::Minus)).expect("uniform arity"),
        }
    }

    /// Rank of the 6×6 form at a rational point.
    pub fn rank_at(&self, u: &[Rational]) -> Result<usize, PencilError> {
        Ok(Matrix::from_rows(self.quadric_at(u)?.to_rows()).rank())
    }
}

/// Deterministic pencil from `(seed, coeff_bound)`, resampled until the
/// genericity check passes.
pub fn generate(seed: u64, coeff_bound: i64) -> Result<InvariantPencil, PencilError> {
    generate_with(seed, coeff_bound, &geometry::DEFAULT_PRIMES)
}

pub const MAX_ATTEMPTS: usize = 50;

pub fn generate_with(seed: u64, coeff_bound: i64, primes: &[u64]) -> Result<InvariantPencil, PencilError> {
    if coeff_bound < 1 {
        return Err(PencilError::ZeroBound);
    }
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        let sub: u64 = master.gen();
        let mut rng = ChaCha8Rng::seed_from_u64(sub);
        let mut draw = || -> Block {
            let mut b = [[[0i64; 3]; 3]; 3];
            for m in b.iter_mut() {
                for i in 0..3 {
                    for j in i..3 {
                        let x = rng.gen_range(-coeff_bound..=coeff_bound);
                        m[i][j] = x;
                        m[j][i] = x;
                    }
                }
            }
            b
        };
        let q_plus = draw();
        let q_minus = draw();
        let p = InvariantPencil { seed, coeff_bound, q_plus, q_minus };
        if genericity_check(&p, primes, true).all_pass() {
            return Ok(p);
        }
    }
    Err(PencilError::Exhausted(MAX_ATTEMPTS))
}

fn fp_witness(kind: &str, p: u64, pt: &ProjPoint<Fp>) -> Witness {
    Witness {
        kind: kind.into(),
        field: format!("F_{p}"),
        point: pt.coords.iter().map(|c| c.value().to_string()).collect(),
    }
}

/// Per-prime scan outcome.
struct PrimeScan {
    p: u64,
    visited: usize,
    sing_plus: Vec<ProjPoint<Fp>>,
    sing_minus: Vec<ProjPoint<Fp>>,
    tangent: Vec<ProjPoint<Fp>>,
    high_corank: Vec<ProjPoint<Fp>>,
    degenerate: Vec<String>,
}

fn scan_prime(pencil: &InvariantPencil, curves: &DetCurves, p: u64) -> PrimeScan {
    let mut out = PrimeScan {
        p,
        visited: 0,
        sing_plus: vec![],
        sing_minus: vec![],
        tangent: vec![],
        high_corank: vec![],
        degenerate: vec![],
    };
    match geometry::ff_scan_smooth(&curves.f_plus, p) {
        Ok(s) => {
            out.visited = s.visited;
            out.sing_plus = s.points;
        }
        Err(e) => out.degenerate.push(format!("f_plus: {e}")),
    }
    match geometry::ff_scan_smooth(&curves.f_minus, p) {
        Ok(s) => out.sing_minus = s.points,
        Err(e) => out.degenerate.push(format!("f_minus: {e}")),
    }
    match geometry::ff_scan_transversal(&curves.f_plus, &curves.f_minus, p) {
        Ok(s) => out.tangent = s.points,
        Err(e) => out.degenerate.push(format!("transversality: {e}")),
    }
    if out.degenerate.is_empty() {
        let c = geometry::ff_scan_corank(pencil, p);
        out.high_corank = c.witnesses;
    }
    out
}

/// Genericity certificates: exhaustive scans over each prime field plus, when
/// requested, the degree-9 squarefree resultant of `f₊` and `f₋`.
pub fn genericity_check(pencil: &InvariantPencil, primes: &[u64], do_resultant: bool) -> GenericityReport {
    let curves = pencil.det_curves();
    let mut report = GenericityReport {
        e_plus_smooth: true,
        e_minus_smooth: true,
        transversal: true,
        nine_points: false,
        rank_ge_4: true,
        resultant_degree: None,
        resultant_squarefree: None,
        points_visited: vec![],
        witnesses: vec![],
    };
    if curves.f_plus.is_zero() || curves.f_minus.is_zero() {
        report.e_plus_smooth = !curves.f_plus.is_zero();
        report.e_minus_smooth = !curves.f_minus.is_zero();
        report.transversal = false;
        report.rank_ge_4 = false;
        report.witnesses.push(Witness { kind: "vanishing-determinant".into(), field: "Q".into(), point: vec![] });
        return report;
    }
    let scans: Vec<PrimeScan> = primes.par_iter().map(|&p| scan_prime(pencil, &curves, p)).collect();
    for s in &scans {
        report.points_visited.push((s.p, s.visited));
        if !s.degenerate.is_empty() {
            report.e_plus_smooth = false;
            report.e_minus_smooth = false;
            report.transversal = false;
            report.rank_ge_4 = false;
            for d in &s.degenerate {
                report.witnesses.push(Witness { kind: d.clone(), field: format!("F_{}", s.p), point: vec![] });
            }
        }
        for pt in &s.sing_plus {
            report.e_plus_smooth = false;
            report.witnesses.push(fp_witness("singular-e-plus", s.p, pt));
        }
        for pt in &s.sing_minus {
            report.e_minus_smooth = false;
            report.witnesses.push(fp_witness("singular-e-minus", s.p, pt));
        }
        for pt in &s.tangent {
            report.transversal = false;
            report.witnesses.push(fp_witness("non-transverse", s.p, pt));
        }
        for pt in &s.high_corank {
            report.rank_ge_4 = false;
            report.witnesses.push(fp_witness("corank-2", s.p, pt));
        }
    }
    if do_resultant {
        let (deg, sf) = resultant_certificate(&curves, pencil.seed);
        report.resultant_degree = deg;
        report.resultant_squarefree = sf;
        report.nine_points = deg == Some(9) && sf == Some(true);
        if !report.nine_points {
            report.transversal = false;
            report.witnesses.push(Witness {
                kind: "resultant".into(),
                field: "Q".into(),
                point: vec![format!("degree {deg:?}, squarefree {sf:?}")],
            });
        }
    }
    report
}

/// Degree and squarefreeness of `Res_{u₃}(f₊, f₋)`, a binary form in `u₁, u₂`.
pub fn resultant_certificate(curves: &DetCurves, seed: u64) -> (Option<u32>, Option<bool>) {
    let r = match resultant_elim(&curves.f_plus, &curves.f_minus, 2) {
        Ok(r) if !r.is_zero() => r,
        _ => return (None, None),
    };
    let deg = r.total_degree();
    if !r.is_homogeneous() {
        return (deg, None);
    }
    let sf = dehomogenize_binary(&r, 0, 1, seed)
        .ok()
        .and_then(|h| squarefree_univariate(&h.to_multi(3, 0), 0).ok())
        .map(|(sf, _)| sf);
    (deg, sf)
}

/// `adj(q_u^side)` with polynomial entries (quadratic forms in u).
pub fn adjugate_block(pencil: &InvariantPencil, side: Side) -> SymMatrix<QPoly> {
    adj3(&pencil.linear_block(side)).expect("uniform arity")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::det_bareiss;

    #[test]
    fn diagonal_pencil_gives_coordinate_triangle() {
        let p = InvariantPencil::diagonal();
        let c = p.det_curves();
        let u1u2u3 = QPoly::q_var(3, 0).mul(&QPoly::q_var(3, 1)).mul(&QPoly::q_var(3, 2));
        assert_eq!(c.f_plus, u1u2u3);
        assert_eq!(c.f_minus, u1u2u3);
    }

    #[test]
    fn zero_minus_block_gives_zero_curve() {
        let mut p = InvariantPencil::diagonal();
        p.q_minus = [[[0; 3]; 3]; 3];
        assert!(p.det_curves().f_minus.is_zero());
        assert!(!genericity_check(&p, &[101], false).all_pass());
    }

    #[test]
    fn quadric_at_basis_vector_and_linearity() {
        let p = generate(3, 4).unwrap();
        let e1 = [rat(1), rat(0), rat(0)];
        let q = p.quadric_at(&e1).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(*q.get(i, j), rat(p.q_plus[0][i][j]));
                assert_eq!(*q.get(i + 3, j + 3), rat(p.q_minus[0][i][j]));
                assert_eq!(*q.get(i, j + 3), rat(0));
            }
        }
        let e2 = [rat(0), rat(1), rat(0)];
        let s = p.quadric_at(&[rat(1), rat(1), rat(0)]).unwrap();
        let q2 = p.quadric_at(&e2).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(*s.get(i, j), q.get(i, j) + q2.get(i, j));
            }
        }
        assert!(matches!(p.quadric_at(&[rat(0), rat(0), rat(0)]), Err(PencilError::ZeroPoint)));
        assert!(p.rank_at(&[rat(2), rat(-1), rat(5)]).unwrap() >= 4);
    }

    #[test]
    fn block_determinant_identity() {
        let p = generate(11, 5).unwrap();
        let c = p.det_curves();
        let det6 = det_bareiss(&p.symbolic_quadric().to_rows()).unwrap();
        assert_eq!(det6, c.f_plus.mul(&c.f_minus));
        assert!(c.f_plus.is_homogeneous() && c.f_plus.total_degree() == Some(3));
    }

    #[test]
    fn generation_is_deterministic_and_rejects_zero_bound() {
        let a = generate(42, 5).unwrap();
        let b = generate(42, 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_json_string(), b.to_json_string());
        assert!(matches!(generate(42, 0), Err(PencilError::ZeroBound)));
        for m in a.q_plus.iter().chain(a.q_minus.iter()) {
            assert!(m.iter().flatten().all(|x| x.abs() <= 5));
        }
    }

    #[test]
    fn json_round_trip_and_validation() {
        let a = generate(7, 3).unwrap();
        let back = InvariantPencil::from_json_str(&a.to_json_string()).unwrap();
        assert_eq!(a, back);
        let mut bad = a.clone();
        bad.q_plus[0][0][1] += 1;
        assert!(InvariantPencil::from_json_str(&bad.to_json_string()).is_err());
        assert!(InvariantPencil::from_json_str("{\"seed\": 1}").is_err());
    }

    #[test]
    fn identical_blocks_are_not_transversal() {
        let a = generate(5, 5).unwrap();
        let same = InvariantPencil { q_minus: a.q_plus, ..a };
        let r = genericity_check(&same, &[101], true);
        assert!(!r.transversal);
        assert!(!r.nine_points);
    }

    #[test]
    fn diagonal_pencil_fails_smoothness() {
        let r = genericity_check(&InvariantPencil::diagonal(), &[101], true);
        assert!(!r.e_plus_smooth);
        assert!(r.witnesses.iter().any(|w| w.kind == "singular-e-plus" && w.point == ["0", "0", "1"]));
    }

    #[test]
    fn accepted_pencils_have_squarefree_degree_nine_resultant() {
        for seed in 0..3 {
            let p = generate(seed, 5).unwrap();
            let (deg, sf) = resultant_certificate(&p.det_curves(), seed);
            assert_eq!(deg, Some(9));
            assert_eq!(sf, Some(true));
        }
    }
}
