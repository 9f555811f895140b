//! Quadric geometry in ℙ⁵: the Plücker chart for the split rank-6 form,
//! rulings by isotropic planes, rank-2 Clifford modules and their annihilators,
//! and adjugates of degenerate ternary forms.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::clifford::{central_odd_in, CliffordAlgebra, Variant};
use crate::exactalg::matrix::sparse_from_dense;
use crate::exactalg::{adj3, det3, det_bareiss, rat, ratio, Echelon, Fp, Matrix, QPoly, Rational, Ring, Scalar, SymMatrix};
use crate::fiber::{element_vector, split_full_rank_with, FiberError, FieldTower, TowerElem};
use crate::geometry::{corank3, projective_plane, ProjPoint};
use crate::pencil::{InvariantPencil, Side};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PluckerError {
    #[error("all coefficients are zero")]
    ZeroInput,
    #[error("fiber: {0}")]
    Fiber(#[from] FiberError),
    #[error("annihilator has dimension {0}, expected 1")]
    AnnihilatorDim(usize),
    #[error("module has dimension {0}, expected 2")]
    ModuleDim(usize),
    #[error("corank {corank} at {point}")]
    Corank { corank: usize, point: String },
}

/// Indices into the Plücker coordinate vector `(z₁₂, z₁₃, z₁₄, z₂₃, z₂₄, z₃₄)`.
pub const Z_INDEX: [(usize, usize); 6] = [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)];

fn z_pos(i: usize, j: usize) -> Option<(usize, i64)> {
    let (a, b, s) = if i < j { (i, j, 1) } else { (j, i, -1) };
    Z_INDEX.iter().position(|&p| p == (a, b)).map(|k| (k, s))
}

/// `x₁x₂ + x₃² − x₄² + x₅x₆` on `V₊ ⊕ V₋ = ⟨x₁,x₂,x₃⟩ ⊕ ⟨x₄,x₅,x₆⟩`.
pub fn model_quadric(x: &[QPoly]) -> QPoly {
    x[0].mul(&x[1]).add(&x[2].mul(&x[2])).sub(&x[3].mul(&x[3])).add(&x[4].mul(&x[5]))
}

pub fn model_quadric_plus(x: &[QPoly]) -> QPoly {
    x[0].mul(&x[1]).add(&x[2].mul(&x[2]))
}

pub fn model_quadric_minus(x: &[QPoly]) -> QPoly {
    x[4].mul(&x[5]).sub(&x[3].mul(&x[3]))
}

/// `z₁₂z₃₄ − z₁₃z₂₄ + z₁₄z₂₃`.
pub fn plucker_quadric(z: &[QPoly]) -> QPoly {
    z[0].mul(&z[5]).sub(&z[1].mul(&z[4])).add(&z[2].mul(&z[3]))
}

/// The linear change of variables `x = T z`.
#[derive(Clone, Debug)]
pub struct PluckerChart {
    pub t: Matrix<Rational>,
}

impl PluckerChart {
    pub fn x_of_z(&self, z: &[QPoly]) -> Vec<QPoly> {
        (0..6)
            .map(|i| {
                let mut acc = QPoly::zero(z[0].nvars());
                for (j, zj) in z.iter().enumerate() {
                    let c = self.t.get(i, j);
                    if !Zero::is_zero(c) {
                        acc = acc.add(&zj.scale(c));
                    }
                }
                acc
            })
            .collect()
    }

    /// Residual `q(x(z)) − (z₁₂z₃₄ − z₁₃z₂₄ + z₁₄z₂₃)` in the six z-variables.
    pub fn residual(&self) -> QPoly {
        let z: Vec<QPoly> = (0..6).map(|i| QPoly::q_var(6, i)).collect();
        model_quadric(&self.x_of_z(&z)).sub(&plucker_quadric(&z))
    }
}

/// `x₁ = z₁₂, x₂ = z₃₄, x₃ = (z₁₃ − z₂₄)/2, x₄ = (z₁₃ + z₂₄)/2, x₅ = z₁₄, x₆ = z₂₃`.
pub fn plucker_transform() -> PluckerChart {
    let h = ratio(1, 2);
    let z = rat(0);
    let o = rat(1);
    let t = Matrix::from_rows(vec![
        vec![o.clone(), z.clone(), z.clone(), z.clone(), z.clone(), z.clone()],
        vec![z.clone(), z.clone(), z.clone(), z.clone(), z.clone(), o.clone()],
        vec![z.clone(), h.clone(), z.clone(), z.clone(), -h.clone(), z.clone()],
        vec![z.clone(), h.clone(), z.clone(), z.clone(), h.clone(), z.clone()],
        vec![z.clone(), z.clone(), o.clone(), z.clone(), z.clone(), z.clone()],
        vec![z.clone(), z.clone(), z.clone(), o.clone(), z.clone(), z],
    ]);
    PluckerChart { t }
}

/// `Σᵢ yᵢ e_ij = y ∧ e_j` in Plücker coordinates.
pub fn ruling_vector(y: &[QPoly], j: usize) -> Vec<QPoly> {
    let nv = y[0].nvars();
    let mut z = vec![QPoly::zero(nv); 6];
    for (i, yi) in y.iter().enumerate() {
        if let Some((k, s)) = z_pos(i + 1, j + 1) {
            z[k] = z[k].add(&yi.scale(&rat(s)));
        }
    }
    z
}

fn z_of_x(x: &[QPoly]) -> Vec<QPoly> {
    // Inverse chart: z₁₃ = x₃ + x₄, z₂₄ = x₄ − x₃.
    vec![x[0].clone(), x[2].add(&x[3]), x[4].clone(), x[5].clone(), x[3].sub(&x[2]), x[1].clone()]
}

/// Outcome of the symbolic Segre check, with a digest of every residual
/// polynomial (all of which must be zero).
#[derive(Clone, Debug, serde::Serialize)]
pub struct SegreReport {
    pub quadrics_vanish: bool,
    pub points_in_plane: bool,
    pub plane_isotropic: bool,
    pub plane_rank: usize,
    pub residuals: usize,
    pub residual_digest: String,
}

impl SegreReport {
    pub fn passed(&self) -> bool {
        self.quadrics_vanish && self.points_in_plane && self.plane_isotropic && self.plane_rank == 3
    }
}

fn minors(rows: &[Vec<QPoly>], k: usize) -> Vec<QPoly> {
    let pick = |n: usize| -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize == k {
                out.push((0..n).filter(|i| mask >> i & 1 == 1).collect());
            }
        }
        out
    };
    let mut out = Vec::new();
    for r in pick(rows.len()) {
        for c in pick(rows[0].len()) {
            let m: Vec<Vec<QPoly>> = r.iter().map(|&i| c.iter().map(|&j| rows[i][j].clone()).collect()).collect();
            out.push(det_bareiss(&m).expect("square"));
        }
    }
    out
}

/// Segre data over `ℚ[a₀, a₁, a₂, a₃]` (variables 0..3), with `c₀..c₃`
/// (variables 4..7) for combinations of the spanning set.
pub fn segre_identity_check() -> SegreReport {
    let a = |i: usize| QPoly::q_var(8, i);
    let zero = QPoly::zero(8);
    let p_plus = vec![a(0).mul(&a(0)), a(1).mul(&a(1)).neg(), a(0).mul(&a(1)), zero.clone(), zero.clone(), zero.clone()];
    let p_minus = vec![zero.clone(), zero.clone(), zero.clone(), a(2).mul(&a(3)), a(2).mul(&a(2)), a(3).mul(&a(3))];
    let y = vec![a(0).mul(&a(2)), a(0).mul(&a(3)), a(1).mul(&a(3)), a(1).mul(&a(2))];
    let chart = plucker_transform();

    let mut residuals = vec![chart.residual(), model_quadric_plus(&p_plus), model_quadric_minus(&p_minus)];
    let quadrics_vanish = residuals.iter().all(|r| r.is_zero());

    let span: Vec<Vec<QPoly>> = (0..4).map(|j| ruling_vector(&y, j)).collect();
    let plane_rank = (1..=4).rev().find(|&k| minors(&span, k).iter().any(|m| !m.is_zero())).unwrap_or(0);
    let mut in_plane = true;
    for p in [&p_plus, &p_minus] {
        let mut rows = span.clone();
        rows.push(z_of_x(p));
        let ms = minors(&rows, 4);
        in_plane &= ms.iter().all(|m| m.is_zero());
        residuals.extend(ms);
    }

    let mut combo = vec![zero; 6];
    for (j, row) in span.iter().enumerate() {
        let c = QPoly::q_var(8, 4 + j);
        for k in 0..6 {
            combo[k] = combo[k].add(&row[k].mul(&c));
        }
    }
    let iso = model_quadric(&chart.x_of_z(&combo));
    let plane_isotropic = iso.is_zero();
    residuals.push(iso);

    let mut h = Sha256::new();
    for r in &residuals {
        h.update(r.render(&["a0", "a1", "a2", "a3", "c0", "c1", "c2", "c3"]).as_bytes());
        h.update(b";");
    }
    SegreReport {
        quadrics_vanish,
        points_in_plane: in_plane,
        plane_isotropic,
        plane_rank,
        residuals: residuals.len(),
        residual_digest: hex::encode(h.finalize()),
    }
}

/// `M₀ = ∧^even U → M₁ = ∧^odd U`, `v ↦ v·m`, where `U` acts by wedge and `U^∨`
/// by contraction. Rows are `v₁..v₆`, columns the coordinates in `(v₁, v₂, v₃, v₁∧v₂∧v₃)`.
pub fn m0_matrix_generic<R: Ring>(a: &[R; 4]) -> Vec<Vec<R>> {
    // Elements of ∧U as maps from subset masks to coefficients.
    let zero = a[0].zero_like();
    let mut m: [R; 8] = std::array::from_fn(|_| zero.clone());
    m[0] = a[0].clone();
    m[0b110] = a[1].clone();
    m[0b011] = a[3].clone();
    // v₃∧v₁ = −v₁∧v₃
    m[0b101] = a[2].negate();
    let sign_before = |mask: usize, k: usize| if (mask & ((1 << k) - 1)).count_ones() % 2 == 0 { 1 } else { -1 };
    let odd_basis = [0b001usize, 0b010, 0b100, 0b111];
    (0..6)
        .map(|row| {
            let mut out: [R; 8] = std::array::from_fn(|_| zero.clone());
            for (mask, c) in m.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let k = row % 3;
                let wedge = row < 3;
                let has = mask >> k & 1 == 1;
                if wedge == has {
                    continue;
                }
                let s = sign_before(mask, k);
                let c = if s < 0 { c.negate() } else { c.clone() };
                let target = mask ^ (1 << k);
                out[target] = out[target].plus(&c);
            }
            odd_basis.iter().map(|&b| out[b].clone()).collect()
        })
        .collect()
}

/// The matrix of `m = a₀ + a₁ v₂∧v₃ + a₂ v₃∧v₁ + a₃ v₁∧v₂`, with rank and
/// column relation `a₁C₁ + a₂C₂ + a₃C₃ − a₀C₄ = 0` checked.
pub fn m0_matrix(a: &[Rational; 4]) -> Result<(Matrix<Rational>, usize, bool), PluckerError> {
    if a.iter().all(Zero::is_zero) {
        return Err(PluckerError::ZeroInput);
    }
    let rows = m0_matrix_generic(a);
    let relation = rows.iter().all(|r| {
        let s = &a[1] * &r[0] + &a[2] * &r[1] + &a[3] * &r[2] - &a[0] * &r[3];
        Zero::is_zero(&s)
    });
    let m = Matrix::from_rows(rows);
    let rank = m.rank();
    Ok((m, rank, relation))
}

/// Symbolic version over `ℚ[a₀..a₃]`: every 4×4 minor vanishes, each `a_i³`
/// appears up to sign among the 3×3 minors, and the column relation holds.
#[derive(Clone, Debug, serde::Serialize)]
pub struct M0Symbolic {
    pub maximal_minors_vanish: bool,
    pub cube_minors: [bool; 4],
    pub column_relation: bool,
}

impl M0Symbolic {
    pub fn passed(&self) -> bool {
        self.maximal_minors_vanish && self.cube_minors.iter().all(|&b| b) && self.column_relation
    }
}

pub fn m0_symbolic() -> M0Symbolic {
    let a: [QPoly; 4] = std::array::from_fn(|i| QPoly::q_var(4, i));
    let rows = m0_matrix_generic(&a);
    let m4 = minors(&rows, 4);
    let m3 = minors(&rows, 3);
    let cube_minors = std::array::from_fn(|i| {
        let c = a[i].pow(3, &rat(1));
        m3.iter().any(|m| *m == c || *m == c.neg())
    });
    let column_relation = rows.iter().all(|r| a[1].mul(&r[0]).add(&a[2].mul(&r[1])).add(&a[3].mul(&r[2])).sub(&a[0].mul(&r[3])).is_zero());
    M0Symbolic { maximal_minors_vanish: m4.iter().all(|m| m.is_zero()), cube_minors, column_relation }
}

/// A rank-2 module for the `V₊` Clifford algebra at `u`, cut out of the `M₂`
/// corner on which `d₊` acts by `y₊`.
#[derive(Clone, Debug)]
pub struct CliffordModuleRep {
    pub tower: std::sync::Arc<FieldTower>,
    pub y_plus: TowerElem,
    /// `q⁺_u` over the tower.
    pub form: SymMatrix<TowerElem>,
    /// Matrices of `v₁⁺, v₂⁺, v₃⁺` in the module basis, indexed `[g][row][col]`.
    pub generators: Vec<Vec<Vec<TowerElem>>>,
    /// Matrix of `d₊`.
    pub d_plus: Vec<Vec<TowerElem>>,
}

impl CliffordModuleRep {
    pub fn dim(&self) -> usize {
        self.d_plus.len()
    }

    fn apply(m: &[Vec<TowerElem>], v: &[TowerElem]) -> Vec<TowerElem> {
        m.iter()
            .map(|row| row.iter().zip(v).fold(v[0].zero_like(), |acc, (a, b)| acc.plus(&a.times(b))))
            .collect()
    }

    fn matmul(a: &[Vec<TowerElem>], b: &[Vec<TowerElem>]) -> Vec<Vec<TowerElem>> {
        let n = a.len();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).fold(a[0][0].zero_like(), |acc, k| acc.plus(&a[i][k].times(&b[k][j]))))
                    .collect()
            })
            .collect()
    }

    /// Action of `Σ w_i v_i⁺`.
    pub fn action(&self, w: &[TowerElem]) -> Vec<Vec<TowerElem>> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..3).fold(w[0].zero_like(), |acc, g| acc.plus(&w[g].times(&self.generators[g][i][j]))))
                    .collect()
            })
            .collect()
    }

    /// `v_i v_j + v_j v_i = −2 q_ij` for all nine ordered pairs.
    pub fn relations_hold(&self) -> bool {
        let n = self.dim();
        (0..3).all(|i| {
            (0..3).all(|j| {
                let s = Self::matmul(&self.generators[i], &self.generators[j]);
                let t = Self::matmul(&self.generators[j], &self.generators[i]);
                let c = self.form.get(i, j).from_i64_like(-2).times(self.form.get(i, j));
                (0..n).all(|r| (0..n).all(|k| {
                    let want = if r == k { c.clone() } else { c.zero_like() };
                    s[r][k].plus(&t[r][k]) == want
                }))
            })
        })
    }

    pub fn d_acts_by_y(&self) -> bool {
        let n = self.dim();
        (0..n).all(|r| (0..n).all(|k| self.d_plus[r][k] == if r == k { self.y_plus.clone() } else { self.y_plus.zero_like() }))
    }

    pub fn traces_vanish(&self) -> bool {
        self.generators.iter().all(|g| (0..g.len()).fold(self.y_plus.zero_like(), |acc, i| acc.plus(&g[i][i])).is_zero())
    }

    fn q_value(&self, w: &[TowerElem]) -> TowerElem {
        let mut acc = w[0].zero_like();
        for i in 0..3 {
            for j in 0..3 {
                acc = acc.plus(&self.form.get(i, j).times(&w[i]).times(&w[j]));
            }
        }
        acc
    }
}

/// Isotropic vector of a ternary form over a tower containing `√(q₁₂² − q₁₁q₂₂)`.
fn isotropic_vector(q: &SymMatrix<TowerElem>, tower: &std::sync::Arc<FieldTower>) -> Vec<TowerElem> {
    let zero = TowerElem::from_rational(tower, rat(0));
    let one = zero.one_like();
    let q11 = q.get(0, 0);
    if q11.is_zero() {
        return vec![one, zero.clone(), zero];
    }
    let disc = q.get(0, 1).times(q.get(0, 1)).minus(&q11.times(q.get(1, 1)));
    let s = disc.sqrt().expect("tower contains the discriminant root");
    let x = s.minus(q.get(0, 1)).times(&q11.inv().expect("nonzero"));
    vec![x, one, zero]
}

/// Rank-2 module at an off-curve rational point. `y_sign` picks `y₊ = ±√f₊(u)`.
pub fn module_rep(pencil: &InvariantPencil, u: &[Rational], y_sign: i64) -> Result<CliffordModuleRep, PluckerError> {
    let block = pencil.block_at(Side::Plus, u);
    let disc = block.get(0, 1) * block.get(0, 1) - block.get(0, 0) * block.get(1, 1);
    let split = split_full_rank_with(pencil, Side::Plus, u, &[disc])?;
    let tower = split.tower.clone();
    let fiber = &split.fiber;
    let idem = if y_sign >= 0 { &split.e_plus } else { &split.e_minus };
    let y_plus = if y_sign >= 0 { split.y.clone() } else { split.y.negate() };
    let form = block.map(|x| TowerElem::from_rational(&tower, x.clone()));
    let ut: Vec<TowerElem> = u.iter().map(|x| TowerElem::from_rational(&tower, x.clone())).collect();
    let alg = CliffordAlgebra::new(pencil, Variant::PlusOnly);
    let gens: Vec<Vec<TowerElem>> = (0..3).map(|g| element_vector(&alg, &alg.gen(g), &ut)).collect();

    let w = isotropic_vector(&form, &tower);
    let vw = (0..3).fold(vec![split.y.zero_like(); fiber.dim()], |acc, g| fiber.add(&acc, &fiber.scale(&w[g], &gens[g])));
    let seed = fiber.mul(idem, &vw);
    let mut span = Echelon::new(fiber.dim());
    for i in 0..fiber.dim() {
        span.insert(sparse_from_dense(&fiber.mul(&fiber.basis(i), &seed)));
    }
    if span.rank() != 2 {
        return Err(PluckerError::ModuleDim(span.rank()));
    }
    let basis: Vec<Vec<TowerElem>> = span
        .rows()
        .map(|r| {
            let mut v = vec![split.y.zero_like(); fiber.dim()];
            for (c, x) in r {
                v[*c] = x.clone();
            }
            v
        })
        .collect();
    let frame = Matrix::from_rows((0..fiber.dim()).map(|i| vec![basis[0][i].clone(), basis[1][i].clone()]).collect());
    let coords = |v: &[TowerElem]| -> Vec<TowerElem> { frame.solve(v).expect("module is closed under the action") };
    let matrix_of = |x: &[TowerElem]| -> Vec<Vec<TowerElem>> {
        let cols: Vec<Vec<TowerElem>> = basis.iter().map(|b| coords(&fiber.mul(x, b))).collect();
        (0..2).map(|r| (0..2).map(|c| cols[c][r].clone()).collect()).collect()
    };
    let d = element_vector(&alg, &central_odd_in(&alg, pencil, Side::Plus).map_err(FiberError::from)?.d, &ut);
    Ok(CliffordModuleRep {
        generators: gens.iter().map(|g| matrix_of(g)).collect(),
        d_plus: matrix_of(&d),
        tower,
        y_plus,
        form,
    })
}

/// `Ann(m) = ker(V₊ → M, v ↦ v·m)`, returned as a spanning vector after
/// checking it is one-dimensional and isotropic.
pub fn annihilator_map(rep: &CliffordModuleRep, m: &[TowerElem]) -> Result<Vec<TowerElem>, PluckerError> {
    if m.iter().all(|x| x.is_zero()) {
        return Err(PluckerError::ZeroInput);
    }
    let cols: Vec<Vec<TowerElem>> = rep.generators.iter().map(|g| CliffordModuleRep::apply(g, m)).collect();
    let rows: Vec<Vec<TowerElem>> = (0..rep.dim()).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect();
    let ker = Matrix::from_rows(rows).kernel();
    if ker.len() != 1 {
        return Err(PluckerError::AnnihilatorDim(ker.len()));
    }
    let w = ker.into_iter().next().unwrap();
    if !rep.q_value(&w).is_zero() {
        return Err(PluckerError::AnnihilatorDim(0));
    }
    Ok(w)
}

/// `ker(v·) ⊂ M` for an isotropic `v`, which is a line.
pub fn kernel_line(rep: &CliffordModuleRep, v: &[TowerElem]) -> Result<Vec<TowerElem>, PluckerError> {
    let ker = Matrix::from_rows(rep.action(v)).kernel();
    if ker.len() != 1 {
        return Err(PluckerError::AnnihilatorDim(ker.len()));
    }
    Ok(ker.into_iter().next().unwrap())
}

fn proportional(a: &[TowerElem], b: &[TowerElem]) -> bool {
    (0..a.len()).all(|i| (0..b.len()).all(|j| a[i].times(&b[j]) == a[j].times(&b[i])))
}

/// Round trip `m ↦ Ann(m) ↦ ker` on `samples` random module lines, plus
/// injectivity of `m ↦ Ann(m)` on them.
#[derive(Clone, Debug, serde::Serialize)]
pub struct AnnihilatorReport {
    pub samples: usize,
    pub round_trips: usize,
    pub distinct_annihilators: bool,
}

impl AnnihilatorReport {
    pub fn passed(&self) -> bool {
        self.round_trips == self.samples && self.distinct_annihilators
    }
}

pub fn annihilator_round_trip(rep: &CliffordModuleRep, samples: usize, seed: u64) -> Result<AnnihilatorReport, PluckerError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tower = rep.tower.clone();
    let mut ms: Vec<Vec<TowerElem>> = Vec::new();
    while ms.len() < samples {
        let m: Vec<TowerElem> = (0..rep.dim()).map(|_| TowerElem::from_rational(&tower, rat(rng.gen_range(-9..=9)))).collect();
        if m.iter().all(|x| x.is_zero()) || ms.iter().any(|o| proportional(o, &m)) {
            continue;
        }
        ms.push(m);
    }
    let mut anns = Vec::new();
    let mut round_trips = 0;
    for m in &ms {
        let w = annihilator_map(rep, m)?;
        let back = kernel_line(rep, &w)?;
        if proportional(&back, m) && proportional(&annihilator_map(rep, &back)?, &w) {
            round_trips += 1;
        }
        anns.push(w);
    }
    let distinct = (0..anns.len()).all(|i| (i + 1..anns.len()).all(|j| !proportional(&anns[i], &anns[j])));
    Ok(AnnihilatorReport { samples, round_trips, distinct_annihilators: distinct })
}

/// Counts from [`adjugate_double_line`].
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct AdjugateScan {
    pub on_curve: usize,
    pub off_curve: usize,
    pub failures: Vec<String>,
}

impl AdjugateScan {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Whether a symmetric rank-1 matrix is `c·x xᵀ` for `x` spanning `ker m`.
pub fn is_double_line<S: Scalar>(m: &SymMatrix<S>) -> bool {
    let adj = adj3(m).expect("3×3");
    let rows = m.to_rows();
    let ker = Matrix::from_rows(rows).kernel();
    if ker.len() != 1 {
        return false;
    }
    let x = &ker[0];
    let Some(i) = (0..3).find(|&i| !x[i].is_zero()) else { return false };
    let c = adj.get(i, i).times(&x[i].times(&x[i]).inv().expect("nonzero"));
    !c.is_zero() && (0..3).all(|a| (0..3).all(|b| *adj.get(a, b) == c.times(&x[a]).times(&x[b])))
}

fn rank_of<S: Scalar>(m: &SymMatrix<S>) -> usize {
    Matrix::from_rows(m.to_rows()).rank()
}

/// Over every F_p-point: on `E_side` the adjugate is a double line, off it the
/// adjugate has rank 3. Points of corank ≥ 2 are failures.
pub fn adjugate_double_line(pencil: &InvariantPencil, side: Side, p: u64) -> AdjugateScan {
    let results: Vec<(bool, Option<String>)> = projective_plane(p)
        .par_iter()
        .map(|pt: &ProjPoint<Fp>| {
            let q = pencil.block_at(side, &pt.coords);
            let on = det3(&q).expect("3×3").is_zero();
            let fail = match corank3(&q) {
                0 => (rank_of(&adj3(&q).expect("3×3")) != 3).then(|| format!("{}: adjugate rank < 3", pt.label())),
                1 => (!is_double_line(&q)).then(|| format!("{}: adjugate is not a double line", pt.label())),
                c => Some(format!("{}: corank {c}", pt.label())),
            };
            (on, fail)
        })
        .collect();
    let on_curve = results.iter().filter(|(on, _)| *on).count();
    AdjugateScan {
        on_curve,
        off_curve: results.len() - on_curve,
        failures: results.into_iter().filter_map(|(_, f)| f).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pencil::generate;

    #[test]
    fn chart_carries_model_to_plucker() {
        let chart = plucker_transform();
        assert!(chart.residual().is_zero());
        assert!(!Zero::is_zero(&chart.t.det()));
        let z: Vec<QPoly> = (0..6).map(|i| QPoly::q_var(6, i)).collect();
        let x = chart.x_of_z(&z);
        let diff = x[2].mul(&x[2]).sub(&x[3].mul(&x[3]));
        assert_eq!(diff, z[1].mul(&z[4]).neg());
    }

    #[test]
    fn segre_identity_holds() {
        let r = segre_identity_check();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn segre_corner_case() {
        // (a₀:a₁) = (1:0), (a₂:a₃) = (1:0): y = e₁ and p₊ = e₁∧e₂.
        let y: Vec<QPoly> = [1, 0, 0, 0].iter().map(|&c| QPoly::q_const(1, c)).collect();
        let span: Vec<Vec<QPoly>> = (0..4).map(|j| ruling_vector(&y, j)).collect();
        assert!(span[0].iter().all(|c| c.is_zero()));
        assert_eq!(span[1][0], QPoly::q_const(1, 1));
    }

    #[test]
    fn m0_examples() {
        let (m, rank, rel) = m0_matrix(&[rat(1), rat(0), rat(0), rat(0)]).unwrap();
        assert_eq!(rank, 3);
        assert!(rel);
        assert!((0..6).all(|r| Zero::is_zero(m.get(r, 3))));
        let (m, rank, rel) = m0_matrix(&[rat(0), rat(1), rat(0), rat(0)]).unwrap();
        assert_eq!(rank, 3);
        assert!(rel);
        assert!((0..6).all(|r| Zero::is_zero(m.get(r, 0))));
        assert_eq!(m0_matrix(&[rat(0), rat(0), rat(0), rat(0)]).unwrap_err(), PluckerError::ZeroInput);
        assert!(m0_symbolic().passed());
    }

    #[test]
    fn m0_matches_display() {
        let a = [rat(2), rat(3), rat(5), rat(7)];
        let (m, _, _) = m0_matrix(&a).unwrap();
        let z = rat(0);
        let want = vec![
            vec![a[0].clone(), z.clone(), z.clone(), a[1].clone()],
            vec![z.clone(), a[0].clone(), z.clone(), a[2].clone()],
            vec![z.clone(), z.clone(), a[0].clone(), a[3].clone()],
            vec![z.clone(), a[3].clone(), -a[2].clone(), z.clone()],
            vec![-a[3].clone(), z.clone(), a[1].clone(), z.clone()],
            vec![a[2].clone(), -a[1].clone(), z.clone(), z.clone()],
        ];
        assert_eq!(m.into_rows(), want);
    }

    #[test]
    fn adjugate_of_degenerate_diagonal() {
        let q = SymMatrix::from_fn(3, |i, j| if i != j { rat(0) } else { [rat(2), rat(3), rat(0)][i].clone() });
        let adj = adj3(&q).unwrap();
        assert_eq!(adj.to_rows(), vec![vec![rat(0); 3], vec![rat(0); 3], vec![rat(0), rat(0), rat(6)]]);
        assert!(is_double_line(&q));
    }

    #[test]
    fn module_and_annihilators() {
        let p = generate(7, 5).unwrap();
        let u = [rat(1), rat(2), rat(-1)];
        for sign in [1, -1] {
            let rep = module_rep(&p, &u, sign).unwrap();
            assert_eq!(rep.dim(), 2);
            assert!(rep.relations_hold());
            assert!(rep.d_acts_by_y());
            assert!(rep.traces_vanish());
            let r = annihilator_round_trip(&rep, 10, 5).unwrap();
            assert!(r.passed(), "{r:?}");
        }
    }
}
