//! Clifford algebras of the net over ℚ[u₁, u₂, u₃] in normal form.
//!
//! Generators are numbered `v₁⁺, v₂⁺, v₃⁺, v₁⁻, v₂⁻, v₃⁻` and a basis monomial is a
//! 6-bit mask (bit k set when generator k occurs), always written in increasing
//! generator order. Same-block generators satisfy
//! `vᵢvⱼ + vⱼvᵢ = −2 q_u(vᵢ, vⱼ)` with `q_u(vᵢ, vⱼ)` the matrix entry, so
//! `vᵢ² = −q_ii`. Generators from different blocks anticommute in the super
//! tensor product and commute in the ordinary one.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::exactalg::{rat, Echelon, Matrix, Monomial, QPoly, Rational, Ring};
use crate::pencil::{InvariantPencil, Side};

pub const NVARS: usize = 3;
pub const FULL: u8 = 0b11_1111;
pub const PLUS_MASK: u8 = 0b00_0111;
pub const MINUS_MASK: u8 = 0b11_1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Variant {
    Super,
    Ordinary,
    PlusOnly,
    MinusOnly,
}

impl Variant {
    pub fn generators(self) -> Vec<usize> {
        match self {
            Variant::Super | Variant::Ordinary => (0..6).collect(),
            Variant::PlusOnly => (0..3).collect(),
            Variant::MinusOnly => (3..6).collect(),
        }
    }

    pub fn support(self) -> u8 {
        match self {
            Variant::Super | Variant::Ordinary => FULL,
            Variant::PlusOnly => PLUS_MASK,
            Variant::MinusOnly => MINUS_MASK,
        }
    }

    pub fn masks(self) -> Vec<u8> {
        let s = self.support();
        (0..=FULL).filter(|m| m & !s == 0).collect()
    }

    pub fn for_side(side: Side) -> Variant {
        match side {
            Side::Plus => Variant::PlusOnly,
            Side::Minus => Variant::MinusOnly,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliffordError {
    #[error("cannot combine elements of {0:?} and {1:?}")]
    VariantMismatch(Variant, Variant),
    #[error("elements come from different pencils")]
    PencilMismatch,
    #[error("φ is only defined on even weight, got an element of weight {0}")]
    OddWeight(u32),
    #[error("φ expects an element of the super algebra")]
    NotHomogeneousSuper,
    #[error("no central element of the expected shape: {0}")]
    NoCentralElement(String),
}

fn is_plus(g: usize) -> bool {
    g < 3
}

fn top_bit(mask: u8) -> usize {
    7 - mask.leading_zeros() as usize
}

pub fn mask_string(mask: u8) -> String {
    (0..6).map(|k| if mask >> k & 1 == 1 { '1' } else { '0' }).collect()
}

pub fn parse_mask(s: &str) -> Option<u8> {
    if s.len() != 6 {
        return None;
    }
    let mut m = 0u8;
    for (k, ch) in s.chars().enumerate() {
        match ch {
            '1' => m |= 1 << k,
            '0' => {}
            _ => return None,
        }
    }
    Some(m)
}

/// `(ℤ₂ parity, ℕ weight)`: `uᵢ ↦ (0, 2)`, `vᵢ⁺ ↦ (0, 1)`, `vᵢ⁻ ↦ (1, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub struct BiDegree {
    pub parity: u8,
    pub weight: u32,
}

impl BiDegree {
    pub fn of_mask(mask: u8, u_degree: u32) -> Self {
        BiDegree { parity: ((mask & MINUS_MASK).count_ones() % 2) as u8, weight: 2 * u_degree + mask.count_ones() }
    }

    pub fn add(self, o: Self) -> Self {
        BiDegree { parity: (self.parity + o.parity) % 2, weight: self.weight + o.weight }
    }
}

type Combo = Vec<(u8, QPoly)>;

/// An element in normal form: mask to nonzero polynomial coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct CliffordElement {
    variant: Variant,
    key: u64,
    terms: BTreeMap<u8, QPoly>,
}

impl CliffordElement {
    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn terms(&self) -> impl Iterator<Item = (u8, &QPoly)> {
        self.terms.iter().map(|(m, p)| (*m, p))
    }

    pub fn coeff(&self, mask: u8) -> QPoly {
        self.terms.get(&mask).cloned().unwrap_or_else(|| QPoly::zero(NVARS))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The polynomial `p` when the element is `p·1`.
    pub fn as_scalar(&self) -> Option<QPoly> {
        match self.terms.keys().next() {
            None => Some(QPoly::zero(NVARS)),
            Some(0) if self.terms.len() == 1 => Some(self.terms[&0].clone()),
            _ => None,
        }
    }

    fn add_term(&mut self, mask: u8, p: &QPoly) {
        if p.is_zero() {
            return;
        }
        let e = self.terms.entry(mask).or_insert_with(|| QPoly::zero(NVARS));
        e.add_assign_ref(p);
        if e.is_zero() {
            self.terms.remove(&mask);
        }
    }

    fn check(&self, o: &Self) {
        assert_eq!(self.variant, o.variant, "variant mismatch");
        assert_eq!(self.key, o.key, "pencil mismatch");
    }

    pub fn add(&self, o: &Self) -> Self {
        self.check(o);
        let mut r = self.clone();
        for (m, p) in &o.terms {
            r.add_term(*m, p);
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&QPoly::q_const(NVARS, -1))
    }

    /// Multiplication by a central polynomial.
    pub fn scale(&self, p: &QPoly) -> Self {
        let mut r = CliffordElement { variant: self.variant, key: self.key, terms: BTreeMap::new() };
        for (m, c) in &self.terms {
            r.add_term(*m, &c.mul(p));
        }
        r
    }

    /// The same normal form read in another variant with a compatible support,
    /// e.g. a `PlusOnly` element inside the full algebra.
    pub fn reinterpret(&self, variant: Variant) -> Self {
        assert!(self.terms.keys().all(|m| m & !variant.support() == 0), "support not contained in target variant");
        CliffordElement { variant, key: self.key, terms: self.terms.clone() }
    }

    pub fn bidegree(&self) -> Option<BiDegree> {
        let mut deg = None;
        for (m, p) in &self.terms {
            if !p.is_homogeneous() {
                return None;
            }
            let d = BiDegree::of_mask(*m, p.total_degree().unwrap_or(0));
            match deg {
                None => deg = Some(d),
                Some(e) if e != d => return None,
                _ => {}
            }
        }
        deg
    }

    /// `[[mask, polynomial], ...]` in mask order.
    pub fn to_json(&self) -> Value {
        Value::Array(self.terms.iter().map(|(m, p)| json!([mask_string(*m), p.to_json()])).collect())
    }
}

/// The algebra attached to one pencil and one variant, with its basis
/// multiplication table precomputed.
#[derive(Debug)]
pub struct CliffordAlgebra {
    variant: Variant,
    key: u64,
    /// `gram[a][b]` = `q_u(v_a, v_b)` for same-block generators, 0 across blocks.
    gram: Vec<Vec<QPoly>>,
    table: Vec<Combo>,
}

fn pencil_key(p: &InvariantPencil) -> u64 {
    u64::from_str_radix(&p.digest()[..16], 16).expect("hex digest")
}

impl CliffordAlgebra {
    pub fn new(pencil: &InvariantPencil, variant: Variant) -> Arc<Self> {
        let gram: Vec<Vec<QPoly>> = (0..6)
            .map(|a| {
                (0..6)
                    .map(|b| match (is_plus(a), is_plus(b)) {
                        (true, true) => pencil.entry_form(Side::Plus, a, b),
                        (false, false) => pencil.entry_form(Side::Minus, a - 3, b - 3),
                        _ => QPoly::zero(NVARS),
                    })
                    .collect()
            })
            .collect();
        let mut alg = CliffordAlgebra { variant, key: pencil_key(pencil), gram, table: vec![Vec::new(); 64 * 64] };
        let masks = variant.masks();
        let mut memo = HashMap::new();
        let mut table = vec![Vec::new(); 64 * 64];
        for &a in &masks {
            for &b in &masks {
                let mut cur: Combo = vec![(a, QPoly::q_const(NVARS, 1))];
                for g in 0..6 {
                    if b >> g & 1 == 1 {
                        let mut next = BTreeMap::<u8, QPoly>::new();
                        for (m, c) in &cur {
                            for (m2, c2) in alg.times_generator(*m, g, &mut memo) {
                                accumulate(&mut next, m2, &c.mul(&c2));
                            }
                        }
                        cur = next.into_iter().collect();
                    }
                }
                table[(a as usize) << 6 | b as usize] = cur;
            }
        }
        alg.table = table;
        Arc::new(alg)
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// `q_u(v_a, v_b)` as a linear form.
    pub fn gram(&self, a: usize, b: usize) -> &QPoly {
        &self.gram[a][b]
    }

    /// `e_mask · v_g` in normal form.
    fn times_generator(&self, mask: u8, g: usize, memo: &mut HashMap<(u8, usize), Combo>) -> Combo {
        if let Some(c) = memo.get(&(mask, g)) {
            return c.clone();
        }
        let one = QPoly::q_const(NVARS, 1);
        let out = if mask == 0 || top_bit(mask) < g {
            vec![(mask | 1 << g, one)]
        } else {
            let r = top_bit(mask);
            let rest = mask & !(1 << r);
            if r == g {
                vec![(rest, self.gram[g][g].neg())]
            } else {
                // e_rest · v_r · v_g with v_r v_g = s v_g v_r + c.
                let (s, c) = if is_plus(r) == is_plus(g) {
                    (-1, self.gram[r][g].scale(&rat(-2)))
                } else {
                    let s = if self.variant == Variant::Super { -1 } else { 1 };
                    (s, QPoly::zero(NVARS))
                };
                let mut acc = BTreeMap::new();
                for (m, p) in self.times_generator(rest, g, memo) {
                    debug_assert!(m == 0 || top_bit(m) < r);
                    accumulate(&mut acc, m | 1 << r, &p.scale(&rat(s)));
                }
                if !c.is_zero() {
                    accumulate(&mut acc, rest, &c);
                }
                acc.into_iter().collect()
            }
        };
        memo.insert((mask, g), out.clone());
        out
    }

    pub fn basis_product(&self, a: u8, b: u8) -> &[(u8, QPoly)] {
        &self.table[(a as usize) << 6 | b as usize]
    }

    pub fn zero(&self) -> CliffordElement {
        CliffordElement { variant: self.variant, key: self.key, terms: BTreeMap::new() }
    }

    pub fn scalar(&self, p: QPoly) -> CliffordElement {
        self.monomial(0, p)
    }

    pub fn one(&self) -> CliffordElement {
        self.scalar(QPoly::q_const(NVARS, 1))
    }

    pub fn monomial(&self, mask: u8, p: QPoly) -> CliffordElement {
        assert!(mask & !self.variant.support() == 0, "mask outside the variant");
        let mut e = self.zero();
        e.add_term(mask, &p);
        e
    }

    pub fn basis(&self, mask: u8) -> CliffordElement {
        self.monomial(mask, QPoly::q_const(NVARS, 1))
    }

    /// Generator `v_g`, `g ∈ 0..6` in the order `v₁⁺, v₂⁺, v₃⁺, v₁⁻, v₂⁻, v₃⁻`.
    pub fn gen(&self, g: usize) -> CliffordElement {
        self.basis(1 << g)
    }

    fn compatible(&self, e: &CliffordElement) -> Result<(), CliffordError> {
        if e.variant != self.variant {
            return Err(CliffordError::VariantMismatch(self.variant, e.variant));
        }
        if e.key != self.key {
            return Err(CliffordError::PencilMismatch);
        }
        Ok(())
    }

    pub fn mul(&self, a: &CliffordElement, b: &CliffordElement) -> Result<CliffordElement, CliffordError> {
        self.compatible(a)?;
        self.compatible(b)?;
        let mut acc = BTreeMap::new();
        for (ma, pa) in &a.terms {
            for (mb, pb) in &b.terms {
                let ab = pa.mul(pb);
                for (m, c) in self.basis_product(*ma, *mb) {
                    accumulate(&mut acc, *m, &ab.mul(c));
                }
            }
        }
        Ok(CliffordElement { variant: self.variant, key: self.key, terms: acc })
    }

    pub fn commutator(&self, a: &CliffordElement, b: &CliffordElement) -> Result<CliffordElement, CliffordError> {
        Ok(self.mul(a, b)?.sub(&self.mul(b, a)?))
    }

    pub fn anticommutator(&self, a: &CliffordElement, b: &CliffordElement) -> Result<CliffordElement, CliffordError> {
        Ok(self.mul(a, b)?.add(&self.mul(b, a)?))
    }

    /// Checks that `e` commutes with every generator of the variant.
    pub fn is_central(&self, e: &CliffordElement) -> Result<bool, CliffordError> {
        for g in self.variant.generators() {
            if !self.commutator(e, &self.gen(g))?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn accumulate(acc: &mut BTreeMap<u8, QPoly>, m: u8, p: &QPoly) {
    if p.is_zero() {
        return;
    }
    let e = acc.entry(m).or_insert_with(|| QPoly::zero(NVARS));
    e.add_assign_ref(p);
    if e.is_zero() {
        acc.remove(&m);
    }
}

/// Number of monomials of degree `k` in three variables.
fn monomials_count(k: u32) -> usize {
    ((k + 1) * (k + 2) / 2) as usize
}

pub fn monomials_of_degree(k: u32) -> Vec<Monomial> {
    let mut out = Vec::with_capacity(monomials_count(k));
    for a in (0..=k).rev() {
        for b in (0..=k - a).rev() {
            out.push(Monomial::from_exps(&[a, b, k - a - b]));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct VeroneseDims {
    /// Dimension of the weight-n piece for n = 0..=D.
    pub weights: Vec<usize>,
    /// The pieces of the second Veronese subalgebra, `R^(2)_i = R_{2i}`.
    pub even: Vec<usize>,
}

/// Weight-graded dimensions over ℚ, counting pairs (mask, u-monomial).
pub fn veronese_dims(variant: Variant, max_weight: u32) -> VeroneseDims {
    assert!(max_weight <= 12, "weight bound above 12");
    let weights: Vec<usize> = (0..=max_weight)
        .map(|n| {
            variant
                .masks()
                .iter()
                .filter(|m| m.count_ones() <= n && (n - m.count_ones()) % 2 == 0)
                .map(|m| monomials_count((n - m.count_ones()) / 2))
                .sum()
        })
        .collect();
    let even = weights.iter().step_by(2).copied().collect();
    VeroneseDims { weights, even }
}

/// An element of `Cl̃ ⊗ ℚ(i)`, written `re + i·im`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianElement {
    pub re: CliffordElement,
    pub im: CliffordElement,
}

impl GaussianElement {
    pub fn mul(&self, o: &Self, alg: &CliffordAlgebra) -> Result<Self, CliffordError> {
        let re = alg.mul(&self.re, &o.re)?.sub(&alg.mul(&self.im, &o.im)?);
        let im = alg.mul(&self.re, &o.im)?.add(&alg.mul(&self.im, &o.re)?);
        Ok(GaussianElement { re, im })
    }
}

fn plus_count(mask: u8) -> u32 {
    (mask & PLUS_MASK).count_ones()
}

fn even_weight_check(e: &CliffordElement) -> Result<(), CliffordError> {
    if e.variant != Variant::Super {
        return Err(CliffordError::NotHomogeneousSuper);
    }
    for (m, p) in &e.terms {
        if m.count_ones() % 2 == 1 {
            return Err(CliffordError::OddWeight(BiDegree::of_mask(*m, p.total_degree().unwrap_or(0)).weight));
        }
    }
    Ok(())
}

/// The isomorphism from the even-weight part of the super algebra to the even
/// part of the ordinary one: a monomial with `m` plus-generators goes to the same
/// monomial times `i^(m mod 2)`.
///
/// Equivalently `(−1)^(m(m−1)/2) · i^m`. The bare sign `(−1)^(m(m−1)/2)` is not
/// multiplicative once the form is nonzero (see [`phi_sign_only`]), and no real
/// sign choice can be: the two even parts have centres `ℚ[u](√−f₊f₋)` and
/// `ℚ[u](√f₊f₋)`. The image therefore lives in `Cl̃ ⊗ ℚ(i)`.
pub fn phi(e: &CliffordElement, target: &CliffordAlgebra) -> Result<GaussianElement, CliffordError> {
    even_weight_check(e)?;
    let mut re = target.zero();
    let mut im = target.zero();
    for (m, p) in &e.terms {
        if plus_count(*m) % 2 == 0 {
            re.add_term(*m, p);
        } else {
            im.add_term(*m, p);
        }
    }
    Ok(GaussianElement { re, im })
}

/// The mask-preserving sign map `e_A ↦ (−1)^(m(m−1)/2) e_A`.
pub fn phi_sign_only(e: &CliffordElement, target: &CliffordAlgebra) -> Result<CliffordElement, CliffordError> {
    even_weight_check(e)?;
    let mut out = target.zero();
    for (m, p) in &e.terms {
        let k = plus_count(*m);
        let sign = if (k * (k.saturating_sub(1)) / 2) % 2 == 0 { 1 } else { -1 };
        out.add_term(*m, &p.scale(&rat(sign)));
    }
    Ok(out)
}

/// The 32 even-weight standard basis monomials.
pub fn even_masks() -> Vec<u8> {
    (0..=FULL).filter(|m| m.count_ones() % 2 == 0).collect()
}

/// `d = v_a v_b v_c + r_a v_a + r_b v_b + r_c v_c` central in one block, with
/// `d² = sign · f`.
#[derive(Clone, Debug)]
pub struct CentralOdd {
    pub side: Side,
    pub d: CliffordElement,
    pub r: [QPoly; 3],
    pub square: QPoly,
    pub sign: i32,
}

/// Solves for the central odd element of the `side` block.
pub fn central_odd(pencil: &InvariantPencil, side: Side) -> Result<CentralOdd, CliffordError> {
    let alg = CliffordAlgebra::new(pencil, Variant::for_side(side));
    central_odd_in(&alg, pencil, side)
}

pub fn central_odd_in(alg: &CliffordAlgebra, pencil: &InvariantPencil, side: Side) -> Result<CentralOdd, CliffordError> {
    let f = match side {
        Side::Plus => pencil.det_curves().f_plus,
        Side::Minus => pencil.det_curves().f_minus,
    };
    if f.is_zero() {
        return Err(CliffordError::NoCentralElement("the determinant vanishes identically".into()));
    }
    let gens = alg.variant.generators();
    let top = gens.iter().fold(0u8, |m, g| m | 1 << g);
    let lead = alg.basis(top);
    // Unknowns c[3i + k]: coefficient of u_k in r_i.
    let mut rows: BTreeMap<(usize, u8, Monomial), Vec<Rational>> = BTreeMap::new();
    let mut row = |key: (usize, u8, Monomial), col: usize, c: &Rational| {
        rows.entry(key).or_insert_with(|| vec![rat(0); 10])[col] += c;
    };
    for (jdx, &g) in gens.iter().enumerate() {
        let vg = alg.gen(g);
        for (m, p) in alg.commutator(&lead, &vg)?.terms() {
            for (mono, c) in p.terms() {
                row((jdx, m, *mono), 9, &-c.clone());
            }
        }
        for (i, &gi) in gens.iter().enumerate() {
            let com = alg.commutator(&alg.gen(gi), &vg)?;
            for k in 0..3 {
                for (m, p) in com.scale(&QPoly::q_var(NVARS, k)).terms() {
                    for (mono, c) in p.terms() {
                        row((jdx, m, *mono), 3 * i + k, c);
                    }
                }
            }
        }
    }
    let (a, b): (Vec<Vec<Rational>>, Vec<Rational>) = rows
        .into_values()
        .map(|mut r| {
            let rhs = r.pop().unwrap();
            (r, rhs)
        })
        .unzip();
    let system = Matrix::from_rows(a);
    if system.rank() != 9 {
        return Err(CliffordError::NoCentralElement(format!("solution space has dimension {}", 9 - system.rank())));
    }
    let sol = system.solve(&b).ok_or_else(|| CliffordError::NoCentralElement("inconsistent system".into()))?;
    let r: [QPoly; 3] = std::array::from_fn(|i| QPoly::linear_form(&sol[3 * i..3 * i + 3]));
    let mut d = lead;
    for (i, &g) in gens.iter().enumerate() {
        d = d.add(&alg.gen(g).scale(&r[i]));
    }
    let sq = alg.mul(&d, &d)?;
    let square = sq
        .as_scalar()
        .ok_or_else(|| CliffordError::NoCentralElement("square is not a polynomial".into()))?;
    let sign = if square == f {
        1
    } else if square == f.neg() {
        -1
    } else {
        return Err(CliffordError::NoCentralElement("square is not ±f".into()));
    };
    Ok(CentralOdd { side, d, r, square, sign })
}

/// Basis of `{ z : weight(z) = n, [z, v] = 0 for every generator v }` for each
/// `n ≤ max_weight`, by exact kernel computation.
pub fn commutant_basis(alg: &CliffordAlgebra, max_weight: u32) -> Vec<Vec<CliffordElement>> {
    assert!(max_weight <= 8, "weight bound above 8");
    (0..=max_weight).into_par_iter().map(|n| commutant_in_weight(alg, n)).collect()
}

fn commutant_in_weight(alg: &CliffordAlgebra, n: u32) -> Vec<CliffordElement> {
    let mut unknowns: Vec<(u8, Monomial)> = Vec::new();
    for m in alg.variant.masks() {
        let k = m.count_ones();
        if k <= n && (n - k) % 2 == 0 {
            for mono in monomials_of_degree((n - k) / 2) {
                unknowns.push((m, mono));
            }
        }
    }
    let brackets: HashMap<(u8, usize), CliffordElement> = alg
        .variant
        .masks()
        .iter()
        .flat_map(|&m| alg.variant.generators().into_iter().map(move |g| (m, g)))
        .map(|(m, g)| ((m, g), alg.commutator(&alg.basis(m), &alg.gen(g)).expect("same algebra")))
        .collect();
    let mut rows: BTreeMap<(usize, u8, Monomial), Vec<(usize, Rational)>> = BTreeMap::new();
    for (col, (m, mono)) in unknowns.iter().enumerate() {
        for g in alg.variant.generators() {
            for (m2, p) in brackets[&(*m, g)].terms() {
                for (mono2, c) in p.terms() {
                    rows.entry((g, m2, mono2.mul(mono))).or_default().push((col, c.clone()));
                }
            }
        }
    }
    let mut ech = Echelon::new(unknowns.len());
    for (_, r) in rows {
        ech.insert(r);
    }
    ech.kernel(&rat(0))
        .into_iter()
        .map(|v| {
            let mut e = alg.zero();
            for (c, (m, mono)) in v.iter().zip(&unknowns) {
                e.add_term(*m, &QPoly::monomial(NVARS, *mono, c.clone()));
            }
            e
        })
        .collect()
}

/// A relation of the free algebra on `u` and the generators: a sum of words in
/// the generators with polynomial coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Relation {
    pub label: String,
    pub terms: Vec<(Vec<usize>, QPoly)>,
}

impl Relation {
    /// Common bidegree of every (word, u-monomial) term.
    pub fn bidegree(&self) -> Option<BiDegree> {
        let mut deg = None;
        for (word, p) in &self.terms {
            let mask_deg = word.iter().fold(BiDegree { parity: 0, weight: 0 }, |d, &g| {
                d.add(BiDegree { parity: u8::from(!is_plus(g)), weight: 1 })
            });
            for (mono, _) in p.terms() {
                let d = mask_deg.add(BiDegree { parity: 0, weight: 2 * mono.degree() });
                match deg {
                    None => deg = Some(d),
                    Some(e) if e != d => return None,
                    _ => {}
                }
            }
        }
        deg
    }

    /// Image under `(s, λ)`: `vᵢ⁺ ↦ λvᵢ⁺`, `vᵢ⁻ ↦ sλvᵢ⁻`, `uᵢ ↦ λ²uᵢ`.
    pub fn act(&self, s: i64, lambda: &Rational) -> Relation {
        let terms = self
            .terms
            .iter()
            .map(|(word, p)| {
                let mut f = rat(1);
                for &g in word {
                    f *= lambda;
                    if !is_plus(g) {
                        f *= rat(s);
                    }
                }
                let mut q = QPoly::zero(NVARS);
                for (mono, c) in p.terms() {
                    let mut l2 = rat(1);
                    for _ in 0..2 * mono.degree() {
                        l2 *= lambda;
                    }
                    q.add_term(*mono, c * &f * l2);
                }
                (word.clone(), q)
            })
            .collect();
        Relation { label: self.label.clone(), terms }
    }

    /// Copy with a constant term added, which breaks homogeneity. Used as a
    /// negative control for [`relations_equivariant`].
    pub fn corrupted(&self) -> Relation {
        let mut terms = self.terms.clone();
        terms.push((vec![], QPoly::q_const(NVARS, 1)));
        Relation { label: format!("{}*", self.label), terms }
    }

    fn scaled(&self, c: &Rational) -> Relation {
        Relation { label: self.label.clone(), terms: self.terms.iter().map(|(w, p)| (w.clone(), p.scale(c))).collect() }
    }
}

/// Defining relations of the variant.
pub fn defining_relations(pencil: &InvariantPencil, variant: Variant) -> Vec<Relation> {
    let alg_gram = |a: usize, b: usize| -> QPoly {
        match (is_plus(a), is_plus(b)) {
            (true, true) => pencil.entry_form(Side::Plus, a, b),
            (false, false) => pencil.entry_form(Side::Minus, a - 3, b - 3),
            _ => QPoly::zero(NVARS),
        }
    };
    let one = QPoly::q_const(NVARS, 1);
    let gens = variant.generators();
    let mut out = Vec::new();
    for (x, &a) in gens.iter().enumerate() {
        for &b in &gens[x..] {
            let label = format!("{}{}", mask_string(1 << a), mask_string(1 << b));
            if is_plus(a) == is_plus(b) {
                out.push(Relation {
                    label,
                    terms: vec![(vec![a, b], one.clone()), (vec![b, a], one.clone()), (vec![], alg_gram(a, b).scale(&rat(2)))],
                });
            } else {
                let s = if variant == Variant::Super { 1 } else { -1 };
                out.push(Relation { label, terms: vec![(vec![a, b], one.clone()), (vec![b, a], QPoly::q_const(NVARS, s))] });
            }
        }
    }
    out
}

/// Every relation is bihomogeneous, and the action of `(s, λ)` sends it to a
/// scalar multiple of itself. Checked at `λ = 2` and both signs.
pub fn relations_equivariant(rels: &[Relation]) -> bool {
    rels.iter().all(|r| {
        let Some(d) = r.bidegree() else { return false };
        [1i64, -1].iter().all(|&s| {
            let lambda = rat(2);
            let mut factor = rat(1);
            for _ in 0..d.weight {
                factor *= &lambda;
            }
            if d.parity == 1 {
                factor *= rat(s);
            }
            r.act(s, &lambda) == r.scaled(&factor)
        })
    })
}

pub fn equivariance_check(pencil: &InvariantPencil) -> bool {
    relations_equivariant(&defining_relations(pencil, Variant::Ordinary))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pencil::generate;
    use rand::{Rng, SeedableRng};

    fn random_element(alg: &CliffordAlgebra, rng: &mut impl Rng) -> CliffordElement {
        let masks = alg.variant().masks();
        let mut e = alg.zero();
        for _ in 0..3 {
            let m = masks[rng.gen_range(0..masks.len())];
            let p = QPoly::linear_form(&[rat(rng.gen_range(-3..=3)), rat(rng.gen_range(-3..=3)), rat(rng.gen_range(-3..=3))])
                .add(&QPoly::q_const(NVARS, rng.gen_range(-2..=2)));
            e = e.add(&alg.monomial(m, p));
        }
        e
    }

    #[test]
    fn squares_of_generators() {
        let p = generate(1, 5).unwrap();
        let alg = CliffordAlgebra::new(&p, Variant::Super);
        for g in 0..6 {
            let sq = alg.mul(&alg.gen(g), &alg.gen(g)).unwrap();
            assert_eq!(sq.as_scalar().unwrap(), alg.gram(g, g).neg());
        }
    }

    #[test]
    fn cross_relations() {
        let p = generate(1, 5).unwrap();
        let sup = CliffordAlgebra::new(&p, Variant::Super);
        let ord = CliffordAlgebra::new(&p, Variant::Ordinary);
        for a in 0..3 {
            for b in 3..6 {
                assert!(sup.anticommutator(&sup.gen(a), &sup.gen(b)).unwrap().is_zero());
                assert!(ord.commutator(&ord.gen(a), &ord.gen(b)).unwrap().is_zero());
            }
        }
        let same = ord.anticommutator(&ord.gen(0), &ord.gen(1)).unwrap();
        assert_eq!(same.as_scalar().unwrap(), ord.gram(0, 1).scale(&rat(-2)));
    }

    #[test]
    fn mismatched_variants_are_rejected() {
        let p = generate(1, 5).unwrap();
        let sup = CliffordAlgebra::new(&p, Variant::Super);
        let ord = CliffordAlgebra::new(&p, Variant::Ordinary);
        assert!(matches!(sup.mul(&sup.gen(0), &ord.gen(0)), Err(CliffordError::VariantMismatch(..))));
        let other = CliffordAlgebra::new(&generate(2, 5).unwrap(), Variant::Super);
        assert_eq!(sup.mul(&sup.gen(0), &other.gen(0)), Err(CliffordError::PencilMismatch));
    }

    #[test]
    fn multiplication_is_associative() {
        let p = generate(4, 5).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for variant in [Variant::Super, Variant::Ordinary, Variant::PlusOnly, Variant::MinusOnly] {
            let alg = CliffordAlgebra::new(&p, variant);
            for _ in 0..40 {
                let (a, b, c) = (random_element(&alg, &mut rng), random_element(&alg, &mut rng), random_element(&alg, &mut rng));
                let left = alg.mul(&alg.mul(&a, &b).unwrap(), &c).unwrap();
                let right = alg.mul(&a, &alg.mul(&b, &c).unwrap()).unwrap();
                assert_eq!(left, right, "{variant:?}");
            }
        }
    }

    #[test]
    fn bidegrees() {
        let p = generate(1, 5).unwrap();
        let alg = CliffordAlgebra::new(&p, Variant::Ordinary);
        assert_eq!(alg.gen(3).bidegree(), Some(BiDegree { parity: 1, weight: 1 }));
        let x = alg.monomial(0b001001, QPoly::q_var(NVARS, 0));
        assert_eq!(x.bidegree(), Some(BiDegree { parity: 1, weight: 4 }));
        let mixed = alg.gen(0).add(&alg.scalar(QPoly::q_var(NVARS, 0)));
        assert_eq!(mixed.bidegree(), None);
    }

    #[test]
    fn veronese_counts() {
        let d = veronese_dims(Variant::Ordinary, 4);
        assert_eq!(&d.weights[..3], &[1, 6, 18]);
        assert_eq!(d.even, vec![1, 18, d.weights[4]]);
        // Oracle: Σ over masks of size k ≤ n with n − k even of C((n−k)/2 + 2, 2).
        let binom = |n: u32, k: u32| (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64);
        for n in 0..=6u32 {
            let expected: u64 =
                (0..=n.min(6)).filter(|k| (n - k) % 2 == 0).map(|k| binom(6, k) * binom((n - k) / 2 + 2, 2)).sum();
            assert_eq!(veronese_dims(Variant::Super, 6).weights[n as usize] as u64, expected);
        }
    }

    #[test]
    fn mask_strings() {
        assert_eq!(mask_string(0b000001), "100000");
        assert_eq!(mask_string(0b101000), "000101");
        assert_eq!(parse_mask("000101"), Some(0b101000));
        assert_eq!(parse_mask("0001"), None);
    }

    #[test]
    fn diagonal_central_element() {
        let p = crate::pencil::InvariantPencil::diagonal();
        let c = central_odd(&p, Side::Plus).unwrap();
        assert!(c.r.iter().all(|r| r.is_zero()));
        assert_eq!(c.sign, 1);
        assert_eq!(c.square, p.det_curves().f_plus);
    }
}
