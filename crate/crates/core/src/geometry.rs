//! Exhaustive finite-field scans over ℙ²(F_p), the singular points of the conic
//! fibrations, and stabilizers of the group actions on the weighted space.

use rayon::prelude::*;
use serde::Serialize;

use crate::exactalg::{adj3, det3, Fp, MultiPoly, QPoly, Ring, Scalar, SymMatrix};
use crate::pencil::{InvariantPencil, Side};

pub const DEFAULT_PRIMES: [u64; 3] = [101, 103, 107];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeomError {
    #[error("polynomial vanishes identically mod {0}")]
    VanishesModP(u64),
    #[error("a coefficient denominator is divisible by {0}")]
    BadReduction(u64),
}

/// A point of ℙ² with first nonzero coordinate equal to 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProjPoint<S> {
    pub coords: [S; 3],
}

impl<S: Scalar> ProjPoint<S> {
    /// `None` for the zero vector.
    pub fn normalized(coords: [S; 3]) -> Option<Self> {
        let lead = coords.iter().find(|c| !c.is_zero())?.inv()?;
        Some(ProjPoint { coords: coords.map(|c| c.times(&lead)) })
    }
}

impl ProjPoint<Fp> {
    pub fn label(&self) -> String {
        let c: Vec<String> = self.coords.iter().map(|x| x.value().to_string()).collect();
        format!("({})", c.join(":"))
    }
}

/// All `p² + p + 1` normalized points of ℙ²(F_p), in a fixed order.
pub fn projective_plane(p: u64) -> Vec<ProjPoint<Fp>> {
    let f = |v: u64| Fp::new(v as i64, p);
    let mut out = Vec::with_capacity((p * p + p + 1) as usize);
    for a in 0..p {
        for b in 0..p {
            out.push(ProjPoint { coords: [f(1), f(a), f(b)] });
        }
    }
    for b in 0..p {
        out.push(ProjPoint { coords: [f(0), f(1), f(b)] });
    }
    out.push(ProjPoint { coords: [f(0), f(0), f(1)] });
    out
}

pub fn reduce_mod(f: &QPoly, p: u64) -> Result<MultiPoly<Fp>, GeomError> {
    if f.terms().any(|(_, c)| Fp::from_rational(c, p).is_none()) {
        return Err(GeomError::BadReduction(p));
    }
    let r = f.map_coeffs(|c| Fp::from_rational(c, p).expect("checked above"));
    if r.is_zero() {
        return Err(GeomError::VanishesModP(p));
    }
    Ok(r)
}

#[derive(Clone, Debug)]
pub struct ScanResult {
    pub points: Vec<ProjPoint<Fp>>,
    pub visited: usize,
}

/// Runs `keep` on every point of ℙ²(F_p) in parallel; the output keeps the
/// enumeration order.
fn scan(p: u64, keep: impl Fn(&[Fp; 3]) -> bool + Sync) -> ScanResult {
    let plane = projective_plane(p);
    let visited = plane.len();
    let points = plane.into_par_iter().filter(|pt| keep(&pt.coords)).collect();
    ScanResult { points, visited }
}

/// Singular points of the plane curve `f = 0` over F_p.
pub fn ff_scan_smooth(f: &QPoly, p: u64) -> Result<ScanResult, GeomError> {
    let fp = reduce_mod(f, p)?;
    let grad = fp.gradient();
    Ok(scan(p, |u| fp.eval(u).is_zero() && grad.iter().all(|g| g.eval(u).is_zero())))
}

/// Common points of `f = g = 0` where the gradients are proportional.
pub fn ff_scan_transversal(f: &QPoly, g: &QPoly, p: u64) -> Result<ScanResult, GeomError> {
    let (fp, gp) = (reduce_mod(f, p)?, reduce_mod(g, p)?);
    let (df, dg) = (fp.gradient(), gp.gradient());
    Ok(scan(p, |u| {
        if !fp.eval(u).is_zero() || !gp.eval(u).is_zero() {
            return false;
        }
        let a: Vec<Fp> = df.iter().map(|d| d.eval(u)).collect();
        let b: Vec<Fp> = dg.iter().map(|d| d.eval(u)).collect();
        (0..3).all(|i| {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            a[j].times(&b[k]).minus(&a[k].times(&b[j])).is_zero()
        })
    }))
}

/// Corank of a 3×3 symmetric matrix, read off from its determinant and adjugate.
pub fn corank3<S: Scalar>(m: &SymMatrix<S>) -> usize {
    if m.is_zero() {
        return 3;
    }
    if !det3(m).expect("3×3").is_zero() {
        return 0;
    }
    if adj3(m).expect("3×3").is_zero() {
        2
    } else {
        1
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CorankScan {
    pub max_corank: usize,
    pub curve_points: usize,
    pub witnesses: Vec<ProjPoint<Fp>>,
}

impl Serialize for ProjPoint<Fp> {
    fn serialize<Sr: serde::Serializer>(&self, s: Sr) -> Result<Sr::Ok, Sr::Error> {
        s.serialize_str(&self.label())
    }
}

/// Largest corank of `q_u^±` along `E±(F_p)`; points of corank at least 2 are
/// returned as witnesses.
pub fn ff_scan_corank(pencil: &InvariantPencil, p: u64) -> CorankScan {
    let per_point: Vec<(usize, usize, bool)> = projective_plane(p)
        .par_iter()
        .map(|pt| {
            let mut on_curve = 0;
            let mut worst = 0;
            for side in Side::both() {
                let c = corank3(&pencil.block_at(side, &pt.coords));
                if c > 0 {
                    on_curve += 1;
                    worst = worst.max(c);
                }
            }
            (on_curve, worst, worst >= 2)
        })
        .collect();
    let plane = projective_plane(p);
    let mut out = CorankScan { max_corank: 0, curve_points: 0, witnesses: vec![] };
    for (pt, (n, c, bad)) in plane.into_iter().zip(per_point) {
        out.curve_points += n;
        out.max_corank = out.max_corank.max(c);
        if bad {
            out.witnesses.push(pt);
        }
    }
    out
}

/// F_p-points of `E_side`.
pub fn curve_points(pencil: &InvariantPencil, side: Side, p: u64) -> Vec<ProjPoint<Fp>> {
    scan(p, |u| det3(&pencil.block_at(side, u)).expect("3×3").is_zero()).points
}

/// A point of the conic fibration `C±`: base point `u ∈ ℙW`, fiber coordinate
/// `y` with `y² = f±(u)`, and `x ∈ ℙV±` with `q_u^±(x) = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConicPoint {
    pub u: ProjPoint<Fp>,
    pub y: Fp,
    pub x: ProjPoint<Fp>,
}

fn quad_form(m: &SymMatrix<Fp>, x: &[Fp; 3]) -> Fp {
    let mut acc = x[0].zero_like();
    for i in 0..3 {
        for j in 0..3 {
            acc = acc.plus(&m.get(i, j).times(&x[i]).times(&x[j]));
        }
    }
    acc
}

/// Rank of the 2×7 Jacobian of `(y² − f(u), xᵀ q_u x)` in the variables
/// `(u₁, u₂, u₃, y, x₁, x₂, x₃)`, tested via its 2×2 minors.
fn jacobian_rank_lt_2(pencil: &InvariantPencil, side: Side, grad_f: &[MultiPoly<Fp>], pt: &ConicPoint) -> bool {
    let u = &pt.u.coords;
    let x = &pt.x.coords;
    let p = pt.y.modulus();
    let mut r1: Vec<Fp> = grad_f.iter().map(|g| g.eval(u).negate()).collect();
    r1.push(pt.y.times(&Fp::new(2, p)));
    r1.extend([Fp::zero(p); 3]);
    let mut r2 = Vec::with_capacity(7);
    for k in 0..3 {
        let mut e = [Fp::zero(p); 3];
        e[k] = Fp::one(p);
        r2.push(quad_form(&pencil.block_at(side, &e), x));
    }
    r2.push(Fp::zero(p));
    let q = pencil.block_at(side, u);
    for i in 0..3 {
        let mut acc = Fp::zero(p);
        for j in 0..3 {
            acc = acc.plus(&q.get(i, j).times(&x[j]));
        }
        r2.push(acc.times(&Fp::new(2, p)));
    }
    (0..7).all(|i| (i + 1..7).all(|j| r1[i].times(&r2[j]).minus(&r1[j].times(&r2[i])).is_zero()))
}

/// Singular points of `C±` over F_p.
///
/// Where `q_u x ≠ 0` the x-block of the second Jacobian row is nonzero and the
/// first row must vanish, which forces `y = 0` and `∇f(u) = 0`, impossible on a
/// smooth `E±`. So only kernel vectors of degenerate fibers are candidates; each
/// is confirmed against the full Jacobian.
pub fn singular_locus_c(pencil: &InvariantPencil, side: Side, p: u64) -> Result<Vec<ConicPoint>, GeomError> {
    let f = reduce_mod(pencil.det_curves().get(side), p)?;
    let grad = f.gradient();
    if !ff_scan_smooth(pencil.det_curves().get(side), p)?.points.is_empty() {
        return Ok(singular_locus_c_brute(pencil, side, p));
    }
    let mut out = Vec::new();
    for u in curve_points(pencil, side, p) {
        let q = pencil.block_at(side, &u.coords);
        for x in kernel_points(&q) {
            let pt = ConicPoint { u: u.clone(), y: Fp::zero(p), x };
            if jacobian_rank_lt_2(pencil, side, &grad, &pt) {
                out.push(pt);
            }
        }
    }
    Ok(out)
}

/// Projective points of `ker q` (all of them, by enumeration of ℙ²).
fn kernel_points(q: &SymMatrix<Fp>) -> Vec<ProjPoint<Fp>> {
    let p = q.get(0, 0).modulus();
    let adj = adj3(q).expect("3×3");
    // Corank 1: any nonzero column of the adjugate spans the kernel.
    for j in 0..3 {
        let col = [adj.get(0, j).clone(), adj.get(1, j).clone(), adj.get(2, j).clone()];
        if let Some(pt) = ProjPoint::normalized(col) {
            return vec![pt];
        }
    }
    projective_plane(p)
        .into_iter()
        .filter(|x| {
            (0..3).all(|i| {
                let mut acc = Fp::zero(p);
                for j in 0..3 {
                    acc = acc.plus(&q.get(i, j).times(&x.coords[j]));
                }
                acc.is_zero()
            })
        })
        .collect()
}

/// Enumerates every `(u, y, x)` and keeps the singular ones; `y` and `−y` are
/// both listed since the base point is normalized.
pub fn singular_locus_c_brute(pencil: &InvariantPencil, side: Side, p: u64) -> Vec<ConicPoint> {
    let f = match reduce_mod(pencil.det_curves().get(side), p) {
        Ok(f) => f,
        Err(_) => return vec![],
    };
    let grad = f.gradient();
    let plane = projective_plane(p);
    plane
        .par_iter()
        .flat_map_iter(|u| {
            let fu = f.eval(&u.coords);
            let q = pencil.block_at(side, &u.coords);
            let ys: Vec<Fp> = (0..p).map(|y| Fp::new(y as i64, p)).filter(|y| y.times(y) == fu).collect();
            let conic: Vec<ProjPoint<Fp>> =
                plane.iter().filter(|x| quad_form(&q, &x.coords).is_zero()).cloned().collect();
            let mut found = Vec::new();
            for y in ys {
                for x in &conic {
                    let pt = ConicPoint { u: u.clone(), y, x: x.clone() };
                    if jacobian_rank_lt_2(pencil, side, &grad, &pt) {
                        found.push(pt);
                    }
                }
            }
            found.into_iter()
        })
        .collect()
}

/// The two groups acting on the weighted space with coordinates `(u, y₊, y₋)`:
/// `Cλ` acts by `(λ²u, λ³y₊, λ³y₋)`, and `G = ℤ₂ × Cλ` lets the sign `s` also
/// multiply `y₋`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Group {
    CLambda,
    G,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Subgroup {
    Trivial,
    /// `{(1, 1), (1, −1)}`: the sign of λ.
    Z2Lambda,
    /// `{(1, 1), (−1, 1)}`: the ℤ₂ factor alone.
    Z2S,
    /// `{(1, 1), (−1, −1)}`.
    Z2Diagonal,
    Z2xZ2,
}

impl Subgroup {
    pub fn order(self) -> usize {
        match self {
            Subgroup::Trivial => 1,
            Subgroup::Z2xZ2 => 4,
            _ => 2,
        }
    }

    pub fn elements(self) -> Vec<(i64, i64)> {
        match self {
            Subgroup::Trivial => vec![(1, 1)],
            Subgroup::Z2Lambda => vec![(1, 1), (1, -1)],
            Subgroup::Z2S => vec![(1, 1), (-1, 1)],
            Subgroup::Z2Diagonal => vec![(1, 1), (-1, -1)],
            Subgroup::Z2xZ2 => vec![(1, 1), (1, -1), (-1, 1), (-1, -1)],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StabilizerDescriptor {
    pub group: Group,
    pub subgroup: Subgroup,
    pub y_plus_zero: bool,
    pub y_minus_zero: bool,
}

/// Closed-form stabilizer of a point with the given vanishing pattern.
pub fn stabilizer(y_plus_zero: bool, y_minus_zero: bool, group: Group) -> StabilizerDescriptor {
    let subgroup = match (group, y_plus_zero, y_minus_zero) {
        (Group::CLambda, true, true) => Subgroup::Z2Lambda,
        (Group::CLambda, _, _) => Subgroup::Trivial,
        (Group::G, false, false) => Subgroup::Trivial,
        (Group::G, true, false) => Subgroup::Z2Diagonal,
        (Group::G, false, true) => Subgroup::Z2S,
        (Group::G, true, true) => Subgroup::Z2xZ2,
    };
    StabilizerDescriptor { group, subgroup, y_plus_zero, y_minus_zero }
}

/// Stabilizer by direct enumeration of `(s, λ) ∈ {±1}²` acting on a sample point.
/// Only `λ = ±1` can fix `u ≠ 0`, since `λ²u = u`.
pub fn stabilizer_brute(y_plus_zero: bool, y_minus_zero: bool, group: Group) -> Vec<(i64, i64)> {
    let u = [1i64, 2, 3];
    let yp = if y_plus_zero { 0 } else { 5 };
    let ym = if y_minus_zero { 0 } else { 7 };
    let signs: &[i64] = match group {
        Group::CLambda => &[1],
        Group::G => &[1, -1],
    };
    let mut out = Vec::new();
    for &s in signs {
        for l in [1i64, -1] {
            let image = (u.map(|x| l * l * x), l * l * l * yp, s * l * l * l * ym);
            if image == (u, yp, ym) {
                out.push((s, l));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pencil::generate;

    fn u(i: usize) -> QPoly {
        QPoly::q_var(3, i)
    }

    #[test]
    fn plane_has_expected_size() {
        for p in [17, 101] {
            let pts = projective_plane(p);
            assert_eq!(pts.len() as u64, p * p + p + 1);
            let set: std::collections::HashSet<_> = pts.iter().map(|q| q.coords.map(|c| c.value())).collect();
            assert_eq!(set.len(), pts.len());
        }
    }

    #[test]
    fn coordinate_triangle_is_singular_at_vertices() {
        let f = u(0).mul(&u(1)).mul(&u(2));
        let s = ff_scan_smooth(&f, 101).unwrap();
        let labels: Vec<String> = s.points.iter().map(|q| q.label()).collect();
        assert_eq!(labels, ["(1:0:0)", "(0:1:0)", "(0:0:1)"]);
        assert_eq!(s.visited, 101 * 101 + 102);
    }

    #[test]
    fn fermat_cubic_is_smooth() {
        let f = u(0).pow(3, &crate::exactalg::rat(1)).add(&u(1).pow(3, &crate::exactalg::rat(1))).add(&u(2).pow(3, &crate::exactalg::rat(1)));
        assert!(ff_scan_smooth(&f, 101).unwrap().points.is_empty());
        assert_eq!(ff_scan_smooth(&QPoly::zero(3), 101).unwrap_err(), GeomError::VanishesModP(101));
    }

    #[test]
    fn tangency_is_detected() {
        // The line u₂ = 0 is tangent to the conic u₂u₃ − u₁² at (0:0:1).
        let conic = u(1).mul(&u(2)).sub(&u(0).mul(&u(0)));
        let f = u(2).mul(&conic);
        let g = u(1).mul(&u(2)).mul(&u(2)).add(&u(1).mul(&u(0)).mul(&u(0)));
        let t = ff_scan_transversal(&f, &g, 101).unwrap();
        assert!(t.points.iter().any(|q| q.label() == "(0:0:1)"));
        let same = ff_scan_transversal(&f, &f, 101).unwrap();
        assert!(same.points.len() > 100);
    }

    #[test]
    fn generated_pencil_scans_clean() {
        let p = generate(42, 5).unwrap();
        let c = p.det_curves();
        for prime in DEFAULT_PRIMES {
            assert!(ff_scan_smooth(&c.f_plus, prime).unwrap().points.is_empty());
            assert!(ff_scan_transversal(&c.f_plus, &c.f_minus, prime).unwrap().points.is_empty());
            assert_eq!(ff_scan_corank(&p, prime).max_corank, 1);
        }
    }

    #[test]
    fn crafted_common_kernel_gives_corank_two() {
        // q⁺_u = diag(u₁, u₁ + u₃, u₂): at (0:1:0) the block is diag(0, 0, 1).
        let mut pencil = generate(1, 3).unwrap();
        pencil.q_plus = [[[1, 0, 0], [0, 1, 0], [0, 0, 0]], [[0, 0, 0], [0, 0, 0], [0, 0, 1]], [[0, 0, 0], [0, 1, 0], [0, 0, 0]]];
        let s = ff_scan_corank(&pencil, 101);
        assert_eq!(s.max_corank, 2);
        assert!(s.witnesses.iter().any(|q| q.label() == "(0:1:0)"));
    }

    #[test]
    fn adjugate_detects_corank_exhaustively_at_17() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let p = 17;
        for _ in 0..2000 {
            let m = SymMatrix::from_fn(3, |_, _| Fp::new(rng.gen_range(0..3), p));
            let rank = crate::exactalg::Matrix::from_rows(m.to_rows()).rank();
            assert_eq!(corank3(&m), 3 - rank);
        }
    }

    #[test]
    fn stabilizer_table_matches_enumeration() {
        for group in [Group::CLambda, Group::G] {
            for yp in [false, true] {
                for ym in [false, true] {
                    let d = stabilizer(yp, ym, group);
                    assert_eq!(stabilizer_brute(yp, ym, group), d.subgroup.elements(), "{group:?} {yp} {ym}");
                }
            }
        }
        assert_eq!(stabilizer(true, true, Group::G).subgroup.order(), 4);
        assert_eq!(stabilizer(false, false, Group::CLambda).subgroup, Subgroup::Trivial);
    }

    #[test]
    fn singular_locus_matches_brute_force_at_17() {
        let pencil = generate(42, 5).unwrap();
        for side in Side::both() {
            if !ff_scan_smooth(pencil.det_curves().get(side), 17).unwrap().points.is_empty() {
                continue;
            }
            let fast = singular_locus_c(&pencil, side, 17).unwrap();
            let brute = singular_locus_c_brute(&pencil, side, 17);
            assert_eq!(fast, brute);
            assert_eq!(fast.len(), curve_points(&pencil, side, 17).len());
        }
    }
}
