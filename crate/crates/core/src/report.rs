//! The verification suite behind `cliffnet check`: one record per check id,
//! assembled into a versioned JSON report.

use std::sync::{Arc, OnceLock};
use std::time::Instant;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::clifford::{
    central_odd, commutant_basis, defining_relations, even_masks, phi, phi_sign_only, relations_equivariant,
    CliffordAlgebra, Variant,
};
use crate::exactalg::{rat, Rational};
use crate::fiber::{
    certify, corank1_points, corank1_quotient, off_curve_points, ordinary_fiber, split_full_rank, CurvePoint, Verdict,
};
use crate::geometry::{curve_points, singular_locus_c, stabilizer, stabilizer_brute, Group, Subgroup};
use crate::pencil::{genericity_check, GenericityReport, InvariantPencil, Side};
use crate::plucker::{adjugate_double_line, annihilator_round_trip, m0_matrix, m0_symbolic, module_rep, segre_identity_check};

pub const SCHEMA_VERSION: u32 = 1;

/// Every check, in the order the full suite runs and reports them.
pub const CHECK_IDS: [&str; 20] = [
    "prop2.2-smoothness",
    "prop2.2-transversality",
    "prop2.5-nine-points",
    "def2.1-rank4",
    "prop3.5-grading",
    "prop3.19-equivariance",
    "prop3.9-phi",
    "prop3.12-dplus-square",
    "prop3.12-dminus-square",
    "prop3.13-center",
    "prop3.17-azumaya",
    "prop3.18-split",
    "prop3.18-corank1",
    "prop2.3-stabilizer",
    "prop2.8-stabilizer",
    "prop4.2-adjugate",
    "prop4.3-singular-locus",
    "prop4.7-annihilator",
    "prop4.8-m0-matrix",
    "prop4.9-segre",
];

/// Checks that do not depend on an instance.
pub const INSTANCE_FREE: [&str; 4] = ["prop2.3-stabilizer", "prop2.8-stabilizer", "prop4.8-m0-matrix", "prop4.9-segre"];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ReportError {
    #[error("unknown check id `{0}`")]
    UnknownId(String),
    #[error("check `{0}` needs an instance file")]
    NeedsInstance(String),
}

#[derive(Clone, Debug)]
pub struct CheckConfig {
    pub primes: Vec<u64>,
    pub points: usize,
    pub max_degree: u32,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig { primes: vec![101, 103, 107], points: 20, max_degree: 6 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub id: String,
    pub status: Status,
    pub detail: Value,
    pub witnesses: Vec<Value>,
    pub notes: Vec<String>,
    pub timing_ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub schema: u32,
    pub tool_version: String,
    pub instance_digest: Option<String>,
    pub seed: Option<u64>,
    pub primes: Vec<u64>,
    pub points: usize,
    pub max_degree: u32,
    pub status: Status,
    pub checks: Vec<CheckRecord>,
    pub timing_ms: f64,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One line per check, then the overall verdict.
    pub fn render(&self) -> String {
        let mut out = String::new();
        if let Some(d) = &self.instance_digest {
            out.push_str(&format!("instance {d}\n"));
        }
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skipped => "SKIP",
            };
            out.push_str(&format!("{tag:4}  {:26} {:>9.1} ms\n", c.id, c.timing_ms));
            for n in &c.notes {
                out.push_str(&format!("      note: {n}\n"));
            }
            if c.status == Status::Fail {
                for w in c.witnesses.iter().take(5) {
                    out.push_str(&format!("      witness: {w}\n"));
                }
            }
        }
        let overall = if self.passed() { "PASS" } else { "FAIL" };
        out.push_str(&format!("overall {overall} ({} checks, {:.1} ms)\n", self.checks.len(), self.timing_ms));
        out
    }
}

struct Outcome {
    pass: bool,
    detail: Value,
    witnesses: Vec<Value>,
    notes: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, detail: Value) -> Self {
        Outcome { pass, detail, witnesses: vec![], notes: vec![] }
    }
}

struct Ctx<'a> {
    pencil: Option<&'a InvariantPencil>,
    cfg: &'a CheckConfig,
    genericity: OnceLock<GenericityReport>,
    ordinary: OnceLock<Arc<CliffordAlgebra>>,
}

impl<'a> Ctx<'a> {
    fn pencil(&self) -> &'a InvariantPencil {
        self.pencil.expect("instance checked before dispatch")
    }

    fn genericity(&self) -> &GenericityReport {
        self.genericity.get_or_init(|| genericity_check(self.pencil(), &self.cfg.primes, true))
    }

    fn ordinary(&self) -> &Arc<CliffordAlgebra> {
        self.ordinary.get_or_init(|| CliffordAlgebra::new(self.pencil(), Variant::Ordinary))
    }

    fn scan_prime(&self) -> u64 {
        self.cfg.primes.first().copied().unwrap_or(101)
    }
}

fn genericity_outcome(g: &GenericityReport, pass: bool, kinds: &[&str]) -> Outcome {
    let mut o = Outcome::new(
        pass,
        json!({
            "points_visited": g.points_visited,
            "resultant_degree": g.resultant_degree,
            "resultant_squarefree": g.resultant_squarefree,
        }),
    );
    o.witnesses = g
        .witnesses
        .iter()
        .filter(|w| kinds.iter().any(|k| w.kind.starts_with(k)))
        .map(|w| serde_json::to_value(w).expect("witness serializes"))
        .collect();
    o
}

fn check_grading(ctx: &Ctx) -> Outcome {
    let p = ctx.pencil();
    let mut per_variant = serde_json::Map::new();
    let mut pass = true;
    for v in [Variant::Super, Variant::Ordinary, Variant::PlusOnly, Variant::MinusOnly] {
        let rels = defining_relations(p, v);
        let homogeneous = rels.iter().filter(|r| r.bidegree().is_some()).count();
        pass &= homogeneous == rels.len();
        per_variant.insert(format!("{v:?}"), json!({ "relations": rels.len(), "homogeneous": homogeneous }));
    }
    let rels = defining_relations(p, Variant::Ordinary);
    let control = rels[0].corrupted().bidegree().is_none();
    pass &= control;
    Outcome::new(pass, json!({ "variants": per_variant, "corrupted_relation_detected": control }))
}

fn check_equivariance(ctx: &Ctx) -> Outcome {
    let p = ctx.pencil();
    let sup = relations_equivariant(&defining_relations(p, Variant::Super));
    let ord = relations_equivariant(&defining_relations(p, Variant::Ordinary));
    let mut rels = defining_relations(p, Variant::Ordinary);
    rels[0] = rels[0].corrupted();
    let control = !relations_equivariant(&rels);
    Outcome::new(sup && ord && control, json!({ "super": sup, "ordinary": ord, "corrupted_relation_detected": control }))
}

fn check_phi(ctx: &Ctx) -> Result<Outcome, String> {
    let p = ctx.pencil();
    let sup = CliffordAlgebra::new(p, Variant::Super);
    let ord = ctx.ordinary();
    let masks = even_masks();
    let results: Vec<(bool, bool, u8, u8)> = masks
        .par_iter()
        .flat_map_iter(|&a| masks.iter().map(move |&b| (a, b)))
        .map(|(a, b)| -> Result<(bool, bool, u8, u8), String> {
            let (x, y) = (sup.basis(a), sup.basis(b));
            let xy = sup.mul(&x, &y).map_err(|e| e.to_string())?;
            let lhs = phi(&xy, ord).map_err(|e| e.to_string())?;
            let rhs = phi(&x, ord).and_then(|px| px.mul(&phi(&y, ord)?, ord)).map_err(|e| e.to_string())?;
            let naive_l = phi_sign_only(&xy, ord).map_err(|e| e.to_string())?;
            let naive_r = ord
                .mul(&phi_sign_only(&x, ord).map_err(|e| e.to_string())?, &phi_sign_only(&y, ord).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            Ok((lhs == rhs, naive_l == naive_r, a, b))
        })
        .collect::<Result<_, _>>()?;
    let failures: Vec<Value> = results
        .iter()
        .filter(|r| !r.0)
        .map(|r| json!([crate::clifford::mask_string(r.2), crate::clifford::mask_string(r.3)]))
        .collect();
    let sign_only_failures = results.iter().filter(|r| !r.1).count();

    let dp = central_odd(p, Side::Plus).map_err(|e| e.to_string())?.d;
    let dm = central_odd(p, Side::Minus).map_err(|e| e.to_string())?.d;
    let anti = sup
        .anticommutator(&dp.reinterpret(Variant::Super), &dm.reinterpret(Variant::Super))
        .map_err(|e| e.to_string())?
        .is_zero();
    let comm = ord
        .commutator(&dp.reinterpret(Variant::Ordinary), &dm.reinterpret(Variant::Ordinary))
        .map_err(|e| e.to_string())?
        .is_zero();
    let mut o = Outcome::new(
        failures.is_empty() && anti && comm,
        json!({
            "pairs": results.len(),
            "multiplicative_pairs": results.len() - failures.len(),
            "sign_only_map_failures": sign_only_failures,
            "super_dplus_dminus_anticommute": anti,
            "ordinary_dplus_dminus_commute": comm,
        }),
    );
    o.witnesses = failures;
    if sign_only_failures > 0 {
        o.notes.push(format!(
            "the real sign map e_A -> (-1)^(m(m-1)/2) e_A fails on {sign_only_failures} pairs; phi carries the factor i^(m mod 2)"
        ));
    }
    Ok(o)
}

fn check_d_square(ctx: &Ctx, side: Side) -> Result<Outcome, String> {
    let c = central_odd(ctx.pencil(), side).map_err(|e| e.to_string())?;
    let f = ctx.pencil().det_curves().get(side).clone();
    let exact = c.square == f.scale(&rat(c.sign as i64));
    let r: Vec<String> = c.r.iter().map(|p| p.render(&["u1", "u2", "u3"])).collect();
    Ok(Outcome::new(exact, json!({ "sign": c.sign, "r": r, "square_matches": exact })))
}

/// Hilbert function of `ℚ[u][y₊, y₋]/(y₊² − f₊, y₋² − f₋)` with `u` in
/// weight 2 and `y±` in weight 3: the series `(1 + t³)² / (1 − t²)³`.
pub fn center_hilbert_function(max_weight: u32) -> Vec<usize> {
    let n = max_weight as usize;
    let free: Vec<usize> = (0..=n).map(|w| if w % 2 == 0 { (w / 2 + 1) * (w / 2 + 2) / 2 } else { 0 }).collect();
    (0..=n)
        .map(|w| {
            let mut d = free[w];
            if w >= 3 {
                d += 2 * free[w - 3];
            }
            if w >= 6 {
                d += free[w - 6];
            }
            d
        })
        .collect()
}

fn check_center(ctx: &Ctx) -> Outcome {
    let d = ctx.cfg.max_degree.min(8);
    let dims: Vec<usize> = commutant_basis(ctx.ordinary(), d).iter().map(|b| b.len()).collect();
    let oracle = center_hilbert_function(d);
    let mut o = Outcome::new(dims == oracle, json!({ "max_weight": d, "commutant_dims": dims, "oracle_dims": oracle }));
    if dims != oracle {
        o.witnesses.push(json!({ "commutant": dims, "expected": oracle }));
    }
    o
}

fn point_label(u: &[Rational]) -> Vec<String> {
    u.iter().map(|x| x.to_string()).collect()
}

fn check_azumaya(ctx: &Ctx) -> Outcome {
    let p = ctx.pencil();
    let pts = off_curve_points(p, ctx.cfg.points, p.seed ^ 0x5eed_0001);
    let alg = ctx.ordinary();
    let results: Vec<(Vec<String>, String, String)> = pts
        .par_iter()
        .map(|u| {
            let (tower, verdict) = match ordinary_fiber(p, alg, u) {
                Ok(f) => {
                    let c = certify(&f);
                    let ok = c.dim == 16 && c.center_dim == 1 && c.radical_dim == 0 && c.verdict == Verdict::MatrixAlgebra(4);
                    (f.zero_scalar().tower().label(), if ok { c.verdict.label() } else { format!("{c:?}") })
                }
                Err(e) => ("-".into(), format!("error: {e}")),
            };
            (point_label(u), tower, verdict)
        })
        .collect();
    let bad: Vec<Value> = results.iter().filter(|r| r.2 != "M4").map(|r| json!({ "u": r.0, "result": r.2 })).collect();
    let mut o = Outcome::new(
        bad.is_empty() && results.len() == ctx.cfg.points,
        json!({
            "points": results.len(),
            "certified_m4": results.len() - bad.len(),
            "fibers": results.iter().map(|r| json!({ "u": r.0, "field": r.1, "verdict": r.2 })).collect::<Vec<_>>(),
        }),
    );
    o.witnesses = bad;
    o
}

fn check_split(ctx: &Ctx) -> Outcome {
    let p = ctx.pencil();
    let pts = off_curve_points(p, ctx.cfg.points, p.seed ^ 0x5eed_0001);
    let results: Vec<(Vec<String>, &str, String)> = pts
        .par_iter()
        .flat_map_iter(|u| Side::both().into_iter().map(move |s| (u, s)))
        .map(|(u, side)| {
            let verdict = match split_full_rank(p, side, u) {
                Ok(s) => {
                    let (a, b) = (certify(&s.corners.0).verdict, certify(&s.corners.1).verdict);
                    if a == Verdict::MatrixAlgebra(2) && b == Verdict::MatrixAlgebra(2) {
                        "M2+M2".to_string()
                    } else {
                        format!("{} / {}", a.label(), b.label())
                    }
                }
                Err(e) => format!("error: {e}"),
            };
            (point_label(u), side.label(), verdict)
        })
        .collect();
    let bad: Vec<Value> =
        results.iter().filter(|r| r.2 != "M2+M2").map(|r| json!({ "u": r.0, "side": r.1, "result": r.2 })).collect();
    let mut o = Outcome::new(
        bad.is_empty(),
        json!({ "splits": results.len(), "certified": results.len() - bad.len(), "idempotent_laws": "exact" }),
    );
    o.witnesses = bad;
    o
}

/// Number of corank-1 points tested on each curve.
pub const CORANK1_POINTS: usize = 5;

fn check_corank1(ctx: &Ctx) -> Outcome {
    let p = ctx.pencil();
    let mut o = Outcome::new(true, Value::Null);
    let mut per_side = serde_json::Map::new();
    for side in Side::both() {
        let pts = corank1_points(p, side, CORANK1_POINTS, p.seed ^ 0x5eed_0002);
        let rational = pts.iter().filter(|c| matches!(c, CurvePoint::Rational(_))).count();
        if rational < pts.len() {
            o.notes.push(format!(
                "E{}: {rational} rational point(s) found on random lines; {} taken over F_{} instead",
                side.label(),
                pts.len() - rational,
                crate::fiber::FALLBACK_PRIME
            ));
        }
        let verdicts: Vec<Value> = pts
            .par_iter()
            .map(|cp| {
                let cert = match cp {
                    CurvePoint::Rational(u) => corank1_quotient(p, side, u).map(|a| certify(&a)),
                    CurvePoint::Finite(u) => corank1_quotient(p, side, u).map(|a| certify(&a)),
                };
                let (coords, field) = cp.label();
                let v = match cert {
                    Ok(c) if c.dim == 4 && c.verdict == Verdict::MatrixAlgebra(2) => "M2".to_string(),
                    Ok(c) => format!("{c:?}"),
                    Err(e) => format!("error: {e}"),
                };
                json!({ "u": coords, "field": field, "verdict": v })
            })
            .collect();
        let bad: Vec<Value> = verdicts.iter().filter(|v| v["verdict"] != "M2").cloned().collect();
        o.pass &= bad.is_empty() && pts.len() == CORANK1_POINTS;
        o.witnesses.extend(bad);
        per_side.insert(side.label().to_string(), json!({ "points": verdicts }));
    }
    o.detail = Value::Object(per_side);
    o
}

fn check_stabilizer(group: Group) -> Outcome {
    let mut rows = Vec::new();
    let mut pass = true;
    for (yp, ym) in [(false, false), (true, false), (false, true), (true, true)] {
        let closed = stabilizer(yp, ym, group).subgroup;
        let mut brute = stabilizer_brute(yp, ym, group);
        brute.sort();
        let mut table = closed.elements();
        table.sort();
        pass &= brute == table;
        rows.push(json!({
            "y_plus_zero": yp,
            "y_minus_zero": ym,
            "subgroup": closed,
            "order": closed.order(),
            "brute_force": brute,
        }));
    }
    let mut o = Outcome::new(pass, json!({ "group": group, "table": rows }));
    if group == Group::G {
        let diag = stabilizer(true, false, Group::G).subgroup == Subgroup::Z2Diagonal;
        o.notes.push(format!("y+ = 0, y- != 0 gives the diagonal subgroup {{(1,1),(-1,-1)}}: {diag}"));
    }
    o
}

fn check_adjugate(ctx: &Ctx) -> Outcome {
    let p = ctx.scan_prime();
    let mut o = Outcome::new(true, Value::Null);
    let mut per_side = serde_json::Map::new();
    for side in Side::both() {
        let s = adjugate_double_line(ctx.pencil(), side, p);
        o.pass &= s.passed();
        o.witnesses.extend(s.failures.iter().map(|f| json!({ "side": side.label(), "failure": f })));
        per_side.insert(side.label().to_string(), json!({ "on_curve": s.on_curve, "off_curve": s.off_curve }));
    }
    o.detail = json!({ "prime": p, "sides": per_side });
    o
}

fn check_singular_locus(ctx: &Ctx) -> Outcome {
    let p = ctx.scan_prime();
    let mut o = Outcome::new(true, Value::Null);
    let mut per_side = serde_json::Map::new();
    for side in Side::both() {
        let curve = curve_points(ctx.pencil(), side, p).len();
        match singular_locus_c(ctx.pencil(), side, p) {
            Ok(sing) => {
                let all_on_zero_section = sing.iter().all(|c| c.y.value() == 0);
                o.pass &= sing.len() == curve && all_on_zero_section;
                per_side.insert(side.label().to_string(), json!({ "curve_points": curve, "singular_points": sing.len() }));
            }
            Err(e) => {
                o.pass = false;
                o.witnesses.push(json!({ "side": side.label(), "error": e.to_string() }));
            }
        }
    }
    o.detail = json!({ "prime": p, "sides": per_side });
    o
}

fn check_annihilator(ctx: &Ctx) -> Result<Outcome, String> {
    let p = ctx.pencil();
    let u = off_curve_points(p, 1, p.seed ^ 0x5eed_0003).remove(0);
    let mut o = Outcome::new(true, Value::Null);
    let mut reps = Vec::new();
    for sign in [1, -1] {
        let rep = module_rep(p, &u, sign).map_err(|e| e.to_string())?;
        let rt = annihilator_round_trip(&rep, 10, p.seed).map_err(|e| e.to_string())?;
        let ok = rep.relations_hold() && rep.d_acts_by_y() && rep.traces_vanish() && rt.passed();
        o.pass &= ok;
        reps.push(json!({
            "y_sign": sign,
            "field": rep.tower.label(),
            "relations": rep.relations_hold(),
            "d_acts_by_y": rep.d_acts_by_y(),
            "traceless": rep.traces_vanish(),
            "round_trips": rt.round_trips,
            "samples": rt.samples,
            "injective": rt.distinct_annihilators,
        }));
    }
    o.detail = json!({ "u": point_label(&u), "modules": reps });
    Ok(o)
}

fn check_m0(seed: u64) -> Outcome {
    let sym = m0_symbolic();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = 0;
    let mut ok = 0;
    while samples < 10 {
        let a: [Rational; 4] = std::array::from_fn(|_| Rational::new(rng.gen_range(-20..=20).into(), rng.gen_range(1..=9).into()));
        if a.iter().all(Zero::is_zero) {
            continue;
        }
        samples += 1;
        if let Ok((_, 3, true)) = m0_matrix(&a) {
            ok += 1;
        }
    }
    Outcome::new(
        sym.passed() && ok == samples,
        json!({ "symbolic": sym, "random_samples": samples, "random_rank3_with_relation": ok }),
    )
}

fn check_segre() -> Outcome {
    let r = segre_identity_check();
    Outcome::new(r.passed(), serde_json::to_value(&r).expect("serializes"))
}

fn dispatch(id: &str, ctx: &Ctx) -> Result<Outcome, String> {
    Ok(match id {
        "prop2.2-smoothness" => {
            let g = ctx.genericity();
            genericity_outcome(g, g.e_plus_smooth && g.e_minus_smooth, &["singular", "vanishing", "f_", "transversality"])
        }
        "prop2.2-transversality" => {
            let g = ctx.genericity();
            genericity_outcome(g, g.transversal, &["non-transverse", "resultant"])
        }
        "prop2.5-nine-points" => {
            let g = ctx.genericity();
            genericity_outcome(g, g.nine_points, &["resultant"])
        }
        "def2.1-rank4" => {
            let g = ctx.genericity();
            genericity_outcome(g, g.rank_ge_4, &["corank"])
        }
        "prop3.5-grading" => check_grading(ctx),
        "prop3.19-equivariance" => check_equivariance(ctx),
        "prop3.9-phi" => check_phi(ctx)?,
        "prop3.12-dplus-square" => check_d_square(ctx, Side::Plus)?,
        "prop3.12-dminus-square" => check_d_square(ctx, Side::Minus)?,
        "prop3.13-center" => check_center(ctx),
        "prop3.17-azumaya" => check_azumaya(ctx),
        "prop3.18-split" => check_split(ctx),
        "prop3.18-corank1" => check_corank1(ctx),
        "prop2.3-stabilizer" => check_stabilizer(Group::CLambda),
        "prop2.8-stabilizer" => check_stabilizer(Group::G),
        "prop4.2-adjugate" => check_adjugate(ctx),
        "prop4.3-singular-locus" => check_singular_locus(ctx),
        "prop4.7-annihilator" => check_annihilator(ctx)?,
        "prop4.8-m0-matrix" => check_m0(ctx.pencil.map(|p| p.seed).unwrap_or(0)),
        "prop4.9-segre" => check_segre(),
        other => return Err(format!("unknown check id `{other}`")),
    })
}

fn run_one(id: &str, ctx: &Ctx) -> CheckRecord {
    let start = Instant::now();
    let out = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| dispatch(id, ctx)));
    let timing_ms = start.elapsed().as_secs_f64() * 1e3;
    let o = match out {
        Ok(Ok(o)) => o,
        Ok(Err(e)) => Outcome { pass: false, detail: Value::Null, witnesses: vec![], notes: vec![format!("error: {e}")] },
        Err(_) => Outcome { pass: false, detail: Value::Null, witnesses: vec![], notes: vec!["internal error".into()] },
    };
    CheckRecord {
        id: id.to_string(),
        status: if o.pass { Status::Pass } else { Status::Fail },
        detail: o.detail,
        witnesses: o.witnesses,
        notes: o.notes,
        timing_ms,
    }
}

pub fn is_check_id(id: &str) -> bool {
    CHECK_IDS.contains(&id)
}

/// Runs the given checks concurrently; records come back in the order of `ids`.
pub fn run_checks(ids: &[&str], pencil: Option<&InvariantPencil>, cfg: &CheckConfig) -> Result<CheckReport, ReportError> {
    for id in ids {
        if !is_check_id(id) {
            return Err(ReportError::UnknownId(id.to_string()));
        }
        if pencil.is_none() && !INSTANCE_FREE.contains(id) {
            return Err(ReportError::NeedsInstance(id.to_string()));
        }
    }
    let start = Instant::now();
    let ctx = Ctx { pencil, cfg, genericity: OnceLock::new(), ordinary: OnceLock::new() };
    let checks: Vec<CheckRecord> = ids.par_iter().map(|id| run_one(id, &ctx)).collect();
    let status = if checks.iter().all(|c| c.status != Status::Fail) { Status::Pass } else { Status::Fail };
    Ok(CheckReport {
        schema: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        instance_digest: pencil.map(|p| p.digest()),
        seed: pencil.map(|p| p.seed),
        primes: cfg.primes.clone(),
        points: cfg.points,
        max_degree: cfg.max_degree,
        status,
        checks,
        timing_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

pub fn run_all(pencil: &InvariantPencil, cfg: &CheckConfig) -> CheckReport {
    run_checks(&CHECK_IDS, Some(pencil), cfg).expect("all ids known and instance present")
}

/// The report as JSON with every `timing_ms` field removed, for comparisons.
pub fn without_timing(report: &CheckReport) -> Value {
    fn strip(v: &mut Value) {
        match v {
            Value::Object(m) => {
                m.remove("timing_ms");
                m.values_mut().for_each(strip);
            }
            Value::Array(a) => a.iter_mut().for_each(strip),
            _ => {}
        }
    }
    let mut v = serde_json::to_value(report).expect("serializes");
    strip(&mut v);
    v
}
