mod common;

use cliffnet::clifford::{CliffordAlgebra, Variant};
use cliffnet::exactalg::{rat, Fp, Rational, Scalar, SymMatrix};
use cliffnet::fiber::{
    certify, corank1_points, corank1_quotient, off_curve_points, ordinary_fiber, split_full_rank, CurvePoint, FiberError,
    FinAlg, Verdict,
};
use cliffnet::pencil::{InvariantPencil, Side};
use cliffnet::plucker::is_double_line;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn non_associative_table_is_rejected() {
    // e₁e₁ = e₂ and e₂e₁ = e₀ but e₁e₂ = 0, so (e₁e₁)e₁ ≠ e₁(e₁e₁).
    let one = rat(1);
    let table = vec![
        vec![vec![(0, one.clone())], vec![(1, one.clone())], vec![(2, one.clone())]],
        vec![vec![(1, one.clone())], vec![(2, one.clone())], vec![]],
        vec![vec![(2, one.clone())], vec![(0, one.clone())], vec![]],
    ];
    assert!(matches!(
        FinAlg::new(table, vec![rat(1), rat(0), rat(0)], rat(0)),
        Err(FiberError::NotAssociative(..))
    ));
}

#[test]
fn tensor_and_quotient_behave() {
    let m2 = FinAlg::matrix_algebra(2, &rat(0));
    let dual = FinAlg::monogenic(&[rat(0), rat(0)]);
    let t = m2.tensor(&dual).unwrap();
    t.check_associative().unwrap();
    assert_eq!(t.dim(), 8);
    assert_eq!(t.radical_dim(), 4);
    assert_eq!(t.center_dim(), 2);
    assert!(matches!(certify(&t).verdict, Verdict::Fails(_)));

    // Killing the nilpotent recovers M₂.
    let mut eps = vec![rat(0); 8];
    eps[1] = rat(1);
    let q = t.quotient(&[eps]).unwrap();
    q.check_associative().unwrap();
    assert_eq!(certify(&q).verdict, Verdict::MatrixAlgebra(2));

    let m4 = m2.tensor(&m2).unwrap();
    m4.check_associative().unwrap();
    assert_eq!(certify(&m4).verdict, Verdict::MatrixAlgebra(4));
}

#[test]
fn corank1_quotients_are_associative_matrix_algebras() {
    let p = common::instance(42);
    for side in Side::both() {
        for cp in corank1_points(&p, side, 3, 5) {
            let alg = match &cp {
                CurvePoint::Rational(u) => {
                    let a = corank1_quotient(&p, side, u).unwrap();
                    a.check_associative().unwrap();
                    certify(&a)
                }
                CurvePoint::Finite(u) => {
                    let a = corank1_quotient(&p, side, u).unwrap();
                    a.check_associative().unwrap();
                    certify(&a)
                }
            };
            assert_eq!(alg.verdict, Verdict::MatrixAlgebra(2), "{side:?} at {:?}", cp.label());
        }
    }
}

#[test]
fn corank1_quotient_rejects_bad_points() {
    let d = InvariantPencil::diagonal();
    let u = [rat(1), rat(0), rat(0)];
    assert!(matches!(corank1_quotient(&d, Side::Plus, &u), Err(FiberError::Corank(2))));
    let v = [rat(1), rat(1), rat(1)];
    assert!(matches!(corank1_quotient(&d, Side::Plus, &v), Err(FiberError::OffCurve)));
    let w = [rat(0), rat(1), rat(1)];
    assert_eq!(certify(&corank1_quotient(&d, Side::Plus, &w).unwrap()).verdict, Verdict::MatrixAlgebra(2));
}

#[test]
fn ordinary_fiber_is_associative_and_split() {
    let p = common::instance(42);
    let alg = CliffordAlgebra::new(&p, Variant::Ordinary);
    let u = off_curve_points(&p, 1, 9).remove(0);
    let f = ordinary_fiber(&p, &alg, &u).unwrap();
    f.check_associative().unwrap();
    assert_eq!(certify(&f).verdict, Verdict::MatrixAlgebra(4));

    let s = split_full_rank(&p, Side::Plus, &u).unwrap();
    assert_eq!(certify(&s.corners.0).verdict, Verdict::MatrixAlgebra(2));
    assert_eq!(certify(&s.corners.1).verdict, Verdict::MatrixAlgebra(2));
    assert!(matches!(ordinary_fiber(&p, &alg, &[rat(0), rat(0), rat(0)]), Err(_)));
}

fn random_rank<S: Scalar>(rng: &mut ChaCha8Rng, r: usize, make: impl Fn(i64) -> S) -> SymMatrix<S> {
    // Σ c_k v_k v_kᵀ with random independent v_k.
    loop {
        let vs: Vec<[S; 3]> = (0..r).map(|_| std::array::from_fn(|_| make(rng.gen_range(-8..9)))).collect();
        let cs: Vec<S> = (0..r).map(|_| make(rng.gen_range(1..9))).collect();
        let m = SymMatrix::from_fn(3, |i, j| {
            let mut acc = make(0);
            for (v, c) in vs.iter().zip(&cs) {
                acc.add_assign_ref(&c.times(&v[i]).times(&v[j]));
            }
            acc
        });
        if cliffnet::exactalg::Matrix::from_rows(m.to_rows()).rank() == r {
            return m;
        }
    }
}

#[test]
fn adjugate_rank_stratification() {
    use cliffnet::exactalg::{adj3, Matrix};
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let rank = |m: &SymMatrix<Fp>| Matrix::from_rows(m.to_rows()).rank();
    for _ in 0..100 {
        let f = |n| Fp::new(n, 17);
        let m3 = random_rank(&mut rng, 3, f);
        assert_eq!(rank(&adj3(&m3).unwrap()), 3);
        let m2 = random_rank(&mut rng, 2, f);
        assert_eq!(rank(&adj3(&m2).unwrap()), 1);
        assert!(is_double_line(&m2));
        let m1 = random_rank(&mut rng, 1, f);
        assert!(adj3(&m1).unwrap().is_zero());
        assert!(!is_double_line(&m1));
    }
    let q: SymMatrix<Rational> = random_rank(&mut rng, 2, rat);
    assert!(is_double_line(&q));
}
