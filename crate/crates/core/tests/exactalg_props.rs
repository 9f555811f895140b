use cliffnet::exactalg::{
    adj3, det3, det_bareiss, rat, resultant_elim, Fp, Matrix, Monomial, MultiPoly, QPoly, Rational, Ring, Scalar,
    SymMatrix,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const P: u64 = 10007;

fn qpoly(nvars: usize, terms: &[(Vec<u32>, i64)]) -> QPoly {
    MultiPoly::from_terms(nvars, terms.iter().map(|(e, c)| (Monomial::from_exps(e), rat(*c))))
}

fn term_strategy(nvars: usize) -> impl Strategy<Value = Vec<(Vec<u32>, i64)>> {
    prop::collection::vec((prop::collection::vec(0u32..3, nvars), -5i64..6), 0..5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn poly_ring_axioms(a in term_strategy(3), b in term_strategy(3), c in term_strategy(3)) {
        let (a, b, c) = (qpoly(3, &a), qpoly(3, &b), qpoly(3, &c));
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert!(a.sub(&a).is_zero());
        prop_assert_eq!(a.add(&b).sub(&b), a);
    }

    #[test]
    fn poly_eval_is_a_homomorphism(a in term_strategy(2), b in term_strategy(2), x in -7i64..8, y in -7i64..8) {
        let (a, b) = (qpoly(2, &a), qpoly(2, &b));
        let pt = [rat(x), rat(y)];
        prop_assert_eq!(a.mul(&b).eval(&pt), a.eval(&pt) * b.eval(&pt));
        prop_assert_eq!(a.add(&b).eval(&pt), a.eval(&pt) + b.eval(&pt));
    }

    #[test]
    fn fp_field_axioms(a in 0i64..P as i64, b in 0i64..P as i64, c in 0i64..P as i64) {
        let (a, b, c) = (Fp::new(a, P), Fp::new(b, P), Fp::new(c, P));
        prop_assert_eq!(a.times(&b.plus(&c)), a.times(&b).plus(&a.times(&c)));
        prop_assert_eq!(a.times(&b).times(&c), a.times(&b.times(&c)));
        prop_assert!(a.plus(&a.negate()).is_zero());
        if !a.is_zero() {
            prop_assert!(a.times(&a.inv().unwrap()).is_one());
            prop_assert!(a.pow(P - 1).is_one());
        }
        if let Some(r) = a.sqrt() {
            prop_assert_eq!(r.times(&r), a);
        }
    }

    #[test]
    fn fp_agrees_with_rational_reduction(n in -1000i64..1000, d in 1i64..1000) {
        let q = Rational::new(n.into(), d.into());
        let f = Fp::from_rational(&q, P).unwrap();
        prop_assert_eq!(f.times(&Fp::new(d, P)), Fp::new(n, P));
    }
}

fn random_sym<S: Scalar>(rng: &mut ChaCha8Rng, make: impl Fn(i64) -> S) -> SymMatrix<S> {
    SymMatrix::from_fn(3, |_, _| make(rng.gen_range(-9..10)))
}

fn check_adjugate<S: Scalar>(m: &SymMatrix<S>) {
    let adj = adj3(m).unwrap();
    let det = det3(m).unwrap();
    let prod = cliffnet::exactalg::matrix::sym_product(&adj, m);
    for (i, row) in prod.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            let want = if i == j { det.clone() } else { det.zero_like() };
            assert_eq!(*x, want, "adj·m ≠ det·I at ({i},{j})");
        }
    }
    let full = Matrix::from_rows(m.to_rows());
    assert_eq!(full.det(), det);
    assert_eq!(det_bareiss(&m.to_rows()).unwrap(), det);
}

#[test]
fn adjugate_identity_over_rationals_and_fp() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        check_adjugate(&random_sym(&mut rng, rat));
        check_adjugate(&random_sym(&mut rng, |n| Fp::new(n, 17)));
    }
}

#[test]
fn adjugate_identity_over_polynomials() {
    // Generic symmetric matrix with independent entries.
    let n = 6;
    let var = |i| QPoly::q_var(n, i);
    let m = SymMatrix::from_rows(&[
        vec![var(0), var(1), var(2)],
        vec![var(1), var(3), var(4)],
        vec![var(2), var(4), var(5)],
    ])
    .unwrap();
    check_adjugate_poly(&m);
}

fn check_adjugate_poly(m: &SymMatrix<QPoly>) {
    let adj = adj3(m).unwrap();
    let det = det3(m).unwrap();
    let prod = cliffnet::exactalg::matrix::sym_product(&adj, m);
    for (i, row) in prod.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            let want = if i == j { det.clone() } else { MultiPoly::zero(6) };
            assert_eq!(*x, want);
        }
    }
    assert_eq!(det.total_degree(), Some(3));
    assert!(det.is_homogeneous());
}

#[test]
fn resultant_matches_product_of_root_differences() {
    // f = Π (x - a_i), g = Π (x - b_j)  ⇒  Res(f, g) = Π (a_i - b_j).
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..30 {
        let ra: Vec<i64> = (0..rng.gen_range(1..4)).map(|_| rng.gen_range(-6..7)).collect();
        let rb: Vec<i64> = (0..rng.gen_range(1..4)).map(|_| rng.gen_range(-6..7)).collect();
        let lin = |r: i64| qpoly(1, &[(vec![1], 1), (vec![0], -r)]);
        let f = ra.iter().fold(QPoly::q_const(1, 1), |acc, &r| acc.mul(&lin(r)));
        let g = rb.iter().fold(QPoly::q_const(1, 1), |acc, &r| acc.mul(&lin(r)));
        let res = resultant_elim(&f, &g, 0).unwrap();
        let want: i64 = ra.iter().flat_map(|a| rb.iter().map(move |b| a - b)).product();
        assert_eq!(res, QPoly::q_const(1, want), "roots {ra:?} {rb:?}");
    }
}

#[test]
fn resultant_eliminates_a_variable() {
    // Res_y(y - x², y - 1) = 1 - x² up to sign, vanishing at x = ±1.
    let f = qpoly(2, &[(vec![0, 1], 1), (vec![2, 0], -1)]);
    let g = qpoly(2, &[(vec![0, 1], 1), (vec![0, 0], -1)]);
    let r = resultant_elim(&f, &g, 1).unwrap();
    assert!(r.support_vars().iter().all(|&v| v == 0));
    for x in [1, -1] {
        assert!(r.eval(&[rat(x), rat(0)]).is_zero());
    }
    assert!(!r.eval(&[rat(2), rat(0)]).is_zero());
}

#[test]
fn euler_identity_for_homogeneous_polynomials() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 4;
    for d in 1..=6u32 {
        let mut p = QPoly::zero(n);
        for _ in 0..8 {
            let mut e = vec![0u32; n];
            for _ in 0..d {
                e[rng.gen_range(0..n)] += 1;
            }
            p.add_term(Monomial::from_exps(&e), rat(rng.gen_range(-5..6)));
        }
        if p.is_zero() {
            continue;
        }
        let euler = (0..n).fold(QPoly::zero(n), |acc, i| acc.add(&QPoly::q_var(n, i).mul(&p.derivative(i))));
        assert_eq!(euler, p.scale(&rat(d as i64)), "degree {d}");
    }
}

#[test]
fn json_round_trip() {
    let p = qpoly(3, &[(vec![2, 0, 1], 3), (vec![0, 1, 0], -7), (vec![0, 0, 0], 1)]);
    let back = QPoly::from_json(3, &p.to_json()).unwrap();
    assert_eq!(back, p);
}
