mod common;

use cliffnet::clifford::{
    central_odd, even_masks, phi, phi_sign_only, CliffordAlgebra, CliffordElement, Variant,
};
use cliffnet::exactalg::QPoly;
use cliffnet::pencil::{InvariantPencil, Side};
use common::instance;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_element(alg: &CliffordAlgebra, rng: &mut impl Rng) -> CliffordElement {
    let masks = alg.variant().masks();
    let mut e = alg.zero();
    for _ in 0..3 {
        let m = masks[rng.gen_range(0..masks.len())];
        let c = QPoly::q_const(3, rng.gen_range(-3..=3));
        let p = match rng.gen_range(0..4) {
            3 => c,
            k => c.mul(&QPoly::q_var(3, k)),
        };
        e = e.add(&alg.monomial(m, p));
    }
    e
}

#[test]
fn associativity_on_random_triples() {
    let p = instance(3);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for v in [Variant::Super, Variant::Ordinary, Variant::PlusOnly, Variant::MinusOnly] {
        let alg = CliffordAlgebra::new(&p, v);
        for _ in 0..200 {
            let (a, b, c) = (random_element(&alg, &mut rng), random_element(&alg, &mut rng), random_element(&alg, &mut rng));
            let left = alg.mul(&alg.mul(&a, &b).unwrap(), &c).unwrap();
            let right = alg.mul(&a, &alg.mul(&b, &c).unwrap()).unwrap();
            assert_eq!(left, right, "{v:?}");
        }
    }
}

#[test]
fn central_element_matches_hand_expansion() {
    // With vᵢvⱼ + vⱼvᵢ = −2qᵢⱼ, d = v₁v₂v₃ + q₂₃v₁ − q₁₃v₂ + q₁₂v₃ and d² = f.
    for seed in [1, 2, 3] {
        let p = instance(seed);
        for side in Side::both() {
            let c = central_odd(&p, side).unwrap();
            let q = |i, j| p.entry_form(side, i, j);
            assert_eq!(c.r[0], q(1, 2));
            assert_eq!(c.r[1], q(0, 2).neg());
            assert_eq!(c.r[2], q(0, 1));
            assert_eq!(c.sign, 1);
        }
    }
}

#[test]
fn diagonal_central_element() {
    let p = InvariantPencil::diagonal();
    let c = central_odd(&p, Side::Plus).unwrap();
    assert!(c.r.iter().all(|r| r.is_zero()));
    let u1u2u3 = QPoly::q_var(3, 0).mul(&QPoly::q_var(3, 1)).mul(&QPoly::q_var(3, 2));
    assert_eq!(c.square, u1u2u3);
}

#[test]
fn d_plus_d_minus_commutation() {
    for seed in [1, 2] {
        let p = instance(seed);
        let dp = central_odd(&p, Side::Plus).unwrap().d;
        let dm = central_odd(&p, Side::Minus).unwrap().d;
        let sup = CliffordAlgebra::new(&p, Variant::Super);
        let ord = CliffordAlgebra::new(&p, Variant::Ordinary);
        let (sp, sm) = (dp.reinterpret(Variant::Super), dm.reinterpret(Variant::Super));
        assert!(sup.anticommutator(&sp, &sm).unwrap().is_zero());
        assert!(!sup.commutator(&sp, &sm).unwrap().is_zero());
        let (op, om) = (dp.reinterpret(Variant::Ordinary), dm.reinterpret(Variant::Ordinary));
        assert!(ord.commutator(&op, &om).unwrap().is_zero());
        assert!(ord.is_central(&op).unwrap());
        assert!(!sup.is_central(&sp).unwrap());
    }
}

#[test]
fn literal_sign_map_is_not_multiplicative() {
    let p = instance(1);
    let sup = CliffordAlgebra::new(&p, Variant::Super);
    let ord = CliffordAlgebra::new(&p, Variant::Ordinary);
    // (v₁⁺v₁⁻)² = −q⁺₁₁q⁻₁₁ in the super algebra but +q⁺₁₁q⁻₁₁ in the ordinary one.
    let x = sup.basis(0b001001);
    let xx = sup.mul(&x, &x).unwrap();
    let lhs = phi_sign_only(&xx, &ord).unwrap();
    let px = phi_sign_only(&x, &ord).unwrap();
    assert_ne!(lhs, ord.mul(&px, &px).unwrap());
    let g = phi(&x, &ord).unwrap();
    assert_eq!(phi(&xx, &ord).unwrap(), g.mul(&g, &ord).unwrap());
}

#[test]
fn phi_on_random_even_elements() {
    let p = instance(2);
    let sup = CliffordAlgebra::new(&p, Variant::Super);
    let ord = CliffordAlgebra::new(&p, Variant::Ordinary);
    let masks = even_masks();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pick = |rng: &mut ChaCha8Rng| {
        (0..3).fold(sup.zero(), |e, _| {
            let m = masks[rng.gen_range(0..masks.len())];
            let c = QPoly::q_const(3, rng.gen_range(-4..=4));
            e.add(&sup.monomial(m, c))
        })
    };
    for _ in 0..50 {
        let (x, y) = (pick(&mut rng), pick(&mut rng));
        let lhs = phi(&sup.mul(&x, &y).unwrap(), &ord).unwrap();
        let rhs = phi(&x, &ord).unwrap().mul(&phi(&y, &ord).unwrap(), &ord).unwrap();
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn phi_rejects_odd_elements() {
    let p = instance(1);
    let sup = CliffordAlgebra::new(&p, Variant::Super);
    let ord = CliffordAlgebra::new(&p, Variant::Ordinary);
    assert!(phi(&sup.gen(0), &ord).is_err());
}
