mod common;

use bkl_core::algebra::{Algebra, Element, Gen, Theta};
use bkl_core::automorphisms::*;
use bkl_core::bounce::normalize;
use bkl_core::constraints::{ck_solve, random_germ, random_rational_germ};
use bkl_core::filtration::{basis, filtration_degree, MultiDegree, Variant};
use bkl_core::jet::{origin, Jet};
use bkl_core::mc::{extract_gauge_params, ConstraintData, GaugeParams};
use bkl_core::rees::{mc_residual, Mode, SElement};
use bkl_core::scalar::Q;
use common::{arb_element, q, qi};
use proptest::prelude::*;
use rand::SeedableRng;

const ORDER: usize = 4;

fn alg() -> &'static Algebra {
    Algebra::calibrated()
}

fn morphism(order: usize) -> GroupoidMorphism<Q> {
    let b = origin::<Q>();
    let x = |v: usize| Jet::variable(v, &b, order);
    let a = (&x(1).scale(&q(1, 2)) + &x(3).scale(&q(-1, 3))).add_scalar(&qi(2));
    let bb = &x(2).scale(&q(1, 3)) + &(&x(1) * &x(3));
    let c = (&x(3).scale(&q(1, 2)) - &(&x(2) * &x(2))).add_scalar(&qi(1));
    GroupoidMorphism::new(a, bb, c).unwrap()
}

fn kasner(g0: [Q; 3], order: usize) -> ConstraintData<Q> {
    let b = origin::<Q>();
    let frame = [0, 1, 2].map(|i| [0, 1, 2].map(|k| if i == k { Jet::one(&b, order) } else { Jet::zero(&b, order) }));
    ConstraintData::from_frame(frame, g0.map(|g| Jet::constant(g, &b, order)), Jet::zero(&b, order)).unwrap()
}

fn residual_is_zero_to(x: &SElement<Q>, p: &GaugeParams<Q>, mode: Mode, order: usize) -> bool {
    let mu = p.weights.mu_data().unwrap();
    let r = mc_residual(alg(), x, &mu, mode).unwrap();
    r.parts.values().flatten().all(|(_, c)| c.truncate(order).is_zero())
}

fn close(x: &SElement<Q>, y: &SElement<Q>, order: usize) -> bool {
    let d = free_projection(alg(), &x.sum(&y.map(|_, e| e.neg())));
    d.comps.values().all(|e| e.truncate(order).is_empty())
}

#[test]
fn identity_morphism() {
    let b = origin::<Q>();
    let m = GroupoidMorphism::identity(&b, 6);
    let t = Jet::variable(0, &b, 6);
    let e = Element::term(Theta::product(&[0, 2]).unwrap().1, Gen::D1, t.clone())
        .add(&Element::term(Theta::single(3), Gen::S12, t.add_scalar(&qi(3))));
    let img = m.apply(&e).unwrap();
    assert!(alg().is_zero_in_e(&img.sub(&e), 0.0));
}

#[test]
fn morphism_validation() {
    let b = origin::<Q>();
    let one = Jet::one(&b, 3);
    let z = Jet::zero(&b, 3);
    assert!(matches!(GroupoidMorphism::new(-&one, z.clone(), one.clone()), Err(AutoError::Positivity(_))));
    assert!(matches!(GroupoidMorphism::new(one.clone(), Jet::variable(0, &b, 3), one.clone()), Err(AutoError::Positivity(_))));
    let m = GroupoidMorphism::new(one.clone(), one.clone(), one.clone()).unwrap();
    // b(0) = 1 moves the source to t = 1; jets at the origin are rejected.
    assert_eq!(m.pull(&one), Err(AutoError::BasePoint));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn groupoid_morphisms_are_homomorphisms(p in 0usize..3, r in 0usize..3, x in arb_element(1, 2), y in arb_element(1, 2)) {
        let (x, y) = (arb_degree(x, p), arb_degree(y, r));
        let m = morphism(6);
        let lhs = m.apply(&alg().bracket(&x, &y)).unwrap().truncate(3);
        let rhs = alg().bracket(&m.apply(&x).unwrap(), &m.apply(&y).unwrap()).truncate(3);
        prop_assert!(alg().is_zero_in_e(&lhs.sub(&rhs), 0.0));
    }

    #[test]
    fn reflections_are_homomorphisms(x in arb_element(1, 2), y in arb_element(2, 2)) {
        let lhs = reflect(&alg().bracket(&x, &y), -1).truncate(4);
        let rhs = alg().bracket(&reflect(&x, -1), &reflect(&y, -1)).truncate(4);
        prop_assert!(alg().is_zero_in_e(&lhs.sub(&rhs), 0.0));
    }
}

/// Moves an element to θ-degree `p` by wedging with `θ₀` or stripping it.
fn arb_degree(x: Element<Q>, p: usize) -> Element<Q> {
    match p {
        0 => x.map_terms(|_, g, c| Element::term(Theta::ONE, g, c.clone())),
        1 => x,
        _ => {
            let w = x.wedge(Theta::single(0));
            if w.is_empty() { x.wedge(Theta::single(1)) } else { w }
        }
    }
}

#[test]
fn groupoid_morphisms_preserve_filtration_degrees() {
    let m = morphism(4);
    let one = Jet::one(&origin(), 4);
    for b in basis() {
        let e = Element::from_pattern(&b.pattern, &one);
        let img = m.apply(&e).unwrap().truncate(2);
        assert_eq!(filtration_degree(alg(), &img, Variant::Three, 0.0), filtration_degree(alg(), &e, Variant::Three, 0.0), "basis element {}", b.index);
    }
}

#[test]
fn groupoid_morphisms_preserve_mc() {
    let m = morphism(ORDER + 1);
    let p = kasner([qi(1), qi(-4), q(-4, 3)], ORDER + 1).sufficient_gauge();
    let x = m.apply_s(&p.assemble().unwrap()).unwrap();
    let mut pulled = p.clone();
    pulled.weights = m.pull_weights(&p.weights).unwrap();
    for mode in [Mode::Free, Mode::Bounce, Mode::E] {
        assert!(residual_is_zero_to(&x, &pulled, mode, ORDER - 2), "{mode:?}");
    }
}

#[test]
fn case_i_on_the_time_derivation() {
    let b = origin::<Q>();
    let f = (&Jet::variable(0, &b, 6) + &Jet::variable(2, &b, 6).scale(&qi(3))).add_scalar(&qi(1));
    let p = GaugeParams::zero(&b, 6);
    let mu = p.weights.mu_data().unwrap();
    let d0 = SElement::single(MultiDegree::ZERO, Element::term(Theta::single(0), Gen::D0, Jet::one(&b, 6)));
    for i in 1..=3 {
        let out = apply_nilpotent(alg(), &nilpotent_generator(i, false, &f), &d0, &mu).unwrap();
        let mut alpha = MultiDegree::new(1, 1, 1);
        alpha.0[i - 1] = 0;
        let mut expected = d0.clone();
        let e = Element::term(Theta::single(0), Gen::boost(i), -&f.derive(0)).add(&Element::term(Theta::single(i), Gen::D0, f.clone()));
        expected.add(alpha, e);
        assert!(close(&out, &expected, 5), "i = {i}");
    }
}

#[test]
fn case_ii_fixes_the_kasner_term() {
    let b = origin::<Q>();
    let f = Jet::variable(1, &b, 6).add_scalar(&qi(2));
    let mu = GaugeParams::<Q>::zero(&b, 6).weights.mu_data().unwrap();
    for i in 1..=3 {
        let k = Element::term(Theta::single(0), Gen::S0, Jet::one(&b, 6)).add(&Element::term(Theta::single(i), Gen::boost(i), Jet::one(&b, 6)));
        let e = SElement::single(MultiDegree::ZERO, k);
        let out = apply_nilpotent(alg(), &nilpotent_generator(i, true, &f), &e, &mu).unwrap();
        assert!(close(&out, &e, 6));
    }
}

#[test]
fn nilpotent_generators_are_validated() {
    let b = origin::<Q>();
    let one = Jet::one(&b, 3);
    let mu = GaugeParams::<Q>::zero(&b, 3).weights.mu_data().unwrap();
    let e = SElement::single(MultiDegree::ZERO, Element::term(Theta::single(0), Gen::D0, one.clone()));
    let at_zero = SElement::single(MultiDegree::ZERO, Element::term(Theta::ONE, Gen::S1, one.clone()));
    assert!(matches!(apply_nilpotent(alg(), &at_zero, &e, &mu), Err(AutoError::Generator(_))));
    let degree_one = SElement::single(MultiDegree::new(0, 1, 1), Element::term(Theta::single(1), Gen::D1, one.clone()));
    assert!(matches!(apply_nilpotent(alg(), &degree_one, &e, &mu), Err(AutoError::Generator(_))));
    // σ₂ alone is not in F₀₁₁ (its 1-index degree is odd).
    let outside = SElement::single(MultiDegree::new(0, 1, 1), Element::term(Theta::ONE, Gen::S2, one));
    assert!(matches!(apply_nilpotent(alg(), &outside, &e, &mu), Err(AutoError::Generator(_))));
}

#[test]
fn nilpotents_preserve_mc() {
    let b = origin::<Q>();
    let p = kasner([qi(1), qi(-4), q(-4, 3)], ORDER + 1).sufficient_gauge();
    let mu = p.weights.mu_data().unwrap();
    let x = p.assemble_with(&mu);
    let f = (&Jet::variable(1, &b, ORDER + 1) * &Jet::variable(0, &b, ORDER + 1)).add_scalar(&q(1, 2));
    for (i, rotation) in [(1, false), (2, true), (3, false), (1, true)] {
        let y = apply_nilpotent(alg(), &nilpotent_generator(i, rotation, &f), &x, &mu).unwrap();
        assert!(!close(&x, &y, ORDER - 1));
        assert!(residual_is_zero_to(&y, &p, Mode::Free, ORDER - 2), "i = {i}, rotation = {rotation}");
    }
}

#[test]
fn admissible_coefficients_solve_their_flow() {
    let b = origin::<Q>();
    let lambda = Jet::variable(2, &b, 5).add_scalar(&q(3, 2));
    let f0 = Jet::variable(1, &b, 5).add_scalar(&qi(1));
    let f = solve_t_flow(&lambda, &f0);
    assert_eq!(f.restrict(0), f0.truncate(f.order()));
    assert_eq!(f.derive(0).truncate(3), (&lambda * &f).truncate(3));
}

#[test]
fn gauge_normalize_fixes_the_sufficient_gauge() {
    let p = kasner([qi(1), qi(-4), q(-4, 3)], ORDER).sufficient_gauge();
    let n = gauge_normalize(alg(), &p, 0.0).unwrap();
    for i in 0..3 {
        for m in 0..4 {
            assert_eq!(n.beta[i][m], p.beta[i][m]);
        }
        for a in 0..7 {
            assert_eq!(n.gamma[i][a], p.gamma[i][a]);
        }
    }
}

#[test]
fn gauge_normalize_removes_beta0_and_gamma5() {
    let b = origin::<Q>();
    let o = ORDER + 1;
    let p = kasner([qi(1), qi(-4), q(-4, 3)], o).sufficient_gauge();
    let mu = p.weights.mu_data().unwrap();
    let g0 = p.gamma.clone().map(|g| g[0].clone());
    let f1 = admissible_coefficient(1, false, &Jet::variable(2, &b, o).add_scalar(&q(1, 3)), &g0, &mu);
    let f2 = admissible_coefficient(2, true, &Jet::variable(3, &b, o).add_scalar(&qi(-1)), &g0, &mu);
    let mut x = p.assemble_with(&mu);
    x = apply_nilpotent(alg(), &nilpotent_generator(1, false, &f1), &x, &mu).unwrap();
    x = apply_nilpotent(alg(), &nilpotent_generator(2, true, &f2), &x, &mu).unwrap();
    let perturbed = extract_gauge_params(alg(), &x, p.weights.clone(), 0.0).unwrap();
    assert!(!perturbed.beta[0][0].is_zero());
    assert!(!perturbed.gamma[1][5].is_zero());
    assert!(residual_is_zero_to(&x, &p, Mode::Free, ORDER - 2));

    let n = gauge_normalize(alg(), &perturbed, 0.0).unwrap();
    let cut = ORDER - 2;
    for i in 0..3 {
        assert!(n.beta[i][0].truncate(cut).is_zero());
        assert!(n.gamma[i][5].truncate(cut).is_zero());
        assert!(n.gamma[i][6].truncate(cut).is_zero());
        for m in 0..4 {
            assert_eq!(n.beta[i][m].truncate(cut), p.beta[i][m].truncate(cut));
        }
        for a in 0..7 {
            assert_eq!(n.gamma[i][a].truncate(cut), p.gamma[i][a].truncate(cut), "gamma_{}^{a}", i + 1);
        }
    }
    assert!(residual_is_zero_to(&n.assemble().unwrap(), &n, Mode::Free, cut - 1));
}

#[test]
fn gauge_normalize_detects_degenerate_kasner() {
    let b = origin::<Q>();
    let mut p = kasner([q(1, 2), qi(-1), qi(-1)], ORDER).sufficient_gauge();
    p.gamma[0][5] = Jet::one(&b, ORDER);
    assert!(matches!(gauge_normalize(alg(), &p, 0.0), Err(AutoError::Degenerate(_))));
}

#[test]
fn factorization_exact() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
    let b = origin::<Q>();
    let n = 3;
    let c = ck_solve(&random_rational_germ(&mut rng, &b, n, 4)).unwrap();
    let x = |v: usize| Jet::variable(v, &b, n);
    let a = (&x(1).scale(&q(1, 2)) + &x(3).scale(&q(1, 5))).add_scalar(&qi(1));
    let log_b = x(2).scale(&q(1, 3));
    for sigma in [1, -1] {
        let (lhs, rhs) = factorization_sides(alg(), &c, &a, &log_b, sigma).unwrap();
        assert!(close(&lhs, &rhs, n - 2), "sigma = {sigma}");
    }
}

#[test]
fn factorization_of_the_normalization() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let g = random_germ(&mut rng, &origin(), 4, 0.2);
    let c = ck_solve(&g).unwrap();
    let nz = normalize(&c).unwrap();
    let (lhs, rhs) = factorization_sides(alg(), &c, &nz.a, &nz.log_b, nz.sigma).unwrap();
    let d = free_difference(alg(), &lhs.truncate(2), &rhs.truncate(2));
    assert!(d < 1e-10, "difference {d:e}");
}
