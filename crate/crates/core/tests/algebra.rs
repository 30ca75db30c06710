mod common;

use std::collections::BTreeMap;

use bkl_core::algebra::*;
use bkl_core::jet::{origin, Jet};
use bkl_core::scalar::{Scalar, Q};
use common::*;
use proptest::prelude::*;

fn th(i: &[usize]) -> Theta {
    Theta::product(i).unwrap().1
}

fn alg() -> &'static Algebra {
    Algebra::calibrated()
}

#[test]
fn theta_wedge_examples() {
    assert_eq!(theta_wedge(Theta::single(0), Theta::single(1)), Some((1, th(&[0, 1]))));
    assert_eq!(theta_wedge(Theta::single(1), Theta::single(0)), Some((-1, th(&[0, 1]))));
    assert_eq!(theta_wedge(Theta::single(2), Theta::single(2)), None);
    assert_eq!(Theta::product(&[3, 1, 2]), Some((1, th(&[1, 2, 3]))));
    assert_eq!(Theta::product(&[2, 1]), Some((-1, th(&[1, 2]))));
}

#[test]
fn generators() {
    assert_eq!(Gen::ALL.iter().filter(|g| g.is_sigma()).count(), 7);
    assert_eq!(Gen::ALL.iter().filter(|g| g.axis().is_some()).count(), 4);
    for g in Gen::ALL {
        assert_eq!(Gen::parse(g.name()), Some(g));
    }
}

#[test]
fn sigmas_are_lorentz_for_every_admissible_convention() {
    // σ₀ = 1; boosts symmetric and rotations antisymmetric as matrices, all
    // of them η-antisymmetric for η = diag(−1, 1, 1, 1).
    let eta = [-1i64, 1, 1, 1];
    for conv in SignConvention::symmetric() {
        let ms = conv.matrices();
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(ms[0][a][b], (a == b) as i64);
            }
        }
        for (g, m) in ms.iter().enumerate().skip(1) {
            let sym = if g < 4 { 1 } else { -1 };
            for a in 0..4 {
                for b in 0..4 {
                    assert_eq!(m[a][b], sym * m[b][a], "{} generator {g}", conv.label());
                    assert_eq!(eta[a] * m[a][b], -eta[b] * m[b][a], "{} generator {g}", conv.label());
                }
            }
        }
    }
}

#[test]
fn anchor_rep_examples() {
    let b = origin::<Q>();
    let f = &Jet::variable(0, &b, 4) * &Jet::variable(2, &b, 4);
    let ft = Element::term(Theta::single(0), Gen::D0, Jet::one(&b, 4));
    let out = alg().anchor_rep(&ft).apply(0, &BTreeMap::from([(Theta::single(1), f.clone())]));
    assert_eq!(out, BTreeMap::from([(th(&[0, 1]), f.derive(0))]));

    let s0 = Element::term(Theta::ONE, Gen::S0, Jet::one(&b, 4));
    let rep = alg().anchor_rep(&s0);
    let one = Jet::one(&b, 4);
    assert_eq!(rep.apply(0, &BTreeMap::from([(th(&[0, 1]), one.clone())])), BTreeMap::from([(th(&[0, 1]), one.scale(&qi(2)))]));
    assert_eq!(rep.apply(1, &BTreeMap::from([(Theta::ONE, one.clone())])), BTreeMap::from([(Theta::ONE, one.scale(&qi(4)))]));

    let e = Element::term(th(&[0, 3]), Gen::S1, one.clone()).add(&Element::term(th(&[0, 1]), Gen::S3, one.clone()));
    let rep = alg().anchor_rep(&e);
    // Zero on both summands (boosts are traceless on Ω), yet a basis
    // element of G_101 and hence nonzero in 𝓔.
    assert!(rep.is_zero(0.0));
    assert!(!alg().is_zero_in_e(&e, 0.0));
}

fn matmul(a: &[[i64; 4]; 4], b: &[[i64; 4]; 4]) -> [[i64; 4]; 4] {
    let mut c = [[0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            c[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

#[test]
fn rotation_commutator_matches_matrices() {
    let b = origin::<Q>();
    let one = Jet::one(&b, 0);
    let br = alg().bracket(&Element::term(Theta::ONE, Gen::S23, one.clone()), &Element::term(Theta::ONE, Gen::S31, one.clone()));
    let (m23, m31, m12) = (alg().sigma_matrix(Gen::S23), alg().sigma_matrix(Gen::S31), alg().sigma_matrix(Gen::S12));
    let (p, r) = (matmul(&m23, &m31), matmul(&m31, &m23));
    let comm: Vec<i64> = (0..16).map(|k| p[k / 4][k % 4] - r[k / 4][k % 4]).collect();
    let flat12: Vec<i64> = (0..16).map(|k| m12[k / 4][k % 4]).collect();
    let sign = if comm == flat12 { 1 } else if comm.iter().zip(&flat12).all(|(a, b)| *a == -b) { -1 } else { panic!("[σ23, σ31] is not ±σ12") };
    assert_eq!(br, Element::term(Theta::ONE, Gen::S12, one.scale(&qi(sign))));
}

#[test]
fn bracket_examples() {
    let b = origin::<Q>();
    let one = Jet::one(&b, 3);
    let x = Element::term(Theta::single(1), Gen::D1, one.clone());
    let y = Element::term(Theta::single(2), Gen::D2, one.clone());
    assert!(alg().bracket(&x, &y).is_empty());
    let ft = Element::term(Theta::single(0), Gen::D0, one.clone());
    assert!(alg().bracket(&ft, &ft).is_empty());
}

#[test]
fn is_zero_examples() {
    let b = origin::<Q>();
    let one = Jet::one(&b, 2);
    assert!(alg().is_zero_in_e(&Element::<Q>::zero(), 0.0));
    let s0 = Element::term(Theta::ONE, Gen::S0, one);
    assert!(alg().is_zero_in_e(&s0.sub(&s0), 0.0));
    assert!(!alg().is_zero_in_e(&s0, 0.0));
}

#[test]
fn homological_components_examples() {
    let b = origin::<Q>();
    let one = Jet::one(&b, 2);
    let ft = Element::term(Theta::single(0), Gen::D0, one.clone());
    let s1 = Element::term(Theta::ONE, Gen::S1, one.clone());
    let comps = ft.add(&s1).homological_components();
    assert_eq!(comps, BTreeMap::from([(0, s1), (1, ft)]));
}

#[test]
fn element_json_roundtrip() {
    let b = origin::<Q>();
    let e = Element::term(th(&[0, 2]), Gen::S31, Jet::variable(1, &b, 2).scale(&q(3, 4)));
    let s = serde_json::to_string(&e).unwrap();
    let back: Element<Q> = serde_json::from_str(&s).unwrap();
    assert_eq!(back, e);
    let lit = r#"[{"coeff": {"base": ["0","0","0","0"], "order": 1, "coeffs": {"(0,0,0,0)": "2"}}, "theta": [2, 0], "gen": "d1"}]"#;
    let e: Element<Q> = serde_json::from_str(lit).unwrap();
    assert_eq!(e, Element::term(th(&[0, 2]), Gen::D1, Jet::constant(qi(-2), &b, 1)));
}

/// `Σ_ω h_ω ω` with generic polynomial coefficients.
fn test_vector() -> BTreeMap<Theta, Jet<Q>> {
    let b = origin::<Q>();
    let mut v = BTreeMap::new();
    for (k, m) in Theta::all().into_iter().enumerate() {
        let mut h = Jet::constant(qi(k as i64 + 1), &b, 6);
        for axis in 0..4 {
            let x = Jet::variable(axis, &b, 6);
            h = &h + &(&x * &x).scale(&qi((k + axis) as i64 % 3 + 1));
            h = &h + &(&x * &Jet::variable((axis + 1) % 4, &b, 6)).scale(&qi(axis as i64 - k as i64));
        }
        v.insert(m, h);
    }
    v
}

fn sub_maps(a: &BTreeMap<Theta, Jet<Q>>, b: &BTreeMap<Theta, Jet<Q>>, s: &Q) -> BTreeMap<Theta, Jet<Q>> {
    let mut out = a.clone();
    for (m, c) in b {
        let e = out.entry(*m).or_insert_with(|| Jet::zero(c.base(), c.order()));
        *e = &*e - &c.scale(s);
    }
    out.retain(|_, c| !c.truncate(3).is_zero());
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn graded_antisymmetry(p in 0usize..3, qd in 0usize..3, a in arb_element(0, 3), b in arb_element(0, 3), wa in 0usize..6, wb in 0usize..6) {
        let ta = Theta::of_degree(p);
        let tb = Theta::of_degree(qd);
        let a = a.wedge(ta[wa % ta.len()]);
        let b = b.wedge(tb[wb % tb.len()]);
        let sign = if p * qd % 2 == 0 { 1 } else { -1 };
        let s = alg().bracket(&a, &b).add(&alg().bracket(&b, &a).scale_scalar(&qi(sign)));
        prop_assert!(alg().is_zero_in_e(&s.truncate(4), 0.0));
        prop_assert!(alg().bracket(&a, &b).degree().map_or(true, |d| d == p + qd));
    }

    #[test]
    fn graded_jacobi(a in arb_element(1, 3), b in arb_element(0, 3), c in arb_element(1, 3)) {
        // [a,[b,c]] = [[a,b],c] + (−1)^{|a||b|} [b,[a,c]]
        let l = alg().bracket(&a, &alg().bracket(&b, &c));
        let r = alg().bracket(&alg().bracket(&a, &b), &c).add(&alg().bracket(&b, &alg().bracket(&a, &c)));
        prop_assert!(alg().is_zero_in_e(&l.sub(&r).truncate(3), 0.0));
    }

    #[test]
    fn graded_jacobi_degree_one(a in arb_element(1, 3), b in arb_element(1, 3), c in arb_element(0, 3)) {
        let l = alg().bracket(&a, &alg().bracket(&b, &c));
        let r = alg().bracket(&alg().bracket(&a, &b), &c).sub(&alg().bracket(&b, &alg().bracket(&a, &c)));
        prop_assert!(alg().is_zero_in_e(&l.sub(&r).truncate(3), 0.0));
    }

    #[test]
    fn representation_is_a_homomorphism(p in 0usize..3, qd in 0usize..2, a in arb_element(0, 2), b in arb_element(0, 2), wa in 0usize..16, wb in 0usize..16) {
        // Multiply the degree-0 samples by fixed monomials of the wanted degrees.
        let ma = Theta::of_degree(p)[wa % Theta::of_degree(p).len()];
        let mb = Theta::of_degree(qd)[wb % Theta::of_degree(qd).len()];
        let a = a.wedge(ma);
        let b = b.wedge(mb);
        let sign = if p * qd % 2 == 0 { Q::one() } else { -Q::one() };
        let ra = alg().anchor_rep(&a);
        let rb = alg().anchor_rep(&b);
        let rab = alg().anchor_rep(&alg().bracket(&a, &b));
        let v = test_vector();
        for k in 0..2 {
            let lhs = rab.apply(k, &v);
            let comm = sub_maps(&ra.apply(k, &rb.apply(k, &v)), &rb.apply(k, &ra.apply(k, &v)), &sign);
            let diff = sub_maps(&lhs, &comm, &Q::one());
            prop_assert!(diff.is_empty(), "summand {k}: {diff:?}");
        }
    }

    #[test]
    fn squares_of_degree_one_have_degree_two(a in arb_element(1, 3)) {
        let s = alg().bracket(&a, &a);
        prop_assert!(s.is_empty() || s.degree() == Some(2));
    }

    #[test]
    fn homological_components_reassemble(a in arb_element(1, 2), b in arb_element(0, 2), c in arb_element(2, 2)) {
        let e = a.add(&b).add(&c);
        let sum = e.homological_components().values().fold(Element::zero(), |acc, x| acc.add(x));
        prop_assert_eq!(sum, e);
    }
}
