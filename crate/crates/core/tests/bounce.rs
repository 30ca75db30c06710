mod common;

use bkl_core::algebra::Algebra;
use bkl_core::bounce::*;
use bkl_core::constraints::{ck_solve, random_germ};
use bkl_core::jet::{base_point, origin, Base, Jet};
use bkl_core::mc::{ConstraintData, Weights};
use bkl_core::scalar::{Scalar, Q};
use common::{q, qi};
use rand::{Rng, SeedableRng};

const ORDER: usize = 5;

fn cj<S: Scalar>(v: S, base: &Base<S>) -> Jet<S> {
    Jet::constant(v, base, ORDER)
}

/// Constant frame data with `[D₂, D₃] = k D₁` realised by `D₃ = ∂₃ + k x² ∂₁`.
fn bianchi_ii_with<S: Scalar>(k: S, g0: [S; 3], base: &Base<S>) -> ConstraintData<S> {
    let z = || cj(S::zero(), base);
    let o = || cj(S::one(), base);
    let x2 = &Jet::variable(2, base, ORDER) - &cj(base[2].clone(), base);
    let frame = [[o(), z(), z()], [z(), o(), z()], [x2.scale(&k), z(), o()]];
    ConstraintData::from_frame(frame, g0.map(|g| cj(g, base)), z()).unwrap()
}

/// Normal form with `[D₂, D₃] = −2D₁` and either `[D₁, D₂] = 2D₃`
/// (`rotate_about = 2`) or `[D₃, D₁] = 2D₂` (`rotate_about = 3`).
fn two_bracket_normal_form<S: Scalar>(u: S, rotate_about: usize) -> NormalFormData<S> {
    let b = origin::<S>();
    let two_x = Jet::variable(rotate_about, &b, ORDER).scale(&S::from_i64(2));
    let (ch, sh) = (two_x.cosh().unwrap(), two_x.sinh().unwrap());
    let z = || cj(S::zero(), &b);
    let o = || cj(S::one(), &b);
    let frame = if rotate_about == 2 {
        [[ch.clone(), z(), -&sh], [z(), o(), z()], [-&sh, z(), ch]]
    } else {
        [[ch.clone(), sh.clone(), z()], [sh, ch, z()], [z(), z(), o()]]
    };
    let g0 = normal_g0(&cj(u, &b)).unwrap();
    let data = ConstraintData::from_frame(frame, g0, z()).unwrap();
    assert!(data.residuals().truncate(ORDER - 2).is_zero(1e-12));
    NormalFormData::new(data, 1e-12).unwrap()
}

#[test]
fn normalize_example() {
    let b = origin::<f64>();
    let c = bianchi_ii_with(-8.0, [1.0, -4.0, -4.0 / 3.0], &b);
    assert!(c.residuals().is_zero(1e-14));
    let n = normalize(&c).unwrap();
    assert!((n.a.value() - 0.5).abs() < 1e-15);
    assert_eq!(n.sigma, 1);
    assert!((n.b().unwrap().value() - 2f64.powf(-0.5)).abs() < 1e-15);
    assert!((n.normal.u.value() - 3.0).abs() < 1e-14);
    assert!((n.normal.data.structure(2, 3, 1).value() + 2.0).abs() < 1e-14);
    assert!(n.normal.data.residuals().truncate(ORDER - 2).is_zero(1e-13));
}

#[test]
fn normalize_is_idempotent() {
    let b = origin::<f64>();
    let c = bianchi_ii_with(5.0, [2.0, -10.0, -2.5], &b);
    let n = normalize(&c).unwrap();
    assert_eq!(n.sigma, -1);
    let m = normalize(&n.normal.data).unwrap();
    assert_eq!(m.sigma, 1);
    assert!(m.a.add_scalar(&-1.0).max_abs() < 1e-14);
    assert!(m.log_b.max_abs() < 1e-14);
    let (x, y) = (&m.normal.data, &n.normal.data);
    for (p, r) in x.frame.iter().flatten().zip(y.frame.iter().flatten()).chain(x.g0.iter().zip(y.g0.iter())) {
        assert!((p - r).max_abs() < 1e-13);
    }
}

#[test]
fn normalize_needs_signs() {
    let b = origin::<Q>();
    let c = bianchi_ii_with(qi(-2), [q(-1, 2), qi(1), qi(1)], &b);
    assert!(matches!(normalize(&c), Err(BounceError::Undefined(_))));
    let c = bianchi_ii_with(qi(0), [q(1, 2), qi(-2), q(-2, 3)], &b);
    assert!(matches!(normalize(&c), Err(BounceError::Undefined(_))));
}

#[test]
fn scale_transform_examples() {
    let bq = origin::<Q>();
    let c = bianchi_ii_with(qi(-8), [qi(1), qi(-4), q(-4, 3)], &bq);
    let one = cj(qi(1), &bq);
    let same = scale_transform(&c, &one, &one, 1).unwrap();
    assert_eq!(serde_json::to_string(&same).unwrap(), serde_json::to_string(&c).unwrap());

    let flipped = scale_transform(&c, &one, &one, -1).unwrap();
    for i in 0..3 {
        for k in 0..3 {
            assert_eq!(flipped.frame[i][k], -&c.frame[i][k]);
        }
    }
    assert!(flipped.residuals().is_zero(0.0));

    let b = origin::<f64>();
    let kasner = bianchi_ii_with(0.0, [1.0, -4.0, -4.0 / 3.0], &b);
    let two = cj(2.0, &b);
    let doubled = scale_transform(&kasner, &two, &cj(1.0, &b), 1).unwrap();
    for i in 0..3 {
        assert!((&doubled.g0[i] - &kasner.g0[i].scale(&2.0)).max_abs() < 1e-15);
        for k in 0..3 {
            assert!((&doubled.frame[i][k] - &kasner.frame[i][k].scale(&2.0)).max_abs() < 1e-15);
        }
    }
    assert!((doubled.xi.value() - 2f64.ln()).abs() < 1e-15);
    assert!(doubled.residuals().is_zero(1e-14));

    assert!(matches!(scale_transform(&kasner, &cj(-1.0, &b), &cj(1.0, &b), 1), Err(BounceError::Undefined(_))));
    assert!(matches!(scale_transform(&kasner, &two, &cj(0.0, &b), 1), Err(BounceError::Undefined(_))));
}

#[test]
fn homogeneous_bounce_is_exactly_mc() {
    let alg = Algebra::calibrated();
    for u in [qi(3), q(5, 2), q(2, 3), q(7, 4)] {
        assert!(homogeneous_bounce_residual(alg, &u).unwrap().is_zero(0.0), "u = {u}");
    }
}

#[test]
fn homogeneous_bounce_profile() {
    let alg = Algebra::calibrated();
    let n = bianchi_ii(3.0, &origin(), ORDER).unwrap();
    let sol = bounce_solution(&n).unwrap();
    assert_eq!(sol.params.gamma[0][0].value(), &0.0);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let t0: f64 = rng.gen_range(-3.0..3.0);
        let nt = at_time(&n, t0);
        let sol = bounce_solution(&nt).unwrap();
        let p = &sol.params;
        let chi = 0.5 * (1.0 + t0.tanh());
        assert!((p.gamma[0][0].value() - (0.5 - chi)).abs() < 1e-14);
        for i in 0..3 {
            for a in 2..7 {
                assert!(p.gamma[i][a].max_abs() < 1e-14, "gamma_{}^{a}", i + 1);
            }
        }
        let Weights::Exp2(e) = &p.weights else { panic!("bounce weights are exponentials") };
        assert!((e[0].value() * 2.0 * t0.cosh() - 1.0).abs() < 1e-14);
        assert!(residual(alg, &nt).unwrap().max_abs() < 1e-10);
    }
}

#[test]
fn bounce_needs_admissible_u() {
    let b = origin::<Q>();
    for u in [qi(2), q(1, 2)] {
        let n = bianchi_ii(u, &b, ORDER).unwrap();
        assert!(matches!(bounce_solution(&n), Err(BounceError::Denominator(_))));
        assert!(matches!(future_limit(&n), Err(BounceError::Denominator(_))));
    }
}

#[test]
fn generic_bounce_is_mc_to_tolerance() {
    let alg = Algebra::calibrated();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
    for _ in 0..3 {
        let g = random_germ(&mut rng, &origin(), ORDER, 0.2);
        let base = base_point([0.0, 0.0, rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)]);
        let n = normalize(&ck_solve(&g.recenter(&base)).unwrap()).unwrap().normal;
        for _ in 0..3 {
            let r = residual(alg, &at_time(&n, rng.gen_range(-3.0..3.0))).unwrap();
            assert!(r.max_abs() < 1e-10, "residual {:e}", r.max_abs());
        }
    }
}

#[test]
fn future_limit_of_homogeneous_data() {
    let n = bianchi_ii(qi(3), &origin(), ORDER).unwrap();
    let f = future_limit(&n).unwrap();
    assert_eq!(f.g0.clone().map(|g| g.value().clone()), [q(-1, 2), qi(-1), q(1, 3)]);
    for i in 0..3 {
        for k in 0..3 {
            assert_eq!(f.frame[i][k], n.data.frame[i][k]);
        }
    }
    assert!(f.residuals().truncate(ORDER - 2).is_zero(0.0));
}

#[test]
fn future_limit_preserves_constraints() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
    for _ in 0..3 {
        let g = random_germ(&mut rng, &origin(), ORDER, 0.3);
        let n = normalize(&ck_solve(&g).unwrap()).unwrap().normal;
        let r = future_limit(&n).unwrap().residuals().truncate(ORDER - 2);
        assert!(r.is_zero(1e-10), "{:e}", r.max_abs());
    }
}

#[test]
fn bounce_map_large_u() {
    let nq = two_bracket_normal_form(q(5, 2), 2);
    let fl = permute(&future_limit(&nq).unwrap(), [3, 2, 1]);
    let (g1, g2) = (fl.g0[0].value().clone(), fl.g0[1].value().clone());
    assert_eq!(-g2 / g1 - qi(1), q(3, 2));

    let n = two_bracket_normal_form(2.5, 2);
    let m = bounce_map(&n).unwrap();
    assert!((m.normal.u.value() - 1.5).abs() < 1e-12);
    assert!(m.normal.data.residuals().truncate(ORDER - 3).is_zero(1e-10));
}

#[test]
fn bounce_map_small_u() {
    let nq = two_bracket_normal_form(q(2, 3), 3);
    let fl = permute(&future_limit(&nq).unwrap(), [2, 3, 1]);
    let (g1, g2) = (fl.g0[0].value().clone(), fl.g0[1].value().clone());
    assert_eq!(-g2 / g1 - qi(1), q(1, 2));

    let n = two_bracket_normal_form(2.0 / 3.0, 3);
    let m = bounce_map(&n).unwrap();
    assert!((m.normal.u.value() - 0.5).abs() < 1e-12);
    assert!(m.normal.data.residuals().truncate(ORDER - 3).is_zero(1e-10));
    assert!(matches!(bounce_map(&m.normal), Err(BounceError::Undefined(_))));
}

#[test]
fn bounce_map_rejects_branch_points() {
    for u in [1.0, 2.0] {
        let n = bianchi_ii(u, &origin(), ORDER).unwrap();
        assert!(matches!(bounce_map(&n), Err(BounceError::Undefined(_)) | Err(BounceError::Denominator(_))));
    }
}

#[test]
fn orbits() {
    let (v, end) = kasner_u_orbit(q(5, 2), 10).unwrap();
    assert_eq!(v, vec![q(5, 2), q(3, 2), q(1, 2)]);
    assert!(matches!(end, OrbitEnd::Excluded(_)));
    let (v, _) = kasner_u_orbit(qi(4), 10).unwrap();
    assert_eq!(v, vec![qi(4), qi(3), qi(2)]);
    let (v, end) = kasner_u_orbit(qi(1), 10).unwrap();
    assert_eq!(v, vec![qi(1)]);
    assert!(matches!(end, OrbitEnd::Excluded(_)));
    let (v, end) = kasner_u_orbit(q(22, 7), 3).unwrap();
    assert_eq!(v.len(), 4);
    assert_eq!(end, OrbitEnd::Steps);
    assert!(kasner_u_orbit(qi(0), 3).is_err());
}

#[test]
fn asymptotics_of_the_homogeneous_bounce() {
    let n = bianchi_ii(3.0, &origin(), ORDER).unwrap();
    let at = |t: f64| bounce_solution(&at_time(&n, t)).unwrap().params;
    let (past, future) = (at(-20.0), at(20.0));
    assert!((past.gamma[0][0].value() - 0.5).abs() <= 1e-15);
    assert!((future.gamma[0][0].value() + 0.5).abs() <= 1e-15);
    let fl = future_limit(&n).unwrap();
    for i in 0..3 {
        assert!((past.gamma[i][0].value() - n.data.g0[i].value()).abs() <= 1e-15);
        assert!((future.gamma[i][0].value() - fl.g0[i].value()).abs() <= 1e-15);
        assert!(past.gamma[i][5].value().abs() <= 1e-15 && future.gamma[i][5].value().abs() <= 1e-15);
    }
}

#[test]
fn gamma5_decays_like_sech() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
    let g = random_germ(&mut rng, &origin(), 4, 0.3);
    let n = normalize(&ck_solve(&g).unwrap()).unwrap().normal;
    let g5 = |t: f64| {
        let p = bounce_solution(&at_time(&n, t)).unwrap().params;
        (0..3).map(|i| p.gamma[i][5].value().abs()).fold(0.0, f64::max)
    };
    let c = g5(0.0).max(1e-3);
    for t in [-20.0, -8.0, 5.0, 12.0, 20.0] {
        assert!(g5(t) <= 4.0 * c * (1.0 + f64::abs(t)) / f64::cosh(t), "t = {t}");
    }
}
