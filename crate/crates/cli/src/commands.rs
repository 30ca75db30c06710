use std::collections::BTreeMap;

use bkl_core::algebra::{Algebra, Element};
use bkl_core::automorphisms::{factorization_sides, free_difference, GroupoidMorphism};
use bkl_core::bounce::{at_time, bounce_map, future_limit, kasner_u_orbit, normalize, residual, NormalFormData, OrbitEnd};
use bkl_core::constraints::{ck_solve, random_rational_germ, GermData};
use bkl_core::filtration::{decompose_graded, filtration_degree, GradedElement, Variant};
use bkl_core::jet::{origin, Jet};
use bkl_core::mc::{ConstraintData, GaugeParams};
use bkl_core::rees::{mc_residual, Mode};
use bkl_core::scalar::{Scalar, Q};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use specseq::{
    check_filler_independence, check_page_recursion, compute_pages, direct_homology_gr, first_pages_shortcut, io::parse_complex,
    shortcut_agrees,
};

use crate::report::{Check, Outcome};

type Res = Result<Outcome, String>;

fn alg() -> &'static Algebra {
    Algebra::calibrated()
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

pub fn parse<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T, String> {
    serde_json::from_str(text).map_err(|e| format!("invalid {what} JSON: {e}"))
}

/// Exact comparisons for ℚ, `tol` for floats.
fn tol_for<S: Scalar>(tol: f64) -> f64 {
    if S::EXACT {
        0.0
    } else {
        tol
    }
}

/// Largest coefficient of `r` of total degree `≤ order`.
fn graded_max<S: Scalar>(r: &GradedElement<S>, order: usize) -> f64 {
    r.parts.values().flatten().map(|(_, c)| c.truncate(order).max_abs()).fold(0.0, f64::max)
}

fn norms_json<S: Scalar>(r: &GradedElement<S>) -> Value {
    let m: BTreeMap<String, f64> = r.norms().into_iter().map(|(a, n)| (a.to_string(), n)).collect();
    to_value(&m)
}

fn components_json<S: Scalar>(e: &Element<S>) -> Value {
    let d = decompose_graded(alg(), e);
    let comps: BTreeMap<String, Value> = d.components().into_iter().map(|(a, x)| (a.to_string(), to_value(&x))).collect();
    to_value(&comps)
}

pub fn decompose<S: Scalar>(e: &Element<S>, tol: f64) -> Res {
    let tol = tol_for::<S>(tol);
    let d = decompose_graded(alg(), e);
    let back = d.reassemble().sub(e);
    let ok = alg().is_zero_in_e(&back, tol);
    let deg = |v| filtration_degree(alg(), e, v, tol);
    Ok(Outcome {
        checks: vec![Check::flag("components reassemble to the input", ok)],
        output: json!({
            "components": components_json(e),
            "filtration_degrees": {"one": deg(Variant::One), "two": deg(Variant::Two), "three": deg(Variant::Three)},
        }),
    })
}

pub fn bracket<S: Scalar>(x: &Element<S>, y: &Element<S>, tol: f64) -> Res {
    let tol = tol_for::<S>(tol);
    let z = alg().bracket(x, y);
    let mut checks = Vec::new();
    if let (Some(p), Some(q)) = (x.degree(), y.degree()) {
        // [x, y] = −(−1)^{pq} [y, x]
        let w = alg().bracket(y, x);
        let sum = if p * q % 2 == 0 { z.add(&w) } else { z.sub(&w) };
        checks.push(Check::flag("graded antisymmetry", alg().is_zero_in_e(&sum, tol)));
    }
    Ok(Outcome { checks, output: json!({"bracket": to_value(&z), "components": components_json(&z)}) })
}

pub fn mc_residual_cmd<S: Scalar>(p: &GaugeParams<S>, mode: Mode, tol: f64) -> Res {
    let mu = p.weights.mu_data().map_err(|e| e.to_string())?;
    let x = p.assemble_with(&mu);
    let r = mc_residual(alg(), &x, &mu, mode).map_err(|e| e.to_string())?;
    // One derivative is taken, so coefficients up to order N − 1 are exact.
    let n = p.order().saturating_sub(1);
    let check = Check::residual(format!("[x, x] = 0 through order {n}"), graded_max(&r, n), tol_for::<S>(tol));
    Ok(Outcome { checks: vec![check], output: json!({"mode": mode, "norms": norms_json(&r)}) })
}

fn boundary_restriction<S: Scalar>(g: &GermData<S>, d: &ConstraintData<S>) -> Result<f64, String> {
    let n = g.order;
    let r = |j: &Jet<S>| j.restrict(1);
    let diff = |a: &Jet<S>, b: &Jet<S>| (a - b).max_abs();
    let mut worst = 0f64;
    for l in 0..3 {
        worst = worst.max(diff(&r(&d.frame[1][l]), &r(&g.d2[l].truncate(n))));
        worst = worst.max(diff(&r(&d.frame[2][l]), &r(&g.d3[l].truncate(n))));
        worst = worst.max(diff(&d.c[2][0][l], &g.c31[l].truncate(n)));
        worst = worst.max(diff(&d.c[0][1][l], &g.c12[l].truncate(n)));
    }
    worst = worst.max(diff(&r(&d.xi), &r(&g.xi.truncate(n))));
    let ea = g.a.truncate(n).exp().map_err(|e| e.to_string())?;
    let h = bkl_core::bounce::normal_g0(&g.u.truncate(n)).map_err(|e| e.to_string())?;
    for i in 0..3 {
        worst = worst.max(diff(&r(&d.g0[i]), &r(&(&ea * &h[i]))));
    }
    Ok(worst)
}

fn solve_checked<S: Scalar>(g: &GermData<S>, tol: f64, checks: &mut Vec<Check>) -> Result<ConstraintData<S>, String> {
    let d = ck_solve(g).map_err(|e| e.to_string())?;
    let n = g.order.saturating_sub(1);
    checks.push(Check::residual(format!("constraints through order {n}"), d.residuals().truncate(n).max_abs(), tol));
    checks.push(Check::residual("boundary restriction", boundary_restriction(g, &d)?, tol));
    Ok(d)
}

pub fn solve_constraints<S: Scalar>(g: &GermData<S>, tol: f64) -> Res {
    let mut checks = Vec::new();
    let d = solve_checked(g, tol_for::<S>(tol), &mut checks)?;
    Ok(Outcome { checks, output: to_value(&d) })
}

#[derive(Deserialize)]
#[serde(untagged, bound = "")]
pub enum BounceInput<S: Scalar> {
    Germ(GermData<S>),
    Normal(NormalFormData<S>),
}

pub fn verify_bounce<S: Scalar>(input: BounceInput<S>, order: Option<usize>, tol: f64, samples: usize, seed: u64) -> Res {
    let tol = tol_for::<S>(tol);
    let mut checks = Vec::new();
    let n = match input {
        BounceInput::Germ(mut g) => {
            g.order = order.unwrap_or(g.order);
            let d = solve_checked(&g, tol, &mut checks)?;
            normalize(&d).map_err(|e| e.to_string())?.normal
        }
        BounceInput::Normal(n) => {
            let n = match order {
                Some(k) => NormalFormData { data: n.data.truncate(k), u: n.u.truncate(k) },
                None => n,
            };
            let k = n.u.order().saturating_sub(2);
            checks.push(Check::residual(format!("constraints through order {k}"), n.data.residuals().truncate(k).max_abs(), tol));
            n
        }
    };
    let order = n.u.order();

    // Exact arithmetic only reaches the base time; floats sample t ∈ [−3, 3].
    let t0 = n.u.base()[0].clone();
    let mut times = vec![t0.clone()];
    if !S::EXACT {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        times.extend((0..samples).map(|_| S::parse(&rng.gen_range(-3.0f64..=3.0).to_string()).expect("finite")));
    }
    let mut csv = String::from("t,max_residual\n");
    let mut worst = 0f64;
    for t in &times {
        let nt = if t == &t0 { n.clone() } else { at_time(&n, t.clone()) };
        let r = residual(alg(), &nt).map_err(|e| e.to_string())?;
        worst = worst.max(r.max_abs());
        csv.push_str(&format!("{},{:e}\n", t.render(), r.max_abs()));
    }
    checks.push(Check::residual(format!("bounce solution is MC at {} times", times.len()), worst, tol));

    let k = order.saturating_sub(2);
    let fl = future_limit(&n).map_err(|e| e.to_string())?;
    checks.push(Check::residual(format!("future limit satisfies the constraints through order {k}"), fl.residuals().truncate(k).max_abs(), tol));
    let mapped = match bounce_map(&n) {
        Ok(m) => {
            let k = order.saturating_sub(3);
            let r = m.normal.data.residuals().truncate(k).max_abs();
            checks.push(Check::residual(format!("bounce map image satisfies the constraints through order {k}"), r, tol));
            json!({"u": m.normal.u.value().render(), "sigma": m.sigma})
        }
        Err(e) => json!({"undefined": e.to_string()}),
    };
    Ok(Outcome { checks, output: json!({"u": to_value(&n.u), "residual_vs_t": csv, "bounce_map": mapped}) })
}

/// The homogeneous shadow of the bounce map, written out independently.
fn u_step<S: Scalar>(u: &S) -> Option<S> {
    let one = S::one();
    let d = u.clone() - one.clone();
    if d.is_positive() {
        Some(d)
    } else if u.is_positive() {
        Some(one.clone() / u.clone() - one)
    } else {
        None
    }
}

pub fn orbit<S: Scalar>(u0: S, steps: usize, tol: f64) -> Res {
    let tol = tol_for::<S>(tol);
    let (v, end) = kasner_u_orbit(u0, steps).map_err(|e| e.to_string())?;
    let mut csv = String::from("step,u\n");
    for (k, u) in v.iter().enumerate() {
        csv.push_str(&format!("{k},{}\n", u.render()));
    }
    let worst = v
        .windows(2)
        .map(|w| u_step(&w[0]).map_or(f64::INFINITY, |s| (s - w[1].clone()).to_f64().abs()))
        .fold(0.0, f64::max);
    let termination = match &end {
        OrbitEnd::Steps => "step limit".to_string(),
        OrbitEnd::Excluded(_) => end.to_string(),
    };
    Ok(Outcome {
        checks: vec![Check::residual("each step is u ↦ u − 1 or u ↦ 1/u − 1", worst, tol).with_detail(format!("{} values", v.len()))],
        output: json!({"csv": csv, "termination": termination}),
    })
}

#[derive(Deserialize)]
#[serde(bound = "")]
pub struct MorphismInput<S: Scalar> {
    pub a: Jet<S>,
    pub b: Jet<S>,
    pub c: Jet<S>,
}

/// Input of `verify-auto`: constraint data, the scale-transform parameters
/// `(A, log B, σ)`, and optionally a groupoid morphism `t ↦ a t + b, θ ↦ cθ`.
#[derive(Deserialize)]
#[serde(bound = "")]
pub struct AutoInput<S: Scalar> {
    pub data: ConstraintData<S>,
    pub a: Jet<S>,
    pub log_b: Jet<S>,
    #[serde(default)]
    pub morphism: Option<MorphismInput<S>>,
}

fn random_auto_input<R: Rng>(rng: &mut R, order: usize) -> Result<AutoInput<Q>, String> {
    let b = origin::<Q>();
    let data = ck_solve(&random_rational_germ(rng, &b, order, 4)).map_err(|e| e.to_string())?;
    let x = |v: usize| Jet::variable(v, &b, order);
    let mut r = |d: i64| Q::from_ratio(rng.gen_range(-2..=2), d);
    let a = (&x(1).scale(&r(3)) + &x(3).scale(&r(5))).add_scalar(&Q::one());
    let log_b = &x(2).scale(&r(3)) + &x(1).scale(&r(7));
    let morphism = MorphismInput {
        a: (&x(1).scale(&r(2)) + &x(3).scale(&r(3))).add_scalar(&Q::from_i64(2)),
        b: &x(2).scale(&r(3)) + &(&x(1) * &x(3)),
        c: (&x(3).scale(&r(2)) - &(&x(2) * &x(2))).add_scalar(&Q::one()),
    };
    Ok(AutoInput { data, a, log_b, morphism: Some(morphism) })
}

pub fn random_auto(order: usize, seed: u64) -> Result<AutoInput<Q>, String> {
    random_auto_input(&mut ChaCha8Rng::seed_from_u64(seed), order)
}

pub fn verify_auto<S: Scalar>(input: &AutoInput<S>, tol: f64) -> Res {
    let tol = tol_for::<S>(tol);
    let n = input.data.xi.order();
    let k = n.saturating_sub(2);
    let mut checks = Vec::new();

    let p = input.data.sufficient_gauge();
    let mu = p.weights.mu_data().map_err(|e| e.to_string())?;
    let x = p.assemble_with(&mu);
    let r = mc_residual(alg(), &x, &mu, Mode::Free).map_err(|e| e.to_string())?;
    checks.push(Check::residual(format!("sufficient gauge is MC through order {k}"), graded_max(&r, k), tol));

    for sigma in [1i8, -1] {
        let (lhs, rhs) = factorization_sides(alg(), &input.data, &input.a, &input.log_b, sigma).map_err(|e| e.to_string())?;
        let d = free_difference(alg(), &lhs.truncate(k), &rhs.truncate(k));
        checks.push(Check::residual(format!("three-step factorization, sigma = {sigma:+}"), d, tol));
    }

    if let Some(m) = &input.morphism {
        let m = GroupoidMorphism::new(m.a.clone(), m.b.clone(), m.c.clone()).map_err(|e| e.to_string())?;
        let y = m.apply_s(&p.assemble().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let mut pulled = p.clone();
        pulled.weights = m.pull_weights(&p.weights).map_err(|e| e.to_string())?;
        let mu = pulled.weights.mu_data().map_err(|e| e.to_string())?;
        let k = n.saturating_sub(3);
        // The sufficient gauge is MC in 𝓐_free; the other modes are checked
        // only where the input is MC there too.
        for mode in [Mode::Free, Mode::Bounce, Mode::E] {
            let before = mc_residual(alg(), &x, &p.weights.mu_data().map_err(|e| e.to_string())?, mode).map_err(|e| e.to_string())?;
            if graded_max(&before, k) > tol {
                continue;
            }
            let r = mc_residual(alg(), &y, &mu, mode).map_err(|e| e.to_string())?;
            checks.push(Check::residual(format!("morphism preserves MC ({mode:?}) through order {k}"), graded_max(&r, k), tol));
        }
    }
    Ok(Outcome { checks, output: json!({"order": n}) })
}

pub fn specseq_cmd<F: specseq::Field>(text: &str, seed: u64) -> Res {
    let fc = parse_complex::<F>(text).map_err(|e| e.to_string())?;
    let pages = compute_pages(&fc).map_err(|e| e.to_string())?;
    let gr = direct_homology_gr(&fc);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let last = pages.last().map(|p| p.dims()).unwrap_or_default();
    let checks = vec![
        Check::flag("last page equals Gr H", last == gr.dims),
        Check::flag("page recursion", check_page_recursion(&pages)),
        Check::flag("filler independence", pages.iter().all(|p| check_filler_independence(&fc, p, &mut rng))),
        Check::flag("first-pages shortcut", shortcut_agrees(&pages, &first_pages_shortcut(&fc))),
    ];
    let page_json: Vec<Value> = pages.iter().map(|p| json!({"p": p.p, "dims": p.dims(), "ranks": p.ranks()})).collect();
    let bideg: BTreeMap<String, usize> = gr.bidegree_dims.iter().map(|((i, l), n)| (format!("({i},{l})"), *n)).collect();
    Ok(Outcome { checks, output: json!({"pages": page_json, "gr_homology": gr.dims, "bidegree_dims": bideg}) })
}
