//! Normal-form constraint data, the explicit one-bounce element of
//! `MC(𝓐_bounce)`, its future limit, and the bounce map on normal forms.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::Algebra;
use crate::filtration::GradedElement;
use crate::jet::{Base, Jet, JetError};
use crate::mc::{frame_apply, ConstraintData, GaugeParams, McError, Weights};
use crate::rees::{mc_residual, Mode, ReesError};
use crate::scalar::{Scalar, Q};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BounceError {
    #[error("map undefined at the base point: {0}")]
    Undefined(String),
    #[error("vanishing denominator at the base point: {0}")]
    Denominator(String),
    #[error("not in normal form: {0}")]
    NotNormal(String),
    #[error(transparent)]
    Mc(#[from] McError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Rees(#[from] ReesError),
}

/// Constraint data with `g⁰ = ½(1, −1−u, −1−1/u)` and `c₂₃¹ = −2`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct NormalFormData<S: Scalar> {
    pub data: ConstraintData<S>,
    pub u: Jet<S>,
}

impl<S: Scalar> NormalFormData<S> {
    /// Checks the normal-form conditions and recovers `u`; `tol` is relative
    /// to the largest coefficient of the data (at least 1).
    pub fn new(data: ConstraintData<S>, tol: f64) -> Result<Self, BounceError> {
        let tol = tol * data.magnitude().max(1.0);
        let u = (&data.g0[1].scale(&S::from_i64(-2))).add_scalar(&-S::one());
        if !u.value().is_positive() {
            return Err(BounceError::NotNormal(format!("u = {} is not positive", u.value().render())));
        }
        let expect = normal_g0(&u)?;
        for i in 0..3 {
            let d = (&data.g0[i] - &expect[i]).max_abs();
            if d > tol {
                return Err(BounceError::NotNormal(format!("g_{}^0 deviates by {d:e}", i + 1)));
            }
        }
        let d = data.structure(2, 3, 1).add_scalar(&S::from_i64(2)).max_abs();
        if d > tol {
            return Err(BounceError::NotNormal(format!("c_23^1 + 2 = {d:e}")));
        }
        Ok(NormalFormData { data, u })
    }

    pub fn base(&self) -> &Base<S> {
        self.data.base()
    }
}

/// `½(1, −1−u, −1−1/u)`.
pub fn normal_g0<S: Scalar>(u: &Jet<S>) -> Result<[Jet<S>; 3], JetError> {
    let h = S::from_ratio(1, 2);
    let one = S::one();
    Ok([
        Jet::constant(h.clone(), u.base(), u.order()),
        (-&u.add_scalar(&one)).scale(&h),
        (-&u.recip()?.add_scalar(&one)).scale(&h),
    ])
}

/// Result of the normalization `𝓝`; `B = exp(log_b)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Normalization<S: Scalar> {
    pub normal: NormalFormData<S>,
    pub a: Jet<S>,
    pub log_b: Jet<S>,
    pub sigma: i8,
}

impl<S: Scalar> Normalization<S> {
    pub fn b(&self) -> Result<Jet<S>, JetError> {
        self.log_b.exp()
    }
}

/// `(A g⁰, σ A B^{g_j⁰+g_k⁰} D_i, ξ + log A + (Σ g⁰) log B)` with `B = exp(log_b)`.
pub fn scale_transform_log<S: Scalar>(
    c: &ConstraintData<S>,
    a: &Jet<S>,
    log_b: &Jet<S>,
    sigma: i8,
) -> Result<ConstraintData<S>, BounceError> {
    if !a.value().is_positive() {
        return Err(BounceError::Undefined(format!("A = {} is not positive", a.value().render())));
    }
    let g = &c.g0;
    let sum = &(&g[0] + &g[1]) + &g[2];
    let sg = S::from_i64(sigma as i64);
    let mut frame = c.frame.clone();
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let lam = (a * &(log_b * &(&g[j] + &g[k])).exp()?).scale(&sg);
        frame[i] = frame[i].clone().map(|f| &f * &lam);
    }
    let g0 = g.clone().map(|x| a * &x);
    let xi = &(&c.xi + &a.ln()?) + &(&sum * log_b);
    Ok(ConstraintData::from_frame(frame, g0, xi)?)
}

/// As [`scale_transform_log`], taking `B` itself.
pub fn scale_transform<S: Scalar>(c: &ConstraintData<S>, a: &Jet<S>, b: &Jet<S>, sigma: i8) -> Result<ConstraintData<S>, BounceError> {
    if !b.value().is_positive() {
        return Err(BounceError::Undefined(format!("B = {} is not positive", b.value().render())));
    }
    scale_transform_log(c, a, &b.ln()?, sigma)
}

/// The normalization `𝓝`, defined when `g₁⁰ > 0 > g₂⁰, g₃⁰` and `c₂₃¹ ≠ 0`.
pub fn normalize<S: Scalar>(c: &ConstraintData<S>) -> Result<Normalization<S>, BounceError> {
    let g = &c.g0;
    if !g[0].value().is_positive() || !(-g[1].value().clone()).is_positive() || !(-g[2].value().clone()).is_positive() {
        return Err(BounceError::Undefined(format!(
            "g^0 = ({}, {}, {}) does not have signs (+, -, -)",
            g[0].value().render(),
            g[1].value().render(),
            g[2].value().render()
        )));
    }
    let c231 = c.structure(2, 3, 1);
    if c231.value().is_zero() {
        return Err(BounceError::Undefined("c_23^1 = 0".into()));
    }
    let a = g[0].scale(&S::from_i64(2)).recip()?;
    let sigma: i8 = if c231.value().is_positive() { -1 } else { 1 };
    // σ A B^{2g₁} c₂₃¹ = −2
    let rhs = (&a * c231).scale(&S::from_i64(-(sigma as i64))).recip()?.scale(&S::from_i64(2));
    let log_b = &rhs.ln()? * &g[0].scale(&S::from_i64(2)).recip()?;
    let out = scale_transform_log(c, &a, &log_b, sigma)?;
    let normal = NormalFormData::new(out, 1e-9)?;
    Ok(Normalization { normal, a, log_b, sigma })
}

/// Relabels indices: new index `a` is old index `perm[a]` (1-based), for
/// frames, `g⁰` and structure functions alike.
pub fn permute<S: Scalar>(c: &ConstraintData<S>, perm: [usize; 3]) -> ConstraintData<S> {
    let p = perm.map(|x| x - 1);
    ConstraintData {
        frame: [0, 1, 2].map(|a| c.frame[p[a]].clone()),
        c: [0, 1, 2].map(|a| [0, 1, 2].map(|b| [0, 1, 2].map(|l| c.c[p[a]][p[b]][p[l]].clone()))),
        g0: [0, 1, 2].map(|a| c.g0[p[a]].clone()),
        xi: c.xi.clone(),
    }
}

fn check_denominators<S: Scalar>(u: &Jet<S>) -> Result<(), BounceError> {
    let u0 = u.value().clone();
    for (name, v) in [("u", u0.clone()), ("u - 2", u0.clone() - S::from_i64(2)), ("2u - 1", u0.clone() * S::from_i64(2) - S::one())] {
        if v.is_zero() {
            return Err(BounceError::Denominator(format!("{name} = 0")));
        }
    }
    Ok(())
}

/// `D₁ − 2g₃⁴/(u−2)·k D₂ + 2u g₂³/(2u−1)·k D₃` in coordinate components.
fn tilted_frame<S: Scalar>(n: &NormalFormData<S>, k: &Jet<S>) -> Result<[Jet<S>; 3], BounceError> {
    let d = n.data.derived();
    let u = &n.u;
    let c2 = (&(&d.g[3][2] * &u.add_scalar(&S::from_i64(-2)).recip()?) * k).scale(&S::from_i64(-2));
    let c3 = (&(&(&d.g[2][1] * u) * &u.scale(&S::from_i64(2)).add_scalar(&-S::one()).recip()?) * k).scale(&S::from_i64(2));
    let f = &n.data.frame;
    Ok([0, 1, 2].map(|l| &(&f[0][l] + &(&c2 * &f[1][l])) + &(&c3 * &f[2][l])))
}

/// The outgoing element: `g⁰ = (−½, ½(1−u), ½(1−1/u))` with tilted `D₁`.
pub fn future_limit<S: Scalar>(n: &NormalFormData<S>) -> Result<ConstraintData<S>, BounceError> {
    check_denominators(&n.u)?;
    let u = &n.u;
    let one = Jet::one(u.base(), u.order());
    let h = S::from_ratio(1, 2);
    let d1 = tilted_frame(n, &one)?;
    let frame = [d1, n.data.frame[1].clone(), n.data.frame[2].clone()];
    let g0 = [
        Jet::constant(-h.clone(), u.base(), u.order()),
        (-&u.add_scalar(&-S::one())).scale(&h),
        (-&u.recip()?.add_scalar(&-S::one())).scale(&h),
    ];
    Ok(ConstraintData::from_frame(frame, g0, n.data.xi.clone())?)
}

/// The bounce map `𝓑`, together with the branch value `û` at the base point.
pub fn bounce_map<S: Scalar>(n: &NormalFormData<S>) -> Result<Normalization<S>, BounceError> {
    let u0 = n.u.value().clone();
    let half = S::from_ratio(1, 2);
    let two = S::from_i64(2);
    let (perm, lam) = if u0.is_positive() && (S::one() - u0.clone()).is_positive() {
        if u0 == half {
            return Err(BounceError::Undefined("u = 1/2".into()));
        }
        ([2, 3, 1], (-&n.u.add_scalar(&-S::one())).recip()?)
    } else if (u0.clone() - S::one()).is_positive() {
        if u0 == two {
            return Err(BounceError::Undefined("u = 2".into()));
        }
        ([3, 2, 1], &n.u * &n.u.add_scalar(&-S::one()).recip()?)
    } else {
        return Err(BounceError::Undefined(format!("u = {}", u0.render())));
    };
    let fl = permute(&future_limit(n)?, perm);
    let zero = Jet::zero(n.u.base(), n.u.order());
    let tuple = scale_transform_log(&fl, &lam, &zero, 1)?;
    normalize(&tuple)
}

/// Why [`kasner_u_orbit`] stopped.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum OrbitEnd {
    Steps,
    Excluded(String),
}

impl std::fmt::Display for OrbitEnd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OrbitEnd::Steps => write!(f, "step limit"),
            OrbitEnd::Excluded(v) => write!(f, "excluded value {v}"),
        }
    }
}

/// `u ↦ u − 1` (u > 1), `u ↦ 1/u − 1` (0 < u < 1), halting at `1, ½, 2`.
pub fn kasner_u_orbit<S: Scalar>(u0: S, steps: usize) -> Result<(Vec<S>, OrbitEnd), BounceError> {
    if !u0.is_positive() {
        return Err(BounceError::Undefined(format!("u0 = {} is not positive", u0.render())));
    }
    let excluded = [S::one(), S::from_ratio(1, 2), S::from_i64(2)];
    let mut out = vec![u0];
    loop {
        let u = out.last().unwrap().clone();
        if excluded.iter().any(|e| (e.clone() - u.clone()).is_negligible(1e-12)) {
            return Ok((out, OrbitEnd::Excluded(u.render())));
        }
        if out.len() > steps {
            return Ok((out, OrbitEnd::Steps));
        }
        let next = if (u.clone() - S::one()).is_positive() { u - S::one() } else { S::one() / u - S::one() };
        out.push(next);
    }
}

// ---------------------------------------------------------------------------
// The explicit bounce solution

/// The gauge parameters of the bounce, and the auxiliary `A₁ … A₇`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct BounceSolution<S: Scalar> {
    pub params: GaugeParams<S>,
    pub aux: [Jet<S>; 7],
}

/// `Σ c·u^p·Π factors`.
fn poly<S: Scalar>(u: &Jet<S>, terms: &[(i64, u32, &[&Jet<S>])]) -> Jet<S> {
    let mut acc = Jet::zero(u.base(), u.order());
    for (c, p, fs) in terms {
        let mut t = u.pow_i(*p as i64).expect("nonnegative power");
        for f in fs.iter() {
            t = &t * f;
        }
        acc = &acc + &t.scale(&S::from_i64(*c));
    }
    acc
}

/// `A₁ … A₇` of the bounce map.
pub fn auxiliary<S: Scalar>(n: &NormalFormData<S>) -> [Jet<S>; 7] {
    let d = n.data.derived();
    let g = |i: usize, a: usize| &d.g[a - 1][i - 1];
    let u = &n.u;
    let dd = |i: usize, f: &Jet<S>| frame_apply(&n.data.frame, i, f);
    let (g13, g14) = (g(1, 3), g(1, 4));
    let (g22, g23, g24) = (g(2, 2), g(2, 3), g(2, 4));
    let (g32, g33, g34) = (g(3, 2), g(3, 3), g(3, 4));
    let d3g34 = dd(3, g34);
    let d2g23 = dd(2, g23);
    let d3g23 = dd(3, g23);
    let d2g34 = dd(2, g34);
    let d2g32 = dd(2, g32);
    let d3g22 = dd(3, g22);
    let (d1u, d2u, d3u) = (dd(1, u), dd(2, u), dd(3, u));
    let d2d3u = dd(2, &d3u);
    let a1 = poly(u, &[(-2, 0, &[&d3g34]), (1, 1, &[&d3g34]), (-1, 0, &[&d3u, g34]), (-2, 0, &[g33, g34]), (1, 1, &[g33, g34]), (-2, 0, &[g34, g34]), (1, 1, &[g34, g34])]);
    let a2 = poly(
        u,
        &[(-1, 1, &[&d2g23]), (2, 2, &[&d2g23]), (-1, 0, &[&d2u, g23]), (1, 1, &[g23, g23]), (-2, 2, &[g23, g23]), (1, 1, &[g23, g24]), (-2, 2, &[g23, g24])],
    );
    let a3 = poly(u, &[(-2, 1, &[g23, g32]), (1, 2, &[g23, g32]), (1, 0, &[g22, g34]), (-2, 1, &[g22, g34])]);
    let a4 = poly(
        u,
        &[
            (2, 1, &[&d3g23]),
            (-5, 2, &[&d3g23]),
            (2, 3, &[&d3g23]),
            (2, 0, &[&d3u, g23]),
            (-1, 1, &[&d3u, g23]),
            (2, 1, &[g23, g34]),
            (-5, 2, &[g23, g34]),
            (2, 3, &[g23, g34]),
            (-1, 0, &[g24, g34]),
            (4, 1, &[g24, g34]),
            (-4, 2, &[g24, g34]),
        ],
    );
    let a5 = poly(
        u,
        &[
            (2, 0, &[&d2g34]),
            (-5, 1, &[&d2g34]),
            (2, 2, &[&d2g34]),
            (4, 1, &[g23, g33]),
            (-4, 2, &[g23, g33]),
            (1, 3, &[g23, g33]),
            (1, 0, &[&d2u, g34]),
            (-2, 1, &[&d2u, g34]),
            (-2, 0, &[g23, g34]),
            (5, 1, &[g23, g34]),
            (-2, 2, &[g23, g34]),
        ],
    );
    let a6 = poly(
        u,
        &[
            (-4, 3, &[&d1u]),
            (2, 1, &[&d2d3u]),
            (-2, 3, &[&d2d3u]),
            (1, 2, &[&d2g32]),
            (1, 4, &[&d2g32]),
            (1, 2, &[&d2g34]),
            (1, 4, &[&d2g34]),
            (-4, 0, &[&d2u, &d3u]),
            (1, 2, &[&d3g22]),
            (1, 4, &[&d3g22]),
            (-1, 2, &[&d3g23]),
            (-1, 4, &[&d3g23]),
            (2, 2, &[g13]),
            (2, 4, &[g13]),
            (2, 2, &[g14]),
            (2, 4, &[g14]),
            (2, 3, &[&d3u, g22]),
            (-2, 3, &[&d3u, g23]),
            (-2, 3, &[&d2u, g32]),
            (1, 2, &[g23, g32]),
            (1, 4, &[g23, g32]),
            (-1, 2, &[g24, g32]),
            (-1, 4, &[g24, g32]),
            (2, 1, &[&d2u, g33]),
            (-2, 3, &[&d2u, g33]),
            (1, 2, &[g22, g33]),
            (1, 4, &[g22, g33]),
            (-1, 2, &[g23, g33]),
            (-1, 4, &[g23, g33]),
            (-2, 1, &[&d2u, g34]),
            (-1, 2, &[g22, g34]),
            (-1, 4, &[g22, g34]),
            (-2, 2, &[g23, g34]),
            (-2, 4, &[g23, g34]),
            (-1, 2, &[g24, g34]),
            (-1, 4, &[g24, g34]),
        ],
    );
    let a7 = poly(
        u,
        &[
            (2, 3, &[&d1u]),
            (-1, 1, &[&d2d3u]),
            (1, 3, &[&d2d3u]),
            (2, 0, &[&d2u, &d3u]),
            (-1, 3, &[&d3u, g22]),
            (1, 3, &[&d3u, g23]),
            (1, 3, &[&d2u, g32]),
            (-1, 1, &[&d2u, g33]),
            (1, 3, &[&d2u, g33]),
            (1, 1, &[&d2u, g34]),
        ],
    );
    [a1, a2, a3, a4, a5, a6, a7]
}

/// `χ = ½(1 + tanh t)`, `sech t` and `2 cosh t` as jets at the data's base point.
pub fn time_functions<S: Scalar>(base: &Base<S>, order: usize) -> Result<[Jet<S>; 4], JetError> {
    let t = Jet::variable(0, base, order);
    let chi = t.tanh()?.add_scalar(&S::one()).scale(&S::from_ratio(1, 2));
    let sech = t.sech()?;
    let two_cosh = t.cosh()?.scale(&S::from_i64(2));
    Ok([t, chi, sech, two_cosh])
}

/// The explicit bounce element for normal-form data; the weights are given
/// as `Eᵢ = e^{2μᵢ}`: `E₁ = 1/(2cosh t)`, `E₂ = e^{−tu}·2cosh t`, `E₃ = e^{−t/u}·2cosh t`.
pub fn bounce_solution<S: Scalar>(n: &NormalFormData<S>) -> Result<BounceSolution<S>, BounceError> {
    check_denominators(&n.u)?;
    let u = &n.u;
    let base = n.base().clone();
    let order = u.order();
    let [t, chi, sech, two_cosh] = time_functions(&base, order)?;
    let d = n.data.derived();
    let g = |i: usize, a: usize| d.g[a - 1][i - 1].clone();
    let aux = auxiliary(n);
    let [a1, a2, a3, a4, a5, a6, a7] = aux.clone();
    let q = |v: i64| S::from_i64(v);
    let one = Jet::one(&base, order);
    let um2 = u.add_scalar(&q(-2));
    let tum1 = u.scale(&q(2)).add_scalar(&-S::one());
    let (ium2, itum1, iu) = (um2.recip()?, tum1.recip()?, u.recip()?);
    let chi2 = &chi * &chi;
    let h = S::from_ratio(1, 2);
    let g23 = g(2, 3);
    let g34 = g(3, 4);
    let p23 = &(&g23 * &g34) * u; // u g₂³ g₃⁴
    let w = &ium2 * &itum1; // 1/((u−2)(2u−1))

    let mut p = GaugeParams::zero(&base, order);
    p.gamma[0][0] = (-&chi).add_scalar(&h);
    p.gamma[1][0] = &(-&u.add_scalar(&S::one()).scale(&h)) + &chi;
    p.gamma[2][0] = &(-&iu.add_scalar(&S::one()).scale(&h)) + &chi;

    p.gamma[0][1] = one.clone();
    p.gamma[1][1] = &(&g(2, 1) + &(&(&a1 * &(&ium2 * &ium2)) * &chi)) + &(&(&(&g34 * &g34) * &(&ium2 * &ium2)) * &chi2).scale(&q(4));
    p.gamma[2][1] =
        &(&g(3, 1) + &(&(&a2 * &(&itum1 * &itum1)) * &chi)) + &(&(&(&(&g23 * &g23) * &(u * u)) * &(&itum1 * &itum1)) * &chi2).scale(&q(4));

    p.gamma[0][2] = &g(1, 2) + &(&(&a3 * &w) * &chi).scale(&q(2));
    p.gamma[1][2] = g(2, 2);
    p.gamma[2][2] = g(3, 2);

    let quad = (&(&p23 * &w) * &chi2).scale(&q(8));
    p.gamma[0][3] = &(&g(1, 3) - &(&(&a4 * &(&w * &itum1)) * &chi).scale(&q(2))) - &quad;
    p.gamma[1][3] = &g23 - &(&(&(&g23 * u) * &itum1) * &chi).scale(&q(4));
    p.gamma[2][3] = &g(3, 3) + &(&(&g34 * &ium2) * &chi).scale(&q(4));

    p.gamma[0][4] = &(&g(1, 4) - &(&(&a5 * &(&w * &ium2)) * &chi).scale(&q(2))) - &quad;
    p.gamma[1][4] = &g(2, 4) - &(&(&(&g23 * u) * &itum1) * &chi).scale(&q(4));
    p.gamma[2][4] = &g34 + &(&(&g34 * &ium2) * &chi).scale(&q(4));

    let u2p1 = (u * u).add_scalar(&S::one());
    let i_u2p1 = u2p1.recip()?;
    let g15 = &(&(-&(&(&p23 * &w) * &chi).scale(&q(4))) - &(&a6 * &(&(&iu * &i_u2p1) * &i_u2p1)).scale(&h))
        + &(&(&a7 * &(&(&iu * &iu) * &i_u2p1)) * &t).scale(&h);
    p.gamma[0][5] = &g15 * &sech;
    p.gamma[1][5] = (&(&(&g23 * u) * &itum1) * &sech).scale(&q(-2));
    p.gamma[2][5] = (&(&g34 * &ium2) * &sech).scale(&q(2));

    let b1 = tilted_frame(n, &chi)?;
    let frames = [b1, n.data.frame[1].clone(), n.data.frame[2].clone()];
    for i in 0..3 {
        p.beta[i] = [Jet::zero(&base, order), frames[i][0].clone(), frames[i][1].clone(), frames[i][2].clone()];
    }

    let e1 = two_cosh.recip()?;
    let e2 = &(&(&t * u).scale(&q(-1))).exp()? * &two_cosh;
    let e3 = &(&(&t * &iu).scale(&q(-1))).exp()? * &two_cosh;
    p.weights = Weights::Exp2([e1, e2, e3]);
    Ok(BounceSolution { params: p, aux })
}

/// Re-expands `t`-independent normal-form data about the time `t0`.
pub fn at_time<S: Scalar>(n: &NormalFormData<S>, t0: S) -> NormalFormData<S> {
    let b = n.base();
    let base = crate::jet::base_point([t0, b[1].clone(), b[2].clone(), b[3].clone()]);
    let rb = |j: &Jet<S>| j.recenter(&base);
    NormalFormData { data: n.data.map_jets(rb), u: rb(&n.u) }
}

/// The homogeneous Bianchi II normal form `D₁ = ∂₁, D₂ = ∂₂, D₃ = ∂₃ − 2x²∂₁`
/// (so `c₂₃¹ = −2`, all other `c` zero) with constant `u` and `ξ = 0`.
pub fn bianchi_ii<S: Scalar>(u: S, base: &Base<S>, order: usize) -> Result<NormalFormData<S>, BounceError> {
    let c = |v: S| Jet::constant(v, base, order);
    let (z, o) = (S::zero(), S::one());
    let x2 = &Jet::variable(2, base, order) - &c(base[2].clone());
    let frame = [[c(o.clone()), c(z.clone()), c(z.clone())], [c(z.clone()), c(o.clone()), c(z.clone())], [x2.scale(&S::from_i64(-2)), c(z.clone()), c(o)]];
    let uj = c(u);
    let g0 = normal_g0(&uj)?;
    let data = ConstraintData::from_frame(frame, g0, c(z))?;
    NormalFormData::new(data, 0.0)
}

/// Bounce-mode residual of the bounce solution for homogeneous Bianchi II
/// data with the given `u`, exactly at the origin.
pub fn homogeneous_bounce_residual(alg: &Algebra, u: &Q) -> Result<GradedElement<Q>, BounceError> {
    let base = crate::jet::origin::<Q>();
    let n = bianchi_ii(u.clone(), &base, 3)?;
    residual(alg, &n)
}

/// `[x, x]` in `𝓐_bounce` for the assembled bounce solution.
pub fn residual<S: Scalar>(alg: &Algebra, n: &NormalFormData<S>) -> Result<GradedElement<S>, BounceError> {
    let sol = bounce_solution(n)?;
    let mu = sol.params.weights.mu_data()?;
    let x = sol.params.assemble_with(&mu);
    Ok(mc_residual(alg, &x, &mu, Mode::Bounce)?)
}
