//! Truncated power-series solutions of the constraint equations with
//! `D₁ = ∂₁` and `g⁰ = ½eᵃ(1, −1−u, −1−1/u)`, from free data on a hypersurface
//! `x¹ = x¹₀`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jet::{Base, Jet, JetError};
use crate::mc::{inverse3, ConstraintData, McError};
use crate::scalar::Scalar;

/// Free data: `c₃₁ⁱ, c₁₂ⁱ` near the base point, and `D₂ⁱ, D₃ⁱ, a, u, ξ`
/// on the hypersurface (independent of `t` and `x¹`).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct GermData<S: Scalar> {
    pub c31: [Jet<S>; 3],
    pub c12: [Jet<S>; 3],
    pub d2: [Jet<S>; 3],
    pub d3: [Jet<S>; 3],
    pub a: Jet<S>,
    pub u: Jet<S>,
    pub xi: Jet<S>,
    pub order: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstraintError {
    #[error("positivity violated: {0}")]
    Positivity(String),
    #[error("leading-coefficient matrix is singular at the base point")]
    Singular,
    #[error("invalid germ data: {0}")]
    Invalid(String),
    #[error(transparent)]
    Jet(#[from] JetError),
}

impl From<McError> for ConstraintError {
    fn from(e: McError) -> Self {
        match e {
            McError::Jet(j) => ConstraintError::Jet(j),
            McError::SingularFrame => ConstraintError::Singular,
            other => ConstraintError::Invalid(other.to_string()),
        }
    }
}

impl<S: Scalar> GermData<S> {
    pub fn base(&self) -> &Base<S> {
        self.a.base()
    }

    fn all(&self) -> Vec<(&'static str, &Jet<S>)> {
        let mut v = Vec::new();
        for (i, n) in ["c31^1", "c31^2", "c31^3"].iter().enumerate() {
            v.push((*n, &self.c31[i]));
        }
        for (i, n) in ["c12^1", "c12^2", "c12^3"].iter().enumerate() {
            v.push((*n, &self.c12[i]));
        }
        for (i, n) in ["D2^1", "D2^2", "D2^3"].iter().enumerate() {
            v.push((*n, &self.d2[i]));
        }
        for (i, n) in ["D3^1", "D3^2", "D3^3"].iter().enumerate() {
            v.push((*n, &self.d3[i]));
        }
        v.push(("a", &self.a));
        v.push(("u", &self.u));
        v.push(("xi", &self.xi));
        v
    }

    pub fn validate(&self) -> Result<(), ConstraintError> {
        for (k, (name, j)) in self.all().into_iter().enumerate() {
            if !j.same_base(&self.a) {
                return Err(ConstraintError::Invalid(format!("{name} has a different base point")));
            }
            if j.order() < self.order {
                return Err(ConstraintError::Invalid(format!("{name} has order {} < {}", j.order(), self.order)));
            }
            if j.depends_on(0) {
                return Err(ConstraintError::Invalid(format!("{name} depends on t")));
            }
            if k >= 6 && j.depends_on(1) {
                return Err(ConstraintError::Invalid(format!("hypersurface datum {name} depends on x1")));
            }
        }
        for (name, v) in [("D2^1", self.d2[0].value()), ("D3^1", self.d3[0].value()), ("u", self.u.value())] {
            if !v.is_positive() {
                return Err(ConstraintError::Positivity(format!("{name}(0) = {}", v.render())));
            }
        }
        Ok(())
    }

    /// Re-expands all polynomial data about another base point.
    pub fn recenter(&self, base: &Base<S>) -> Self {
        let r = |j: &Jet<S>| j.recenter(base);
        GermData {
            c31: self.c31.clone().map(|j| r(&j)),
            c12: self.c12.clone().map(|j| r(&j)),
            d2: self.d2.clone().map(|j| r(&j)),
            d3: self.d3.clone().map(|j| r(&j)),
            a: r(&self.a),
            u: r(&self.u),
            xi: r(&self.xi),
            order: self.order,
        }
    }
}

/// The unknowns on which the recursion acts.
#[derive(Clone)]
struct Unknowns<S: Scalar> {
    d2: [Jet<S>; 3],
    d3: [Jet<S>; 3],
    c23: [Jet<S>; 3],
    a: Jet<S>,
    u: Jet<S>,
    xi: Jet<S>,
}

/// Full antisymmetric `c[a][b][l]` from the three independent pairs.
fn structure<S: Scalar>(c23: &[Jet<S>; 3], c31: &[Jet<S>; 3], c12: &[Jet<S>; 3]) -> [[[Jet<S>; 3]; 3]; 3] {
    let z = Jet::zero(c23[0].base(), c23[0].order());
    let mut c: [[[Jet<S>; 3]; 3]; 3] = [0, 1, 2].map(|_| [0, 1, 2].map(|_| [0, 1, 2].map(|_| z.clone())));
    for (a, b, v) in [(1, 2, c23), (2, 0, c31), (0, 1, c12)] {
        for l in 0..3 {
            c[a][b][l] = v[l].clone();
            c[b][a][l] = -&v[l];
        }
    }
    c
}

fn frame_of<S: Scalar>(v: &Unknowns<S>) -> [[Jet<S>; 3]; 3] {
    let b = v.a.base();
    let o = v.a.order();
    [[Jet::one(b, o), Jet::zero(b, o), Jet::zero(b, o)], v.d2.clone(), v.d3.clone()]
}

/// `g⁰ = ½eᵃ h(u)` and `∂g⁰/∂a = g⁰`, `∂g⁰/∂u = ½eᵃ h'(u)`.
fn g0_of<S: Scalar>(a: &Jet<S>, u: &Jet<S>) -> Result<([Jet<S>; 3], [Jet<S>; 3]), JetError> {
    let e = a.exp()?.scale(&S::from_ratio(1, 2));
    let iu = u.recip()?;
    let one = S::one();
    let h = [Jet::one(u.base(), u.order()), -&u.add_scalar(&one), -&iu.add_scalar(&one)];
    let hp = [Jet::zero(u.base(), u.order()), Jet::constant(-one, u.base(), u.order()), &iu * &iu];
    Ok((h.map(|x| &e * &x), hp.map(|x| &e * &x)))
}

/// `∂₁ D₂, ∂₁ D₃` from the `[D₁, D₂]` and `[D₃, D₁]` equations.
fn frame_flow<S: Scalar>(d2: &[Jet<S>; 3], d3: &[Jet<S>; 3], c31: &[Jet<S>; 3], c12: &[Jet<S>; 3]) -> ([Jet<S>; 3], [Jet<S>; 3]) {
    let delta = |l: usize, c: &Jet<S>| if l == 0 { c.clone() } else { Jet::zero(c.base(), c.order()) };
    let f2 = [0, 1, 2].map(|l| &(&delta(l, &c12[0]) + &(&c12[1] * &d2[l])) + &(&c12[2] * &d3[l]));
    let f3 = [0, 1, 2].map(|l| -&(&(&delta(l, &c31[0]) + &(&c31[1] * &d2[l])) + &(&c31[2] * &d3[l])));
    (f2, f3)
}

/// Tangential part `Dᵢ²∂₂ + Dᵢ³∂₃` of a frame vector applied to `f`.
fn tangential<S: Scalar>(d: &[Jet<S>; 3], f: &Jet<S>) -> Jet<S> {
    &(&d[1] * &f.derive(2)) + &(&d[2] * &f.derive(3))
}

/// `∂₁ v` as a function of `v`.
fn flow<S: Scalar>(v: &Unknowns<S>, c31: &[Jet<S>; 3], c12: &[Jet<S>; 3]) -> Result<Unknowns<S>, ConstraintError> {
    let (f2, f3) = frame_flow(&v.d2, &v.d3, c31, c12);
    let c = structure(&v.c23, c31, c12);
    let frame = frame_of(v);

    // Jacobi: ∂₁c₂₃^q = −[Σ_p c₂₃^p c₁ₚ^q + Σ_p c₃₁^p c₂ₚ^q + D₂(c₃₁^q) + Σ_p c₁₂^p c₃ₚ^q + D₃(c₁₂^q)]
    let full_d = |i: usize, f: &Jet<S>| {
        let mut acc = &frame[i][0] * &f.derive(1);
        for k in 1..3 {
            acc = &acc + &(&frame[i][k] * &f.derive(k + 1));
        }
        acc
    };
    let fc23 = [0, 1, 2].map(|q| {
        let mut s = &full_d(1, &c31[q]) + &full_d(2, &c12[q]);
        for p in 0..3 {
            s = &s + &(&v.c23[p] * &c[0][p][q]);
            s = &s + &(&c31[p] * &c[1][p][q]);
            s = &s + &(&c12[p] * &c[2][p][q]);
        }
        -&s
    });

    // mce2 solved for (∂₁a, ∂₁u, ∂₁ξ)
    let (g, gu) = g0_of(&v.a, &v.u)?;
    let m = [0, 1, 2].map(|i| {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let lead = &frame[i][0];
        [lead * &(&g[j] + &g[k]), lead * &(&gu[j] + &gu[k]), (lead * &g[i]).scale(&S::from_i64(-2))]
    });
    let rhs = [0, 1, 2].map(|i| {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let gjk = &g[j] + &g[k];
        let mut r = tangential(&frame[i], &gjk);
        r = &r - &(&tangential(&frame[i], &v.xi) * &g[i]).scale(&S::from_i64(2));
        r = &r + &(&c[i][j][j] * &(&g[i] - &g[j]));
        r = &r + &(&c[i][k][k] * &(&g[i] - &g[k]));
        -&r
    });
    let inv = inverse3(&m).map_err(|_| ConstraintError::Singular)?;
    let sol = [0, 1, 2].map(|r| &(&(&inv[r][0] * &rhs[0]) + &(&inv[r][1] * &rhs[1])) + &(&inv[r][2] * &rhs[2]));
    let [da, du, dxi] = sol;
    Ok(Unknowns { d2: f2, d3: f3, c23: fc23, a: da, u: du, xi: dxi })
}

/// `c₂₃` on the hypersurface from `[D₂, D₃] = Σ c₂₃ᵖ Dₚ`, where the normal
/// derivatives of the frame come from the other two structure equations.
fn initial_c23<S: Scalar>(d: &GermData<S>, d2: &[Jet<S>; 3], d3: &[Jet<S>; 3]) -> Result<[Jet<S>; 3], ConstraintError> {
    let (f2, f3) = frame_flow(d2, d3, &d.c31, &d.c12);
    let br = [0, 1, 2].map(|l| {
        let a = &(&d2[0] * &f3[l]) + &tangential(d2, &d3[l]);
        let b = &(&d3[0] * &f2[l]) + &tangential(d3, &d2[l]);
        &a - &b
    });
    let b = d.base();
    let o = d.order;
    let frame = [[Jet::one(b, o), Jet::zero(b, o), Jet::zero(b, o)], d2.clone(), d3.clone()];
    let inv = inverse3(&frame).map_err(|_| ConstraintError::Singular)?;
    Ok([0, 1, 2].map(|p| (&(&(&br[0] * &inv[0][p]) + &(&br[1] * &inv[1][p])) + &(&br[2] * &inv[2][p])).restrict(1)))
}

/// The unique jet solution: frame, `a, u, ξ` at order `N`, `c₂₃` at `N − 1`.
pub fn ck_solve<S: Scalar>(d: &GermData<S>) -> Result<ConstraintData<S>, ConstraintError> {
    d.validate()?;
    let n = d.order;
    let t = |j: &Jet<S>| j.truncate(n);
    let c31 = d.c31.clone().map(|j| t(&j));
    let c12 = d.c12.clone().map(|j| t(&j));
    let d2 = d.d2.clone().map(|j| t(&j).restrict(1));
    let d3 = d.d3.clone().map(|j| t(&j).restrict(1));
    let c23 = initial_c23(d, &d2, &d3)?;
    let v0 = Unknowns { d2, d3, c23, a: t(&d.a).restrict(1), u: t(&d.u).restrict(1), xi: t(&d.xi).restrict(1) };

    // Leading matrix at the base point.
    {
        let frame = frame_of(&v0);
        let (g, gu) = g0_of(&v0.a, &v0.u)?;
        let m0: [[Jet<S>; 3]; 3] = [0, 1, 2].map(|i| {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            let lead = frame[i][0].truncate(0);
            [&lead * &(&g[j] + &g[k]).truncate(0), &lead * &(&gu[j] + &gu[k]).truncate(0), (&lead * &g[i].truncate(0)).scale(&S::from_i64(-2))]
        });
        inverse3(&m0).map_err(|_| ConstraintError::Singular)?;
    }

    let mut v = v0.clone();
    let step = |base: &Jet<S>, f: &Jet<S>, order: usize| (base + &f.integrate(1)).truncate(order);
    for _ in 0..=n {
        let f = flow(&v, &c31, &c12)?;
        v = Unknowns {
            d2: [0, 1, 2].map(|l| step(&v0.d2[l], &f.d2[l], n)),
            d3: [0, 1, 2].map(|l| step(&v0.d3[l], &f.d3[l], n)),
            c23: [0, 1, 2].map(|l| step(&v0.c23[l], &f.c23[l], n.saturating_sub(1))),
            a: step(&v0.a, &f.a, n),
            u: step(&v0.u, &f.u, n),
            xi: step(&v0.xi, &f.xi, n),
        };
    }
    let frame = frame_of(&v);
    let c = structure(&v.c23, &c31, &c12);
    let (g0, _) = g0_of(&v.a, &v.u)?;
    Ok(ConstraintData { frame, c, g0, xi: v.xi })
}

/// Random polynomial germ data of order `n`, with perturbations of size
/// `scale` around `D₂ = ∂₁ + ∂₂`, `D₃ = (1 + 2x²)∂₁ + ∂₃`, `u = 3`, `a = ξ = 0`.
///
/// The `x²∂₁` term keeps `c₂₃¹` away from zero, so the normalization `𝓝`
/// stays well conditioned.
pub fn random_germ<R: rand::Rng>(rng: &mut R, base: &Base<f64>, n: usize, scale: f64) -> GermData<f64> {
    let tilt = (&Jet::variable(2, base, n) - &Jet::constant(base[2], base, n)).scale(&2.0);
    let mut p = |c0: f64, hyper: bool| random_poly(rng, base, n, c0, hyper, scale);
    let d3 = [&p(1.0, true) + &tilt, p(0.0, true), p(1.0, true)];
    GermData {
        c31: [p(0.0, false), p(0.0, false), p(0.0, false)],
        c12: [p(0.0, false), p(0.0, false), p(0.0, false)],
        d2: [p(1.0, true), p(1.0, true), p(0.0, true)],
        d3,
        a: p(0.0, true),
        u: p(3.0, true),
        xi: p(0.0, true),
        order: n,
    }
}

/// `c0` plus random coefficients on all monomials free of `t` (and of `x¹`
/// if `hyper`), including the constant term.
fn random_poly<R: rand::Rng>(rng: &mut R, base: &Base<f64>, n: usize, c0: f64, hyper: bool, scale: f64) -> Jet<f64> {
    use crate::jet::{exponent, monomial_count};
    let mut terms = vec![([0u8; 4], c0)];
    for k in 0..monomial_count(n) {
        let e = exponent(k);
        if e[0] > 0 || (hyper && e[1] > 0) {
            continue;
        }
        terms.push((e, scale * rng.gen_range(-1.0..1.0)));
    }
    Jet::from_terms(terms, base, n)
}

/// Rational counterpart of [`random_germ`]: perturbations `k/denom` with
/// `|k| ≤ 2` around the same data, and `a(0) = 0` so that `eᵃ` stays rational.
pub fn random_rational_germ<R: rand::Rng>(rng: &mut R, base: &Base<crate::scalar::Q>, n: usize, denom: i64) -> GermData<crate::scalar::Q> {
    use crate::jet::{exponent, monomial_count};
    use crate::scalar::Q;
    let mut p = |c0: i64, hyper: bool, constant: bool| {
        let mut terms = vec![([0u8; 4], Q::from_i64(c0))];
        for k in 0..monomial_count(n) {
            let e = exponent(k);
            if e[0] > 0 || (hyper && e[1] > 0) || (!constant && k == 0) {
                continue;
            }
            terms.push((e, Q::from_ratio(rng.gen_range(-2..=2), denom)));
        }
        Jet::from_terms(terms, base, n)
    };
    GermData {
        c31: [p(0, false, true), p(0, false, true), p(0, false, true)],
        c12: [p(0, false, true), p(0, false, true), p(0, false, true)],
        d2: [p(1, true, true), p(1, true, true), p(0, true, true)],
        d3: [p(1, true, true), p(0, true, true), p(1, true, true)],
        a: p(0, true, false),
        u: p(3, true, true),
        xi: p(0, true, true),
        order: n,
    }
}
