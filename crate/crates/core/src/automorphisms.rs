//! Automorphisms: `1+3`-groupoid isomorphisms with identity spatial map,
//! nilpotent `exp([x, −])` on `𝓐_free`, reflections of `θ₁, θ₂, θ₃`, and the
//! gauge normalization and scale-transform factorization built from them.

use thiserror::Error;

use crate::algebra::{Algebra, Element, Gen, Theta, CYCLIC};
use crate::bounce::{scale_transform_log, BounceError};
use crate::filtration::{basis, GradedElement, MultiDegree};
use crate::jet::{base_point, Base, Jet, JetError};
use crate::mc::{extract_gauge_params, frame_apply, ConstraintData, GaugeParams, McError, Weights};
use crate::rees::{bracket_s, MuData, Mode, ReesError, SElement};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AutoError {
    #[error("positivity violated: {0}")]
    Positivity(String),
    #[error("element is based at the wrong point for this morphism")]
    BasePoint,
    #[error("generator not admissible: {0}")]
    Generator(String),
    #[error("degenerate: {0}")]
    Degenerate(String),
    #[error("not solvable: {0}")]
    NotSolvable(String),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Rees(#[from] ReesError),
    #[error(transparent)]
    Mc(#[from] McError),
    #[error(transparent)]
    Bounce(#[from] BounceError),
}

/// `Φ(t, x) = (a(x)t + b(x), x)` with `θ_μ ↦ cθ_μ`.
#[derive(Clone, Debug)]
pub struct GroupoidMorphism<S: Scalar> {
    pub a: Jet<S>,
    pub b: Jet<S>,
    pub c: Jet<S>,
}

impl<S: Scalar> GroupoidMorphism<S> {
    pub fn identity(base: &Base<S>, order: usize) -> Self {
        GroupoidMorphism { a: Jet::one(base, order), b: Jet::zero(base, order), c: Jet::one(base, order) }
    }

    pub fn new(a: Jet<S>, b: Jet<S>, c: Jet<S>) -> Result<Self, AutoError> {
        for (n, j) in [("a", &a), ("c", &c)] {
            if !j.value().is_positive() {
                return Err(AutoError::Positivity(format!("{n} = {}", j.value().render())));
            }
        }
        for (n, j) in [("a", &a), ("b", &b), ("c", &c)] {
            if j.depends_on(0) {
                return Err(AutoError::Positivity(format!("{n} depends on t")));
            }
            if !j.same_base(&a) {
                return Err(AutoError::BasePoint);
            }
        }
        Ok(GroupoidMorphism { a, b, c })
    }

    /// The point the source jets must be expanded at: `Φ(p)`.
    pub fn source_base(&self) -> Base<S> {
        let p = self.a.base();
        base_point([self.a.value().clone() * p[0].clone() + self.b.value().clone(), p[1].clone(), p[2].clone(), p[3].clone()])
    }

    fn phi(&self) -> [Jet<S>; 4] {
        let p = self.a.base();
        let o = self.a.order();
        let t = Jet::variable(0, p, o);
        [&(&self.a * &t) + &self.b, Jet::variable(1, p, o), Jet::variable(2, p, o), Jet::variable(3, p, o)]
    }

    /// `f ↦ f∘Φ`.
    pub fn pull(&self, f: &Jet<S>) -> Result<Jet<S>, AutoError> {
        if **f.base() != *self.source_base() {
            return Err(AutoError::BasePoint);
        }
        let src = self.source_base();
        let f = f.rebase(&src);
        Ok(f.compose(&self.phi().map(|j| j.clone()))?)
    }

    fn generator_image(&self, g: Gen) -> Result<Vec<(Gen, Jet<S>)>, AutoError> {
        let p = self.a.base();
        let o = self.a.order();
        if g.is_sigma() {
            return Ok(vec![(g, Jet::one(p, o))]);
        }
        let ia = self.a.recip()?;
        match g.axis() {
            Some(0) => Ok(vec![(Gen::D0, ia)]),
            Some(k) => {
                let t = Jet::variable(0, p, o);
                let xat = &(&t * &self.a.derive(k)) + &self.b.derive(k);
                let xc = &self.c.derive(k) * &self.c.recip()?;
                Ok(vec![(g, Jet::one(p, o)), (Gen::D0, -&(&xat * &ia)), (Gen::S0, -&xc)])
            }
            None => unreachable!(),
        }
    }

    pub fn apply(&self, e: &Element<S>) -> Result<Element<S>, AutoError> {
        let images: Vec<_> = Gen::ALL.iter().map(|g| self.generator_image(*g)).collect::<Result<_, _>>()?;
        let mut out = Element::zero();
        for (m, g, f) in e.terms() {
            let mut coeff = self.pull(f)?;
            for _ in 0..m.degree() {
                coeff = &coeff * &self.c;
            }
            for (h, w) in &images[g.index()] {
                out.add_term(m, *h, &coeff * w);
            }
        }
        Ok(out)
    }

    pub fn apply_s(&self, x: &SElement<S>) -> Result<SElement<S>, AutoError> {
        let mut out = SElement::new();
        for (a, e) in &x.comps {
            out.add(*a, self.apply(e)?);
        }
        Ok(out)
    }

    /// Weights pulled back along `Φ`, consistent with [`Self::apply_s`] on
    /// reduced coefficients.
    pub fn pull_weights(&self, w: &Weights<S>) -> Result<Weights<S>, AutoError> {
        Ok(match w {
            Weights::Mu(m) => Weights::Mu([self.pull(&m[0])?, self.pull(&m[1])?, self.pull(&m[2])?]),
            Weights::Exp2(e) => Weights::Exp2([self.pull(&e[0])?, self.pull(&e[1])?, self.pull(&e[2])?]),
        })
    }
}

/// Image in `𝓐_free`: each `ŝ^α X_α` keeps its `G_α` part only.
pub fn free_projection<S: Scalar>(alg: &Algebra, x: &SElement<S>) -> SElement<S> {
    let b = basis();
    let mut out = SElement::new();
    for (a, e) in &x.comps {
        let mut g = GradedElement::default();
        for (n, c) in alg.coordinates(e) {
            if b[n].alpha == *a {
                g.push(n, c);
            }
        }
        out.add(*a, g.reassemble());
    }
    out
}

fn graded_to_s<S: Scalar>(g: GradedElement<S>) -> SElement<S> {
    let mut out = SElement::new();
    for (a, e) in g.components() {
        out.add(a, e);
    }
    out
}

/// `exp([x, −])` on `𝓐_free`, for a degree-0 `x` supported in nonzero
/// multidegrees; the series terminates since every bracket raises the
/// multidegree.
pub fn apply_nilpotent<S: Scalar>(alg: &Algebra, x: &SElement<S>, e: &SElement<S>, mu: &MuData<S>) -> Result<SElement<S>, AutoError> {
    for (a, c) in &x.comps {
        if *a == MultiDegree::ZERO {
            return Err(AutoError::Generator("component at multidegree 000".into()));
        }
        if c.degree() != Some(0) {
            return Err(AutoError::Generator(format!("component at {a} has degree {:?}", c.degree())));
        }
    }
    if !x.rees_violations(alg, Mode::Free, 0.0).is_empty() {
        return Err(AutoError::Generator("not in the Rees algebra".into()));
    }
    let mut term = free_projection(alg, e);
    let mut out = term.clone();
    for n in 1..=12 {
        term = graded_to_s(bracket_s(alg, x, &term, mu, Mode::Free)?).map(|_, c| c.scale_scalar(&(S::one() / S::from_i64(n))));
        if term.comps.is_empty() {
            break;
        }
        out = out.sum(&term);
    }
    Ok(out)
}

/// `f s_j s_k σ_i` (case i) or `f s_j s_k σ_jk` (case ii) with reduced coefficient `f`.
pub fn nilpotent_generator<S: Scalar>(i: usize, rotation: bool, f: &Jet<S>) -> SElement<S> {
    let mut a = MultiDegree::new(1, 1, 1);
    a.0[i - 1] = 0;
    let g = if rotation { Gen::rotation(i) } else { Gen::boost(i) };
    SElement::single(a, Element::term(Theta::ONE, g, f.clone()))
}

/// The solution of `∂_t f = λ f` with `f = f₀` on `t = t₀`, order by order.
pub fn solve_t_flow<S: Scalar>(lambda: &Jet<S>, initial: &Jet<S>) -> Jet<S> {
    let order = initial.order().min(lambda.order() + 1);
    let f0 = initial.restrict(0).truncate(order);
    let mut f = f0.clone();
    for _ in 0..=order {
        f = (&f0 + &(lambda * &f).integrate(0)).truncate(order);
    }
    f
}

/// The reduced coefficient of an admissible nilpotent generator at index
/// `i` with the given values on `t = t₀`: case (i) needs
/// `D₀f − (γⱼ⁰+γₖ⁰)f = 0`, case (ii) `D₀f = 0`, for the unreduced `f`.
pub fn admissible_coefficient<S: Scalar>(i: usize, rotation: bool, initial: &Jet<S>, gamma0: &[Jet<S>; 3], mu: &MuData<S>) -> Jet<S> {
    let (j, k) = (i % 3 + 1, (i + 1) % 3 + 1);
    let mut lambda = -&(&mu.dmu[j - 1][0] + &mu.dmu[k - 1][0]);
    if !rotation {
        lambda = &lambda + &(&gamma0[j - 1] + &gamma0[k - 1]);
    }
    solve_t_flow(&lambda, initial)
}

/// `θᵢ ↦ σθᵢ` for `i = 1, 2, 3`; conjugation sends `σᵢ ↦ σσᵢ`.
pub fn reflect<S: Scalar>(e: &Element<S>, sigma: i8) -> Element<S> {
    if sigma == 1 {
        return e.clone();
    }
    e.map_terms(|m, g, f| {
        let spatial = m.indices().iter().filter(|&&i| i > 0).count() + usize::from(matches!(g, Gen::S1 | Gen::S2 | Gen::S3));
        let f = if spatial % 2 == 1 { -f } else { f.clone() };
        Element::term(m, g, f)
    })
}

pub fn reflect_s<S: Scalar>(x: &SElement<S>, sigma: i8) -> SElement<S> {
    x.map(|_, e| reflect(e, sigma))
}

/// Changes the reference weights of reduced coefficients: multiplies the
/// `α` component by `e^{α·δ}` where `δ = μ_old − μ_new`.
pub fn reweight<S: Scalar>(x: &SElement<S>, delta: &[Jet<S>; 3]) -> Result<SElement<S>, JetError> {
    let mut out = SElement::new();
    for (a, e) in &x.comps {
        let mut w = delta[0].scale(&S::from_i64(a.0[0] as i64));
        for i in 1..3 {
            w = &w + &delta[i].scale(&S::from_i64(a.0[i] as i64));
        }
        let f = w.exp()?;
        out.add(*a, e.scale(&f));
    }
    Ok(out)
}

/// Removes `βᵢ⁰` with case (i) and then `γᵢ⁵` with case (ii); each generator
/// solves the `D₀`-equation of its case with the cancelling value on `t = t₀`.
pub fn gauge_normalize<S: Scalar>(alg: &Algebra, p: &GaugeParams<S>, tol: f64) -> Result<GaugeParams<S>, AutoError> {
    let mu = p.weights.mu_data()?;
    let mut x = p.assemble_with(&mu);

    let gamma0 = p.gamma.clone().map(|g| g[0].clone());
    let mut cur = p.clone();
    if p.beta.iter().any(|b| !b[0].is_negligible(tol)) {
        for (i, _, _) in CYCLIC {
            let f = admissible_coefficient(i, false, &-&cur.beta[i - 1][0], &gamma0, &mu);
            x = apply_nilpotent(alg, &nilpotent_generator(i, false, &f), &x, &mu)?;
        }
        cur = extract_gauge_params(alg, &x, p.weights.clone(), tol)?;
        for i in 0..3 {
            if !cur.beta[i][0].is_negligible(tol) {
                return Err(AutoError::NotSolvable(format!("beta_{}^0 is not removable (t-dependent)", i + 1)));
            }
        }
    }
    if cur.gamma.iter().any(|g| !g[5].is_negligible(tol)) {
        for (i, j, k) in CYCLIC {
            let diff = &cur.gamma[j - 1][0] - &cur.gamma[k - 1][0];
            if diff.value().is_negligible(tol) {
                return Err(AutoError::Degenerate(format!("gamma_{j}^0 - gamma_{k}^0 vanishes at the base point")));
            }
            let f = admissible_coefficient(i, true, &(&cur.gamma[i - 1][5] * &diff.recip()?), &gamma0, &mu);
            x = apply_nilpotent(alg, &nilpotent_generator(i, true, &f), &x, &mu)?;
        }
        cur = extract_gauge_params(alg, &x, p.weights.clone(), tol)?;
        for i in 0..3 {
            if !cur.gamma[i][5].is_negligible(tol) {
                return Err(AutoError::NotSolvable(format!("gamma_{}^5 is not removable", i + 1)));
            }
        }
    }
    Ok(cur)
}

/// Both sides of the factorization of the scale transform, as elements of
/// `𝓐_free` at the base point of `c`: the sufficient-gauge element of the
/// transformed data, and steps 1–3 applied to the sufficient-gauge element
/// of `c`.
pub fn factorization_sides<S: Scalar>(
    alg: &Algebra,
    c: &ConstraintData<S>,
    a: &Jet<S>,
    log_b: &Jet<S>,
    sigma: i8,
) -> Result<(SElement<S>, SElement<S>), AutoError> {
    let target = scale_transform_log(c, a, log_b, sigma)?;
    let tp = target.sufficient_gauge();
    let lhs = free_projection(alg, &tp.assemble()?);

    // Step 1: a = c = A, b = log B; the source is expanded at Φ(p).
    let m = GroupoidMorphism::new(a.clone(), log_b.clone(), a.clone())?;
    let q = m.source_base();
    let cq = c.map_jets(|j| j.recenter(&q));
    let sp = cq.sufficient_gauge();
    let x = m.apply_s(&sp.assemble()?)?;
    let Weights::Mu(mu_src) = m.pull_weights(&sp.weights)? else { unreachable!() };
    let Weights::Mu(mu_tgt) = &tp.weights else { unreachable!() };
    let delta = [0, 1, 2].map(|i| &mu_src[i] - &mu_tgt[i]);
    let mut x = reweight(&x, &delta)?;
    let mu = tp.weights.mu_data()?;

    // Step 2: f_i = e^{(At + log B)(g_j + g_k)} D_i(At + log B), reduced w.r.t. μ_tgt.
    let base = c.base().clone();
    let t = Jet::variable(0, &base, a.order());
    let phase = &(&t * a) + log_b;
    for (i, j, k) in CYCLIC {
        let w = &(&phase - &(&t * a)) * &(&c.g0[j - 1] + &c.g0[k - 1]);
        let f = &w.exp()? * &frame_apply(&c.frame, i, &phase);
        x = apply_nilpotent(alg, &nilpotent_generator(i, false, &f), &x, &mu)?;
    }

    // Step 3.
    let x = reflect_s(&x, sigma);
    Ok((lhs, free_projection(alg, &x)))
}

/// Largest coordinate of the difference of two elements of `𝓐_free`.
pub fn free_difference<S: Scalar>(alg: &Algebra, x: &SElement<S>, y: &SElement<S>) -> f64 {
    let neg = y.map(|_, e| e.neg());
    let d = free_projection(alg, &x.sum(&neg));
    d.comps.values().map(|e| e.max_abs()).fold(0.0, f64::max)
}
