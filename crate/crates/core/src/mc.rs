//! The gauge subspace `θ₀D₀ + 𝓤¹_G`, its over-parametrization by `β, γ, μ`,
//! and the constraint equations on frame data.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{pattern, Algebra, Element, Gen, Pattern, CYCLIC};
use crate::filtration::{basis, basis_match, GradedElement, MultiDegree};
use crate::jet::{Base, Jet, JetError};
use crate::rees::{MuData, SElement};
use crate::scalar::{Scalar, Q};

/// How the weight functions are given: either `μᵢ` or `Eᵢ = e^{2μᵢ}`.
/// The latter keeps rational data rational when `μ` is a logarithm.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "")]
#[serde(rename_all = "lowercase")]
pub enum Weights<S: Scalar> {
    Mu([Jet<S>; 3]),
    Exp2([Jet<S>; 3]),
}

/// `βᵢ = Σ_μ βᵢ^μ ∂_μ` (coordinate components, `μ = t, x¹, x², x³`), the
/// seven `γᵢᵃ`, and the weights.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct GaugeParams<S: Scalar> {
    pub beta: [[Jet<S>; 4]; 3],
    pub gamma: [[Jet<S>; 7]; 3],
    pub weights: Weights<S>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum McError {
    #[error("hypothesis D0(mu_{index}) = gamma_{index}^0 fails (max deviation {deviation:e})")]
    Hypothesis { index: usize, deviation: f64 },
    #[error("element is not in the gauge subspace: {0}")]
    OutsideGauge(String),
    #[error("frame is not invertible at the base point")]
    SingularFrame,
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// A coefficient slot of the gauge subspace.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum Slot {
    /// The fixed `θ₀D₀`.
    D0,
    Beta { i: usize, m: usize },
    Gamma { i: usize, a: usize },
}

/// Multidegree and unit pattern of every slot: the assembled element is
/// `Σ ŝ^α (param + correction)·pattern`.
pub fn gauge_slots() -> Vec<(Slot, MultiDegree, Pattern)> {
    let s = Gen::boost;
    let sp = Gen::sigma_pair;
    let mut v = vec![(Slot::D0, MultiDegree::ZERO, pattern(&[(1, &[0], Gen::D0)]))];
    for (i, j, k) in CYCLIC {
        let g = |a| Slot::Gamma { i, a };
        let mut a = MultiDegree::new(1, 1, 1);
        a.0[i - 1] = 0;
        v.push((g(0), MultiDegree::ZERO, pattern(&[(-1, &[i], s(i)), (-1, &[0], Gen::S0)])));
        let (s1, r1) = sp(j, k);
        let (s2, r2) = sp(k, i);
        let (s3, r3) = sp(i, j);
        v.push((g(1), MultiDegree::unit(i).add(MultiDegree::unit(i)), pattern(&[(-s1, &[i], r1), (s2, &[j], r2), (s3, &[k], r3)])));
        for m in 0..4 {
            v.push((Slot::Beta { i, m }, a, pattern(&[(1, &[i], Gen::derivation(m))])));
        }
        v.push((g(2), a, pattern(&[(-1, &[0], s(i)), (-1, &[i], Gen::S0)])));
        v.push((g(3), a, pattern(&[(-s2, &[k], r2)])));
        v.push((g(4), a, pattern(&[(-s3, &[j], r3)])));
        v.push((g(5), a, pattern(&[(-1, &[k], s(j)), (-1, &[j], s(k))])));
        v.push((g(6), a.add(MultiDegree::unit(i)).add(MultiDegree::unit(i)), pattern(&[(1, &[j], s(k)), (-1, &[k], s(j))])));
    }
    v
}

impl<S: Scalar> Weights<S> {
    pub fn mu_data(&self) -> Result<MuData<S>, JetError> {
        match self {
            Weights::Mu(m) => Ok(MuData::from_mu(m)),
            Weights::Exp2(e) => MuData::from_e(e.clone()),
        }
    }
}

impl<S: Scalar> GaugeParams<S> {
    /// All-zero parameters with `μ = 0`.
    pub fn zero(base: &Base<S>, order: usize) -> Self {
        let z = || Jet::zero(base, order);
        GaugeParams {
            beta: [0, 1, 2].map(|_| [0, 1, 2, 3].map(|_| z())),
            gamma: [0, 1, 2].map(|_| [0, 1, 2, 3, 4, 5, 6].map(|_| z())),
            weights: Weights::Mu([z(), z(), z()]),
        }
    }

    pub fn base(&self) -> &Base<S> {
        self.gamma[0][0].base()
    }

    pub fn order(&self) -> usize {
        self.beta.iter().flatten().chain(self.gamma.iter().flatten()).map(Jet::order).min().unwrap()
    }

    /// `βᵢ(μ_l) = Σ_m βᵢ^m ∂_m μ_l`.
    fn beta_mu(&self, mu: &MuData<S>, i: usize, l: usize) -> Jet<S> {
        let mut acc = &self.beta[i - 1][0] * &mu.dmu[l - 1][0];
        for m in 1..4 {
            acc = &acc + &(&self.beta[i - 1][m] * &mu.dmu[l - 1][m]);
        }
        acc
    }

    fn correction(&self, mu: &MuData<S>, slot: Slot) -> Option<Jet<S>> {
        let Slot::Gamma { i, a } = slot else { return None };
        let (_, j, k) = CYCLIC[i - 1];
        match a {
            2 => Some(&(&self.beta_mu(mu, i, 1) + &self.beta_mu(mu, i, 2)) + &self.beta_mu(mu, i, 3)),
            3 => Some(-self.beta_mu(mu, i, k)),
            4 => Some(self.beta_mu(mu, i, j)),
            _ => None,
        }
    }

    fn slot_value(&self, slot: Slot) -> Jet<S> {
        match slot {
            Slot::D0 => Jet::one(self.base(), self.order()),
            Slot::Beta { i, m } => self.beta[i - 1][m].clone(),
            Slot::Gamma { i, a } => self.gamma[i - 1][a].clone(),
        }
    }

    /// The gauge element `θ₀D₀ + Σ_cyclic …` in reduced form.
    pub fn assemble(&self) -> Result<SElement<S>, JetError> {
        let mu = self.weights.mu_data()?;
        Ok(self.assemble_with(&mu))
    }

    pub fn assemble_with(&self, mu: &MuData<S>) -> SElement<S> {
        let mut x = SElement::new();
        for (slot, alpha, p) in gauge_slots() {
            let mut c = self.slot_value(slot);
            if let Some(corr) = self.correction(mu, slot) {
                c = &c + &corr;
            }
            if !c.is_zero() {
                x.add(alpha, Element::from_pattern(&p, &c));
            }
        }
        x
    }

    /// `∂ₜ` of the quantities that must be `t`-independent in `MC(𝓐_free)`;
    /// only entries that are not negligible at `tol` are reported.
    pub fn necessary_conditions(&self, tol: f64) -> Result<Vec<(String, Jet<S>)>, McError> {
        let mu = self.weights.mu_data()?;
        for i in 0..3 {
            let dev = (&mu.dmu[i][0] - &self.gamma[i][0]).max_abs();
            if dev > tol {
                return Err(McError::Hypothesis { index: i + 1, deviation: dev });
            }
        }
        let mut out = Vec::new();
        let mut report = |name: String, j: Jet<S>| {
            if !j.is_negligible(tol) {
                out.push((name, j));
            }
        };
        for (i, j, k) in CYCLIC {
            for m in 0..4 {
                report(format!("beta_{i}^{m}"), self.beta[i - 1][m].derive(0));
            }
            for a in [0, 1, 2, 3, 4, 6] {
                report(format!("gamma_{i}^{a}"), self.gamma[i - 1][a].derive(0));
            }
            let g5 = &self.gamma[i - 1][5];
            let w = &mu.dmu[j - 1][0] + &mu.dmu[k - 1][0];
            report(format!("exp(mu_{j}+mu_{k}) gamma_{i}^5"), &g5.derive(0) + &(g5 * &w));
        }
        Ok(out)
    }
}

/// Reads the gauge parameters back from a reduced s-element; the weights
/// must be supplied since reduced coefficients depend on them.
pub fn extract_gauge_params<S: Scalar>(
    alg: &Algebra,
    x: &SElement<S>,
    weights: Weights<S>,
    tol: f64,
) -> Result<GaugeParams<S>, McError> {
    let mu = weights.mu_data()?;
    let (base, order) = x
        .comps
        .values()
        .flat_map(|e| e.terms().map(|(_, _, j)| (j.base().clone(), j.order())))
        .reduce(|a, b| (a.0, a.1.min(b.1)))
        .ok_or_else(|| McError::OutsideGauge("empty element".into()))?;
    let mut p = GaugeParams::zero(&base, order);
    p.weights = weights;
    let b = basis();
    let slots = gauge_slots();
    let mut found: Vec<Option<Jet<S>>> = vec![None; slots.len()];
    let index: Vec<(usize, Q)> = slots.iter().map(|(_, _, pat)| basis_match(pat).expect("gauge slot is a basis element")).collect();
    for (alpha, e) in &x.comps {
        for (n, c) in alg.coordinates(e) {
            match slots.iter().enumerate().find(|(s, (_, a, _))| a == alpha && index[*s].0 == n) {
                Some((s, _)) => found[s] = Some(c.scale(&S::from_q(&index[s].1.recip()))),
                None => {
                    if !c.is_negligible(tol) {
                        return Err(McError::OutsideGauge(format!("component {n} ({}) at s-degree {alpha}", b[n].alpha)));
                    }
                }
            }
        }
    }
    let zero = Jet::zero(&base, order);
    for (s, (slot, _, _)) in slots.iter().enumerate() {
        let v = found[s].clone().unwrap_or_else(|| zero.clone());
        match *slot {
            Slot::D0 => {
                let dev = (&v - &Jet::one(&base, order)).max_abs();
                if dev > tol {
                    return Err(McError::OutsideGauge(format!("theta0 D0 coefficient deviates from 1 by {dev:e}")));
                }
            }
            Slot::Beta { i, m } => p.beta[i - 1][m] = v,
            Slot::Gamma { .. } => {}
        }
    }
    for (s, (slot, _, _)) in slots.iter().enumerate() {
        if let Slot::Gamma { i, a } = *slot {
            let mut v = found[s].clone().unwrap_or_else(|| zero.clone());
            if let Some(corr) = p.correction(&mu, *slot) {
                v = &v - &corr;
            }
            p.gamma[i - 1][a] = v;
        }
    }
    Ok(p)
}

/// Components of a graded element on `θ₀`-multiples (the `𝓐²/𝓐²_G` part).
pub fn theta0_part<S: Scalar>(r: &GradedElement<S>) -> GradedElement<S> {
    let b = basis();
    let mut out = GradedElement::default();
    for v in r.parts.values() {
        for (n, c) in v {
            if b[*n].theta0 {
                out.push(*n, c.clone());
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Constraint data

/// Frame data on `S`: `Dᵢ = Σ_k frame[i][k] ∂_{x^{k+1}}`, structure functions
/// `c[a][b][l] = c_{ab}^l`, the `g⁰ᵢ` and the potential `ξ`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ConstraintData<S: Scalar> {
    pub frame: [[Jet<S>; 3]; 3],
    pub c: [[[Jet<S>; 3]; 3]; 3],
    pub g0: [Jet<S>; 3],
    pub xi: Jet<S>,
}

/// `gᵢ^{1,2,3,4}` as `g[a-1][i-1]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct DerivedData<S: Scalar> {
    pub g: [[Jet<S>; 3]; 4],
}

/// `mce1`, `mce2ᵢ` and `mce3` for the pairs `(2,3), (3,1), (1,2)` by component.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ConstraintResiduals<S: Scalar> {
    pub mce1: Jet<S>,
    pub mce2: [Jet<S>; 3],
    pub mce3: [[Jet<S>; 3]; 3],
}

impl<S: Scalar> ConstraintResiduals<S> {
    pub fn entries(&self) -> Vec<(String, &Jet<S>)> {
        let mut v = vec![("mce1".to_string(), &self.mce1)];
        for i in 0..3 {
            v.push((format!("mce2_{}", i + 1), &self.mce2[i]));
        }
        for (p, (_, j, k)) in CYCLIC.iter().enumerate() {
            for l in 0..3 {
                v.push((format!("mce3_{j}{k}^{}", l + 1), &self.mce3[p][l]));
            }
        }
        v
    }

    pub fn max_abs(&self) -> f64 {
        self.entries().iter().map(|(_, j)| j.max_abs()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.entries().iter().all(|(_, j)| j.is_negligible(tol))
    }

    pub fn truncate(&self, order: usize) -> Self {
        ConstraintResiduals {
            mce1: self.mce1.truncate(order),
            mce2: self.mce2.clone().map(|j| j.truncate(order)),
            mce3: self.mce3.clone().map(|r| r.map(|j| j.truncate(order))),
        }
    }
}

/// Inverse of a 3×3 jet matrix via the adjugate.
pub fn inverse3<S: Scalar>(m: &[[Jet<S>; 3]; 3]) -> Result<[[Jet<S>; 3]; 3], McError> {
    let cof = |r: usize, c: usize| {
        let (r1, r2) = ((r + 1) % 3, (r + 2) % 3);
        let (c1, c2) = ((c + 1) % 3, (c + 2) % 3);
        &(&m[r1][c1] * &m[r2][c2]) - &(&m[r1][c2] * &m[r2][c1])
    };
    let det = &(&(&m[0][0] * &cof(0, 0)) + &(&m[0][1] * &cof(0, 1))) + &(&m[0][2] * &cof(0, 2));
    if det.value().is_negligible(0.0) {
        return Err(McError::SingularFrame);
    }
    let inv = det.recip()?;
    Ok([0, 1, 2].map(|r| [0, 1, 2].map(|c| &cof(c, r) * &inv)))
}

impl<S: Scalar> ConstraintData<S> {
    /// Computes the structure functions from the frame.
    pub fn from_frame(frame: [[Jet<S>; 3]; 3], g0: [Jet<S>; 3], xi: Jet<S>) -> Result<Self, McError> {
        let c = structure_functions(&frame)?;
        Ok(ConstraintData { frame, c, g0, xi })
    }

    pub fn base(&self) -> &Base<S> {
        self.xi.base()
    }

    /// `Dᵢ(f)`, `i = 1, 2, 3`.
    pub fn d(&self, i: usize, f: &Jet<S>) -> Jet<S> {
        frame_apply(&self.frame, i, f)
    }

    pub fn structure(&self, a: usize, b: usize, l: usize) -> &Jet<S> {
        &self.c[a - 1][b - 1][l - 1]
    }

    pub fn derived(&self) -> DerivedData<S> {
        let mut g: [[Option<Jet<S>>; 3]; 4] = Default::default();
        for (i, j, k) in CYCLIC {
            let g2 = self.d(i, &self.xi);
            g[0][i - 1] = Some(self.structure(j, k, i).scale(&S::from_ratio(-1, 2)));
            g[2][i - 1] = Some(-&(self.structure(k, i, k) + &g2));
            g[3][i - 1] = Some(&g2 - self.structure(i, j, j));
            g[1][i - 1] = Some(g2);
        }
        DerivedData { g: g.map(|r| r.map(Option::unwrap)) }
    }

    pub fn residuals(&self) -> ConstraintResiduals<S> {
        let g = &self.g0;
        let mce1 = &(&(&g[1] * &g[2]) + &(&g[2] * &g[0])) + &(&g[0] * &g[1]);
        let mce2 = CYCLIC.map(|(i, j, k)| {
            let (gi, gj, gk) = (&g[i - 1], &g[j - 1], &g[k - 1]);
            let mut r = self.d(i, &(gj + gk));
            r = &r + &(self.structure(i, j, j) * &(gi - gj));
            r = &r + &(self.structure(i, k, k) * &(gi - gk));
            &r - &(&self.d(i, &self.xi) * gi).scale(&S::from_i64(2))
        });
        let mce3 = CYCLIC.map(|(_, j, k)| {
            let br = frame_bracket(&self.frame, j, k);
            [0, 1, 2].map(|l| {
                let mut r = br[l].clone();
                for p in 1..=3 {
                    r = &r - &(self.structure(j, k, p) * &self.frame[p - 1][l]);
                }
                r
            })
        });
        ConstraintResiduals { mce1, mce2, mce3 }
    }

    /// The sufficient-gauge parameters: `μᵢ = t g⁰ᵢ`, `βᵢ = Dᵢ`,
    /// `γᵢᵃ = gᵢᵃ` for `a ≤ 4`, `γ⁵ = γ⁶ = 0`.
    pub fn sufficient_gauge(&self) -> GaugeParams<S> {
        let base = self.base().clone();
        let order = self.xi.order();
        let t = Jet::variable(0, &base, order + 1);
        let d = self.derived();
        let mut p = GaugeParams::zero(&base, order);
        for i in 0..3 {
            p.beta[i] = [Jet::zero(&base, order), self.frame[i][0].clone(), self.frame[i][1].clone(), self.frame[i][2].clone()];
            p.gamma[i][0] = self.g0[i].clone();
            for a in 1..=4 {
                p.gamma[i][a] = d.g[a - 1][i].clone();
            }
        }
        p.weights = Weights::Mu(self.g0.clone().map(|g| &t * &g));
        p
    }

    /// Largest coefficient among frame, structure functions, `g⁰` and `ξ`.
    pub fn magnitude(&self) -> f64 {
        let mut m = self.xi.max_abs();
        for j in self.frame.iter().flatten().chain(self.c.iter().flatten().flatten()).chain(self.g0.iter()) {
            m = m.max(j.max_abs());
        }
        m
    }

    pub fn map_jets<T: Scalar>(&self, f: impl Fn(&Jet<S>) -> Jet<T>) -> ConstraintData<T> {
        ConstraintData {
            frame: self.frame.clone().map(|r| r.map(|j| f(&j))),
            c: self.c.clone().map(|a| a.map(|b| b.map(|j| f(&j)))),
            g0: self.g0.clone().map(|j| f(&j)),
            xi: f(&self.xi),
        }
    }

    pub fn truncate(&self, order: usize) -> Self {
        self.map_jets(|j| j.truncate(order))
    }
}

pub fn frame_apply<S: Scalar>(frame: &[[Jet<S>; 3]; 3], i: usize, f: &Jet<S>) -> Jet<S> {
    let mut acc = &frame[i - 1][0] * &f.derive(1);
    for k in 1..3 {
        acc = &acc + &(&frame[i - 1][k] * &f.derive(k + 1));
    }
    acc
}

/// Coordinate components of `[D_a, D_b]`.
pub fn frame_bracket<S: Scalar>(frame: &[[Jet<S>; 3]; 3], a: usize, b: usize) -> [Jet<S>; 3] {
    [0, 1, 2].map(|l| &frame_apply(frame, a, &frame[b - 1][l]) - &frame_apply(frame, b, &frame[a - 1][l]))
}

/// `c_{ab}^l` solving `[D_a, D_b] = Σ c_{ab}^l D_l`; the order drops by one.
pub fn structure_functions<S: Scalar>(frame: &[[Jet<S>; 3]; 3]) -> Result<[[[Jet<S>; 3]; 3]; 3], McError> {
    let inv = inverse3(frame)?;
    let base = frame[0][0].base().clone();
    let order = frame.iter().flatten().map(Jet::order).min().unwrap().saturating_sub(1);
    let mut c: [[[Jet<S>; 3]; 3]; 3] = [0, 1, 2].map(|_| [0, 1, 2].map(|_| [0, 1, 2].map(|_| Jet::zero(&base, order))));
    for a in 1..=3 {
        for b in (a + 1)..=3 {
            let br = frame_bracket(frame, a, b);
            for l in 0..3 {
                // row vector br · inv
                let mut v = &br[0] * &inv[0][l];
                for k in 1..3 {
                    v = &v + &(&br[k] * &inv[k][l]);
                }
                c[b - 1][a - 1][l] = -&v;
                c[a - 1][b - 1][l] = v;
            }
        }
    }
    Ok(c)
}
