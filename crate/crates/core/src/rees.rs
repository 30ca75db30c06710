//! Elements of the Rees algebras `𝓟_free`, `𝓟_bounce` and their brackets,
//! with coefficients stored relative to `ŝ^α = s^α e^{α·μ}`.
//!
//! A component `(α, X)` stands for `ŝ^α X`. Derivations then act on the
//! reduced coefficient `c` of `X` by `∂c + c·(α·∂μ)`, and the weight functions
//! `μᵢ` only enter through `∂μᵢ` and through `Eᵢ = e^{2μᵢ}`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{Algebra, Element};
use crate::filtration::{basis, decompose_graded, GradedElement, MultiDegree};
use crate::jet::{Base, Jet, JetError, NVARS};
use crate::scalar::{Scalar, Q};

#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `𝓐_free`: all three `sᵢ` formal.
    Free,
    /// `𝓐_bounce`: only `s₂, s₃` formal.
    Bounce,
    /// `𝓔` itself: every `ŝᵢ = e^{μᵢ}`.
    E,
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "free" => Ok(Mode::Free),
            "bounce" => Ok(Mode::Bounce),
            "e" => Ok(Mode::E),
            _ => Err(format!("unknown mode {s:?} (free|bounce|E)")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReesError {
    #[error("Maurer-Cartan residual needs a degree-1 element, got degree {0:?}")]
    Degree(Option<usize>),
    #[error("mode {0:?} needs the weights E_i = exp(2 mu_i)")]
    MissingWeights(Mode),
    #[error("bracket component {found} at s-degree {at} has odd s1-drop")]
    Parity { at: MultiDegree, found: MultiDegree },
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// First derivatives of the weights `μᵢ` and, when needed, `Eᵢ = e^{2μᵢ}`.
#[derive(Clone, Debug)]
pub struct MuData<S: Scalar> {
    /// `dmu[i][v] = ∂_v μ_{i+1}`.
    pub dmu: [[Jet<S>; NVARS]; 3],
    pub e: Option<[Jet<S>; 3]>,
}

impl<S: Scalar> MuData<S> {
    /// `μ = 0`.
    pub fn zero(base: &Base<S>, order: usize) -> Self {
        let z = || Jet::zero(base, order);
        MuData { dmu: [[z(), z(), z(), z()], [z(), z(), z(), z()], [z(), z(), z(), z()]], e: Some([0, 1, 2].map(|_| Jet::one(base, order))) }
    }

    /// From the `μᵢ` themselves; `Eᵢ` is only formed if representable.
    pub fn from_mu(mu: &[Jet<S>; 3]) -> Self {
        let dmu = [0, 1, 2].map(|i| [0, 1, 2, 3].map(|v| mu[i].derive(v)));
        let e = mu.iter().map(|m| m.scale(&S::from_i64(2)).exp()).collect::<Result<Vec<_>, _>>().ok();
        MuData { dmu, e: e.map(|v| [v[0].clone(), v[1].clone(), v[2].clone()]) }
    }

    /// From `Eᵢ = e^{2μᵢ}` via `∂μ = ∂E / (2E)`.
    pub fn from_e(e: [Jet<S>; 3]) -> Result<Self, JetError> {
        let mut dmu = Vec::new();
        for ei in &e {
            let inv = ei.recip()?.scale(&S::from_ratio(1, 2));
            dmu.push([0, 1, 2, 3].map(|v| &ei.derive(v) * &inv));
        }
        Ok(MuData { dmu: [dmu[0].clone(), dmu[1].clone(), dmu[2].clone()], e: Some(e) })
    }

    /// `∂_v c + c·Σᵢ wᵢ ∂_v μᵢ`.
    pub fn twisted_derivative(&self, w: MultiDegree, v: usize, c: &Jet<S>) -> Jet<S> {
        let mut d = c.derive(v);
        for i in 0..3 {
            if w.0[i] > 0 {
                d = &d + &(c * &self.dmu[i][v]).scale(&S::from_i64(w.0[i] as i64));
            }
        }
        d
    }

    /// `Π Eᵢ^{dᵢ/2}`.
    fn weight_factor(&self, d: [i32; 3], mode: Mode) -> Result<Option<Jet<S>>, ReesError> {
        if d == [0, 0, 0] {
            return Ok(None);
        }
        let e = self.e.as_ref().ok_or(ReesError::MissingWeights(mode))?;
        let mut acc: Option<Jet<S>> = None;
        for i in 0..3 {
            if d[i] == 0 {
                continue;
            }
            let f = if d[i] % 2 == 0 {
                e[i].pow_i(d[i] as i64 / 2)?
            } else {
                e[i].pow_q(&Q::new(d[i].into(), 2.into()))?
            };
            acc = Some(match acc {
                Some(a) => &a * &f,
                None => f,
            });
        }
        Ok(acc)
    }
}

/// `Σ_α ŝ^α X_α` with reduced coefficients.
#[derive(Clone, Debug)]
pub struct SElement<S: Scalar> {
    pub comps: BTreeMap<MultiDegree, Element<S>>,
}

impl<S: Scalar> Default for SElement<S> {
    fn default() -> Self {
        SElement { comps: BTreeMap::new() }
    }
}

impl<S: Scalar> SElement<S> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(alpha: MultiDegree, x: Element<S>) -> Self {
        let mut s = Self::new();
        s.add(alpha, x);
        s
    }

    pub fn add(&mut self, alpha: MultiDegree, x: Element<S>) {
        let e = self.comps.entry(alpha).or_default();
        *e = e.add(&x);
        if e.is_empty() {
            self.comps.remove(&alpha);
        }
    }

    pub fn sum(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (a, x) in &other.comps {
            out.add(*a, x.clone());
        }
        out
    }

    pub fn degree(&self) -> Option<usize> {
        let mut it = self.comps.values().map(Element::degree);
        let first = it.next()??;
        for d in it {
            if d != Some(first) {
                return None;
            }
        }
        Some(first)
    }

    pub fn map(&self, mut f: impl FnMut(MultiDegree, &Element<S>) -> Element<S>) -> Self {
        let mut out = Self::new();
        for (a, x) in &self.comps {
            out.add(*a, f(*a, x));
        }
        out
    }

    /// Drops components of total s-degree above `k`.
    pub fn truncate_s(&self, k: usize) -> Self {
        SElement { comps: self.comps.iter().filter(|(a, _)| a.total() <= k).map(|(a, x)| (*a, x.clone())).collect() }
    }

    /// Rees membership `X_α ∈ F_α𝓔` (all three indices for `Free`, only
    /// `(p₂, p₃)` for `Bounce`); returns the offending `(α, support)` pairs.
    pub fn rees_violations(&self, alg: &Algebra, mode: Mode, tol: f64) -> Vec<(MultiDegree, MultiDegree)> {
        let mut out = Vec::new();
        for (a, x) in &self.comps {
            for b in decompose_graded(alg, x).support(tol) {
                let ok = match mode {
                    Mode::Free => b.le(a),
                    Mode::Bounce => b.0[1] <= a.0[1] && b.0[2] <= a.0[2],
                    Mode::E => true,
                };
                if !ok {
                    out.push((*a, b));
                }
            }
        }
        out
    }

    /// The element of `𝓔` obtained by `ŝᵢ ↦ e^{μᵢ}`.
    pub fn to_e(&self, mu: &MuData<S>) -> Result<Element<S>, ReesError> {
        let mut out = Element::zero();
        for (a, x) in &self.comps {
            let x = match mu.weight_factor(a.as_i32(), Mode::E)? {
                Some(f) => x.scale(&f),
                None => x.clone(),
            };
            out = out.add(&x);
        }
        Ok(out)
    }

    pub fn truncate(&self, order: usize) -> Self {
        self.map(|_, x| x.truncate(order))
    }
}

/// The bracket of two s-elements, projected according to `mode` and
/// returned by basis multidegree (reduced to `ŝ^{label}`).
pub fn bracket_s<S: Scalar>(
    alg: &Algebra,
    x: &SElement<S>,
    y: &SElement<S>,
    mu: &MuData<S>,
    mode: Mode,
) -> Result<GradedElement<S>, ReesError> {
    let mut acc: BTreeMap<MultiDegree, Element<S>> = BTreeMap::new();
    for (a, xa) in &x.comps {
        for (b, yb) in &y.comps {
            let br = bracket_weighted(alg, *a, xa, *b, yb, mu);
            let e = acc.entry(a.add(*b)).or_default();
            *e = e.add(&br);
        }
    }
    project(alg, acc, mu, mode)
}

fn bracket_weighted<S: Scalar>(
    alg: &Algebra,
    a: MultiDegree,
    x: &Element<S>,
    b: MultiDegree,
    y: &Element<S>,
    mu: &MuData<S>,
) -> Element<S> {
    let da = |v: usize, c: &Jet<S>| mu.twisted_derivative(a, v, c);
    let db = |v: usize, c: &Jet<S>| mu.twisted_derivative(b, v, c);
    alg.bracket_with(x, y, &da, &db)
}

fn project<S: Scalar>(
    alg: &Algebra,
    acc: BTreeMap<MultiDegree, Element<S>>,
    mu: &MuData<S>,
    mode: Mode,
) -> Result<GradedElement<S>, ReesError> {
    let b = basis();
    let mut out = GradedElement::default();
    for (k, e) in acc {
        for (n, c) in alg.coordinates(&e) {
            let lab = b[n].alpha;
            let d = [0, 1, 2].map(|i| k.0[i] as i32 - lab.0[i] as i32);
            let factor = match mode {
                Mode::Free => {
                    if lab != k {
                        continue;
                    }
                    None
                }
                Mode::Bounce => {
                    if d[1] != 0 || d[2] != 0 {
                        continue;
                    }
                    if d[0] % 2 != 0 {
                        return Err(ReesError::Parity { at: k, found: lab });
                    }
                    mu.weight_factor(d, mode)?
                }
                Mode::E => mu.weight_factor(d, mode)?,
            };
            out.push(n, factor.map_or(c.clone(), |f| &c * &f));
        }
    }
    out.parts.retain(|_, v| {
        v.retain(|(_, c)| !c.is_zero());
        !v.is_empty()
    });
    Ok(out)
}

/// `[x, x]` in the chosen associated graded (or in `𝓔`).
pub fn mc_residual<S: Scalar>(alg: &Algebra, x: &SElement<S>, mu: &MuData<S>, mode: Mode) -> Result<GradedElement<S>, ReesError> {
    if x.degree() != Some(1) {
        return Err(ReesError::Degree(x.degree()));
    }
    // For degree-1 elements [X_a, X_b] = [X_b, X_a].
    let comps: Vec<_> = x.comps.iter().collect();
    let mut acc: BTreeMap<MultiDegree, Element<S>> = BTreeMap::new();
    for (p, (a, xa)) in comps.iter().enumerate() {
        for (b, yb) in comps.iter().skip(p) {
            let mut br = bracket_weighted(alg, **a, xa, **b, yb, mu);
            if a != b {
                br = br.scale_scalar(&S::from_i64(2));
            }
            let e = acc.entry(a.add(**b)).or_default();
            *e = e.add(&br);
        }
    }
    project(alg, acc, mu, mode)
}
