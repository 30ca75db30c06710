//! The 3-index grading `G_α𝓔` (the basis table plus θ₀-multiples) and the 1-, 2-
//! and 3-index BKL filtrations derived from it.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::algebra::{pattern, wedge_pattern, Algebra, Element, Gen, Pattern, Theta, CYCLIC};
use crate::jet::Jet;
use crate::scalar::{Scalar, Q};

/// `α = p₁p₂p₃`.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct MultiDegree(pub [u8; 3]);

impl MultiDegree {
    pub const ZERO: MultiDegree = MultiDegree([0, 0, 0]);

    /// The eleven multidegrees with nonzero graded pieces, in Table order.
    pub const TABLE: [MultiDegree; 11] = [
        MultiDegree([0, 0, 0]),
        MultiDegree([2, 0, 0]),
        MultiDegree([0, 2, 0]),
        MultiDegree([0, 0, 2]),
        MultiDegree([0, 1, 1]),
        MultiDegree([1, 0, 1]),
        MultiDegree([1, 1, 0]),
        MultiDegree([2, 1, 1]),
        MultiDegree([1, 2, 1]),
        MultiDegree([1, 1, 2]),
        MultiDegree([2, 2, 2]),
    ];

    pub fn new(p1: u8, p2: u8, p3: u8) -> Self {
        MultiDegree([p1, p2, p3])
    }

    /// `e_i` for `i = 1, 2, 3`.
    pub fn unit(i: usize) -> Self {
        let mut a = [0; 3];
        a[i - 1] = 1;
        MultiDegree(a)
    }

    pub fn p(&self, i: usize) -> u8 {
        self.0[i - 1]
    }

    pub fn add(self, o: MultiDegree) -> MultiDegree {
        MultiDegree([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }

    /// Component-wise `≤`.
    pub fn le(&self, o: &MultiDegree) -> bool {
        (0..3).all(|k| self.0[k] <= o.0[k])
    }

    pub fn max(self, o: MultiDegree) -> MultiDegree {
        MultiDegree([0, 1, 2].map(|k| self.0[k].max(o.0[k])))
    }

    pub fn total(&self) -> usize {
        self.0.iter().map(|&x| x as usize).sum()
    }

    pub fn is_table(&self) -> bool {
        Self::TABLE.contains(self)
    }

    pub fn as_i32(&self) -> [i32; 3] {
        self.0.map(|x| x as i32)
    }
}

impl fmt::Display for MultiDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.0[0], self.0[1], self.0[2])
    }
}

impl fmt::Debug for MultiDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for MultiDegree {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let d: Vec<u8> = s
            .trim()
            .chars()
            .filter(|c| !matches!(c, '(' | ')' | ',' | ' '))
            .map(|c| c.to_digit(10).map(|x| x as u8).ok_or_else(|| format!("bad multidegree {s:?}")))
            .collect::<Result<_, _>>()?;
        match d.as_slice() {
            [a, b, c] => Ok(MultiDegree([*a, *b, *c])),
            _ => Err(format!("bad multidegree {s:?}")),
        }
    }
}

// ---------------------------------------------------------------------------
// The basis table

fn derivations(ths: &[usize]) -> Vec<Pattern> {
    (0..4).map(|m| pattern(&[(1, ths, Gen::derivation(m))])).collect()
}

/// Spanning elements of `G_α𝓔_G`, verbatim from the table; empty for
/// multidegrees outside the table.
pub fn table_basis(alpha: MultiDegree) -> Vec<Pattern> {
    use Gen::*;
    let s = Gen::boost;
    let r = Gen::rotation;
    match alpha.0 {
        [0, 0, 0] => {
            let mut v = derivations(&[]);
            v.push(pattern(&[(1, &[], S0)]));
            for i in 1..=3 {
                v.push(pattern(&[(1, &[0], S0), (1, &[i], s(i))]));
            }
            v.push(pattern(&[
                (1, &[2, 3], S23),
                (1, &[3, 1], S31),
                (1, &[1, 2], S12),
                (2, &[0, 1], S1),
                (2, &[0, 2], S2),
                (2, &[0, 3], S3),
            ]));
            v
        }
        [2, 0, 0] => vec![pattern(&[(-1, &[1], S23), (1, &[2], S31), (1, &[3], S12)])],
        [0, 2, 0] => vec![pattern(&[(1, &[1], S23), (-1, &[2], S31), (1, &[3], S12)])],
        [0, 0, 2] => vec![pattern(&[(1, &[1], S23), (1, &[2], S31), (-1, &[3], S12)])],
        [0, 1, 1] | [1, 0, 1] | [1, 1, 0] => {
            let i = alpha.0.iter().position(|&p| p == 0).unwrap() + 1;
            let (_, j, k) = CYCLIC[i - 1];
            let mut v = vec![pattern(&[(1, &[], s(i))]), pattern(&[(1, &[], r(i))])];
            v.extend(derivations(&[i]));
            v.push(pattern(&[(1, &[0], s(i)), (1, &[i], S0)]));
            v.push(pattern(&[(1, &[j], s(k)), (1, &[k], s(j))]));
            v.push(pattern(&[(1, &[k], r(j))]));
            v.push(pattern(&[(1, &[j], r(k))]));
            v.push(pattern(&[(1, &[0, j], r(k)), (1, &[i, j], s(j))]));
            v
        }
        [2, 1, 1] | [1, 2, 1] | [1, 1, 2] => {
            let i = alpha.0.iter().position(|&p| p == 2).unwrap() + 1;
            let (_, j, k) = CYCLIC[i - 1];
            let mut v = vec![pattern(&[(1, &[j], s(k)), (-1, &[k], s(j))])];
            v.extend(derivations(&[j, k]));
            v.push(pattern(&[(1, &[0, j], s(k)), (-1, &[0, k], s(j)), (-2, &[j, k], S0)]));
            v.push(pattern(&[(1, &[0, j], s(k)), (1, &[0, k], s(j)), (-2, &[i, j], r(j))]));
            v
        }
        [2, 2, 2] => {
            let mut v = vec![pattern(&[
                (1, &[0, 1], S23),
                (1, &[0, 2], S31),
                (1, &[0, 3], S12),
                (-2, &[2, 3], S1),
                (-2, &[3, 1], S2),
                (-2, &[1, 2], S3),
            ])];
            v.extend(derivations(&[1, 2, 3]));
            v.push(pattern(&[(1, &[0, 2, 3], S1), (1, &[0, 3, 1], S2), (1, &[0, 1, 2], S3), (3, &[1, 2, 3], S0)]));
            v
        }
        _ => Vec::new(),
    }
}

/// One of the 144 basis elements of `𝓔`.
#[derive(Clone, Debug)]
pub struct BasisElement {
    pub index: usize,
    pub alpha: MultiDegree,
    pub pattern: Pattern,
    /// Homological degree (all Table elements are homogeneous).
    pub degree: usize,
    /// Whether this is `θ₀ ∧ (Table element)`.
    pub theta0: bool,
}

pub const BASIS_LEN: usize = 144;

/// Table elements (indices 0‥71, in Table order) followed by their
/// θ₀-multiples (72‥143, same order).
pub fn basis() -> &'static [BasisElement] {
    static B: OnceLock<Vec<BasisElement>> = OnceLock::new();
    B.get_or_init(|| {
        let mut out = Vec::new();
        for theta0 in [false, true] {
            for alpha in MultiDegree::TABLE {
                for p in table_basis(alpha) {
                    let p = if theta0 { wedge_pattern(Theta::single(0), &p) } else { p };
                    let degrees: Vec<usize> = p.keys().map(|(m, _)| m.degree()).collect();
                    assert!(degrees.windows(2).all(|w| w[0] == w[1]), "inhomogeneous Table element");
                    out.push(BasisElement { index: out.len(), alpha, degree: degrees[0], pattern: p, theta0 });
                }
            }
        }
        assert_eq!(out.len(), BASIS_LEN);
        out
    })
}

/// The basis element proportional to `p`: `p = λ·b_n`, returned as `(n, λ)`.
pub fn basis_match(p: &Pattern) -> Option<(usize, Q)> {
    let (key, c) = p.iter().next()?;
    basis().iter().find_map(|b| {
        let bc = b.pattern.get(key)?;
        let lam = c / bc;
        (b.pattern.len() == p.len() && b.pattern.iter().all(|(k, v)| p.get(k) == Some(&(v * &lam)))).then_some((b.index, lam))
    })
}

/// Ranks of `G_α𝓔_G` (without θ₀-multiples), in Table order.
pub fn table_ranks() -> Vec<(MultiDegree, usize)> {
    MultiDegree::TABLE.iter().map(|a| (*a, table_basis(*a).len())).collect()
}

// ---------------------------------------------------------------------------
// Graded elements

/// An element of `𝓔` split as `Σ_α (Σ_n c_n b_n)` over the basis, grouped by
/// the multidegree `α` of the basis elements.
#[derive(Clone, Debug)]
pub struct GradedElement<S: Scalar> {
    pub parts: BTreeMap<MultiDegree, Vec<(usize, Jet<S>)>>,
}

impl<S: Scalar> Default for GradedElement<S> {
    fn default() -> Self {
        GradedElement { parts: BTreeMap::new() }
    }
}

impl<S: Scalar> GradedElement<S> {
    pub fn from_coordinates(coords: Vec<(usize, Jet<S>)>) -> Self {
        let mut g = GradedElement::default();
        for (n, c) in coords {
            g.push(n, c);
        }
        g
    }

    /// Adds `c · b_n` to the part of `b_n`'s multidegree.
    pub fn push(&mut self, n: usize, c: Jet<S>) {
        let alpha = basis()[n].alpha;
        let part = self.parts.entry(alpha).or_default();
        match part.iter_mut().find(|(m, _)| *m == n) {
            Some((_, x)) => *x = &*x + &c,
            None => part.push((n, c)),
        }
    }

    pub fn component(&self, alpha: MultiDegree) -> Element<S> {
        let mut e = Element::zero();
        for (n, c) in self.parts.get(&alpha).into_iter().flatten() {
            e = e.add(&Element::from_pattern(&basis()[*n].pattern, c));
        }
        e
    }

    pub fn components(&self) -> BTreeMap<MultiDegree, Element<S>> {
        self.parts.keys().map(|a| (*a, self.component(*a))).collect()
    }

    pub fn reassemble(&self) -> Element<S> {
        self.parts.keys().fold(Element::zero(), |acc, a| acc.add(&self.component(*a)))
    }

    /// Multidegrees carrying a coefficient above `tol`.
    pub fn support(&self, tol: f64) -> Vec<MultiDegree> {
        self.parts.iter().filter(|(_, v)| v.iter().any(|(_, c)| !c.is_negligible(tol))).map(|(a, _)| *a).collect()
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.support(tol).is_empty()
    }

    /// Largest coefficient magnitude per multidegree.
    pub fn norms(&self) -> BTreeMap<MultiDegree, f64> {
        self.parts.iter().map(|(a, v)| (*a, v.iter().map(|(_, c)| c.max_abs()).fold(0.0, f64::max))).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.norms().values().cloned().fold(0.0, f64::max)
    }

    pub fn coefficient(&self, n: usize) -> Option<&Jet<S>> {
        self.parts.get(&basis()[n].alpha)?.iter().find(|(m, _)| *m == n).map(|(_, c)| c)
    }
}

/// Splits `e` along `𝓔 = ⊕_α G_α𝓔`.
pub fn decompose_graded<S: Scalar>(alg: &Algebra, e: &Element<S>) -> GradedElement<S> {
    GradedElement::from_coordinates(alg.coordinates(e))
}

// ---------------------------------------------------------------------------
// Filtration degrees

#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Variant {
    One,
    Two,
    Three,
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FiltrationDegree {
    One(u8),
    Two([u8; 2]),
    Three([u8; 3]),
}

/// The smallest filtration index containing `e`; `None` for `e = 0`.
///
/// Since `F_α𝓔 = ⊕_{β≤α} G_β𝓔`, this is the component-wise maximum of the
/// graded support; the 1-index filtration only sees `p₁` and the 2-index one
/// only `(p₂, p₃)`.
pub fn filtration_degree<S: Scalar>(alg: &Algebra, e: &Element<S>, variant: Variant, tol: f64) -> Option<FiltrationDegree> {
    let support = decompose_graded(alg, e).support(tol);
    let max = support.into_iter().reduce(MultiDegree::max)?;
    Some(match variant {
        Variant::One => FiltrationDegree::One(max.0[0]),
        Variant::Two => FiltrationDegree::Two([max.0[1], max.0[2]]),
        Variant::Three => FiltrationDegree::Three(max.0),
    })
}

/// The 1-index filtration for the splitting `W₀ = ⟨θ₀, θ_a⟩`, `W₁ = ⟨θ_b, θ_c⟩`
/// with `(a, b, c)` cyclic, read off the operator image: the smallest `p` of
/// the right `Z₂`-parity such that the image raises the `W₁`-degree of `∧W`
/// by at most `p`. `index` is `a`; `index = 1` is the filtration of
/// [`filtration_degree`] with [`Variant::One`].
pub fn representation_degree<S: Scalar>(alg: &Algebra, e: &Element<S>, index: usize, tol: f64) -> Option<u8> {
    let (_, b, c) = CYCLIC[index - 1];
    let w1 = |m: Theta| m.contains(b) as i32 + m.contains(c) as i32;
    let parity = z2_parity(alg, e, index)?;
    let rep = alg.anchor_rep(e);
    let shift = rep.support(tol).into_iter().map(|(src, dst)| w1(dst) - w1(src)).max().unwrap_or(0).max(0);
    let p = if shift % 2 == parity as i32 { shift } else { shift + 1 };
    Some(p as u8)
}

/// Parity of `e` for the `Z₂`-grading induced by `W₁ = ⟨θ_b, θ_c⟩`; `None`
/// if `e` mixes parities.
pub fn z2_parity<S: Scalar>(alg: &Algebra, e: &Element<S>, index: usize) -> Option<u8> {
    let (_, b, c) = CYCLIC[index - 1];
    let odd_index = |x: usize| x == b || x == c;
    let gen_parity = |g: Gen| -> u8 {
        if !g.is_sigma() {
            return 0;
        }
        let m = alg.sigma_matrix(g);
        let mixes = (0..4).any(|x| (0..4).any(|y| m[x][y] != 0 && odd_index(x) != odd_index(y)));
        mixes as u8
    };
    let mut parity = None;
    for (m, g, _) in e.terms() {
        let p = ((m.indices().into_iter().filter(|&x| odd_index(x)).count() as u8) + gen_parity(g)) % 2;
        match parity {
            None => parity = Some(p),
            Some(q) if q != p => return None,
            _ => {}
        }
    }
    parity
}

// ---------------------------------------------------------------------------
// Associated graded brackets

#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum GradedVariant {
    Free,
    Bounce,
}

/// Bracket in `𝓐_free` or `𝓐_bounce`: the bracket in `𝓔` of every pair of
/// parts, projected onto the multidegree `α + β` (all three indices for
/// `Free`, only `(p₂, p₃)` for `Bounce`).
pub fn graded_bracket<S: Scalar>(
    alg: &Algebra,
    variant: GradedVariant,
    a: &GradedElement<S>,
    b: &GradedElement<S>,
) -> GradedElement<S> {
    let mut out = GradedElement::default();
    for alpha in a.parts.keys() {
        let x = a.component(*alpha);
        for beta in b.parts.keys() {
            let y = b.component(*beta);
            let target = alpha.add(*beta);
            for (n, c) in alg.coordinates(&alg.bracket(&x, &y)) {
                let lab = basis()[n].alpha;
                let keep = match variant {
                    GradedVariant::Free => lab == target,
                    GradedVariant::Bounce => lab.0[1..] == target.0[1..],
                };
                if keep {
                    out.push(n, c);
                }
            }
        }
    }
    out.parts.retain(|_, v| {
        v.retain(|(_, c)| !c.is_zero());
        !v.is_empty()
    });
    out
}
