//! The graded Lie algebra `𝓛 = ∧W ⊗ CDerEnd(W)` with jet coefficients, its
//! representation on `∧W ⊕ ∧W⊗Ω`, and the quotient `𝓔 = 𝓛/𝓘`.
//!
//! Elements of `𝓛` are sums `f · θ_m · g` where `θ_m` is a θ-monomial and `g`
//! one of the eleven generators: the seven `σ`'s spanning `co(1,3)` and the
//! coordinate derivations. Equality in `𝓔` is decided by an exact change of
//! basis onto (Table basis) ⊕ (ideal), see [`Algebra::coordinates`].

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use num::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use specseq::Matrix;
use thiserror::Error;

use crate::filtration::{self, MultiDegree};
use crate::jet::{Jet, NVARS};
use crate::scalar::{Scalar, Q};

// ---------------------------------------------------------------------------
// θ-monomials

/// A monomial `θ_{a₁}∧…∧θ_{a_p}` with `a₁ < … < a_p`, stored as a bit mask.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Theta(u8);

impl Theta {
    pub const ONE: Theta = Theta(0);
    pub const OMEGA: Theta = Theta(0b1111);

    pub fn from_mask(mask: u8) -> Self {
        assert!(mask < 16, "θ-mask {mask} out of range");
        Theta(mask)
    }

    pub fn single(i: usize) -> Self {
        Theta(1 << i)
    }

    /// The product `θ_{i₁}∧θ_{i₂}∧…` of the indices in the given order, as a
    /// sign times a canonical monomial; `None` if an index repeats.
    pub fn product(indices: &[usize]) -> Option<(i64, Theta)> {
        let mut acc = (1, Theta::ONE);
        for &i in indices {
            let (s, m) = theta_wedge(acc.1, Theta::single(i))?;
            acc = (acc.0 * s, m);
        }
        Some(acc)
    }

    pub fn mask(self) -> u8 {
        self.0
    }

    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn indices(self) -> Vec<usize> {
        (0..4).filter(|&i| self.contains(i)).collect()
    }

    /// All sixteen monomials, ordered by degree and then lexicographically.
    pub fn all() -> Vec<Theta> {
        let mut v: Vec<Theta> = (0..16).map(Theta).collect();
        v.sort_by_key(|t| (t.degree(), t.indices()));
        v
    }

    pub fn of_degree(p: usize) -> Vec<Theta> {
        Theta::all().into_iter().filter(|t| t.degree() == p).collect()
    }
}

impl fmt::Debug for Theta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return write!(f, "1");
        }
        for i in self.indices() {
            write!(f, "θ{i}")?;
        }
        Ok(())
    }
}

/// `a ∧ b` with the permutation sign, or `None` when they overlap.
pub fn theta_wedge(a: Theta, b: Theta) -> Option<(i64, Theta)> {
    if a.0 & b.0 != 0 {
        return None;
    }
    // Each pair (x ∈ a, y ∈ b) with x > y is one transposition.
    let mut swaps = 0;
    for x in a.indices() {
        swaps += b.indices().iter().filter(|&&y| y < x).count();
    }
    let sign = if swaps % 2 == 0 { 1 } else { -1 };
    Some((sign, Theta(a.0 | b.0)))
}

// ---------------------------------------------------------------------------
// Generators

#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum Gen {
    S0,
    S1,
    S2,
    S3,
    S23,
    S31,
    S12,
    D0,
    D1,
    D2,
    D3,
}

impl Gen {
    pub const ALL: [Gen; 11] = [
        Gen::S0,
        Gen::S1,
        Gen::S2,
        Gen::S3,
        Gen::S23,
        Gen::S31,
        Gen::S12,
        Gen::D0,
        Gen::D1,
        Gen::D2,
        Gen::D3,
    ];
    pub const NAMES: [&'static str; 11] = ["s0", "s1", "s2", "s3", "s23", "s31", "s12", "d0", "d1", "d2", "d3"];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Gen {
        Gen::ALL[i]
    }

    pub fn name(self) -> &'static str {
        Gen::NAMES[self.index()]
    }

    pub fn parse(s: &str) -> Option<Gen> {
        Gen::NAMES.iter().position(|n| *n == s).map(Gen::from_index)
    }

    pub fn is_sigma(self) -> bool {
        self.index() < 7
    }

    /// The coordinate axis of a derivation generator.
    pub fn axis(self) -> Option<usize> {
        (!self.is_sigma()).then(|| self.index() - 7)
    }

    pub fn derivation(axis: usize) -> Gen {
        Gen::from_index(7 + axis)
    }

    /// The boost `σ_i`, `i = 1, 2, 3`.
    pub fn boost(i: usize) -> Gen {
        assert!((1..=3).contains(&i));
        Gen::from_index(i)
    }

    /// The rotation `σ_jk` labelled by the cyclic complement `i`
    /// (`1 ↦ σ₂₃`, `2 ↦ σ₃₁`, `3 ↦ σ₁₂`).
    pub fn rotation(i: usize) -> Gen {
        assert!((1..=3).contains(&i));
        Gen::from_index(3 + i)
    }

    /// `σ_ab` for distinct spatial `a, b` as a sign times a rotation
    /// generator, so `σ_ba = −σ_ab`.
    pub fn sigma_pair(a: usize, b: usize) -> (i64, Gen) {
        for (i, (j, k)) in [(1, (2, 3)), (2, (3, 1)), (3, (1, 2))] {
            if (a, b) == (j, k) {
                return (1, Gen::rotation(i));
            }
            if (a, b) == (k, j) {
                return (-1, Gen::rotation(i));
            }
        }
        panic!("σ_{a}{b} is not a rotation")
    }
}

pub const CYCLIC: [(usize, usize, usize); 3] = [(1, 2, 3), (2, 3, 1), (3, 1, 2)];

// ---------------------------------------------------------------------------
// Sign conventions

/// Signs of the `σ`-actions on `W`:
/// `σᵢθ₀ = εᵢθᵢ`, `σᵢθᵢ = ε′ᵢθ₀`, `σⱼₖθⱼ = ηᵢθₖ`, `σⱼₖθₖ = −ηᵢθⱼ`.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct SignConvention {
    pub eps: [i8; 3],
    pub eps_prime: [i8; 3],
    pub eta: [i8; 3],
}

impl SignConvention {
    /// The convention selected by [`crate::calibration`].
    pub const CALIBRATED: SignConvention = SignConvention { eps: [1, 1, 1], eps_prime: [1, 1, 1], eta: [-1, -1, -1] };

    /// The 64 conventions with `ε′ = ε`, i.e. with symmetric boost matrices.
    pub fn symmetric() -> Vec<SignConvention> {
        let signs = |n: usize| -> [i8; 3] { [0, 1, 2].map(|b| if n >> b & 1 == 0 { 1 } else { -1 }) };
        let mut out = Vec::new();
        for e in 0..8 {
            for h in 0..8 {
                out.push(SignConvention { eps: signs(e), eps_prime: signs(e), eta: signs(h) });
            }
        }
        out
    }

    /// Checks that boosts are symmetric and rotations antisymmetric as matrices.
    pub fn is_admissible(&self) -> bool {
        self.eps == self.eps_prime
    }

    /// `M_g[a][b]` = coefficient of `θ_a` in `σ_g(θ_b)`.
    pub fn matrices(&self) -> [[[i64; 4]; 4]; 7] {
        let mut m = [[[0i64; 4]; 4]; 7];
        for (a, row) in m[0].iter_mut().enumerate() {
            row[a] = 1;
        }
        for i in 1..=3 {
            m[i][i][0] = self.eps[i - 1] as i64;
            m[i][0][i] = self.eps_prime[i - 1] as i64;
        }
        for (i, j, k) in CYCLIC {
            let g = Gen::rotation(i).index();
            m[g][k][j] = self.eta[i - 1] as i64;
            m[g][j][k] = -(self.eta[i - 1] as i64);
        }
        m
    }

    pub fn label(&self) -> String {
        let s = |v: &[i8; 3]| v.iter().map(|&x| if x > 0 { '+' } else { '-' }).collect::<String>();
        format!("eps={} eps'={} eta={}", s(&self.eps), s(&self.eps_prime), s(&self.eta))
    }
}

// ---------------------------------------------------------------------------
// Elements

/// Constant-coefficient linear combination of `θ_m ⊗ g`.
pub type Pattern = BTreeMap<(Theta, Gen), Q>;

/// Builds a pattern from `(coefficient, θ-indices in any order, generator)`.
pub fn pattern(terms: &[(i64, &[usize], Gen)]) -> Pattern {
    let mut p = Pattern::new();
    for (c, ths, g) in terms {
        if let Some((s, m)) = Theta::product(ths) {
            let e = p.entry((m, *g)).or_insert_with(<Q as Zero>::zero);
            *e += Q::from_integer((c * s).into());
        }
    }
    p.retain(|_, v| !Zero::is_zero(v));
    p
}

/// `θ_m ∧ p`.
pub fn wedge_pattern(m: Theta, p: &Pattern) -> Pattern {
    let mut out = Pattern::new();
    for ((mm, g), c) in p {
        if let Some((s, r)) = theta_wedge(m, *mm) {
            *out.entry((r, *g)).or_insert_with(<Q as Zero>::zero) += c * Q::from_integer(s.into());
        }
    }
    out.retain(|_, v| !Zero::is_zero(v));
    out
}

/// A finite sum of `f · θ_m · g` with jet coefficients, kept merged and free
/// of exactly-zero coefficients.
#[derive(Clone, PartialEq)]
pub struct Element<S: Scalar> {
    terms: BTreeMap<(Theta, Gen), Jet<S>>,
}

impl<S: Scalar> Default for Element<S> {
    fn default() -> Self {
        Element { terms: BTreeMap::new() }
    }
}

impl<S: Scalar> Element<S> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(theta: Theta, gen: Gen, coeff: Jet<S>) -> Self {
        let mut e = Self::zero();
        e.add_term(theta, gen, coeff);
        e
    }

    pub fn from_pattern(p: &Pattern, coeff: &Jet<S>) -> Self {
        let mut e = Self::zero();
        for ((m, g), c) in p {
            e.add_term(*m, *g, coeff.scale(&S::from_q(c)));
        }
        e
    }

    pub fn add_term(&mut self, theta: Theta, gen: Gen, coeff: Jet<S>) {
        use std::collections::btree_map::Entry;
        match self.terms.entry((theta, gen)) {
            Entry::Vacant(v) => {
                if !coeff.is_zero() {
                    v.insert(coeff);
                }
            }
            Entry::Occupied(mut o) => {
                let sum = &*o.get() + &coeff;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (Theta, Gen, &Jet<S>)> {
        self.terms.iter().map(|((m, g), c)| (*m, *g, c))
    }

    pub fn coeff(&self, theta: Theta, gen: Gen) -> Option<&Jet<S>> {
        self.terms.get(&(theta, gen))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// Structurally zero (no terms). Use [`Algebra::is_zero_in_e`] for 𝓔.
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Homological degree if all terms share one.
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(|(m, _)| m.degree());
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn homological_components(&self) -> BTreeMap<usize, Element<S>> {
        let mut out: BTreeMap<usize, Element<S>> = BTreeMap::new();
        for ((m, g), c) in &self.terms {
            out.entry(m.degree()).or_default().terms.insert((*m, *g), c.clone());
        }
        out
    }

    /// Minimal order among the coefficients.
    pub fn order(&self) -> Option<usize> {
        self.terms.values().map(|c| c.order()).min()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((m, g), c) in &other.terms {
            out.add_term(*m, *g, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map(|c| -c)
    }

    pub fn scale(&self, f: &Jet<S>) -> Self {
        let mut out = Self::zero();
        for ((m, g), c) in &self.terms {
            out.add_term(*m, *g, c * f);
        }
        out
    }

    pub fn scale_scalar(&self, s: &S) -> Self {
        let mut out = Self::zero();
        for ((m, g), c) in &self.terms {
            out.add_term(*m, *g, c.scale(s));
        }
        out
    }

    /// Left `∧W`-module multiplication `θ_m ∧ e`.
    pub fn wedge(&self, m: Theta) -> Self {
        let mut out = Self::zero();
        for ((mm, g), c) in &self.terms {
            if let Some((s, r)) = theta_wedge(m, *mm) {
                out.add_term(r, *g, c.scale(&S::from_i64(s)));
            }
        }
        out
    }

    pub fn map(&self, mut f: impl FnMut(&Jet<S>) -> Jet<S>) -> Self {
        let mut out = Self::zero();
        for ((m, g), c) in &self.terms {
            out.add_term(*m, *g, f(c));
        }
        out
    }

    pub fn try_map<E>(&self, mut f: impl FnMut(&Jet<S>) -> Result<Jet<S>, E>) -> Result<Self, E> {
        let mut out = Self::zero();
        for ((m, g), c) in &self.terms {
            out.add_term(*m, *g, f(c)?);
        }
        Ok(out)
    }

    pub fn map_terms(&self, mut f: impl FnMut(Theta, Gen, &Jet<S>) -> Element<S>) -> Self {
        let mut out = Self::zero();
        for ((m, g), c) in &self.terms {
            out = out.add(&f(*m, *g, c));
        }
        out
    }

    pub fn truncate(&self, order: usize) -> Self {
        self.map(|c| c.truncate(order))
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.max_abs()).fold(0.0, f64::max)
    }

    /// Keeps only terms whose generator passes the filter.
    pub fn filter(&self, mut keep: impl FnMut(Theta, Gen) -> bool) -> Self {
        Element { terms: self.terms.iter().filter(|((m, g), _)| keep(*m, *g)).map(|(k, c)| (*k, c.clone())).collect() }
    }
}

impl Element<Q> {
    pub fn to_f64(&self) -> Element<f64> {
        let mut out = Element::zero();
        for ((m, g), c) in &self.terms {
            out.add_term(*m, *g, c.to_f64());
        }
        out
    }
}

/// JSON literal: `[{"coeff": Jet, "theta": [indices], "gen": "d0"}, …]`;
/// θ indices may be given in any order (the reordering sign is applied).
#[derive(Serialize, Deserialize)]
struct TermRepr<J> {
    coeff: J,
    theta: Vec<usize>,
    gen: String,
}

impl<S: Scalar> Serialize for Element<S> {
    fn serialize<Ser: serde::Serializer>(&self, s: Ser) -> Result<Ser::Ok, Ser::Error> {
        let v: Vec<TermRepr<&Jet<S>>> = self.terms().map(|(m, g, c)| TermRepr { coeff: c, theta: m.indices(), gen: g.name().into() }).collect();
        v.serialize(s)
    }
}

impl<'de, S: Scalar> Deserialize<'de> for Element<S> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let v: Vec<TermRepr<Jet<S>>> = Vec::deserialize(d)?;
        let mut e = Element::zero();
        for t in v {
            if t.theta.iter().any(|&i| i > 3) {
                return Err(D::Error::custom(format!("theta index out of range in {:?}", t.theta)));
            }
            let g = Gen::parse(&t.gen).ok_or_else(|| D::Error::custom(format!("unknown generator {:?}", t.gen)))?;
            if let Some((sign, m)) = Theta::product(&t.theta) {
                e.add_term(m, g, t.coeff.scale(&S::from_i64(sign)));
            }
        }
        Ok(e)
    }
}

impl<S: Scalar> fmt::Debug for Element<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((m, g), c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c:?})·{m:?}{}", g.name())?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Representation on ∧W ⊕ ∧W⊗Ω

/// Image of an element under `𝓛 → End(∧W) ⊕ End(∧W⊗Ω)`.
///
/// Both summands are first-order operators on `∧W ⊗ C∞` (the Ω summand is
/// identified with `∧W` through `ω ↦ ω⊗Ω`). The zeroth-order parts are
/// stored as matrices `(source monomial, target monomial) ↦ jet`; the
/// first-order part `ω'h ↦ (ω∧ω') X(h)` is shared and stored as `ω ↦ X`.
#[derive(Clone, Debug)]
pub struct OperatorRep<S: Scalar> {
    pub degree: Option<usize>,
    pub matrix: [BTreeMap<(Theta, Theta), Jet<S>>; 2],
    pub derivation: BTreeMap<Theta, [Option<Jet<S>>; NVARS]>,
}

impl<S: Scalar> OperatorRep<S> {
    pub fn is_zero(&self, tol: f64) -> bool {
        self.matrix.iter().all(|m| m.values().all(|c| c.is_negligible(tol)))
            && self.derivation.values().all(|x| x.iter().flatten().all(|c| c.is_negligible(tol)))
    }

    /// Applies summand `k` (0: `∧W`, 1: `∧W⊗Ω`) to `Σ h_ω ω`.
    pub fn apply(&self, k: usize, v: &BTreeMap<Theta, Jet<S>>) -> BTreeMap<Theta, Jet<S>> {
        let mut out: BTreeMap<Theta, Jet<S>> = BTreeMap::new();
        let mut push = |m: Theta, c: Jet<S>| match out.get_mut(&m) {
            Some(x) => *x = &*x + &c,
            None => {
                out.insert(m, c);
            }
        };
        for ((src, dst), c) in &self.matrix[k] {
            if let Some(h) = v.get(src) {
                push(*dst, c * h);
            }
        }
        for (w, x) in &self.derivation {
            for (src, h) in v {
                if let Some((s, r)) = theta_wedge(*w, *src) {
                    for (axis, xc) in x.iter().enumerate() {
                        if let Some(xc) = xc {
                            push(r, (xc * &h.derive(axis)).scale(&S::from_i64(s)));
                        }
                    }
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    /// Entries as `(source, target)` pairs with nonzero coefficient,
    /// including first-order parts (source = any monomial disjoint from ω).
    pub fn support(&self, tol: f64) -> Vec<(Theta, Theta)> {
        let mut out = Vec::new();
        for m in &self.matrix {
            out.extend(m.iter().filter(|(_, c)| !c.is_negligible(tol)).map(|(k, _)| *k));
        }
        for (w, x) in &self.derivation {
            if x.iter().flatten().any(|c| !c.is_negligible(tol)) {
                for src in Theta::all() {
                    if let Some((_, r)) = theta_wedge(*w, src) {
                        out.push((src, r));
                    }
                }
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// The algebra context

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("Table element {index} (multidegree {alpha}) is dependent modulo the ideal in θ-degree {degree}")]
    TableDependent { index: usize, alpha: MultiDegree, degree: usize },
    #[error("Table basis and ideal span {rank} of {dim} dimensions in θ-degree {degree}")]
    Incomplete { degree: usize, rank: usize, dim: usize },
    #[error("ideal part has dimension {got}, expected {expected}")]
    IdealDimension { got: usize, expected: usize },
}

/// Structure constants and the exact quotient for one sign convention.
pub struct Algebra {
    conv: SignConvention,
    sigma: [[[i64; 4]; 4]; 7],
    /// `action[g][mask]` = `σ_g(θ_mask)` as `(monomial, coefficient)`.
    action: Vec<Vec<Vec<(Theta, i64)>>>,
    /// `comm[g][h]` = `[σ_g, σ_h]` in the σ basis.
    comm: Vec<Vec<Vec<(Gen, Q)>>>,
    ideal: Vec<Pattern>,
    /// Rows of the inverse change of basis: coordinate `n` of the
    /// Table basis as a sparse functional on `(θ, gen)` columns.
    inverse: Vec<Vec<(usize, Q)>>,
    /// Same as `inverse`, for the 32 ideal coordinates.
    ideal_inverse: Vec<Vec<(usize, Q)>>,
}

/// Column index of `θ_m ⊗ g` in the 176-dimensional coefficient space.
pub fn column(m: Theta, g: Gen) -> usize {
    m.mask() as usize * 11 + g.index()
}

pub fn column_key(c: usize) -> (Theta, Gen) {
    (Theta(c as u8 / 11), Gen::from_index(c % 11))
}

pub const L_RANK: usize = 176;

impl Algebra {
    pub fn new(conv: SignConvention) -> Result<Algebra, AlgebraError> {
        let sigma = conv.matrices();
        let mut action = vec![vec![Vec::new(); 16]; 7];
        for g in 0..7 {
            for mask in 0..16u8 {
                action[g][mask as usize] = sigma_on_monomial(&sigma[g], Theta(mask));
            }
        }
        let mut comm = vec![vec![Vec::new(); 7]; 7];
        for g in 0..7 {
            for h in 0..7 {
                comm[g][h] = decompose_sigma(&sigma, &commutator(&sigma[g], &sigma[h]));
            }
        }
        let mut alg = Algebra { conv, sigma, action, comm, ideal: Vec::new(), inverse: Vec::new(), ideal_inverse: Vec::new() };
        alg.ideal = alg.ideal_generators()?;
        alg.build_inverse()?;
        Ok(alg)
    }

    /// Shared instance for the calibrated convention.
    pub fn calibrated() -> &'static Algebra {
        static ALG: OnceLock<Algebra> = OnceLock::new();
        ALG.get_or_init(|| Algebra::new(SignConvention::CALIBRATED).expect("calibrated convention is consistent"))
    }

    pub fn convention(&self) -> SignConvention {
        self.conv
    }

    pub fn sigma_matrix(&self, g: Gen) -> [[i64; 4]; 4] {
        self.sigma[g.index()]
    }

    pub fn sigma_on(&self, g: Gen, m: Theta) -> &[(Theta, i64)] {
        &self.action[g.index()][m.mask() as usize]
    }

    /// `[g, h]` of generators in `CDerEnd(W)`; derivations commute with
    /// everything (coordinate basis, constant σ matrices).
    pub fn generator_bracket(&self, g: Gen, h: Gen) -> &[(Gen, Q)] {
        if g.is_sigma() && h.is_sigma() {
            &self.comm[g.index()][h.index()]
        } else {
            &[]
        }
    }

    /// Constant generators of the ideal (θ-degrees 2, 3, 4); they span a
    /// rank-32 space.
    pub fn ideal(&self) -> &[Pattern] {
        &self.ideal
    }

    /// Action of a generator on `h·θ_m`; `der(axis, h)` computes the
    /// derivative of a coefficient.
    fn act<S: Scalar>(&self, g: Gen, h: &Jet<S>, m: Theta, der: &dyn Fn(usize, &Jet<S>) -> Jet<S>) -> Vec<(Jet<S>, Theta)> {
        match g.axis() {
            Some(axis) => vec![(der(axis, h), m)],
            None => self.sigma_on(g, m).iter().map(|(mm, c)| (h.scale(&S::from_i64(*c)), *mm)).collect(),
        }
    }

    /// `[a, b]` in `𝓛`.
    pub fn bracket<S: Scalar>(&self, a: &Element<S>, b: &Element<S>) -> Element<S> {
        let d = |axis: usize, h: &Jet<S>| h.derive(axis);
        self.bracket_with(a, b, &d, &d)
    }

    /// `[a, b]` where derivations of `b` act on coefficients of `a` through
    /// `der_a`, and derivations of `a` on coefficients of `b` through `der_b`.
    /// Used with twisted derivatives for reduced coefficients.
    pub fn bracket_with<S: Scalar>(
        &self,
        a: &Element<S>,
        b: &Element<S>,
        der_a: &dyn Fn(usize, &Jet<S>) -> Jet<S>,
        der_b: &dyn Fn(usize, &Jet<S>) -> Jet<S>,
    ) -> Element<S> {
        let mut out = Element::zero();
        for (m1, g1, f) in a.terms() {
            for (m2, g2, h) in b.terms() {
                let (p, q) = (m1.degree(), m2.degree());
                for (c, mm) in self.act(g1, h, m2, der_b) {
                    if let Some((s, r)) = theta_wedge(m1, mm) {
                        out.add_term(r, g2, (f * &c).scale(&S::from_i64(s)));
                    }
                }
                let koszul = if (p * q) % 2 == 0 { -1 } else { 1 };
                for (c, mm) in self.act(g2, f, m1, der_a) {
                    if let Some((s, r)) = theta_wedge(m2, mm) {
                        out.add_term(r, g1, (h * &c).scale(&S::from_i64(koszul * s)));
                    }
                }
                if let Some((s, r)) = theta_wedge(m1, m2) {
                    let gb = self.generator_bracket(g1, g2);
                    if !gb.is_empty() {
                        let fh = (f * h).scale(&S::from_i64(s));
                        for (g, c) in gb {
                            out.add_term(r, *g, fh.scale(&S::from_q(c)));
                        }
                    }
                }
            }
        }
        out
    }

    /// The representation on `∧W ⊕ ∧W⊗Ω`; σ's act on `Ω` by their trace.
    pub fn anchor_rep<S: Scalar>(&self, e: &Element<S>) -> OperatorRep<S> {
        let mut rep = OperatorRep { degree: e.degree(), matrix: [BTreeMap::new(), BTreeMap::new()], derivation: BTreeMap::new() };
        let push = |k: usize, key: (Theta, Theta), c: Jet<S>, rep: &mut OperatorRep<S>| {
            let entry = rep.matrix[k].entry(key);
            use std::collections::btree_map::Entry;
            match entry {
                Entry::Vacant(v) => {
                    v.insert(c);
                }
                Entry::Occupied(mut o) => {
                    let s = &*o.get() + &c;
                    *o.get_mut() = s;
                }
            }
        };
        for (w, g, f) in e.terms() {
            match g.axis() {
                Some(axis) => {
                    let slot = rep.derivation.entry(w).or_insert_with(|| [None, None, None, None]);
                    slot[axis] = Some(match slot[axis].take() {
                        Some(x) => &x + f,
                        None => f.clone(),
                    });
                }
                None => {
                    let trace: i64 = (0..4).map(|a| self.sigma[g.index()][a][a]).sum();
                    for src in Theta::all() {
                        for (mm, c) in self.sigma_on(g, src) {
                            if let Some((s, r)) = theta_wedge(w, *mm) {
                                let v = f.scale(&S::from_i64(s * c));
                                push(0, (src, r), v.clone(), &mut rep);
                                push(1, (src, r), v, &mut rep);
                            }
                        }
                        if trace != 0 {
                            if let Some((s, r)) = theta_wedge(w, src) {
                                push(1, (src, r), f.scale(&S::from_i64(s * trace)), &mut rep);
                            }
                        }
                    }
                }
            }
        }
        for m in rep.matrix.iter_mut() {
            m.retain(|_, c| !c.is_zero());
        }
        rep
    }

    // -- the quotient ------------------------------------------------------

    /// Degree-2 part of the ideal: `θθ ⊗ so(1,3)` annihilated by both the
    /// action on `W` and the contraction `Σ_e ι_e(·) σ(θ_e)`.
    fn ideal_generators(&self) -> Result<Vec<Pattern>, AlgebraError> {
        let deg2 = Theta::of_degree(2);
        let cols: Vec<(Theta, Gen)> = deg2.iter().flat_map(|m| (1..7).map(move |g| (*m, Gen::from_index(g)))).collect();
        let mut rows: BTreeMap<(u8, usize, Theta), BTreeMap<usize, i64>> = BTreeMap::new();
        for (ci, (m, g)) in cols.iter().enumerate() {
            for e in 0..4 {
                for (mm, c) in self.sigma_on(*g, Theta::single(e)) {
                    if let Some((s, r)) = theta_wedge(*m, *mm) {
                        *rows.entry((0, e, r)).or_default().entry(ci).or_default() += s * c;
                    }
                }
                let idx = m.indices();
                for (pos, other, sgn) in [(idx[0], idx[1], 1), (idx[1], idx[0], -1)] {
                    if pos == e {
                        for (mm, c) in self.sigma_on(*g, Theta::single(e)) {
                            *rows.entry((1, other, *mm)).or_default().entry(ci).or_default() += sgn * c;
                        }
                    }
                }
            }
        }
        let keys: Vec<_> = rows.keys().cloned().collect();
        let mat = Matrix::<Q>::from_fn(keys.len(), cols.len(), |i, j| {
            Q::from_integer((*rows[&keys[i]].get(&j).unwrap_or(&0)).into())
        });
        let ker = mat.kernel();
        let mut i2 = Vec::new();
        for k in 0..ker.cols() {
            let mut p = Pattern::new();
            for (j, key) in cols.iter().enumerate() {
                let v = ker[(j, k)].clone();
                if !Zero::is_zero(&v) {
                    p.insert(*key, v);
                }
            }
            i2.push(p);
        }
        if i2.len() != 10 {
            return Err(AlgebraError::IdealDimension { got: i2.len(), expected: 10 });
        }
        let mut all = i2.clone();
        for m in Theta::all().into_iter().filter(|m| (1..=2).contains(&m.degree())) {
            for x in &i2 {
                let y = wedge_pattern(m, x);
                if !y.is_empty() {
                    all.push(y);
                }
            }
        }
        Ok(all)
    }

    /// Exact inverse of the change of basis, one θ-degree block at a time.
    fn build_inverse(&mut self) -> Result<(), AlgebraError> {
        let basis = filtration::basis();
        let mut inverse = vec![Vec::new(); basis.len()];
        let mut ideal_inverse = Vec::new();
        let mut ideal_total = 0;
        for d in 0..=4 {
            let block_cols: Vec<usize> =
                Theta::of_degree(d).into_iter().flat_map(|m| Gen::ALL.map(move |g| column(m, g))).collect();
            let local: BTreeMap<usize, usize> = block_cols.iter().enumerate().map(|(i, c)| (*c, i)).collect();
            let dim = block_cols.len();
            let table: Vec<usize> = (0..basis.len()).filter(|&n| basis[n].degree == d).collect();
            let ideal: Vec<&Pattern> =
                self.ideal.iter().filter(|p| p.keys().next().map(|(m, _)| m.degree()) == Some(d)).collect();
            let vec_of = |p: &Pattern| {
                let mut v = vec![<Q as Zero>::zero(); dim];
                for ((m, g), c) in p {
                    v[local[&column(*m, *g)]] = c.clone();
                }
                v
            };
            let mut columns: Vec<Vec<Q>> = table.iter().map(|&n| vec_of(&basis[n].pattern)).collect();
            columns.extend(ideal.iter().map(|p| vec_of(p)));
            let mat = Matrix::from_columns(&columns, dim);
            let (_, pivots) = mat.rref();
            for (pos, &n) in table.iter().enumerate() {
                if !pivots.contains(&pos) {
                    return Err(AlgebraError::TableDependent { index: n, alpha: basis[n].alpha, degree: d });
                }
            }
            if pivots.len() != dim {
                return Err(AlgebraError::Incomplete { degree: d, rank: pivots.len(), dim });
            }
            ideal_total += pivots.len() - table.len();
            let square = mat.select_columns(&pivots);
            let inv = square.inverse().expect("pivot columns are independent");
            let sparse_row = |r: usize| -> Vec<(usize, Q)> {
                (0..dim).filter(|&c| !Zero::is_zero(&inv[(r, c)])).map(|c| (block_cols[c], inv[(r, c)].clone())).collect()
            };
            for (pos, &n) in table.iter().enumerate() {
                inverse[n] = sparse_row(pos);
            }
            for r in table.len()..dim {
                ideal_inverse.push(sparse_row(r));
            }
        }
        if ideal_total != 32 {
            return Err(AlgebraError::IdealDimension { got: ideal_total, expected: 32 });
        }
        self.inverse = inverse;
        self.ideal_inverse = ideal_inverse;
        Ok(())
    }

    /// Coordinates of `e` in the 144-element Table basis of `𝓔`
    /// (the ideal part is discarded). Only nonzero coordinates are listed.
    pub fn coordinates<S: Scalar>(&self, e: &Element<S>) -> Vec<(usize, Jet<S>)> {
        let mut cols: BTreeMap<usize, &Jet<S>> = BTreeMap::new();
        for (m, g, c) in e.terms() {
            cols.insert(column(m, g), c);
        }
        if cols.is_empty() {
            return Vec::new();
        }
        let mut out = Vec::new();
        for (n, row) in self.inverse.iter().enumerate() {
            let mut acc: Option<Jet<S>> = None;
            for (c, q) in row {
                if let Some(j) = cols.get(c) {
                    let t = j.scale(&S::from_q(q));
                    acc = Some(match acc {
                        Some(a) => a + t,
                        None => t,
                    });
                }
            }
            if let Some(a) = acc {
                if !a.is_zero() {
                    out.push((n, a));
                }
            }
        }
        out
    }

    /// Coordinates along the ideal generators (for diagnostics).
    pub fn ideal_coordinates<S: Scalar>(&self, e: &Element<S>) -> Vec<(usize, Jet<S>)> {
        let mut out = Vec::new();
        for (n, row) in self.ideal_inverse.iter().enumerate() {
            let mut acc: Option<Jet<S>> = None;
            for (c, q) in row {
                let (m, g) = column_key(*c);
                if let Some(j) = e.coeff(m, g) {
                    let t = j.scale(&S::from_q(q));
                    acc = Some(match acc {
                        Some(a) => a + t,
                        None => t,
                    });
                }
            }
            if let Some(a) = acc.filter(|a| !a.is_zero()) {
                out.push((n, a));
            }
        }
        out
    }

    /// `e = 0` in `𝓔`: all Table coordinates vanish (to `tol` for floats).
    pub fn is_zero_in_e<S: Scalar>(&self, e: &Element<S>, tol: f64) -> bool {
        self.coordinates(e).iter().all(|(_, c)| c.is_negligible(tol))
    }

    /// Canonical representative: `Σ coordinates · basis`.
    pub fn normal_form<S: Scalar>(&self, e: &Element<S>) -> Element<S> {
        let basis = filtration::basis();
        let mut out = Element::zero();
        for (n, c) in self.coordinates(e) {
            out = out.add(&Element::from_pattern(&basis[n].pattern, &c));
        }
        out
    }
}

/// `σ(θ_m)` for `σ` acting as a derivation of `∧W`.
fn sigma_on_monomial(m: &[[i64; 4]; 4], theta: Theta) -> Vec<(Theta, i64)> {
    let idx = theta.indices();
    let mut out: BTreeMap<Theta, i64> = BTreeMap::new();
    for pos in 0..idx.len() {
        for (a, row) in m.iter().enumerate() {
            let c = row[idx[pos]];
            if c == 0 {
                continue;
            }
            let mut l = idx.clone();
            l[pos] = a;
            if let Some((s, r)) = Theta::product(&l) {
                *out.entry(r).or_default() += s * c;
            }
        }
    }
    out.into_iter().filter(|(_, c)| *c != 0).collect()
}

fn commutator(a: &[[i64; 4]; 4], b: &[[i64; 4]; 4]) -> [[i64; 4]; 4] {
    let mut c = [[0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            c[i][j] = (0..4).map(|k| a[i][k] * b[k][j] - b[i][k] * a[k][j]).sum();
        }
    }
    c
}

/// Writes a matrix in `co(1,3)` in the σ basis (panics if it is not in the span).
fn decompose_sigma(sigma: &[[[i64; 4]; 4]; 7], c: &[[i64; 4]; 4]) -> Vec<(Gen, Q)> {
    let mut out = Vec::new();
    let trace: i64 = (0..4).map(|a| c[a][a]).sum();
    if trace != 0 {
        out.push((Gen::S0, Q::new(trace.into(), 4.into())));
    }
    for i in 1..=3 {
        let v = Q::new(c[i][0].into(), sigma[i][i][0].into());
        if !Zero::is_zero(&v) {
            out.push((Gen::boost(i), v));
        }
    }
    for (i, j, k) in CYCLIC {
        let g = Gen::rotation(i).index();
        let v = Q::new(c[k][j].into(), sigma[g][k][j].into());
        if !Zero::is_zero(&v) {
            out.push((Gen::from_index(g), v));
        }
    }
    for a in 0..4 {
        for b in 0..4 {
            let r: Q = out.iter().map(|(g, v)| v * Q::from_integer(sigma[g.index()][a][b].into())).sum();
            assert_eq!(r, Q::from_integer(c[a][b].into()), "commutator outside co(1,3)");
        }
    }
    out
}

/// Rational coefficient as `f64`, used in reports.
pub fn q_to_f64(q: &Q) -> f64 {
    ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
}
