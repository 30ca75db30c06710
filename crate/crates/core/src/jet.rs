//! Truncated Taylor series in the four variables `(t, x¹, x², x³)`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

use crate::scalar::{binomial_q, factorial, Scalar, Q};

pub const NVARS: usize = 4;
pub type Exponent = [u8; NVARS];

/// Axis names: `t = 0`, `x¹ = 1`, `x² = 2`, `x³ = 3`.
pub const AXIS_NAMES: [&str; NVARS] = ["t", "x1", "x2", "x3"];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JetError {
    #[error("jet base points differ")]
    BaseMismatch,
    #[error("cannot differentiate an order-0 jet")]
    OrderZero,
    #[error("{function} undefined at constant term {value}")]
    Domain { function: &'static str, value: String },
    #[error("{function} of constant term {value} is not representable over {field}")]
    NotRepresentable { function: &'static str, value: String, field: &'static str },
    #[error("bad jet literal: {0}")]
    Parse(String),
}

/// Monomials ordered by total degree, then lexicographically; a jet of order
/// `N` stores exactly the first `count(N)` of them, so truncation is a prefix.
struct Monomials {
    exps: Vec<Exponent>,
    index: HashMap<Exponent, usize>,
    /// `start[d]` = index of the first monomial of degree `d`.
    start: Vec<usize>,
}

const MAX_ORDER: usize = 24;

fn monomials() -> &'static Monomials {
    static M: OnceLock<Monomials> = OnceLock::new();
    M.get_or_init(|| {
        let mut exps = Vec::new();
        let mut start = Vec::new();
        for d in 0..=MAX_ORDER as u8 + 1 {
            start.push(exps.len());
            for a in (0..=d).rev() {
                for b in (0..=d - a).rev() {
                    for c in (0..=d - a - b).rev() {
                        exps.push([a, b, c, d - a - b - c]);
                    }
                }
            }
        }
        start.push(exps.len());
        let index = exps.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        Monomials { exps, index, start }
    })
}

/// Number of monomials of total degree ≤ n.
pub fn monomial_count(n: usize) -> usize {
    monomials().start[n + 1]
}

pub fn exponent(k: usize) -> Exponent {
    monomials().exps[k]
}

pub fn degree(e: &Exponent) -> usize {
    e.iter().map(|&x| x as usize).sum()
}

pub fn monomial_index(e: &Exponent) -> usize {
    monomials().index[e]
}

type ProductTable = Arc<Vec<(u32, u32, u32)>>;

fn product_table(n: usize) -> ProductTable {
    static CACHE: OnceLock<Mutex<HashMap<usize, ProductTable>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().unwrap().get(&n) {
        return t.clone();
    }
    let m = monomials();
    let mut table = Vec::new();
    for i in 0..monomial_count(n) {
        let ei = m.exps[i];
        for j in 0..monomial_count(n - degree(&ei)) {
            let ej = m.exps[j];
            let ek = [ei[0] + ej[0], ei[1] + ej[1], ei[2] + ej[2], ei[3] + ej[3]];
            table.push((i as u32, j as u32, m.index[&ek] as u32));
        }
    }
    let table = Arc::new(table);
    cache.lock().unwrap().insert(n, table.clone());
    table
}

/// A truncated power series `Σ c_e (t−t₀)^{e₀} (x¹−x¹₀)^{e₁} …` of total degree ≤ `order`.
#[derive(Clone)]
pub struct Jet<S> {
    base: Arc<[S; NVARS]>,
    order: usize,
    coeffs: Vec<S>,
}

pub type Base<S> = Arc<[S; NVARS]>;

pub fn base_point<S: Scalar>(b: [S; NVARS]) -> Base<S> {
    Arc::new(b)
}

pub fn origin<S: Scalar>() -> Base<S> {
    Arc::new([S::zero(), S::zero(), S::zero(), S::zero()])
}

impl<S: Scalar> Jet<S> {
    pub fn constant(c: S, base: &Base<S>, order: usize) -> Self {
        assert!(order <= MAX_ORDER, "jet order {order} exceeds {MAX_ORDER}");
        let mut coeffs = vec![S::zero(); monomial_count(order)];
        coeffs[0] = c;
        Jet { base: base.clone(), order, coeffs }
    }

    pub fn zero(base: &Base<S>, order: usize) -> Self {
        Self::constant(S::zero(), base, order)
    }

    pub fn one(base: &Base<S>, order: usize) -> Self {
        Self::constant(S::one(), base, order)
    }

    /// The coordinate function of `axis`, whose value at the base point is the base coordinate.
    pub fn variable(axis: usize, base: &Base<S>, order: usize) -> Self {
        let mut j = Self::constant(base[axis].clone(), base, order);
        if order >= 1 {
            let mut e = [0; NVARS];
            e[axis] = 1;
            j.coeffs[monomial_index(&e)] = S::one();
        }
        j
    }

    /// The monomial `(x − x₀)^e` itself.
    pub fn monomial(e: Exponent, base: &Base<S>, order: usize) -> Self {
        let mut j = Self::zero(base, order);
        if degree(&e) <= order {
            j.coeffs[monomial_index(&e)] = S::one();
        }
        j
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Exponent, S)>, base: &Base<S>, order: usize) -> Self {
        let mut j = Self::zero(base, order);
        for (e, c) in terms {
            if degree(&e) <= order {
                let k = monomial_index(&e);
                j.coeffs[k] = j.coeffs[k].clone() + c;
            }
        }
        j
    }

    pub fn base(&self) -> &Base<S> {
        &self.base
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn coeff(&self, e: &Exponent) -> S {
        if degree(e) > self.order {
            return S::zero();
        }
        self.coeffs[monomial_index(e)].clone()
    }

    pub fn set_coeff(&mut self, e: &Exponent, c: S) {
        assert!(degree(e) <= self.order, "coefficient beyond jet order");
        self.coeffs[monomial_index(e)] = c;
    }

    /// Value at the base point.
    pub fn value(&self) -> &S {
        &self.coeffs[0]
    }

    pub fn terms(&self) -> impl Iterator<Item = (Exponent, &S)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(k, c)| (exponent(k), c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(S::is_zero)
    }

    pub fn is_negligible(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|c| c.is_negligible(tol))
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.to_f64().abs()).fold(0.0, f64::max)
    }

    pub fn same_base(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.base, &other.base) || *self.base == *other.base
    }

    /// Does the jet depend on `axis` (up to its order)?
    pub fn depends_on(&self, axis: usize) -> bool {
        self.terms().any(|(e, _)| e[axis] > 0)
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        Jet { base: self.base.clone(), order, coeffs: self.coeffs[..monomial_count(order)].to_vec() }
    }

    /// Replaces the stored base point by an equal one, sharing the allocation.
    pub fn rebase(&self, base: &Base<S>) -> Self {
        assert!(*self.base == **base, "rebase to a different point");
        Jet { base: base.clone(), order: self.order, coeffs: self.coeffs.clone() }
    }

    fn zip(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Result<Self, JetError> {
        if !self.same_base(other) {
            return Err(JetError::BaseMismatch);
        }
        let order = self.order.min(other.order);
        let n = monomial_count(order);
        let coeffs = (0..n).map(|k| f(&self.coeffs[k], &other.coeffs[k])).collect();
        Ok(Jet { base: self.base.clone(), order, coeffs })
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, JetError> {
        self.zip(other, |a, b| a.clone() + b.clone())
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, JetError> {
        self.zip(other, |a, b| a.clone() - b.clone())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, JetError> {
        if !self.same_base(other) {
            return Err(JetError::BaseMismatch);
        }
        let order = self.order.min(other.order);
        let mut coeffs = vec![S::zero(); monomial_count(order)];
        let a_zero: Vec<bool> = self.coeffs.iter().map(S::is_zero).collect();
        for &(i, j, k) in product_table(order).iter() {
            let (i, j, k) = (i as usize, j as usize, k as usize);
            if a_zero[i] || other.coeffs[j].is_zero() {
                continue;
            }
            coeffs[k] = coeffs[k].clone() + self.coeffs[i].clone() * other.coeffs[j].clone();
        }
        Ok(Jet { base: self.base.clone(), order, coeffs })
    }

    pub fn scale(&self, s: &S) -> Self {
        Jet { base: self.base.clone(), order: self.order, coeffs: self.coeffs.iter().map(|c| c.clone() * s.clone()).collect() }
    }

    pub fn scale_q(&self, q: &Q) -> Self {
        self.scale(&S::from_q(q))
    }

    pub fn add_scalar(&self, s: &S) -> Self {
        let mut j = self.clone();
        j.coeffs[0] = j.coeffs[0].clone() + s.clone();
        j
    }

    /// Exact formal partial derivative; the order drops by one.
    pub fn checked_derive(&self, axis: usize) -> Result<Self, JetError> {
        if self.order == 0 {
            return Err(JetError::OrderZero);
        }
        let order = self.order - 1;
        let mut coeffs = vec![S::zero(); monomial_count(order)];
        for (k, c) in coeffs.iter_mut().enumerate() {
            let mut e = exponent(k);
            e[axis] += 1;
            let src = &self.coeffs[monomial_index(&e)];
            if !src.is_zero() {
                *c = src.clone() * S::from_i64(e[axis] as i64);
            }
        }
        Ok(Jet { base: self.base.clone(), order, coeffs })
    }

    /// Panicking variant of [`Jet::checked_derive`].
    pub fn derive(&self, axis: usize) -> Self {
        self.checked_derive(axis).expect("derivative of an order-0 jet")
    }

    /// The antiderivative in `axis` vanishing on `{x_axis = x_axis₀}`; the order rises by one.
    pub fn integrate(&self, axis: usize) -> Self {
        let order = self.order + 1;
        let mut coeffs = vec![S::zero(); monomial_count(order)];
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut e = exponent(k);
            e[axis] += 1;
            coeffs[monomial_index(&e)] = c.clone() / S::from_i64(e[axis] as i64);
        }
        Jet { base: self.base.clone(), order, coeffs }
    }

    /// Restriction to the hyperplane `x_axis = x_axis₀`.
    pub fn restrict(&self, axis: usize) -> Self {
        let mut j = self.clone();
        for (k, c) in j.coeffs.iter_mut().enumerate() {
            if exponent(k)[axis] > 0 {
                *c = S::zero();
            }
        }
        j
    }

    /// Powers `h, h², …, h^n` of a jet.
    fn powers(&self, n: usize) -> Vec<Self> {
        let mut out = vec![Jet::one(&self.base, self.order)];
        for _ in 0..n {
            let next = out.last().unwrap() * self;
            out.push(next);
        }
        out
    }

    /// Composition `self ∘ map`, where `map[v]` is a jet at another point whose
    /// value equals `self`'s base coordinate `v`.
    pub fn compose(&self, map: &[Jet<S>; NVARS]) -> Result<Self, JetError> {
        let tgt = &map[0].base;
        for (v, m) in map.iter().enumerate() {
            if !m.same_base(&map[0]) || *m.value() != self.base[v] {
                return Err(JetError::BaseMismatch);
            }
        }
        let order = map.iter().map(Jet::order).min().unwrap().min(self.order);
        let shifts: Vec<Vec<Jet<S>>> = map
            .iter()
            .map(|m| {
                let mut h = m.truncate(order);
                h.coeffs[0] = S::zero();
                h.powers(order)
            })
            .collect();
        let mut out = Jet::zero(tgt, order);
        for (e, c) in self.terms() {
            if degree(&e) > order {
                continue;
            }
            let mut term = Jet::constant(c.clone(), tgt, order);
            for v in 0..NVARS {
                if e[v] > 0 {
                    term = &term * &shifts[v][e[v] as usize];
                }
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// Treats the jet as a polynomial and re-expands it about `new_base` (exact).
    pub fn recenter(&self, new_base: &Base<S>) -> Self {
        // x − old = (x − new) + (new − old)
        let shifted: Vec<Vec<Jet<S>>> = (0..NVARS)
            .map(|v| {
                let mut h = Jet::variable(v, new_base, self.order);
                h.coeffs[0] = new_base[v].clone() - self.base[v].clone();
                h.powers(self.order)
            })
            .collect();
        let mut out = Jet::zero(new_base, self.order);
        for (e, c) in self.terms() {
            let mut term = Jet::constant(c.clone(), new_base, self.order);
            for v in 0..NVARS {
                if e[v] > 0 {
                    term = &term * &shifted[v][e[v] as usize];
                }
            }
            out = &out + &term;
        }
        out
    }

    /// Evaluates the polynomial at `point` (absolute coordinates).
    pub fn eval(&self, point: &[S; NVARS]) -> S {
        let d: Vec<S> = (0..NVARS).map(|v| point[v].clone() - self.base[v].clone()).collect();
        let mut acc = S::zero();
        for (e, c) in self.terms() {
            let mut m = c.clone();
            for v in 0..NVARS {
                for _ in 0..e[v] {
                    m = m * d[v].clone();
                }
            }
            acc = acc + m;
        }
        acc
    }

    /// `Σ coeffs[k] h^k` with `h` the nonconstant part of `self`.
    fn series(&self, coeffs: Vec<S>) -> Self {
        let mut h = self.clone();
        h.coeffs[0] = S::zero();
        let n = coeffs.len() - 1;
        let mut acc = Jet::constant(coeffs[n].clone(), &self.base, self.order);
        for k in (0..n).rev() {
            acc = (&acc * &h).add_scalar(&coeffs[k]);
        }
        acc
    }

    fn unrepresentable(&self, function: &'static str) -> JetError {
        JetError::NotRepresentable { function, value: format!("{:?}", self.value()), field: S::NAME }
    }

    pub fn exp(&self) -> Result<Self, JetError> {
        let e0 = self.value().exp().ok_or_else(|| self.unrepresentable("exp"))?;
        let c = (0..=self.order).map(|k| e0.clone() / S::from_q(&factorial(k))).collect();
        Ok(self.series(c))
    }

    pub fn ln(&self) -> Result<Self, JetError> {
        let c0 = self.value().clone();
        if !c0.is_positive() {
            return Err(JetError::Domain { function: "log", value: format!("{c0:?}") });
        }
        let l0 = c0.ln().ok_or_else(|| self.unrepresentable("log"))?;
        let mut c = vec![l0];
        let mut p = S::one();
        for k in 1..=self.order {
            p = p * c0.clone();
            let sign = if k % 2 == 1 { S::one() } else { -S::one() };
            c.push(sign / (S::from_i64(k as i64) * p.clone()));
        }
        Ok(self.series(c))
    }

    pub fn pow_q(&self, r: &Q) -> Result<Self, JetError> {
        let c0 = self.value().clone();
        if c0.is_zero() || (!r.is_integer() && !c0.is_positive()) {
            return Err(JetError::Domain { function: "pow", value: format!("{c0:?}") });
        }
        let p0 = c0.pow_q(r).ok_or_else(|| self.unrepresentable("pow"))?;
        let mut c = Vec::with_capacity(self.order + 1);
        let mut inv = S::one();
        for k in 0..=self.order {
            c.push(p0.clone() * S::from_q(&binomial_q(r, k)) * inv.clone());
            inv = inv / c0.clone();
        }
        Ok(self.series(c))
    }

    pub fn pow_i(&self, n: i64) -> Result<Self, JetError> {
        if n >= 0 {
            let mut acc = Jet::one(&self.base, self.order);
            for _ in 0..n {
                acc = &acc * self;
            }
            return Ok(acc);
        }
        self.pow_q(&Q::from_integer(n.into()))
    }

    pub fn recip(&self) -> Result<Self, JetError> {
        self.pow_i(-1)
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, JetError> {
        self.checked_mul(&other.recip()?)
    }

    fn tanh_coeffs(&self) -> Result<Vec<S>, JetError> {
        let t0 = self.value().tanh().ok_or_else(|| self.unrepresentable("tanh"))?;
        let mut t = vec![t0];
        for k in 0..self.order {
            let mut s = if k == 0 { S::one() } else { S::zero() };
            for i in 0..=k {
                s = s - t[i].clone() * t[k - i].clone();
            }
            t.push(s / S::from_i64(k as i64 + 1));
        }
        Ok(t)
    }

    pub fn tanh(&self) -> Result<Self, JetError> {
        Ok(self.series(self.tanh_coeffs()?))
    }

    pub fn sech(&self) -> Result<Self, JetError> {
        let t = self.tanh_coeffs()?;
        let c0 = self.value().cosh().ok_or_else(|| self.unrepresentable("sech"))?;
        let mut s = vec![S::one() / c0];
        for k in 0..self.order {
            let mut acc = S::zero();
            for i in 0..=k {
                acc = acc + s[i].clone() * t[k - i].clone();
            }
            s.push(-acc / S::from_i64(k as i64 + 1));
        }
        Ok(self.series(s))
    }

    fn cosh_sinh(&self) -> Result<(Vec<S>, Vec<S>), JetError> {
        let c0 = self.value().cosh().ok_or_else(|| self.unrepresentable("cosh"))?;
        let s0 = self.value().sinh().ok_or_else(|| self.unrepresentable("sinh"))?;
        let (mut c, mut s) = (vec![c0], vec![s0]);
        for k in 0..self.order {
            let d = S::from_i64(k as i64 + 1);
            let (ck, sk) = (c[k].clone(), s[k].clone());
            c.push(sk / d.clone());
            s.push(ck / d);
        }
        Ok((c, s))
    }

    pub fn cosh(&self) -> Result<Self, JetError> {
        Ok(self.series(self.cosh_sinh()?.0))
    }

    pub fn sinh(&self) -> Result<Self, JetError> {
        Ok(self.series(self.cosh_sinh()?.1))
    }

    /// Applies one of the named elementary functions.
    pub fn apply(&self, f: &Elementary) -> Result<Self, JetError> {
        match f {
            Elementary::Exp => self.exp(),
            Elementary::Log => self.ln(),
            Elementary::Tanh => self.tanh(),
            Elementary::Sech => self.sech(),
            Elementary::Cosh => self.cosh(),
            Elementary::Sinh => self.sinh(),
            Elementary::Pow(r) => self.pow_q(r),
        }
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Jet<T> {
        let base: [T; NVARS] = std::array::from_fn(|v| f(&self.base[v]));
        Jet { base: Arc::new(base), order: self.order, coeffs: self.coeffs.iter().map(f).collect() }
    }
}

impl Jet<Q> {
    pub fn to_f64(&self) -> Jet<f64> {
        self.map_scalar(|q| q.to_f64())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Elementary {
    Exp,
    Log,
    Tanh,
    Sech,
    Cosh,
    Sinh,
    Pow(Q),
}

macro_rules! jet_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl<S: Scalar> std::ops::$trait<&Jet<S>> for &Jet<S> {
            type Output = Jet<S>;
            /// Panics if the base points differ; see the `checked_` variant.
            fn $method(self, rhs: &Jet<S>) -> Jet<S> {
                self.$checked(rhs).expect("jet base points differ")
            }
        }
        impl<S: Scalar> std::ops::$trait<Jet<S>> for Jet<S> {
            type Output = Jet<S>;
            fn $method(self, rhs: Jet<S>) -> Jet<S> {
                (&self).$checked(&rhs).expect("jet base points differ")
            }
        }
    };
}
jet_binop!(Add, add, checked_add);
jet_binop!(Sub, sub, checked_sub);
jet_binop!(Mul, mul, checked_mul);

impl<S: Scalar> std::ops::Neg for &Jet<S> {
    type Output = Jet<S>;
    fn neg(self) -> Jet<S> {
        Jet { base: self.base.clone(), order: self.order, coeffs: self.coeffs.iter().map(|c| -c.clone()).collect() }
    }
}

impl<S: Scalar> std::ops::Neg for Jet<S> {
    type Output = Jet<S>;
    fn neg(self) -> Jet<S> {
        -&self
    }
}

impl<S: Scalar> PartialEq for Jet<S> {
    /// Equality up to the smaller order: jets are germs known to finite precision.
    fn eq(&self, other: &Self) -> bool {
        let n = monomial_count(self.order.min(other.order));
        self.same_base(other) && self.coeffs[..n] == other.coeffs[..n]
    }
}

impl<S: Scalar> fmt::Debug for Jet<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Jet[o{}](", self.order)?;
        let mut first = true;
        for (e, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", c.render())?;
            for (v, &p) in e.iter().enumerate() {
                match p {
                    0 => {}
                    1 => write!(f, "·{}", AXIS_NAMES[v])?,
                    _ => write!(f, "·{}^{}", AXIS_NAMES[v], p)?,
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, ")")
    }
}

/// Serialized form: base point, order and the nonzero coefficients keyed by
/// `"(i,j,k,l)"`, with scalars rendered as strings (`"3/4"` or decimal floats).
#[derive(serde::Serialize, serde::Deserialize)]
struct JetRepr {
    base: [String; NVARS],
    order: usize,
    coeffs: std::collections::BTreeMap<String, String>,
}

fn exponent_key(e: &Exponent) -> String {
    format!("({},{},{},{})", e[0], e[1], e[2], e[3])
}

fn parse_exponent_key(k: &str) -> Option<Exponent> {
    let inner = k.trim().strip_prefix('(')?.strip_suffix(')')?;
    let parts: Vec<u8> = inner.split(',').map(|x| x.trim().parse().ok()).collect::<Option<_>>()?;
    parts.try_into().ok()
}

impl<S: Scalar> serde::Serialize for Jet<S> {
    fn serialize<Ser: serde::Serializer>(&self, s: Ser) -> Result<Ser::Ok, Ser::Error> {
        JetRepr {
            base: [0, 1, 2, 3].map(|v| self.base[v].render()),
            order: self.order,
            coeffs: self.terms().map(|(e, c)| (exponent_key(&e), c.render())).collect(),
        }
        .serialize(s)
    }
}

impl<'de, S: Scalar> serde::Deserialize<'de> for Jet<S> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let r = JetRepr::deserialize(d)?;
        let parse = |x: &str| S::parse(x).ok_or_else(|| D::Error::custom(format!("bad {} scalar {x:?}", S::NAME)));
        if r.order > MAX_ORDER {
            return Err(D::Error::custom(format!("jet order {} exceeds {MAX_ORDER}", r.order)));
        }
        let b = [parse(&r.base[0])?, parse(&r.base[1])?, parse(&r.base[2])?, parse(&r.base[3])?];
        let base = base_point(b);
        let mut terms = Vec::new();
        for (k, c) in &r.coeffs {
            let e = &parse_exponent_key(k).ok_or_else(|| D::Error::custom(format!("bad exponent key {k:?}")))?;
            if degree(e) > r.order {
                return Err(D::Error::custom(format!("term {e:?} exceeds jet order {}", r.order)));
            }
            terms.push((*e, parse(c)?));
        }
        Ok(Jet::from_terms(terms, &base, r.order))
    }
}
