use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};


use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use specseq::{format_rational, parse_rational};

pub type Q = BigRational;

/// Coefficient field of jets: exact rationals or `f64`.
///
/// Transcendental functions are only available on the rational side when the
/// value is itself rational (`exp 0`, `log 1`, perfect powers, …).
pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const EXACT: bool;
    const NAME: &'static str;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_q(q: &Q) -> Self;
    fn from_i64(n: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn to_f64(&self) -> f64;
    /// Exact zero test for rationals, `|x| ≤ tol` for floats.
    fn is_negligible(&self, tol: f64) -> bool;
    fn exp(&self) -> Option<Self>;
    fn ln(&self) -> Option<Self>;
    fn tanh(&self) -> Option<Self>;
    fn cosh(&self) -> Option<Self>;
    fn sinh(&self) -> Option<Self>;
    fn pow_q(&self, r: &Q) -> Option<Self>;
    fn parse(s: &str) -> Option<Self>;
    fn render(&self) -> String;

    fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_i64(n) / Self::from_i64(d)
    }
    fn signum(&self) -> i32 {
        let v = self.to_f64();
        if self.is_zero() {
            0
        } else if v > 0.0 {
            1
        } else {
            -1
        }
    }
    fn is_positive(&self) -> bool {
        self.signum() > 0
    }
}

fn q_from_i64(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

fn exact_root(n: &BigInt, k: u32) -> Option<BigInt> {
    if n.is_negative() && k % 2 == 0 {
        return None;
    }
    let r = n.nth_root(k);
    (num::pow(r.clone(), k as usize) == *n).then_some(r)
}

impl Scalar for Q {
    const EXACT: bool = true;
    const NAME: &'static str = "rational";

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_q(q: &Q) -> Self {
        q.clone()
    }
    fn from_i64(n: i64) -> Self {
        q_from_i64(n)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_negligible(&self, _tol: f64) -> bool {
        Zero::is_zero(self)
    }
    fn exp(&self) -> Option<Self> {
        Zero::is_zero(self).then(One::one)
    }
    fn ln(&self) -> Option<Self> {
        One::is_one(self).then(Zero::zero)
    }
    fn tanh(&self) -> Option<Self> {
        Zero::is_zero(self).then(Zero::zero)
    }
    fn cosh(&self) -> Option<Self> {
        Zero::is_zero(self).then(One::one)
    }
    fn sinh(&self) -> Option<Self> {
        Zero::is_zero(self).then(Zero::zero)
    }
    fn pow_q(&self, r: &Q) -> Option<Self> {
        if r.is_integer() {
            let e = r.to_integer().to_i32()?;
            if e < 0 && Zero::is_zero(self) {
                return None;
            }
            return Some(num::pow::Pow::pow(self, e));
        }
        if One::is_one(self) {
            return Some(One::one());
        }
        // base^(p/q) exact only for perfect q-th powers
        let k = r.denom().to_u32()?;
        let num_root = exact_root(self.numer(), k)?;
        let den_root = exact_root(self.denom(), k)?;
        let root = Q::new(num_root, den_root);
        root.pow_q(&Q::from_integer(r.numer().clone()))
    }
    fn parse(s: &str) -> Option<Self> {
        parse_rational(s)
    }
    fn render(&self) -> String {
        format_rational(self)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const NAME: &'static str = "float";

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_q(q: &Q) -> Self {
        ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
    }
    fn from_i64(n: i64) -> Self {
        n as f64
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_negligible(&self, tol: f64) -> bool {
        self.abs() <= tol
    }
    fn exp(&self) -> Option<Self> {
        Some(f64::exp(*self))
    }
    fn ln(&self) -> Option<Self> {
        (*self > 0.0).then(|| f64::ln(*self))
    }
    fn tanh(&self) -> Option<Self> {
        Some(f64::tanh(*self))
    }
    fn cosh(&self) -> Option<Self> {
        Some(f64::cosh(*self))
    }
    fn sinh(&self) -> Option<Self> {
        Some(f64::sinh(*self))
    }
    fn pow_q(&self, r: &Q) -> Option<Self> {
        if r.is_integer() {
            return Some(self.powi(r.to_integer().to_i32()?));
        }
        (*self > 0.0).then(|| self.powf(Self::from_q(r)))
    }
    fn parse(s: &str) -> Option<Self> {
        s.trim().parse().ok().or_else(|| parse_rational(s).map(|q| Self::from_q(&q)))
    }
    fn render(&self) -> String {
        format!("{self:e}")
    }
}

/// `n!` as a rational.
pub fn factorial(n: usize) -> Q {
    let mut f = BigInt::one();
    for k in 2..=n {
        f *= k;
    }
    Q::from_integer(f)
}

/// Binomial coefficient `C(r, k)` for rational `r`.
pub fn binomial_q(r: &Q, k: usize) -> Q {
    let mut acc = <Q as One>::one();
    for i in 0..k {
        acc = acc * (r - q_from_i64(i as i64)) / q_from_i64(i as i64 + 1);
    }
    acc
}
