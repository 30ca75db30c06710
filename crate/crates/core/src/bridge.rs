//! The linearization `d = [x₀, −]` of a spatially homogeneous MC element of
//! `𝓐_free` as a finite filtered complex: coefficients constant in `x` and
//! polynomial in `t` of degree `≤ k`, homological degrees 0, 1, 2, filtered
//! by total s-degree.

use std::collections::BTreeMap;

use specseq::{ComplexError, FilteredComplex, Matrix};
use thiserror::Error;

use crate::algebra::{Algebra, Element};
use crate::filtration::basis;
use crate::jet::{origin, Jet};
use crate::mc::{ConstraintData, McError};
use crate::bounce::normal_g0;
use crate::rees::{bracket_s, mc_residual, MuData, Mode, ReesError, SElement};
use crate::scalar::Q;

#[derive(Debug, Error)]
pub enum BridgeError {
    #[error("x0 is not Maurer-Cartan: [x0, x0] has support {0:?}")]
    NotMc(Vec<String>),
    #[error("x0 is not spatially homogeneous with t-polynomial coefficients: {0}")]
    NotHomogeneous(String),
    #[error("assembled differential rejected: {0}")]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Rees(#[from] ReesError),
    #[error(transparent)]
    Mc(#[from] McError),
}

/// One basis vector `s^{α(n)} tᵐ b_n` of the truncated complex.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct BridgeVector {
    pub filtration: usize,
    pub basis: usize,
    pub t_power: usize,
}

#[derive(Debug)]
pub struct BridgeComplex {
    pub complex: FilteredComplex<Q>,
    pub vectors: Vec<BridgeVector>,
}

/// Homogeneous Kasner data: unit frame, `c = 0`, `g⁰ = ½(1, −1−u, −1−1/u)`,
/// `ξ = 0`, in the sufficient gauge with `μᵢ = t gᵢ⁰`.
pub fn kasner_x0(u: &Q, order: usize) -> Result<(SElement<Q>, MuData<Q>), McError> {
    let base = origin::<Q>();
    let uj = Jet::constant(u.clone(), &base, order);
    let g0 = normal_g0(&uj).map_err(McError::Jet)?;
    let unit = |i: usize, k: usize| if i == k { Jet::one(&base, order) } else { Jet::zero(&base, order) };
    let frame = [0, 1, 2].map(|i| [0, 1, 2].map(|k| unit(i, k)));
    let data = ConstraintData::from_frame(frame, g0, Jet::zero(&base, order))?;
    let p = data.sufficient_gauge();
    let mu = p.weights.mu_data().map_err(McError::Jet)?;
    Ok((p.assemble_with(&mu), mu))
}

/// The matrix of `[x₀, −]` on the sector described in the module docs.
pub fn mc_differential_complex(alg: &Algebra, x0: &SElement<Q>, mu: &MuData<Q>, k: usize) -> Result<BridgeComplex, BridgeError> {
    let res = mc_residual(alg, x0, mu, Mode::Free)?;
    let support = res.support(0.0);
    if !support.is_empty() {
        return Err(BridgeError::NotMc(support.iter().map(|a| a.to_string()).collect()));
    }
    for (a, e) in &x0.comps {
        for (_, _, c) in e.terms() {
            if (1..4).any(|v| c.depends_on(v)) {
                return Err(BridgeError::NotHomogeneous(format!("coefficient at {a} depends on x")));
            }
        }
    }

    let b = basis();
    let mut vectors: Vec<BridgeVector> = b
        .iter()
        .filter(|e| e.degree <= 2)
        .flat_map(|e| (0..=k).map(move |m| BridgeVector { filtration: e.alpha.total(), basis: e.index, t_power: m }))
        .collect();
    vectors.sort();
    let index: BTreeMap<(usize, usize), usize> = vectors.iter().enumerate().map(|(i, v)| ((v.basis, v.t_power), i)).collect();
    let n = vectors.len();
    let top = vectors.iter().map(|v| v.filtration).max().unwrap_or(0);
    let mut dims = vec![0; top + 1];
    for v in &vectors {
        dims[v.filtration] += 1;
    }

    let base = origin::<Q>();
    let order = k + 1;
    let mut d = Matrix::<Q>::zeros(n, n);
    for (col, v) in vectors.iter().enumerate() {
        let el = &b[v.basis];
        let mut e = [0u8; 4];
        e[0] = v.t_power as u8;
        let coeff = Jet::monomial(e, &base, order);
        let y = SElement::single(el.alpha, Element::from_pattern(&el.pattern, &coeff));
        let img = bracket_s(alg, x0, &y, mu, Mode::Free)?;
        for (m, c) in img.parts.values().flatten() {
            if b[*m].degree > 2 {
                continue;
            }
            for (ex, q) in c.terms() {
                if q == &Q::from_integer(0.into()) {
                    continue;
                }
                if ex[1..].iter().any(|&p| p > 0) || ex[0] as usize > k {
                    return Err(BridgeError::NotHomogeneous(format!("image of {v:?} has monomial {ex:?}")));
                }
                let row = index[&(*m, ex[0] as usize)];
                d[(row, col)] = &d[(row, col)] + q;
            }
        }
    }
    let hdeg = vectors.iter().map(|v| b[v.basis].degree as i64).collect();
    Ok(BridgeComplex { complex: FilteredComplex::from_total(dims, d, Some(hdeg))?, vectors })
}
