//! Selection of the σ sign convention: a convention is kept iff the Table
//! basis is a basis of `𝓔` modulo the ideal, the bracket of any two basis
//! elements respects the 3-index filtration, and the homogeneous bounce
//! element is Maurer-Cartan in `𝓐_bounce`.

use serde::Serialize;

use crate::algebra::{Algebra, Element, SignConvention};
use crate::filtration::{basis, MultiDegree};
use crate::jet::{origin, Jet};
use crate::scalar::Q;

/// A bracket `[b_i, b_j]` with a component outside `F_{α_i+α_j}`.
#[derive(Clone, Debug, Serialize)]
pub struct ClosureViolation {
    pub left: usize,
    pub right: usize,
    pub component: usize,
    pub bound: MultiDegree,
    pub found: MultiDegree,
}

/// Exhaustive check of `[G_α, G_β] ⊂ F_{α+β}` on all 144² basis pairs.
/// Stops after `limit` violations.
pub fn closure_violations(alg: &Algebra, limit: usize) -> Vec<ClosureViolation> {
    let b = basis();
    let base = origin::<Q>();
    let elems: Vec<Element<Q>> = b.iter().map(|x| Element::from_pattern(&x.pattern, &Jet::one(&base, 1))).collect();
    let mut out = Vec::new();
    for i in 0..b.len() {
        for j in 0..b.len() {
            let bound = b[i].alpha.add(b[j].alpha);
            for (n, _) in alg.coordinates(&alg.bracket(&elems[i], &elems[j])) {
                if !b[n].alpha.le(&bound) {
                    out.push(ClosureViolation { left: i, right: j, component: n, bound, found: b[n].alpha });
                    if out.len() >= limit {
                        return out;
                    }
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct ConventionReport {
    pub convention: SignConvention,
    pub label: String,
    /// `None` if the Table basis fails to be a basis modulo the ideal.
    pub basis_error: Option<String>,
    pub closure_violations: usize,
    /// Largest residual coefficient of the homogeneous `u = 3` bounce.
    pub bounce_residual: Option<String>,
    pub passes: bool,
}

/// Runs the screen over all admissible conventions. The bounce screen is
/// only evaluated for conventions that pass closure.
pub fn calibrate() -> Vec<ConventionReport> {
    SignConvention::symmetric().into_iter().map(screen).collect()
}

pub fn screen(conv: SignConvention) -> ConventionReport {
    let mut rep = ConventionReport {
        convention: conv,
        label: conv.label(),
        basis_error: None,
        closure_violations: 0,
        bounce_residual: None,
        passes: false,
    };
    let alg = match Algebra::new(conv) {
        Ok(a) => a,
        Err(e) => {
            rep.basis_error = Some(e.to_string());
            return rep;
        }
    };
    rep.closure_violations = closure_violations(&alg, usize::MAX).len();
    if rep.closure_violations == 0 {
        match crate::bounce::homogeneous_bounce_residual(&alg, &Q::from_integer(3.into())) {
            Ok(r) => {
                rep.passes = r.is_zero(0.0);
                rep.bounce_residual = Some(if rep.passes { "0".into() } else { format!("{:?}", r.norms()) });
            }
            Err(e) => rep.bounce_residual = Some(e.to_string()),
        }
    }
    rep
}

/// The unique passing convention, or the full report if there is not
/// exactly one.
pub fn winner(reports: &[ConventionReport]) -> Result<SignConvention, Vec<ConventionReport>> {
    let pass: Vec<_> = reports.iter().filter(|r| r.passes).collect();
    match pass.as_slice() {
        [one] => Ok(one.convention),
        _ => Err(reports.to_vec()),
    }
}
