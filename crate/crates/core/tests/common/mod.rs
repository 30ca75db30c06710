#![allow(dead_code)]

use bkl_core::algebra::{Element, Gen, Theta};
use bkl_core::jet::{exponent, monomial_count, origin, Jet};
use bkl_core::scalar::{Scalar, Q};
use proptest::prelude::*;

pub fn q(n: i64, d: i64) -> Q {
    Q::from_ratio(n, d)
}

pub fn qi(n: i64) -> Q {
    Q::from_i64(n)
}

pub fn arb_jet(order: usize) -> impl Strategy<Value = Jet<Q>> {
    let n = monomial_count(order);
    proptest::collection::vec((-4i64..=4, 1i64..=3), n).prop_map(move |v| {
        let b = origin::<Q>();
        let mut j = Jet::zero(&b, order);
        for (k, (a, d)) in v.into_iter().enumerate() {
            j.set_coeff(&exponent(k), q(a, d));
        }
        j
    })
}

/// Order-6 jet of a sparse polynomial of degree `≤ deg`.
pub fn arb_sparse_jet(deg: usize) -> impl Strategy<Value = Jet<Q>> {
    let n = monomial_count(deg);
    proptest::collection::vec((0..n, -3i64..=3), 1..4).prop_map(move |v| {
        let b = origin::<Q>();
        let mut j = Jet::zero(&b, 6);
        for (k, a) in v {
            j.set_coeff(&exponent(k), j.coeff(&exponent(k)) + qi(a));
        }
        j
    })
}

/// Homogeneous element of θ-degree `p` with a few terms of polynomial degree `≤ deg`.
pub fn arb_element(p: usize, order: usize) -> impl Strategy<Value = Element<Q>> {
    let thetas = Theta::of_degree(p);
    proptest::collection::vec((0..thetas.len(), 0usize..11, arb_sparse_jet(order)), 1..4).prop_map(move |v| {
        let mut e = Element::zero();
        for (m, g, c) in v {
            e.add_term(thetas[m], Gen::from_index(g), c);
        }
        e
    })
}

pub fn c(x: i64) -> Jet<Q> {
    Jet::constant(qi(x), &origin(), 6)
}
