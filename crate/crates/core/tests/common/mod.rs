#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use octant_core::laurent::{Exponent, LaurentPolynomial, RationalFunction};
use octant_core::stepmodel::{StepSet, MAX_ID};
use proptest::prelude::*;

pub const CERTIFIED_MODEL: &str = "(-1,-1,0),(-1,0,1),(-1,1,-1),(0,-1,1),(0,0,-1),(0,1,0),(1,0,0)";
pub const ZERO_ORBIT_MODEL: &str = "(-1,-1,-1),(-1,0,0),(-1,0,1),(-1,1,0),(1,-1,0),(1,0,-1),(1,1,1)";

/// Canonical models with a finite group, taken from a census run.
pub fn finite_models() -> Vec<StepSet> {
    include_str!("../data/finite_models.txt")
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| l.split_whitespace().next().unwrap().parse().unwrap())
        .collect()
}

pub fn finite_model() -> impl Strategy<Value = StepSet> {
    let models = finite_models();
    (0..models.len()).prop_map(move |i| models[i])
}

pub fn any_model() -> impl Strategy<Value = StepSet> {
    (1..=MAX_ID).prop_map(|id| StepSet::from_id(id).unwrap())
}

pub fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn polynomial(max_terms: usize, radius: i32) -> impl Strategy<Value = LaurentPolynomial> {
    prop::collection::vec(((-radius..=radius, -radius..=radius, -radius..=radius), -4i64..=4), 0..=max_terms).prop_map(
        |terms| LaurentPolynomial::from_terms(3, terms.into_iter().map(|((a, b, c), k)| (Exponent::from([a, b, c]), q(k)))),
    )
}

pub fn nonzero_polynomial(max_terms: usize, radius: i32) -> impl Strategy<Value = LaurentPolynomial> {
    polynomial(max_terms, radius).prop_filter("nonzero", |p| !p.is_zero())
}

pub fn rational_function() -> impl Strategy<Value = RationalFunction> {
    (nonzero_polynomial(3, 1), nonzero_polynomial(2, 1)).prop_map(|(n, d)| RationalFunction::new(n, d).unwrap())
}
