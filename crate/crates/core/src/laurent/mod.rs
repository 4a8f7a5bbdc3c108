//! Exact multivariate Laurent polynomials and rational functions over Q.
//!
//! Exponents live in a fixed four-slot vector `(x, y, z, t)`; a polynomial
//! records how many leading slots it actually uses and keeps the rest zero.
//! Terms iterate in lexicographic exponent order, which fixes printing and
//! hashing.

mod gcd;
mod rational;
mod text;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use rational::{rat_equal, RationalFunction};
pub use text::{parse_polynomial, parse_rational_function};

pub(crate) use gcd::IntPoly;

/// Slots in an exponent vector.
pub const MAX_VARS: usize = 4;

/// Variable names by slot.
pub const VAR_NAMES: [char; MAX_VARS] = ['x', 'y', 'z', 't'];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LaurentError {
    #[error("dimension mismatch: {left} vs {right} variables")]
    DimensionMismatch { left: usize, right: usize },
    #[error("substituting zero for {0}, which occurs with a negative exponent")]
    ZeroImage(char),
    #[error("denominator vanishes at the evaluation point")]
    PoleAtPoint,
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("expected {expected} images, got {got}")]
    WrongArity { expected: usize, got: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

/// An integer exponent vector in Z^4 (unused trailing slots are zero).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Exponent(pub [i32; MAX_VARS]);

impl Exponent {
    pub const ZERO: Exponent = Exponent([0; MAX_VARS]);

    pub fn unit(var: usize) -> Exponent {
        let mut e = Exponent::ZERO;
        e.0[var] = 1;
        e
    }

    pub fn min(self, other: Exponent) -> Exponent {
        let mut out = self;
        for (o, b) in out.0.iter_mut().zip(other.0) {
            *o = (*o).min(b);
        }
        out
    }

    pub fn max(self, other: Exponent) -> Exponent {
        let mut out = self;
        for (o, b) in out.0.iter_mut().zip(other.0) {
            *o = (*o).max(b);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        *self == Exponent::ZERO
    }

    pub fn to_i64(self) -> [i64; MAX_VARS] {
        self.0.map(i64::from)
    }
}

impl Add for Exponent {
    type Output = Exponent;
    fn add(mut self, rhs: Exponent) -> Exponent {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
        self
    }
}

impl Sub for Exponent {
    type Output = Exponent;
    fn sub(mut self, rhs: Exponent) -> Exponent {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a -= b;
        }
        self
    }
}

impl Neg for Exponent {
    type Output = Exponent;
    fn neg(self) -> Exponent {
        Exponent(self.0.map(|a| -a))
    }
}

impl From<[i32; 3]> for Exponent {
    fn from(e: [i32; 3]) -> Self {
        Exponent([e[0], e[1], e[2], 0])
    }
}

impl From<[i32; 4]> for Exponent {
    fn from(e: [i32; 4]) -> Self {
        Exponent(e)
    }
}

/// Sparse Laurent polynomial with exact rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentPolynomial {
    nvars: usize,
    terms: BTreeMap<Exponent, BigRational>,
}

impl LaurentPolynomial {
    pub fn zero(nvars: usize) -> Self {
        assert!(nvars <= MAX_VARS, "at most {MAX_VARS} variables");
        LaurentPolynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(BigRational::one(), nvars)
    }

    pub fn constant(c: BigRational, nvars: usize) -> Self {
        Self::monomial(Exponent::ZERO, c, nvars)
    }

    pub fn monomial(exp: Exponent, coeff: BigRational, nvars: usize) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(exp, coeff);
        p
    }

    pub fn var(var: usize, nvars: usize) -> Self {
        assert!(var < nvars);
        Self::monomial(Exponent::unit(var), BigRational::one(), nvars)
    }

    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponent, BigRational)>,
    {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    /// Integer-coefficient convenience constructor.
    pub fn from_int_terms<I, E>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (E, i64)>,
        E: Into<Exponent>,
    {
        Self::from_terms(
            nvars,
            terms
                .into_iter()
                .map(|(e, c)| (e.into(), BigRational::from_integer(c.into()))),
        )
    }

    pub(crate) fn from_int_poly(nvars: usize, p: &IntPoly) -> Self {
        LaurentPolynomial {
            nvars,
            terms: p
                .iter()
                .map(|(e, c)| (*e, BigRational::from_integer(c.clone())))
                .collect(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&Exponent::ZERO)
                .is_some_and(|c| c.is_one())
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// Number of nonzero terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponent, &BigRational)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = Exponent> + '_ {
        self.terms.keys().copied()
    }

    pub fn coeff(&self, e: &Exponent) -> BigRational {
        self.terms.get(e).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add_term(&mut self, e: Exponent, c: BigRational) {
        debug_assert!(
            e.0[self.nvars..].iter().all(|&x| x == 0),
            "exponent {e:?} uses slots beyond {} variables",
            self.nvars
        );
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Componentwise minimum exponent over the support (zero for the zero
    /// polynomial).
    pub fn min_exponent(&self) -> Exponent {
        let mut it = self.terms.keys();
        match it.next() {
            None => Exponent::ZERO,
            Some(first) => it.fold(*first, |m, e| m.min(*e)),
        }
    }

    pub fn max_exponent(&self) -> Exponent {
        let mut it = self.terms.keys();
        match it.next() {
            None => Exponent::ZERO,
            Some(first) => it.fold(*first, |m, e| m.max(*e)),
        }
    }

    /// Multiply by the monomial `x^shift`.
    pub fn shifted(&self, shift: Exponent) -> Self {
        LaurentPolynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (*e + shift, c.clone())).collect(),
        }
    }

    pub fn scaled(&self, k: &BigRational) -> Self {
        if k.is_zero() {
            return Self::zero(self.nvars);
        }
        LaurentPolynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (*e, c * k)).collect(),
        }
    }

    /// Same polynomial viewed in `nvars` variables (only widening, or
    /// narrowing when the dropped slots are unused).
    pub fn with_nvars(&self, nvars: usize) -> Result<Self, LaurentError> {
        if self.terms.keys().any(|e| e.0[nvars..].iter().any(|&x| x != 0)) {
            return Err(LaurentError::DimensionMismatch {
                left: self.nvars,
                right: nvars,
            });
        }
        Ok(LaurentPolynomial {
            nvars,
            terms: self.terms.clone(),
        })
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, LaurentError> {
        self.same_dim(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, LaurentError> {
        self.same_dim(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, LaurentError> {
        self.same_dim(other)?;
        let mut acc: BTreeMap<Exponent, BigRational> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                *acc.entry(*ea + *eb).or_insert_with(BigRational::zero) += ca * cb;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(LaurentPolynomial {
            nvars: self.nvars,
            terms: acc,
        })
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self::one(self.nvars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    fn same_dim(&self, other: &Self) -> Result<(), LaurentError> {
        if self.nvars != other.nvars {
            return Err(LaurentError::DimensionMismatch {
                left: self.nvars,
                right: other.nvars,
            });
        }
        Ok(())
    }

    /// Exact evaluation; every point component must be nonzero where a
    /// negative exponent occurs.
    pub fn eval(&self, point: &[BigRational]) -> Result<BigRational, LaurentError> {
        if point.len() != self.nvars {
            return Err(LaurentError::WrongArity {
                expected: self.nvars,
                got: point.len(),
            });
        }
        let mut sum = BigRational::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (v, &k) in e.0[..self.nvars].iter().enumerate() {
                if k < 0 && point[v].is_zero() {
                    return Err(LaurentError::PoleAtPoint);
                }
                term *= num_traits::pow::Pow::pow(&point[v], k);
            }
            sum += term;
        }
        Ok(sum)
    }

    /// Substitute a rational function for each variable.
    pub fn substitute(&self, images: &[RationalFunction]) -> Result<RationalFunction, LaurentError> {
        rational::substitute(self, images)
    }

    /// Scale to integer coefficients with content 1, keeping the sign.
    /// Returns the primitive integer polynomial and the factor `k` with
    /// `self = k * result`.
    pub(crate) fn to_primitive_int(&self) -> (IntPoly, BigRational) {
        let lcm = self
            .terms
            .values()
            .fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let ints: IntPoly = self
            .terms
            .iter()
            .map(|(e, c)| (*e, (c * BigRational::from_integer(lcm.clone())).to_integer()))
            .collect();
        let content = gcd::integer_content(&ints);
        if content.is_zero() {
            return (ints, BigRational::one());
        }
        let ints = ints.into_iter().map(|(e, c)| (e, c / &content)).collect();
        (ints, BigRational::new(content, lcm))
    }

    /// Strip monomial and scalar content: the result has componentwise
    /// minimal exponent zero, integer coefficients with content 1, and a
    /// positive coefficient on its lexicographically smallest term.
    /// Returns `(normalized, shift, scale)` with `self = scale * x^shift * normalized`.
    pub fn normalized_factor(&self) -> (LaurentPolynomial, Exponent, BigRational) {
        if self.is_zero() {
            return (self.clone(), Exponent::ZERO, BigRational::one());
        }
        let shift = self.min_exponent();
        let (ints, mut k) = self.shifted(-shift).to_primitive_int();
        let mut p = LaurentPolynomial::from_int_poly(self.nvars, &ints);
        if p.terms.values().next().is_some_and(|c| c.is_negative()) {
            p = -&p;
            k = -k;
        }
        (p, shift, k)
    }
}

impl fmt::Debug for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPolynomial({self})")
    }
}

impl<'a> Add<&'a LaurentPolynomial> for &'a LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn add(self, rhs: &'a LaurentPolynomial) -> LaurentPolynomial {
        self.checked_add(rhs).expect("polynomial dimensions differ")
    }
}

impl<'a> Sub<&'a LaurentPolynomial> for &'a LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn sub(self, rhs: &'a LaurentPolynomial) -> LaurentPolynomial {
        self.checked_sub(rhs).expect("polynomial dimensions differ")
    }
}

impl<'a> std::ops::Mul<&'a LaurentPolynomial> for &'a LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn mul(self, rhs: &'a LaurentPolynomial) -> LaurentPolynomial {
        self.checked_mul(rhs).expect("polynomial dimensions differ")
    }
}

impl Neg for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn neg(self) -> LaurentPolynomial {
        LaurentPolynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }
}

impl AddAssign<&LaurentPolynomial> for LaurentPolynomial {
    fn add_assign(&mut self, rhs: &LaurentPolynomial) {
        assert_eq!(self.nvars, rhs.nvars, "polynomial dimensions differ");
        for (e, c) in &rhs.terms {
            self.add_term(*e, c.clone());
        }
    }
}

pub fn poly_add(a: &LaurentPolynomial, b: &LaurentPolynomial) -> Result<LaurentPolynomial, LaurentError> {
    a.checked_add(b)
}

pub fn poly_mul(a: &LaurentPolynomial, b: &LaurentPolynomial) -> Result<LaurentPolynomial, LaurentError> {
    a.checked_mul(b)
}

pub fn rat_eval(f: &RationalFunction, point: &[BigRational]) -> Result<BigRational, LaurentError> {
    f.eval(point)
}

pub fn substitute(p: &LaurentPolynomial, images: &[RationalFunction]) -> Result<RationalFunction, LaurentError> {
    p.substitute(images)
}
