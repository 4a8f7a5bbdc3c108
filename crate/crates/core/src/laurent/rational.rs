use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::gcd::{self, IntPoly};
use super::{Exponent, LaurentError, LaurentPolynomial};

/// A quotient of Laurent polynomials, always held in normal form.
///
/// Normal form: numerator and denominator are coprime polynomials with
/// nonnegative exponents and no common monomial factor, all coefficients
/// are integers with joint content 1, and the denominator's lexicographically
/// smallest term has a positive coefficient. Normal forms are canonical, so
/// structural equality coincides with equality of rational functions.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: LaurentPolynomial,
    den: LaurentPolynomial,
}

impl RationalFunction {
    pub fn new(num: LaurentPolynomial, den: LaurentPolynomial) -> Result<Self, LaurentError> {
        if num.nvars() != den.nvars() {
            return Err(LaurentError::DimensionMismatch {
                left: num.nvars(),
                right: den.nvars(),
            });
        }
        if den.is_zero() {
            return Err(LaurentError::ZeroDenominator);
        }
        Ok(normalize(&num, &den))
    }

    pub fn from_poly(p: LaurentPolynomial) -> Self {
        let one = LaurentPolynomial::one(p.nvars());
        normalize(&p, &one)
    }

    pub fn zero(nvars: usize) -> Self {
        RationalFunction {
            num: LaurentPolynomial::zero(nvars),
            den: LaurentPolynomial::one(nvars),
        }
    }

    pub fn one(nvars: usize) -> Self {
        RationalFunction {
            num: LaurentPolynomial::one(nvars),
            den: LaurentPolynomial::one(nvars),
        }
    }

    pub fn var(var: usize, nvars: usize) -> Self {
        RationalFunction {
            num: LaurentPolynomial::var(var, nvars),
            den: LaurentPolynomial::one(nvars),
        }
    }

    pub fn num(&self) -> &LaurentPolynomial {
        &self.num
    }

    pub fn den(&self) -> &LaurentPolynomial {
        &self.den
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, LaurentError> {
        let num = self.num.checked_mul(&other.num)?;
        let den = self.den.checked_mul(&other.den)?;
        Ok(normalize(&num, &den))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, LaurentError> {
        if other.is_zero() {
            return Err(LaurentError::ZeroDenominator);
        }
        let num = self.num.checked_mul(&other.den)?;
        let den = self.den.checked_mul(&other.num)?;
        Ok(normalize(&num, &den))
    }

    /// Sum via the denominators' GCD: with `g = gcd(b, d)`, the sum
    /// `(a (d/g) + c (b/g)) / (b d / g)` can only share factors with `g`.
    pub fn checked_add(&self, other: &Self) -> Result<Self, LaurentError> {
        if self.nvars() != other.nvars() {
            return Err(LaurentError::DimensionMismatch {
                left: self.nvars(),
                right: other.nvars(),
            });
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.den == other.den {
            return Ok(normalize(&self.num.checked_add(&other.num)?, &self.den));
        }
        let one = BigInt::one();
        let (a, b) = (to_int(&self.num, &one), to_int(&self.den, &one));
        let (c, d) = (to_int(&other.num, &one), to_int(&other.den, &one));
        let g = gcd::gcd(&b, &d);
        let bg = gcd::exact_div(&b, &g).expect("gcd divides");
        let dg = gcd::exact_div(&d, &g).expect("gcd divides");
        let mut num = gcd::mul(&a, &dg);
        for (e, v) in gcd::mul(&c, &bg) {
            let slot = num.entry(e).or_insert_with(BigInt::zero);
            *slot += v;
        }
        num.retain(|_, v| !v.is_zero());
        if num.is_empty() {
            return Ok(RationalFunction::zero(self.nvars()));
        }
        let mut den = gcd::mul(&b, &dg);
        let h = gcd::gcd(&num, &g);
        if h.len() > 1 || h.keys().next() != Some(&Exponent::ZERO) {
            num = gcd::exact_div(&num, &h).expect("gcd divides numerator");
            den = gcd::exact_div(&den, &h).expect("gcd divides denominator");
        }
        Ok(finish(self.nvars(), num, den))
    }

    pub fn neg(&self) -> Self {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn inv(&self) -> Result<Self, LaurentError> {
        if self.is_zero() {
            return Err(LaurentError::ZeroDenominator);
        }
        Ok(normalize(&self.den, &self.num))
    }

    pub fn scaled(&self, k: &BigRational) -> Self {
        normalize(&self.num.scaled(k), &self.den)
    }

    pub fn eval(&self, point: &[BigRational]) -> Result<BigRational, LaurentError> {
        let d = self.den.eval(point)?;
        if d.is_zero() {
            return Err(LaurentError::PoleAtPoint);
        }
        Ok(self.num.eval(point)? / d)
    }

    /// Substitute `images` for the variables of this function.
    pub fn compose(&self, images: &[RationalFunction]) -> Result<Self, LaurentError> {
        let n = substitute(&self.num, images)?;
        let d = substitute(&self.den, images)?;
        n.checked_div(&d)
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFunction({self})")
    }
}

/// Equality by cross-multiplication, independent of normal forms.
pub fn rat_equal(f: &RationalFunction, g: &RationalFunction) -> bool {
    match (f.num.checked_mul(&g.den), g.num.checked_mul(&f.den)) {
        (Ok(a), Ok(b)) => a == b,
        _ => false,
    }
}

fn to_int(p: &LaurentPolynomial, scale: &BigInt) -> IntPoly {
    p.terms()
        .map(|(e, c)| {
            let v = c * BigRational::from_integer(scale.clone());
            debug_assert!(v.is_integer());
            (*e, v.to_integer())
        })
        .collect()
}

fn shift_int(p: IntPoly, by: Exponent) -> IntPoly {
    p.into_iter().map(|(e, c)| (e + by, c)).collect()
}

pub(super) fn normalize(num: &LaurentPolynomial, den: &LaurentPolynomial) -> RationalFunction {
    let nvars = num.nvars();
    assert!(!den.is_zero(), "zero denominator");
    if num.is_zero() {
        return RationalFunction::zero(nvars);
    }

    let lcm = num
        .terms()
        .chain(den.terms())
        .fold(BigInt::one(), |l, (_, c)| l.lcm(c.denom()));
    let mn = num.min_exponent();
    let md = den.min_exponent();
    let mut n = shift_int(to_int(num, &lcm), -mn);
    let mut d = shift_int(to_int(den, &lcm), -md);

    let is_const = |p: &IntPoly| p.len() == 1 && p.keys().next() == Some(&Exponent::ZERO);
    if !is_const(&n) && !is_const(&d) {
        let g = gcd::gcd(&n, &d);
        if !is_const(&g) {
            n = gcd::exact_div(&n, &g).expect("gcd divides numerator");
            d = gcd::exact_div(&d, &g).expect("gcd divides denominator");
        }
    }

    let diff = mn - md;
    let num_shift = diff.max(Exponent::ZERO);
    let den_shift = (-diff).max(Exponent::ZERO);
    finish(nvars, shift_int(n, num_shift), shift_int(d, den_shift))
}

/// Content and sign normalization of an already coprime pair.
fn finish(nvars: usize, mut n: IntPoly, mut d: IntPoly) -> RationalFunction {
    let content = gcd::integer_content(&n).gcd(&gcd::integer_content(&d));
    let negate = d.values().next().is_some_and(|c| c.is_negative());
    let k = if negate { -content } else { content };
    if !k.is_one() {
        for c in n.values_mut().chain(d.values_mut()) {
            *c /= &k;
        }
    }
    RationalFunction {
        num: LaurentPolynomial::from_int_poly(nvars, &n),
        den: LaurentPolynomial::from_int_poly(nvars, &d),
    }
}

/// Substitute rational images into a Laurent polynomial, clearing negative
/// powers against a common denominator before normalizing once.
pub(super) fn substitute(
    p: &LaurentPolynomial,
    images: &[RationalFunction],
) -> Result<RationalFunction, LaurentError> {
    let nvars = p.nvars();
    if images.len() != nvars {
        return Err(LaurentError::WrongArity {
            expected: nvars,
            got: images.len(),
        });
    }
    let target = images.first().map(|f| f.nvars()).unwrap_or(nvars);
    if let Some(bad) = images.iter().find(|f| f.nvars() != target) {
        return Err(LaurentError::DimensionMismatch {
            left: target,
            right: bad.nvars(),
        });
    }
    if p.is_zero() {
        return Ok(RationalFunction::zero(target));
    }

    let lo = p.min_exponent().min(Exponent::ZERO);
    let hi = p.max_exponent().max(Exponent::ZERO);
    for v in 0..nvars {
        if lo.0[v] < 0 && images[v].is_zero() {
            return Err(LaurentError::ZeroImage(super::VAR_NAMES[v]));
        }
    }

    // powers[v][k] = num_v^k, den_v^k for k up to the span hi - lo.
    let mut num_pows: Vec<Vec<LaurentPolynomial>> = Vec::with_capacity(nvars);
    let mut den_pows: Vec<Vec<LaurentPolynomial>> = Vec::with_capacity(nvars);
    for v in 0..nvars {
        let span = (hi.0[v] - lo.0[v]) as usize;
        let mut np = vec![LaurentPolynomial::one(target)];
        let mut dp = vec![LaurentPolynomial::one(target)];
        for k in 1..=span {
            let nk = &np[k - 1] * images[v].num();
            let dk = &dp[k - 1] * images[v].den();
            np.push(nk);
            dp.push(dk);
        }
        num_pows.push(np);
        den_pows.push(dp);
    }

    let mut total = LaurentPolynomial::zero(target);
    for (e, c) in p.terms() {
        let mut term = LaurentPolynomial::constant(c.clone(), target);
        for v in 0..nvars {
            let a = (e.0[v] - lo.0[v]) as usize;
            let b = (hi.0[v] - e.0[v]) as usize;
            if a > 0 {
                term = &term * &num_pows[v][a];
            }
            if b > 0 {
                term = &term * &den_pows[v][b];
            }
        }
        total += &term;
    }
    let mut common = LaurentPolynomial::one(target);
    for v in 0..nvars {
        let a = (-lo.0[v]) as usize;
        let b = hi.0[v] as usize;
        if a > 0 {
            common = &common * &num_pows[v][a];
        }
        if b > 0 {
            common = &common * &den_pows[v][b];
        }
    }
    Ok(normalize(&total, &common))
}

#[cfg(test)]
mod tests {
    use super::super::{parse_polynomial, parse_rational_function};
    use super::*;

    fn rf(text: &str) -> RationalFunction {
        parse_rational_function(text, 3).unwrap()
    }

    fn poly(text: &str) -> LaurentPolynomial {
        parse_polynomial(text, 3).unwrap()
    }

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn cancels_common_factor() {
        let f = RationalFunction::new(poly("x^2 - 1"), poly("x - 1")).unwrap();
        assert_eq!(f, RationalFunction::from_poly(poly("x + 1")));
        assert!(rat_equal(
            &RationalFunction::new(poly("x^2 - 1"), poly("x - 1")).unwrap(),
            &rf("x + 1")
        ));
        assert!(!rat_equal(&rf("x"), &rf("y")));
    }

    #[test]
    fn normal_form_shape() {
        let f = RationalFunction::new(poly("-2*x^-1*y"), poly("6*z^2 + 4*y*z")).unwrap();
        // -2y/x / (2z(3z + 2y)) = -y / (x z (2y + 3z))
        assert_eq!(f.num(), &poly("-y"));
        assert_eq!(f.den(), &poly("2*x*y*z + 3*x*z^2"));
    }

    #[test]
    fn phi_x_times_yz() {
        let phi = rf("(y*z^2 + y^2 + z)/(x*y*z)");
        let images = [phi, rf("y"), rf("z")];
        let out = poly("x*y*z").substitute(&images).unwrap();
        assert_eq!(out, rf("(y*z^2 + y^2 + z)/(x)"));
    }

    #[test]
    fn substitution_zero_image() {
        let images = [RationalFunction::zero(3), rf("y"), rf("z")];
        assert_eq!(
            poly("x^-1").substitute(&images),
            Err(LaurentError::ZeroImage('x'))
        );
        assert!(poly("x + y").substitute(&images).unwrap() == rf("y"));
    }

    #[test]
    fn evaluation() {
        assert_eq!(rf("(x + y)/(x)").eval(&[q(1), q(1), q(1)]).unwrap(), q(2));
        assert_eq!(
            rf("(y*z^2 + y^2 + z)/(x*y*z)").eval(&[q(1), q(1), q(1)]).unwrap(),
            q(3)
        );
        assert_eq!(
            rf("(1)/(x - 1)").eval(&[q(1), q(2), q(3)]),
            Err(LaurentError::PoleAtPoint)
        );
    }

    #[test]
    fn monomial_rescaling_is_invisible() {
        let f = rf("(y*z^2 + y^2 + z)/(x*y*z)");
        let w = poly("x^3*y^-2*z");
        let g = RationalFunction::new(&w * f.num(), &w * f.den()).unwrap();
        assert!(rat_equal(&f, &g));
        assert_eq!(f, g);
    }

    #[test]
    fn arithmetic() {
        let a = rf("(1)/(x)");
        let b = rf("(1)/(y)");
        assert_eq!(a.checked_add(&b).unwrap(), rf("(x + y)/(x*y)"));
        assert_eq!(a.checked_mul(&b).unwrap().inv().unwrap(), rf("x*y"));
        assert!(a.checked_add(&a.neg()).unwrap().is_zero());
    }
}
