//! Human-readable printing and the matching parser.
//!
//! Polynomials print as `c*x^a*y^b + ...` with terms in lexicographic
//! exponent order; rational functions with a nontrivial denominator print as
//! `(num)/(den)`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{Exponent, LaurentError, LaurentPolynomial, RationalFunction, MAX_VARS, VAR_NAMES};

fn write_monomial(f: &mut fmt::Formatter<'_>, e: &Exponent, nvars: usize) -> fmt::Result {
    let mut first = true;
    for v in 0..nvars {
        let k = e.0[v];
        if k == 0 {
            continue;
        }
        if !first {
            f.write_str("*")?;
        }
        first = false;
        if k == 1 {
            write!(f, "{}", VAR_NAMES[v])?;
        } else {
            write!(f, "{}^{}", VAR_NAMES[v], k)?;
        }
    }
    Ok(())
}

impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else if c.is_negative() {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            if e.is_zero() {
                write!(f, "{mag}")?;
            } else {
                if !mag.is_one() {
                    write!(f, "{mag}*")?;
                }
                write_monomial(f, e, self.nvars())?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den().is_one() {
            write!(f, "{}", self.num())
        } else {
            write!(f, "({})/({})", self.num(), self.den())
        }
    }
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn err(&self, msg: &str) -> LaurentError {
        LaurentError::Parse(format!(
            "{msg} at byte {} of {:?}",
            self.pos,
            String::from_utf8_lossy(self.s)
        ))
    }

    fn digits(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| std::str::from_utf8(&self.s[start..self.pos]).unwrap())
    }

    fn integer(&mut self) -> Result<i32, LaurentError> {
        let neg = self.eat(b'-');
        let d = self.digits().ok_or_else(|| self.err("expected exponent"))?;
        let v: i32 = d.parse().map_err(|_| self.err("exponent overflow"))?;
        Ok(if neg { -v } else { v })
    }

    fn term(&mut self, nvars: usize) -> Result<(Exponent, BigRational), LaurentError> {
        let mut coeff = BigRational::one();
        let mut exp = Exponent::ZERO;
        loop {
            match self.peek() {
                Some(b) if b.is_ascii_digit() => {
                    let n: BigInt = self.digits().unwrap().parse().unwrap();
                    let mut c = BigRational::from_integer(n);
                    if self.eat(b'/') {
                        let d: BigInt = self
                            .digits()
                            .ok_or_else(|| self.err("expected denominator"))?
                            .parse()
                            .unwrap();
                        if d.is_zero() {
                            return Err(self.err("zero denominator"));
                        }
                        c /= BigRational::from_integer(d);
                    }
                    coeff *= c;
                }
                Some(b) if b.is_ascii_alphabetic() => {
                    let v = VAR_NAMES
                        .iter()
                        .position(|&n| n as u8 == b)
                        .filter(|&v| v < nvars)
                        .ok_or_else(|| self.err("unknown variable"))?;
                    self.pos += 1;
                    let k = if self.eat(b'^') { self.integer()? } else { 1 };
                    exp.0[v] += k;
                }
                _ => return Err(self.err("expected coefficient or variable")),
            }
            if !self.eat(b'*') {
                break;
            }
        }
        Ok((exp, coeff))
    }

    fn polynomial(&mut self, nvars: usize) -> Result<LaurentPolynomial, LaurentError> {
        let mut p = LaurentPolynomial::zero(nvars);
        let mut negative = self.eat(b'-');
        loop {
            let (e, c) = self.term(nvars)?;
            p.add_term(e, if negative { -c } else { c });
            if self.eat(b'+') {
                negative = false;
            } else if self.eat(b'-') {
                negative = true;
            } else {
                break;
            }
        }
        Ok(p)
    }

    fn finish(&mut self) -> Result<(), LaurentError> {
        if self.peek().is_some() {
            return Err(self.err("trailing input"));
        }
        Ok(())
    }
}

pub fn parse_polynomial(text: &str, nvars: usize) -> Result<LaurentPolynomial, LaurentError> {
    assert!(nvars <= MAX_VARS);
    let mut cur = Cursor { s: text.as_bytes(), pos: 0 };
    if cur.peek() == Some(b'0') {
        let save = cur.pos;
        cur.pos += 1;
        if cur.peek().is_none() {
            return Ok(LaurentPolynomial::zero(nvars));
        }
        cur.pos = save;
    }
    let p = cur.polynomial(nvars)?;
    cur.finish()?;
    Ok(p)
}

/// Parses `(num)/(den)` or a bare polynomial.
pub fn parse_rational_function(text: &str, nvars: usize) -> Result<RationalFunction, LaurentError> {
    let mut cur = Cursor { s: text.as_bytes(), pos: 0 };
    if cur.eat(b'(') {
        let num = cur.polynomial(nvars)?;
        if !cur.eat(b')') {
            return Err(cur.err("expected ')'"));
        }
        if !cur.eat(b'/') {
            return Err(cur.err("expected '/'"));
        }
        if !cur.eat(b'(') {
            return Err(cur.err("expected '('"));
        }
        let den = cur.polynomial(nvars)?;
        if !cur.eat(b')') {
            return Err(cur.err("expected ')'"));
        }
        cur.finish()?;
        return RationalFunction::new(num, den);
    }
    Ok(RationalFunction::from_poly(parse_polynomial(text, nvars)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prints_in_lex_order() {
        let p = parse_polynomial("x + y + x^-1*y^-1 + z^-1 + x^-1*z + y^-1*z + x^-1*y*z^-1", 3).unwrap();
        assert_eq!(
            p.to_string(),
            "x^-1*y^-1 + x^-1*z + x^-1*y*z^-1 + y^-1*z + z^-1 + y + x"
        );
    }

    #[test]
    fn coefficients_and_signs() {
        let p = parse_polynomial("-2/3*x*t^2 + 5 - y", 4).unwrap();
        assert_eq!(p.to_string(), "5 - y - 2/3*x*t^2");
        assert_eq!(parse_polynomial(&p.to_string(), 4).unwrap(), p);
        assert_eq!(parse_polynomial("0", 3).unwrap().to_string(), "0");
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_polynomial("x +", 3).is_err());
        assert!(parse_polynomial("t", 3).is_err());
        assert!(parse_polynomial("x y", 3).is_err());
        assert!(parse_rational_function("(x)/(0)", 3).is_err());
    }

    #[test]
    fn rational_round_trip() {
        let f = parse_rational_function("(y*z^2 + y^2 + z)/(x*y*z)", 3).unwrap();
        assert_eq!(f.to_string(), "(z + y*z^2 + y^2)/(x*y*z)");
        assert_eq!(parse_rational_function(&f.to_string(), 3).unwrap(), f);
    }
}
