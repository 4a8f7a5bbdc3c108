//! Multivariate GCD over the integers for polynomials with nonnegative
//! exponents. A heuristic evaluation/interpolation GCD handles almost every
//! input; its answer is accepted only when it divides both inputs and the
//! cofactors are provably coprime. Otherwise recursive primitive polynomial
//! remainder sequences decide.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Exponent, MAX_VARS};

pub(crate) type IntPoly = BTreeMap<Exponent, BigInt>;

pub(crate) fn constant(c: BigInt) -> IntPoly {
    let mut p = IntPoly::new();
    if !c.is_zero() {
        p.insert(Exponent::ZERO, c);
    }
    p
}

pub(crate) fn mul(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let mut out = IntPoly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e = *ea + *eb;
            let slot = out.entry(e).or_insert_with(BigInt::zero);
            *slot += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn sub_assign_scaled(acc: &mut IntPoly, b: &IntPoly, coeff: &BigInt, shift: Exponent) {
    for (e, c) in b {
        let key = *e + shift;
        let slot = acc.entry(key).or_insert_with(BigInt::zero);
        *slot -= c * coeff;
        if slot.is_zero() {
            acc.remove(&key);
        }
    }
}

pub(crate) fn integer_content(a: &IntPoly) -> BigInt {
    a.values().fold(BigInt::zero(), |g, c| g.gcd(c))
}

fn degree(a: &IntPoly, var: usize) -> i32 {
    a.keys().map(|e| e.0[var]).max().unwrap_or(0)
}

/// Coefficients of `a` viewed as a univariate polynomial in `var`.
fn coefficients(a: &IntPoly, var: usize) -> BTreeMap<i32, IntPoly> {
    let mut out: BTreeMap<i32, IntPoly> = BTreeMap::new();
    for (e, c) in a {
        let mut rest = *e;
        rest.0[var] = 0;
        out.entry(e.0[var]).or_default().insert(rest, c.clone());
    }
    out
}

fn leading_coefficient(a: &IntPoly, var: usize) -> (i32, IntPoly) {
    let d = degree(a, var);
    let lc = a
        .iter()
        .filter(|(e, _)| e.0[var] == d)
        .map(|(e, c)| {
            let mut rest = *e;
            rest.0[var] = 0;
            (rest, c.clone())
        })
        .collect();
    (d, lc)
}

/// Sign normalization: the lexicographically largest term is positive.
fn positive(mut a: IntPoly) -> IntPoly {
    if a.values().next_back().is_some_and(|c| c.is_negative()) {
        for c in a.values_mut() {
            *c = -c.clone();
        }
    }
    a
}

/// Exact division; `None` if `b` does not divide `a`.
pub(crate) fn exact_div(a: &IntPoly, b: &IntPoly) -> Option<IntPoly> {
    let (lb_e, lb_c) = b.iter().next_back().expect("division by zero polynomial");
    let mut q = IntPoly::new();
    let mut r = a.clone();
    while let Some((re, rc)) = r.iter().next_back() {
        let shift = *re - *lb_e;
        if shift.0.iter().any(|&x| x < 0) {
            return None;
        }
        let (c, rem) = rc.div_rem(lb_c);
        if !rem.is_zero() {
            return None;
        }
        sub_assign_scaled(&mut r, b, &c, shift);
        q.insert(shift, c);
    }
    Some(q)
}

fn is_constant(a: &IntPoly) -> bool {
    a.len() == 1 && a.keys().next() == Some(&Exponent::ZERO)
}

/// Greatest common divisor, normalized so its largest term is positive.
pub(crate) fn gcd(a: &IntPoly, b: &IntPoly) -> IntPoly {
    if !a.is_empty() && !b.is_empty() && provably_coprime(a, b) {
        return constant(integer_content(a).gcd(&integer_content(b)));
    }
    if a.is_empty() || b.is_empty() || is_constant(a) || is_constant(b) {
        return gcd_from(a, b, 0);
    }
    let (ca, cb) = (integer_content(a), integer_content(b));
    let pa = scale_down(a, &ca);
    let pb = scale_down(b, &cb);
    if let Some(h) = heuristic_gcd(&pa, &pb) {
        let fa = exact_div(&pa, &h).expect("checked divisor");
        let fb = exact_div(&pb, &h).expect("checked divisor");
        if provably_coprime(&fa, &fb) {
            return positive(mul(&constant(ca.gcd(&cb)), &h));
        }
    }
    gcd_from(a, b, 0)
}

fn scale_down(a: &IntPoly, c: &BigInt) -> IntPoly {
    a.iter().map(|(e, v)| (*e, v / c)).collect()
}

fn max_norm(a: &IntPoly) -> BigInt {
    a.values().map(|c| c.abs()).max().unwrap_or_default()
}

/// `a` with `var` set to the integer `x`.
fn evaluate(a: &IntPoly, var: usize, x: &BigInt) -> IntPoly {
    let mut out = IntPoly::new();
    for (e, c) in a {
        let mut rest = *e;
        rest.0[var] = 0;
        *out.entry(rest).or_insert_with(BigInt::zero) += c * x.pow(e.0[var] as u32);
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Inverse of `evaluate` on polynomials whose coefficients in `var` are
/// below `x / 2` in absolute value: symmetric base-`x` digits.
fn interpolate(mut h: IntPoly, var: usize, x: &BigInt) -> IntPoly {
    let half = x / 2;
    let mut out = IntPoly::new();
    let mut power = 0;
    while !h.is_empty() {
        let mut next = IntPoly::new();
        for (e, c) in &h {
            let mut digit = c.mod_floor(x);
            if digit > half {
                digit -= x;
            }
            if !digit.is_zero() {
                let mut key = *e;
                key.0[var] = power;
                out.insert(key, digit.clone());
            }
            let rest = (c - digit) / x;
            if !rest.is_zero() {
                next.insert(*e, rest);
            }
        }
        h = next;
        power += 1;
    }
    out
}

/// Candidate GCD of primitive `a` and `b` by evaluation at large integers;
/// `None` when no candidate divides both.
fn heuristic_gcd(a: &IntPoly, b: &IntPoly) -> Option<IntPoly> {
    let var = (0..MAX_VARS).rev().find(|&v| degree(a, v) > 0 || degree(b, v) > 0)?;
    let mut x = BigInt::from(2) * max_norm(a).min(max_norm(b)) + 29;
    for _ in 0..6 {
        let ea = evaluate(a, var, &x);
        let eb = evaluate(b, var, &x);
        if !ea.is_empty() && !eb.is_empty() {
            let (ca, cb) = (integer_content(&ea), integer_content(&eb));
            let inner = if is_constant(&ea) || is_constant(&eb) {
                Some(constant(ca.gcd(&cb)))
            } else {
                heuristic_gcd(&scale_down(&ea, &ca), &scale_down(&eb, &cb))
                    .map(|h| mul(&constant(ca.gcd(&cb)), &h))
            };
            if let Some(h) = inner {
                let h = interpolate(h, var, &x);
                if !h.is_empty() {
                    let h = positive(scale_down(&h, &integer_content(&h)));
                    if exact_div(a, &h).is_some() && exact_div(b, &h).is_some() {
                        return Some(h);
                    }
                }
            }
        }
        x = &x * 73794 * x.sqrt().sqrt() / 27011;
    }
    None
}

const PRIME: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

fn reduce(c: &BigInt) -> u64 {
    let m = c.mod_floor(&BigInt::from(PRIME));
    m.iter_u64_digits().next().unwrap_or(0)
}

/// `a` with every variable except `var` replaced by `point`, reduced modulo
/// the prime; dense coefficients by degree in `var`.
fn specialize(a: &IntPoly, var: usize, point: &[u64; MAX_VARS]) -> Vec<u64> {
    let mut out = vec![0u64; degree(a, var) as usize + 1];
    for (e, c) in a {
        let mut v = reduce(c);
        for (k, &x) in point.iter().enumerate() {
            if k != var && e.0[k] > 0 {
                v = mulmod(v, powmod(x, e.0[k] as u64));
            }
        }
        let slot = &mut out[e.0[var] as usize];
        *slot = (*slot + v) % PRIME;
    }
    out
}

fn univariate_gcd_degree(mut a: Vec<u64>, mut b: Vec<u64>) -> usize {
    let trim = |p: &mut Vec<u64>| {
        while p.last() == Some(&0) {
            p.pop();
        }
    };
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let inv = powmod(*b.last().unwrap(), PRIME - 2);
        while a.len() >= b.len() {
            let f = mulmod(*a.last().unwrap(), inv);
            let off = a.len() - b.len();
            for (i, &c) in b.iter().enumerate() {
                a[off + i] = (a[off + i] + PRIME - mulmod(f, c)) % PRIME;
            }
            trim(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// Sound one-sided test: `true` only if the GCD is a constant. For each
/// variable, a specialization keeping the leading coefficient of `a`
/// nonzero cannot lower the degree of the GCD in that variable, so a
/// constant modular GCD bounds it by zero.
fn provably_coprime(a: &IntPoly, b: &IntPoly) -> bool {
    let mut seed: u64 = 0x9e37_79b9_7f4a_7c15;
    let mut next = || {
        seed ^= seed << 13;
        seed ^= seed >> 7;
        seed ^= seed << 17;
        2 + seed % (PRIME - 2)
    };
    for var in 0..MAX_VARS {
        if degree(a, var) == 0 || degree(b, var) == 0 {
            continue;
        }
        let point = [next(), next(), next(), next()];
        let sa = specialize(a, var, &point);
        if sa.last() == Some(&0) {
            return false;
        }
        let sb = specialize(b, var, &point);
        if univariate_gcd_degree(sa, sb) > 0 {
            return false;
        }
    }
    true
}

// Invariant: neither input involves a variable with index < `from`.
fn gcd_from(a: &IntPoly, b: &IntPoly, from: usize) -> IntPoly {
    if a.is_empty() {
        return positive(b.clone());
    }
    if b.is_empty() {
        return positive(a.clone());
    }
    if is_constant(a) || is_constant(b) {
        return constant(integer_content(a).gcd(&integer_content(b)));
    }
    let Some(var) = (from..MAX_VARS).find(|&v| degree(a, v) > 0 || degree(b, v) > 0) else {
        return constant(integer_content(a).gcd(&integer_content(b)));
    };
    let ca = content_in(a, var);
    let cb = content_in(b, var);
    let pa = exact_div(a, &ca).expect("content divides");
    let pb = exact_div(b, &cb).expect("content divides");
    let c = gcd_from(&ca, &cb, var + 1);
    let g = primitive_gcd(pa, pb, var);
    positive(mul(&c, &g))
}

/// GCD of the coefficients of `a` as a polynomial in `var`.
fn content_in(a: &IntPoly, var: usize) -> IntPoly {
    let coeffs = coefficients(a, var);
    let mut it = coeffs.values();
    let first = positive(it.next().cloned().unwrap_or_default());
    it.fold(first, |g, c| {
        if is_constant(&g) && g.values().all(|v| v.is_one()) {
            g
        } else {
            gcd_from(&g, c, var + 1)
        }
    })
}

fn primitive_part_in(a: &IntPoly, var: usize) -> IntPoly {
    let c = content_in(a, var);
    positive(exact_div(a, &c).expect("content divides"))
}

fn pseudo_remainder(a: &IntPoly, b: &IntPoly, var: usize) -> IntPoly {
    let (n, lb) = leading_coefficient(b, var);
    let mut r = a.clone();
    while !r.is_empty() && degree(&r, var) >= n {
        let (d, lr) = leading_coefficient(&r, var);
        let mut shift = Exponent::ZERO;
        shift.0[var] = d - n;
        let mut next = mul(&lb, &r);
        let mut sub = mul(&lr, b);
        sub = sub.into_iter().map(|(e, c)| (e + shift, c)).collect();
        sub_assign_scaled(&mut next, &sub, &BigInt::one(), Exponent::ZERO);
        r = next;
    }
    r
}

fn primitive_gcd(a: IntPoly, b: IntPoly, var: usize) -> IntPoly {
    let (mut a, mut b) = if degree(&a, var) >= degree(&b, var) { (a, b) } else { (b, a) };
    loop {
        if b.is_empty() {
            return primitive_part_in(&a, var);
        }
        if degree(&b, var) == 0 {
            return constant(BigInt::one());
        }
        let r = pseudo_remainder(&a, &b, var);
        a = b;
        b = if r.is_empty() { r } else { primitive_part_in(&r, var) };
    }
}
