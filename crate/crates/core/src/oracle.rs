//! Independent checks: brute-force walk counts, the orbit-sum identity at
//! each order in `t`, and the positive-part identity on a finite exponent
//! box through weight-truncated series expansion.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certifier::{certify, CertifyConfig, Verdict};
use crate::laurent::{rat_equal, Exponent, LaurentPolynomial, RationalFunction};
use crate::ordering::WeightOrder;
use crate::stepmodel::StepSet;
use crate::walkgroup::{close_group, orbit_sum, step_polynomial, GroupResult};

/// Largest number of series terms held at once before giving up.
pub const DEFAULT_TERM_BUDGET: usize = 2_000_000;

/// Walk counts `f(i, j, k; n)` for `n <= order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkTable {
    order: usize,
    /// `layers[n]` is dense over `[0, n]^3`.
    layers: Vec<Vec<BigUint>>,
}

impl WalkTable {
    pub fn order(&self) -> usize {
        self.order
    }

    fn index(n: usize, i: usize, j: usize, k: usize) -> usize {
        (i * (n + 1) + j) * (n + 1) + k
    }

    /// `f(i, j, k; n)`; zero outside the table.
    pub fn get(&self, i: usize, j: usize, k: usize, n: usize) -> BigUint {
        if n > self.order || i > n || j > n || k > n {
            return BigUint::zero();
        }
        self.layers[n][Self::index(n, i, j, k)].clone()
    }

    /// All nonzero `((i, j, k), f)` at length `n`, in lexicographic order.
    pub fn entries(&self, n: usize) -> impl Iterator<Item = ([usize; 3], &BigUint)> + '_ {
        let m = n + 1;
        self.layers[n].iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(idx, c)| {
            ([idx / (m * m), (idx / m) % m, idx % m], c)
        })
    }

    /// Number of walks of length `n`.
    pub fn total(&self, n: usize) -> BigUint {
        self.layers[n].iter().sum()
    }

    /// `Q_n(x, y, z) = sum f(i, j, k; n) x^i y^j z^k`.
    pub fn polynomial(&self, n: usize) -> LaurentPolynomial {
        LaurentPolynomial::from_terms(
            3,
            self.entries(n).map(|([i, j, k], c)| {
                (
                    Exponent::from([i as i32, j as i32, k as i32]),
                    BigRational::from_integer(BigInt::from(c.clone())),
                )
            }),
        )
    }
}

/// Count octant walks from the origin by dynamic programming.
pub fn walk_counts(s: &StepSet, order: usize) -> WalkTable {
    let steps: Vec<[i64; 3]> = s
        .steps()
        .map(|st| st.components().map(i64::from))
        .collect();
    let mut layers = vec![vec![BigUint::one()]];
    for n in 0..order {
        let prev = &layers[n];
        let m = n + 2;
        let mut next = vec![BigUint::zero(); m * m * m];
        let pm = n + 1;
        for (idx, c) in prev.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let p = [(idx / (pm * pm)) as i64, ((idx / pm) % pm) as i64, (idx % pm) as i64];
            for st in &steps {
                let q = [p[0] + st[0], p[1] + st[1], p[2] + st[2]];
                if q.iter().all(|&v| v >= 0) {
                    next[WalkTable::index(n + 1, q[0] as usize, q[1] as usize, q[2] as usize)] += c;
                }
            }
        }
        layers.push(next);
    }
    WalkTable { order, layers }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitIdentityReport {
    pub n_max: usize,
    /// One entry per `n <= n_max`.
    pub holds: Vec<bool>,
    pub pass: bool,
}

/// For each `n <= n_max`, compare
/// `sum_g sgn(g) g(xyz) Q_n(g(x), g(y), g(z))` with `P_S^n` times the orbit sum.
pub fn orbit_identity_check(s: &StepSet, group: &GroupResult, n_max: usize) -> OrbitIdentityReport {
    assert!(group.is_finite(), "orbit identity needs a finite group");
    let table = walk_counts(s, n_max);
    let os = orbit_sum(group).value;
    let p = RationalFunction::from_poly(step_polynomial(s));
    let xyz: Vec<RationalFunction> = group.elements.iter().map(|g| g.map.xyz_image()).collect();
    let mut rhs = os;
    let mut holds = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        if n > 0 {
            rhs = rhs.checked_mul(&p).expect("same dimension");
        }
        let q = table.polynomial(n);
        let mut lhs = RationalFunction::zero(3);
        for (g, gxyz) in group.elements.iter().zip(&xyz) {
            let term = g
                .map
                .apply(&q)
                .and_then(|qg| qg.checked_mul(gxyz))
                .expect("group elements have nonzero images");
            let term = if g.sign < 0 { term.neg() } else { term };
            lhs = lhs.checked_add(&term).expect("same dimension");
        }
        holds.push(rat_equal(&lhs, &rhs));
    }
    OrbitIdentityReport {
        n_max,
        pass: holds.iter().all(|&h| h),
        holds,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("weight bound needs more than {0} series terms")]
    WeightBoundOverflow(usize),
    #[error("weight has no unique minimal term on {0}")]
    NoUniqueLeadingTerm(String),
    #[error("weight too large for the series engine")]
    WeightTooLarge,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub n: usize,
    pub exponent: [i32; 3],
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositivePartReport {
    pub n_max: usize,
    /// The series are exact on `[-box_radius, box_radius]^3`.
    pub box_radius: i32,
    /// Integer weight (a positive multiple of the order's x, y, z part).
    pub weight: [i64; 3],
    /// Truncation bound on the orbit-sum expansion.
    pub bound: i64,
    pub max_terms: usize,
    pub coefficients_checked: usize,
    pub pass: bool,
    pub first_mismatch: Option<Mismatch>,
}

type Exp3 = [i32; 3];

/// A truncated series: every term of weight at most `bound`, exactly.
struct Series {
    terms: HashMap<Exp3, BigRational>,
}

struct Engine {
    w: [i64; 3],
    budget: usize,
    max_terms: usize,
}

impl Engine {
    fn weight(&self, e: &Exp3) -> i64 {
        self.w[0] * e[0] as i64 + self.w[1] * e[1] as i64 + self.w[2] * e[2] as i64
    }

    fn check(&mut self, n: usize) -> Result<(), OracleError> {
        self.max_terms = self.max_terms.max(n);
        if n > self.budget {
            Err(OracleError::WeightBoundOverflow(self.budget))
        } else {
            Ok(())
        }
    }

    /// `a * b` keeping terms of weight at most `bound`.
    fn mul(&mut self, a: &Series, b: &Series, bound: i64) -> Result<Series, OracleError> {
        let mut bs: Vec<(i64, &Exp3, &BigRational)> = b.terms.iter().map(|(e, c)| (self.weight(e), e, c)).collect();
        bs.sort_unstable_by_key(|t| t.0);
        let mut out: HashMap<Exp3, BigRational> = HashMap::new();
        for (ea, ca) in &a.terms {
            let wa = self.weight(ea);
            for (wb, eb, cb) in &bs {
                if wa + wb > bound {
                    break;
                }
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
                *out.entry(e).or_insert_with(BigRational::zero) += ca * *cb;
            }
            self.check(out.len())?;
        }
        out.retain(|_, c| !c.is_zero());
        Ok(Series { terms: out })
    }

    fn add_into(&mut self, acc: &mut Series, other: &Series, sign: i8) -> Result<(), OracleError> {
        for (e, c) in &other.terms {
            let slot = acc.terms.entry(*e).or_insert_with(BigRational::zero);
            if sign < 0 {
                *slot -= c;
            } else {
                *slot += c;
            }
        }
        acc.terms.retain(|_, c| !c.is_zero());
        self.check(acc.terms.len())
    }

    fn from_poly(p: &LaurentPolynomial) -> Series {
        Series {
            terms: p.terms().map(|(e, c)| ([e.0[0], e.0[1], e.0[2]], c.clone())).collect(),
        }
    }

    /// Expansion of `f` in the weight order, exact up to weight `bound`.
    fn expand(&mut self, f: &RationalFunction, bound: i64) -> Result<Series, OracleError> {
        let den = f.den();
        let min_w = den.terms().map(|(e, _)| self.weight(&[e.0[0], e.0[1], e.0[2]])).min().expect("nonzero");
        let lead: Vec<_> = den
            .terms()
            .filter(|(e, _)| self.weight(&[e.0[0], e.0[1], e.0[2]]) == min_w)
            .collect();
        if lead.len() != 1 {
            return Err(OracleError::NoUniqueLeadingTerm(den.to_string()));
        }
        let (ld, cd) = (lead[0].0.0, lead[0].1.clone());
        let ld: Exp3 = [ld[0], ld[1], ld[2]];
        let inv_cd = cd.recip();
        // f = (num / lt(den)) * 1/(1 - u)
        let mut num = Self::from_poly(f.num());
        num.terms = num
            .terms
            .into_iter()
            .map(|(e, c)| ([e[0] - ld[0], e[1] - ld[1], e[2] - ld[2]], c * &inv_cd))
            .collect();
        let mut u = Series { terms: HashMap::new() };
        for (e, c) in den.terms() {
            let e = [e.0[0] - ld[0], e.0[1] - ld[1], e.0[2] - ld[2]];
            if e != [0, 0, 0] {
                u.terms.insert(e, -(c * &inv_cd));
            }
        }
        let num_min = num.terms.keys().map(|e| self.weight(e)).min().expect("nonzero");
        let u_bound = bound - num_min;
        let mut geo = Series {
            terms: HashMap::from([([0, 0, 0], BigRational::one())]),
        };
        let mut power = Series {
            terms: geo.terms.clone(),
        };
        while u_bound >= 0 {
            power = self.mul(&power, &u, u_bound)?;
            if power.terms.is_empty() {
                break;
            }
            self.add_into(&mut geo, &power, 1)?;
        }
        self.mul(&num, &geo, bound)
    }
}

fn integer_weight(w: &WeightOrder) -> Result<[i64; 3], OracleError> {
    let lcm = w.w[..3].iter().fold(BigInt::one(), |l, q| l.lcm(q.denom()));
    let mut out = [0i64; 3];
    for (o, q) in out.iter_mut().zip(&w.w) {
        let v = q.numer() * (&lcm / q.denom());
        *o = v.to_i64().filter(|v| v.abs() < 1 << 20).ok_or(OracleError::WeightTooLarge)?;
    }
    let g = out.iter().fold(0i64, |g, &v| g.gcd(&v));
    if g > 1 {
        out = out.map(|v| v / g);
    }
    Ok(out)
}

/// Compare the positive part of `P_S^n * OS`, expanded in the weight order,
/// with the walk counts: the coefficient of `x^(i+1) y^(j+1) z^(k+1)` must be
/// `f(i, j, k; n)` for every exponent in `[1, box_radius]^3` and `n <= n_max`.
pub fn positive_part_check(
    s: &StepSet,
    group: &GroupResult,
    weight: &WeightOrder,
    n_max: usize,
    box_radius: i32,
    term_budget: usize,
) -> Result<PositivePartReport, OracleError> {
    assert!(group.is_finite(), "positive part needs a finite group");
    let w = integer_weight(weight)?;
    let mut engine = Engine {
        w,
        budget: term_budget,
        max_terms: 0,
    };
    let table = walk_counts(s, n_max);
    let box_bound: i64 = w.iter().map(|v| v.abs() * box_radius as i64).sum();
    let steps: Vec<Exp3> = s.steps().map(|st| st.components().map(i32::from)).collect();
    let neg = steps.iter().map(|e| -engine.weight(e)).max().unwrap_or(0).max(0);
    let bound = box_bound + n_max as i64 * neg;

    let mut r = Series { terms: HashMap::new() };
    for g in &group.elements {
        let part = engine.expand(&g.map.xyz_image(), bound)?;
        engine.add_into(&mut r, &part, g.sign)?;
    }
    let p = Engine::from_poly(&step_polynomial(s));

    let mut checked = 0;
    let mut first_mismatch = None;
    for n in 0..=n_max {
        if n > 0 {
            r = engine.mul(&r, &p, box_bound + (n_max - n) as i64 * neg)?;
        }
        'scan: for i in 1..=box_radius {
            for j in 1..=box_radius {
                for k in 1..=box_radius {
                    let found = r.terms.get(&[i, j, k]).cloned().unwrap_or_else(BigRational::zero);
                    let expected = BigRational::from_integer(BigInt::from(table.get(
                        (i - 1) as usize,
                        (j - 1) as usize,
                        (k - 1) as usize,
                        n,
                    )));
                    checked += 1;
                    if found != expected {
                        first_mismatch = Some(Mismatch {
                            n,
                            exponent: [i, j, k],
                            expected: expected.to_string(),
                            found: found.to_string(),
                        });
                        break 'scan;
                    }
                }
            }
        }
        if first_mismatch.is_some() {
            break;
        }
    }
    Ok(PositivePartReport {
        n_max,
        box_radius,
        weight: w,
        bound,
        max_terms: engine.max_terms,
        coefficients_checked: checked,
        pass: first_mismatch.is_none(),
        first_mismatch,
    })
}

/// Exponent box used by default: `[-(n_max + 2), n_max + 2]^3`.
pub fn default_box_radius(n_max: usize) -> i32 {
    n_max as i32 + 2
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub model: StepSet,
    pub n_max: usize,
    pub verdict: Verdict,
    pub group_order: Option<usize>,
    pub orbit_identity: Option<OrbitIdentityReport>,
    pub positive_part: Option<PositivePartReport>,
    pub error: Option<String>,
    pub pass: bool,
}

/// Certify, then run every oracle check that applies to the outcome.
pub fn run_oracle(s: &StepSet, config: &CertifyConfig, n_max: usize) -> OracleReport {
    let cert = certify(s, config);
    let mut report = OracleReport {
        model: *s,
        n_max,
        verdict: cert.verdict.clone(),
        group_order: cert.group_order,
        orbit_identity: None,
        positive_part: None,
        error: None,
        pass: true,
    };
    if cert.group_order.is_none() {
        return report;
    }
    let group = close_group(s, config.group_cap).expect("group closed during certification");
    let oi = orbit_identity_check(s, &group, n_max);
    report.pass &= oi.pass;
    report.orbit_identity = Some(oi);
    if let (Verdict::CertifiedDFinite, Some(w)) = (&cert.verdict, &cert.weight) {
        match positive_part_check(s, &group, w, n_max, default_box_radius(n_max), DEFAULT_TERM_BUDGET) {
            Ok(pp) => {
                report.pass &= pp.pass;
                report.positive_part = Some(pp);
            }
            Err(e) => {
                report.pass = false;
                report.error = Some(e.to_string());
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    const CERTIFIED_MODEL: &str = "(-1,-1,0),(-1,0,1),(-1,1,-1),(0,-1,1),(0,0,-1),(0,1,0),(1,0,0)";
    const ZERO_ORBIT_MODEL: &str = "(-1,-1,-1),(-1,0,0),(-1,0,1),(-1,1,0),(1,-1,0),(1,0,-1),(1,1,1)";

    fn model(t: &str) -> StepSet {
        t.parse().unwrap()
    }

    #[test]
    fn small_walk_counts() {
        let t = walk_counts(&model(CERTIFIED_MODEL), 2);
        assert_eq!(t.total(0), BigUint::one());
        assert_eq!(t.total(1), BigUint::from(2u32));
        assert_eq!(t.get(0, 1, 0, 1), BigUint::one());
        assert_eq!(t.get(1, 0, 0, 1), BigUint::one());
        assert_eq!(t.total(2), BigUint::from(6u32));
    }

    #[test]
    fn nonnegative_models_never_leave_the_octant() {
        let s = model("(1,0,0),(0,1,1),(1,1,1)");
        let t = walk_counts(&s, 6);
        for n in 0..=6 {
            assert_eq!(t.total(n), BigUint::from(3u32).pow(n as u32));
        }
    }

    #[test]
    fn orbit_identity_examples() {
        for text in [CERTIFIED_MODEL, ZERO_ORBIT_MODEL] {
            let s = model(text);
            let g = close_group(&s, 200).unwrap();
            let r = orbit_identity_check(&s, &g, 3);
            assert!(r.pass, "{text}: {r:?}");
        }
    }

    #[test]
    fn positive_part_certified_model_small() {
        let s = model(CERTIFIED_MODEL);
        let cert = certify(&s, &CertifyConfig::default());
        let g = close_group(&s, 200).unwrap();
        let r = positive_part_check(&s, &g, cert.weight.as_ref().unwrap(), 3, 5, DEFAULT_TERM_BUDGET).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn corrupted_sign_is_detected() {
        let s = model(CERTIFIED_MODEL);
        let cert = certify(&s, &CertifyConfig::default());
        let mut g = close_group(&s, 200).unwrap();
        g.elements[3].sign = -g.elements[3].sign;
        let r = positive_part_check(&s, &g, cert.weight.as_ref().unwrap(), 3, 5, DEFAULT_TERM_BUDGET).unwrap();
        assert!(!r.pass);
        assert!(r.first_mismatch.is_some());
    }
}
