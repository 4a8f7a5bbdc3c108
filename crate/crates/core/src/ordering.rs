//! Leading-term choices for the polynomials occurring in group elements and
//! their realization as strict rational weight orders.

use std::collections::HashMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::geometry::{dot, solve_feasibility, Cone, FeasibilityProblem, IVec, Relation, DIM};
use crate::laurent::{Exponent, LaurentPolynomial};
use crate::walkgroup::GroupResult;

/// Exponent of a three-variable term as a point of Z^4 with `t = 0`.
pub fn lift(e: &Exponent) -> IVec {
    [e.0[0] as i64, e.0[1] as i64, e.0[2] as i64, 0]
}

pub fn sub(a: &IVec, b: &IVec) -> IVec {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

pub fn add(a: &IVec, b: &IVec) -> IVec {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoolEntry {
    /// Normalized: minimal exponent zero, integer content one, positive
    /// coefficient on the lexicographically smallest term.
    pub poly: LaurentPolynomial,
    /// Support in lexicographic order.
    pub support: Vec<IVec>,
    /// Indices into the group's element list of elements using this entry.
    pub used_by: Vec<usize>,
}

/// Where a numerator or denominator of an element image sits relative to
/// the pool: `x^shift * scale * pool[entry]`, or a bare monomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    Monomial(IVec),
    Pooled { shift: IVec, entry: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolynomialPool {
    pub entries: Vec<PoolEntry>,
    index: HashMap<LaurentPolynomial, usize>,
}

impl PolynomialPool {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn polys(&self) -> impl Iterator<Item = &LaurentPolynomial> {
        self.entries.iter().map(|e| &e.poly)
    }

    /// Locate a polynomial of any scale and monomial shift.
    pub fn factor(&self, p: &LaurentPolynomial) -> Option<Factor> {
        let (norm, shift, _) = p.normalized_factor();
        if norm.is_one() {
            return Some(Factor::Monomial(lift(&shift)));
        }
        let entry = *self.index.get(&norm)?;
        Some(Factor::Pooled {
            shift: lift(&shift),
            entry,
        })
    }

    /// Number of leading-term choices: the product of support sizes.
    pub fn choice_count(&self) -> u128 {
        self.entries.iter().map(|e| e.support.len() as u128).product()
    }
}

fn sort_key(p: &LaurentPolynomial) -> (usize, Vec<(Exponent, BigRational)>) {
    (p.len(), p.terms().map(|(e, c)| (*e, c.clone())).collect())
}

/// Gather every non-monomial numerator and denominator of every coordinate
/// image. Entries are sorted by term count, then by their term lists.
pub fn collect_polynomials(group: &GroupResult) -> PolynomialPool {
    let mut found: HashMap<LaurentPolynomial, Vec<usize>> = HashMap::new();
    for (i, g) in group.elements.iter().enumerate() {
        for f in &g.map.images {
            for p in [f.num(), f.den()] {
                let (norm, _, _) = p.normalized_factor();
                if norm.len() >= 2 {
                    let users = found.entry(norm).or_default();
                    if users.last() != Some(&i) {
                        users.push(i);
                    }
                }
            }
        }
    }
    let mut entries: Vec<PoolEntry> = found
        .into_iter()
        .map(|(poly, used_by)| PoolEntry {
            support: poly.support().map(|e| lift(&e)).collect(),
            poly,
            used_by,
        })
        .collect();
    entries.sort_by_cached_key(|e| sort_key(&e.poly));
    let index = entries
        .iter()
        .enumerate()
        .map(|(i, e)| (e.poly.clone(), i))
        .collect();
    PolynomialPool { entries, index }
}

/// One selected support index per pool entry.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LeadingTermChoice {
    pub indices: Vec<usize>,
}

impl LeadingTermChoice {
    pub fn exponents(&self, pool: &PolynomialPool) -> Vec<IVec> {
        self.indices
            .iter()
            .zip(&pool.entries)
            .map(|(&i, e)| e.support[i])
            .collect()
    }

    pub fn lexp(&self, pool: &PolynomialPool, entry: usize) -> IVec {
        pool.entries[entry].support[self.indices[entry]]
    }

    /// Position in the lexicographic enumeration (first entry most significant).
    pub fn rank(&self, pool: &PolynomialPool) -> u128 {
        self.indices
            .iter()
            .zip(&pool.entries)
            .fold(0u128, |acc, (&i, e)| acc * e.support.len() as u128 + i as u128)
    }

    /// Recover a choice from its chosen exponents.
    pub fn from_exponents(pool: &PolynomialPool, exps: &[IVec]) -> Option<Self> {
        if exps.len() != pool.len() {
            return None;
        }
        let indices = exps
            .iter()
            .zip(&pool.entries)
            .map(|(x, e)| e.support.iter().position(|s| s == x))
            .collect::<Option<Vec<_>>>()?;
        Some(LeadingTermChoice { indices })
    }
}

/// Every choice in lexicographic order of selected exponents.
pub fn enumerate_choices(pool: &PolynomialPool) -> impl Iterator<Item = LeadingTermChoice> + '_ {
    let sizes: Vec<usize> = pool.entries.iter().map(|e| e.support.len()).collect();
    let mut next = Some(vec![0usize; sizes.len()]);
    std::iter::from_fn(move || {
        let cur = next.take()?;
        let mut succ = cur.clone();
        let mut k = succ.len();
        next = loop {
            if k == 0 {
                break None;
            }
            k -= 1;
            succ[k] += 1;
            if succ[k] < sizes[k] {
                break Some(succ);
            }
            succ[k] = 0;
        };
        Some(LeadingTermChoice { indices: cur })
    })
}

/// A strict weight order: `w.c >= 1` on the base cone and every chosen
/// leading exponent beats the rest of its support by at least 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightOrder {
    pub w: [BigRational; DIM],
}

impl WeightOrder {
    pub fn weight(&self, v: &IVec) -> BigRational {
        dot(&self.w, v)
    }

    /// Check every defining inequality by substitution.
    pub fn satisfies(&self, pool: &PolynomialPool, choice: &LeadingTermChoice, base: &Cone) -> bool {
        let one = BigRational::one();
        base.generators().iter().all(|g| self.weight(g) >= one)
            && strict_differences(pool, &choice.indices).all(|d| self.weight(&d) >= one)
    }
}

impl fmt::Display for WeightOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = &self.w;
        write!(f, "({a}, {b}, {c}, {d})")
    }
}

impl Serialize for WeightOrder {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.w.each_ref().map(|q| q.to_string()).serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeightOrder {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let parts = <[String; DIM]>::deserialize(d)?;
        let mut w: [BigRational; DIM] = Default::default();
        for (slot, p) in w.iter_mut().zip(&parts) {
            *slot = p.parse().map_err(serde::de::Error::custom)?;
        }
        Ok(WeightOrder { w })
    }
}

/// `m - lt` for every non-chosen `m` of the first `indices.len()` entries.
fn strict_differences<'a>(pool: &'a PolynomialPool, indices: &'a [usize]) -> impl Iterator<Item = IVec> + 'a {
    indices.iter().zip(&pool.entries).flat_map(|(&i, e)| {
        let lt = e.support[i];
        e.support
            .iter()
            .enumerate()
            .filter(move |&(k, _)| k != i)
            .map(move |(_, m)| sub(m, &lt))
    })
}

fn solve_weight(base: &Cone, strict: impl Iterator<Item = IVec>, nonneg: &[IVec]) -> Option<WeightOrder> {
    let mut p = FeasibilityProblem::new_free(DIM);
    for g in base.generators() {
        p.add_int(g, Relation::Ge, 1);
    }
    for d in strict {
        p.add_int(&d, Relation::Ge, 1);
    }
    for b in nonneg {
        p.add_int(b, Relation::Ge, 0);
    }
    let w = solve_feasibility(&p).witness()?.to_vec();
    Some(WeightOrder {
        w: [w[0].clone(), w[1].clone(), w[2].clone(), w[3].clone()],
    })
}

/// A weight realizing `choice` that is strictly positive on `base`, or
/// `None` when the choice is incompatible.
pub fn realize_order(pool: &PolynomialPool, choice: &LeadingTermChoice, base: &Cone) -> Option<WeightOrder> {
    realize_order_with(pool, choice, base, &[])
}

/// As [`realize_order`], additionally requiring `w.b >= 0` for every `b`
/// in `nonneg`.
pub fn realize_order_with(
    pool: &PolynomialPool,
    choice: &LeadingTermChoice,
    base: &Cone,
    nonneg: &[IVec],
) -> Option<WeightOrder> {
    solve_weight(base, strict_differences(pool, &choice.indices), nonneg)
}

/// The realizable choices in lexicographic order, each with its weight.
/// Prefixes that already admit no weight are pruned.
pub fn admissible_choices<'a>(
    pool: &'a PolynomialPool,
    base: &'a Cone,
) -> impl Iterator<Item = (LeadingTermChoice, WeightOrder)> + 'a {
    let n = pool.len();
    let mut stack: Vec<usize> = Vec::with_capacity(n);
    let mut fresh = true;
    std::iter::from_fn(move || loop {
        if !fresh && !next_sibling(pool, &mut stack) {
            return None;
        }
        fresh = false;
        match solve_weight(base, strict_differences(pool, &stack), &[]) {
            None => continue,
            Some(w) if stack.len() == n => {
                return Some((LeadingTermChoice { indices: stack.clone() }, w));
            }
            Some(_) => {
                stack.push(0);
                fresh = true;
            }
        }
    })
}

/// Move to the next prefix after the subtree rooted at `stack`, popping
/// exhausted levels. False once the enumeration is finished.
fn next_sibling(pool: &PolynomialPool, stack: &mut Vec<usize>) -> bool {
    while let Some(last) = stack.pop() {
        if last + 1 < pool.entries[stack.len()].support.len() {
            stack.push(last + 1);
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certifier::base_cone;
    use crate::laurent::parse_polynomial;
    use crate::stepmodel::StepSet;
    use crate::walkgroup::close_group;

    const CERTIFIED_MODEL: &str = "(-1,-1,0),(-1,0,1),(-1,1,-1),(0,-1,1),(0,0,-1),(0,1,0),(1,0,0)";

    fn pool_of(text: &str) -> PolynomialPool {
        let s: StepSet = text.parse().unwrap();
        collect_polynomials(&close_group(&s, 200).unwrap())
    }

    #[test]
    fn certified_model_pool() {
        let pool = pool_of(CERTIFIED_MODEL);
        assert_eq!(pool.len(), 1);
        assert_eq!(pool.entries[0].poly, parse_polynomial("y*z^2 + y^2 + z", 3).unwrap());
        let exps: Vec<Vec<IVec>> = enumerate_choices(&pool).map(|c| c.exponents(&pool)).collect();
        assert_eq!(exps, vec![vec![[0, 0, 1, 0]], vec![[0, 1, 2, 0]], vec![[0, 2, 0, 0]]]);
    }

    #[test]
    fn axis_model_pool_is_empty() {
        let pool = pool_of("(-1,0,0),(1,0,0),(0,-1,0),(0,1,0),(0,0,-1),(0,0,1)");
        assert!(pool.is_empty());
        assert_eq!(enumerate_choices(&pool).count(), 1);
        let w = realize_order(&pool, &LeadingTermChoice { indices: vec![] }, &base_cone()).unwrap();
        assert!(base_cone().generators().iter().all(|g| w.weight(g) >= BigRational::one()));
    }

    #[test]
    fn certified_model_printed_choice_is_realizable() {
        let pool = pool_of(CERTIFIED_MODEL);
        let c = LeadingTermChoice::from_exponents(&pool, &[[0, 1, 2, 0]]).unwrap();
        let w = realize_order(&pool, &c, &base_cone()).unwrap();
        assert!(w.satisfies(&pool, &c, &base_cone()));
        let one = BigRational::one();
        assert!(w.weight(&[0, 1, -2, 0]) >= one);
        assert!(w.weight(&[0, -1, -1, 0]) >= one);
    }

    fn two_entry_pool(a: &str, b: &str) -> PolynomialPool {
        let polys = [a, b].map(|t| parse_polynomial(t, 3).unwrap());
        let entries: Vec<PoolEntry> = polys
            .iter()
            .map(|p| PoolEntry {
                poly: p.clone(),
                support: p.support().map(|e| lift(&e)).collect(),
                used_by: vec![],
            })
            .collect();
        let index = entries.iter().enumerate().map(|(i, e)| (e.poly.clone(), i)).collect();
        PolynomialPool { entries, index }
    }

    #[test]
    fn product_order_and_ranks() {
        let pool = two_entry_pool("1 + x", "1 + y + z");
        let all: Vec<LeadingTermChoice> = enumerate_choices(&pool).collect();
        assert_eq!(all.len(), 6);
        let idx: Vec<Vec<usize>> = all.iter().map(|c| c.indices.clone()).collect();
        assert_eq!(
            idx,
            vec![vec![0, 0], vec![0, 1], vec![0, 2], vec![1, 0], vec![1, 1], vec![1, 2]]
        );
        for (k, c) in all.iter().enumerate() {
            assert_eq!(c.rank(&pool), k as u128);
        }
    }

    #[test]
    fn contradictory_choice_is_incompatible() {
        let pool = two_entry_pool("y + x", "2*y + x");
        let bad = LeadingTermChoice { indices: vec![0, 1] };
        assert!(realize_order(&pool, &bad, &base_cone()).is_none());
        let admissible: Vec<Vec<usize>> = admissible_choices(&pool, &base_cone()).map(|(c, _)| c.indices).collect();
        assert_eq!(admissible, vec![vec![0, 0], vec![1, 1]]);
    }

    #[test]
    fn admissible_matches_filtered_product() {
        let pool = pool_of(CERTIFIED_MODEL);
        let base = base_cone();
        let a: Vec<LeadingTermChoice> = admissible_choices(&pool, &base).map(|(c, _)| c).collect();
        let b: Vec<LeadingTermChoice> = enumerate_choices(&pool)
            .filter(|c| realize_order(&pool, c, &base).is_some())
            .collect();
        assert_eq!(a, b);
    }
}
