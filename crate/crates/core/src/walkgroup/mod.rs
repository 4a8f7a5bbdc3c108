//! The group of a model: generators, closure, signs and the orbit sum.

mod modular;

use std::collections::HashMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::laurent::{Exponent, LaurentError, LaurentPolynomial, RationalFunction};
use crate::stepmodel::StepSet;

/// Cap on the group order used when none is configured.
pub const DEFAULT_GROUP_CAP: usize = 200;

const DISCOVERY_SEED: u64 = 0x6f63_7461_6e74;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WalkGroupError {
    #[error("generator for axis {0} is undefined: the model lacks a minus-step or a plus-step on it")]
    GeneratorUndefined(Axis),
    #[error("element {word} is reached by words of both parities")]
    ParityConflict { word: Word, other: Word },
    #[error(transparent)]
    Laurent(#[from] LaurentError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn letter(self) -> char {
        ['x', 'y', 'z'][self.index()]
    }

    pub fn from_letter(c: char) -> Option<Axis> {
        match c {
            'x' => Some(Axis::X),
            'y' => Some(Axis::Y),
            'z' => Some(Axis::Z),
            _ => None,
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// A word in the generators, read as a composition: `zyz` is
/// `phi_z ∘ phi_y ∘ phi_z`. The empty word is the identity.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<Axis>);

impl Word {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn parse(text: &str) -> Option<Word> {
        if text == "id" {
            return Some(Word::default());
        }
        text.chars().map(Axis::from_letter).collect::<Option<Vec<_>>>().map(Word)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("id");
        }
        for a in &self.0 {
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        Word::parse(&text).ok_or_else(|| serde::de::Error::custom(format!("bad word {text:?}")))
    }
}

/// A rational self-map of (x, y, z), given by the images of the variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalMap {
    pub images: [RationalFunction; 3],
}

impl RationalMap {
    pub fn identity() -> Self {
        RationalMap {
            images: [0, 1, 2].map(|v| RationalFunction::var(v, 3)),
        }
    }

    /// `self ∘ inner`: substitute `inner`'s images into `self`.
    pub fn compose(&self, inner: &RationalMap) -> Result<RationalMap, LaurentError> {
        let [a, b, c] = &self.images;
        Ok(RationalMap {
            images: [
                a.compose(&inner.images)?,
                b.compose(&inner.images)?,
                c.compose(&inner.images)?,
            ],
        })
    }

    /// Action on a polynomial: `p(g(x), g(y), g(z))`.
    pub fn apply(&self, p: &LaurentPolynomial) -> Result<RationalFunction, LaurentError> {
        p.substitute(&self.images)
    }

    /// `g(x) g(y) g(z)`.
    pub fn xyz_image(&self) -> RationalFunction {
        let [a, b, c] = &self.images;
        a.checked_mul(b)
            .and_then(|ab| ab.checked_mul(c))
            .expect("images share dimension")
    }

    pub fn is_identity(&self) -> bool {
        *self == RationalMap::identity()
    }
}

impl fmt::Display for RationalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = &self.images;
        write!(f, "[{a}, {b}, {c}]")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupElement {
    pub map: RationalMap,
    pub word: Word,
    pub sign: i8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupStatus {
    Finite,
    CapExceeded,
}

#[derive(Debug, Clone)]
pub struct GroupResult {
    pub status: GroupStatus,
    /// BFS order, identity first. Empty unless `status` is `Finite`.
    pub elements: Vec<GroupElement>,
    /// Exact order when finite; otherwise a lower bound exceeding the cap.
    pub order: usize,
}

impl GroupResult {
    pub fn is_finite(&self) -> bool {
        self.status == GroupStatus::Finite
    }

    pub fn non_identity(&self) -> impl Iterator<Item = &GroupElement> {
        self.elements.iter().skip(1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitSum {
    pub value: RationalFunction,
    pub is_zero: bool,
}

/// `P_S = sum over steps of x^u y^v z^w`.
pub fn step_polynomial(s: &StepSet) -> LaurentPolynomial {
    LaurentPolynomial::from_int_terms(
        3,
        s.steps()
            .map(|st| ([st.dx as i32, st.dy as i32, st.dz as i32], 1)),
    )
}

/// The involution fixing `P_S` and the two other coordinates.
pub fn generator(s: &StepSet, axis: Axis) -> Result<RationalMap, WalkGroupError> {
    let a = axis.index();
    let (b, c) = modular::others(a);
    let mut minus = LaurentPolynomial::zero(3);
    let mut plus = LaurentPolynomial::zero(3);
    for st in s.steps() {
        let comps = st.components();
        let mut e = Exponent::ZERO;
        e.0[b] = comps[b] as i32;
        e.0[c] = comps[c] as i32;
        match comps[a] {
            -1 => minus.add_term(e, BigRational::one()),
            1 => plus.add_term(e, BigRational::one()),
            _ => {}
        }
    }
    if minus.is_zero() || plus.is_zero() {
        return Err(WalkGroupError::GeneratorUndefined(axis));
    }
    let den = plus.shifted(Exponent::unit(a));
    let mut images = RationalMap::identity().images;
    images[a] = RationalFunction::new(minus, den)?;
    Ok(RationalMap { images })
}

pub fn generators(s: &StepSet) -> Result<[RationalMap; 3], WalkGroupError> {
    Ok([
        generator(s, Axis::X)?,
        generator(s, Axis::Y)?,
        generator(s, Axis::Z)?,
    ])
}

/// Left-compose a generator: only one coordinate changes.
fn apply_generator(gen: &RationalMap, axis: usize, inner: &RationalMap) -> Result<RationalMap, LaurentError> {
    let mut images = inner.images.clone();
    images[axis] = gen.images[axis].compose(&inner.images)?;
    Ok(RationalMap { images })
}

fn word_from_parents(parents: &[Option<(usize, usize)>], mut i: usize) -> Word {
    let mut w = Vec::new();
    while let Some((p, a)) = parents[i] {
        w.push(Axis::ALL[a]);
        i = p;
    }
    Word(w)
}

struct Closure {
    maps: Vec<RationalMap>,
    parents: Vec<Option<(usize, usize)>>,
    depth: Vec<u32>,
    neighbors: Vec<[usize; 3]>,
}

/// Rebuild the candidate from modular discovery exactly and check every
/// Cayley edge and pairwise distinctness.
fn confirm(gens: &[RationalMap; 3], d: modular::Discovery) -> Result<Option<Closure>, LaurentError> {
    let n = d.depth.len();
    let mut maps: Vec<RationalMap> = Vec::with_capacity(n);
    maps.push(RationalMap::identity());
    for i in 1..n {
        let (p, a) = d.parents[i].expect("non-identity element has a parent");
        if p >= i {
            return Ok(None);
        }
        let m = apply_generator(&gens[a], a, &maps[p])?;
        maps.push(m);
    }
    let mut seen: HashMap<&RationalMap, usize> = HashMap::with_capacity(n);
    for (i, m) in maps.iter().enumerate() {
        if seen.insert(m, i).is_some() {
            return Ok(None);
        }
    }
    for (i, nb) in d.neighbors.iter().enumerate() {
        for (a, &j) in nb.iter().enumerate() {
            if d.parents[j] == Some((i, a)) {
                continue;
            }
            let m = apply_generator(&gens[a], a, &maps[i])?;
            if m != maps[j] {
                return Ok(None);
            }
        }
    }
    Ok(Some(Closure {
        maps,
        parents: d.parents,
        depth: d.depth,
        neighbors: d.neighbors,
    }))
}

/// Exact BFS with deduplication on canonical normal forms.
fn exact_closure(gens: &[RationalMap; 3], cap: usize) -> Result<Option<Closure>, LaurentError> {
    let mut maps = vec![RationalMap::identity()];
    let mut index: HashMap<RationalMap, usize> = HashMap::new();
    index.insert(maps[0].clone(), 0);
    let mut parents = vec![None];
    let mut depth = vec![0u32];
    let mut neighbors = Vec::new();
    let mut i = 0;
    while i < maps.len() {
        let mut nb = [0usize; 3];
        for (a, slot) in nb.iter_mut().enumerate() {
            let m = apply_generator(&gens[a], a, &maps[i])?;
            *slot = match index.get(&m) {
                Some(&j) => j,
                None => {
                    let j = maps.len();
                    if j >= cap {
                        return Ok(None);
                    }
                    index.insert(m.clone(), j);
                    maps.push(m);
                    parents.push(Some((i, a)));
                    depth.push(depth[i] + 1);
                    j
                }
            };
        }
        neighbors.push(nb);
        i += 1;
    }
    Ok(Some(Closure {
        maps,
        parents,
        depth,
        neighbors,
    }))
}

/// Close the group generated by the three generators of `s`.
///
/// Elements are found by BFS over left composition with the generators;
/// each keeps its BFS-first word and the sign `(-1)^len(word)`. A rotation
/// `phi_a ∘ phi_b` of order above `cap / 2` rejects early. Discovery runs
/// over a prime field; a finite candidate is then rebuilt and checked edge
/// by edge with exact rational arithmetic.
pub fn close_group(s: &StepSet, cap: usize) -> Result<GroupResult, WalkGroupError> {
    assert!(cap >= 1, "group cap must be positive");
    if modular::some_rotation_exceeds(s, cap, DISCOVERY_SEED) {
        return Ok(GroupResult {
            status: GroupStatus::CapExceeded,
            elements: Vec::new(),
            order: 2 * (cap / 2 + 1),
        });
    }
    let gens = generators(s)?;
    close_group_with(s, &gens, cap)
}

pub fn close_group_with(s: &StepSet, gens: &[RationalMap; 3], cap: usize) -> Result<GroupResult, WalkGroupError> {
    assert!(cap >= 1, "group cap must be positive");
    let closure = match modular::discover(s, cap, DISCOVERY_SEED) {
        modular::Outcome::CapExceeded(seen) => {
            return Ok(GroupResult {
                status: GroupStatus::CapExceeded,
                elements: Vec::new(),
                order: seen,
            })
        }
        modular::Outcome::Finite(d) => match confirm(gens, d)? {
            Some(c) => Some(c),
            None => exact_closure(gens, cap)?,
        },
    };
    let Some(c) = closure else {
        return Ok(GroupResult {
            status: GroupStatus::CapExceeded,
            elements: Vec::new(),
            order: cap + 1,
        });
    };

    for (i, nb) in c.neighbors.iter().enumerate() {
        for &j in nb {
            if c.depth[i] % 2 == c.depth[j] % 2 {
                return Err(WalkGroupError::ParityConflict {
                    word: word_from_parents(&c.parents, j),
                    other: word_from_parents(&c.parents, i),
                });
            }
        }
    }

    let elements: Vec<GroupElement> = c
        .maps
        .into_iter()
        .enumerate()
        .map(|(i, map)| {
            let word = word_from_parents(&c.parents, i);
            let sign = if word.len() % 2 == 0 { 1 } else { -1 };
            GroupElement { map, word, sign }
        })
        .collect();
    Ok(GroupResult {
        status: GroupStatus::Finite,
        order: elements.len(),
        elements,
    })
}

/// `sum over g of sgn(g) g(x) g(y) g(z)`.
pub fn orbit_sum(group: &GroupResult) -> OrbitSum {
    assert!(group.is_finite(), "orbit sum needs a finite group");
    let mut value = RationalFunction::zero(3);
    for g in &group.elements {
        let term = g.map.xyz_image();
        let term = if g.sign < 0 { term.neg() } else { term };
        value = value.checked_add(&term).expect("same dimension");
    }
    OrbitSum {
        is_zero: value.is_zero(),
        value,
    }
}
