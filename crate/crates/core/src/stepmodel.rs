//! Octant stepsets: encoding, parsing, canonical forms and enumeration.
//!
//! A model is a nonempty subset of `{-1,0,1}^3 \ {(0,0,0)}`. It is encoded
//! as a 26-bit id whose bit `k` marks the `k`-th triple in lexicographic
//! order over `(dx, dy, dz)`, with the origin skipped. Bit 0 is
//! `(-1,-1,-1)` and bit 25 is `(1,1,1)`.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Number of admissible steps.
pub const NUM_STEPS: usize = 26;

/// Largest valid model id (all 26 steps).
pub const MAX_ID: u32 = (1 << NUM_STEPS) - 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepParseError {
    #[error("the origin (0,0,0) is not a step")]
    ZeroStep,
    #[error("step component {0} is not in {{-1,0,1}}")]
    OutOfRange(i64),
    #[error("step {0} listed twice")]
    Duplicate(Step),
    #[error("empty stepset")]
    Empty,
    #[error("bad stepset syntax: {0}")]
    BadSyntax(String),
}

/// A single unit step `(dx, dy, dz)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Step {
    pub dx: i8,
    pub dy: i8,
    pub dz: i8,
}

impl Step {
    pub fn new(dx: i8, dy: i8, dz: i8) -> Result<Self, StepParseError> {
        for c in [dx, dy, dz] {
            if !(-1..=1).contains(&c) {
                return Err(StepParseError::OutOfRange(c as i64));
            }
        }
        if (dx, dy, dz) == (0, 0, 0) {
            return Err(StepParseError::ZeroStep);
        }
        Ok(Step { dx, dy, dz })
    }

    pub fn components(self) -> [i8; 3] {
        [self.dx, self.dy, self.dz]
    }

    /// Position of this step in the id bit order.
    pub fn bit(self) -> u32 {
        let t = (self.dx + 1) as u32 * 9 + (self.dy + 1) as u32 * 3 + (self.dz + 1) as u32;
        if t < 13 {
            t
        } else {
            t - 1
        }
    }

    pub fn from_bit(bit: u32) -> Step {
        assert!(bit < NUM_STEPS as u32, "step bit out of range");
        let t = if bit < 13 { bit } else { bit + 1 };
        Step {
            dx: (t / 9) as i8 - 1,
            dy: ((t / 3) % 3) as i8 - 1,
            dz: (t % 3) as i8 - 1,
        }
    }

    fn permuted(self, perm: [usize; 3]) -> Step {
        let c = self.components();
        Step {
            dx: c[perm[0]],
            dy: c[perm[1]],
            dz: c[perm[2]],
        }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.dx, self.dy, self.dz)
    }
}

/// A model, stored as its 26-bit id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StepSet {
    id: u32,
}

impl StepSet {
    pub fn from_id(id: u32) -> Result<Self, StepParseError> {
        if id == 0 {
            return Err(StepParseError::Empty);
        }
        if id > MAX_ID {
            return Err(StepParseError::BadSyntax(format!(
                "id {id:#x} exceeds 26 bits"
            )));
        }
        Ok(StepSet { id })
    }

    pub fn from_steps<I: IntoIterator<Item = Step>>(steps: I) -> Result<Self, StepParseError> {
        let mut id = 0u32;
        for s in steps {
            let b = 1u32 << s.bit();
            if id & b != 0 {
                return Err(StepParseError::Duplicate(s));
            }
            id |= b;
        }
        StepSet::from_id(id)
    }

    pub fn id(&self) -> u32 {
        self.id
    }

    /// Id as `0x`-prefixed, zero-padded, 7-digit lowercase hex.
    pub fn hex_id(&self) -> String {
        format!("0x{:07x}", self.id)
    }

    pub fn len(&self) -> usize {
        self.id.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.id == 0
    }

    pub fn contains(&self, step: Step) -> bool {
        self.id & (1 << step.bit()) != 0
    }

    /// Steps in id bit order (lexicographic).
    pub fn steps(&self) -> impl Iterator<Item = Step> + '_ {
        (0..NUM_STEPS as u32)
            .filter(move |b| self.id & (1 << b) != 0)
            .map(Step::from_bit)
    }

    pub fn axis_usage(&self) -> AxisUsage {
        let mut axes = [AxisFlags::default(); 3];
        for s in self.steps() {
            for (axis, c) in s.components().into_iter().enumerate() {
                match c {
                    -1 => axes[axis].has_minus = true,
                    1 => axes[axis].has_plus = true,
                    _ => {}
                }
            }
        }
        AxisUsage { axes }
    }

    /// The image under one of the six coordinate permutations.
    pub fn permuted(&self, perm_index: usize) -> StepSet {
        StepSet {
            id: PERM_TABLES.apply(perm_index, self.id),
        }
    }

    /// Representative with minimal id among the six coordinate permutations.
    pub fn axis_canonical(&self) -> StepSet {
        StepSet {
            id: canonical_id(self.id),
        }
    }

    pub fn is_canonical(&self) -> bool {
        canonical_id(self.id) == self.id
    }

    /// Number of distinct models in the S_3 orbit of this one.
    pub fn orbit_size(&self) -> usize {
        let mut ids: Vec<u32> = (0..6).map(|p| self.permuted(p).id).collect();
        ids.sort_unstable();
        ids.dedup();
        ids.len()
    }
}

impl fmt::Display for StepSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.steps().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromStr for StepSet {
    type Err = StepParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_stepset(s)
    }
}

impl Serialize for StepSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.hex_id())
    }
}

impl<'de> Deserialize<'de> for StepSet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_stepset(&text).map_err(serde::de::Error::custom)
    }
}

/// Accepts `(a,b,c),(d,e,f),...` (whitespace allowed) or `0x`-prefixed hex.
pub fn parse_stepset(text: &str) -> Result<StepSet, StepParseError> {
    let text = text.trim();
    if let Some(hex) = text.strip_prefix("0x").or_else(|| text.strip_prefix("0X")) {
        let id = u32::from_str_radix(hex, 16)
            .map_err(|e| StepParseError::BadSyntax(format!("{text:?}: {e}")))?;
        return StepSet::from_id(id);
    }
    if text.is_empty() {
        return Err(StepParseError::Empty);
    }

    let bad = |msg: &str| StepParseError::BadSyntax(format!("{msg} in {text:?}"));
    let mut steps = Vec::new();
    let mut rest = text;
    loop {
        rest = rest.trim_start();
        rest = rest.strip_prefix('(').ok_or_else(|| bad("expected '('"))?;
        let close = rest.find(')').ok_or_else(|| bad("unclosed '('"))?;
        let inner = &rest[..close];
        rest = &rest[close + 1..];

        let comps = inner
            .split(',')
            .map(|c| {
                c.trim()
                    .parse::<i64>()
                    .map_err(|_| bad("expected an integer"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if comps.len() != 3 {
            return Err(bad("expected three components"));
        }
        for &c in &comps {
            if !(-1..=1).contains(&c) {
                return Err(StepParseError::OutOfRange(c));
            }
        }
        steps.push(Step::new(comps[0] as i8, comps[1] as i8, comps[2] as i8)?);

        rest = rest.trim_start();
        if rest.is_empty() {
            break;
        }
        rest = rest.strip_prefix(',').ok_or_else(|| bad("expected ','"))?;
    }
    StepSet::from_steps(steps)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxisFlags {
    pub has_minus: bool,
    pub has_plus: bool,
}

/// Per-axis record of which directions occur, indexed x, y, z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxisUsage {
    pub axes: [AxisFlags; 3],
}

impl AxisUsage {
    pub fn x(&self) -> AxisFlags {
        self.axes[0]
    }
    pub fn y(&self) -> AxisFlags {
        self.axes[1]
    }
    pub fn z(&self) -> AxisFlags {
        self.axes[2]
    }

    /// Every axis has both a minus-step and a plus-step. This is the
    /// necessary condition used as the three-dimensionality filter.
    pub fn all_bidirectional(&self) -> bool {
        self.axes.iter().all(|a| a.has_minus && a.has_plus)
    }
}

pub fn axis_usage(s: &StepSet) -> AxisUsage {
    s.axis_usage()
}

pub fn axis_canonical(s: &StepSet) -> StepSet {
    s.axis_canonical()
}

/// Canonical models in `range` satisfying `predicate`, in increasing id order.
pub fn enumerate_models<P>(range: RangeInclusive<u32>, predicate: P) -> impl Iterator<Item = StepSet>
where
    P: Fn(&StepSet) -> bool,
{
    let lo = (*range.start()).max(1);
    let hi = (*range.end()).min(MAX_ID);
    (lo..=hi)
        .filter(|&id| canonical_id(id) == id)
        .map(|id| StepSet { id })
        .filter(move |s| predicate(s))
}

/// The six permutations of (x, y, z); index 0 is the identity.
pub const PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

// Bit images are applied through byte-sized lookup tables, since the census
// canonicalizes every id in the full range.
struct PermTables {
    chunks: [[[u32; 256]; 4]; 6],
}

impl PermTables {
    fn build() -> Self {
        let mut chunks = [[[0u32; 256]; 4]; 6];
        for (p, perm) in PERMUTATIONS.iter().enumerate() {
            let image: Vec<u32> = (0..NUM_STEPS as u32)
                .map(|b| Step::from_bit(b).permuted(*perm).bit())
                .collect();
            for (c, table) in chunks[p].iter_mut().enumerate() {
                for (byte, slot) in table.iter_mut().enumerate() {
                    let mut out = 0u32;
                    for k in 0..8 {
                        let bit = c * 8 + k;
                        if bit < NUM_STEPS && byte & (1 << k) != 0 {
                            out |= 1 << image[bit];
                        }
                    }
                    *slot = out;
                }
            }
        }
        PermTables { chunks }
    }

    #[inline]
    fn apply(&self, p: usize, id: u32) -> u32 {
        let t = &self.chunks[p];
        t[0][(id & 0xff) as usize]
            | t[1][((id >> 8) & 0xff) as usize]
            | t[2][((id >> 16) & 0xff) as usize]
            | t[3][((id >> 24) & 0xff) as usize]
    }
}

static PERM_TABLES: std::sync::LazyLock<PermTables> = std::sync::LazyLock::new(PermTables::build);

fn canonical_id(id: u32) -> u32 {
    (1..6).fold(id, |m, p| m.min(PERM_TABLES.apply(p, id)))
}

#[cfg(test)]
mod tests {
    use super::*;

    const CERTIFIED_MODEL: &str = "(-1,-1,0),(-1,0,1),(-1,1,-1),(0,-1,1),(0,0,-1),(0,1,0),(1,0,0)";

    #[test]
    fn bit_order_is_lexicographic() {
        assert_eq!(Step::from_bit(0), Step::new(-1, -1, -1).unwrap());
        assert_eq!(Step::from_bit(12), Step::new(0, 0, -1).unwrap());
        assert_eq!(Step::from_bit(13), Step::new(0, 0, 1).unwrap());
        assert_eq!(Step::from_bit(25), Step::new(1, 1, 1).unwrap());
        for b in 0..26 {
            assert_eq!(Step::from_bit(b).bit(), b);
        }
        let steps: Vec<Step> = (0..26).map(Step::from_bit).collect();
        assert!(steps.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn parses_single_step() {
        let s = parse_stepset("(1,0,0)").unwrap();
        assert_eq!(s.len(), 1);
        assert!(s.contains(Step::new(1, 0, 0).unwrap()));
    }

    #[test]
    fn parses_example_model() {
        let s = parse_stepset(CERTIFIED_MODEL).unwrap();
        assert_eq!(s.len(), 7);
        assert_eq!(s.to_string(), CERTIFIED_MODEL);
        let spaced = parse_stepset(" (1, 0, 0) , (0,1,0),(-1,-1,0),(0,0,-1),(0,-1,1),(-1,1,-1),(-1,0,1)").unwrap();
        assert_eq!(spaced, s);
    }

    #[test]
    fn parse_errors() {
        assert_eq!(parse_stepset("(0,0,0)"), Err(StepParseError::ZeroStep));
        assert_eq!(parse_stepset("(2,0,0)"), Err(StepParseError::OutOfRange(2)));
        assert!(matches!(
            parse_stepset("(1,0,0),(1,0,0)"),
            Err(StepParseError::Duplicate(_))
        ));
        assert_eq!(parse_stepset(""), Err(StepParseError::Empty));
        assert_eq!(parse_stepset("0x0"), Err(StepParseError::Empty));
        assert!(matches!(parse_stepset("(1,0)"), Err(StepParseError::BadSyntax(_))));
        assert!(matches!(parse_stepset("(1,0,0"), Err(StepParseError::BadSyntax(_))));
        assert!(matches!(parse_stepset("(1,0,0)(0,1,0)"), Err(StepParseError::BadSyntax(_))));
        assert!(matches!(parse_stepset("0x4000000"), Err(StepParseError::BadSyntax(_))));
    }

    #[test]
    fn hex_round_trip() {
        let s = parse_stepset(CERTIFIED_MODEL).unwrap();
        let hex = s.hex_id();
        assert_eq!(hex.len(), 9);
        assert_eq!(parse_stepset(&hex).unwrap(), s);
        assert_eq!(StepSet::from_id(1).unwrap().hex_id(), "0x0000001");
    }

    #[test]
    fn canonical_of_symmetric_set_is_itself() {
        let s = parse_stepset("(1,0,0),(0,1,0),(0,0,1)").unwrap();
        assert_eq!(s.axis_canonical(), s);
        assert_eq!(s.orbit_size(), 1);
    }

    #[test]
    fn canonical_of_single_step_matches_brute_force() {
        let s = parse_stepset("(0,0,1)").unwrap();
        // The three axis steps (1,0,0), (0,1,0), (0,0,1) have bits 21, 15, 13.
        let brute = [
            "(1,0,0)", "(0,1,0)", "(0,0,1)",
        ]
        .iter()
        .map(|t| parse_stepset(t).unwrap())
        .min_by_key(|s| s.id())
        .unwrap();
        assert_eq!(s.axis_canonical(), brute);
        assert_eq!(brute.to_string(), "(0,0,1)");
    }

    #[test]
    fn axis_usage_examples() {
        let u = parse_stepset(CERTIFIED_MODEL).unwrap().axis_usage();
        assert!(u.all_bidirectional());

        let u = parse_stepset("(1,0,0)").unwrap().axis_usage();
        assert_eq!(u.x(), AxisFlags { has_minus: false, has_plus: true });
        assert_eq!(u.y(), AxisFlags::default());
        assert_eq!(u.z(), AxisFlags::default());

        let u = parse_stepset("(-1,0,0),(1,0,0)").unwrap().axis_usage();
        assert_eq!(u.x(), AxisFlags { has_minus: true, has_plus: true });
        assert!(!u.all_bidirectional());
    }

    #[test]
    fn enumerate_first_id() {
        let v: Vec<_> = enumerate_models(1..=1, |_| true).collect();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].id(), 1);
    }

    #[test]
    fn enumeration_is_increasing_and_canonical() {
        let v: Vec<_> = enumerate_models(1..=5000, |_| true).collect();
        assert!(v.windows(2).all(|w| w[0].id() < w[1].id()));
        assert!(v.iter().all(|s| s.is_canonical()));
        let again: Vec<_> = enumerate_models(1..=5000, |_| true).collect();
        assert_eq!(v, again);
    }
}
