//! Group discovery by evaluating the generators over GF(2^61 - 1).
//!
//! Each group element is tracked only through its value at one random
//! point. Distinct values prove distinct maps, so running past the cap here
//! already establishes that the group is larger than the cap. A finite
//! outcome is only a candidate and is confirmed with exact arithmetic.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::stepmodel::StepSet;

const P: u64 = (1 << 61) - 1;

#[inline]
fn reduce(x: u128) -> u64 {
    let lo = (x as u64) & P;
    let hi = (x >> 61) as u64;
    let s = lo + hi;
    let s = (s & P) + (s >> 61);
    if s >= P {
        s - P
    } else {
        s
    }
}

#[inline]
fn mul(a: u64, b: u64) -> u64 {
    reduce(a as u128 * b as u128)
}

#[inline]
fn add(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= P {
        s - P
    } else {
        s
    }
}

fn pow(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, a);
        }
        a = mul(a, a);
        e >>= 1;
    }
    r
}

fn inv(a: u64) -> u64 {
    pow(a, P - 2)
}

/// The section sums of one generator, as polynomials in the two fixed
/// coordinates with exponents shifted into {0,1,2}.
#[derive(Clone, Copy)]
struct Sections {
    minus: [[u8; 3]; 3],
    plus: [[u8; 3]; 3],
}

fn sections(s: &StepSet) -> [Sections; 3] {
    let mut out = [Sections {
        minus: [[0; 3]; 3],
        plus: [[0; 3]; 3],
    }; 3];
    for step in s.steps() {
        let c = step.components();
        for axis in 0..3 {
            let (b, d) = others(axis);
            let (i, j) = ((c[b] + 1) as usize, (c[d] + 1) as usize);
            match c[axis] {
                -1 => out[axis].minus[i][j] += 1,
                1 => out[axis].plus[i][j] += 1,
                _ => {}
            }
        }
    }
    out
}

pub(crate) fn others(axis: usize) -> (usize, usize) {
    match axis {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

fn eval_section(coeffs: &[[u8; 3]; 3], u: [u64; 3], v: [u64; 3]) -> u64 {
    let mut acc = 0;
    for i in 0..3 {
        for j in 0..3 {
            if coeffs[i][j] != 0 {
                acc = add(acc, mul(coeffs[i][j] as u64, mul(u[i], v[j])));
            }
        }
    }
    acc
}

/// Apply generator `axis` to a point; `None` on a pole or a zero coordinate.
fn apply(sec: &Sections, axis: usize, p: [u64; 3]) -> Option<[u64; 3]> {
    let (b, d) = others(axis);
    let u = [1, p[b], mul(p[b], p[b])];
    let v = [1, p[d], mul(p[d], p[d])];
    let a = eval_section(&sec.minus, u, v);
    let bsum = eval_section(&sec.plus, u, v);
    let den = mul(p[axis], bsum);
    if a == 0 || den == 0 {
        return None;
    }
    let mut q = p;
    q[axis] = mul(a, inv(den));
    Some(q)
}

/// A point with each coordinate held as a fraction `num/den`, so that
/// generators apply without field inversions.
type Projective = [(u64, u64); 3];

fn eval_section_projective(coeffs: &[[u8; 3]; 3], u: (u64, u64), v: (u64, u64)) -> u64 {
    let up = [mul(u.1, u.1), mul(u.0, u.1), mul(u.0, u.0)];
    let vp = [mul(v.1, v.1), mul(v.0, v.1), mul(v.0, v.0)];
    eval_section(coeffs, up, vp)
}

/// The common denominators of both sections cancel, leaving
/// `x' = den(x) A~ / (num(x) B~)` with homogenized sections.
fn apply_projective(sec: &Sections, axis: usize, p: Projective) -> Option<Projective> {
    let (b, d) = others(axis);
    let a = eval_section_projective(&sec.minus, p[b], p[d]);
    let bsum = eval_section_projective(&sec.plus, p[b], p[d]);
    let num = mul(p[axis].1, a);
    let den = mul(p[axis].0, bsum);
    if num == 0 || den == 0 {
        return None;
    }
    let mut q = p;
    q[axis] = (num, den);
    Some(q)
}

fn same_point(p: &Projective, q: &Projective) -> bool {
    p.iter().zip(q).all(|(a, b)| mul(a.0, b.1) == mul(b.0, a.1))
}

/// True when some rotation `phi_a ∘ phi_b` moves a random point for
/// `cap / 2` consecutive powers. The dihedral subgroup it generates then has
/// order above `cap`, so the whole group does.
pub(crate) fn some_rotation_exceeds(s: &StepSet, cap: usize, seed: u64) -> bool {
    let sec = sections(s);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let start: Projective = [0; 3].map(|_| (rng.gen_range(2..P), 1));
    for (a, b) in [(0, 1), (0, 2), (1, 2)] {
        let mut p = start;
        let mut returned = false;
        for _ in 0..cap / 2 {
            let Some(q) = apply_projective(&sec[b], b, p).and_then(|q| apply_projective(&sec[a], a, q)) else {
                returned = true;
                break;
            };
            p = q;
            if same_point(&p, &start) {
                returned = true;
                break;
            }
        }
        if !returned {
            return true;
        }
    }
    false
}

/// BFS skeleton of the Cayley graph under left multiplication by generators.
#[derive(Debug, Clone)]
pub(crate) struct Discovery {
    /// `(parent, generator)` for every element except the identity at 0.
    pub parents: Vec<Option<(usize, usize)>>,
    pub depth: Vec<u32>,
    /// `neighbors[i][a]` is the index of `phi_a ∘ element_i`.
    pub neighbors: Vec<[usize; 3]>,
}

pub(crate) enum Outcome {
    Finite(Discovery),
    CapExceeded(usize),
}

pub(crate) fn discover(s: &StepSet, cap: usize, seed: u64) -> Outcome {
    let sec = sections(s);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    'restart: loop {
        let start = [rng.gen_range(2..P), rng.gen_range(2..P), rng.gen_range(2..P)];
        let mut index: HashMap<[u64; 3], usize> = HashMap::new();
        let mut points = vec![start];
        let mut parents = vec![None];
        let mut depth = vec![0u32];
        let mut neighbors: Vec<[usize; 3]> = Vec::new();
        index.insert(start, 0);

        let mut i = 0;
        while i < points.len() {
            let mut nb = [usize::MAX; 3];
            for (axis, slot) in nb.iter_mut().enumerate() {
                let Some(q) = apply(&sec[axis], axis, points[i]) else {
                    continue 'restart;
                };
                *slot = match index.get(&q) {
                    Some(&j) => j,
                    None => {
                        let j = points.len();
                        if j >= cap {
                            return Outcome::CapExceeded(j + 1);
                        }
                        index.insert(q, j);
                        points.push(q);
                        parents.push(Some((i, axis)));
                        depth.push(depth[i] + 1);
                        j
                    }
                };
            }
            neighbors.push(nb);
            i += 1;
        }
        return Outcome::Finite(Discovery {
            parents,
            depth,
            neighbors,
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_arithmetic() {
        let a = 123456789012345678 % P;
        assert_eq!(mul(a, inv(a)), 1);
        assert_eq!(reduce((P as u128) * 3 + 5), 5);
        assert_eq!(add(P - 1, 2), 1);
    }

    #[test]
    fn axis_model_has_order_eight() {
        let s: StepSet = "(-1,0,0),(1,0,0),(0,-1,0),(0,1,0),(0,0,-1),(0,0,1)".parse().unwrap();
        match discover(&s, 200, 7) {
            Outcome::Finite(d) => assert_eq!(d.depth.len(), 8),
            Outcome::CapExceeded(_) => panic!("finite group expected"),
        }
        assert!(!some_rotation_exceeds(&s, 200, 7));
    }

    #[test]
    fn rotation_test_agrees_with_discovery() {
        for id in (1..(1u32 << 26)).step_by(9973).take(400) {
            let s = StepSet::from_id(id).unwrap();
            if !s.axis_usage().all_bidirectional() {
                continue;
            }
            if some_rotation_exceeds(&s, 40, 3) {
                assert!(matches!(discover(&s, 40, 3), Outcome::CapExceeded(_)), "{}", s.hex_id());
            }
        }
    }
}
