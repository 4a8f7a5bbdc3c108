//! Rational polyhedral cones in Z^4 and the exact checks run on them.
//!
//! Every predicate reduces to one feasibility problem solved by the exact
//! simplex in [`simplex`].

pub mod simplex;

use std::fmt;

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

pub use simplex::{solve_feasibility, Feasibility, FeasibilityProblem, LinearConstraint, Relation};

/// Ambient dimension: x, y, z and t.
pub const DIM: usize = 4;

pub type IVec = [i64; DIM];

fn q(v: i64) -> BigRational {
    BigRational::from_integer(v.into())
}

fn primitive(v: IVec) -> IVec {
    let g = v.iter().fold(0i64, |g, &c| g.gcd(&c));
    if g <= 1 {
        v
    } else {
        v.map(|c| c / g)
    }
}

/// A cone given by integer generators, kept primitive, deduplicated and
/// sorted so that equal generator sets compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Cone {
    generators: Vec<IVec>,
}

impl Cone {
    pub fn new<I: IntoIterator<Item = IVec>>(gens: I) -> Cone {
        let mut generators: Vec<IVec> = gens
            .into_iter()
            .filter(|g| g.iter().any(|&c| c != 0))
            .map(primitive)
            .collect();
        generators.sort_unstable();
        generators.dedup();
        Cone { generators }
    }

    /// The cone `{0}`.
    pub fn zero() -> Cone {
        Cone { generators: Vec::new() }
    }

    pub fn generators(&self) -> &[IVec] {
        &self.generators
    }

    /// True if the stored generator list is already in canonical form.
    pub fn is_canonical(&self) -> bool {
        *self == Cone::new(self.generators.iter().copied())
    }

    pub fn is_pointed(&self) -> bool {
        is_pointed(self)
    }

    pub fn contains(&self, v: &[BigRational; DIM]) -> bool {
        contains(self, v)
    }

    pub fn contains_int(&self, v: &IVec) -> bool {
        contains(self, &v.map(q))
    }

    /// Image under a linear map.
    pub fn image(&self, m: &LeadingMatrix) -> Cone {
        Cone::new(self.generators.iter().map(|g| m.apply(g)))
    }
}

impl fmt::Display for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<")?;
        for (i, g) in self.generators.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "({},{},{},{})", g[0], g[1], g[2], g[3])?;
        }
        f.write_str(">")
    }
}

/// A 4x4 integer matrix stored by columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LeadingMatrix {
    pub columns: [IVec; DIM],
}

impl LeadingMatrix {
    pub fn identity() -> Self {
        let mut columns = [[0; DIM]; DIM];
        for (i, c) in columns.iter_mut().enumerate() {
            c[i] = 1;
        }
        LeadingMatrix { columns }
    }

    pub fn zero() -> Self {
        LeadingMatrix {
            columns: [[0; DIM]; DIM],
        }
    }

    pub fn from_rows(rows: [IVec; DIM]) -> Self {
        let mut columns = [[0; DIM]; DIM];
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                columns[j][i] = v;
            }
        }
        LeadingMatrix { columns }
    }

    pub fn rows(&self) -> [IVec; DIM] {
        let mut rows = [[0; DIM]; DIM];
        for (j, col) in self.columns.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                rows[i][j] = v;
            }
        }
        rows
    }

    pub fn apply(&self, v: &IVec) -> IVec {
        let mut out = [0; DIM];
        for (col, &k) in self.columns.iter().zip(v) {
            for (o, &c) in out.iter_mut().zip(col) {
                *o += c * k;
            }
        }
        out
    }
}

/// Per-coordinate lower bounds `e_j >= bound_j`; `None` leaves `e_j` free.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub lower: [Option<i64>; DIM],
}

impl Region {
    /// `x >= 1, y >= 1, z >= 1, t >= 0`: the monomials kept by positive-part
    /// extraction.
    pub fn positivity() -> Self {
        Region {
            lower: [Some(1), Some(1), Some(1), Some(0)],
        }
    }

    pub fn contains(&self, v: &IVec) -> bool {
        self.lower
            .iter()
            .zip(v)
            .all(|(b, &c)| b.is_none_or(|b| c >= b))
    }
}

/// Nonnegative combination weights `lambda` with `sum(lambda) = 1` and
/// `A * sum(lambda_i g_i) = 0` for a row-map `A`.
fn normalized_combination_problem(gens: &[IVec], map: impl Fn(&IVec) -> IVec) -> FeasibilityProblem {
    let n = gens.len();
    let mut p = FeasibilityProblem::new(n);
    let images: Vec<IVec> = gens.iter().map(map).collect();
    for k in 0..DIM {
        let row: Vec<i64> = images.iter().map(|g| g[k]).collect();
        if row.iter().any(|&c| c != 0) {
            p.add_int(&row, Relation::Eq, 0);
        }
    }
    p.add_int(&vec![1; n], Relation::Eq, 1);
    p
}

/// No line through the origin lies in `c`: no nonnegative, normalized
/// combination of the generators vanishes.
pub fn is_pointed(c: &Cone) -> bool {
    if c.generators.is_empty() {
        return true;
    }
    let p = normalized_combination_problem(&c.generators, |g| *g);
    !solve_feasibility(&p).is_feasible()
}

/// A rational functional strictly positive (at least 1) on every generator,
/// if one exists. Exists exactly when `c` is pointed.
pub fn separating_functional(c: &Cone) -> Option<[BigRational; DIM]> {
    let mut p = FeasibilityProblem::new_free(DIM);
    for g in &c.generators {
        p.add_int(g, Relation::Ge, 1);
    }
    match solve_feasibility(&p) {
        Feasibility::Feasible(w) => Some([w[0].clone(), w[1].clone(), w[2].clone(), w[3].clone()]),
        Feasibility::Infeasible => None,
    }
}

/// `c ∩ ker(m) = {0}`. Meaningful for pointed `c`.
pub fn kernel_meets_trivially(c: &Cone, m: &LeadingMatrix) -> bool {
    if c.generators.is_empty() {
        return true;
    }
    let p = normalized_combination_problem(&c.generators, |g| m.apply(g));
    !solve_feasibility(&p).is_feasible()
}

pub fn hull(a: &Cone, b: &Cone) -> Cone {
    Cone::new(a.generators.iter().chain(&b.generators).copied())
}

/// `v` is a nonnegative combination of the generators of `c`.
pub fn contains(c: &Cone, v: &[BigRational; DIM]) -> bool {
    if v.iter().all(|x| x.is_zero()) {
        return true;
    }
    let n = c.generators.len();
    let mut p = FeasibilityProblem::new(n);
    for k in 0..DIM {
        p.add(
            c.generators.iter().map(|g| q(g[k])).collect(),
            Relation::Eq,
            v[k].clone(),
        );
    }
    solve_feasibility(&p).is_feasible()
}

/// The rational polyhedron `v0 + c` misses `region`.
pub fn shifted_region_disjoint(v0: &IVec, c: &Cone, region: &Region) -> bool {
    shifted_region_witness(v0, c, region).is_none()
}

/// A rational point of `(v0 + c) ∩ region`, if any.
pub fn shifted_region_witness(v0: &IVec, c: &Cone, region: &Region) -> Option<[BigRational; DIM]> {
    let n = c.generators.len();
    let mut p = FeasibilityProblem::new(n);
    for k in 0..DIM {
        if let Some(b) = region.lower[k] {
            let row: Vec<i64> = c.generators.iter().map(|g| g[k]).collect();
            p.add_int(&row, Relation::Ge, b - v0[k]);
        }
    }
    let lambda = solve_feasibility(&p).witness()?.to_vec();
    Some(point_of(v0, c, &lambda))
}

/// The rational polyhedron `v0 + c` misses the cone `target`.
pub fn shifted_cone_disjoint(v0: &IVec, c: &Cone, target: &Cone) -> bool {
    shifted_cone_witness(v0, c, target).is_none()
}

/// A rational point of `(v0 + c) ∩ target`, if any.
pub fn shifted_cone_witness(v0: &IVec, c: &Cone, target: &Cone) -> Option<[BigRational; DIM]> {
    // v0 + sum lambda_i g_i - sum mu_j h_j = 0
    let n = c.generators.len();
    let m = target.generators.len();
    let mut p = FeasibilityProblem::new(n + m);
    for k in 0..DIM {
        let row: Vec<i64> = c
            .generators
            .iter()
            .map(|g| g[k])
            .chain(target.generators.iter().map(|h| -h[k]))
            .collect();
        p.add_int(&row, Relation::Eq, -v0[k]);
    }
    let x = solve_feasibility(&p).witness()?.to_vec();
    Some(point_of(v0, c, &x[..n]))
}

fn point_of(v0: &IVec, c: &Cone, lambda: &[BigRational]) -> [BigRational; DIM] {
    let mut pt = v0.map(q);
    for (g, l) in c.generators.iter().zip(lambda) {
        for k in 0..DIM {
            pt[k] += l * q(g[k]);
        }
    }
    pt
}

/// Dot product of a rational functional with an integer vector.
pub fn dot(w: &[BigRational; DIM], v: &IVec) -> BigRational {
    w.iter()
        .zip(v)
        .fold(BigRational::zero(), |acc, (a, &b)| acc + a * q(b))
}

pub fn unit(k: usize) -> IVec {
    let mut v = [0; DIM];
    v[k] = 1;
    v
}
