//! Exact phase-one simplex over the rationals with Bland's rule.
//!
//! Only feasibility is decided. The systems built by the cone engine have a
//! few rows and at most a few hundred columns, so a dense tableau is fine.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub coeffs: Vec<BigRational>,
    pub relation: Relation,
    pub rhs: BigRational,
}

impl LinearConstraint {
    pub fn holds_at(&self, x: &[BigRational]) -> bool {
        let lhs = self
            .coeffs
            .iter()
            .zip(x)
            .fold(BigRational::zero(), |acc, (a, v)| acc + a * v);
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Ge => lhs >= self.rhs,
            Relation::Eq => lhs == self.rhs,
        }
    }
}

/// Linear equalities and inequalities over `num_vars` unknowns, each either
/// nonnegative or free.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityProblem {
    num_vars: usize,
    free: Vec<bool>,
    constraints: Vec<LinearConstraint>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    Feasible(Vec<BigRational>),
    Infeasible,
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }

    pub fn witness(&self) -> Option<&[BigRational]> {
        match self {
            Feasibility::Feasible(w) => Some(w),
            Feasibility::Infeasible => None,
        }
    }
}

impl FeasibilityProblem {
    /// All unknowns nonnegative.
    pub fn new(num_vars: usize) -> Self {
        FeasibilityProblem {
            num_vars,
            free: vec![false; num_vars],
            constraints: Vec::new(),
        }
    }

    /// All unknowns unrestricted in sign.
    pub fn new_free(num_vars: usize) -> Self {
        FeasibilityProblem {
            num_vars,
            free: vec![true; num_vars],
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn set_free(&mut self, var: usize, free: bool) {
        self.free[var] = free;
    }

    pub fn add(&mut self, coeffs: Vec<BigRational>, relation: Relation, rhs: BigRational) {
        assert_eq!(coeffs.len(), self.num_vars, "constraint width");
        self.constraints.push(LinearConstraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn add_int(&mut self, coeffs: &[i64], relation: Relation, rhs: i64) {
        self.add(
            coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect(),
            relation,
            BigRational::from_integer(rhs.into()),
        );
    }

    /// Every constraint and sign restriction holds at `x`.
    pub fn is_satisfied_by(&self, x: &[BigRational]) -> bool {
        x.len() == self.num_vars
            && x.iter().zip(&self.free).all(|(v, &f)| f || !v.is_negative())
            && self.constraints.iter().all(|c| c.holds_at(x))
    }
}

/// Decide feasibility exactly. A returned witness always satisfies the
/// problem; this is asserted before returning.
pub fn solve_feasibility(problem: &FeasibilityProblem) -> Feasibility {
    // Column layout: structural columns (free unknowns split into a +/- pair),
    // then one slack or surplus per inequality, then artificials.
    let mut structural: Vec<(usize, bool)> = Vec::new();
    for (v, &free) in problem.free.iter().enumerate() {
        structural.push((v, false));
        if free {
            structural.push((v, true));
        }
    }
    let ns = structural.len();
    let m = problem.constraints.len();
    let n_slack = problem
        .constraints
        .iter()
        .filter(|c| c.relation != Relation::Eq)
        .count();

    let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(m);
    let mut rhs: Vec<BigRational> = Vec::with_capacity(m);
    let mut basis: Vec<usize> = Vec::with_capacity(m);
    let mut needs_artificial: Vec<bool> = Vec::with_capacity(m);
    let mut slack_col = ns;
    for c in &problem.constraints {
        let flip = c.rhs.is_negative();
        let mut row = vec![BigRational::zero(); ns + n_slack];
        for (j, &(v, neg)) in structural.iter().enumerate() {
            let a = &c.coeffs[v];
            if a.is_zero() {
                continue;
            }
            let a = if neg != flip { -a.clone() } else { a.clone() };
            row[j] = a;
        }
        let relation = match (c.relation, flip) {
            (Relation::Le, true) => Relation::Ge,
            (Relation::Ge, true) => Relation::Le,
            (r, _) => r,
        };
        let mut artificial = true;
        match relation {
            Relation::Le => {
                row[slack_col] = BigRational::from_integer(1.into());
                basis.push(slack_col);
                artificial = false;
                slack_col += 1;
            }
            Relation::Ge => {
                row[slack_col] = BigRational::from_integer((-1).into());
                slack_col += 1;
            }
            Relation::Eq => {}
        }
        if artificial {
            basis.push(usize::MAX);
        }
        needs_artificial.push(artificial);
        rows.push(row);
        rhs.push(if flip { -c.rhs.clone() } else { c.rhs.clone() });
    }

    let n_art = needs_artificial.iter().filter(|&&a| a).count();
    let ncols = ns + n_slack + n_art;
    let mut art_col = ns + n_slack;
    for (i, row) in rows.iter_mut().enumerate() {
        row.resize(ncols, BigRational::zero());
        if needs_artificial[i] {
            row[art_col] = BigRational::from_integer(1.into());
            basis[i] = art_col;
            art_col += 1;
        }
    }

    // Reduced costs of the phase-one objective (sum of artificials).
    let mut cost = vec![BigRational::zero(); ncols];
    let mut objective = BigRational::zero();
    for i in 0..m {
        if needs_artificial[i] {
            for j in 0..ns + n_slack {
                if !rows[i][j].is_zero() {
                    cost[j] -= &rows[i][j];
                }
            }
            objective += &rhs[i];
        }
    }

    loop {
        let Some(enter) = (0..ncols).find(|&j| cost[j].is_negative()) else {
            break;
        };
        let mut leave: Option<(usize, BigRational)> = None;
        for i in 0..m {
            let a = &rows[i][enter];
            if !a.is_positive() {
                continue;
            }
            let ratio = &rhs[i] / a;
            let better = match &leave {
                None => true,
                Some((l, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*l]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        let Some((r, _)) = leave else {
            // Unbounded direction: impossible for phase one, whose objective
            // is bounded below by zero.
            unreachable!("phase-one objective is bounded");
        };

        let pivot = rows[r][enter].clone();
        for v in rows[r].iter_mut() {
            if !v.is_zero() {
                *v /= &pivot;
            }
        }
        rhs[r] /= &pivot;
        let prow = rows[r].clone();
        let prhs = rhs[r].clone();
        for i in 0..m {
            if i == r || rows[i][enter].is_zero() {
                continue;
            }
            let f = rows[i][enter].clone();
            for (v, p) in rows[i].iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
            rhs[i] -= &f * &prhs;
        }
        if !cost[enter].is_zero() {
            let f = cost[enter].clone();
            for (v, p) in cost.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
            objective += &f * &prhs;
        }
        basis[r] = enter;
    }

    if objective.is_positive() {
        return Feasibility::Infeasible;
    }
    let mut x = vec![BigRational::zero(); problem.num_vars];
    for (i, &b) in basis.iter().enumerate() {
        if b < ns {
            let (v, neg) = structural[b];
            if neg {
                x[v] -= &rhs[i];
            } else {
                x[v] += &rhs[i];
            }
        }
    }
    assert!(
        problem.is_satisfied_by(&x),
        "simplex witness fails substitution check"
    );
    Feasibility::Feasible(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn single_equality() {
        let mut p = FeasibilityProblem::new(1);
        p.add_int(&[1], Relation::Eq, 1);
        assert_eq!(solve_feasibility(&p), Feasibility::Feasible(vec![q(1)]));
    }

    #[test]
    fn negative_bound_is_infeasible() {
        let mut p = FeasibilityProblem::new(1);
        p.add_int(&[1], Relation::Le, -1);
        assert_eq!(solve_feasibility(&p), Feasibility::Infeasible);
    }

    #[test]
    fn free_variables() {
        let mut p = FeasibilityProblem::new_free(2);
        p.add_int(&[1, 1], Relation::Eq, -3);
        p.add_int(&[1, -1], Relation::Ge, 1);
        let w = solve_feasibility(&p);
        assert!(p.is_satisfied_by(w.witness().unwrap()));
    }

    #[test]
    fn contradictory_strict_pair() {
        let mut p = FeasibilityProblem::new_free(2);
        p.add_int(&[1, -1], Relation::Ge, 1);
        p.add_int(&[-1, 1], Relation::Ge, 1);
        assert_eq!(solve_feasibility(&p), Feasibility::Infeasible);
    }

    #[test]
    fn degenerate_system_terminates() {
        // Classic cycling example for the largest-coefficient rule.
        let mut p = FeasibilityProblem::new(4);
        let half = BigRational::new(1.into(), 2.into());
        let rows = [
            vec![half.clone(), q(-11) / q(2), q(-5) / q(2), q(9)],
            vec![half.clone(), q(-3) / q(2), -half.clone(), q(1)],
            vec![q(1), q(0), q(0), q(0)],
        ];
        p.add(rows[0].clone(), Relation::Le, q(0));
        p.add(rows[1].clone(), Relation::Le, q(0));
        p.add(rows[2].clone(), Relation::Le, q(1));
        p.add(vec![q(10), q(-57), q(-9), q(-24)], Relation::Ge, q(1));
        let r = solve_feasibility(&p);
        if let Some(w) = r.witness() {
            assert!(p.is_satisfied_by(w));
        }
    }
}
