mod common;

use common::q;
use octant_core::geometry::{
    dot, hull, is_pointed, separating_functional, shifted_cone_disjoint, shifted_cone_witness, shifted_region_disjoint,
    shifted_region_witness, solve_feasibility, Cone, Feasibility, FeasibilityProblem, IVec, Region, Relation,
};
use octant_core::certifier::base_cone;
use proptest::prelude::*;

fn vector() -> impl Strategy<Value = IVec> {
    [-3i64..=3, -3i64..=3, -3i64..=3, -3i64..=3].prop_filter("nonzero", |v| v.iter().any(|&x| x != 0))
}

fn cone(max: usize) -> impl Strategy<Value = Vec<IVec>> {
    prop::collection::vec(vector(), 1..=max)
}

fn relation() -> impl Strategy<Value = Relation> {
    prop_oneof![Just(Relation::Le), Just(Relation::Ge), Just(Relation::Eq)]
}

fn problem() -> impl Strategy<Value = FeasibilityProblem> {
    (1usize..=4).prop_flat_map(|n| {
        (
            prop::collection::vec(any::<bool>(), n),
            prop::collection::vec((prop::collection::vec(-3i64..=3, n), relation(), -4i64..=4), 1..=4),
        )
            .prop_map(move |(free, rows)| {
                let mut p = FeasibilityProblem::new(n);
                for (i, f) in free.into_iter().enumerate() {
                    p.set_free(i, f);
                }
                for (row, rel, rhs) in rows {
                    p.add_int(&row, rel, rhs);
                }
                p
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn pointedness_duality(gens in cone(6)) {
        let c = Cone::new(gens.clone());
        let w = separating_functional(&c);
        prop_assert_eq!(is_pointed(&c), w.is_some());
        if let Some(w) = w {
            for g in &gens {
                prop_assert!(dot(&w, g) >= q(1));
            }
        }
        let doubled = Cone::new(gens.iter().chain(gens.iter().map(|g| g.map(|x| -x)).collect::<Vec<_>>().iter()).copied());
        prop_assert!(!is_pointed(&doubled));
    }

    #[test]
    fn feasibility_witnesses_verify(p in problem()) {
        match solve_feasibility(&p) {
            Feasibility::Feasible(x) => {
                prop_assert_eq!(x.len(), p.num_vars());
                prop_assert!(p.is_satisfied_by(&x));
            }
            Feasibility::Infeasible => {
                let mut relaxed = FeasibilityProblem::new_free(p.num_vars());
                for c in p.constraints() {
                    relaxed.add(c.coeffs.clone(), c.relation, c.rhs.clone());
                }
                if let Feasibility::Feasible(x) = solve_feasibility(&relaxed) {
                    prop_assert!(relaxed.is_satisfied_by(&x));
                }
            }
        }
    }

    #[test]
    fn scaling_constraints_preserves_feasibility(p in problem(), k in 1i64..5) {
        let mut scaled = FeasibilityProblem::new(p.num_vars());
        for c in p.constraints() {
            scaled.add(c.coeffs.iter().map(|a| a * q(k)).collect(), c.relation, &c.rhs * q(k));
        }
        let mut unfree = FeasibilityProblem::new(p.num_vars());
        for c in p.constraints() {
            unfree.add(c.coeffs.clone(), c.relation, c.rhs.clone());
        }
        prop_assert_eq!(solve_feasibility(&unfree).is_feasible(), solve_feasibility(&scaled).is_feasible());
    }

    #[test]
    fn monotone_disjointness(gens in cone(5), keep in 1usize..=5, v0 in [-3i64..=3, -3i64..=3, -3i64..=3, -3i64..=3]) {
        let big = Cone::new(gens.clone());
        let small = Cone::new(gens.iter().take(keep).copied());
        let region = Region::positivity();
        if shifted_region_disjoint(&v0, &big, &region) {
            prop_assert!(shifted_region_disjoint(&v0, &small, &region));
        }
        if let Some(pt) = shifted_region_witness(&v0, &small, &region) {
            prop_assert!(shifted_region_witness(&v0, &big, &region).is_some());
            for k in 0..3 {
                prop_assert!(pt[k] >= q(1));
            }
            prop_assert!(pt[3] >= q(0));
        }
        let target = base_cone();
        if shifted_cone_disjoint(&v0, &big, &target) {
            prop_assert!(shifted_cone_disjoint(&v0, &small, &target));
        }
        if let Some(pt) = shifted_cone_witness(&v0, &small, &target) {
            prop_assert!(target.contains(&pt));
            let rel = [&pt[0] - q(v0[0]), &pt[1] - q(v0[1]), &pt[2] - q(v0[2]), &pt[3] - q(v0[3])];
            prop_assert!(small.contains(&rel));
        }
    }

    #[test]
    fn hull_contains_both(a in cone(4), b in cone(4)) {
        let (ca, cb) = (Cone::new(a.clone()), Cone::new(b.clone()));
        let h = hull(&ca, &cb);
        for g in a.iter().chain(&b) {
            prop_assert!(h.contains_int(g));
        }
        prop_assert_eq!(&h, &hull(&cb, &ca));
        if is_pointed(&h) {
            prop_assert!(is_pointed(&ca) && is_pointed(&cb));
        }
        let one = [q(1), q(0), q(0), q(0)];
        if ca.contains(&one) {
            prop_assert!(h.contains(&one));
        }
        prop_assert!(h.is_canonical());
    }
}
