mod common;

use common::any_model;
use octant_core::stepmodel::{StepSet, PERMUTATIONS};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn id_round_trip(s in any_model()) {
        prop_assert_eq!(StepSet::from_id(s.id()).unwrap(), s);
        prop_assert_eq!(s.hex_id().parse::<StepSet>().unwrap(), s);
        prop_assert_eq!(s.to_string().parse::<StepSet>().unwrap(), s);
        prop_assert_eq!(StepSet::from_steps(s.steps()).unwrap(), s);
        prop_assert_eq!(s.steps().count(), s.len());
    }

    #[test]
    fn canonical_form_is_orbit_minimum(s in any_model()) {
        let c = s.axis_canonical();
        prop_assert!(c.is_canonical());
        prop_assert_eq!(c.axis_canonical(), c);
        for k in 0..PERMUTATIONS.len() {
            let p = s.permuted(k);
            prop_assert_eq!(p.axis_canonical(), c);
            prop_assert!(c.id() <= p.id());
            prop_assert_eq!(p.len(), s.len());
        }
        prop_assert_eq!(6 % s.orbit_size(), 0);
    }
}
