mod common;

use common::{any_model, finite_model};
use octant_core::laurent::RationalFunction;
use octant_core::walkgroup::{close_group, generator, step_polynomial, Axis, Word, DEFAULT_GROUP_CAP};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn generators_are_involutions(s in any_model()) {
        prop_assume!(s.axis_usage().all_bidirectional());
        for axis in Axis::ALL {
            let phi = generator(&s, axis).unwrap();
            prop_assert!(phi.compose(&phi).unwrap().is_identity());
        }
    }

    #[test]
    fn step_polynomial_is_invariant(s in any_model()) {
        prop_assume!(s.axis_usage().all_bidirectional());
        let p = RationalFunction::from_poly(step_polynomial(&s));
        for axis in Axis::ALL {
            let phi = generator(&s, axis).unwrap();
            prop_assert_eq!(phi.apply(&step_polynomial(&s)).unwrap(), p.clone());
        }
    }

    #[test]
    fn undefined_generators_are_reported(s in any_model()) {
        let usage = s.axis_usage();
        for axis in Axis::ALL {
            let flags = usage.axes[axis.index()];
            prop_assert_eq!(generator(&s, axis).is_ok(), flags.has_minus && flags.has_plus);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn signs_are_multiplicative(s in finite_model()) {
        let group = close_group(&s, DEFAULT_GROUP_CAP).unwrap();
        prop_assert!(group.is_finite());
        prop_assert_eq!(group.elements.len(), group.order);
        prop_assert!(group.elements[0].map.is_identity());
        for e in &group.elements {
            prop_assert_eq!(e.sign as i32, if e.word.len() % 2 == 0 { 1 } else { -1 });
            if let Some((_, rest)) = e.word.0.split_first() {
                let parent = group.elements.iter().find(|p| p.word == Word(rest.to_vec()));
                prop_assert!(parent.is_some(), "parent of {} missing", e.word);
                prop_assert_eq!(parent.unwrap().sign, -e.sign);
            }
            for axis in Axis::ALL {
                let step = generator(&s, axis).unwrap().compose(&e.map).unwrap();
                let image = group.elements.iter().find(|g| g.map == step);
                prop_assert!(image.is_some(), "group not closed at {}{}", axis.letter(), e.word);
                prop_assert_eq!(image.unwrap().sign, -e.sign);
            }
        }
    }
}
