mod common;

use common::{any_model, finite_model};
use octant_core::certifier::{certify, verify_certificate, Certificate, CertifyConfig, Verdict};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn certificates_are_deterministic(s in finite_model()) {
        let config = CertifyConfig::default();
        let a = certify(&s, &config).to_json();
        let b = certify(&s, &config).to_json();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(Certificate::from_json(&a).unwrap().to_json(), a);
    }

    #[test]
    fn finite_models_verify(s in finite_model()) {
        let cert = certify(&s, &CertifyConfig::default());
        prop_assert!(matches!(cert.verdict, Verdict::CertifiedDFinite | Verdict::ZeroOrbitSum), "{} {}", s.hex_id(), cert.verdict);
        prop_assert!(verify_certificate(&cert).is_ok());
        if cert.verdict == Verdict::CertifiedDFinite {
            prop_assert_eq!(cert.final_cone_pointed, Some(true));
            prop_assert!(cert.elements.iter().all(|e| e.kernel_trivial && e.hull_pointed && e.disjoint));
        }
    }

    #[test]
    fn arbitrary_models_are_deterministic(s in any_model()) {
        let config = CertifyConfig::default();
        let a = certify(&s, &config);
        prop_assert_eq!(a.to_json(), certify(&s, &config).to_json());
        prop_assert!(verify_certificate(&a).is_ok());
    }
}
