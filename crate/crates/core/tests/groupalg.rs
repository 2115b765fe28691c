use lpopalg::groupalg::{
    conv_matrix, duality_check, fp_lambda_norm, hom_decompose, z2_norm, FiniteGroup, GroupFunction, HomCandidate,
};
use lpopalg::opnorm::spectral_norm;
use lpopalg::suite::Z2_ONE_MINUS_I_P4;
use lpopalg::{Exponent, SearchConfig, C64};
use proptest::prelude::*;
use rand::SeedableRng;

fn group() -> impl Strategy<Value = FiniteGroup> {
    prop_oneof![
        Just(FiniteGroup::cyclic(2)),
        Just(FiniteGroup::cyclic(3)),
        Just(FiniteGroup::from_name("Z2xZ2").unwrap()),
        Just(FiniteGroup::symmetric3()),
    ]
}

fn function() -> impl Strategy<Value = GroupFunction> {
    (group(), any::<u64>())
        .prop_map(|(g, seed)| GroupFunction::random(&g, &mut rand_chacha::ChaCha8Rng::seed_from_u64(seed)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn norm_between_l2_and_l1(f in function(), p in prop_oneof![Just(1.5), Just(3.0), Just(4.0)]) {
        let v = fp_lambda_norm(&f, Exponent::new(p).unwrap(), &SearchConfig::default()).unwrap().lower_bound;
        let two = spectral_norm(conv_matrix(&f).matrix());
        prop_assert!(v <= f.l1_norm() + 1e-9);
        prop_assert!(v >= two - 1e-9);
    }

    #[test]
    fn dual_exponent_agrees(f in function(), p in prop_oneof![Just(1.5), Just(3.0), Just(4.0)]) {
        let r = duality_check(&f, Exponent::new(p).unwrap(), &SearchConfig::default()).unwrap();
        prop_assert!(r.transpose_exact);
        prop_assert!(r.agrees, "difference {}", r.difference);
    }

    #[test]
    fn decompose_recovers_phase_homomorphisms(k in 0usize..4, p in prop_oneof![Just(1.5), Just(3.0)]) {
        // g ↦ i^{kg} is a character of Z4, θ = id
        let z4 = FiniteGroup::cyclic(4);
        let gamma: Vec<C64> = (0..4).map(|g| C64::new(0.0, 1.0).powi((k * g) as i32)).collect();
        let h = HomCandidate::from_data(&z4, &z4, &[0, 1, 2, 3], &gamma).unwrap();
        let d = hom_decompose(&h, Exponent::new(p).unwrap(), 1e-9).unwrap();
        prop_assert_eq!(d.theta, vec![0, 1, 2, 3]);
        prop_assert_eq!(d.gamma, gamma);
    }
}

#[test]
fn z2_p4_matches_frozen_reference() {
    let v = z2_norm(
        C64::new(1.0, 0.0),
        C64::new(0.0, -1.0),
        Exponent::new(4.0).unwrap(),
        &SearchConfig::default(),
    )
    .unwrap()
    .lower_bound;
    assert!((v - Z2_ONE_MINUS_I_P4).abs() < 1e-6);
    assert!(v > 1.0 && v < 2f64.sqrt());
}

#[test]
fn z2_norm_is_symmetric_under_duality() {
    // p and its conjugate exponent give the same value for this element
    let cfg = SearchConfig::default();
    let (a, b) = (C64::new(1.0, 0.0), C64::new(0.0, -1.0));
    let v4 = z2_norm(a, b, Exponent::new(4.0).unwrap(), &cfg).unwrap().lower_bound;
    let v43 = z2_norm(a, b, Exponent::new(4.0 / 3.0).unwrap(), &cfg)
        .unwrap()
        .lower_bound;
    assert!((v4 - v43).abs() < 1e-8);
}
