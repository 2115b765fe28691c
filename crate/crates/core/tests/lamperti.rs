use lpopalg::lamperti::{
    build_spatial_isometry, classify_spatial, isometry_distance, lamperti_decompose, SpatialIsometry,
};
use lpopalg::{Exponent, Permutation, SearchConfig, WeightedSpace, C64};
use proptest::prelude::*;

fn spatial(n: usize) -> impl Strategy<Value = (Vec<f64>, Vec<usize>, Vec<f64>)> {
    (
        prop::collection::vec(0.2f64..5.0, n),
        Just((0..n).collect::<Vec<usize>>()).prop_shuffle(),
        prop::collection::vec(0.0f64..std::f64::consts::TAU, n),
    )
}

fn make(space: &WeightedSpace, perm: Vec<usize>, angles: &[f64]) -> SpatialIsometry {
    let phases = angles.iter().map(|&t| C64::from_polar(1.0, t)).collect();
    SpatialIsometry::new(space.clone(), Permutation::new(perm).unwrap(), phases).unwrap()
}

fn exponent() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.0), Just(1.5), Just(3.0), Just(4.0), 1.2f64..5.0]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decompose_inverts_build((w, perm, th) in (1usize..7).prop_flat_map(spatial), p in exponent()) {
        let space = WeightedSpace::new(w).unwrap();
        let si = make(&space, perm, &th);
        let p = Exponent::new(p).unwrap();
        let back = lamperti_decompose(&build_spatial_isometry(&si, p), p, 1e-9).unwrap();
        prop_assert_eq!(&back.perm, &si.perm);
        for (a, b) in back.phases.iter().zip(&si.phases) {
            prop_assert!((a - b).norm() <= 1e-12);
        }
    }

    #[test]
    fn build_is_a_homomorphism(
        (w, p1, t1, p2, t2) in (1usize..6).prop_flat_map(|n| (spatial(n), spatial(n)))
            .prop_map(|((w, p1, t1), (_, p2, t2))| (w, p1, t1, p2, t2)),
        p in exponent(),
    ) {
        let space = WeightedSpace::new(w).unwrap();
        let (a, b) = (make(&space, p1, &t1), make(&space, p2, &t2));
        let p = Exponent::new(p).unwrap();
        let lhs = build_spatial_isometry(&a.compose(&b).unwrap(), p);
        let rhs = build_spatial_isometry(&a, p).compose(&build_spatial_isometry(&b, p)).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12 * (1.0 + lhs.max_abs()));
    }

    #[test]
    fn built_isometries_classify_as_spatial((w, perm, th) in (1usize..6).prop_flat_map(spatial), p in exponent()) {
        let space = WeightedSpace::new(w).unwrap();
        let si = make(&space, perm, &th);
        let p = Exponent::new(p).unwrap();
        let v = classify_spatial(&build_spatial_isometry(&si, p), p, 1e-9).unwrap();
        let q = v.quadruple().expect("spatial");
        prop_assert_eq!(q.domain_set().len(), space.dim());
    }

    #[test]
    fn same_permutation_distance_is_sup_of_phase_gap(
        (w, perm, t1, t2) in (2usize..5).prop_flat_map(|n| (spatial(n), prop::collection::vec(0.0f64..std::f64::consts::TAU, n)))
            .prop_map(|((w, perm, t1), t2)| (w, perm, t1, t2)),
        p in exponent(),
    ) {
        let space = WeightedSpace::new(w).unwrap();
        let (a, b) = (make(&space, perm.clone(), &t1), make(&space, perm, &t2));
        let d = isometry_distance(&a, &b, Exponent::new(p).unwrap(), &SearchConfig::default()).unwrap();
        prop_assert!(d.agrees, "{} vs {}", d.analytic, d.numeric.lower_bound);
    }
}

#[test]
fn distinct_permutations_at_p1_are_at_distance_two() {
    let space = WeightedSpace::new(vec![1.0, 3.0, 0.5]).unwrap();
    let a = make(&space, vec![1, 2, 0], &[0.1, 0.2, 0.3]);
    let b = make(&space, vec![0, 2, 1], &[1.0, 2.0, 3.0]);
    let d = isometry_distance(&a, &b, Exponent::new(1.0).unwrap(), &SearchConfig::default()).unwrap();
    assert!((d.numeric.lower_bound - 2.0).abs() < 1e-9);
    assert!(d.agrees);
}
