use lpopalg::lpcore::{clarkson_check, duality_map, vec_norm};
use lpopalg::{Exponent, LpVector, WeightedSpace, C64};
use proptest::prelude::*;

fn exponent() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.0), Just(1.5), Just(2.0), Just(3.0), Just(4.0), 1.0f64..6.0]
}

fn vector(n: usize) -> impl Strategy<Value = (Vec<f64>, Vec<C64>)> {
    (
        prop::collection::vec(0.25f64..4.0, n),
        prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0).prop_map(|(a, b)| C64::new(a, b)), n),
    )
}

fn pair() -> impl Strategy<Value = (Vec<f64>, Vec<C64>, Vec<C64>)> {
    (1usize..7).prop_flat_map(|n| {
        (vector(n), prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), n))
            .prop_map(|((w, x), y)| (w, x, y.into_iter().map(|(a, b)| C64::new(a, b)).collect()))
    })
}

proptest! {
    #[test]
    fn triangle_and_homogeneity((w, x, y) in pair(), p in exponent(), c in -4.0f64..4.0) {
        let s = WeightedSpace::new(w).unwrap();
        let (x, y) = (LpVector::new(s.clone(), x).unwrap(), LpVector::new(s, y).unwrap());
        let p = Exponent::new(p).unwrap();
        let sum = vec_norm(&x.add(&y).unwrap(), p);
        prop_assert!(sum <= vec_norm(&x, p) + vec_norm(&y, p) + 1e-9);
        let scaled = vec_norm(&x.scale(C64::new(c, 0.0)), p);
        prop_assert!((scaled - c.abs() * vec_norm(&x, p)).abs() <= 1e-9 * (1.0 + scaled));
    }

    #[test]
    fn holder_and_duality_map((w, x, y) in pair(), p in prop_oneof![Just(1.5), Just(2.0), Just(3.0), 1.05f64..6.0]) {
        let s = WeightedSpace::new(w).unwrap();
        let (x, y) = (LpVector::new(s.clone(), x).unwrap(), LpVector::new(s, y).unwrap());
        let p = Exponent::new(p).unwrap();
        let q = p.dual().unwrap();
        let nx = vec_norm(&x, p);
        prop_assert!(x.pairing(&y).unwrap().norm() <= nx * vec_norm(&y, q) * (1.0 + 1e-9) + 1e-12);
        // J(x) attains Hölder: ⟨x, J(x)⟩ = ‖x‖^p and ‖J(x)‖_{p'} = ‖x‖^{p-1}
        let j = duality_map(&x, p);
        let pv = p.value();
        prop_assert!((x.pairing(&j).unwrap() - C64::new(nx.powf(pv), 0.0)).norm() <= 1e-9 * (1.0 + nx.powf(pv)));
        prop_assert!((vec_norm(&j, q) - nx.powf(pv - 1.0)).abs() <= 1e-9 * (1.0 + nx.powf(pv - 1.0)));
    }

    #[test]
    fn clarkson_direction((w, x, y) in pair(), p in prop_oneof![Just(1.0), Just(1.5), Just(3.0), Just(4.0)]) {
        let s = WeightedSpace::new(w).unwrap();
        let (x, y) = (LpVector::new(s.clone(), x).unwrap(), LpVector::new(s, y).unwrap());
        let rec = clarkson_check(&x, &y, Exponent::new(p).unwrap(), 1e-9).unwrap();
        prop_assert!(rec.holds);
        if x.disjoint_from(&y) {
            prop_assert!(rec.equality);
        }
    }
}

#[test]
fn clarkson_at_two_is_the_parallelogram_law() {
    let s = WeightedSpace::new(vec![1.0, 2.0, 0.5]).unwrap();
    let x = LpVector::from_real(s.clone(), &[1.0, -2.0, 3.0]).unwrap();
    let y = LpVector::from_real(s, &[0.5, 4.0, -1.0]).unwrap();
    let rec = clarkson_check(&x, &y, Exponent::new(2.0).unwrap(), 1e-12).unwrap();
    assert!(rec.equality);
}
