mod common;

use common::c;
use proptest::prelude::*;
use teich_core::{PowerSeries, C64};

fn series(max_len: usize, scale: f64) -> impl Strategy<Value = PowerSeries> {
    prop::collection::vec((-scale..scale, -scale..scale), 2..max_len)
        .prop_map(|v| PowerSeries::interior(v.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiply_commutes(a in series(24, 1.0), b in series(24, 1.0)) {
        let ab = a.multiply(&b).unwrap().series;
        let ba = b.multiply(&a).unwrap().series;
        prop_assert!(ab.max_coeff_diff(&ba) < 1e-12);
    }

    #[test]
    fn product_matches_pointwise(a in series(16, 1.0), b in series(16, 1.0), x in -0.9..0.9f64, y in -0.4..0.4f64) {
        let n = a.truncation() + b.truncation();
        let ab = a.resized(n).multiply(&b.resized(n)).unwrap().series;
        let z = c(x, y);
        prop_assert!((ab.eval(z) - a.eval(z) * b.eval(z)).norm() < 1e-10);
    }

    #[test]
    fn integrate_then_differentiate(a in series(32, 1.0)) {
        let ia = a.resized(a.truncation() + 1).integrate0().unwrap();
        prop_assert!(ia.dropped == 0.0);
        let ia = ia.series;
        let back = ia.differentiate().unwrap();
        prop_assert!(back.resized(a.truncation()).max_coeff_diff(&a) < 1e-14);
    }

    #[test]
    fn sampling_round_trip(a in series(40, 1.0)) {
        let m = teich_core::series::samples_for(a.truncation());
        let s = a.sample_circle(1.0, m).unwrap();
        let back = PowerSeries::fit_interior(&s, a.truncation()).unwrap();
        prop_assert!(back.max_coeff_diff(&a) < 1e-13);
    }

    #[test]
    fn identity_composition(a in series(24, 1.0)) {
        let id = PowerSeries::identity(a.truncation()).unwrap();
        let out = PowerSeries::compose(&a, &id).unwrap().series;
        prop_assert!(out.max_coeff_diff(&a) < 1e-15);
    }

    #[test]
    fn composition_matches_pointwise(a in series(12, 1.0), b in series(6, 0.1), x in -0.5..0.5f64) {
        let n = 96;
        let mut inner = b.resized(n).into_coeffs();
        inner[0] = C64::new(0.0, 0.0);
        inner[1] += C64::new(0.5, 0.0);
        let inner = PowerSeries::interior(inner).unwrap();
        let out = PowerSeries::compose(&a.resized(n), &inner).unwrap().series;
        let z = c(x, 0.2);
        prop_assert!((out.eval(z) - a.eval(inner.eval(z))).norm() < 1e-11);
    }
}

#[test]
fn exterior_series_evaluates_at_infinity_side() {
    // w + 2 + 3/w
    let s = PowerSeries::exterior(vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]).unwrap();
    let w = c(2.0, 1.0);
    assert!((s.eval(w) - (w + 2.0 + 3.0 / w)).norm() < 1e-15);
    assert!(PowerSeries::compose(&s, &s).is_err());
}
