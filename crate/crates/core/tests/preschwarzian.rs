mod common;

use common::c;
use proptest::prelude::*;
use teich_core::norms::LadderVerdict;
use teich_core::preschwarzian::*;
use teich_core::PowerSeries;

fn small_poly(v: Vec<(f64, f64)>) -> PowerSeries {
    // f(z) = z + sum_{k>=2} c_k z^k with sum k|c_k| < 1, hence univalent
    let mut coeffs = vec![c(0.0, 0.0), c(1.0, 0.0)];
    let raw: Vec<_> = v.into_iter().map(|(a, b)| c(a, b)).collect();
    let slope: f64 = raw.iter().enumerate().map(|(k, a)| (k + 2) as f64 * a.norm()).sum();
    let s = if slope > 0.5 { 0.5 / slope } else { 1.0 };
    coeffs.extend(raw.into_iter().map(|a| a * s));
    coeffs.resize(48, c(0.0, 0.0));
    PowerSeries::interior(coeffs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn chi_round_trip(v in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..5), d in (0.2..2.0f64, -1.0..1.0f64)) {
        let f = small_poly(v).scaled(c(d.0, d.1));
        let coords = chi(&f).unwrap();
        let back = chi_inverse_with_loss(&coords).unwrap();
        // the tail of A(f) decays geometrically, loss is below round-off at 48 terms
        prop_assert!(back.f.max_coeff_diff(&f) < 1e-9, "{}", back.f.max_coeff_diff(&f));
        prop_assert!((coords.d - f.coeff(1)).norm() == 0.0);
    }

    #[test]
    fn pre_schwarzian_is_scale_invariant(v in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..5), s in 0.1..5.0f64) {
        let f = small_poly(v);
        let a = pre_schwarzian(&f).unwrap();
        let b = pre_schwarzian(&f.scaled(c(s, 0.0))).unwrap();
        prop_assert!(a.max_coeff_diff(&b) < 1e-12);
    }

    #[test]
    fn transfer_rule_matches_direct(v in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..4), hc in (-0.2..0.2f64, -0.2..0.2f64)) {
        // h(w) = w + hc w^2 on a disc containing f(D)
        let f = small_poly(v).scaled(c(0.5, 0.0));
        let n = f.truncation();
        let h = PowerSeries::interior(vec![c(0.0, 0.0), c(1.0, 0.0), c(hc.0, hc.1)]).unwrap();
        let a_h = pre_schwarzian(&h.resized(n + 2)).unwrap();
        let hf = PowerSeries::compose(&h.resized(n), &f).unwrap().series;
        let direct = pre_schwarzian(&hf).unwrap();
        let via = transfer_compose(&a_h, &f).unwrap();
        prop_assert!(via.resized(n - 2).max_coeff_diff(&direct.resized(n - 2)) < 1e-9);
    }
}

#[test]
fn pre_schwarzian_of_koebe() {
    // k = z/(1-z)^2, k''/k' = (2z + 4)/(1 - z^2)
    let n = 40;
    let k = PowerSeries::interior((0..n).map(|j| c(j as f64, 0.0)).collect()).unwrap();
    let a = pre_schwarzian(&k).unwrap();
    for j in 0..n - 2 {
        let expected = if j % 2 == 0 { 4.0 } else { 2.0 };
        assert!((a.coeff(j) - c(expected, 0.0)).norm() < 1e-9, "{j}: {}", a.coeff(j));
    }
}

#[test]
fn membership_rejects_unnormalized_and_splits_examples() {
    let shifted = PowerSeries::interior(vec![c(0.1, 0.0), c(1.0, 0.0)]).unwrap();
    assert!(pre_schwarzian(&shifted).is_err());
    let poly = small_poly(vec![(0.2, 0.1), (0.0, 0.05)]);
    assert_eq!(oqco_membership(&poly).unwrap().verdict, LadderVerdict::Member);
    let koebe = PowerSeries::interior((0..600).map(|j| c(j as f64, 0.0)).collect()).unwrap();
    assert_eq!(oqco_membership(&koebe).unwrap().verdict, LadderVerdict::Diverging);
}

#[test]
fn univalence_check_flags_critical_point() {
    // z + z^2 has f'(-1/2) = 0 inside the disc
    let good = small_poly(vec![(0.3, 0.0)]);
    assert!(univalence_check(&good, 256).unwrap().passed());
    let bad = PowerSeries::interior(vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
    assert!(!univalence_check(&bad, 256).unwrap().passed());
}
