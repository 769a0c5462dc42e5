#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use teich_core::homeo::CircleHomeo;
use teich_core::rigged::{BorderedSphere, RiggedSphere};
use teich_core::{PowerSeries, C64};

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Trigonometric displacement with `sup |u| <= 0.1` and `sum k |coef| <= 0.5`.
pub fn perturbation(seed: u64) -> CircleHomeo {
    let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
    let modes = rng.random_range(1..=4usize);
    let coef: Vec<[f64; 2]> = (0..modes).map(|_| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]).collect();
    let abs: f64 = coef.iter().map(|[a, b]| a.abs() + b.abs()).sum();
    let slope: f64 = coef.iter().enumerate().map(|(k, [a, b])| (k + 1) as f64 * (a.abs() + b.abs())).sum();
    let scale = (0.1 * rng.random_range(0.3..1.0) / abs).min(0.5 / slope);
    let u = move |t: f64| -> f64 {
        coef.iter()
            .enumerate()
            .map(|(k, [a, b])| scale * (a * ((k + 1) as f64 * t).cos() + b * ((k + 1) as f64 * t).sin()))
            .sum()
    };
    CircleHomeo::from_fn(u, 8).unwrap()
}

pub fn perturbation_family(n: usize) -> Vec<CircleHomeo> {
    (0..n as u64).map(perturbation).collect()
}

/// Polynomial with Gaussian-sized coefficients of degree `deg`.
pub fn random_poly(rng: &mut ChaCha8Rng, deg: usize) -> PowerSeries {
    let mut coeffs: Vec<C64> = (0..=deg).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    coeffs.resize(coeffs.len().max(2), c(0.0, 0.0));
    PowerSeries::interior(coeffs).unwrap()
}

/// Two affine caps near `-0.6` and `0.7` with small analytic riggings.
pub fn two_cap_sphere(seed: u64) -> RiggedSphere {
    let mut rng = ChaCha8Rng::seed_from_u64(2000 + seed);
    let cap = |rng: &mut ChaCha8Rng, center: C64| {
        let r = rng.random_range(0.25..0.4);
        let shift = c(rng.random_range(-0.05..0.05), rng.random_range(-0.05..0.05));
        let rot = C64::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU));
        PowerSeries::interior(vec![center + shift, rot]).unwrap()
    };
    let caps = vec![cap(&mut rng, c(-0.6, 0.0)), cap(&mut rng, c(0.7, 0.1))];
    let riggings = vec![perturbation(100 + 2 * seed), perturbation(101 + 2 * seed)];
    RiggedSphere::new(BorderedSphere::new(caps).unwrap(), riggings).unwrap()
}

/// `1 / (sqrt|log(1-t)| (1 - t^2 z^2))` truncated at `n`.
pub fn log_weighted_family(t: f64, n: usize) -> PowerSeries {
    let s = 1.0 / (1.0 - t).ln().abs().sqrt();
    let coeffs = (0..n).map(|k| if k % 2 == 0 { c(s * t.powi(k as i32), 0.0) } else { c(0.0, 0.0) }).collect();
    PowerSeries::interior(coeffs).unwrap()
}
