//! Riemann maps of starlike analytic Jordan domains (Theodorsen iteration) and
//! the capping step that re-uniformizes a sphere after a disc is replaced.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homeo::{invert_homeo, CircleHomeo};
use crate::series::{analyze, synthesize, PowerSeries, C64};
use crate::welding::{weld, welding_residual, WeldOptions, WeldingPair};

use std::f64::consts::{PI, TAU};

/// Periodic complex function known through its Fourier coefficients.
#[derive(Clone, Debug)]
pub struct TrigSeries {
    /// `(frequency, coefficient)` pairs above the noise floor.
    modes: Vec<(f64, C64)>,
}

impl TrigSeries {
    /// Interpolant of equispaced samples on `[0, 2 pi)`.
    pub fn from_samples(values: &[C64]) -> Self {
        let m = values.len();
        let spec = analyze(values);
        let scale = spec.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut modes = Vec::new();
        for (k, c) in spec.into_iter().enumerate() {
            // Nyquist mode split evenly so real data stays real
            let (freq, c) = if 2 * k == m {
                modes.push((-(k as f64), c * 0.5));
                (k as f64, c * 0.5)
            } else if 2 * k < m {
                (k as f64, c)
            } else {
                (k as f64 - m as f64, c)
            };
            if c.norm() > 1e-18 * scale {
                modes.push((freq, c));
            }
        }
        Self { modes }
    }

    pub fn eval(&self, s: f64) -> C64 {
        self.modes.iter().map(|&(f, c)| c * C64::from_polar(1.0, f * s)).sum()
    }

    pub fn derivative(&self, s: f64) -> C64 {
        self.modes.iter().map(|&(f, c)| c * C64::new(0.0, f) * C64::from_polar(1.0, f * s)).sum()
    }
}

/// Side of a Jordan curve on which a Riemann map lives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Interior,
    Exterior,
}

impl Side {
    fn sign(self) -> isize {
        match self {
            Side::Interior => 1,
            Side::Exterior => -1,
        }
    }
}

/// A starlike curve `gamma(s) - c = exp(i s + L(s))` with `L` periodic.
#[derive(Clone, Debug)]
pub struct StarCurve {
    pub center: C64,
    log: TrigSeries,
}

impl StarCurve {
    /// From equispaced samples of a positively oriented curve starlike about `center`.
    pub fn from_samples(values: &[C64], center: C64) -> Result<Self> {
        let m = values.len();
        if m < 8 || !m.is_power_of_two() {
            return Err(Error::Config(format!("curve needs a power-of-two sample count >= 8, got {m}")));
        }
        let mut logs = Vec::with_capacity(m);
        let mut prev: Option<f64> = None;
        for (j, v) in values.iter().enumerate() {
            let q = (v - center) * C64::from_polar(1.0, -TAU * j as f64 / m as f64);
            if q.norm() == 0.0 {
                return Err(Error::Precondition("curve passes through its centre".into()));
            }
            let mut arg = q.arg();
            if let Some(p) = prev {
                arg += TAU * ((p - arg) / TAU).round();
            }
            prev = Some(arg);
            logs.push(C64::new(q.norm().ln(), arg));
        }
        let closing = logs[m - 1].im - logs[0].im;
        if closing.abs() > PI {
            return Err(Error::Precondition("curve does not wind once around its centre".into()));
        }
        let curve = Self { center, log: TrigSeries::from_samples(&logs) };
        for j in 0..4 * m {
            let s = TAU * j as f64 / (4 * m) as f64;
            if !(curve.arg_derivative(s) > 0.0) {
                return Err(Error::Precondition("curve is not starlike about its centre".into()));
            }
        }
        Ok(curve)
    }

    /// `log |gamma(s) - c|`.
    pub fn log_radius(&self, s: f64) -> f64 {
        self.log.eval(s).re
    }

    /// Continuous `arg(gamma(s) - c)`.
    pub fn arg(&self, s: f64) -> f64 {
        s + self.log.eval(s).im
    }

    pub fn arg_derivative(&self, s: f64) -> f64 {
        1.0 + self.log.derivative(s).im
    }

    pub fn point(&self, s: f64) -> C64 {
        self.center + (C64::new(0.0, s) + self.log.eval(s)).exp()
    }

    /// Solves `arg(s) = target` by safeguarded Newton from `seed`.
    fn arg_inverse(&self, target: f64, seed: f64) -> f64 {
        let mut s = seed;
        for _ in 0..60 {
            let step = (self.arg(s) - target) / self.arg_derivative(s);
            s -= step.clamp(-0.5, 0.5);
            if step.abs() < 1e-15 {
                break;
            }
        }
        s
    }
}

/// Riemann map `c + scale * z * exp(sum_k g_k z^{sign k})` of one side of a
/// starlike curve, with its boundary correspondence.
#[derive(Clone, Debug)]
pub struct RiemannMap {
    pub side: Side,
    pub center: C64,
    pub scale: f64,
    /// `g_k` for `k = 1, 2, ...`.
    pub modes: Vec<C64>,
    /// `map(e^{i theta_j}) = gamma(t[j])`, `theta_j = 2 pi j / M`.
    pub t: Vec<f64>,
    pub iterations: usize,
}

#[derive(Clone, Debug)]
pub struct TheodorsenOptions {
    pub samples: usize,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for TheodorsenOptions {
    fn default() -> Self {
        Self { samples: 1024, tol: 1e-14, max_iter: 500 }
    }
}

/// Theodorsen's fixed-point iteration for the boundary correspondence.
pub fn theodorsen(curve: &StarCurve, side: Side, opts: &TheodorsenOptions) -> Result<RiemannMap> {
    let m = opts.samples;
    if m < 8 || !m.is_power_of_two() {
        return Err(Error::Config(format!("Theodorsen needs a power-of-two sample count, got {m}")));
    }
    let sign = side.sign();
    let theta: Vec<f64> = (0..m).map(|j| TAU * j as f64 / m as f64).collect();
    // start from the radial correspondence
    let mut t: Vec<f64> = theta.iter().map(|&th| curve.arg_inverse(th, th)).collect();
    let mut modes = vec![C64::new(0.0, 0.0); m / 2 - 1];
    let mut scale = 1.0;
    for it in 1..=opts.max_iter {
        let a: Vec<C64> = t.iter().map(|&s| C64::new(curve.log_radius(s), 0.0)).collect();
        let spec = analyze(&a);
        scale = spec[0].re.exp();
        let mut g_spec = vec![C64::new(0.0, 0.0); m];
        for k in 1..m / 2 {
            let idx = (sign * k as isize).rem_euclid(m as isize) as usize;
            modes[k - 1] = 2.0 * spec[idx];
            g_spec[idx] = modes[k - 1];
        }
        let g = synthesize(&g_spec);
        let mut change: f64 = 0.0;
        for j in 0..m {
            let next = curve.arg_inverse(theta[j] + g[j].im, t[j]);
            change = change.max((next - t[j]).abs());
            t[j] = next;
        }
        if change < opts.tol {
            return Ok(RiemannMap { side, center: curve.center, scale, modes, t, iterations: it });
        }
        if !change.is_finite() {
            break;
        }
    }
    let _ = scale;
    Err(Error::Convergence { iterations: opts.max_iter, residual: f64::NAN })
}

impl RiemannMap {
    /// Displacement of the boundary correspondence as a circle map `theta -> t(theta)`.
    pub fn correspondence(&self) -> Result<CircleHomeo> {
        let m = self.t.len();
        let disp: Vec<f64> = (0..m).map(|j| self.t[j] - TAU * j as f64 / m as f64).collect();
        CircleHomeo::from_samples(&disp)
    }

    /// `z exp(g)` as a series: interior in `z`, or exterior in `1/z`.
    pub fn series(&self, n: usize) -> Result<PowerSeries> {
        let mut g = vec![C64::new(0.0, 0.0); n];
        for (k, c) in self.modes.iter().enumerate().take(n - 1) {
            g[k + 1] = *c;
        }
        let e = PowerSeries::interior(g)?.exp_series()?;
        let s = C64::new(self.scale, 0.0);
        match self.side {
            Side::Interior => {
                let mut coeffs = vec![self.center];
                coeffs.extend(e.coeffs()[..n - 1].iter().map(|c| c * s));
                PowerSeries::interior(coeffs)
            }
            Side::Exterior => {
                // coefficient k multiplies w^{1-k}
                let mut coeffs: Vec<C64> = e.coeffs().iter().map(|c| c * s).collect();
                coeffs[1] += self.center;
                PowerSeries::exterior(coeffs)
            }
        }
    }
}

/// Exterior Riemann map of a domain, with Newton inversion.
#[derive(Clone, Debug)]
pub struct ExteriorMap {
    pub series: PowerSeries,
    pub center: C64,
    pub scale: f64,
}

impl ExteriorMap {
    pub fn eval(&self, w: C64) -> C64 {
        self.series.eval(w)
    }

    /// `E^{-1}(q)` for `q` in the exterior domain.
    pub fn invert(&self, q: C64) -> Result<C64> {
        let mut w = (q - self.center) / self.scale;
        if w.norm() < 1.0 {
            w /= w.norm().max(1e-300);
        }
        let mut err = (self.series.eval(w) - q).norm();
        for _ in 0..100 {
            if err <= 1e-14 * q.norm().max(1.0) {
                return Ok(w);
            }
            let step = (self.series.eval(w) - q) / self.series.eval_derivative(w);
            let mut lambda = 1.0;
            loop {
                let trial = w - step * lambda;
                let e = (self.series.eval(trial) - q).norm();
                if (e < err && trial.norm() > 1.0) || lambda < 1e-6 {
                    w = trial;
                    err = e;
                    break;
                }
                lambda *= 0.5;
            }
        }
        if err <= 1e-11 * q.norm().max(1.0) {
            Ok(w)
        } else {
            Err(Error::Convergence { iterations: 100, residual: err })
        }
    }
}

/// Numerical resolution of a capping step.
#[derive(Clone, Debug)]
pub struct CapOptions {
    pub theodorsen: TheodorsenOptions,
    pub weld: WeldOptions,
    /// Truncation of the exterior map series.
    pub exterior_truncation: usize,
}

impl Default for CapOptions {
    fn default() -> Self {
        Self {
            theodorsen: TheodorsenOptions::default(),
            weld: WeldOptions::with_truncation(128),
            exterior_truncation: 256,
        }
    }
}

/// Result of replacing the inside of a seam curve by a cap.
///
/// The seam `psi: S^1 -> C` identifies the cap boundary with `C`. With `E` the
/// exterior map of `C`, `k = E^{-1} o psi` and `(F, G)` its welding pair, the new
/// sphere coordinate is `Phi = A o G o E^{-1}` on the outside of `C` and `A o F`
/// on the cap, where `A(x) = scale x + d` makes `Phi(q) = q + O(1/q)`.
#[derive(Clone, Debug)]
pub struct CapStep {
    pub exterior: ExteriorMap,
    pub seam: CircleHomeo,
    pub pair: WeldingPair,
    pub affine: (C64, C64),
    pub residual: f64,
}

impl CapStep {
    /// Welds a cap to the curve sampled by `seam[j] = psi(e^{2 pi i j / M})`.
    pub fn new(seam: &[C64], opts: &CapOptions) -> Result<Self> {
        let center = seam.iter().sum::<C64>() / seam.len() as f64;
        let curve = StarCurve::from_samples(seam, center)?;
        let ext = theodorsen(&curve, Side::Exterior, &opts.theodorsen)?;
        let exterior = ExteriorMap {
            series: ext.series(opts.exterior_truncation)?,
            center: ext.center,
            scale: ext.scale,
        };
        let k = invert_homeo(&ext.correspondence()?)?;
        let pair = weld(&k, &opts.weld)?;
        let residual = welding_residual(&pair, &k, opts.weld.samples)?;
        let s = C64::new(ext.scale, 0.0);
        let d = ext.center - s * pair.g_constant();
        Ok(Self { exterior, seam: k, pair, affine: (s, d), residual })
    }

    fn affine(&self, x: C64) -> C64 {
        self.affine.0 * x + self.affine.1
    }

    /// `Phi(q)` for `q` outside the seam curve.
    pub fn push(&self, q: C64) -> Result<C64> {
        let w = self.exterior.invert(q)?;
        Ok(self.affine(self.pair.g.eval(w)))
    }

    /// `A o F`, the cap in the new sphere coordinate.
    pub fn cap_map(&self) -> PowerSeries {
        let (s, d) = self.affine;
        let f = self.pair.f.scaled(s);
        let mut coeffs = f.into_coeffs();
        coeffs[0] += d;
        PowerSeries::interior(coeffs).expect("finite cap coefficients")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ellipse(eps: f64, m: usize) -> Vec<C64> {
        (0..m)
            .map(|j| {
                let z = C64::from_polar(1.0, TAU * j as f64 / m as f64);
                z + eps / z
            })
            .collect()
    }

    #[test]
    fn circle_is_a_fixed_point() {
        let m = 64;
        let pts: Vec<C64> = (0..m).map(|j| C64::new(0.5, 0.2) + C64::from_polar(0.3, TAU * j as f64 / m as f64)).collect();
        let curve = StarCurve::from_samples(&pts, C64::new(0.5, 0.2)).unwrap();
        let opts = TheodorsenOptions { samples: 64, ..Default::default() };
        for side in [Side::Interior, Side::Exterior] {
            let map = theodorsen(&curve, side, &opts).unwrap();
            assert!((map.scale - 0.3).abs() < 1e-14);
            assert!(map.modes.iter().all(|g| g.norm() < 1e-14));
        }
    }

    #[test]
    fn ellipse_exterior_map_is_joukowski() {
        // exterior map of z + e/z is itself
        let eps = 0.1;
        let curve = StarCurve::from_samples(&ellipse(eps, 512), C64::new(0.0, 0.0)).unwrap();
        let opts = TheodorsenOptions { samples: 512, ..Default::default() };
        let map = theodorsen(&curve, Side::Exterior, &opts).unwrap();
        let e = map.series(64).unwrap();
        assert!((e.coeff(0) - 1.0).norm() < 1e-12);
        assert!(e.coeff(1).norm() < 1e-12);
        assert!((e.coeff(2) - eps).norm() < 1e-12);
        assert!(e.coeffs()[3..].iter().all(|c| c.norm() < 1e-12));
    }

    #[test]
    fn interior_map_boundary_lands_on_curve() {
        let eps = 0.1;
        let curve = StarCurve::from_samples(&ellipse(eps, 512), C64::new(0.0, 0.0)).unwrap();
        let opts = TheodorsenOptions { samples: 512, ..Default::default() };
        let map = theodorsen(&curve, Side::Interior, &opts).unwrap();
        let r = map.series(256).unwrap();
        for j in (0..512).step_by(37) {
            let th = TAU * j as f64 / 512.0;
            let on = r.eval(C64::from_polar(1.0, th));
            assert!((on - curve.point(map.t[j])).norm() < 1e-11);
        }
    }

    #[test]
    fn identity_seam_gives_identity_coordinate() {
        let m = 256;
        let seam: Vec<C64> = (0..m).map(|j| C64::from_polar(1.0, TAU * j as f64 / m as f64)).collect();
        let opts = CapOptions {
            theodorsen: TheodorsenOptions { samples: m, ..Default::default() },
            weld: WeldOptions::with_truncation(32),
            exterior_truncation: 32,
        };
        let step = CapStep::new(&seam, &opts).unwrap();
        let q = C64::new(2.0, -1.0);
        assert!((step.push(q).unwrap() - q).norm() < 1e-12);
        assert!(step.cap_map().max_coeff_diff(&PowerSeries::identity(32).unwrap()) < 1e-12);
    }

    #[test]
    fn ellipse_seam_reproduces_closed_form_variation() {
        // seam: cap point R(e^{i theta}) glued to the circle point e^{i t(theta)}
        let eps = 0.05;
        let m = 512;
        let curve = StarCurve::from_samples(&ellipse(eps, m), C64::new(0.0, 0.0)).unwrap();
        let topts = TheodorsenOptions { samples: m, ..Default::default() };
        let inner = theodorsen(&curve, Side::Interior, &topts).unwrap();
        let seam: Vec<C64> = inner.t.iter().map(|&t| C64::from_polar(1.0, t)).collect();
        let opts = CapOptions { theodorsen: topts, weld: WeldOptions::with_truncation(64), exterior_truncation: 64 };
        let step = CapStep::new(&seam, &opts).unwrap();
        for q in [C64::new(2.0, 0.5), C64::new(-1.5, -3.0), C64::new(0.0, 1.2)] {
            let expect = q + eps / q;
            assert!((step.push(q).unwrap() - expect).norm() < 1e-11, "{q}");
        }
    }
}
