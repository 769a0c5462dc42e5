//! Analytic orientation-preserving circle homeomorphisms stored by their lift.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{analyze, C64};

use std::f64::consts::TAU;

/// Sample count for the orientation check.
const ORIENTATION_SAMPLES: usize = 4096;
/// Size, relative to `max(1, largest coefficient)`, below which refitted modes are discarded.
const TRIM: f64 = 1e-14;
/// Margin reported when the displacement has no measurable decay.
const MARGIN_CAP: f64 = 20.0;

/// `h(e^{it}) = exp(i (t + u(t)))` with
/// `u(t) = a_0 + sum_{k>=1} (a_k cos kt + b_k sin kt)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawHomeo")]
pub struct CircleHomeo {
    /// `displacement[k] = [a_k, b_k]`; `b_0` is zero.
    displacement: Vec<[f64; 2]>,
    /// `u` continues holomorphically to `|Im t| < margin`.
    margin: f64,
}

#[derive(Deserialize)]
struct RawHomeo {
    displacement: Vec<[f64; 2]>,
    margin: f64,
}

impl TryFrom<RawHomeo> for CircleHomeo {
    type Error = Error;

    fn try_from(raw: RawHomeo) -> Result<Self> {
        CircleHomeo::new(raw.displacement, raw.margin)
    }
}

impl CircleHomeo {
    pub fn new(mut displacement: Vec<[f64; 2]>, margin: f64) -> Result<Self> {
        if displacement.is_empty() {
            displacement.push([0.0, 0.0]);
        }
        if displacement.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("displacement coefficients must be finite".into()));
        }
        if !(margin > 0.0) {
            return Err(Error::InvalidInput(format!("analyticity margin {margin} must be positive")));
        }
        displacement[0][1] = 0.0;
        let h = Self { displacement, margin };
        h.check_orientation()?;
        Ok(h)
    }

    pub fn identity() -> Self {
        Self { displacement: vec![[0.0, 0.0]], margin: MARGIN_CAP }
    }

    pub fn rotation(alpha: f64) -> Self {
        Self { displacement: vec![[alpha, 0.0]], margin: MARGIN_CAP }
    }

    /// `u(t) = eps sin(k t)`.
    pub fn sine(eps: f64, k: usize) -> Result<Self> {
        let mut d = vec![[0.0, 0.0]; k + 1];
        d[k][1] = eps;
        Self::new(d, MARGIN_CAP)
    }

    /// The disc automorphism `(z + a) / (1 + conj(a) z)` restricted to the circle.
    pub fn mobius(a: C64) -> Result<Self> {
        if a.norm() >= 1.0 {
            return Err(Error::InvalidInput("Mobius parameter must lie in the disc".into()));
        }
        if a.norm() == 0.0 {
            return Ok(Self::identity());
        }
        // u = 2 arg(1 + a e^{-it}) = 2 Im sum_k (-1)^{k+1} a^k e^{-ikt} / k
        let modes = ((TRIM.ln() / a.norm().ln()).ceil() as usize).clamp(1, 4096);
        let mut d = vec![[0.0, 0.0]; modes + 1];
        let mut ak = C64::new(1.0, 0.0);
        for (k, slot) in d.iter_mut().enumerate().skip(1) {
            ak *= a;
            let c = ak * if k % 2 == 1 { 2.0 } else { -2.0 } / k as f64;
            *slot = [c.im, -c.re];
        }
        Self::new(d, -a.norm().ln())
    }

    /// Fits the displacement `u` from a periodic function, keeping at most
    /// `modes` harmonics. The margin is estimated from the coefficient decay.
    pub fn from_fn<U: Fn(f64) -> f64>(u: U, modes: usize) -> Result<Self> {
        let m = (4 * modes.max(1)).next_power_of_two().max(64);
        let values: Vec<C64> = (0..m).map(|k| C64::new(u(TAU * k as f64 / m as f64), 0.0)).collect();
        let spec = analyze(&values);
        let mut d = vec![[spec[0].re, 0.0]];
        // u = sum c_k e^{ikt}, c_{-k} = conj(c_k): a_k = 2 Re c_k, b_k = -2 Im c_k
        d.extend(spec[1..=modes.min(m / 2 - 1)].iter().map(|c| [2.0 * c.re, -2.0 * c.im]));
        let d = trim(d);
        let margin = estimate_margin(&d);
        Self::new(d, margin)
    }

    /// Fits `u` from its values at `2 pi j / M`, keeping every resolved mode.
    pub fn from_samples(values: &[f64]) -> Result<Self> {
        let m = values.len();
        if m < 4 || !m.is_power_of_two() {
            return Err(Error::Config(format!("displacement fit needs a power-of-two sample count, got {m}")));
        }
        let spec = analyze(&values.iter().map(|&v| C64::new(v, 0.0)).collect::<Vec<_>>());
        let mut d = vec![[spec[0].re, 0.0]];
        d.extend((1..m / 2).map(|k| [2.0 * spec[k].re, -2.0 * spec[k].im]));
        let d = trim(d);
        let margin = estimate_margin(&d);
        Self::new(d, margin)
    }

    pub fn displacement(&self) -> &[[f64; 2]] {
        &self.displacement
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn modes(&self) -> usize {
        self.displacement.len() - 1
    }

    pub fn with_margin(mut self, margin: f64) -> Result<Self> {
        if !(margin > 0.0) {
            return Err(Error::InvalidInput(format!("analyticity margin {margin} must be positive")));
        }
        self.margin = margin;
        Ok(self)
    }

    /// `u(t)`.
    pub fn displacement_at(&self, t: f64) -> f64 {
        self.displacement
            .iter()
            .enumerate()
            .map(|(k, [a, b])| {
                let (s, c) = (k as f64 * t).sin_cos();
                a * c + b * s
            })
            .sum()
    }

    /// `u'(t)`.
    pub fn displacement_derivative(&self, t: f64) -> f64 {
        self.displacement
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, [a, b])| {
                let kf = k as f64;
                let (s, c) = (kf * t).sin_cos();
                kf * (b * c - a * s)
            })
            .sum()
    }

    /// `t + u(t)`.
    pub fn lift(&self, t: f64) -> f64 {
        t + self.displacement_at(t)
    }

    /// `h(e^{it})`.
    pub fn at_angle(&self, t: f64) -> C64 {
        C64::from_polar(1.0, self.lift(t))
    }

    /// Largest oscillation `sup |u - a_0|`, bounded by the coefficient sum.
    pub fn oscillation(&self) -> f64 {
        let m = ORIENTATION_SAMPLES;
        let a0 = self.displacement[0][0];
        (0..m)
            .map(|k| (self.displacement_at(TAU * k as f64 / m as f64) - a0).abs())
            .fold(0.0, f64::max)
    }

    /// Holomorphic continuation of `u` in `z = e^{it}`:
    /// `U(z) = a_0 + sum (a_k - i b_k)/2 z^k + (a_k + i b_k)/2 z^{-k}`.
    pub fn laurent(&self, z: C64) -> C64 {
        let inv = z.inv();
        let (mut zk, mut ik) = (C64::new(1.0, 0.0), C64::new(1.0, 0.0));
        let mut acc = C64::new(self.displacement[0][0], 0.0);
        for &[a, b] in &self.displacement[1..] {
            zk *= z;
            ik *= inv;
            acc += C64::new(a, -b) * 0.5 * zk + C64::new(a, b) * 0.5 * ik;
        }
        acc
    }

    /// `dU/dz`.
    pub fn laurent_derivative(&self, z: C64) -> C64 {
        let inv = z.inv();
        let (mut zk, mut ik) = (inv, inv);
        let mut acc = C64::new(0.0, 0.0);
        for (k, &[a, b]) in self.displacement.iter().enumerate().skip(1) {
            let kf = k as f64;
            // zk = z^{k-1}, ik = z^{-k-1}
            zk *= z;
            ik *= inv;
            acc += C64::new(a, -b) * 0.5 * kf * zk - C64::new(a, b) * 0.5 * kf * ik;
        }
        acc
    }

    fn check_orientation(&self) -> Result<()> {
        let m = ORIENTATION_SAMPLES.max(16 * self.displacement.len()).next_power_of_two();
        for k in 0..m {
            let t = TAU * k as f64 / m as f64;
            let slope = 1.0 + self.displacement_derivative(t);
            if !(slope > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "lift is not increasing: 1 + u'({t:.6}) = {slope:.3e}"
                )));
            }
        }
        Ok(())
    }
}

fn trim(mut d: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    // angles carry absolute round-off, so the floor never drops below TRIM
    let scale = d.iter().map(|[a, b]| a.hypot(*b)).fold(1.0, f64::max);
    while d.len() > 1 {
        let [a, b] = d[d.len() - 1];
        if a.hypot(b) > TRIM * scale {
            break;
        }
        d.pop();
    }
    d
}

/// `rho` from a log-linear fit `|c_k| ~ exp(-rho k)` over the resolved modes.
fn estimate_margin(d: &[[f64; 2]]) -> f64 {
    let pts: Vec<(f64, f64)> = d
        .iter()
        .enumerate()
        .skip(1)
        .filter_map(|(k, [a, b])| {
            let m = a.hypot(*b);
            (m > 1e-14).then(|| (k as f64, m.ln()))
        })
        .collect();
    if pts.len() < 2 {
        return MARGIN_CAP;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = sxy / sxx;
    if slope < 0.0 {
        (-slope).min(MARGIN_CAP)
    } else {
        // no decay across the resolved modes: fall back on the last one
        (1.0 / pts.last().unwrap().0).min(MARGIN_CAP)
    }
}

/// Margin reported for composites and inverses: the smaller input margin,
/// shrunk by this factor.
pub const MARGIN_SAFETY: f64 = 0.75;

/// Largest number of harmonics a refit may use.
const MAX_MODES: usize = 4096;

fn refit<U: Fn(f64) -> f64>(u: U, modes: usize, margin_in: f64) -> Result<CircleHomeo> {
    // double until trimming shows the displacement is resolved
    let mut modes = modes;
    let mut fitted = CircleHomeo::from_fn(&u, modes)?;
    while fitted.modes() >= modes && modes < MAX_MODES {
        modes *= 2;
        fitted = CircleHomeo::from_fn(&u, modes)?;
    }
    let margin = fitted.margin.min(MARGIN_SAFETY * margin_in);
    fitted.with_margin(margin)
}

fn refit_modes(a: &CircleHomeo, b: &CircleHomeo) -> usize {
    (2 * (a.modes() + b.modes())).clamp(8, 2048)
}

/// `h1 o h2`, by its lift `t + u2(t) + u1(t + u2(t))`.
pub fn compose_homeo(h1: &CircleHomeo, h2: &CircleHomeo) -> Result<CircleHomeo> {
    let modes = refit_modes(h1, h2);
    refit(|t| {
        let v = h2.displacement_at(t);
        v + h1.displacement_at(t + v)
    }, modes, h1.margin.min(h2.margin))
}

/// `h^{-1}`, by Newton on the lift `s + u(s) = t`.
pub fn invert_homeo(h: &CircleHomeo) -> Result<CircleHomeo> {
    let modes = refit_modes(h, h);
    let solve = |t: f64| -> f64 {
        let mut s = t - h.displacement_at(t);
        for _ in 0..60 {
            let step = (h.lift(s) - t) / (1.0 + h.displacement_derivative(s));
            s -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        s - t
    };
    refit(solve, modes, h.margin)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mobius_lift_matches_direct_evaluation() {
        let a = C64::new(0.2, -0.1);
        let h = CircleHomeo::mobius(a).unwrap();
        for k in 0..50 {
            let t = 0.37 * k as f64;
            let z = C64::from_polar(1.0, t);
            let direct = (z + a) / (1.0 + a.conj() * z);
            assert!((h.at_angle(t) - direct).norm() < 1e-14);
        }
        assert!((h.margin() + a.norm().ln()).abs() < 1e-15);
    }

    #[test]
    fn laurent_continuation_agrees_on_the_circle() {
        let h = CircleHomeo::new(vec![[0.1, 0.0], [0.02, -0.03], [0.0, 0.01]], 1.0).unwrap();
        for k in 0..20 {
            let t = 0.31 * k as f64;
            let z = C64::from_polar(1.0, t);
            assert!((h.laurent(z) - h.displacement_at(t)).norm() < 1e-15);
            // dU/dt = i z U'(z)
            let du = C64::new(0.0, 1.0) * z * h.laurent_derivative(z);
            assert!((du - h.displacement_derivative(t)).norm() < 1e-15);
        }
    }

    #[test]
    fn orientation_is_enforced() {
        assert!(CircleHomeo::sine(0.5, 2).is_err());
        assert!(CircleHomeo::sine(0.49, 2).is_ok());
        assert!(CircleHomeo::new(vec![[0.0, 0.0]], 0.0).is_err());
    }

    #[test]
    fn group_operations() {
        let h = CircleHomeo::sine(0.05, 1).unwrap();
        let hid = compose_homeo(&h, &CircleHomeo::identity()).unwrap();
        for k in 0..32 {
            let t = 0.2 * k as f64;
            assert!((hid.lift(t) - h.lift(t)).abs() < 1e-14);
        }
        let r = invert_homeo(&CircleHomeo::rotation(0.3)).unwrap();
        assert!((r.displacement()[0][0] + 0.3).abs() < 1e-15 && r.modes() == 0);
        let hinv = invert_homeo(&h).unwrap();
        for k in 0..32 {
            let t = 0.2 * k as f64;
            assert!((hinv.lift(h.lift(t)) - t).abs() < 1e-13);
        }
    }

    #[test]
    fn json_shape() {
        let h = CircleHomeo::new(vec![[0.0, 0.0], [0.0, 0.05]], 2.0).unwrap();
        let s = serde_json::to_string(&h).unwrap();
        assert_eq!(s, r#"{"displacement":[[0.0,0.0],[0.0,0.05]],"margin":2.0}"#);
        let back: CircleHomeo = serde_json::from_str(&s).unwrap();
        assert_eq!(back, h);
        assert!(serde_json::from_str::<CircleHomeo>(r#"{"displacement":[[0.0,0.0],[0.0,2.0]],"margin":1.0}"#).is_err());
    }
}
