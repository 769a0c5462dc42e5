//! Truncated power series on the unit disc and at infinity.
//!
//! A [`PowerSeries`] is the polynomial (or polynomial in `1/w`) spelled out by
//! its coefficients. Operations whose exact result is an infinite series
//! return its first `N` coefficients; sampled operations additionally report
//! the coefficient mass that fell outside the truncation.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Relative tail mass above which a sampled result is flagged as under-resolved.
pub const TAIL_THRESHOLD: f64 = 1e-10;
pub const DEFAULT_TRUNCATION: usize = 256;
pub const DEFAULT_SAMPLES: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesKind {
    /// Expansion at 0: `coeffs[n]` multiplies `z^n`.
    Interior,
    /// Expansion at infinity: `coeffs[k]` multiplies `w^(1-k)`.
    Exterior,
}

impl SeriesKind {
    fn name(self) -> &'static str {
        match self {
            SeriesKind::Interior => "interior",
            SeriesKind::Exterior => "exterior",
        }
    }
}

#[derive(Deserialize)]
struct RawSeries {
    kind: SeriesKind,
    coeffs: Vec<C64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSeries")]
pub struct PowerSeries {
    kind: SeriesKind,
    coeffs: Vec<C64>,
}

impl TryFrom<RawSeries> for PowerSeries {
    type Error = Error;

    fn try_from(raw: RawSeries) -> Result<Self> {
        PowerSeries::new(raw.kind, raw.coeffs)
    }
}

/// A sampled result together with the relative coefficient mass it dropped.
#[derive(Clone, Debug)]
pub struct Truncated {
    pub series: PowerSeries,
    pub tail: f64,
}

impl Truncated {
    pub fn under_resolved(&self) -> bool {
        self.tail > TAIL_THRESHOLD
    }
}

/// Antiderivative together with the modulus of the coefficient that did not fit.
#[derive(Clone, Debug)]
pub struct Antiderivative {
    pub series: PowerSeries,
    pub dropped: f64,
}

/// Values of a series at `radius * exp(2 pi i k / M)`, `k = 0..M`.
#[derive(Clone, Debug, PartialEq)]
pub struct CircleSamples {
    pub values: Vec<C64>,
    pub radius: f64,
}

impl CircleSamples {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn points(&self) -> Vec<C64> {
        circle_points(self.radius, self.values.len())
    }
}

pub fn circle_points(radius: f64, m: usize) -> Vec<C64> {
    (0..m)
        .map(|k| C64::from_polar(radius, std::f64::consts::TAU * k as f64 / m as f64))
        .collect()
}

/// Inverse DFT without normalisation: `out[k] = sum_n c[n] e^{2 pi i n k / M}`.
pub(crate) fn synthesize(spectrum: &[C64]) -> Vec<C64> {
    let mut buf = spectrum.to_vec();
    FftPlanner::new().plan_fft_inverse(buf.len()).process(&mut buf);
    buf
}

/// Normalised forward DFT: `out[n] = (1/M) sum_k v[k] e^{-2 pi i n k / M}`.
pub(crate) fn analyze(values: &[C64]) -> Vec<C64> {
    let mut buf = values.to_vec();
    let m = buf.len();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let scale = 1.0 / m as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
    buf
}

fn check_samples(m: usize, n: usize) -> Result<()> {
    if !m.is_power_of_two() {
        return Err(Error::Config(format!("sample count {m} is not a power of two")));
    }
    if m < 2 * n {
        return Err(Error::Config(format!(
            "sample count {m} below the anti-aliasing margin 2N = {}",
            2 * n
        )));
    }
    Ok(())
}

/// Samples needed to resolve results of truncation `n` with a factor-4 margin.
pub fn samples_for(n: usize) -> usize {
    (4 * n).next_power_of_two().max(64)
}

impl PowerSeries {
    pub fn new(kind: SeriesKind, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "truncation must be at least 2, got {}",
                coeffs.len()
            )));
        }
        if let Some(i) = coeffs.iter().position(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidInput(format!("coefficient {i} is not finite")));
        }
        Ok(Self { kind, coeffs })
    }

    pub fn interior(coeffs: Vec<C64>) -> Result<Self> {
        Self::new(SeriesKind::Interior, coeffs)
    }

    pub fn exterior(coeffs: Vec<C64>) -> Result<Self> {
        Self::new(SeriesKind::Exterior, coeffs)
    }

    /// Interior series from leading coefficients, zero-padded to truncation `n`.
    pub fn from_leading(leading: &[C64], n: usize) -> Result<Self> {
        let mut coeffs = vec![C64::new(0.0, 0.0); n.max(leading.len())];
        coeffs[..leading.len()].copy_from_slice(leading);
        Self::interior(coeffs)
    }

    pub fn zeros(kind: SeriesKind, n: usize) -> Result<Self> {
        Self::new(kind, vec![C64::new(0.0, 0.0); n])
    }

    pub fn constant(c: C64, n: usize) -> Result<Self> {
        Self::from_leading(&[c], n)
    }

    /// `z` on the disc.
    pub fn identity(n: usize) -> Result<Self> {
        Self::monomial(1, C64::new(1.0, 0.0), n)
    }

    pub fn monomial(power: usize, c: C64, n: usize) -> Result<Self> {
        let mut coeffs = vec![C64::new(0.0, 0.0); n.max(power + 1)];
        coeffs[power] = c;
        Self::interior(coeffs)
    }

    pub fn kind(&self) -> SeriesKind {
        self.kind
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C64> {
        self.coeffs
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, n: usize) -> C64 {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    pub fn is_interior(&self) -> bool {
        self.kind == SeriesKind::Interior
    }

    fn require_interior(&self, op: &'static str) -> Result<()> {
        if self.is_interior() {
            Ok(())
        } else {
            Err(Error::UnsupportedKind { op, kind: self.kind.name() })
        }
    }

    /// Truncate or zero-pad to `n` coefficients.
    pub fn resized(&self, n: usize) -> PowerSeries {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(n.max(2), C64::new(0.0, 0.0));
        PowerSeries { kind: self.kind, coeffs }
    }

    pub fn scaled(&self, c: C64) -> PowerSeries {
        PowerSeries { kind: self.kind, coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    /// Coefficientwise sum; the result has the larger truncation.
    pub fn add(&self, other: &PowerSeries) -> Result<PowerSeries> {
        if self.kind != other.kind {
            return Err(Error::InvalidInput("cannot add interior and exterior series".into()));
        }
        let n = self.truncation().max(other.truncation());
        let coeffs = (0..n).map(|i| self.coeff(i) + other.coeff(i)).collect();
        Ok(PowerSeries { kind: self.kind, coeffs })
    }

    pub fn sub(&self, other: &PowerSeries) -> Result<PowerSeries> {
        self.add(&other.scaled(C64::new(-1.0, 0.0)))
    }

    /// Largest coefficient modulus of `self - other` over the common range.
    pub fn max_coeff_diff(&self, other: &PowerSeries) -> f64 {
        let n = self.truncation().max(other.truncation());
        (0..n).map(|i| (self.coeff(i) - other.coeff(i)).norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: C64) -> C64 {
        match self.kind {
            SeriesKind::Interior => {
                self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * z + c)
            }
            SeriesKind::Exterior => {
                let s = z.inv();
                let tail = self.coeffs[1..]
                    .iter()
                    .rev()
                    .fold(C64::new(0.0, 0.0), |acc, c| acc * s + c);
                self.coeffs[0] * z + tail
            }
        }
    }

    /// Complex derivative at `z`.
    pub fn eval_derivative(&self, z: C64) -> C64 {
        match self.kind {
            SeriesKind::Interior => {
                let n = self.coeffs.len();
                (1..n).rev().fold(C64::new(0.0, 0.0), |acc, k| acc * z + self.coeffs[k] * k as f64)
            }
            SeriesKind::Exterior => {
                // d/dw c_k w^{1-k} = (1-k) c_k w^{-k}
                let s = z.inv();
                let n = self.coeffs.len();
                let tail = (2..n).rev().fold(C64::new(0.0, 0.0), |acc, k| {
                    acc * s + self.coeffs[k] * (1.0 - k as f64)
                });
                self.coeffs[0] + tail * s * s
            }
        }
    }

    /// Termwise derivative, zero-padded back to the input truncation.
    pub fn differentiate(&self) -> Result<PowerSeries> {
        self.require_interior("differentiate")?;
        let n = self.truncation();
        let mut coeffs = vec![C64::new(0.0, 0.0); n];
        for k in 1..n {
            coeffs[k - 1] = self.coeffs[k] * k as f64;
        }
        Ok(PowerSeries { kind: self.kind, coeffs })
    }

    /// Antiderivative vanishing at 0. The `z^N` coefficient does not fit and is
    /// reported in [`Antiderivative::dropped`].
    pub fn integrate0(&self) -> Result<Antiderivative> {
        self.require_interior("integrate0")?;
        let n = self.truncation();
        let mut coeffs = vec![C64::new(0.0, 0.0); n];
        for k in 0..n - 1 {
            coeffs[k + 1] = self.coeffs[k] / (k + 1) as f64;
        }
        let dropped = (self.coeffs[n - 1] / n as f64).norm();
        Ok(Antiderivative { series: PowerSeries { kind: self.kind, coeffs }, dropped })
    }

    /// Values at `M` equispaced points of the circle `|z| = r`.
    pub fn sample_circle(&self, radius: f64, m: usize) -> Result<CircleSamples> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Config(format!("sample radius {radius} must be positive")));
        }
        check_samples(m, self.truncation())?;
        let mut spectrum = vec![C64::new(0.0, 0.0); m];
        match self.kind {
            SeriesKind::Interior => {
                let mut rn = 1.0;
                for (n, c) in self.coeffs.iter().enumerate() {
                    spectrum[n] = c * rn;
                    rn *= radius;
                }
            }
            SeriesKind::Exterior => {
                // coefficient k sits at frequency 1-k
                for (k, c) in self.coeffs.iter().enumerate() {
                    let freq = 1 - k as isize;
                    let idx = freq.rem_euclid(m as isize) as usize;
                    spectrum[idx] += c * radius.powi(freq as i32);
                }
            }
        }
        Ok(CircleSamples { values: synthesize(&spectrum), radius })
    }

    /// Interior series of truncation `n` whose samples are `samples`.
    /// Left inverse of [`PowerSeries::sample_circle`] on band-limited data.
    pub fn fit_interior(samples: &CircleSamples, n: usize) -> Result<PowerSeries> {
        Ok(Self::fit_interior_with_tail(samples, n)?.series)
    }

    /// As [`PowerSeries::fit_interior`], reporting the relative mass outside `0..n`.
    pub fn fit_interior_with_tail(samples: &CircleSamples, n: usize) -> Result<Truncated> {
        let m = samples.len();
        check_samples(m, n)?;
        let spectrum = analyze(&samples.values);
        let r = samples.radius;
        let mut coeffs = Vec::with_capacity(n);
        let mut rn = 1.0;
        for c in spectrum.iter().take(n) {
            coeffs.push(c / rn);
            rn *= r;
        }
        let total: f64 = spectrum.iter().map(|c| c.norm()).sum();
        let outside: f64 = spectrum[n..].iter().map(|c| c.norm()).sum();
        let tail = if total > 0.0 { outside / total } else { 0.0 };
        Ok(Truncated { series: PowerSeries::interior(coeffs)?, tail })
    }

    /// Truncated Cauchy product. Exact convolution via zero-padded transforms;
    /// the tail reports the product mass beyond the output truncation.
    pub fn multiply(&self, other: &PowerSeries) -> Result<Truncated> {
        self.require_interior("multiply")?;
        other.require_interior("multiply")?;
        let n = self.truncation().max(other.truncation());
        let m = (self.truncation() + other.truncation()).next_power_of_two();
        let mut a = self.coeffs.clone();
        a.resize(m, C64::new(0.0, 0.0));
        let mut b = other.coeffs.clone();
        b.resize(m, C64::new(0.0, 0.0));
        let va = synthesize(&a);
        let vb = synthesize(&b);
        let prod: Vec<C64> = va.iter().zip(&vb).map(|(x, y)| x * y).collect();
        let spectrum = analyze(&prod);
        let total: f64 = spectrum.iter().map(|c| c.norm()).sum();
        let outside: f64 = spectrum[n..].iter().map(|c| c.norm()).sum();
        let tail = if total > 0.0 { outside / total } else { 0.0 };
        Ok(Truncated { series: PowerSeries::interior(spectrum[..n].to_vec())?, tail })
    }

    /// Truncated quotient `self / other`.
    pub fn divide(&self, other: &PowerSeries) -> Result<PowerSeries> {
        self.require_interior("divide")?;
        other.require_interior("divide")?;
        let b0 = other.coeffs[0];
        if b0.norm() == 0.0 {
            return Err(Error::Singular("division by a series with vanishing constant term".into()));
        }
        let n = self.truncation().max(other.truncation());
        let b = other.resized(n).coeffs;
        let mut q = vec![C64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut acc = self.coeff(i);
            for k in 1..=i {
                acc -= b[k] * q[i - k];
            }
            q[i] = acc / b0;
        }
        PowerSeries::interior(q)
    }

    /// Truncated `exp(self)` through the recurrence `n e_n = sum k s_k e_{n-k}`.
    pub fn exp_series(&self) -> Result<PowerSeries> {
        self.require_interior("exp_series")?;
        let n = self.truncation();
        let s = &self.coeffs;
        let mut e = vec![C64::new(0.0, 0.0); n];
        e[0] = s[0].exp();
        for i in 1..n {
            let mut acc = C64::new(0.0, 0.0);
            for k in 1..=i {
                acc += s[k] * k as f64 * e[i - k];
            }
            e[i] = acc / i as f64;
        }
        PowerSeries::interior(e)
    }

    /// Logarithmic derivative `s'/s`.
    pub fn log_deriv(&self) -> Result<PowerSeries> {
        self.require_interior("log_deriv")?;
        if self.coeffs[0].norm() == 0.0 {
            return Err(Error::Singular("log_deriv requires s(0) != 0".into()));
        }
        self.differentiate()?.divide(self)
    }

    /// `outer(inner(z))` by sampling `inner` and refitting. `outer` is a series
    /// on the disc, so `inner` must map the unit circle strictly inside it.
    pub fn compose(outer: &PowerSeries, inner: &PowerSeries) -> Result<Truncated> {
        outer.require_interior("compose")?;
        inner.require_interior("compose")?;
        let n = outer.truncation().max(inner.truncation());
        if inner.is_identity() {
            return Ok(Truncated { series: outer.resized(n), tail: 0.0 });
        }
        let m = samples_for(n * 2);
        let samples = inner.sample_circle(1.0, m)?;
        let sup = samples.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if sup >= 1.0 {
            return Err(Error::Domain { sup });
        }
        Self::compose_values(&samples, n, |w| outer.eval(w))
    }

    /// `g(inner(z))` for an arbitrary holomorphic `g` defined on a neighbourhood
    /// of `inner` applied to the closed disc. The caller certifies the domain.
    pub fn compose_fn<G>(inner: &PowerSeries, n: usize, m: usize, g: G) -> Result<Truncated>
    where
        G: Fn(C64) -> C64,
    {
        inner.require_interior("compose_fn")?;
        let samples = inner.sample_circle(1.0, m)?;
        Self::compose_values(&samples, n, g)
    }

    fn compose_values<G>(samples: &CircleSamples, n: usize, g: G) -> Result<Truncated>
    where
        G: Fn(C64) -> C64,
    {
        let values: Vec<C64> = samples.values.iter().map(|&w| g(w)).collect();
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Domain { sup: f64::INFINITY });
        }
        Self::fit_interior_with_tail(&CircleSamples { values, radius: samples.radius }, n)
    }

    fn is_identity(&self) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(i, c)| if i == 1 { *c == C64::new(1.0, 0.0) } else { *c == C64::new(0.0, 0.0) })
    }

    /// Largest modulus over `M` samples of the circle `|z| = r`.
    pub fn sup_on_circle(&self, radius: f64, m: usize) -> Result<f64> {
        let m = m.max(samples_for(self.truncation()));
        Ok(self.sample_circle(radius, m)?.values.iter().map(|v| v.norm()).fold(0.0, f64::max))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn series(v: &[f64]) -> PowerSeries {
        PowerSeries::interior(v.iter().map(|&x| c(x, 0.0)).collect()).unwrap()
    }

    #[test]
    fn derivative_of_monomials() {
        let z = series(&[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(z.differentiate().unwrap().coeffs()[..2], [c(1.0, 0.0), c(0.0, 0.0)]);
        let z2 = series(&[0.0, 0.0, 1.0, 0.0]);
        assert_eq!(z2.differentiate().unwrap().coeffs()[..3], [c(0.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)]);
    }

    #[test]
    fn exterior_kind_is_rejected() {
        let g = PowerSeries::exterior(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(matches!(g.differentiate(), Err(Error::UnsupportedKind { .. })));
        assert!(matches!(g.integrate0(), Err(Error::UnsupportedKind { .. })));
    }

    #[test]
    fn invalid_series() {
        assert!(PowerSeries::interior(vec![c(1.0, 0.0)]).is_err());
        assert!(PowerSeries::interior(vec![c(f64::NAN, 0.0), c(0.0, 0.0)]).is_err());
    }

    #[test]
    fn integrate_constants() {
        let one = series(&[1.0, 0.0, 0.0]);
        let i = one.integrate0().unwrap();
        assert_eq!(i.series.coeffs(), &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(i.dropped, 0.0);
        let two_z = series(&[0.0, 2.0, 0.0]);
        assert_eq!(two_z.integrate0().unwrap().series.coeffs()[2], c(1.0, 0.0));
        let full = series(&[0.0, 0.0, 3.0]);
        assert!((full.integrate0().unwrap().dropped - 1.0).abs() < 1e-15);
    }

    #[test]
    fn product_and_composition_examples() {
        let z = PowerSeries::identity(8).unwrap();
        let z2 = z.multiply(&z).unwrap().series;
        assert!((z2.coeff(2) - c(1.0, 0.0)).norm() < 1e-14);
        assert!(z2.max_coeff_diff(&PowerSeries::monomial(2, c(1.0, 0.0), 8).unwrap()) < 1e-14);

        let outer = series(&[0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let inner = series(&[0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let out = PowerSeries::compose(&outer, &inner).unwrap();
        let expect = series(&[0.0, 0.5, 0.25, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(out.series.max_coeff_diff(&expect) < 1e-14);
        assert!(!out.under_resolved());
    }

    #[test]
    fn compose_with_identity_is_exact() {
        let outer = series(&[0.3, -1.0, 0.25, 0.125]);
        let id = PowerSeries::identity(4).unwrap();
        assert_eq!(PowerSeries::compose(&outer, &id).unwrap().series, outer);
    }

    #[test]
    fn compose_radius_violation() {
        let outer = series(&[0.0, 1.0, 0.0, 0.0]);
        let inner = series(&[0.0, 1.0, 0.0, 0.0]).scaled(c(1.5, 0.0));
        assert!(matches!(PowerSeries::compose(&outer, &inner), Err(Error::Domain { .. })));
    }

    #[test]
    fn exp_and_log_deriv() {
        let zero = PowerSeries::zeros(SeriesKind::Interior, 6).unwrap();
        let e = zero.exp_series().unwrap();
        assert_eq!(e.coeff(0), c(1.0, 0.0));
        assert!(e.coeffs()[1..].iter().all(|x| x.norm() == 0.0));

        let one_plus_z = series(&[1.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        let ld = one_plus_z.log_deriv().unwrap();
        for (n, a) in ld.coeffs().iter().enumerate() {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((a - c(sign, 0.0)).norm() < 1e-15, "n={n}");
        }
        assert!(matches!(series(&[0.0, 1.0]).log_deriv(), Err(Error::Singular(_))));
    }

    #[test]
    fn sampling_examples() {
        let z = PowerSeries::identity(4).unwrap();
        let s = z.sample_circle(1.0, 8).unwrap();
        for (v, p) in s.values.iter().zip(circle_points(1.0, 8)) {
            assert!((v - p).norm() < 1e-15);
        }
        let z2 = PowerSeries::monomial(2, c(1.0, 0.0), 4).unwrap();
        let s = z2.sample_circle(0.5, 16).unwrap();
        assert!(s.values.iter().all(|v| (v.norm() - 0.25).abs() < 1e-15));
        assert!(matches!(z.sample_circle(1.0, 6), Err(Error::Config(_))));
        assert!(matches!(z.sample_circle(1.0, 4), Err(Error::Config(_))));
    }

    #[test]
    fn exterior_evaluation_matches_samples() {
        let g = PowerSeries::exterior(vec![c(1.0, 0.0), c(0.2, 0.1), c(0.05, 0.0), c(0.0, -0.01)])
            .unwrap();
        let s = g.sample_circle(1.3, 16).unwrap();
        for (v, p) in s.values.iter().zip(s.points()) {
            assert!((v - g.eval(p)).norm() < 1e-14);
        }
        let w = c(1.1, -0.7);
        let h = 1e-6;
        let fd = (g.eval(w + h) - g.eval(w - h)) / (2.0 * h);
        assert!((fd - g.eval_derivative(w)).norm() < 1e-8);
    }

    #[test]
    fn series_json_shape() {
        let s = series(&[0.0, 1.0]);
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, r#"{"kind":"interior","coeffs":[[0.0,0.0],[1.0,0.0]]}"#);
        let back: PowerSeries = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<PowerSeries>(r#"{"kind":"interior","coeffs":[[1,0]]}"#).is_err());
    }
}
