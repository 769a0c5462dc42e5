//! Norms and integral functionals on the disc and its exterior.
//!
//! Coefficient-space norms (Bergman, Dirichlet) are exact Parseval sums on the
//! truncation. Everything else goes through [`crate::quadrature::DiscRule`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{gauss_jacobi_unit, gauss_legendre, golden_max, integrate_disc};
use crate::series::{samples_for, PowerSeries, C64};

use std::f64::consts::{PI, TAU};

/// Relative tolerance for the quadrature refinement ladders.
pub const QUADRATURE_TOL: f64 = 1e-10;
const QUADRATURE_LEVELS: usize = 5;

/// JSON report shared by the norm evaluators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub norm: f64,
    pub converged: bool,
    pub grid: GridInfo,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridInfo {
    pub radial: usize,
    pub angles: usize,
}

fn require_interior(s: &PowerSeries, op: &'static str) -> Result<()> {
    if s.is_interior() {
        Ok(())
    } else {
        Err(Error::UnsupportedKind { op, kind: "exterior" })
    }
}

/// `sqrt(iint_D |phi|^2 dA) = sqrt(pi sum |a_n|^2 / (n+1))`.
pub fn bergman_norm(phi: &PowerSeries) -> Result<f64> {
    require_interior(phi, "bergman_norm")?;
    Ok(bergman_norm_sq_prefix(phi, phi.truncation()).sqrt())
}

/// Squared Bergman norm of the first `n` coefficients.
pub fn bergman_norm_sq_prefix(phi: &PowerSeries, n: usize) -> f64 {
    PI * phi
        .coeffs()
        .iter()
        .take(n)
        .enumerate()
        .map(|(k, a)| a.norm_sqr() / (k + 1) as f64)
        .sum::<f64>()
}

/// `sqrt(iint_D |psi'|^2 dA) = sqrt(pi sum n |a_n|^2)`; requires `psi(0) = 0`.
pub fn dirichlet_norm(psi: &PowerSeries) -> Result<f64> {
    require_interior(psi, "dirichlet_norm")?;
    if psi.coeff(0).norm() != 0.0 {
        return Err(Error::Precondition("dirichlet_norm requires psi(0) = 0".into()));
    }
    Ok((PI * psi.coeffs().iter().enumerate().map(|(k, a)| k as f64 * a.norm_sqr()).sum::<f64>())
        .sqrt())
}

/// Verdict rule for norm ladders over growing truncations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivergenceRule {
    /// Truncated norm above which the ladder is declared divergent.
    pub threshold: f64,
    /// Least-squares slope of the squared norm against `ln N` above which
    /// growth counts as divergent.
    pub slope: f64,
    /// Relative change on the last rung below which the ladder has settled.
    pub settle: f64,
}

impl Default for DivergenceRule {
    fn default() -> Self {
        Self { threshold: 1e3, slope: 0.5, settle: 1e-3 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LadderVerdict {
    Member,
    Diverging,
    Inconclusive,
}

impl DivergenceRule {
    /// Classifies `(N, norm)` pairs; returns the verdict and the fitted slope of
    /// `norm^2` against `ln N`.
    pub fn classify(&self, ladder: &[(usize, f64)]) -> (LadderVerdict, f64) {
        let slope = log_slope(ladder);
        let last = ladder.last().map_or(0.0, |l| l.1);
        if last > self.threshold || slope > self.slope {
            return (LadderVerdict::Diverging, slope);
        }
        let settled = match ladder {
            [.., a, b] => {
                let scale = b.1 * b.1;
                scale == 0.0 || (b.1 * b.1 - a.1 * a.1).abs() <= self.settle * scale
            }
            _ => false,
        };
        if settled {
            (LadderVerdict::Member, slope)
        } else {
            (LadderVerdict::Inconclusive, slope)
        }
    }
}

fn log_slope(ladder: &[(usize, f64)]) -> f64 {
    let k = ladder.len() as f64;
    if ladder.len() < 2 {
        return 0.0;
    }
    let xs: Vec<f64> = ladder.iter().map(|l| (l.0 as f64).ln()).collect();
    let ys: Vec<f64> = ladder.iter().map(|l| l.1 * l.1).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Polar grid for the hyperbolic sup norm.
#[derive(Clone, Debug)]
pub struct SupGrid {
    pub rings: usize,
    pub angles: usize,
    pub refinements: usize,
    pub tol: f64,
}

impl Default for SupGrid {
    fn default() -> Self {
        Self { rings: 32, angles: 64, refinements: 4, tol: 1e-6 }
    }
}

fn hyp_grid_max(phi: &PowerSeries, rings: usize, angles: usize) -> Result<(f64, C64)> {
    let m = angles.max(samples_for(phi.truncation()));
    let mut radii: Vec<f64> = (0..rings).map(|j| j as f64 / rings as f64).collect();
    let ladder = (phi.truncation() as f64).log2().ceil() as i32 + 4;
    radii.extend((1..=ladder).map(|k| 1.0 - 2f64.powi(-k)));
    let mut best = (f64::NEG_INFINITY, C64::new(0.0, 0.0));
    for r in radii {
        let weight = 1.0 - r * r;
        if r == 0.0 {
            let v = phi.coeff(0).norm();
            if v > best.0 {
                best = (v, C64::new(0.0, 0.0));
            }
            continue;
        }
        let samples = phi.sample_circle(r, m)?;
        for (k, v) in samples.values.iter().enumerate() {
            let val = weight * v.norm();
            if val > best.0 {
                best = (val, C64::from_polar(r, TAU * k as f64 / m as f64));
            }
        }
    }
    Ok(best)
}

fn hyp_value(phi: &PowerSeries, z: C64) -> f64 {
    (1.0 - z.norm_sqr()) * phi.eval(z).norm()
}

/// Coordinatewise golden-section polish of a grid maximiser.
fn polish(phi: &PowerSeries, start: C64, dr: f64, dt: f64) -> f64 {
    let (mut r, mut t) = (start.norm(), start.arg());
    let mut best = hyp_value(phi, start);
    for _ in 0..3 {
        let (lo, hi) = ((r - dr).max(0.0), (r + dr).min(1.0));
        let (rn, vr) = golden_max(|x| hyp_value(phi, C64::from_polar(x, t)), lo, hi, 1e-12);
        if vr > best {
            best = vr;
            r = rn;
        }
        let (tn, vt) = golden_max(|x| hyp_value(phi, C64::from_polar(r, x)), t - dt, t + dt, 1e-12);
        if vt > best {
            best = vt;
            t = tn;
        }
    }
    best
}

/// `sup_D (1-|z|^2) |phi(z)|` on a polar grid with doubling refinement.
/// A non-converged result is a lower bound.
pub fn sup_hyp_norm(phi: &PowerSeries, grid: &SupGrid) -> Result<NormReport> {
    require_interior(phi, "sup_hyp_norm")?;
    let (mut rings, mut angles) = (grid.rings, grid.angles);
    let eval = |rings: usize, angles: usize| -> Result<f64> {
        let (grid_max, at) = hyp_grid_max(phi, rings, angles)?;
        let m = angles.max(samples_for(phi.truncation()));
        let dr = 2.0 / rings as f64;
        let dt = 2.0 * TAU / m as f64;
        Ok(grid_max.max(polish(phi, at, dr, dt)))
    };
    let mut prev = eval(rings, angles)?;
    for _ in 0..grid.refinements {
        rings *= 2;
        angles *= 2;
        let next = eval(rings, angles)?;
        if (next - prev).abs() <= grid.tol * next.abs().max(1e-300) {
            return Ok(NormReport {
                norm: next.max(prev),
                converged: true,
                grid: GridInfo { radial: rings, angles },
            });
        }
        prev = prev.max(next);
    }
    Ok(NormReport { norm: prev, converged: false, grid: GridInfo { radial: rings, angles } })
}

/// Which function the weighted integral raises to the power `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntegrandRole {
    /// `|f'|^p`
    FPrimePower,
    /// `|phi|^2` for a Bergman element `phi`
    PhiSquared,
    /// `|psi|^p`
    PsiPower,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedIntegralSpec {
    pub p: f64,
    pub alpha: f64,
    pub role: IntegrandRole,
}

impl WeightedIntegralSpec {
    pub fn new(p: f64, alpha: f64, role: IntegrandRole) -> Result<Self> {
        let spec = Self { p, alpha, role };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p.is_finite()) {
            return Err(Error::Precondition(format!("exponent p = {} must be positive", self.p)));
        }
        if !(self.alpha > -1.0) {
            return Err(Error::Precondition(format!("weight exponent {} must exceed -1", self.alpha)));
        }
        if self.role == IntegrandRole::PhiSquared && self.p != 2.0 {
            return Err(Error::Precondition("phi-squared role requires p = 2".into()));
        }
        Ok(())
    }
}

/// `iint_D |g|^p (1-|z|^2)^alpha dA` where `g` is `f'` or `f` per the role.
pub fn weighted_fprime_integral(f: &PowerSeries, spec: &WeightedIntegralSpec) -> Result<NormReport> {
    require_interior(f, "weighted_fprime_integral")?;
    spec.validate()?;
    let g = match spec.role {
        IntegrandRole::FPrimePower => f.differentiate()?,
        IntegrandRole::PhiSquared | IntegrandRole::PsiPower => f.clone(),
    };
    weighted_power_integral(&[(&g, spec.p)], spec.alpha)
}

/// `iint_D prod_i |g_i|^{p_i} (1-|z|^2)^alpha dA` by the refinement ladder.
pub fn weighted_power_integral(factors: &[(&PowerSeries, f64)], alpha: f64) -> Result<NormReport> {
    let n = factors.iter().map(|(g, _)| g.truncation()).max().unwrap_or(2);
    let q = integrate_disc(alpha, QUADRATURE_TOL, QUADRATURE_LEVELS, |r, m| {
        let m = m.max(samples_for(n));
        let mut acc = vec![1.0; m];
        for (g, p) in factors {
            let s = g.sample_circle(r, m)?;
            for (a, v) in acc.iter_mut().zip(&s.values) {
                *a *= v.norm().powf(*p);
            }
        }
        Ok(acc)
    })?;
    Ok(NormReport {
        norm: q.value,
        converged: q.converged,
        grid: GridInfo { radial: q.radial, angles: q.angles },
    })
}

/// `(iint_{g(D)} |a|^2 dA)^{1/2}`, computed as `iint_D |a(g)|^2 |g'|^2 dA`.
/// `a` must be finite on `g` applied to the closed disc.
pub fn pullback_bergman_norm<A>(a: A, g: &PowerSeries) -> Result<NormReport>
where
    A: Fn(C64) -> C64,
{
    require_interior(g, "pullback_bergman_norm")?;
    let dg = g.differentiate()?;
    let n = g.truncation();
    let q = integrate_disc(0.0, QUADRATURE_TOL, QUADRATURE_LEVELS, |r, m| {
        let m = m.max(samples_for(n));
        let w = g.sample_circle(r, m)?;
        let dw = dg.sample_circle(r, m)?;
        Ok(w.values.iter().zip(&dw.values).map(|(&w, d)| a(w).norm_sqr() * d.norm_sqr()).collect())
    })?;
    Ok(NormReport {
        norm: q.value.sqrt(),
        converged: q.converged,
        grid: GridInfo { radial: q.radial, angles: q.angles },
    })
}

/// `|f(0)| + (iint |f'|^p (1-|z|^2)^{p-2} dA)^{1/p}` for `p` in `(1, inf)`.
pub fn besov_norm(f: &PowerSeries, p: f64) -> Result<NormReport> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Precondition(format!("Besov exponent {p} must lie in (1, inf)")));
    }
    let spec = WeightedIntegralSpec::new(p, p - 2.0, IntegrandRole::FPrimePower)?;
    let mut rep = weighted_fprime_integral(f, &spec)?;
    rep.norm = f.coeff(0).norm() + rep.norm.powf(1.0 / p);
    Ok(rep)
}

/// Ring maxima of `(1-r^2)|g'|` on `r_k = 1 - 2^-k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochProfile {
    pub radii: Vec<f64>,
    pub maxima: Vec<f64>,
    /// Monotone decay by at least a factor 3/4 across the last quartile.
    pub decaying: bool,
}

pub fn little_bloch_profile(g: &PowerSeries) -> Result<BlochProfile> {
    require_interior(g, "little_bloch_profile")?;
    let dg = g.differentiate()?;
    // Stop three octaves short of the truncation scale 1 - 1/N, where every
    // polynomial starts to look little-Bloch.
    let levels = ((g.truncation() as f64).log2().floor() as i32 - 3).max(4);
    let m = samples_for(g.truncation());
    let mut radii = Vec::new();
    let mut maxima = Vec::new();
    for k in 1..=levels {
        let r = 1.0 - 2f64.powi(-k);
        let s = dg.sample_circle(r, m)?;
        let max = s.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        radii.push(r);
        maxima.push((1.0 - r * r) * max);
    }
    let q = (maxima.len() / 4).max(2);
    let tail = &maxima[maxima.len() - q..];
    let monotone = tail.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    let decaying = monotone && tail[tail.len() - 1] <= 0.75 * tail[0];
    Ok(BlochProfile { radii, maxima, decaying })
}

/// How a Beltrami field is continued beyond the outer grid radius.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailModel {
    /// `mu = 0` beyond the grid.
    Vanishing,
    /// `|mu(s e^{it})| <= |mu(R e^{it})|` for `s >= R`; yields an upper bound.
    RayDominated,
}

/// Samples of a Beltrami coefficient on a polar grid in the exterior of the disc.
#[derive(Clone, Debug)]
pub struct BeltramiGrid {
    radii: Vec<f64>,
    radial_weights: Vec<f64>,
    angles: usize,
    /// Row-major: `values[i * angles + k]` at radius `radii[i]`, angle `2 pi k / angles`.
    values: Vec<C64>,
    outer: f64,
    outer_values: Vec<C64>,
    tail: TailModel,
}

impl BeltramiGrid {
    /// Samples `mu` with `per_panel` Gauss-Legendre radii on each panel
    /// `[breaks[i], breaks[i+1]]`.
    pub fn sample<F>(mu: F, breaks: &[f64], per_panel: usize, angles: usize, tail: TailModel) -> Result<Self>
    where
        F: Fn(C64) -> C64,
    {
        if breaks.len() < 2 || breaks.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("panel breaks must be increasing".into()));
        }
        if breaks[0] < 1.0 {
            return Err(Error::Precondition("Beltrami grid must lie outside the unit disc".into()));
        }
        let mut radii = Vec::new();
        let mut radial_weights = Vec::new();
        for w in breaks.windows(2) {
            let (x, wt) = gauss_legendre(per_panel, w[0], w[1])?;
            radii.extend(x);
            radial_weights.extend(wt);
        }
        let outer = *breaks.last().unwrap();
        let ring = |r: f64| -> Vec<C64> {
            (0..angles).map(|k| mu(C64::from_polar(r, TAU * k as f64 / angles as f64))).collect()
        };
        let mut values = Vec::with_capacity(radii.len() * angles);
        for &r in &radii {
            values.extend(ring(r));
        }
        let outer_values = ring(outer);
        Self::from_parts(radii, radial_weights, angles, values, outer, outer_values, tail)
    }

    pub fn from_parts(
        radii: Vec<f64>,
        radial_weights: Vec<f64>,
        angles: usize,
        values: Vec<C64>,
        outer: f64,
        outer_values: Vec<C64>,
        tail: TailModel,
    ) -> Result<Self> {
        if radii.iter().any(|&r| r <= 1.0) {
            return Err(Error::Precondition("Beltrami grid touches the closed unit disc".into()));
        }
        if values.len() != radii.len() * angles || outer_values.len() != angles {
            return Err(Error::InvalidInput("Beltrami grid shape mismatch".into()));
        }
        if values.iter().chain(&outer_values).any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidInput("Beltrami samples must be finite".into()));
        }
        Ok(Self { radii, radial_weights, angles, values, outer, outer_values, tail })
    }

    pub fn outer_radius(&self) -> f64 {
        self.outer
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypL2Report {
    pub norm: f64,
    /// Upper bound on the squared contribution from `|z| > outer radius`.
    pub tail_bound: f64,
}

/// `(iint_{D*} (|z|^2-1)^{-2} |mu|^2 dA)^{1/2}` over the grid plus the tail bound.
pub fn hyp_l2_norm(mu: &BeltramiGrid) -> Result<HypL2Report> {
    let m = mu.angles;
    let dtheta = TAU / m as f64;
    let mut total = 0.0;
    for (i, (&r, &w)) in mu.radii.iter().zip(&mu.radial_weights).enumerate() {
        let row = &mu.values[i * m..(i + 1) * m];
        let ang: f64 = row.iter().map(|v| v.norm_sqr()).sum::<f64>() * dtheta;
        total += w * r * ang / (r * r - 1.0).powi(2);
    }
    let tail_bound = match mu.tail {
        TailModel::Vanishing => 0.0,
        TailModel::RayDominated => {
            let ang: f64 = mu.outer_values.iter().map(|v| v.norm_sqr()).sum::<f64>() * dtheta;
            // int_R^inf s / (s^2-1)^2 ds = 1 / (2 (R^2-1))
            ang / (2.0 * (mu.outer * mu.outer - 1.0))
        }
    };
    Ok(HypL2Report { norm: (total + tail_bound).sqrt(), tail_bound })
}

/// Largest sampled `|mu|`, including the outer ring.
pub fn sup_norm(mu: &BeltramiGrid) -> f64 {
    mu.values.iter().chain(&mu.outer_values).map(|v| v.norm()).fold(0.0, f64::max)
}

/// Per-point record of the box condition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxSample {
    pub radius: f64,
    pub measure: f64,
    /// `mu(S(z))^{1/q} (log((1+r)/(1-r)))^{1/p'}`; the smallest admissible C.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CarlesonReport {
    pub q: f64,
    pub p: f64,
    pub weight_exponent: f64,
    pub samples: Vec<BoxSample>,
    pub constant: f64,
}

/// Measure of the box `S(z)` for `dmu = (1-|zeta|^2)^w dA` by tensor quadrature:
/// Gauss-Jacobi across the radial band `|z| <= |zeta| < 1`, Gauss-Legendre
/// over the arc `|arg(z conj(zeta))| <= pi (1-|z|)`.
pub fn carleson_box(radius: f64, weight_exponent: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&radius) {
        return Err(Error::Precondition(format!("box centre radius {radius} must lie in [0,1)")));
    }
    let width = (TAU * (1.0 - radius)).min(TAU);
    let (s, ws) = gauss_jacobi_unit(16, weight_exponent)?;
    let (_, wa) = gauss_legendre(8, -width / 2.0, width / 2.0)?;
    // u = 1 - rho^2 = (1 - r^2) s, rho d rho = -du/2
    let band = 1.0 - radius * radius;
    let mut total = 0.0;
    for (_, w) in s.iter().zip(&ws) {
        for wt in &wa {
            total += 0.5 * band.powf(weight_exponent + 1.0) * w * wt;
        }
    }
    Ok(total)
}

/// Smallest `C` with `mu(S(z))^{1/q} <= C (log((1+|z|)/(1-|z|)))^{-1/p'}` on the grid.
pub fn carleson_box_measure(q: f64, p: f64, weight_exponent: f64, radii: &[f64]) -> Result<CarlesonReport> {
    if !(1.0 < p && p < q && q.is_finite()) {
        return Err(Error::Precondition(format!("need 1 < p < q < inf, got p = {p}, q = {q}")));
    }
    let p_dual = p / (p - 1.0);
    let mut samples = Vec::with_capacity(radii.len());
    let mut constant: f64 = 0.0;
    for &r in radii {
        let measure = carleson_box(r, weight_exponent)?;
        let log = ((1.0 + r) / (1.0 - r)).ln();
        let ratio = measure.powf(1.0 / q) * log.powf(1.0 / p_dual);
        constant = constant.max(ratio);
        samples.push(BoxSample { radius: r, measure, ratio });
    }
    Ok(CarlesonReport { q, p, weight_exponent, samples, constant })
}

/// Substitution oracle for radial weights: `int_a^1 (1-r^2)^w r dr`.
pub fn radial_weight_mass(from: f64, w: f64) -> f64 {
    (1.0 - from * from).powf(w + 1.0) / (2.0 * (w + 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn bergman_examples() {
        let one = PowerSeries::constant(c(1.0), 4).unwrap();
        assert!((bergman_norm(&one).unwrap() - PI.sqrt()).abs() < 1e-15);
        let z3 = PowerSeries::monomial(3, c(1.0), 8).unwrap();
        assert!((bergman_norm(&z3).unwrap() - (PI / 4.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn dirichlet_examples() {
        let z = PowerSeries::identity(4).unwrap();
        assert!((dirichlet_norm(&z).unwrap() - PI.sqrt()).abs() < 1e-15);
        let half_z2 = PowerSeries::monomial(2, c(0.5), 4).unwrap();
        assert!((dirichlet_norm(&half_z2).unwrap() - (PI / 2.0).sqrt()).abs() < 1e-15);
        let shifted = PowerSeries::from_leading(&[c(1.0), c(1.0)], 4).unwrap();
        assert!(matches!(dirichlet_norm(&shifted), Err(Error::Precondition(_))));
    }

    #[test]
    fn sup_norm_examples() {
        let one = PowerSeries::constant(c(1.0), 4).unwrap();
        let rep = sup_hyp_norm(&one, &SupGrid::default()).unwrap();
        assert!((rep.norm - 1.0).abs() < 1e-12 && rep.converged);
        // max_r (1-r^2) r = 2/(3 sqrt 3)
        let z = PowerSeries::identity(4).unwrap();
        let rep = sup_hyp_norm(&z, &SupGrid::default()).unwrap();
        assert!((rep.norm - 2.0 / (3.0 * 3f64.sqrt())).abs() < 1e-9, "{}", rep.norm);
    }

    #[test]
    fn weighted_integral_examples() {
        let z = PowerSeries::identity(4).unwrap();
        let spec = WeightedIntegralSpec::new(2.0, 0.0, IntegrandRole::FPrimePower).unwrap();
        assert!((weighted_fprime_integral(&z, &spec).unwrap().norm - PI).abs() < 1e-12);
        // 2 pi int_0^1 (1-r^2)^{-1/2} r dr = 2 pi
        let spec = WeightedIntegralSpec::new(4.0, -0.5, IntegrandRole::FPrimePower).unwrap();
        assert!((weighted_fprime_integral(&z, &spec).unwrap().norm - TAU).abs() < 1e-12);
        assert!(WeightedIntegralSpec::new(2.0, -1.0, IntegrandRole::FPrimePower).is_err());
        assert!(WeightedIntegralSpec::new(0.0, 0.0, IntegrandRole::FPrimePower).is_err());
    }

    #[test]
    fn besov_examples() {
        let zero = PowerSeries::zeros(crate::series::SeriesKind::Interior, 4).unwrap();
        assert_eq!(besov_norm(&zero, 3.0).unwrap().norm, 0.0);
        let z = PowerSeries::identity(4).unwrap();
        assert!((besov_norm(&z, 2.0).unwrap().norm - PI.sqrt()).abs() < 1e-12);
        assert!(besov_norm(&z, 1.0).is_err());
    }

    #[test]
    fn bloch_profile_of_identity_decays() {
        let z = PowerSeries::identity(64).unwrap();
        let prof = little_bloch_profile(&z).unwrap();
        assert!(prof.decaying);
        for (r, m) in prof.radii.iter().zip(&prof.maxima) {
            assert!((m - (1.0 - r * r)).abs() < 1e-14);
        }
    }

    #[test]
    fn beltrami_trivial_and_radial() {
        let zero = BeltramiGrid::sample(|_| C64::new(0.0, 0.0), &[1.0, 4.0], 8, 16, TailModel::RayDominated)
            .unwrap();
        assert_eq!(hyp_l2_norm(&zero).unwrap().norm, 0.0);
        assert_eq!(sup_norm(&zero), 0.0);

        let cst = 0.3;
        let mu = BeltramiGrid::sample(
            |z| if z.norm() > 1.5 { C64::new(cst, 0.0) } else { C64::new(0.0, 0.0) },
            &[1.0, 1.5, 2.0],
            16,
            32,
            TailModel::Vanishing,
        )
        .unwrap();
        // 2 pi c^2 int_{1.5}^2 r/(r^2-1)^2 dr = pi c^2 (1/1.25 - 1/3)
        let oracle = (PI * cst * cst * (1.0 / 1.25 - 1.0 / 3.0)).sqrt();
        assert!((hyp_l2_norm(&mu).unwrap().norm - oracle).abs() < 1e-12);

        let decay = BeltramiGrid::sample(
            |z| if z.norm() > 1.5 { C64::new(cst / z.norm_sqr(), 0.0) } else { C64::new(0.0, 0.0) },
            &[1.0, 1.5, 4.0],
            8,
            16,
            TailModel::RayDominated,
        )
        .unwrap();
        let sup = sup_norm(&decay);
        // nearest node above 1.5 sits at about 1.55
        assert!(sup <= cst / 2.25 && sup > 0.9 * cst / 2.25);
        assert!(BeltramiGrid::sample(|_| C64::new(0.0, 0.0), &[0.9, 2.0], 4, 4, TailModel::Vanishing).is_err());
    }

    #[test]
    fn carleson_examples() {
        // S(0) is the whole disc: 2 pi int_0^1 (1-r^2)^{1/2} r dr = 2 pi / 3
        assert!((carleson_box(0.0, 0.5).unwrap() - TAU / 3.0).abs() < 1e-13);
        let inner = carleson_box(0.5, 0.5).unwrap();
        let outer = carleson_box(0.8, 0.5).unwrap();
        assert!(outer <= inner);
        let radii: Vec<f64> = (1..200).map(|k| 1.0 - 0.97f64.powi(k)).collect();
        let rep = carleson_box_measure(4.0, 2.0, 0.5, &radii).unwrap();
        assert!(rep.constant.is_finite() && rep.constant > 0.0);
        assert!(carleson_box_measure(2.0, 2.0, 0.5, &radii).is_err());
    }
}
