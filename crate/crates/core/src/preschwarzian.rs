//! Pre-Schwarzian coordinates `f -> (f''/f', f'(0))` and refined membership.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::{bergman_norm, bergman_norm_sq_prefix, DivergenceRule, LadderVerdict};
use crate::series::{samples_for, PowerSeries, C64};

/// Truncations of the membership ladder.
pub const MEMBERSHIP_LADDER: [usize; 4] = [64, 128, 256, 512];

/// Perturbation scales tried by [`openness_probe`].
pub const OPENNESS_SCALES: [f64; 3] = [1e-3, 1e-2, 1e-1];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreSchwarzianCoords {
    pub phi: PowerSeries,
    pub d: C64,
}

impl PreSchwarzianCoords {
    pub fn new(phi: PowerSeries, d: C64) -> Result<Self> {
        if !phi.is_interior() {
            return Err(Error::UnsupportedKind { op: "PreSchwarzianCoords", kind: "exterior" });
        }
        if d.norm() == 0.0 || !d.re.is_finite() || !d.im.is_finite() {
            return Err(Error::InvalidInput("f'(0) must be finite and nonzero".into()));
        }
        Ok(Self { phi, d })
    }
}

/// Relative size of `f(0)` accepted as zero (sampling round-off).
const NORMALIZATION_TOL: f64 = 1e-12;

fn check_normalized(f: &PowerSeries) -> Result<()> {
    if !f.is_interior() {
        return Err(Error::UnsupportedKind { op: "pre_schwarzian", kind: "exterior" });
    }
    let scale: f64 = f.coeffs().iter().map(|a| a.norm()).sum();
    if f.coeff(0).norm() > NORMALIZATION_TOL * scale {
        return Err(Error::Precondition("f(0) must vanish".into()));
    }
    if f.coeff(1).norm() == 0.0 {
        return Err(Error::Singular("f'(0) = 0".into()));
    }
    Ok(())
}

/// `f''/f'`, exact for the polynomial `f` up to the truncation.
pub fn pre_schwarzian(f: &PowerSeries) -> Result<PowerSeries> {
    check_normalized(f)?;
    let df = f.differentiate()?;
    df.differentiate()?.divide(&df)
}

pub fn chi(f: &PowerSeries) -> Result<PreSchwarzianCoords> {
    Ok(PreSchwarzianCoords { phi: pre_schwarzian(f)?, d: f.coeff(1) })
}

/// Inverse of [`chi`] together with the truncation loss.
#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub f: PowerSeries,
    /// Largest modulus of a coefficient pushed past the truncation by the
    /// two nested antiderivatives.
    pub truncation_loss: f64,
}

/// `f = d int_0^z exp(int_0^u phi)`.
pub fn chi_inverse(coords: &PreSchwarzianCoords) -> Result<PowerSeries> {
    Ok(chi_inverse_with_loss(coords)?.f)
}

pub fn chi_inverse_with_loss(coords: &PreSchwarzianCoords) -> Result<Reconstruction> {
    let n = coords.phi.truncation();
    let g = coords.phi.resized(n + 1).integrate0()?;
    let fprime = g.series.exp_series()?;
    let f = fprime.scaled(coords.d).integrate0()?;
    Ok(Reconstruction { f: f.series.resized(n), truncation_loss: g.dropped.max(f.dropped) })
}

/// `A(h) o f * f' + A(f)`: the pre-Schwarzian of `h o f` from that of `h`.
pub fn transfer_compose(a_h: &PowerSeries, f: &PowerSeries) -> Result<PowerSeries> {
    let a_f = pre_schwarzian(f)?;
    let n = f.truncation().max(a_h.truncation());
    let outer = PowerSeries::compose(a_h, &f.resized(n))?.series;
    let pulled = outer.multiply(&f.resized(n).differentiate()?)?.series;
    pulled.add(&a_f.resized(n))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderRung {
    pub truncation: usize,
    pub norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MembershipVerdict {
    pub ladder: Vec<LadderRung>,
    pub verdict: LadderVerdict,
    /// Slope of the squared truncated norm against `ln N`.
    pub growth: f64,
}

/// Bergman norms of `A(f)` truncated at each ladder rung.
pub fn oqco_membership(f: &PowerSeries) -> Result<MembershipVerdict> {
    oqco_membership_with(f, &MEMBERSHIP_LADDER, &DivergenceRule::default())
}

pub fn oqco_membership_with(f: &PowerSeries, ladder: &[usize], rule: &DivergenceRule) -> Result<MembershipVerdict> {
    let top = ladder.iter().copied().max().unwrap_or(2);
    // A(f) mod z^N needs f mod z^{N+2}.
    let a = pre_schwarzian(&f.resized(top + 2))?;
    let rungs: Vec<LadderRung> = ladder
        .iter()
        .map(|&n| LadderRung { truncation: n, norm: bergman_norm_sq_prefix(&a, n).sqrt() })
        .collect();
    let pairs: Vec<(usize, f64)> = rungs.iter().map(|r| (r.truncation, r.norm)).collect();
    let (verdict, growth) = rule.classify(&pairs);
    Ok(MembershipVerdict { ladder: rungs, verdict, growth })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum UnivalenceStatus {
    Pass,
    Fail { witness: [C64; 2] },
    Inconclusive { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnivalenceVerdict {
    #[serde(flatten)]
    pub status: UnivalenceStatus,
    /// Boundary samples and sampling radius actually used.
    pub samples: usize,
    pub radius: f64,
}

impl UnivalenceVerdict {
    pub fn passed(&self) -> bool {
        self.status == UnivalenceStatus::Pass
    }
}

fn winding(values: &[C64], about: C64) -> f64 {
    let m = values.len();
    (0..m)
        .map(|k| ((values[(k + 1) % m] - about) / (values[k] - about)).arg())
        .sum::<f64>()
        / std::f64::consts::TAU
}

fn cross(a: C64, b: C64) -> f64 {
    a.re * b.im - a.im * b.re
}

/// Proper or touching intersection of segments `[p1,p2]` and `[q1,q2]`.
fn segments_meet(p1: C64, p2: C64, q1: C64, q2: C64) -> bool {
    let d1 = cross(p2 - p1, q1 - p1);
    let d2 = cross(p2 - p1, q2 - p1);
    let d3 = cross(q2 - q1, p1 - q1);
    let d4 = cross(q2 - q1, p2 - q1);
    if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
        return true;
    }
    let on = |a: C64, b: C64, c: C64, d: f64| {
        d == 0.0 && c.re >= a.re.min(b.re) && c.re <= a.re.max(b.re) && c.im >= a.im.min(b.im) && c.im <= a.im.max(b.im)
    };
    on(p1, p2, q1, d1) || on(p1, p2, q2, d2) || on(q1, q2, p1, d3) || on(q1, q2, p2, d4)
}

/// Numerical univalence certificate: `f'` has no zeros inside `|z| = 1 - 1/M`
/// (argument principle) and the image of that circle is a simple curve of
/// winding number one about `f(0)`.
pub fn univalence_check(f: &PowerSeries, m: usize) -> Result<UnivalenceVerdict> {
    if !f.is_interior() {
        return Err(Error::UnsupportedKind { op: "univalence_check", kind: "exterior" });
    }
    let m = m.max(samples_for(f.truncation())).next_power_of_two();
    let radius = 1.0 - 1.0 / m as f64;
    let verdict = |status| Ok(UnivalenceVerdict { status, samples: m, radius });
    let boundary = f.sample_circle(radius, m)?;
    let points = boundary.points();
    let w = boundary.values;
    let dw = f.differentiate()?.sample_circle(radius, m)?.values;
    verdict(curve_status(&points, &w, &dw, f.coeff(0)))
}

/// Shared certificate for a sampled boundary curve `w` with derivative
/// samples `dw`: no critical points enclosed, simple, winding once about `about`.
pub(crate) fn curve_status(points: &[C64], w: &[C64], dw: &[C64], about: C64) -> UnivalenceStatus {
    let m = w.len();
    if dw.iter().any(|v| v.norm() == 0.0) {
        let k = dw.iter().position(|v| v.norm() == 0.0).unwrap();
        return UnivalenceStatus::Fail { witness: [points[k], points[k]] };
    }
    let wind_d = winding(dw, C64::new(0.0, 0.0));
    let wind = winding(w, about);
    if (wind_d - wind_d.round()).abs() > 0.1 || (wind - wind.round()).abs() > 0.1 {
        return UnivalenceStatus::Inconclusive {
            reason: "boundary curve under-resolved at this sampling".into(),
        };
    }
    let crossing = (0..m).any(|i| {
        (i + 2..m).any(|j| {
            if i == 0 && j == m - 1 {
                return false;
            }
            segments_meet(w[i], w[(i + 1) % m], w[j], w[(j + 1) % m])
        })
    });
    if wind_d.round() != 0.0 || wind.round() != 1.0 || crossing {
        // witness: the closest pair of non-neighbouring boundary samples
        let mut best = (f64::INFINITY, 0, 0);
        for i in 0..m {
            for j in i + 2..m {
                if i == 0 && j == m - 1 {
                    continue;
                }
                let d = (w[i] - w[j]).norm();
                if d < best.0 {
                    best = (d, i, j);
                }
            }
        }
        return UnivalenceStatus::Fail { witness: [points[best.1], points[best.2]] };
    }
    UnivalenceStatus::Pass
}

/// Target region for [`openness_probe`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Disc {
    pub center: C64,
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleOutcome {
    pub delta: f64,
    pub trials: usize,
    pub failures: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpennessReport {
    pub scales: Vec<ScaleOutcome>,
    /// Largest scale at which every trial stayed univalent with image closure in `E`.
    pub largest_passing: Option<f64>,
}

/// Degree of the random perturbation directions.
const DIRECTION_DEGREE: usize = 8;

/// Unit-Bergman-norm random polynomial direction.
pub fn random_direction(rng: &mut ChaCha8Rng, n: usize) -> Result<PowerSeries> {
    let deg = DIRECTION_DEGREE.min(n - 1);
    let mut coeffs = vec![C64::new(0.0, 0.0); n];
    for c in coeffs.iter_mut().take(deg + 1) {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        *c = C64::new(re, im);
    }
    let dir = PowerSeries::interior(coeffs)?;
    let norm = bergman_norm(&dir)?;
    Ok(dir.scaled(C64::new(1.0 / norm, 0.0)))
}

fn closure_inside(f: &PowerSeries, e: &Disc) -> Result<bool> {
    let shifted = f.sub(&PowerSeries::constant(e.center, f.truncation())?)?;
    Ok(shifted.sup_on_circle(1.0, 4 * samples_for(f.truncation()))? < e.radius)
}

/// Perturbs `A(f)` along random directions of Bergman norm `delta` and checks
/// that the reconstructed maps stay univalent with `f(closed disc)` inside `E`.
pub fn openness_probe(
    f: &PowerSeries,
    e: &Disc,
    scales: &[f64],
    trials: usize,
    seed: u64,
    resolution: usize,
) -> Result<OpennessReport> {
    if !univalence_check(f, resolution)?.passed() {
        return Err(Error::Precondition("openness probe needs a univalent base map".into()));
    }
    let base = chi(f)?;
    let n = base.phi.truncation();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut outcomes = Vec::with_capacity(scales.len());
    for &delta in scales {
        let mut failures = 0;
        for _ in 0..trials {
            let dir = random_direction(&mut rng, n)?;
            let phi = base.phi.add(&dir.scaled(C64::new(delta, 0.0)))?;
            let g = chi_inverse(&PreSchwarzianCoords::new(phi, base.d)?)?;
            let ok = univalence_check(&g, resolution)?.passed() && closure_inside(&g, e)?;
            if !ok {
                failures += 1;
            }
        }
        outcomes.push(ScaleOutcome { delta, trials, failures });
    }
    let largest_passing = outcomes
        .iter()
        .filter(|o| o.failures == 0)
        .map(|o| o.delta)
        .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.max(d))));
    Ok(OpennessReport { scales: outcomes, largest_passing })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn poly(v: &[C64], n: usize) -> PowerSeries {
        PowerSeries::from_leading(v, n).unwrap()
    }

    fn koebe(n: usize) -> PowerSeries {
        PowerSeries::interior((0..n).map(|k| c(k as f64)).collect()).unwrap()
    }

    #[test]
    fn identity_has_zero_coordinates() {
        let z = PowerSeries::identity(16).unwrap();
        let coords = chi(&z).unwrap();
        assert!(coords.phi.coeffs().iter().all(|a| a.norm() == 0.0));
        assert_eq!(coords.d, c(1.0));
        let lin = chi_inverse(&PreSchwarzianCoords::new(PowerSeries::zeros(crate::SeriesKind::Interior, 8).unwrap(), C64::new(0.0, 2.0)).unwrap()).unwrap();
        assert_eq!(lin, PowerSeries::monomial(1, C64::new(0.0, 2.0), 8).unwrap());
    }

    #[test]
    fn koebe_coefficients() {
        let a = pre_schwarzian(&koebe(40)).unwrap();
        for n in 0..38 {
            let expect = 3.0 + if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((a.coeff(n) - c(expect)).norm() < 1e-9 * expect, "n={n}");
        }
    }

    #[test]
    fn quadratic_closed_form() {
        let cc = C64::new(0.05, -0.02);
        let a = pre_schwarzian(&poly(&[c(0.0), c(1.0), cc], 24)).unwrap();
        // 2c / (1 + 2cz) = sum 2c (-2c)^n z^n
        for n in 0..24 {
            let expect = 2.0 * cc * (-2.0 * cc).powu(n as u32);
            assert!((a.coeff(n) - expect).norm() < 1e-15);
        }
    }

    #[test]
    fn singular_and_unnormalized_inputs() {
        let z2 = poly(&[c(0.0), c(0.0), c(1.0)], 8);
        assert!(matches!(pre_schwarzian(&z2), Err(Error::Singular(_))));
        let shifted = poly(&[c(1.0), c(1.0)], 8);
        assert!(matches!(pre_schwarzian(&shifted), Err(Error::Precondition(_))));
    }

    #[test]
    fn transfer_matches_direct_composition() {
        // h = w + w^2/4, A(h) = (1/2) / (1 + w/2)
        let n = 32;
        let a_h = PowerSeries::interior((0..n).map(|k| c(0.5 * (-0.5f64).powi(k as i32))).collect()).unwrap();
        let f = poly(&[c(0.0), c(0.5)], n);
        let h = poly(&[c(0.0), c(1.0), c(0.25)], n);
        let direct = pre_schwarzian(&PowerSeries::compose(&h, &f).unwrap().series).unwrap();
        let via = transfer_compose(&a_h, &f).unwrap();
        assert!(via.max_coeff_diff(&direct) < 1e-10);

        let z = PowerSeries::identity(n).unwrap();
        assert!(transfer_compose(&a_h, &z).unwrap().max_coeff_diff(&a_h) < 1e-15);
        let zero = PowerSeries::zeros(crate::SeriesKind::Interior, n).unwrap();
        assert!(transfer_compose(&zero, &f).unwrap().max_coeff_diff(&pre_schwarzian(&f).unwrap()) < 1e-15);
    }

    #[test]
    fn membership_examples() {
        let z = PowerSeries::identity(8).unwrap();
        let v = oqco_membership(&z).unwrap();
        assert_eq!(v.verdict, LadderVerdict::Member);
        assert!(v.ladder.iter().all(|r| r.norm == 0.0));

        let v = oqco_membership(&poly(&[c(0.0), c(1.0), c(0.1)], 8)).unwrap();
        assert_eq!(v.verdict, LadderVerdict::Member);

        let v = oqco_membership(&koebe(600)).unwrap();
        assert_eq!(v.verdict, LadderVerdict::Diverging);
        for r in &v.ladder {
            let oracle: f64 = (0..r.truncation)
                .map(|n| {
                    let a = 3.0 + if n % 2 == 0 { 1.0 } else { -1.0 };
                    a * a / (n + 1) as f64
                })
                .sum::<f64>()
                * std::f64::consts::PI;
            assert!((r.norm * r.norm - oracle).abs() < 1e-8 * oracle);
        }
        assert!((v.growth - 10.0 * std::f64::consts::PI).abs() < 1.0);
    }

    #[test]
    fn univalence_examples() {
        assert!(univalence_check(&PowerSeries::identity(8).unwrap(), 512).unwrap().passed());
        let z2 = poly(&[c(0.0), c(0.0), c(1.0)], 8);
        match univalence_check(&z2, 512).unwrap().status {
            UnivalenceStatus::Fail { witness: [a, b] } => assert!((a + b).norm() < 1e-12),
            other => panic!("expected failure, got {other:?}"),
        }
        assert!(univalence_check(&poly(&[c(0.0), c(1.0), c(0.4)], 8), 4096).unwrap().passed());
        assert!(!univalence_check(&poly(&[c(0.0), c(1.0), c(0.6)], 8), 1024).unwrap().passed());
    }

    #[test]
    fn openness_examples() {
        let z = PowerSeries::identity(16).unwrap();
        let wide = Disc { center: c(0.0), radius: 2.0 };
        let rep = openness_probe(&z, &wide, &OPENNESS_SCALES, 8, 7, 512).unwrap();
        assert_eq!(rep.largest_passing, Some(1e-1));
        let tight = Disc { center: c(0.0), radius: 1.0001 };
        let rep = openness_probe(&z, &tight, &[1e-1], 8, 7, 512).unwrap();
        assert!(rep.scales[0].failures > 0);
        let rep = openness_probe(&z, &tight, &[0.0], 4, 7, 512).unwrap();
        assert_eq!(rep.scales[0].failures, 0);
    }
}
