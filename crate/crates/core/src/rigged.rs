//! Bordered spheres with riggings, cap sewing and rigged-moduli equivalence.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homeo::CircleHomeo;
use crate::mobius::{ExtPoint, Mobius};
use crate::norms::{bergman_norm, pullback_bergman_norm};
use crate::preschwarzian::{oqco_membership, pre_schwarzian, univalence_check, Disc, MembershipVerdict};
use crate::schiffer::CoordinateChain;
use crate::series::{samples_for, PowerSeries, C64};
use crate::uniformize::{CapOptions, CapStep};

use std::f64::consts::TAU;

/// Boundary samples used for separation and containment certificates.
pub const BOUNDARY_SAMPLES: usize = 1024;
/// Default sup-distance tolerance for [`moduli_equivalent`].
pub const EQUIVALENCE_TOL: f64 = 1e-6;

const COMPOSE_TAIL: f64 = 1e-15;
const MAX_COMPOSE_TRUNCATION: usize = 1024;

fn boundary(f: &PowerSeries, m: usize) -> Result<Vec<C64>> {
    Ok(f.sample_circle(1.0, m.max(samples_for(f.truncation())))?.values)
}

fn min_distance(a: &[C64], b: &[C64]) -> f64 {
    a.iter().flat_map(|p| b.iter().map(move |q| (p - q).norm())).fold(f64::INFINITY, f64::min)
}

/// Winding number of a closed sampled curve about `p`, rounded.
fn winding(curve: &[C64], p: C64) -> i64 {
    let n = curve.len();
    let total: f64 = (0..n).map(|j| ((curve[(j + 1) % n] - p) / (curve[j] - p)).arg()).sum();
    (total / TAU).round() as i64
}

/// Smallest distance between the boundaries of the images, or an error when
/// two closed images meet or nest.
fn certify_disjoint(curves: &[Vec<C64>], inside: &[C64]) -> Result<f64> {
    let mut sep = f64::INFINITY;
    for i in 0..curves.len() {
        for j in i + 1..curves.len() {
            let d = min_distance(&curves[i], &curves[j]);
            let crossing = |a: &[C64], b: &[C64], p: C64| {
                winding(a, p) != 0 || b.iter().any(|&q| winding(a, q) != 0)
            };
            if !(d > 0.0) || crossing(&curves[i], &curves[j], inside[j]) || crossing(&curves[j], &curves[i], inside[i]) {
                return Err(Error::Degeneration(format!("closed images {i} and {j} are not disjoint")));
            }
            sep = sep.min(d);
        }
    }
    Ok(sep)
}

/// Sphere minus the closed images of the cap embeddings.
#[derive(Clone, Debug, PartialEq)]
pub struct BorderedSphere {
    caps: Vec<PowerSeries>,
    separation: f64,
}

impl BorderedSphere {
    pub fn new(caps: Vec<PowerSeries>) -> Result<Self> {
        if caps.is_empty() {
            return Err(Error::InvalidInput("a bordered sphere needs at least one cap".into()));
        }
        let mut curves = Vec::with_capacity(caps.len());
        for (i, c) in caps.iter().enumerate() {
            if !c.is_interior() {
                return Err(Error::InvalidInput(format!("cap {i} must be an interior series")));
            }
            // univalence on the disc is tested for the normalized map
            let a = c.coeff(1);
            if a.norm() == 0.0 {
                return Err(Error::Singular(format!("cap {i} has vanishing derivative at 0")));
            }
            let mut norm = c.clone().into_coeffs();
            norm[0] = C64::new(0.0, 0.0);
            let norm = PowerSeries::interior(norm)?.scaled(1.0 / a);
            if !univalence_check(&norm, BOUNDARY_SAMPLES)?.passed() {
                return Err(Error::InvalidInput(format!("cap {i} is not univalent")));
            }
            curves.push(boundary(c, BOUNDARY_SAMPLES)?);
        }
        let centers: Vec<C64> = caps.iter().map(|c| c.coeff(0)).collect();
        let separation = certify_disjoint(&curves, &centers)?;
        Ok(Self { caps, separation })
    }

    pub fn caps(&self) -> &[PowerSeries] {
        &self.caps
    }

    /// Minimum distance between sampled boundary curves.
    pub fn separation(&self) -> f64 {
        self.separation
    }
}

#[derive(Serialize, Deserialize)]
struct RawRigged {
    caps: Vec<PowerSeries>,
    riggings: Vec<CircleHomeo>,
}

/// Bordered sphere with boundary parametrizations `psi_i = Psi_i o h_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRigged", into = "RawRigged")]
pub struct RiggedSphere {
    base: BorderedSphere,
    riggings: Vec<CircleHomeo>,
}

impl TryFrom<RawRigged> for RiggedSphere {
    type Error = Error;

    fn try_from(raw: RawRigged) -> Result<Self> {
        RiggedSphere::new(BorderedSphere::new(raw.caps)?, raw.riggings)
    }
}

impl From<RiggedSphere> for RawRigged {
    fn from(r: RiggedSphere) -> Self {
        RawRigged { caps: r.base.caps, riggings: r.riggings }
    }
}

impl RiggedSphere {
    pub fn new(base: BorderedSphere, riggings: Vec<CircleHomeo>) -> Result<Self> {
        if riggings.len() != base.caps.len() {
            return Err(Error::InvalidInput("one rigging per boundary curve is required".into()));
        }
        Ok(Self { base, riggings })
    }

    pub fn base(&self) -> &BorderedSphere {
        &self.base
    }

    pub fn riggings(&self) -> &[CircleHomeo] {
        &self.riggings
    }

    pub fn len(&self) -> usize {
        self.riggings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.riggings.is_empty()
    }
}

/// Embedded discs `phi_i` with `phi_i(0) = p_i` and disjoint closures.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonOverlappingMaps {
    pub maps: Vec<PowerSeries>,
    pub punctures: Vec<C64>,
    /// Minimum distance between the sampled boundary curves.
    pub separation: f64,
}

impl NonOverlappingMaps {
    pub fn new(maps: Vec<PowerSeries>) -> Result<Self> {
        let punctures: Vec<C64> = maps.iter().map(|m| m.coeff(0)).collect();
        let curves = maps.iter().map(|m| boundary(m, BOUNDARY_SAMPLES)).collect::<Result<Vec<_>>>()?;
        let separation = certify_disjoint(&curves, &punctures)?;
        Ok(Self { maps, punctures, separation })
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    /// `sigma o phi_i`; `sigma` must be finite on every closed image.
    pub fn transformed(&self, sigma: &Mobius) -> Result<Self> {
        let maps = self
            .maps
            .iter()
            .map(|m| compose_mobius(sigma, m))
            .collect::<Result<Vec<_>>>()?;
        Self::new(maps)
    }
}

fn compose_mobius(t: &Mobius, f: &PowerSeries) -> Result<PowerSeries> {
    let n = f.truncation();
    if t.c.norm() == 0.0 {
        let mut coeffs: Vec<C64> = f.coeffs().iter().map(|c| t.a / t.d * c).collect();
        coeffs[0] += t.b / t.d;
        return PowerSeries::interior(coeffs);
    }
    let pole = -t.d / t.c;
    let sup = f.sub(&PowerSeries::constant(pole, n)?)?;
    let clearance = boundary(&sup, BOUNDARY_SAMPLES)?.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
    if winding(&boundary(f, BOUNDARY_SAMPLES)?, pole) != 0 || !(clearance > 0.0) {
        return Err(Error::Domain { sup: f64::INFINITY });
    }
    let mut n = n.max(32);
    loop {
        let out = PowerSeries::compose_fn(f, n, samples_for(4 * n), |w| (t.a * w + t.b) / (t.c * w + t.d))?;
        if out.tail < COMPOSE_TAIL || n >= MAX_COMPOSE_TRUNCATION {
            return Ok(out.series);
        }
        n *= 2;
    }
}

#[derive(Clone, Debug)]
pub struct SewOptions {
    pub cap: CapOptions,
    /// Residual contract for each welding.
    pub tol: f64,
}

impl Default for SewOptions {
    fn default() -> Self {
        Self { cap: CapOptions::default(), tol: 1e-8 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sewing {
    pub maps: NonOverlappingMaps,
    /// Welding residual of each cap, in sewing order.
    pub residuals: Vec<f64>,
}

/// Glues a unit disc to each boundary curve along its rigging, one cap at a time.
pub fn sew_caps(rigged: &RiggedSphere, opts: &SewOptions) -> Result<Sewing> {
    let m = opts.cap.theodorsen.samples;
    let mut chain = CoordinateChain::default();
    let mut maps: Vec<PowerSeries> = Vec::with_capacity(rigged.len());
    let mut residuals = Vec::with_capacity(rigged.len());
    for (psi, h) in rigged.base.caps.iter().zip(&rigged.riggings) {
        let seam: Vec<C64> = (0..m)
            .map(|j| chain.push(psi.eval(h.at_angle(TAU * j as f64 / m as f64))))
            .collect::<Result<_>>()?;
        let step = CapStep::new(&seam, &opts.cap)?;
        if !(step.residual < opts.tol) {
            return Err(Error::Convergence { iterations: opts.cap.weld.max_iter, residual: step.residual });
        }
        for phi in maps.iter_mut() {
            let n = phi.truncation();
            let pushed = PowerSeries::compose_fn(phi, n, samples_for(4 * n), |w| {
                step.push(w).unwrap_or(C64::new(f64::NAN, f64::NAN))
            })?;
            *phi = pushed.series;
        }
        maps.push(step.cap_map());
        residuals.push(step.residual);
        chain.add(step);
    }
    let maps = NonOverlappingMaps::new(maps)
        .map_err(|e| Error::Degeneration(format!("sewn caps overlap: {e}")))?;
    Ok(Sewing { maps, residuals })
}

/// Chart `zeta` on the open disc `domain` with `zeta(p) = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalChart {
    pub domain: Disc,
    pub map: Mobius,
}

impl LocalChart {
    fn pole_clear(&self) -> bool {
        self.map.c.norm() == 0.0 || (-self.map.d / self.map.c - self.domain.center).norm() > self.domain.radius
    }

    /// `zeta o phi`, after checking `closure(phi(D))` lies in the domain.
    pub fn pull(&self, phi: &PowerSeries) -> Result<PowerSeries> {
        let far = boundary(phi, BOUNDARY_SAMPLES)?
            .iter()
            .map(|w| (w - self.domain.center).norm())
            .fold(0.0, f64::max);
        if !(far < self.domain.radius) {
            return Err(Error::ChartIncompatible(format!(
                "image reaches distance {far:.6e} from the chart centre, radius {:.6e}",
                self.domain.radius
            )));
        }
        compose_mobius(&self.map, phi)
    }
}

/// Charts with pairwise disjoint domains, one per puncture.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NChart {
    pub charts: Vec<LocalChart>,
}

impl NChart {
    pub fn new(charts: Vec<LocalChart>, punctures: &[C64]) -> Result<Self> {
        if charts.len() != punctures.len() {
            return Err(Error::InvalidInput("one chart per puncture is required".into()));
        }
        for (i, (c, &p)) in charts.iter().zip(punctures).enumerate() {
            if !c.pole_clear() {
                return Err(Error::InvalidInput(format!("chart {i} has a pole in its domain")));
            }
            let z = c.map.apply(ExtPoint::Finite(p));
            if z.finite().is_none_or(|z| z.norm() > 1e-12 * (1.0 + p.norm())) {
                return Err(Error::InvalidInput(format!("chart {i} does not send its puncture to 0")));
            }
            if (p - c.domain.center).norm() >= c.domain.radius {
                return Err(Error::InvalidInput(format!("chart {i} domain misses its puncture")));
            }
            for (j, d) in charts.iter().enumerate().skip(i + 1) {
                if (c.domain.center - d.domain.center).norm() < c.domain.radius + d.domain.radius {
                    return Err(Error::InvalidInput(format!("chart domains {i} and {j} overlap")));
                }
            }
        }
        Ok(Self { charts })
    }

    /// Discs about the punctures enclosing each image, with translation charts.
    pub fn enclosing(maps: &NonOverlappingMaps) -> Result<Self> {
        let domains = enclosing_domains(maps)?;
        let charts = domains
            .iter()
            .zip(&maps.punctures)
            .map(|(d, &p)| Ok(LocalChart { domain: *d, map: Mobius::affine(C64::new(1.0, 0.0), -p)? }))
            .collect::<Result<_>>()?;
        Self::new(charts, &maps.punctures)
    }

    /// Random Möbius charts `a (z - p) / (1 + b (z - p))` on the enclosing domains.
    pub fn random(maps: &NonOverlappingMaps, rng: &mut ChaCha8Rng) -> Result<Self> {
        let domains = enclosing_domains(maps)?;
        let charts = domains
            .iter()
            .zip(&maps.punctures)
            .map(|(d, &p)| {
                let a = C64::from_polar(rng.random_range(0.5..2.0), rng.random_range(0.0..TAU));
                // pole distance from p at least twice the domain reach
                let reach = d.radius + (d.center - p).norm();
                let b = C64::from_polar(rng.random_range(0.0..0.5) / reach, rng.random_range(0.0..TAU));
                let map = Mobius::new(a, -a * p, b, 1.0 - b * p)?;
                Ok(LocalChart { domain: *d, map })
            })
            .collect::<Result<_>>()?;
        Self::new(charts, &maps.punctures)
    }
}

fn enclosing_domains(maps: &NonOverlappingMaps) -> Result<Vec<Disc>> {
    let reach: Vec<f64> = maps
        .maps
        .iter()
        .zip(&maps.punctures)
        .map(|(f, &p)| Ok(boundary(f, BOUNDARY_SAMPLES)?.iter().map(|w| (w - p).norm()).fold(0.0, f64::max)))
        .collect::<Result<_>>()?;
    let n = reach.len();
    (0..n)
        .map(|i| {
            let gap = (0..n)
                .filter(|&j| j != i)
                .map(|j| (maps.punctures[i] - maps.punctures[j]).norm() - reach[i] - reach[j])
                .fold(f64::INFINITY, f64::min);
            if !(gap > 0.0) {
                return Err(Error::ChartIncompatible(format!("no disjoint enclosing disc for map {i}")));
            }
            let pad = (0.25 * gap).min(0.5 * reach[i]);
            Ok(Disc { center: maps.punctures[i], radius: reach[i] + pad })
        })
        .collect()
}

/// Membership of each `zeta_i o phi_i`.
pub fn oqco_on_sphere(maps: &NonOverlappingMaps, chart: &NChart) -> Result<Vec<MembershipVerdict>> {
    if chart.charts.len() != maps.len() {
        return Err(Error::InvalidInput("chart count differs from map count".into()));
    }
    maps.maps.iter().zip(&chart.charts).map(|(phi, c)| oqco_membership(&c.pull(phi)?)).collect()
}

/// Terms of the transfer bound `||A(T o g)|| <= ||A(T)||_{g(D)} + ||A(g)||`
/// for the chart transition `T = eta o zeta^{-1}` and `g = zeta o phi`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionBound {
    pub lhs: f64,
    pub transition: f64,
    pub base: f64,
    pub slack: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartIndependenceReport {
    pub verdicts_a: Vec<MembershipVerdict>,
    pub verdicts_b: Vec<MembershipVerdict>,
    pub bounds: Vec<TransitionBound>,
    pub agree: bool,
    pub passed: bool,
}

pub fn chart_independence_check(maps: &NonOverlappingMaps, a: &NChart, b: &NChart) -> Result<ChartIndependenceReport> {
    let verdicts_a = oqco_on_sphere(maps, a)?;
    let verdicts_b = oqco_on_sphere(maps, b)?;
    let agree = verdicts_a.iter().zip(&verdicts_b).all(|(x, y)| x.verdict == y.verdict);
    let mut bounds = Vec::with_capacity(maps.len());
    for ((phi, ca), cb) in maps.maps.iter().zip(&a.charts).zip(&b.charts) {
        let g = ca.pull(phi)?;
        let t = cb.map.compose(&ca.map.inverse());
        let lhs = bergman_norm(&pre_schwarzian(&cb.pull(phi)?)?)?;
        let base = bergman_norm(&pre_schwarzian(&g)?)?;
        let transition = pullback_bergman_norm(|w| -2.0 * t.c / (t.c * w + t.d), &g)?.norm;
        bounds.push(TransitionBound { lhs, transition, base, slack: transition + base - lhs });
    }
    let passed = agree && bounds.iter().all(|b| b.slack >= -1e-9 * (b.lhs + 1.0));
    Ok(ChartIndependenceReport { verdicts_a, verdicts_b, bounds, agree, passed })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub equivalent: bool,
    pub witness: Mobius,
    /// Largest chordal distance between `sigma(p_i^a)` and `p_i^b`.
    pub puncture_error: f64,
    /// Largest chordal distance between `sigma o phi_i^a` and `phi_i^b` on the circle.
    pub boundary_error: f64,
}

/// Decides whether `sigma o phi^a = phi^b` for the Möbius `sigma` matching the first three punctures.
pub fn moduli_equivalent(a: &NonOverlappingMaps, b: &NonOverlappingMaps, tol: f64) -> Result<EquivalenceReport> {
    if a.len() != b.len() {
        return Err(Error::InvalidInput("configurations have different numbers of punctures".into()));
    }
    if a.len() < 3 {
        return Err(Error::Unsupported("equivalence needs at least three punctures".into()));
    }
    let pts = |m: &NonOverlappingMaps| [0, 1, 2].map(|i| ExtPoint::Finite(m.punctures[i]));
    let sigma = Mobius::from_triples(pts(a), pts(b))?;
    let puncture_error = a
        .punctures
        .iter()
        .zip(&b.punctures)
        .map(|(&p, &q)| sigma.apply(p.into()).chordal(q.into()))
        .fold(0.0, f64::max);
    let mut boundary_error: f64 = 0.0;
    for (fa, fb) in a.maps.iter().zip(&b.maps) {
        let sa = boundary(fa, BOUNDARY_SAMPLES)?;
        let sb = boundary(fb, sa.len())?;
        let m = sa.len().min(sb.len());
        let (step_a, step_b) = (sa.len() / m, sb.len() / m);
        for j in 0..m {
            let d = sigma.apply(sa[j * step_a].into()).chordal(sb[j * step_b].into());
            boundary_error = boundary_error.max(d);
        }
    }
    let equivalent = puncture_error < tol && boundary_error < tol;
    Ok(EquivalenceReport { equivalent, witness: sigma, puncture_error, boundary_error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn affine(a: f64, b: C64) -> PowerSeries {
        PowerSeries::interior(vec![b, C64::new(a, 0.0)]).unwrap()
    }

    #[test]
    fn identity_cap_gives_identity_map() {
        let rigged = RiggedSphere::new(
            BorderedSphere::new(vec![PowerSeries::identity(4).unwrap()]).unwrap(),
            vec![CircleHomeo::identity()],
        )
        .unwrap();
        let out = sew_caps(&rigged, &SewOptions::default()).unwrap();
        let phi = &out.maps.maps[0];
        assert!(phi.max_coeff_diff(&PowerSeries::identity(phi.truncation()).unwrap()) < 1e-12);
        assert!(out.maps.punctures[0].norm() < 1e-12);
    }

    #[test]
    fn rotated_rigging_rotates_the_cap() {
        let alpha = 0.7;
        let rigged = RiggedSphere::new(
            BorderedSphere::new(vec![PowerSeries::identity(4).unwrap()]).unwrap(),
            vec![CircleHomeo::rotation(alpha)],
        )
        .unwrap();
        let out = sew_caps(&rigged, &SewOptions::default()).unwrap();
        let expect = PowerSeries::monomial(1, C64::from_polar(1.0, alpha), out.maps.maps[0].truncation()).unwrap();
        assert!(out.maps.maps[0].max_coeff_diff(&expect) < 1e-10);
    }

    #[test]
    fn overlapping_caps_are_rejected() {
        let caps = vec![affine(0.5, C64::new(0.0, 0.0)), affine(0.5, C64::new(0.8, 0.0))];
        assert!(matches!(BorderedSphere::new(caps), Err(Error::Degeneration(_))));
        let nested = vec![affine(1.0, C64::new(0.0, 0.0)), affine(0.2, C64::new(0.1, 0.0))];
        assert!(matches!(BorderedSphere::new(nested), Err(Error::Degeneration(_))));
    }

    #[test]
    fn identity_chart_gives_zero_norm_member() {
        let maps = NonOverlappingMaps::new(vec![PowerSeries::identity(8).unwrap()]).unwrap();
        let chart = NChart::new(
            vec![LocalChart {
                domain: Disc { center: C64::new(0.0, 0.0), radius: 2.0 },
                map: Mobius::identity(),
            }],
            &maps.punctures,
        )
        .unwrap();
        let v = oqco_on_sphere(&maps, &chart).unwrap();
        assert_eq!(v[0].verdict, crate::norms::LadderVerdict::Member);
        assert!(v[0].ladder.iter().all(|r| r.norm < 1e-14));

        let small = NChart::new(
            vec![LocalChart { domain: Disc { center: C64::new(0.0, 0.0), radius: 0.9 }, map: Mobius::identity() }],
            &maps.punctures,
        )
        .unwrap();
        assert!(matches!(oqco_on_sphere(&maps, &small), Err(Error::ChartIncompatible(_))));
    }

    #[test]
    fn mobius_copy_is_equivalent() {
        let maps = NonOverlappingMaps::new(vec![
            affine(0.2, C64::new(-1.0, 0.0)),
            affine(0.2, C64::new(1.0, 0.0)),
            affine(0.2, C64::new(0.0, 1.0)),
        ])
        .unwrap();
        let same = moduli_equivalent(&maps, &maps, EQUIVALENCE_TOL).unwrap();
        assert!(same.equivalent);
        assert!((same.witness.apply(ExtPoint::new(0.3, 0.2))).chordal(ExtPoint::new(0.3, 0.2)) < 1e-14);

        let sigma = Mobius::new(C64::new(1.0, 0.5), C64::new(0.2, 0.0), C64::new(0.1, 0.1), C64::new(1.0, 0.0)).unwrap();
        let moved = maps.transformed(&sigma).unwrap();
        let rep = moduli_equivalent(&maps, &moved, EQUIVALENCE_TOL).unwrap();
        assert!(rep.equivalent, "{rep:?}");
        let w = rep.witness;
        assert!((w.a * w.d - w.b * w.c - 1.0).norm() < 1e-12);
    }

    #[test]
    fn rotated_map_is_not_equivalent() {
        let base = vec![affine(0.2, C64::new(-1.0, 0.0)), affine(0.2, C64::new(1.0, 0.0)), affine(0.2, C64::new(0.0, 1.0))];
        let maps = NonOverlappingMaps::new(base.clone()).unwrap();
        let mut rotated = base;
        rotated[1] = PowerSeries::interior(vec![C64::new(1.0, 0.0), C64::from_polar(0.2, 0.3)]).unwrap();
        let rotated = NonOverlappingMaps::new(rotated).unwrap();
        assert!(!moduli_equivalent(&maps, &rotated, EQUIVALENCE_TOL).unwrap().equivalent);
        let two = NonOverlappingMaps::new(vec![affine(0.2, C64::new(-1.0, 0.0)), affine(0.2, C64::new(1.0, 0.0))]).unwrap();
        assert!(matches!(moduli_equivalent(&two, &two, 1e-6), Err(Error::Unsupported(_))));
    }

    #[test]
    fn random_charts_are_admissible() {
        let maps = NonOverlappingMaps::new(vec![affine(0.3, C64::new(-0.6, 0.0)), affine(0.3, C64::new(0.7, 0.1))]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = NChart::enclosing(&maps).unwrap();
        for _ in 0..5 {
            let b = NChart::random(&maps, &mut rng).unwrap();
            let rep = chart_independence_check(&maps, &a, &b).unwrap();
            assert!(rep.passed, "{rep:?}");
        }
    }

    #[test]
    fn two_caps_sew_into_members() {
        let caps = vec![affine(0.4, C64::new(-0.6, 0.0)), affine(0.3, C64::new(0.7, 0.2))];
        let riggings = vec![CircleHomeo::sine(0.05, 2).unwrap(), CircleHomeo::sine(0.03, 3).unwrap()];
        let rigged = RiggedSphere::new(BorderedSphere::new(caps).unwrap(), riggings).unwrap();
        let out = sew_caps(&rigged, &SewOptions::default()).unwrap();
        assert!(out.residuals.iter().all(|&r| r < 1e-8), "{:?}", out.residuals);
        assert!(out.maps.separation > 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2 {
            let chart = NChart::random(&out.maps, &mut rng).unwrap();
            let v = oqco_on_sphere(&out.maps, &chart).unwrap();
            assert!(v.iter().all(|v| v.verdict == crate::norms::LadderVerdict::Member));
        }
    }
}
