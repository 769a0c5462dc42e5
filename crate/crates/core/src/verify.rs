//! Executable instances of the analytic estimates, with reproducible reports.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homeo::{compose_homeo, invert_homeo, CircleHomeo};
use crate::norms::{
    bergman_norm, carleson_box_measure, dirichlet_norm, pullback_bergman_norm, weighted_fprime_integral,
    weighted_power_integral, IntegrandRole, WeightedIntegralSpec,
};
use crate::preschwarzian::{chi_inverse, pre_schwarzian, random_direction, univalence_check, PreSchwarzianCoords};
use crate::quadrature::golden_max;
use crate::series::{samples_for, PowerSeries, C64};
use crate::stencil::cr_probe;
use crate::welding::{qs0_certify, WeldOptions};

/// Working truncation of the curve family.
pub const CURVE_TRUNCATION: usize = 64;
/// Relative tolerance when comparing the two sides of a recorded condition.
pub const CONDITION_TOL: f64 = 1e-9;

/// One recorded inequality `lhs <= rhs`. Counting conditions (violation
/// counts against zero) gate the pass flag but carry no slack.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    #[serde(default)]
    pub counting: bool,
}

impl Condition {
    pub fn new(label: &str, lhs: f64, rhs: f64) -> Self {
        Self { label: label.into(), lhs, rhs, counting: false }
    }

    pub fn count(label: &str, violations: f64) -> Self {
        Self { label: label.into(), lhs: violations, rhs: 0.0, counting: true }
    }

    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs + CONDITION_TOL * self.rhs.abs().max(1.0)
    }

    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    /// FNV-1a hash of the serialized inputs.
    pub digest: String,
    pub measured: BTreeMap<String, f64>,
    pub conditions: Vec<Condition>,
    /// Smallest `rhs - lhs` over the inequality conditions.
    pub slack: f64,
    pub passed: bool,
}

impl CheckReport {
    pub fn new(name: &str, inputs: &impl Serialize, measured: BTreeMap<String, f64>, conditions: Vec<Condition>) -> Self {
        let text = serde_json::to_string(inputs).unwrap_or_default();
        let slack = conditions.iter().filter(|c| !c.counting).map(Condition::slack).fold(f64::INFINITY, f64::min);
        let passed = conditions.iter().all(Condition::holds);
        Self { name: name.into(), digest: format!("{:016x}", fnv1a(text.as_bytes())), measured, conditions, slack, passed }
    }

    /// Recomputes the pass flag from the recorded conditions.
    pub fn reevaluate(&self) -> bool {
        self.conditions.iter().all(Condition::holds)
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

fn measured(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// `||A(g)||` for `g` with `g(0)` possibly nonzero.
fn a_norm(g: &PowerSeries) -> Result<f64> {
    let mut c = g.clone().into_coeffs();
    c[0] = C64::new(0.0, 0.0);
    bergman_norm(&pre_schwarzian(&PowerSeries::interior(c)?)?)
}

/// `h o f` for a polynomial `h`, fitted at the working truncation.
fn compose_poly(h: &PowerSeries, f: &PowerSeries, n: usize) -> Result<PowerSeries> {
    Ok(PowerSeries::compose_fn(&f.resized(n), n, samples_for(4 * n), |w| h.eval(w))?.series)
}

/// Certifies that the polynomial `h` is univalent on a disc containing `f(closed D)`.
fn certify_admissible(h: &PowerSeries, f: &PowerSeries) -> Result<f64> {
    let reach = f.sup_on_circle(1.0, 1024)? * 1.01;
    let a = h.eval_derivative(C64::new(0.0, 0.0));
    let coeffs: Vec<C64> = (0..h.truncation())
        .map(|k| if k == 0 { C64::new(0.0, 0.0) } else { h.coeff(k) * reach.powi(k as i32 - 1) / a })
        .collect();
    let scaled = PowerSeries::interior(coeffs)?;
    if h.coeff(0).norm() != 0.0 || !univalence_check(&scaled, 1024)?.passed() {
        return Err(Error::Precondition(format!("h is not admissible on |w| <= {reach:.4}")));
    }
    Ok(reach)
}

/// `||A(h o f)|| <= ||A(h)||_{f(D)} + ||A(f)||`.
pub fn check_minkowski(h: &PowerSeries, f: &PowerSeries) -> Result<CheckReport> {
    let reach = certify_admissible(h, f)?;
    let n = CURVE_TRUNCATION.max(f.truncation());
    let lhs = a_norm(&compose_poly(h, f, n)?)?;
    let dh = h.differentiate()?;
    let d2h = dh.differentiate()?;
    let transition = pullback_bergman_norm(|w| d2h.eval(w) / dh.eval(w), &f.resized(n))?.norm;
    let base = a_norm(&f.resized(n))?;
    Ok(CheckReport::new(
        "minkowski",
        &(h, f),
        measured(&[("lhs", lhs), ("transition", transition), ("base", base), ("reach", reach)]),
        vec![Condition::new("composition bound", lhs, transition + base)],
    ))
}

/// Empirical Hardy-Littlewood constants over a family, required stable within a factor 10.
pub fn check_hardy_littlewood(family: &[PowerSeries], p: f64, alpha: f64) -> Result<CheckReport> {
    let lhs_spec = WeightedIntegralSpec::new(p, alpha, IntegrandRole::PsiPower)?;
    let rhs_spec = WeightedIntegralSpec::new(p, p + alpha, IntegrandRole::FPrimePower)?;
    let mut constants = Vec::with_capacity(family.len());
    let mut zero_violations = 0.0;
    for f in family {
        let lhs = weighted_fprime_integral(f, &lhs_spec)?.norm;
        let rhs = weighted_fprime_integral(f, &rhs_spec)?.norm + f.coeff(0).norm().powf(p);
        if rhs > 0.0 {
            constants.push(lhs / rhs);
        } else if lhs > 0.0 {
            zero_violations += 1.0;
        }
    }
    let cmax = constants.iter().copied().fold(0.0, f64::max);
    let cmin = constants.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = if constants.is_empty() { 1.0 } else { cmax / cmin };
    Ok(CheckReport::new(
        "hardy-littlewood",
        &(family, p, alpha),
        measured(&[("c_max", cmax), ("c_min", cmin), ("p", p), ("alpha", alpha)]),
        vec![Condition::new("constant spread", spread, 10.0), Condition::count("vanishing rhs", zero_violations)],
    ))
}

/// `(1-r^2)^{3/(2 beta)} log((1+r)/(1-r))`.
pub fn carleson_profile(r: f64, beta: f64) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    (1.0 - r * r).powf(1.5 / beta) * ((1.0 + r) / (1.0 - r)).ln()
}

/// Boundedness of the profile plus the box bound `mu(S(z)) <= 4 pi (1-|z|^2)^{3/2} / 3`.
pub fn check_carleson_chain(beta: f64) -> Result<CheckReport> {
    if !(beta > 1.0) {
        return Err(Error::Precondition(format!("beta = {beta} must exceed 1")));
    }
    // grid in s = -log10(1 - r), r from 0.01 to 1 - 1e-8
    let grid: Vec<f64> = (0..=800).map(|k| 1.0 - 10f64.powf(-(k as f64) * 8.0 / 800.0)).map(|r| r.max(0.0)).collect();
    let vals: Vec<f64> = grid.iter().map(|&r| carleson_profile(r, beta)).collect();
    let best = (0..grid.len()).max_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap_or(0);
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(grid.len() - 1)];
    let (r_max, f_max) = golden_max(|r| carleson_profile(r, beta), lo, hi, 1e-12);
    // last decade: 1 - r from 1e-7 to 1e-8
    let tail = &vals[700..];
    let rises = tail.windows(2).filter(|w| w[1] > w[0]).count() as f64;
    let endpoint = *vals.last().unwrap_or(&0.0);

    let radii: Vec<f64> = (0..40).map(|k| k as f64 / 40.0).collect();
    let boxes = carleson_box_measure(2.0 * beta, 2.0, 0.5, &radii)?;
    let worst = boxes
        .samples
        .iter()
        .map(|s| s.measure / (4.0 * std::f64::consts::PI * (1.0 - s.radius * s.radius).powf(1.5) / 3.0))
        .fold(0.0, f64::max);
    Ok(CheckReport::new(
        "carleson-chain",
        &beta,
        measured(&[
            ("beta", beta),
            ("r_max", r_max),
            ("profile_max", f_max),
            ("endpoint", endpoint),
            ("box_ratio", worst),
            ("box_constant", boxes.constant),
        ]),
        vec![
            Condition::new("finite maximum", f_max, f64::MAX),
            Condition::new("endpoint decay", endpoint, 0.5 * f_max),
            Condition::count("monotone tail", rises),
            Condition::new("box bound", worst, 1.0),
        ],
    ))
}

/// Empirical constants `C'` with `(iint |psi|^{2 beta} (1-|z|^2)^{1/2})^{1/(2 beta)} <= C' ||psi'||_2`.
pub fn check_ars_embedding(family: &[PowerSeries], beta: f64) -> Result<CheckReport> {
    let mut constants = Vec::with_capacity(family.len());
    let mut zero_violations = 0.0;
    for psi in family {
        let lhs = weighted_power_integral(&[(psi, 2.0 * beta)], 0.5)?.norm.powf(1.0 / (2.0 * beta));
        let d = dirichlet_norm(psi)?;
        if d > 0.0 {
            constants.push(lhs / d);
        } else if lhs > 0.0 {
            zero_violations += 1.0;
        }
    }
    let cmax = constants.iter().copied().fold(0.0, f64::max);
    let cmin = constants.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = if constants.is_empty() { 1.0 } else { cmax / cmin };
    Ok(CheckReport::new(
        "ars-embedding",
        &(family, beta),
        measured(&[("c_max", cmax), ("c_min", cmin), ("beta", beta)]),
        vec![Condition::new("constant spread", spread, 10.0), Condition::count("vanishing rhs", zero_violations)],
    ))
}

/// The curve `chi(f_t) = (A(f_0) + t phi, q(t))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolomorphicCurveSpec {
    pub base: PowerSeries,
    pub direction: PowerSeries,
    /// Coefficients of `q`, constant term first.
    pub q: Vec<C64>,
    pub grid: Vec<C64>,
}

impl HolomorphicCurveSpec {
    pub fn new(base: PowerSeries, direction: PowerSeries, q: Vec<C64>, grid: Vec<C64>) -> Result<Self> {
        let d0 = base.coeff(1);
        if q.is_empty() || (q[0] - d0).norm() > 1e-14 * d0.norm() {
            return Err(Error::InvalidInput("q(0) must equal f_0'(0)".into()));
        }
        let spec = Self { base, direction, q, grid };
        if let Some(t) = spec.grid.iter().find(|&&t| spec.q_at(t).norm() == 0.0) {
            return Err(Error::InvalidInput(format!("q vanishes at t = {t}")));
        }
        Ok(spec)
    }

    pub fn q_at(&self, t: C64) -> C64 {
        self.q.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * t + c)
    }

    /// `f_t` at the working truncation.
    pub fn at(&self, t: C64) -> Result<PowerSeries> {
        let n = CURVE_TRUNCATION.max(self.base.truncation());
        let a0 = pre_schwarzian(&self.base.resized(n + 2))?.resized(n);
        let phi = a0.add(&self.direction.resized(n).scaled(t))?;
        chi_inverse(&PreSchwarzianCoords::new(phi, self.q_at(t))?)
    }

    /// `f_t` on the grid, failing at the first non-univalent member.
    pub fn members(&self) -> Result<Vec<(C64, PowerSeries)>> {
        self.grid
            .iter()
            .map(|&t| {
                let f = self.at(t)?;
                let scaled = f.scaled(1.0 / f.coeff(1));
                if !univalence_check(&scaled, 512)?.passed() {
                    return Err(Error::Precondition(format!("f_t is not univalent at t = {t}")));
                }
                Ok((t, f))
            })
            .collect()
    }
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

fn uniformity_report(name: &str, inputs: &impl Serialize, values: &[f64], extra: &[(&str, f64)]) -> CheckReport {
    let max = values.iter().copied().fold(0.0, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let med = median(values);
    let mut m = measured(extra);
    m.insert("max".into(), max);
    m.insert("min".into(), min);
    m.insert("median".into(), med);
    CheckReport::new(name, inputs, m, vec![Condition::new("max over twice median", max, 2.0 * med)])
}

/// `iint |f_t'|^p (1-|z|^2)^alpha dA` bounded uniformly along the grid.
pub fn check_uniform_fprime(curve: &HolomorphicCurveSpec, p: f64, alpha: f64) -> Result<CheckReport> {
    let spec = WeightedIntegralSpec::new(p, alpha, IntegrandRole::FPrimePower)?;
    let values = curve
        .members()?
        .iter()
        .map(|(_, f)| Ok(weighted_fprime_integral(f, &spec)?.norm))
        .collect::<Result<Vec<_>>>()?;
    Ok(uniformity_report("uniform-fprime", &(curve, p, alpha), &values, &[("p", p), ("alpha", alpha)]))
}

/// `iint |f_t'|^2 |psi|^beta dA` bounded uniformly along the grid.
pub fn check_wulfs(curve: &HolomorphicCurveSpec, psi: &PowerSeries, beta: f64) -> Result<CheckReport> {
    if !(beta > 1.0) {
        return Err(Error::Precondition(format!("beta = {beta} must exceed 1")));
    }
    dirichlet_norm(psi)?;
    let values = curve
        .members()?
        .iter()
        .map(|(_, f)| Ok(weighted_power_integral(&[(&f.differentiate()?, 2.0), (psi, beta)], 0.0)?.norm))
        .collect::<Result<Vec<_>>>()?;
    Ok(uniformity_report("wulfs", &(curve, psi, beta), &values, &[("beta", beta)]))
}

/// Points where the pre-Schwarzian is evaluated by the holomorphy stencil.
pub const PROBE_POINTS: [(f64, f64); 4] = [(0.0, 0.0), (0.3, 0.0), (0.0, 0.5), (-0.4, -0.4)];
/// Step ladder for the Cauchy-Riemann stencil.
pub const CR_LADDER: [f64; 3] = [1e-2, 5e-3, 2.5e-3];
/// Step ladder for the Taylor remainder.
pub const REMAINDER_LADDER: [f64; 3] = [4e-2, 2e-2, 1e-2];
/// Step of the five-point derivative stencil.
pub const STENCIL_STEP: f64 = 1e-3;

/// Cauchy-Riemann and remainder diagnostics of a coordinate curve `t -> alpha(t)`.
pub fn holomorphy_report<F>(name: &str, inputs: &impl Serialize, alpha: F) -> Result<CheckReport>
where
    F: Fn(C64) -> Result<PowerSeries> + Sync,
{
    let points: Vec<C64> = PROBE_POINTS.iter().map(|&(x, y)| C64::new(x, y)).collect();
    let functionals = |t: C64| -> Result<Vec<C64>> {
        let a = alpha(t)?;
        Ok(points.iter().map(|&z| a.eval(z)).collect())
    };
    let zero = C64::new(0.0, 0.0);
    let cr = cr_probe(&functionals, zero, &CR_LADDER)?;
    let growth = cr
        .steps
        .windows(2)
        .map(|w| if w[0].ratio > 0.0 { w[1].ratio / w[0].ratio } else { 0.0 })
        .fold(0.0, f64::max);

    // first derivative by the five-point stencil
    let s = STENCIL_STEP;
    let at = |t: f64| alpha(C64::new(t, 0.0));
    let (m2, m1, p1, p2) = (at(-2.0 * s)?, at(-s)?, at(s)?, at(2.0 * s)?);
    let d1 = m2.sub(&p2)?.add(&p1.sub(&m1)?.scaled(C64::new(8.0, 0.0)))?.scaled(C64::new(1.0 / (12.0 * s), 0.0));
    let a0 = alpha(zero)?;
    let q: Vec<f64> = REMAINDER_LADDER
        .iter()
        .map(|&d| {
            let r = alpha(C64::new(d, 0.0))?.sub(&a0)?.sub(&d1.scaled(C64::new(d, 0.0)))?;
            Ok(bergman_norm(&r)?.powi(2) / d.powi(3))
        })
        .collect::<Result<_>>()?;
    let q0 = q[0].max(f64::MIN_POSITIVE);
    let q_growth = q.iter().map(|v| v / q0).fold(0.0, f64::max);
    let final_ratio = cr.final_ratio();
    Ok(CheckReport::new(
        name,
        inputs,
        measured(&[
            ("cr_ratio", final_ratio),
            ("cr_growth", growth),
            ("remainder_q_first", q[0]),
            ("remainder_q_last", q[q.len() - 1]),
            ("remainder_growth", q_growth),
        ]),
        vec![
            Condition::new("cauchy-riemann ratio", final_ratio, 1e-3),
            Condition::new("ratio decreasing", growth, 2.0),
            Condition::new("cubic remainder", q_growth, 3.0),
        ],
    ))
}

/// Holomorphy of `t -> A(h o f_t)`.
pub fn check_left_composition_holo(h: &PowerSeries, curve: &HolomorphicCurveSpec) -> Result<CheckReport> {
    for (_, f) in curve.members()? {
        certify_admissible(h, &f)?;
    }
    let n = CURVE_TRUNCATION;
    holomorphy_report("left-composition", &(h, curve), |t| {
        let g = compose_poly(h, &curve.at(t)?, n)?;
        let mut c = g.into_coeffs();
        c[0] = C64::new(0.0, 0.0);
        pre_schwarzian(&PowerSeries::interior(c)?)
    })
}

/// Closure of the refined class under composition and inversion.
pub fn check_qso_closure(h1: &CircleHomeo, h2: &CircleHomeo, opts: &WeldOptions) -> Result<CheckReport> {
    for h in [h1, h2] {
        if !qs0_certify(h, opts)?.passed {
            return Err(Error::Precondition("inputs must be certified".into()));
        }
    }
    let comp = qs0_certify(&compose_homeo(h1, h2)?, opts)?;
    let inv = qs0_certify(&invert_homeo(h1)?, opts)?;
    let flag = |b: bool| if b { 0.0 } else { 1.0 };
    Ok(CheckReport::new(
        "qso-closure",
        &(h1, h2),
        measured(&[
            ("composition_residual", comp.welding.residual),
            ("composition_sup_mu", comp.extension.sup),
            ("inverse_residual", inv.welding.residual),
            ("inverse_sup_mu", inv.extension.sup),
        ]),
        vec![
            Condition::count("composition certified", flag(comp.passed)),
            Condition::count("inverse certified", flag(inv.passed)),
        ],
    ))
}

/// Seeded member of the standard family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StandardInstance {
    pub seed: u64,
    pub curve: HolomorphicCurveSpec,
}

/// Bound on `sum_k k |c_k|` for the standard base maps.
pub const COEFFICIENT_BUDGET: f64 = 0.3;
/// Bergman norm of the standard directions.
pub const DIRECTION_NORM: f64 = 0.1;

/// Nine grid points: `0` and eight points on `|t| = 1/2`.
pub fn standard_grid() -> Vec<C64> {
    std::iter::once(C64::new(0.0, 0.0))
        .chain((0..8).map(|k| C64::from_polar(0.5, std::f64::consts::FRAC_PI_4 * k as f64)))
        .collect()
}

impl StandardInstance {
    /// `f_0 = z + sum_{k=2..6} c_k z^k` with `sum k |c_k| <= 0.3`, `q(t) = 1 + t/10`.
    pub fn new(seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw: Vec<C64> = (2..=6)
            .map(|_| C64::from_polar(rng.random_range(0.0..1.0), rng.random_range(0.0..std::f64::consts::TAU)))
            .collect();
        let weight: f64 = raw.iter().enumerate().map(|(i, c)| (i + 2) as f64 * c.norm()).sum();
        let budget = COEFFICIENT_BUDGET * rng.random_range(0.2..1.0);
        let mut coeffs = vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
        coeffs.extend(raw.iter().map(|c| c * (budget / weight)));
        let base = PowerSeries::interior(coeffs)?;
        let direction = random_direction(&mut rng, CURVE_TRUNCATION)?.scaled(C64::new(DIRECTION_NORM, 0.0));
        let q = vec![C64::new(1.0, 0.0), C64::new(0.1, 0.0)];
        Ok(Self { seed, curve: HolomorphicCurveSpec::new(base, direction, q, standard_grid())? })
    }

    pub fn base(&self) -> &PowerSeries {
        &self.curve.base
    }
}

/// `h(w) = w + w^2/4`.
pub fn standard_h() -> PowerSeries {
    PowerSeries::interior(vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.25, 0.0)]).expect("finite")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    Minkowski,
    HardyLittlewood,
    ArsEmbedding,
    CarlesonChain,
    UniformFprime,
    Wulfs,
    LeftComposition,
}

impl CheckKind {
    pub const ALL: [CheckKind; 7] = [
        CheckKind::Minkowski,
        CheckKind::HardyLittlewood,
        CheckKind::ArsEmbedding,
        CheckKind::CarlesonChain,
        CheckKind::UniformFprime,
        CheckKind::Wulfs,
        CheckKind::LeftComposition,
    ];
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteManifest {
    pub checks: Vec<CheckKind>,
    #[serde(default = "default_instances")]
    pub instances: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_instances() -> usize {
    50
}

impl SuiteManifest {
    pub fn standard() -> Self {
        Self { checks: CheckKind::ALL.to_vec(), instances: default_instances(), seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteRow {
    pub check: CheckKind,
    /// `None` for family-level checks.
    pub instance: Option<u64>,
    pub report: CheckReport,
}

enum Job {
    Family(CheckKind, f64),
    Instance(CheckKind, usize, f64),
}

/// Runs the manifest on the current rayon pool; rows come back in manifest order.
pub fn run_suite(manifest: &SuiteManifest) -> Result<Vec<SuiteRow>> {
    let family = (0..manifest.instances)
        .map(|i| StandardInstance::new(manifest.seed + i as u64))
        .collect::<Result<Vec<_>>>()?;
    let mut jobs = Vec::new();
    for &kind in &manifest.checks {
        match kind {
            CheckKind::HardyLittlewood => jobs.push(Job::Family(kind, 0.0)),
            CheckKind::ArsEmbedding => jobs.push(Job::Family(kind, 2.0)),
            CheckKind::CarlesonChain => {
                jobs.push(Job::Family(kind, 2.0));
                jobs.push(Job::Family(kind, 4.0));
            }
            CheckKind::Wulfs => {
                for i in 0..family.len() {
                    jobs.push(Job::Instance(kind, i, 2.0));
                    jobs.push(Job::Instance(kind, i, 4.0));
                }
            }
            _ => jobs.extend((0..family.len()).map(|i| Job::Instance(kind, i, 0.0))),
        }
    }
    let h = standard_h();
    let bases: Vec<PowerSeries> = family.iter().map(|f| f.base().clone()).collect();
    jobs.par_iter()
        .map(|job| match *job {
            Job::Family(kind, beta) => {
                let report = match kind {
                    CheckKind::HardyLittlewood => {
                        let derivs = bases.iter().map(|b| b.differentiate()).collect::<Result<Vec<_>>>()?;
                        check_hardy_littlewood(&derivs, 4.0, -0.5)?
                    }
                    CheckKind::ArsEmbedding => check_ars_embedding(&bases, beta)?,
                    _ => check_carleson_chain(beta)?,
                };
                Ok(SuiteRow { check: kind, instance: None, report })
            }
            Job::Instance(kind, i, beta) => {
                let inst = &family[i];
                let report = match kind {
                    CheckKind::Minkowski => check_minkowski(&h, inst.base())?,
                    CheckKind::UniformFprime => check_uniform_fprime(&inst.curve, 4.0, -0.5)?,
                    CheckKind::Wulfs => check_wulfs(&inst.curve, inst.base(), beta)?,
                    _ => check_left_composition_holo(&h, &inst.curve)?,
                };
                Ok(SuiteRow { check: kind, instance: Some(inst.seed), report })
            }
        })
        .collect()
}
