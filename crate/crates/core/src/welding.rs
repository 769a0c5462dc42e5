//! Conformal welding of analytic circle homeomorphisms and explicit
//! quasiconformal extensions.
//!
//! For `h` with lift `L(t) = t + u(t)` the pair `(F, G)` satisfies
//! `F(e^{it}) = G(e^{iL(t)})`, `F(0) = 0` and `G(w) = w + b_0 + b_1/w + ...`.
//! Writing `k = e^{iL}`, the right-hand side `k + sum_j b_j k^{-j}` must have
//! no Fourier modes of index `<= 0`. That is an overdetermined linear system
//! `M b = -c` with `M[m][j]` the mode `-m` of `k^{-j}` and `c[m]` the mode `-m`
//! of `k`, solved by Gauss-Newton.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homeo::CircleHomeo;
use crate::norms::{hyp_l2_norm, sup_norm, BeltramiGrid, HypL2Report, TailModel};
use crate::preschwarzian::{curve_status, oqco_membership, univalence_check, MembershipVerdict, UnivalenceStatus};
use crate::series::{analyze, circle_points, samples_for, PowerSeries, SeriesKind, C64, DEFAULT_TRUNCATION};

use std::f64::consts::TAU;

/// Default bound on `sup |u - mean(u)|` accepted by [`weld`].
pub const CONTRACTION_GUARD: f64 = 0.5;
/// Outer radius of the sampled exterior grid.
pub const EXTENSION_OUTER_RADIUS: f64 = 4.0;
/// Largest annulus radius used by [`build_extension`].
pub const ANNULUS_CAP: f64 = 1.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeldingPair {
    pub f: PowerSeries,
    pub g: PowerSeries,
}

impl WeldingPair {
    /// `b_0 = G(w) - w + O(1/w)`.
    pub fn g_constant(&self) -> C64 {
        self.g.coeff(1)
    }

    /// Solves `G(w) = target` by Newton from `seed`.
    pub fn invert_g(&self, target: C64, seed: C64) -> Option<C64> {
        let mut w = seed;
        for _ in 0..60 {
            let dg = self.g.eval_derivative(w);
            if dg.norm() == 0.0 {
                return None;
            }
            let step = (self.g.eval(w) - target) / dg;
            w -= step;
            if !(w.re.is_finite() && w.im.is_finite()) {
                return None;
            }
            if step.norm() <= 1e-15 * w.norm().max(1.0) {
                return Some(w);
            }
        }
        let ok = (self.g.eval(w) - target).norm() <= 1e-12 * target.norm().max(1.0);
        ok.then_some(w)
    }
}

#[derive(Clone, Debug)]
pub struct WeldOptions {
    pub truncation: usize,
    pub samples: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub guard: f64,
    /// Starting values for `b_0, b_1, ...`; zeros when absent.
    pub initial: Option<Vec<C64>>,
}

impl Default for WeldOptions {
    fn default() -> Self {
        Self {
            truncation: DEFAULT_TRUNCATION,
            samples: samples_for(2 * DEFAULT_TRUNCATION),
            tol: 1e-10,
            max_iter: 20,
            guard: CONTRACTION_GUARD,
            initial: None,
        }
    }
}

impl WeldOptions {
    pub fn with_truncation(n: usize) -> Self {
        Self { truncation: n, samples: samples_for(2 * n), ..Self::default() }
    }
}

/// Fourier data of the powers `k^{-j}` on the sample grid.
struct WeldSystem {
    n: usize,
    m: usize,
    /// `spectra[j]` is the spectrum of `k^{-j}`; `spectra[n]` that of `k`.
    spectra: Vec<Vec<C64>>,
}

impl WeldSystem {
    fn new(h: &CircleHomeo, n: usize, m: usize) -> Self {
        let lifts: Vec<f64> = (0..m).map(|k| h.lift(TAU * k as f64 / m as f64)).collect();
        let mut spectra: Vec<Vec<C64>> = (0..n)
            .map(|j| analyze(&lifts.iter().map(|l| C64::from_polar(1.0, -(j as f64) * l)).collect::<Vec<_>>()))
            .collect();
        spectra.push(analyze(&lifts.iter().map(|l| C64::from_polar(1.0, *l)).collect::<Vec<_>>()));
        Self { n, m, spectra }
    }

    fn mode(&self, j: usize, freq: isize) -> C64 {
        self.spectra[j][freq.rem_euclid(self.m as isize) as usize]
    }

    /// Every resolved non-positive mode is a row; truncating to a square
    /// system instead loses conditioning exponentially in `N`.
    fn rows(&self) -> usize {
        self.m / 2
    }

    fn matrix(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.rows(), self.n, |mm, j| self.mode(j, -(mm as isize)))
    }

    fn rhs(&self) -> DVector<C64> {
        DVector::from_fn(self.rows(), |mm, _| self.mode(self.n, -(mm as isize)))
    }

    /// Interior coefficients `a_n` of `k + sum b_j k^{-j}`, with `a_0 = 0`.
    fn interior(&self, b: &DVector<C64>) -> Vec<C64> {
        let mut a = vec![C64::new(0.0, 0.0); self.n];
        for (nn, slot) in a.iter_mut().enumerate().skip(1) {
            let f = nn as isize;
            *slot = self.mode(self.n, f) + (0..self.n).map(|j| b[j] * self.mode(j, f)).sum::<C64>();
        }
        a
    }
}

/// Normalized welding pair of `h`.
pub fn weld(h: &CircleHomeo, opts: &WeldOptions) -> Result<WeldingPair> {
    let n = opts.truncation;
    if n < 2 {
        return Err(Error::Config("welding truncation must be at least 2".into()));
    }
    let m = opts.samples;
    if !m.is_power_of_two() || m < 4 * n {
        return Err(Error::Config(format!("welding needs a power-of-two sample count >= 4N, got {m}")));
    }
    let osc = h.oscillation();
    if osc > opts.guard {
        return Err(Error::Precondition(format!(
            "sup |u - mean u| = {osc:.3} exceeds the solver guard {}",
            opts.guard
        )));
    }
    let sys = WeldSystem::new(h, n, m);
    let mat = sys.matrix();
    let c = sys.rhs();
    let mut b = match &opts.initial {
        Some(init) => DVector::from_fn(n, |j, _| init.get(j).copied().unwrap_or_default()),
        None => DVector::zeros(n),
    };
    let residual = |b: &DVector<C64>| (&mat * b + &c).iter().map(|v| v.norm()).fold(0.0, f64::max);
    let adj = mat.adjoint();
    let lu = (&adj * &mat).lu();
    let mut res = residual(&b);
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        let r = &mat * &b + &c;
        let step = match lu.solve(&(&adj * &r)) {
            Some(step) => step,
            // alternating projection: diagonal sweep
            None => DVector::from_fn(n, |j, _| {
                let d = mat[(j, j)];
                if d.norm() > 0.0 { r[j] / d } else { C64::new(0.0, 0.0) }
            }),
        };
        let size = step.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let mut lambda = 1.0;
        loop {
            let trial = &b - &step * C64::new(lambda, 0.0);
            let tr = residual(&trial);
            if tr <= res || lambda < 1e-3 {
                b = trial;
                res = tr;
                break;
            }
            lambda *= 0.5;
        }
        if size <= 1e-3 * opts.tol {
            break;
        }
    }
    let pair = assemble(&sys, &b)?;
    if let Some(status) = pair_univalence(&pair, m)? {
        return Err(Error::Breakdown(format!("welding iterate is not univalent: {status:?}")));
    }
    let residual = welding_residual(&pair, h, m)?;
    if !(residual < opts.tol) {
        return Err(Error::Convergence { iterations, residual });
    }
    Ok(pair)
}

fn assemble(sys: &WeldSystem, b: &DVector<C64>) -> Result<WeldingPair> {
    let f = PowerSeries::interior(sys.interior(b))?;
    let mut g = vec![C64::new(1.0, 0.0)];
    g.extend(b.iter().copied());
    Ok(WeldingPair { f, g: PowerSeries::exterior(g)? })
}

/// `None` when both maps pass the boundary-curve certificate.
fn pair_univalence(pair: &WeldingPair, m: usize) -> Result<Option<UnivalenceStatus>> {
    let f = univalence_check(&pair.f, m)?;
    if !f.passed() {
        return Ok(Some(f.status));
    }
    let m = m.max(samples_for(pair.g.truncation())).next_power_of_two();
    let r = 1.0 + 1.0 / m as f64;
    let points = circle_points(r, m);
    let w: Vec<C64> = points.iter().map(|&p| pair.g.eval(p)).collect();
    let dw: Vec<C64> = points.iter().map(|&p| pair.g.eval_derivative(p)).collect();
    match curve_status(&points, &w, &dw, pair.f.coeff(0)) {
        UnivalenceStatus::Pass => Ok(None),
        other => Ok(Some(other)),
    }
}

/// `sup_t |G^{-1}(F(e^{it})) - h(e^{it})|` over `m` samples; `+inf` when
/// inverting `G` fails at some sample.
pub fn welding_residual(pair: &WeldingPair, h: &CircleHomeo, m: usize) -> Result<f64> {
    if pair.g.kind() != SeriesKind::Exterior || !pair.f.is_interior() {
        return Err(Error::InvalidInput("welding pair must be (interior, exterior)".into()));
    }
    if m == 0 {
        return Err(Error::Config("residual needs at least one sample".into()));
    }
    let mut worst: f64 = 0.0;
    let mut seed: Option<C64> = None;
    for k in 0..m {
        let t = TAU * k as f64 / m as f64;
        let target = pair.f.eval(C64::from_polar(1.0, t));
        let start = seed.unwrap_or(target - pair.g_constant());
        let Some(w) = pair.invert_g(target, start) else {
            return Ok(f64::INFINITY);
        };
        seed = Some(w);
        worst = worst.max((w - h.at_angle(t)).norm());
    }
    Ok(worst)
}

/// Dilatation of the annulus-plus-radial extension of `h` to the exterior disc.
#[derive(Clone, Debug)]
pub struct ExtensionField {
    pub grid: BeltramiGrid,
    /// `mu = 0` on `1 < |z| < annulus_radius`.
    pub annulus_radius: f64,
    pub sup: f64,
    pub hyp_l2: HypL2Report,
}

/// `H(z) = z exp(i U(z))` on `1 < |z| < R`, and `H(s R e^{it}) = s H(R e^{it})`
/// for `s >= 1`. On the outer piece
/// `mu = e^{2it} (-v) / (2 + v)` with `v = i zeta U'(zeta)`, `zeta = R e^{it}`.
pub fn extension_dilatation(h: &CircleHomeo, annulus_radius: f64, z: C64) -> C64 {
    let r = z.norm();
    if r <= annulus_radius {
        return C64::new(0.0, 0.0);
    }
    let dir = z / r;
    let zeta = dir * annulus_radius;
    let v = C64::new(0.0, 1.0) * zeta * h.laurent_derivative(zeta);
    dir * dir * (-v) / (2.0 + v)
}

pub fn annulus_radius(h: &CircleHomeo) -> f64 {
    (0.5 * h.margin()).exp().min(ANNULUS_CAP)
}

pub fn build_extension(h: &CircleHomeo) -> Result<ExtensionField> {
    let radius = annulus_radius(h);
    let angles = (16 * h.modes()).max(64).next_power_of_two();
    let grid = BeltramiGrid::sample(
        |z| extension_dilatation(h, radius, z),
        &[1.0, radius, 2.0, EXTENSION_OUTER_RADIUS],
        16,
        angles,
        TailModel::RayDominated,
    )?;
    let sup = sup_norm(&grid);
    if !(sup < 1.0) {
        return Err(Error::ExtensionInvalid { sup });
    }
    let hyp_l2 = hyp_l2_norm(&grid)?;
    Ok(ExtensionField { grid, annulus_radius: radius, sup, hyp_l2 })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtensionCertificate {
    pub passed: bool,
    pub sup: f64,
    pub hyp_l2: f64,
    pub tail_bound: f64,
    pub annulus_radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeldingCertificate {
    pub passed: bool,
    pub residual: f64,
    pub membership: MembershipVerdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Qs0Report {
    pub extension: ExtensionCertificate,
    pub welding: WeldingCertificate,
    pub passed: bool,
}

/// Two independent certificates: a dilatation in `L^2_hyp` with sup below one,
/// and a welding interior map whose pre-Schwarzian is Bergman-integrable.
pub fn qs0_certify(h: &CircleHomeo, opts: &WeldOptions) -> Result<Qs0Report> {
    let ext = build_extension(h)?;
    let extension = ExtensionCertificate {
        passed: ext.sup < 1.0 && ext.hyp_l2.norm.is_finite(),
        sup: ext.sup,
        hyp_l2: ext.hyp_l2.norm,
        tail_bound: ext.hyp_l2.tail_bound,
        annulus_radius: ext.annulus_radius,
    };
    let pair = weld(h, opts)?;
    let residual = welding_residual(&pair, h, opts.samples)?;
    let membership = oqco_membership(&pair.f)?;
    let welding = WeldingCertificate {
        passed: membership.verdict == crate::norms::LadderVerdict::Member,
        residual,
        membership,
    };
    let passed = extension.passed && welding.passed;
    Ok(Qs0Report { extension, welding, passed })
}
