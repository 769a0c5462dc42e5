//! One function per subcommand. Each returns the artifact and its pass flag.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::process::ExitCode;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use teich_core::homeo::CircleHomeo;
use teich_core::mobius::ExtPoint;
use teich_core::norms::{
    bergman_norm, dirichlet_norm, sup_hyp_norm, weighted_fprime_integral, GridInfo, IntegrandRole, LadderVerdict,
    SupGrid, WeightedIntegralSpec,
};
use teich_core::preschwarzian::{chi as chi_coords, chi_inverse, chi_inverse_with_loss, MembershipVerdict, PreSchwarzianCoords};
use teich_core::rigged::{
    chart_independence_check, moduli_equivalent, oqco_on_sphere, sew_caps, ChartIndependenceReport, EquivalenceReport,
    NChart, NonOverlappingMaps, RiggedSphere, SewOptions, EQUIVALENCE_TOL,
};
use teich_core::schiffer::{classify, schiffer_vary, DiscTransition, PuncturedSphereConfig, SchifferOptions};
use teich_core::uniformize::CapOptions;
use teich_core::verify::{run_suite, CheckReport, Condition, SuiteManifest, SuiteRow};
use teich_core::welding::{qs0_certify, weld as weld_pair, welding_residual, Qs0Report, WeldOptions};
use teich_core::{PowerSeries, C64};

use crate::output::{emit, fixed, to_json};
use crate::{Common, NormKind};

/// Default residual contract for weldings and sewings.
const RESIDUAL_TOL: f64 = 1e-8;
/// Default coefficient tolerance for the chi round trip.
const ROUND_TRIP_TOL: f64 = 1e-9;

pub struct Artifact {
    json: Vec<u8>,
    csv: Option<Vec<u8>>,
    passed: bool,
}

pub enum JobError {
    /// Unreadable or malformed job: exit 2.
    Parse(String),
    /// The computation itself failed: exit 1.
    Numeric { command: &'static str, error: teich_core::Error },
}

type Outcome = Result<Artifact, JobError>;

fn numeric(command: &'static str) -> impl Fn(teich_core::Error) -> JobError {
    move |error| JobError::Numeric { command, error }
}

fn parse_err(path: &Path, e: impl Display) -> JobError {
    JobError::Parse(format!("{}: {e}", path.display()))
}

fn read<T: DeserializeOwned>(path: &Path) -> Result<T, JobError> {
    let text = std::fs::read_to_string(path).map_err(|e| parse_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| parse_err(path, e))
}

fn artifact<T: Serialize>(value: &T, csv: Option<Vec<u8>>, passed: bool) -> Outcome {
    let json = to_json(value).map_err(|e| JobError::Parse(format!("serializing artifact: {e}")))?;
    Ok(Artifact { json, csv, passed })
}

fn write_csv<R: Serialize>(header: &[&str], rows: &[R]) -> Result<Vec<u8>, JobError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    let fail = |e: csv::Error| JobError::Parse(format!("writing csv: {e}"));
    w.write_record(header).map_err(fail)?;
    for r in rows {
        w.serialize(r).map_err(fail)?;
    }
    w.into_inner().map_err(|e| JobError::Parse(format!("writing csv: {e}")))
}

pub fn finish(outcome: Outcome, common: &Common) -> ExitCode {
    let write = |bytes: &[u8], path| emit(path, bytes).map_err(|e| eprintln!("teich: writing artifact: {e}"));
    match outcome {
        Ok(a) => {
            if write(&a.json, common.output.as_deref()).is_err() {
                return ExitCode::from(2);
            }
            if let (Some(csv), Some(path)) = (&a.csv, &common.csv) {
                if write(csv, Some(path.as_path())).is_err() {
                    return ExitCode::from(2);
                }
            }
            ExitCode::from(if a.passed { 0 } else { 1 })
        }
        Err(JobError::Parse(msg)) => {
            eprintln!("teich: {msg}");
            ExitCode::from(2)
        }
        Err(JobError::Numeric { command, error }) => {
            eprintln!("teich {command}: {error}");
            let report = CheckReport::new(
                command,
                &error.to_string(),
                BTreeMap::new(),
                vec![Condition::count("completed without error", 1.0)],
            );
            let body = Failure { command, error: error.to_string(), report, passed: false };
            match to_json(&body) {
                Ok(json) if write(&json, common.output.as_deref()).is_ok() => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}

#[derive(Serialize)]
struct Failure {
    command: &'static str,
    error: String,
    report: CheckReport,
    passed: bool,
}

fn resized(f: PowerSeries, common: &Common) -> PowerSeries {
    match common.truncation {
        Some(n) => f.resized(n as usize),
        None => f,
    }
}

#[derive(Serialize)]
struct NormOutput {
    kind: &'static str,
    norm: f64,
    converged: bool,
    grid: GridInfo,
    /// Independent quadrature value of the same norm, where one exists.
    quadrature: Option<f64>,
    passed: bool,
}

pub fn norm(input: &Path, kind: NormKind, common: &Common) -> Outcome {
    let phi = resized(read::<PowerSeries>(input)?, common);
    let err = numeric("norm");
    let rel = |a: f64, b: f64| (a - b).abs() <= 1e-8 * a.abs().max(f64::MIN_POSITIVE);
    let out = match kind {
        NormKind::Bergman | NormKind::Dirichlet => {
            let (name, exact, role, target) = match kind {
                NormKind::Bergman => ("bergman", bergman_norm(&phi).map_err(&err)?, IntegrandRole::PhiSquared, &phi),
                _ => ("dirichlet", dirichlet_norm(&phi).map_err(&err)?, IntegrandRole::FPrimePower, &phi),
            };
            let spec = WeightedIntegralSpec::new(2.0, 0.0, role).map_err(&err)?;
            let q = weighted_fprime_integral(target, &spec).map_err(&err)?;
            let quad = q.norm.sqrt();
            NormOutput { kind: name, norm: exact, converged: q.converged, grid: q.grid, quadrature: Some(quad), passed: q.converged && rel(exact, quad) }
        }
        NormKind::SupHyp => {
            let mut grid = SupGrid::default();
            if let Some(m) = common.samples {
                grid.angles = m;
            }
            let r = sup_hyp_norm(&phi, &grid).map_err(&err)?;
            NormOutput { kind: "sup-hyp", norm: r.norm, converged: r.converged, grid: r.grid, quadrature: None, passed: r.converged }
        }
    };
    let passed = out.passed;
    artifact(&out, None, passed)
}

#[derive(Serialize)]
struct ChiOutput {
    phi: PowerSeries,
    d: C64,
    /// Coefficient error of `chi_inverse(chi(f))` against `f`.
    round_trip: f64,
    passed: bool,
}

#[derive(Deserialize)]
struct CoordsFile {
    phi: PowerSeries,
    d: C64,
}

#[derive(Serialize)]
struct ChiInverseOutput {
    f: PowerSeries,
    truncation_loss: f64,
    passed: bool,
}

pub fn chi(input: &Path, inverse: bool, common: &Common) -> Outcome {
    let err = numeric("chi");
    let tol = common.tol.unwrap_or(ROUND_TRIP_TOL);
    if inverse {
        let file: CoordsFile = read(input)?;
        let coords = PreSchwarzianCoords::new(resized(file.phi, common), file.d).map_err(|e| parse_err(input, e))?;
        let rec = chi_inverse_with_loss(&coords).map_err(&err)?;
        let passed = rec.truncation_loss <= tol;
        return artifact(&ChiInverseOutput { f: rec.f, truncation_loss: rec.truncation_loss, passed }, None, passed);
    }
    let f = resized(read::<PowerSeries>(input)?, common);
    let coords = chi_coords(&f).map_err(&err)?;
    let back = chi_inverse(&coords).map_err(&err)?;
    let round_trip = back.max_coeff_diff(&f);
    let passed = round_trip <= tol;
    artifact(&ChiOutput { phi: coords.phi, d: coords.d, round_trip, passed }, None, passed)
}

fn weld_options(common: &Common) -> WeldOptions {
    let mut opts = common.truncation.map_or_else(WeldOptions::default, |n| WeldOptions::with_truncation(n as usize));
    if let Some(m) = common.samples {
        opts.samples = m;
    }
    opts
}

#[derive(Serialize)]
struct WeldOutput {
    f: PowerSeries,
    g: PowerSeries,
    residual: f64,
    certificate: Qs0Report,
    passed: bool,
}

pub fn weld(input: &Path, common: &Common) -> Outcome {
    let h: CircleHomeo = read(input)?;
    let err = numeric("weld");
    let opts = weld_options(common);
    let pair = weld_pair(&h, &opts).map_err(&err)?;
    let residual = welding_residual(&pair, &h, opts.samples).map_err(&err)?;
    let certificate = qs0_certify(&h, &opts).map_err(&err)?;
    let passed = residual < common.tol.unwrap_or(RESIDUAL_TOL) && certificate.passed;
    artifact(&WeldOutput { f: pair.f, g: pair.g, residual, certificate, passed }, None, passed)
}

fn cap_options(common: &Common) -> CapOptions {
    let mut cap = CapOptions::default();
    if let Some(n) = common.truncation {
        cap.weld = WeldOptions::with_truncation(n as usize);
        cap.exterior_truncation = 2 * n as usize;
    }
    if let Some(m) = common.samples {
        cap.theodorsen.samples = m;
    }
    cap
}

#[derive(Serialize)]
struct SweepPoint {
    eps: C64,
    lambda: Vec<C64>,
    punctures: Vec<ExtPoint>,
    transitions: Vec<DiscTransition>,
    residual: f64,
}

#[derive(Serialize)]
struct SweepOutput {
    config: PuncturedSphereConfig,
    disc: usize,
    points: Vec<SweepPoint>,
    passed: bool,
}

#[derive(Serialize)]
struct SweepRow {
    coordinate: usize,
    eps_re: String,
    eps_im: String,
    lambda_re: String,
    lambda_im: String,
    residual: String,
}

pub fn schiffer_sweep(input: &Path, disc: usize, steps: usize, common: &Common) -> Outcome {
    let config: PuncturedSphereConfig = read(input)?;
    if disc >= config.discs.len() || config.epsilon.len() != config.discs.len() {
        return Err(parse_err(input, format!("disc {disc} and the epsilon list must match the {} discs", config.discs.len())));
    }
    let opts = SchifferOptions { cap: cap_options(common), ..SchifferOptions::default() };
    let top = config.epsilon[disc];
    let points: Vec<SweepPoint> = (0..=steps)
        .into_par_iter()
        .map(|k| {
            let mut eps = config.epsilon.clone();
            eps[disc] = top * (k as f64 / steps as f64);
            let varied = schiffer_vary(&config.with_epsilon(eps.clone()), &opts)?;
            let lambda = classify(&varied.punctures)?.lambda;
            let residual = varied.transitions.iter().map(|t| t.residual).fold(0.0, f64::max);
            Ok(SweepPoint { eps: eps[disc], lambda, punctures: varied.punctures, transitions: varied.transitions, residual })
        })
        .collect::<teich_core::Result<_>>()
        .map_err(numeric("schiffer-sweep"))?;
    let tol = common.tol.unwrap_or(RESIDUAL_TOL);
    let passed = points.iter().all(|p| p.residual < tol);
    let rows: Vec<SweepRow> = points
        .iter()
        .flat_map(|p| {
            p.lambda.iter().enumerate().map(move |(j, l)| SweepRow {
                coordinate: j,
                eps_re: fixed(p.eps.re),
                eps_im: fixed(p.eps.im),
                lambda_re: fixed(l.re),
                lambda_im: fixed(l.im),
                residual: fixed(p.residual),
            })
        })
        .collect();
    let csv = write_csv(&["coordinate", "eps_re", "eps_im", "lambda_re", "lambda_im", "residual"], &rows)?;
    artifact(&SweepOutput { config, disc, points, passed }, Some(csv), passed)
}

#[derive(Serialize)]
struct SewOutput {
    maps: Vec<PowerSeries>,
    punctures: Vec<C64>,
    separation: f64,
    residuals: Vec<f64>,
    membership: Vec<MembershipVerdict>,
    chart_independence: Vec<ChartIndependenceReport>,
    passed: bool,
}

pub fn sew(input: &Path, charts: usize, common: &Common) -> Outcome {
    let rigged: RiggedSphere = read(input)?;
    let err = numeric("sew");
    let tol = common.tol.unwrap_or(RESIDUAL_TOL);
    let sewing = sew_caps(&rigged, &SewOptions { cap: cap_options(common), tol }).map_err(&err)?;
    let maps = sewing.maps;
    let enclosing = NChart::enclosing(&maps).map_err(&err)?;
    let membership = oqco_on_sphere(&maps, &enclosing).map_err(&err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(common.seed.unwrap_or(0));
    let random: Vec<NChart> = (0..charts).map(|_| NChart::random(&maps, &mut rng)).collect::<teich_core::Result<_>>().map_err(&err)?;
    let chart_independence = random
        .par_iter()
        .map(|b| chart_independence_check(&maps, &enclosing, b))
        .collect::<teich_core::Result<Vec<_>>>()
        .map_err(&err)?;
    let passed = sewing.residuals.iter().all(|r| *r < tol)
        && membership.iter().all(|m| m.verdict == LadderVerdict::Member)
        && chart_independence.iter().all(|c| c.passed);
    let out = SewOutput {
        punctures: maps.punctures.clone(),
        separation: maps.separation,
        maps: maps.maps,
        residuals: sewing.residuals,
        membership,
        chart_independence,
        passed,
    };
    artifact(&out, None, passed)
}

/// Any JSON object with a `maps` list of interior series, e.g. a `sew` artifact.
#[derive(Deserialize)]
struct MapsFile {
    maps: Vec<PowerSeries>,
}

#[derive(Serialize)]
struct EquivOutput {
    #[serde(flatten)]
    report: EquivalenceReport,
    tol: f64,
    /// The comparison ran; `equivalent` carries the verdict.
    passed: bool,
}

pub fn equiv(a: &Path, b: &Path, common: &Common) -> Outcome {
    let load = |p: &Path| -> Result<NonOverlappingMaps, JobError> {
        NonOverlappingMaps::new(read::<MapsFile>(p)?.maps).map_err(|e| parse_err(p, e))
    };
    let (ma, mb) = (load(a)?, load(b)?);
    let tol = common.tol.unwrap_or(EQUIVALENCE_TOL);
    let report = moduli_equivalent(&ma, &mb, tol).map_err(numeric("equiv"))?;
    artifact(&EquivOutput { report, tol, passed: true }, None, true)
}

#[derive(Serialize)]
struct SuiteOutput {
    manifest: SuiteManifest,
    rows: Vec<SuiteRow>,
    passed: bool,
}

#[derive(Serialize)]
struct SuiteCsvRow {
    check: String,
    instance: Option<u64>,
    name: String,
    digest: String,
    slack: String,
    passed: bool,
}

pub fn verify_suite(input: Option<&Path>, common: &Common) -> Outcome {
    let mut manifest = match input {
        Some(p) => read::<SuiteManifest>(p)?,
        None => SuiteManifest::standard(),
    };
    if let Some(seed) = common.seed {
        manifest.seed = seed;
    }
    let rows = run_suite(&manifest).map_err(numeric("verify-suite"))?;
    let passed = rows.iter().all(|r| r.report.passed);
    let table: Vec<SuiteCsvRow> = rows
        .iter()
        .map(|r| SuiteCsvRow {
            check: serde_json::to_value(r.check).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default(),
            instance: r.instance,
            name: r.report.name.clone(),
            digest: r.report.digest.clone(),
            slack: fixed(r.report.slack),
            passed: r.report.passed,
        })
        .collect();
    let csv = write_csv(&["check", "instance", "name", "digest", "slack", "passed"], &table)?;
    artifact(&SuiteOutput { manifest, rows, passed }, Some(csv), passed)
}
