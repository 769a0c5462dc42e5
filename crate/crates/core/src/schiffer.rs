//! Schiffer variation of punctured spheres and the cross-ratio coordinate.
//!
//! Disc `i` is `D_i = {|p - c_i| < r_i}` with chart `xi_i(p) = (p - c_i)/r_i`.
//! Varying it by `eps_i` (in sphere units) removes `D_i` and glues in the
//! region bounded by `v(z) = z + (eps_i / r_i^2)/z`, `|z| = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mobius::{ExtPoint, Mobius, COINCIDENCE_TOL};
use crate::series::{PowerSeries, C64};
use crate::stencil::{cr_probe, CrReport};
use crate::uniformize::{theodorsen, CapOptions, CapStep, Side, StarCurve};

use std::f64::consts::TAU;

/// Default `|eps_i| <= GUARD r_i^2`.
pub const EPSILON_GUARD: f64 = 0.3;

/// Interior map `w(z) = z + eps conj(z)` and boundary map `v(z) = z + eps/z`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapMaps {
    pub eps: C64,
}

impl CapMaps {
    pub fn v(&self, z: C64) -> C64 {
        z + self.eps / z
    }

    pub fn w(&self, z: C64) -> C64 {
        z + self.eps * z.conj()
    }

    /// `v` as an exterior series `w + eps w^{-1}`.
    pub fn v_series(&self) -> PowerSeries {
        PowerSeries::exterior(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0), self.eps]).expect("finite")
    }

    /// `sup |v - w|` over `m` points of the unit circle.
    pub fn boundary_mismatch(&self, m: usize) -> f64 {
        (0..m)
            .map(|k| {
                let z = C64::from_polar(1.0, TAU * k as f64 / m as f64);
                (self.v(z) - self.w(z)).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// The pair `(v^eps, w^eps)`; requires `|eps| < 1`.
pub fn cap_maps(eps: C64) -> Result<CapMaps> {
    if !(eps.norm() < 1.0) {
        return Err(Error::CapDegenerate(eps.norm()));
    }
    let maps = CapMaps { eps };
    debug_assert!(maps.boundary_mismatch(64) < 1e-14);
    Ok(maps)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParametricDisc {
    pub center: C64,
    pub radius: f64,
}

impl ParametricDisc {
    pub fn boundary_point(&self, t: f64) -> C64 {
        self.center + C64::from_polar(self.radius, t)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PuncturedSphereConfig {
    pub punctures: Vec<ExtPoint>,
    pub discs: Vec<ParametricDisc>,
    pub epsilon: Vec<C64>,
}

impl PuncturedSphereConfig {
    /// Punctures `0, 1, infinity, -0.5 + i` with one disc of radius 0.3 at `0.5 - 0.8i`.
    pub fn standard(eps: C64) -> Self {
        Self {
            punctures: vec![ExtPoint::new(0.0, 0.0), ExtPoint::new(1.0, 0.0), ExtPoint::Infinity, ExtPoint::new(-0.5, 1.0)],
            discs: vec![ParametricDisc { center: C64::new(0.5, -0.8), radius: 0.3 }],
            epsilon: vec![eps],
        }
    }

    pub fn validate(&self, guard: f64) -> Result<()> {
        if self.punctures.len() < 4 {
            return Err(Error::InvalidInput("need at least four punctures".into()));
        }
        check_distinct(&self.punctures)?;
        if self.epsilon.len() != self.discs.len() {
            return Err(Error::InvalidInput("one epsilon per disc is required".into()));
        }
        for (i, d) in self.discs.iter().enumerate() {
            if !(d.radius > 0.0 && d.radius.is_finite()) {
                return Err(Error::InvalidInput(format!("disc {i} has invalid radius")));
            }
            for (j, e) in self.discs.iter().enumerate().skip(i + 1) {
                if (d.center - e.center).norm() <= d.radius + e.radius {
                    return Err(Error::InvalidInput(format!("discs {i} and {j} overlap")));
                }
            }
            for p in self.punctures.iter().filter_map(|p| p.finite()) {
                if (p - d.center).norm() <= d.radius {
                    return Err(Error::InvalidInput(format!("a puncture lies in closed disc {i}")));
                }
            }
            let eps = self.epsilon[i];
            if eps.norm() > guard * d.radius * d.radius {
                return Err(Error::Precondition(format!(
                    "|eps_{i}| = {:.3e} exceeds the guard {guard} r^2",
                    eps.norm()
                )));
            }
        }
        Ok(())
    }

    pub fn with_epsilon(&self, epsilon: Vec<C64>) -> Self {
        Self { epsilon, ..self.clone() }
    }
}

fn check_distinct(points: &[ExtPoint]) -> Result<()> {
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if points[i].chordal(points[j]) < COINCIDENCE_TOL {
                return Err(Error::Degeneration(format!("punctures {i} and {j} coincide")));
            }
        }
    }
    Ok(())
}

/// `lambda_k = T(p_k)` for `k >= 3`, `T` sending the first three punctures to `0, 1, infinity`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifyingCoordinate {
    pub lambda: Vec<C64>,
}

pub fn classify(punctures: &[ExtPoint]) -> Result<ClassifyingCoordinate> {
    if punctures.len() < 4 {
        return Err(Error::InvalidInput("classification needs at least four punctures".into()));
    }
    check_distinct(punctures)?;
    let t = Mobius::to_zero_one_infinity(punctures[0], punctures[1], punctures[2])?;
    let lambda = punctures[3..]
        .iter()
        .map(|&p| t.apply(p).finite().ok_or_else(|| Error::Degeneration("puncture sent to infinity".into())))
        .collect::<Result<_>>()?;
    Ok(ClassifyingCoordinate { lambda })
}

#[derive(Clone, Debug)]
pub struct SchifferOptions {
    pub cap: CapOptions,
    pub guard: f64,
}

impl Default for SchifferOptions {
    fn default() -> Self {
        Self { cap: CapOptions::default(), guard: EPSILON_GUARD }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscTransition {
    pub disc: usize,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariedSphere {
    pub punctures: Vec<ExtPoint>,
    /// In application order.
    pub transitions: Vec<DiscTransition>,
}

/// Chain of re-uniformizing coordinate changes, applied in order.
#[derive(Clone, Debug, Default)]
pub struct CoordinateChain {
    steps: Vec<CapStep>,
}

impl CoordinateChain {
    pub fn push_point(&self, p: ExtPoint) -> Result<ExtPoint> {
        match p {
            ExtPoint::Infinity => Ok(ExtPoint::Infinity),
            ExtPoint::Finite(mut z) => {
                for s in &self.steps {
                    z = s.push(z)?;
                }
                Ok(ExtPoint::Finite(z))
            }
        }
    }

    pub fn push(&self, z: C64) -> Result<C64> {
        self.steps.iter().try_fold(z, |z, s| s.push(z))
    }

    pub fn add(&mut self, step: CapStep) {
        self.steps.push(step);
    }

    pub fn steps(&self) -> &[CapStep] {
        &self.steps
    }
}

pub fn schiffer_vary(config: &PuncturedSphereConfig, opts: &SchifferOptions) -> Result<VariedSphere> {
    let order: Vec<usize> = (0..config.discs.len()).collect();
    schiffer_vary_ordered(config, &order, opts)
}

/// Varies the discs one after another in `order`, re-uniformizing after each.
pub fn schiffer_vary_ordered(
    config: &PuncturedSphereConfig,
    order: &[usize],
    opts: &SchifferOptions,
) -> Result<VariedSphere> {
    config.validate(opts.guard)?;
    let mut chain = CoordinateChain::default();
    let mut transitions = Vec::with_capacity(order.len());
    let m = opts.cap.theodorsen.samples;
    for &i in order {
        let disc = config.discs.get(i).ok_or_else(|| Error::InvalidInput(format!("no disc {i}")))?;
        let eps = config.epsilon[i];
        if eps.norm() == 0.0 {
            // identity gluing
            transitions.push(DiscTransition { disc: i, residual: 0.0 });
            continue;
        }
        let maps = cap_maps(eps / (disc.radius * disc.radius))?;
        let ellipse: Vec<C64> =
            (0..m).map(|j| maps.v(C64::from_polar(1.0, TAU * j as f64 / m as f64))).collect();
        let curve = StarCurve::from_samples(&ellipse, C64::new(0.0, 0.0))?;
        // cap point R(e^{i theta}) = v(e^{i t(theta)}) is glued to xi^{-1}(e^{i t(theta)})
        let inner = theodorsen(&curve, Side::Interior, &opts.cap.theodorsen)?;
        let seam: Vec<C64> = inner
            .t
            .iter()
            .map(|&t| chain.push(disc.boundary_point(t)))
            .collect::<Result<_>>()?;
        let step = CapStep::new(&seam, &opts.cap)?;
        transitions.push(DiscTransition { disc: i, residual: step.residual });
        chain.add(step);
    }
    let punctures: Vec<ExtPoint> =
        config.punctures.iter().map(|&p| chain.push_point(p)).collect::<Result<_>>()?;
    check_distinct(&punctures)?;
    Ok(VariedSphere { punctures, transitions })
}

/// Closed form for one disc: `p -> p + eps / (p - c)`.
pub fn single_disc_variation(disc: &ParametricDisc, eps: C64, p: ExtPoint) -> ExtPoint {
    match p {
        ExtPoint::Infinity => ExtPoint::Infinity,
        ExtPoint::Finite(z) => ExtPoint::Finite(z + eps / (z - disc.center)),
    }
}

/// Default step ladder for [`holomorphy_probe`].
pub const PROBE_LADDER: [f64; 3] = [1e-3, 5e-4, 2.5e-4];

/// Cauchy-Riemann diagnostics of `eps_i -> lambda` around the configured epsilon.
pub fn holomorphy_probe(
    config: &PuncturedSphereConfig,
    disc: usize,
    ladder: &[f64],
    opts: &SchifferOptions,
) -> Result<CrReport> {
    if disc >= config.discs.len() {
        return Err(Error::InvalidInput(format!("no disc {disc}")));
    }
    let e0 = config.epsilon[disc];
    let lambda = |e: C64| -> Result<Vec<C64>> {
        let mut eps = config.epsilon.clone();
        eps[disc] = e;
        let varied = schiffer_vary(&config.with_epsilon(eps), opts)?;
        Ok(classify(&varied.punctures)?.lambda)
    };
    cr_probe(&lambda, e0, ladder)
}

/// First-order motion of `lambda` for the standard normalization with punctures
/// `0, 1, infinity, lambda` and one disc centred at `c`.
pub fn first_order_lambda(lambda: C64, c: C64) -> C64 {
    1.0 / (lambda - c) + 1.0 / c - lambda * (1.0 / (1.0 - c) + 1.0 / c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cap_map_examples() {
        let maps = cap_maps(C64::new(0.1, 0.0)).unwrap();
        assert!((maps.v(C64::new(0.0, 1.0)) - C64::new(0.0, 0.9)).norm() < 1e-15);
        assert!(maps.boundary_mismatch(256) < 1e-15);
        let id = cap_maps(C64::new(0.0, 0.0)).unwrap();
        let z = C64::new(0.3, -0.7);
        assert_eq!(id.v(z), z);
        assert_eq!(id.w(z), z);
        assert!(matches!(cap_maps(C64::new(1.0, 0.0)), Err(Error::CapDegenerate(_))));
        let s = maps.v_series();
        assert!((s.eval(C64::new(0.0, 1.0)) - C64::new(0.0, 0.9)).norm() < 1e-15);
    }

    #[test]
    fn classify_examples() {
        let lam = C64::new(0.3, 0.8);
        let pts = [ExtPoint::new(0.0, 0.0), ExtPoint::new(1.0, 0.0), ExtPoint::Infinity, ExtPoint::Finite(lam)];
        assert!((classify(&pts).unwrap().lambda[0] - lam).norm() < 1e-15);

        let z = [C64::new(0.1, 0.2), C64::new(-1.0, 0.5), C64::new(2.0, -0.3), C64::new(0.4, 1.1)];
        let pts: Vec<ExtPoint> = z.iter().map(|&w| ExtPoint::Finite(w)).collect();
        let l = classify(&pts).unwrap().lambda[0];
        let hand = (z[0] - z[2]) * (z[1] - z[3]) / ((z[0] - z[3]) * (z[1] - z[2]));
        assert!((hand - (1.0 - 1.0 / l)).norm() < 1e-13);

        let scaled: Vec<ExtPoint> = z.iter().map(|&w| ExtPoint::Finite(w * C64::new(-2.0, 3.0))).collect();
        assert!((classify(&scaled).unwrap().lambda[0] - l).norm() < 1e-13);
        let dup = [pts[0], pts[1], pts[2], pts[1]];
        assert!(classify(&dup).is_err());
    }

    #[test]
    fn zero_variation_is_identity() {
        let cfg = PuncturedSphereConfig::standard(C64::new(0.0, 0.0));
        let out = schiffer_vary(&cfg, &SchifferOptions::default()).unwrap();
        assert_eq!(out.punctures, cfg.punctures);
        assert!(out.transitions.iter().all(|t| t.residual == 0.0));
    }

    #[test]
    fn single_disc_matches_closed_form() {
        let eps = C64::new(0.01, -0.005);
        let cfg = PuncturedSphereConfig::standard(eps);
        let out = schiffer_vary(&cfg, &SchifferOptions::default()).unwrap();
        for (p, q) in cfg.punctures.iter().zip(&out.punctures) {
            let expect = single_disc_variation(&cfg.discs[0], eps, *p);
            assert!(q.chordal(expect) < 1e-11, "{q:?} vs {expect:?}");
        }
    }

    #[test]
    fn probe_is_holomorphic_with_first_order_derivative() {
        let cfg = PuncturedSphereConfig::standard(C64::new(0.0, 0.0));
        let rep = holomorphy_probe(&cfg, 0, &PROBE_LADDER, &SchifferOptions::default()).unwrap();
        assert!(rep.final_ratio() < 1e-3 && !rep.anti_holomorphic);
        let lam = cfg.punctures[3].finite().unwrap();
        let expect = first_order_lambda(lam, cfg.discs[0].center);
        let got = rep.steps.last().unwrap().derivative[0];
        assert!((got - expect).norm() < 1e-5 * expect.norm(), "{got} vs {expect}");
    }

    fn two_discs(e: C64, f: C64) -> PuncturedSphereConfig {
        let mut cfg = PuncturedSphereConfig::standard(e);
        cfg.discs.push(ParametricDisc { center: C64::new(-1.2, -0.6), radius: 0.25 });
        cfg.epsilon.push(f);
        cfg
    }

    #[test]
    fn unvaried_disc_is_identity_gluing() {
        let e = C64::new(0.004, 0.002);
        let opts = SchifferOptions::default();
        let two = schiffer_vary(&two_discs(e, C64::new(0.0, 0.0)), &opts).unwrap();
        let one = schiffer_vary(&PuncturedSphereConfig::standard(e), &opts).unwrap();
        assert_eq!(two.punctures, one.punctures);
    }

    #[test]
    fn disc_order_commutes_at_first_order() {
        let e = C64::new(1e-3, 0.0);
        let cfg = two_discs(e, e);
        let opts = SchifferOptions::default();
        let a = classify(&schiffer_vary_ordered(&cfg, &[0, 1], &opts).unwrap().punctures).unwrap();
        let b = classify(&schiffer_vary_ordered(&cfg, &[1, 0], &opts).unwrap().punctures).unwrap();
        assert!((a.lambda[0] - b.lambda[0]).norm() < 1e-5);
    }

    #[test]
    fn guard_is_enforced() {
        let cfg = PuncturedSphereConfig::standard(C64::new(0.05, 0.0));
        assert!(matches!(schiffer_vary(&cfg, &SchifferOptions::default()), Err(Error::Precondition(_))));
    }
}
