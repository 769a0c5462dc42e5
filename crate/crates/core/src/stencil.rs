//! Four-point Cauchy-Riemann stencils for holomorphy diagnostics.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::series::C64;

/// Wirtinger derivative estimates at one step size, maximised over outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrStep {
    pub delta: f64,
    /// `|d/dt|` of the output with the largest holomorphic derivative.
    pub d_holo: f64,
    /// Largest `|d/d conj(t)|` over the outputs.
    pub d_anti: f64,
    pub ratio: f64,
    /// Holomorphic derivative of each output.
    pub derivative: Vec<C64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrReport {
    pub steps: Vec<CrStep>,
    /// Ratios shrink (within a noise factor 2) along the step ladder.
    pub decreasing: bool,
    /// The conjugate derivative dominates at every step.
    pub anti_holomorphic: bool,
}

impl CrReport {
    pub fn final_ratio(&self) -> f64 {
        self.steps.last().map_or(f64::NAN, |s| s.ratio)
    }
}

/// Central differences of `f` at `t0 +- delta`, `t0 +- i delta`.
pub fn cr_step<F>(f: &F, t0: C64, delta: f64) -> Result<CrStep>
where
    F: Fn(C64) -> Result<Vec<C64>> + Sync,
{
    let offsets = [C64::new(delta, 0.0), C64::new(-delta, 0.0), C64::new(0.0, delta), C64::new(0.0, -delta)];
    let values: Vec<Vec<C64>> = offsets.par_iter().map(|o| f(t0 + o)).collect::<Result<_>>()?;
    let k = values[0].len();
    let mut derivative = Vec::with_capacity(k);
    let (mut d_holo, mut d_anti): (f64, f64) = (0.0, 0.0);
    for i in 0..k {
        let dx = (values[0][i] - values[1][i]) / (2.0 * delta);
        let dy = (values[2][i] - values[3][i]) / (2.0 * delta);
        let i_dy = C64::new(0.0, 1.0) * dy;
        let holo = (dx - i_dy) * 0.5;
        let anti = (dx + i_dy) * 0.5;
        d_holo = d_holo.max(holo.norm());
        d_anti = d_anti.max(anti.norm());
        derivative.push(holo);
    }
    let ratio = if d_holo > 0.0 { d_anti / d_holo } else if d_anti > 0.0 { f64::INFINITY } else { 0.0 };
    Ok(CrStep { delta, d_holo, d_anti, ratio, derivative })
}

/// Runs [`cr_step`] along a ladder of step sizes.
pub fn cr_probe<F>(f: &F, t0: C64, ladder: &[f64]) -> Result<CrReport>
where
    F: Fn(C64) -> Result<Vec<C64>> + Sync,
{
    let steps: Vec<CrStep> = ladder.iter().map(|&d| cr_step(f, t0, d)).collect::<Result<_>>()?;
    let decreasing = steps.windows(2).all(|w| w[1].ratio <= 2.0 * w[0].ratio);
    let anti_holomorphic = steps.iter().all(|s| s.d_anti > s.d_holo);
    Ok(CrReport { steps, decreasing, anti_holomorphic })
}
