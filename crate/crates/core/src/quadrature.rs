//! Quadrature rules on the unit disc and on intervals.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Gauss rule for `int_0^1 u^alpha F(u) du`, computed by Golub-Welsch.
pub fn gauss_jacobi_unit(n: usize, alpha: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if alpha <= -1.0 || !alpha.is_finite() {
        return Err(Error::Precondition(format!("weight exponent {alpha} must exceed -1")));
    }
    if n == 0 {
        return Err(Error::Config("quadrature needs at least one node".into()));
    }
    // Jacobi weight (1-x)^a (1+x)^b on [-1,1] with a = 0, b = alpha.
    let (a, b) = (0.0_f64, alpha);
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let diag = if k == 0 {
            (b - a) / (a + b + 2.0)
        } else {
            (b * b - a * a) / ((2.0 * kf + a + b) * (2.0 * kf + a + b + 2.0))
        };
        jac[(k, k)] = diag;
        if k + 1 < n {
            let m = kf + 1.0;
            let beta = if k == 0 {
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b).powi(2) * (3.0 + a + b))
            } else {
                let s = 2.0 * m + a + b;
                4.0 * m * (m + a) * (m + b) * (m + a + b) / (s * s * (s + 1.0) * (s - 1.0))
            };
            jac[(k, k + 1)] = beta.sqrt();
            jac[(k + 1, k)] = beta.sqrt();
        }
    }
    let mu0 = 2f64.powf(b + 1.0) / (b + 1.0);
    let eig = SymmetricEigen::new(jac);
    let scale = 2f64.powf(-alpha - 1.0);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let x = eig.eigenvalues[i];
            let v0 = eig.eigenvectors[(0, i)];
            ((1.0 + x) / 2.0, scale * mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    Ok(pairs.into_iter().unzip())
}

/// Gauss-Legendre nodes and weights on `[lo, hi]`.
pub fn gauss_legendre(n: usize, lo: f64, hi: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let (u, w) = gauss_jacobi_unit(n, 0.0)?;
    let len = hi - lo;
    Ok((u.iter().map(|x| lo + len * x).collect(), w.iter().map(|x| x * len).collect()))
}

/// Tensor rule for `iint_D g(z) (1-|z|^2)^alpha dA`: Gauss-Jacobi in `u = 1 - r^2`
/// times the trapezoid rule in angle. The substitution absorbs the endpoint
/// weight at `r = 1` exactly.
#[derive(Clone, Debug)]
pub struct DiscRule {
    pub alpha: f64,
    pub radii: Vec<f64>,
    /// Radial weights, including the factor 1/2 from `r dr = -du/2`.
    pub weights: Vec<f64>,
    pub angles: usize,
}

impl DiscRule {
    pub fn new(alpha: f64, radial: usize, angles: usize) -> Result<Self> {
        let (u, w) = gauss_jacobi_unit(radial, alpha)?;
        let radii = u.iter().map(|u| (1.0 - u).max(0.0).sqrt()).collect();
        let weights = w.iter().map(|w| 0.5 * w).collect();
        Ok(Self { alpha, radii, weights, angles })
    }

    /// `ring(r, m)` returns integrand values at `m'` equispaced angles on `|z| = r`
    /// (`m'` may exceed the requested `m`).
    pub fn integrate<F>(&self, mut ring: F) -> Result<f64>
    where
        F: FnMut(f64, usize) -> Result<Vec<f64>>,
    {
        let mut total = 0.0;
        for (&r, &w) in self.radii.iter().zip(&self.weights) {
            let vals = ring(r, self.angles)?;
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            total += w * std::f64::consts::TAU * mean;
        }
        Ok(total)
    }
}

/// Result of a refinement ladder.
#[derive(Clone, Debug, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub converged: bool,
    pub radial: usize,
    pub angles: usize,
}

/// Doubles radial and angular resolution until the relative change drops
/// below `tol` or `levels` refinements have been spent.
pub fn integrate_disc<F>(alpha: f64, tol: f64, levels: usize, mut ring: F) -> Result<Quadrature>
where
    F: FnMut(f64, usize) -> Result<Vec<f64>>,
{
    let (mut radial, mut angles) = (24usize, 64usize);
    let mut prev = DiscRule::new(alpha, radial, angles)?.integrate(&mut ring)?;
    for _ in 0..levels {
        radial *= 2;
        angles *= 2;
        let next = DiscRule::new(alpha, radial, angles)?.integrate(&mut ring)?;
        let scale = next.abs().max(prev.abs()).max(f64::MIN_POSITIVE);
        if (next - prev).abs() <= tol * scale || next == prev {
            return Ok(Quadrature { value: next, converged: true, radial, angles });
        }
        prev = next;
    }
    Ok(Quadrature { value: prev, converged: false, radial, angles })
}

/// Golden-section maximisation of a unimodal `f` on `[lo, hi]`.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_moments() {
        for &alpha in &[-0.5, 0.0, 0.5, 2.0] {
            let (u, w) = gauss_jacobi_unit(12, alpha).unwrap();
            for k in 0..10 {
                let got: f64 = u.iter().zip(&w).map(|(u, w)| w * u.powi(k)).sum();
                let exact = 1.0 / (alpha + k as f64 + 1.0);
                assert!((got - exact).abs() < 1e-13, "alpha={alpha} k={k}: {got} vs {exact}");
            }
        }
        assert!(gauss_jacobi_unit(4, -1.0).is_err());
    }

    #[test]
    fn disc_area() {
        let rule = DiscRule::new(0.0, 8, 16).unwrap();
        let area = rule.integrate(|_, m| Ok(vec![1.0; m])).unwrap();
        assert!((area - std::f64::consts::PI).abs() < 1e-13);
        let rule = DiscRule::new(-0.5, 8, 16).unwrap();
        // iint (1-r^2)^{-1/2} dA = 2 pi
        let v = rule.integrate(|_, m| Ok(vec![1.0; m])).unwrap();
        assert!((v - std::f64::consts::TAU).abs() < 1e-13);
    }

    #[test]
    fn golden_section_finds_peak() {
        let (x, fx) = golden_max(|r| (1.0 - r * r) * r, 0.0, 1.0, 1e-10);
        assert!((x - 1.0 / 3f64.sqrt()).abs() < 1e-7);
        assert!((fx - 2.0 / (3.0 * 3f64.sqrt())).abs() < 1e-12);
    }
}
