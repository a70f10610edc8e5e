//! Self-consistent Stieltjes transform of the anisotropic Marchenko–Pastur
//! law,
//!
//! ```text
//! s(z) = Σ_t  w_t / ( t (1 − λ − λ z s) − z ),     Im z > 0,
//! ```
//!
//! for a finite-atomic population spectrum `H = Σ w_t δ_t`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{MpLawError, SpectralCdf};

pub const DEFAULT_ETA: f64 = 1e-6;
const RESIDUAL_TOL: f64 = 1e-10;
const FIXED_POINT_CAP: usize = 400;
const NEWTON_CAP: usize = 60;
const MIN_DAMPING: f64 = 1.0 / 1024.0;

/// Finite mixture of point masses, the population spectral distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralMixture {
    atoms: Vec<(f64, f64)>,
}

impl SpectralMixture {
    /// Atoms as `(location, weight)`; weights must be positive and sum to 1
    /// within 1e−12.
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self, MpLawError> {
        if atoms.is_empty() {
            return Err(MpLawError::InvalidMixture("no atoms".into()));
        }
        for &(t, w) in &atoms {
            if !(t.is_finite() && t >= 0.0) {
                return Err(MpLawError::InvalidMixture(format!("location {t}")));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(MpLawError::InvalidMixture(format!("weight {w}")));
            }
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(MpLawError::InvalidMixture(format!("weights sum to {total}")));
        }
        Ok(Self { atoms })
    }

    pub fn point_mass(t: f64) -> Result<Self, MpLawError> {
        Self::new(vec![(t, 1.0)])
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn max_location(&self) -> f64 {
        self.atoms.iter().fold(0.0, |acc, a| acc.max(a.0))
    }

    /// Weight sitting exactly at zero.
    pub fn mass_at_zero(&self) -> f64 {
        self.atoms.iter().filter(|a| a.0 == 0.0).map(|a| a.1).sum()
    }
}

/// Right-hand side of the fixed-point equation and its derivative in `s`.
fn map_and_derivative(s: Complex64, z: Complex64, lambda: f64, h: &SpectralMixture) -> (Complex64, Complex64) {
    let base = 1.0 - lambda - lambda * z * s;
    let mut value = Complex64::new(0.0, 0.0);
    let mut deriv = Complex64::new(0.0, 0.0);
    for &(t, w) in h.atoms() {
        let denom = t * base - z;
        let inv = denom.inv();
        value += w * inv;
        // d/ds [w / (t(1−λ−λzs) − z)] = w t λ z / denom²
        deriv += w * t * lambda * z * inv * inv;
    }
    (value, deriv)
}

fn residual(s: Complex64, z: Complex64, lambda: f64, h: &SpectralMixture) -> f64 {
    (map_and_derivative(s, z, lambda, h).0 - s).norm()
}

fn accept(s: Complex64, z: Complex64, lambda: f64, h: &SpectralMixture) -> bool {
    s.im > 0.0 && s.is_finite() && residual(s, z, lambda, h) <= RESIDUAL_TOL
}

/// Damped iteration `s ← (1−α)s + α G(s)` with α halved whenever the
/// residual grows.
fn damped_fixed_point(
    z: Complex64,
    lambda: f64,
    h: &SpectralMixture,
    start: Complex64,
    cap: usize,
) -> (Complex64, f64) {
    let mut s = start;
    let mut alpha = 0.5;
    let mut prev = f64::INFINITY;
    for _ in 0..cap {
        let g = map_and_derivative(s, z, lambda, h).0;
        let r = (g - s).norm();
        if r <= RESIDUAL_TOL && s.im > 0.0 {
            return (s, r);
        }
        if r > prev && alpha > MIN_DAMPING {
            alpha *= 0.5;
        }
        prev = r;
        s = (1.0 - alpha) * s + alpha * g;
    }
    let r = residual(s, z, lambda, h);
    (s, r)
}

/// Newton iterations on `F(s) = s − G(s)`, keeping `Im s > 0`.
fn newton(z: Complex64, lambda: f64, h: &SpectralMixture, start: Complex64) -> Option<Complex64> {
    let mut s = start;
    for _ in 0..NEWTON_CAP {
        let (g, dg) = map_and_derivative(s, z, lambda, h);
        let f = s - g;
        if f.norm() <= 0.1 * RESIDUAL_TOL {
            break;
        }
        let df = Complex64::new(1.0, 0.0) - dg;
        if df.norm() == 0.0 {
            return None;
        }
        let mut step = f / df;
        // Backtrack so the iterate stays in the upper half plane.
        let mut tries = 0;
        while (s - step).im <= 0.0 && tries < 30 {
            step *= 0.5;
            tries += 1;
        }
        s -= step;
        if !s.is_finite() {
            return None;
        }
    }
    accept(s, z, lambda, h).then_some(s)
}

/// Solves for the Stieltjes transform at `z` (`Im z > 0`).
///
/// Damped fixed-point iteration from `−1/z` is tried first. Close to the
/// real axis that iteration contracts very slowly, so the fallback solves at
/// `Re z + i` and walks `Im z` down geometrically, polishing each stage with
/// Newton steps seeded by the previous stage.
pub fn stieltjes_anisotropic(z: Complex64, lambda: f64, h: &SpectralMixture) -> Result<Complex64, MpLawError> {
    if !z.is_finite() || z.im <= 0.0 {
        return Err(MpLawError::InvalidParameter(format!("Im z must be positive, got {z}")));
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(MpLawError::InvalidParameter(format!("lambda = {lambda}")));
    }
    let (s, r) = damped_fixed_point(z, lambda, h, -z.inv(), FIXED_POINT_CAP);
    if r <= RESIDUAL_TOL && s.im > 0.0 {
        return Ok(s);
    }
    continuation(z, lambda, h).ok_or(MpLawError::NoConvergence { residual: r })
}

fn continuation(z: Complex64, lambda: f64, h: &SpectralMixture) -> Option<Complex64> {
    let start_eta = z.im.max(1.0);
    let z0 = Complex64::new(z.re, start_eta);
    let (mut s, r0) = damped_fixed_point(z0, lambda, h, -z0.inv(), 20 * FIXED_POINT_CAP);
    if !(r0 <= RESIDUAL_TOL && s.im > 0.0) {
        s = newton(z0, lambda, h, s)?;
    }
    let mut eta = start_eta;
    let mut factor = 0.5;
    while eta > z.im {
        let next = (eta * factor).max(z.im);
        match newton(Complex64::new(z.re, next), lambda, h, s) {
            Some(found) => {
                s = found;
                eta = next;
                factor = (factor * factor).max(0.5);
            }
            None => {
                // Shorter step in eta.
                factor = 0.5 * (1.0 + factor);
                if factor > 0.999 {
                    return None;
                }
            }
        }
    }
    Some(s)
}

/// Density recovered by Stieltjes inversion, `Im s(x + iη)/π`.
pub fn density_from_stieltjes(x: f64, lambda: f64, h: &SpectralMixture, eta: f64) -> Result<f64, MpLawError> {
    if eta.is_nan() || eta <= 0.0 {
        return Err(MpLawError::InvalidParameter(format!("eta = {eta}")));
    }
    let s = stieltjes_anisotropic(Complex64::new(x, eta), lambda, h)?;
    Ok(s.im / PI)
}

/// Anisotropic law tabulated on a grid so it can be compared against an
/// empirical spectrum. The continuous part is integrated with the
/// trapezoid rule and renormalised to `1 − atom0`.
#[derive(Debug, Clone)]
pub struct AnisotropicLaw {
    lambda: f64,
    mixture: SpectralMixture,
    atom0: f64,
    grid: Vec<f64>,
    density: Vec<f64>,
    cumulative: Vec<f64>,
}

impl AnisotropicLaw {
    pub fn tabulate(lambda: f64, mixture: SpectralMixture, points: usize) -> Result<Self, MpLawError> {
        if points < 2 {
            return Err(MpLawError::InvalidParameter("need at least two grid points".into()));
        }
        let upper = mixture.max_location() * (1.0 + lambda.sqrt()).powi(2) * 1.05;
        let grid: Vec<f64> = (0..points)
            .map(|k| upper * k as f64 / (points - 1) as f64)
            .collect();
        let density = grid
            .iter()
            .map(|&x| {
                if x == 0.0 {
                    Ok(0.0)
                } else {
                    density_from_stieltjes(x, lambda, &mixture, DEFAULT_ETA)
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        let atom0 = mixture.mass_at_zero().max(1.0 - 1.0 / lambda).max(0.0);
        let mut cumulative = vec![0.0; points];
        for k in 1..points {
            cumulative[k] = cumulative[k - 1] + 0.5 * (density[k] + density[k - 1]) * (grid[k] - grid[k - 1]);
        }
        let total = cumulative[points - 1];
        if total > 0.0 {
            let scale = (1.0 - atom0) / total;
            cumulative.iter_mut().for_each(|c| *c *= scale);
        }
        Ok(Self {
            lambda,
            mixture,
            atom0,
            grid,
            density,
            cumulative,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mixture(&self) -> &SpectralMixture {
        &self.mixture
    }

    pub fn atom0(&self) -> f64 {
        self.atom0
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn tabulated_density(&self) -> &[f64] {
        &self.density
    }
}

impl SpectralCdf for AnisotropicLaw {
    fn cdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let last = self.grid.len() - 1;
        if x >= self.grid[last] {
            return 1.0;
        }
        let k = self.grid.partition_point(|&g| g <= x).clamp(1, last);
        let (x0, x1) = (self.grid[k - 1], self.grid[k]);
        let t = (x - x0) / (x1 - x0);
        let c = self.cumulative[k - 1] + t * (self.cumulative[k] - self.cumulative[k - 1]);
        (self.atom0 + c).min(1.0)
    }

    fn cdf_left(&self, x: f64) -> f64 {
        if x == 0.0 {
            0.0
        } else {
            self.cdf(x)
        }
    }

    fn jump_points(&self) -> Vec<f64> {
        if self.atom0 > 0.0 {
            vec![0.0]
        } else {
            Vec::new()
        }
    }
}
