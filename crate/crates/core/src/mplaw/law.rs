use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::quadrature::integrate;
use super::{MpLawError, SpectralCdf};

/// Absolute tolerance handed to the quadrature for CDF evaluations.
const CDF_QUAD_TOL: f64 = 1e-12;

/// Marchenko–Pastur law with aspect ratio `lambda` and variance scale `sigma2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MpLaw {
    lambda: f64,
    sigma2: f64,
}

impl MpLaw {
    pub fn new(lambda: f64, sigma2: f64) -> Result<Self, MpLawError> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(MpLawError::InvalidParameter(format!("lambda = {lambda}")));
        }
        if !(sigma2.is_finite() && sigma2 > 0.0) {
            return Err(MpLawError::InvalidParameter(format!("sigma2 = {sigma2}")));
        }
        Ok(Self { lambda, sigma2 })
    }

    /// Unit-variance law.
    pub fn isotropic(lambda: f64) -> Result<Self, MpLawError> {
        Self::new(lambda, 1.0)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    /// Left edge `σ²(1−√λ)²` of the continuous part.
    pub fn lower_edge(&self) -> f64 {
        self.sigma2 * (1.0 - self.lambda.sqrt()).powi(2)
    }

    /// Right edge `σ²(1+√λ)²`.
    pub fn upper_edge(&self) -> f64 {
        self.sigma2 * (1.0 + self.lambda.sqrt()).powi(2)
    }

    /// Point mass at zero, `max(0, 1 − 1/λ)`.
    pub fn atom0(&self) -> f64 {
        (1.0 - 1.0 / self.lambda).max(0.0)
    }

    /// Density of the continuous part; the atom at zero is not included.
    pub fn density(&self, x: f64) -> f64 {
        let (lo, hi) = (self.lower_edge(), self.upper_edge());
        if !(x > lo && x < hi && x > 0.0) {
            return 0.0;
        }
        ((hi - x) * (x - lo)).sqrt() / (2.0 * PI * self.lambda * self.sigma2 * x)
    }

    /// Density times the Jacobian of `x = lo + (hi−lo)·sin²θ`. Smooth on
    /// `(0, π/2)`, including `lo = 0`.
    fn angular_integrand(&self, theta: f64) -> f64 {
        let (lo, hi) = (self.lower_edge(), self.upper_edge());
        let width = hi - lo;
        let (s, c) = theta.sin_cos();
        let x = lo + width * s * s;
        if x <= 0.0 {
            // lo = 0 and θ → 0: the ratio sin²θ / x tends to 1/width.
            return width * c * c / (PI * self.lambda * self.sigma2);
        }
        width * width * s * s * c * c / (PI * self.lambda * self.sigma2 * x)
    }

    /// Mass of the continuous part by quadrature; equals `1 − atom0`.
    pub fn continuous_mass(&self) -> f64 {
        integrate(|t| self.angular_integrand(t), 0.0, FRAC_PI_2, CDF_QUAD_TOL)
    }

    /// `F(x) = atom0·[x ≥ 0] + ∫_{λ₋}^{min(x,λ₊)} f`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let atom = self.atom0();
        let (lo, hi) = (self.lower_edge(), self.upper_edge());
        if x <= lo {
            return atom;
        }
        if x >= hi {
            return 1.0;
        }
        let theta = ((x - lo) / (hi - lo)).sqrt().asin();
        let value = atom + integrate(|t| self.angular_integrand(t), 0.0, theta, CDF_QUAD_TOL);
        value.clamp(0.0, 1.0)
    }
}

impl SpectralCdf for MpLaw {
    fn cdf(&self, x: f64) -> f64 {
        MpLaw::cdf(self, x)
    }

    fn cdf_left(&self, x: f64) -> f64 {
        if x == 0.0 {
            0.0
        } else {
            MpLaw::cdf(self, x)
        }
    }

    fn jump_points(&self) -> Vec<f64> {
        if self.atom0() > 0.0 {
            vec![0.0]
        } else {
            Vec::new()
        }
    }
}
