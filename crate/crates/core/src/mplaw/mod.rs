//! Marchenko–Pastur densities and CDFs, the anisotropic Stieltjes
//! fixed point, empirical spectral distributions and Kolmogorov distance.

mod esd;
mod law;
pub mod quadrature;
mod stieltjes;

use thiserror::Error;

pub use esd::{ks_distance, Esd};
pub use law::MpLaw;
pub use stieltjes::{
    density_from_stieltjes, stieltjes_anisotropic, AnisotropicLaw, SpectralMixture, DEFAULT_ETA,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MpLawError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid spectral mixture: {0}")]
    InvalidMixture(String),
    #[error("Stieltjes fixed point did not converge (last residual {residual:e})")]
    NoConvergence { residual: f64 },
    #[error("empirical spectrum must be nonempty and finite")]
    InvalidSpectrum,
}

/// A distribution function on the real line, continuous except at the
/// listed jump points.
pub trait SpectralCdf {
    /// Right-continuous value `F(x)`.
    fn cdf(&self, x: f64) -> f64;

    /// Left limit `F(x−)`.
    fn cdf_left(&self, x: f64) -> f64 {
        self.cdf(x)
    }

    fn jump_points(&self) -> Vec<f64> {
        Vec::new()
    }
}
