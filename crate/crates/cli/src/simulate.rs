//! One single-realization spectrum experiment.

use std::path::PathBuf;
use std::time::Instant;

use mpverify::linalg::{eigvalsh, sample_covariance};
use mpverify::models::{build_matrix_with_cap, SeedSpec};
use mpverify::mplaw::{
    density_from_stieltjes, ks_distance, AnisotropicLaw, Esd, MpLaw, SpectralMixture, DEFAULT_ETA,
};
use serde::Serialize;

use crate::config::{ResolvedComparison, ResolvedExperiment};
use crate::error::CliError;
use crate::output::{histogram, write_json, write_rows_to_file};

pub const THEORY_POINTS: usize = 501;
const TABULATION_POINTS: usize = 4001;

/// Limit law an empirical spectrum is compared with.
#[derive(Debug, Clone)]
pub enum TheoryLaw {
    Mp(MpLaw),
    Anisotropic(AnisotropicLaw),
}

impl TheoryLaw {
    pub fn from_comparison(c: &ResolvedComparison) -> Result<Self, CliError> {
        Ok(match c {
            ResolvedComparison::Mp { lambda, sigma2 } => TheoryLaw::Mp(MpLaw::new(*lambda, *sigma2)?),
            ResolvedComparison::Anisotropic { lambda, atoms } => TheoryLaw::Anisotropic(AnisotropicLaw::tabulate(
                *lambda,
                SpectralMixture::new(atoms.clone())?,
                TABULATION_POINTS,
            )?),
        })
    }

    pub fn ks_distance(&self, esd: &Esd) -> f64 {
        match self {
            TheoryLaw::Mp(law) => ks_distance(esd, law),
            TheoryLaw::Anisotropic(law) => ks_distance(esd, law),
        }
    }

    /// Right end of the support (approximate for the anisotropic law).
    pub fn upper_edge(&self) -> f64 {
        match self {
            TheoryLaw::Mp(law) => law.upper_edge(),
            TheoryLaw::Anisotropic(law) => law.mixture().max_location() * (1.0 + law.lambda().sqrt()).powi(2),
        }
    }

    pub fn atom0(&self) -> f64 {
        match self {
            TheoryLaw::Mp(law) => law.atom0(),
            TheoryLaw::Anisotropic(law) => law.atom0(),
        }
    }

    /// Density of the continuous part.
    pub fn density(&self, x: f64) -> Result<f64, CliError> {
        Ok(match self {
            TheoryLaw::Mp(law) => law.density(x),
            TheoryLaw::Anisotropic(_) if x <= 0.0 => 0.0,
            TheoryLaw::Anisotropic(law) => density_from_stieltjes(x, law.lambda(), law.mixture(), DEFAULT_ETA)?,
        })
    }

    /// `(x, density)` on `points` equally spaced nodes of `[from, to]`.
    pub fn curve(&self, from: f64, to: f64, points: usize) -> Result<Vec<[f64; 2]>, CliError> {
        if !(from.is_finite() && to.is_finite() && to > from) || points < 2 {
            return Err(CliError::Config(format!("bad grid [{from}, {to}] with {points} points")));
        }
        (0..points)
            .map(|k| {
                let x = from + (to - from) * k as f64 / (points - 1) as f64;
                Ok([x, self.density(x)?])
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputFiles {
    pub eigenvalues: PathBuf,
    pub histogram: PathBuf,
    pub theory: PathBuf,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentResult {
    pub config: ResolvedExperiment,
    pub ks_distance: f64,
    pub law_atom_at_zero: f64,
    pub eigenvalue_min: f64,
    pub eigenvalue_max: f64,
    pub wall_time_seconds: f64,
    pub files: OutputFiles,
}

/// Builds `X`, forms `W = XXᵀ/m`, and compares its spectrum with the
/// resolved law. Writes `eigenvalues.csv`, `histogram.csv`, `theory.csv`
/// and `result.json` into the output directory.
pub fn run_simulate(exp: &ResolvedExperiment) -> Result<ExperimentResult, CliError> {
    let start = Instant::now();
    let law = TheoryLaw::from_comparison(&exp.comparison)?;
    let x = build_matrix_with_cap(&exp.model, &SeedSpec::new(exp.seed), exp.memory_cap as u128)?;
    let w = sample_covariance(&x)?;
    drop(x);
    let spectrum = eigvalsh(&w)?;
    let tol = 1e-9 * spectrum.max().unwrap_or(0.0).abs().max(1.0);
    let esd = Esd::from_psd_spectrum(spectrum, tol)?;
    let ks = law.ks_distance(&esd);
    let eig = esd.eigenvalues();
    let (lo, hi) = (eig[0], eig[eig.len() - 1]);

    std::fs::create_dir_all(&exp.output_dir)?;
    let files = OutputFiles {
        eigenvalues: exp.output_dir.join("eigenvalues.csv"),
        histogram: exp.output_dir.join("histogram.csv"),
        theory: exp.output_dir.join("theory.csv"),
    };
    let eig_rows: Vec<[f64; 1]> = eig.iter().map(|&v| [v]).collect();
    write_rows_to_file(&files.eigenvalues, ["eigenvalue"], &eig_rows)?;
    write_rows_to_file(&files.histogram, ["bin_left", "bin_right", "density"], &histogram(eig, exp.histogram_bins))?;
    let right = law.upper_edge().max(hi) * 1.05;
    write_rows_to_file(&files.theory, ["x", "density"], &law.curve(0.0, right, THEORY_POINTS)?)?;

    let result = ExperimentResult {
        config: exp.clone(),
        ks_distance: ks,
        law_atom_at_zero: law.atom0(),
        eigenvalue_min: lo,
        eigenvalue_max: hi,
        wall_time_seconds: start.elapsed().as_secs_f64(),
        files,
    };
    write_json(&exp.output_dir.join("result.json"), &result)?;
    Ok(result)
}
