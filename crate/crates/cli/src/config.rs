//! JSON experiment configuration and its resolution against flags,
//! presets and the environment.

use std::path::{Path, PathBuf};

use mpverify::models::{ColumnLaw, MatrixModel, DEFAULT_MEMORY_CAP};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::presets::{Preset, DEFAULT_SCALE};

pub const OUTPUT_DIR_ENV: &str = "MPVERIFY_OUTPUT_DIR";
pub const DEFAULT_BINS: usize = 100;
pub const DEFAULT_SEED: u64 = 20_240_601;
pub const DEFAULT_OUTPUT_DIR: &str = "mpverify-out";

/// Either a preset name (`"figure1a"`) or an explicit model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelSpec {
    Preset(String),
    Explicit(MatrixModel),
}

/// Law the spectrum is compared against. Missing `lambda` means `p/m`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Comparison {
    /// Isotropic law when `E xxᵀ = σ²I`, otherwise the anisotropic law of
    /// the block variances.
    #[default]
    Auto,
    Mp {
        #[serde(default)]
        lambda: Option<f64>,
        #[serde(default)]
        sigma2: Option<f64>,
    },
    /// Population spectrum `H = Σ weight·δ_location`.
    Anisotropic {
        #[serde(default)]
        lambda: Option<f64>,
        atoms: Vec<(f64, f64)>,
    },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub model: Option<ModelSpec>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub histogram_bins: Option<usize>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub comparison: Option<Comparison>,
    /// Only used with presets.
    #[serde(default)]
    pub scale_factor: Option<f64>,
    #[serde(default)]
    pub memory_cap: Option<u64>,
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub preset: Option<String>,
    pub seed: Option<u64>,
    pub histogram_bins: Option<usize>,
    pub output_dir: Option<PathBuf>,
    pub scale_factor: Option<f64>,
    pub full: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ResolvedComparison {
    Mp { lambda: f64, sigma2: f64 },
    Anisotropic { lambda: f64, atoms: Vec<(f64, f64)> },
}

/// Fully determined experiment; echoed into `result.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedExperiment {
    pub name: String,
    pub model: MatrixModel,
    pub p: usize,
    pub m: usize,
    pub seed: u64,
    pub histogram_bins: usize,
    pub output_dir: PathBuf,
    pub comparison: ResolvedComparison,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale_factor: Option<f64>,
    pub memory_cap: u64,
}

/// Output directory: flag, then environment, then file, then default.
pub fn resolve_output_dir(flag: Option<&Path>, file: Option<&Path>) -> PathBuf {
    if let Some(dir) = flag {
        return dir.to_path_buf();
    }
    if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV).filter(|v| !v.is_empty()) {
        return PathBuf::from(dir);
    }
    file.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR))
}

/// Model named by the override preset, else the file's model.
pub fn resolve_model(
    spec: Option<&ModelSpec>,
    preset_flag: Option<&str>,
    scale_flag: Option<f64>,
    full: bool,
    file_scale: Option<f64>,
) -> Result<(String, MatrixModel, Option<f64>, Option<Preset>), CliError> {
    let spec = match preset_flag {
        Some(name) => ModelSpec::Preset(name.to_string()),
        None => spec
            .cloned()
            .ok_or_else(|| CliError::Config("no model given (use a config file or --preset)".into()))?,
    };
    match spec {
        ModelSpec::Preset(name) => {
            let preset = Preset::parse(&name)?;
            let scale = if full { 1.0 } else { scale_flag.or(file_scale).unwrap_or(DEFAULT_SCALE) };
            Ok((preset.name(), preset.model(scale)?, Some(scale), Some(preset)))
        }
        ModelSpec::Explicit(model) => {
            if scale_flag.is_some() || full || file_scale.is_some() {
                return Err(CliError::Config("scale_factor applies to presets only".into()));
            }
            Ok(("custom".into(), model, None, None))
        }
    }
}

pub fn resolve(config: &ExperimentConfig, overrides: &Overrides) -> Result<ResolvedExperiment, CliError> {
    let (name, model, scale_factor, preset) = resolve_model(
        config.model.as_ref(),
        overrides.preset.as_deref(),
        overrides.scale_factor,
        overrides.full,
        config.scale_factor,
    )?;
    model.validate()?;
    let bins = overrides.histogram_bins.or(config.histogram_bins).unwrap_or(DEFAULT_BINS);
    if bins == 0 {
        return Err(CliError::Config("histogram_bins must be positive".into()));
    }
    let comparison = config
        .comparison
        .clone()
        .or_else(|| preset.map(|p| p.comparison()))
        .unwrap_or_default();
    Ok(ResolvedExperiment {
        name,
        p: model.p(),
        m: model.m,
        comparison: resolve_comparison(&comparison, &model)?,
        model,
        seed: overrides.seed.or(config.seed).unwrap_or(DEFAULT_SEED),
        histogram_bins: bins,
        output_dir: resolve_output_dir(overrides.output_dir.as_deref(), config.output_dir.as_deref()),
        scale_factor,
        memory_cap: config.memory_cap.unwrap_or(DEFAULT_MEMORY_CAP as u64),
    })
}

/// Population spectrum of the column law: each block contributes its
/// variance with weight proportional to its size.
pub fn population_spectrum(columns: &ColumnLaw) -> Vec<(f64, f64)> {
    let p = columns.dim() as f64;
    match columns {
        ColumnLaw::BlockIndependent { blocks } => {
            let mut atoms: Vec<(f64, f64)> = Vec::new();
            for b in blocks.iter().filter(|b| b.repeat > 0) {
                let w = (b.kind.size() * b.repeat) as f64 / p;
                let v = b.kind.variance();
                match atoms.iter_mut().find(|a| a.0 == v) {
                    Some(a) => a.1 += w,
                    None => atoms.push((v, w)),
                }
            }
            atoms
        }
        _ => vec![(1.0, 1.0)],
    }
}

pub fn resolve_comparison(c: &Comparison, model: &MatrixModel) -> Result<ResolvedComparison, CliError> {
    let default_lambda = model.aspect_ratio();
    let check = |lambda: f64| {
        if lambda > 0.0 && lambda.is_finite() {
            Ok(lambda)
        } else {
            Err(CliError::Config(format!("lambda must be positive, got {lambda}")))
        }
    };
    Ok(match c {
        Comparison::Auto => {
            let atoms = population_spectrum(&model.columns);
            if atoms.len() == 1 {
                ResolvedComparison::Mp { lambda: default_lambda, sigma2: atoms[0].0 }
            } else {
                ResolvedComparison::Anisotropic { lambda: default_lambda, atoms }
            }
        }
        Comparison::Mp { lambda, sigma2 } => ResolvedComparison::Mp {
            lambda: check(lambda.unwrap_or(default_lambda))?,
            sigma2: sigma2.unwrap_or_else(|| model.columns.scalar_variance().unwrap_or(1.0)),
        },
        Comparison::Anisotropic { lambda, atoms } => ResolvedComparison::Anisotropic {
            lambda: check(lambda.unwrap_or(default_lambda))?,
            atoms: atoms.clone(),
        },
    })
}
