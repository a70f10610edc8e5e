//! Variance of quadratic forms `xᵀAx` and of the norm statistic `‖x‖²/p`.

mod bounds;
mod stats;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::{spectral_norm, DenseMatrix, LinalgError};
use crate::models::{BlockSpec, ColumnLaw, ColumnSampler, ModelError, SeedSpec};

pub use bounds::{
    bound_block, bound_tensor, hoeffding_lower_bound, tensor_degree_ratio, tensor_norm_variance, tensor_scale,
    TensorBound, DEFAULT_TENSOR_C, DEFAULT_TENSOR_SMALL_C,
};
pub use stats::{pairwise_sum, SampleMoments};

pub const MIN_SAMPLES: usize = 100;
pub const DEFAULT_SAMPLES: usize = 10_000;

#[derive(Debug, Error)]
pub enum ConcentrationError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("at least {MIN_SAMPLES} samples are required, got {0}")]
    TooFewSamples(usize),
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("{0}")]
    Unsupported(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Block,
    Tensor,
    TrivialFourthMoment,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadFormReport {
    pub mc_mean: f64,
    pub mc_variance: f64,
    pub mc_stderr: f64,
    pub samples: usize,
    pub theoretical_bound: f64,
    pub bound_kind: BoundKind,
    pub spectral_norm: f64,
    /// Exact `E‖x‖⁴`; `‖A‖²·E‖x‖⁴` is always a valid bound.
    pub mean_norm_fourth: f64,
    pub trivial_bound: f64,
    /// For tensors: the tensor bound before its unknown constant and the
    /// ratio `mc_variance / scale`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tensor: Option<TensorRatio>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TensorRatio {
    pub bound: TensorBound,
    pub scale: f64,
    pub variance_over_scale: f64,
}

fn check_samples(samples: usize) -> Result<(), ConcentrationError> {
    if samples < MIN_SAMPLES {
        return Err(ConcentrationError::TooFewSamples(samples));
    }
    Ok(())
}

fn check_square(a: &DenseMatrix, p: usize) -> Result<(), ConcentrationError> {
    if a.rows() != p || a.cols() != p {
        return Err(ConcentrationError::DimensionMismatch(format!(
            "matrix is {}x{} but the column dimension is {p}",
            a.rows(),
            a.cols()
        )));
    }
    Ok(())
}

/// Draws `samples` columns (sample `s` from stream `s`) and maps each through `f`.
/// Output order is the sample order, independent of thread scheduling.
fn map_columns<T, F>(sampler: &ColumnSampler<'_>, samples: usize, seeds: &SeedSpec, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&[f64]) -> T + Sync,
{
    let p = sampler.dim();
    (0..samples)
        .into_par_iter()
        .map_init(
            || vec![0.0; p],
            |x, s| {
                sampler.sample_into(&mut seeds.stream(s as u64), x);
                f(x)
            },
        )
        .collect()
}

/// Picks the sharpest bound that applies to `columns`.
fn select_bound(columns: &ColumnLaw, norm_a: f64) -> (f64, BoundKind, Option<TensorRatio>) {
    let trivial = norm_a * norm_a * columns.mean_norm_fourth();
    match columns {
        ColumnLaw::Tensor { n, d, law } => {
            let k = law.fourth_moment();
            let bound = bound_tensor(norm_a, k, *n, *d, DEFAULT_TENSOR_C, DEFAULT_TENSOR_SMALL_C);
            let scale = tensor_scale(norm_a, k, *n, *d);
            let ratio = TensorRatio { bound, scale, variance_over_scale: f64::NAN };
            match bound.value() {
                Some(v) => (v, BoundKind::Tensor, Some(ratio)),
                None => (trivial, BoundKind::TrivialFourthMoment, Some(ratio)),
            }
        }
        _ => {
            let sizes = columns.block_sizes().expect("non-tensor laws have blocks");
            match columns.scalar_variance() {
                // x = √c·y with E yyᵀ = I and fourth moments K/c².
                Some(c) if c > 0.0 => {
                    let k = columns.fourth_moment() / (c * c);
                    (c * c * bound_block(norm_a, k, &sizes), BoundKind::Block, None)
                }
                _ => (trivial, BoundKind::TrivialFourthMoment, None),
            }
        }
    }
}

/// Monte-Carlo estimate of `Var(xᵀAx)` for one column law.
pub fn var_quadform_mc(
    columns: &ColumnLaw,
    a: &DenseMatrix,
    samples: usize,
    seeds: &SeedSpec,
) -> Result<QuadFormReport, ConcentrationError> {
    check_samples(samples)?;
    let sampler = columns.sampler()?;
    check_square(a, sampler.dim())?;
    let values = map_columns(&sampler, samples, seeds, |x| a.quadratic_form(x));
    let moments = SampleMoments::from_values(&values);
    let norm_a = spectral_norm(a)?;
    let (theoretical_bound, bound_kind, mut tensor) = select_bound(columns, norm_a);
    if let Some(t) = tensor.as_mut() {
        t.variance_over_scale = if t.scale > 0.0 { moments.variance / t.scale } else { 0.0 };
    }
    let mean_norm_fourth = columns.mean_norm_fourth();
    Ok(QuadFormReport {
        mc_mean: moments.mean,
        mc_variance: moments.variance,
        mc_stderr: moments.variance_stderr,
        samples,
        theoretical_bound,
        bound_kind,
        spectral_norm: norm_a,
        mean_norm_fourth,
        trivial_bound: norm_a * norm_a * mean_norm_fourth,
        tensor,
    })
}

/// Copy of `a` keeping only the diagonal blocks of the given partition.
pub fn block_diagonal_part(a: &DenseMatrix, block_sizes: &[usize]) -> Result<DenseMatrix, ConcentrationError> {
    let p: usize = block_sizes.iter().sum();
    check_square(a, p)?;
    let mut d = DenseMatrix::zeros(p, p);
    let mut start = 0;
    for &size in block_sizes {
        for i in start..start + size {
            for j in start..start + size {
                d.set(i, j, a.get(i, j));
            }
        }
        start += size;
    }
    Ok(d)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionReport {
    pub var_diag: f64,
    pub var_off: f64,
    pub var_total: f64,
    pub stderr_diag: f64,
    pub stderr_off: f64,
    pub stderr_total: f64,
    pub samples: usize,
    /// `var_total − var_diag − var_off`.
    pub gap: f64,
    /// `5·√(se_total² + se_diag² + se_off²)`.
    pub tolerance: f64,
    pub additive: bool,
}

/// Splits `xᵀAx = xᵀDx + xᵀ(A−D)x` with `D` the diagonal blocks of `A` and
/// checks that the variances add, on paired samples.
pub fn decomposition_check(
    columns: &ColumnLaw,
    a: &DenseMatrix,
    samples: usize,
    seeds: &SeedSpec,
) -> Result<DecompositionReport, ConcentrationError> {
    check_samples(samples)?;
    let sizes = columns
        .block_sizes()
        .ok_or_else(|| ConcentrationError::Unsupported("decomposition needs a block partition".into()))?;
    let sampler = columns.sampler()?;
    check_square(a, sampler.dim())?;
    if !a.is_symmetric() {
        return Err(ConcentrationError::NotSymmetric);
    }
    let d = block_diagonal_part(a, &sizes)?;
    let pairs = map_columns(&sampler, samples, seeds, |x| (a.quadratic_form(x), d.quadratic_form(x)));
    let total: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let diag: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let off: Vec<f64> = pairs.iter().map(|p| p.0 - p.1).collect();
    let (t, dg, o) = (
        SampleMoments::from_values(&total),
        SampleMoments::from_values(&diag),
        SampleMoments::from_values(&off),
    );
    let gap = t.variance - dg.variance - o.variance;
    let tolerance = 5.0 * (t.variance_stderr.powi(2) + dg.variance_stderr.powi(2) + o.variance_stderr.powi(2)).sqrt();
    Ok(DecompositionReport {
        var_diag: dg.variance,
        var_off: o.variance,
        var_total: t.variance,
        stderr_diag: dg.variance_stderr,
        stderr_off: o.variance_stderr,
        stderr_total: t.variance_stderr,
        samples,
        gap,
        tolerance,
        additive: gap.abs() <= tolerance,
    })
}

/// Draws of `U_p = ‖x‖²/p` with their moments.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormStatistic {
    #[serde(skip)]
    pub values: Vec<f64>,
    pub samples: usize,
    pub mean: f64,
    pub mean_stderr: f64,
    pub variance: f64,
    pub variance_stderr: f64,
}

impl NormStatistic {
    fn from_values(values: Vec<f64>) -> Self {
        let m = SampleMoments::from_values(&values);
        Self {
            samples: values.len(),
            mean: m.mean,
            mean_stderr: (m.variance / values.len() as f64).sqrt(),
            variance: m.variance,
            variance_stderr: m.variance_stderr,
            values,
        }
    }
}

fn norm_sq_over_p(x: &[f64]) -> f64 {
    let p = x.len() as f64;
    x.iter().map(|v| v * v).sum::<f64>() / p
}

pub fn norm_statistic(columns: &ColumnLaw, samples: usize, seeds: &SeedSpec) -> Result<NormStatistic, ConcentrationError> {
    check_samples(samples)?;
    let sampler = columns.sampler()?;
    let values = map_columns(&sampler, samples, seeds, norm_sq_over_p);
    Ok(NormStatistic::from_values(values))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct YaskovReport {
    pub statistic: NormStatistic,
    pub n_blocks: usize,
    pub zero_fraction: f64,
    pub expected_zero_fraction: f64,
    /// Binomial standard deviation of the zero fraction at this sample size.
    pub zero_fraction_sigma: f64,
}

impl YaskovReport {
    pub fn within_band(&self, sigmas: f64) -> bool {
        (self.zero_fraction - self.expected_zero_fraction).abs() <= sigmas * self.zero_fraction_sigma
    }
}

/// Base block-independent vector with every block independently replaced by
/// zero with probability ½ and the result scaled by √2. The column stays
/// isotropic, but it is exactly zero with probability `2^{−n_blocks}`.
pub fn yaskov_counterexample(
    base_blocks: &[BlockSpec],
    samples: usize,
    seeds: &SeedSpec,
) -> Result<YaskovReport, ConcentrationError> {
    check_samples(samples)?;
    let base = ColumnLaw::BlockIndependent { blocks: base_blocks.to_vec() };
    let sampler = base.sampler()?;
    let sizes = base.block_sizes().expect("block law");
    let n_blocks = sizes.len();
    let p = sampler.dim();
    let draws: Vec<(f64, bool)> = (0..samples)
        .into_par_iter()
        .map_init(
            || vec![0.0; p],
            |x, s| {
                let mut rng = seeds.stream(s as u64);
                sampler.sample_into(&mut rng, x);
                let mut start = 0;
                for &size in &sizes {
                    let block = &mut x[start..start + size];
                    if rng.random_bool(0.5) {
                        block.fill(0.0);
                    } else {
                        block.iter_mut().for_each(|v| *v *= std::f64::consts::SQRT_2);
                    }
                    start += size;
                }
                (norm_sq_over_p(x), x.iter().all(|&v| v == 0.0))
            },
        )
        .collect();
    let zeros = draws.iter().filter(|d| d.1).count();
    let expected = 0.5f64.powi(n_blocks as i32);
    let values = draws.into_iter().map(|d| d.0).collect();
    Ok(YaskovReport {
        statistic: NormStatistic::from_values(values),
        n_blocks,
        zero_fraction: zeros as f64 / samples as f64,
        expected_zero_fraction: expected,
        zero_fraction_sigma: (expected * (1.0 - expected) / samples as f64).sqrt(),
    })
}

/// Symmetric Gaussian matrix rescaled to spectral norm 1.
pub fn random_symmetric_unit_norm(p: usize, seeds: &SeedSpec) -> Result<DenseMatrix, ConcentrationError> {
    let mut rng = seeds.stream(0);
    let mut a = DenseMatrix::zeros(p, p);
    for i in 0..p {
        for j in 0..=i {
            let v: f64 = rng.sample(StandardNormal);
            a.set(i, j, v);
            a.set(j, i, v);
        }
    }
    let norm = spectral_norm(&a)?;
    if norm > 0.0 {
        a.scale(1.0 / norm);
    }
    Ok(a)
}
