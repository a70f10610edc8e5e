use serde::{Deserialize, Serialize};

use crate::models::checked_binomial;

/// Default absolute constants for the tensor bound. They are not known; the
/// values only fix a convention for reporting.
pub const DEFAULT_TENSOR_C: f64 = 1.0;
pub const DEFAULT_TENSOR_SMALL_C: f64 = 0.5;

/// `‖A‖²·(K Σ d_k² + 2 Σ d_k)`.
pub fn bound_block(spectral_norm_a: f64, k: f64, block_sizes: &[usize]) -> f64 {
    let sum_sq: f64 = block_sizes.iter().map(|&d| (d * d) as f64).sum();
    let p: f64 = block_sizes.iter().map(|&d| d as f64).sum();
    spectral_norm_a * spectral_norm_a * (k * sum_sq + 2.0 * p)
}

/// Outcome of the tensor bound evaluator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TensorBound {
    Applicable { value: f64, ratio: f64 },
    /// `√K·d/n^{1/3}` is not below the threshold `c`.
    Inapplicable { ratio: f64 },
}

impl TensorBound {
    pub fn value(&self) -> Option<f64> {
        match self {
            TensorBound::Applicable { value, .. } => Some(*value),
            TensorBound::Inapplicable { .. } => None,
        }
    }

    pub fn ratio(&self) -> f64 {
        match self {
            TensorBound::Applicable { ratio, .. } | TensorBound::Inapplicable { ratio } => *ratio,
        }
    }
}

/// `√K·d / n^{1/3}`.
pub fn tensor_degree_ratio(k: f64, n: usize, d: usize) -> f64 {
    k.sqrt() * d as f64 / (n as f64).cbrt()
}

/// `‖A‖² p² (√K d / n^{1/3})^{3/2}` with `p = C(n, d)`, before the constant.
pub fn tensor_scale(spectral_norm_a: f64, k: f64, n: usize, d: usize) -> f64 {
    let p = checked_binomial(n, d).unwrap_or(u128::MAX) as f64;
    spectral_norm_a.powi(2) * p * p * tensor_degree_ratio(k, n, d).powf(1.5)
}

/// `C ‖A‖² p² (√K d / n^{1/3})^{3/2}` when `√K d / n^{1/3} < c`.
pub fn bound_tensor(spectral_norm_a: f64, k: f64, n: usize, d: usize, big_c: f64, small_c: f64) -> TensorBound {
    let ratio = tensor_degree_ratio(k, n, d);
    if ratio >= small_c {
        return TensorBound::Inapplicable { ratio };
    }
    TensorBound::Applicable {
        value: big_c * tensor_scale(spectral_norm_a, k, n, d),
        ratio,
    }
}

/// Exact `Var(‖x‖²/p)` for the tensor model: `Σ_{v≥1} C(d,v)C(n−d,d−v)/C(n,d)·(K^v − 1)`.
pub fn tensor_norm_variance(n: usize, d: usize, k: f64) -> f64 {
    let p = checked_binomial(n, d).unwrap_or(0) as f64;
    (1..=d)
        .map(|v| {
            let pairs = checked_binomial(d, v).unwrap_or(0) as f64 * checked_binomial(n - d, d - v).unwrap_or(0) as f64;
            pairs / p * (k.powi(v as i32) - 1.0)
        })
        .sum()
}

/// Hoeffding's lower bound `(d²/n)·Var(x₁²)` on `Var(U_p)`.
pub fn hoeffding_lower_bound(n: usize, d: usize, var_x_sq: f64) -> f64 {
    (d * d) as f64 / n as f64 * var_x_sq
}
