use serde::{Deserialize, Serialize};

/// Pairwise (cascade) summation; the result depends only on the order of
/// `values`, not on how they were produced.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 64;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Mean, unbiased variance and the standard error of that variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleMoments {
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    pub variance_stderr: f64,
}

impl SampleMoments {
    /// `Var(s²) ≈ (μ₄ − (N−3)/(N−1)·σ⁴)/N` with sample central moments
    /// plugged in.
    pub fn from_values(values: &[f64]) -> Self {
        let n = values.len();
        assert!(n >= 2, "need at least two samples");
        let nf = n as f64;
        let mean = pairwise_sum(values) / nf;
        let dev2: Vec<f64> = values.iter().map(|v| (v - mean).powi(2)).collect();
        let dev4: Vec<f64> = dev2.iter().map(|v| v * v).collect();
        let sum2 = pairwise_sum(&dev2);
        let variance = sum2 / (nf - 1.0);
        let mu4 = pairwise_sum(&dev4) / nf;
        let var_of_var = (mu4 - (nf - 3.0) / (nf - 1.0) * variance * variance) / nf;
        Self {
            count: n,
            mean,
            variance,
            variance_stderr: var_of_var.max(0.0).sqrt(),
        }
    }
}
