//! Seeded samplers for random columns: i.i.d. entries, block-independent
//! columns and vectorised symmetric random tensors.

mod laws;
mod seed;
mod tensor;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::DenseMatrix;

pub use laws::{gaussian_hermite_block, xor_triple_block, BlockKind, BlockSpec, EntryLaw};
pub use seed::SeedSpec;
pub use tensor::{checked_binomial, tensor_column, tensor_products, ColexSubsets};

/// Default bound on `p·m` for generated matrices.
pub const DEFAULT_MEMORY_CAP: u128 = 200_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid model: {0}")]
    Invalid(String),
    #[error("matrix of {entries} entries exceeds the cap of {cap}")]
    MemoryCap { entries: u128, cap: u128 },
}

/// Distribution of a single column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ColumnLaw {
    Iid { p: usize, law: EntryLaw },
    BlockIndependent { blocks: Vec<BlockSpec> },
    Tensor { n: usize, d: usize, law: EntryLaw },
}

impl ColumnLaw {
    pub fn validate(&self) -> Result<(), ModelError> {
        match self {
            ColumnLaw::Iid { p, .. } if *p == 0 => Err(ModelError::Invalid("p must be positive".into())),
            ColumnLaw::BlockIndependent { blocks } => {
                if blocks.iter().all(|b| b.repeat == 0) {
                    return Err(ModelError::Invalid("no blocks".into()));
                }
                if blocks.iter().any(|b| b.kind.size() == 0) {
                    return Err(ModelError::Invalid("zero-sized block".into()));
                }
                Ok(())
            }
            ColumnLaw::Tensor { n, d, .. } => {
                if !(1 <= *d && d <= n) {
                    return Err(ModelError::Invalid(format!("tensor needs 1 <= d <= n, got n={n}, d={d}")));
                }
                if checked_binomial(*n, *d).is_none_or(|p| p > usize::MAX as u128) {
                    return Err(ModelError::Invalid("C(n, d) overflows".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Dimension `p` of a column.
    pub fn dim(&self) -> usize {
        match self {
            ColumnLaw::Iid { p, .. } => *p,
            ColumnLaw::BlockIndependent { blocks } => blocks.iter().map(|b| b.kind.size() * b.repeat).sum(),
            ColumnLaw::Tensor { n, d, .. } => checked_binomial(*n, *d).unwrap_or(0) as usize,
        }
    }

    /// Block sizes `d_k` in column order; i.i.d. columns are blocks of size 1.
    /// Tensor columns have no block structure and return `None`.
    pub fn block_sizes(&self) -> Option<Vec<usize>> {
        match self {
            ColumnLaw::Iid { p, .. } => Some(vec![1; *p]),
            ColumnLaw::BlockIndependent { blocks } => Some(
                blocks
                    .iter()
                    .flat_map(|b| std::iter::repeat_n(b.kind.size(), b.repeat))
                    .collect(),
            ),
            ColumnLaw::Tensor { .. } => None,
        }
    }

    pub fn block_count(&self) -> Option<usize> {
        match self {
            ColumnLaw::Iid { p, .. } => Some(*p),
            ColumnLaw::BlockIndependent { blocks } => Some(blocks.iter().map(|b| b.repeat).sum()),
            ColumnLaw::Tensor { .. } => None,
        }
    }

    /// Largest fourth moment `K` of the column entries. For tensors this is
    /// the fourth moment of the underlying scalar law.
    pub fn fourth_moment(&self) -> f64 {
        match self {
            ColumnLaw::Iid { law, .. } | ColumnLaw::Tensor { law, .. } => law.fourth_moment(),
            ColumnLaw::BlockIndependent { blocks } => blocks
                .iter()
                .filter(|b| b.repeat > 0)
                .map(|b| b.kind.fourth_moment())
                .fold(0.0, f64::max),
        }
    }

    /// Common entry variance if `E xxᵀ = c·I`, otherwise `None`.
    pub fn scalar_variance(&self) -> Option<f64> {
        match self {
            ColumnLaw::Iid { .. } | ColumnLaw::Tensor { .. } => Some(1.0),
            ColumnLaw::BlockIndependent { blocks } => {
                let mut vars = blocks.iter().filter(|b| b.repeat > 0).map(|b| b.kind.variance());
                let first = vars.next()?;
                vars.all(|v| v == first).then_some(first)
            }
        }
    }

    /// Exact `E ‖x‖⁴`.
    pub fn mean_norm_fourth(&self) -> f64 {
        match self {
            ColumnLaw::Iid { p, law } => {
                let p = *p as f64;
                p * (p - 1.0) + p * law.fourth_moment()
            }
            ColumnLaw::BlockIndependent { blocks } => {
                // E‖x‖⁴ = Σ_k E‖x̄_k‖⁴ + Σ_{k≠l} E‖x̄_k‖² E‖x̄_l‖²
                let mut sum_fourth = 0.0;
                let mut sum_sq = 0.0;
                let mut sum_sq_sq = 0.0;
                for b in blocks {
                    let r = b.repeat as f64;
                    let e2 = b.kind.mean_norm_sq();
                    sum_fourth += r * b.kind.mean_norm_fourth();
                    sum_sq += r * e2;
                    sum_sq_sq += r * e2 * e2;
                }
                sum_fourth + sum_sq * sum_sq - sum_sq_sq
            }
            ColumnLaw::Tensor { n, d, law } => {
                // E x_S² x_T² = K^{|S∩T|}; count pairs by overlap v.
                let (n, d) = (*n, *d);
                let k = law.fourth_moment();
                let p = checked_binomial(n, d).unwrap_or(0) as f64;
                let per_row: f64 = (0..=d)
                    .map(|v| {
                        checked_binomial(d, v).unwrap_or(0) as f64
                            * checked_binomial(n - d, d - v).unwrap_or(0) as f64
                            * k.powi(v as i32)
                    })
                    .sum();
                p * per_row
            }
        }
    }

    /// Prepares a reusable sampler (tensor subset tables are built once).
    pub fn sampler(&self) -> Result<ColumnSampler<'_>, ModelError> {
        self.validate()?;
        let subsets = match self {
            ColumnLaw::Tensor { n, d, .. } => ColexSubsets::new(*n, *d).flatten().collect(),
            _ => Vec::new(),
        };
        Ok(ColumnSampler { law: self, subsets })
    }
}

/// Column law with any precomputed tables.
#[derive(Debug, Clone)]
pub struct ColumnSampler<'a> {
    law: &'a ColumnLaw,
    subsets: Vec<usize>,
}

impl ColumnSampler<'_> {
    pub fn dim(&self) -> usize {
        self.law.dim()
    }

    pub fn law(&self) -> &ColumnLaw {
        self.law
    }

    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        match self.law {
            ColumnLaw::Iid { law, .. } => out.iter_mut().for_each(|v| *v = law.sample(rng)),
            ColumnLaw::BlockIndependent { blocks } => {
                let mut offset = 0;
                for spec in blocks {
                    let size = spec.kind.size();
                    for _ in 0..spec.repeat {
                        spec.kind.sample_into(rng, &mut out[offset..offset + size]);
                        offset += size;
                    }
                }
            }
            ColumnLaw::Tensor { n, d, law } => {
                let x: Vec<f64> = (0..*n).map(|_| law.sample(rng)).collect();
                for (slot, subset) in out.iter_mut().zip(self.subsets.chunks_exact(*d)) {
                    *slot = subset.iter().map(|&i| x[i]).product();
                }
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.sample_into(rng, &mut out);
        out
    }
}

/// Column law together with the number of columns `m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixModel {
    pub columns: ColumnLaw,
    pub m: usize,
}

impl MatrixModel {
    pub fn new(columns: ColumnLaw, m: usize) -> Self {
        Self { columns, m }
    }

    pub fn p(&self) -> usize {
        self.columns.dim()
    }

    /// Aspect ratio `p/m`.
    pub fn aspect_ratio(&self) -> f64 {
        self.p() as f64 / self.m as f64
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        self.columns.validate()?;
        if self.m == 0 {
            return Err(ModelError::Invalid("m must be positive".into()));
        }
        Ok(())
    }
}

/// Builds the `p×m` data matrix with the default memory cap.
pub fn build_matrix(model: &MatrixModel, seeds: &SeedSpec) -> Result<DenseMatrix, ModelError> {
    build_matrix_with_cap(model, seeds, DEFAULT_MEMORY_CAP)
}

/// Column `k` is drawn from `seeds.stream(k)`, so the result does not depend
/// on the number of worker threads.
pub fn build_matrix_with_cap(model: &MatrixModel, seeds: &SeedSpec, cap: u128) -> Result<DenseMatrix, ModelError> {
    model.validate()?;
    let (p, m) = (model.p(), model.m);
    let entries = p as u128 * m as u128;
    if entries > cap {
        return Err(ModelError::MemoryCap { entries, cap });
    }
    let sampler = model.columns.sampler()?;
    let mut by_column = vec![0.0; p * m];
    by_column
        .par_chunks_mut(p)
        .enumerate()
        .for_each(|(k, col)| sampler.sample_into(&mut seeds.stream(k as u64), col));

    // Blocked transpose into row-major p×m.
    const TILE: usize = 64;
    let mut data = vec![0.0; p * m];
    for k0 in (0..m).step_by(TILE) {
        for i0 in (0..p).step_by(TILE) {
            for k in k0..(k0 + TILE).min(m) {
                for i in i0..(i0 + TILE).min(p) {
                    data[i * m + k] = by_column[k * p + i];
                }
            }
        }
    }
    Ok(DenseMatrix::from_row_major(p, m, data).expect("sampled entries are finite"))
}

/// `(1/trials) Σ x xᵀ` over independent columns.
pub fn empirical_covariance_of_column(
    columns: &ColumnLaw,
    trials: usize,
    seeds: &SeedSpec,
) -> Result<DenseMatrix, ModelError> {
    if trials == 0 {
        return Err(ModelError::Invalid("trials must be positive".into()));
    }
    let sampler = columns.sampler()?;
    let p = sampler.dim();
    let mut acc = vec![0.0; p * p];
    let mut x = vec![0.0; p];
    for t in 0..trials {
        sampler.sample_into(&mut seeds.stream(t as u64), &mut x);
        for i in 0..p {
            let xi = x[i];
            if xi == 0.0 {
                continue;
            }
            let row = &mut acc[i * p..(i + 1) * p];
            for (r, xj) in row.iter_mut().zip(&x) {
                *r += xi * xj;
            }
        }
    }
    let inv = 1.0 / trials as f64;
    acc.iter_mut().for_each(|v| *v *= inv);
    Ok(DenseMatrix::from_row_major(p, p, acc).expect("finite"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hermite(repeat: usize) -> ColumnLaw {
        ColumnLaw::BlockIndependent {
            blocks: vec![BlockSpec::new(BlockKind::GaussianHermite, repeat)],
        }
    }

    #[test]
    fn iid_rademacher_entries_are_signs() {
        let model = MatrixModel::new(ColumnLaw::Iid { p: 2, law: EntryLaw::Rademacher }, 3);
        let x = build_matrix(&model, &SeedSpec::new(1)).unwrap();
        assert_eq!((x.rows(), x.cols()), (2, 3));
        assert!(x.as_slice().iter().all(|v| v.abs() == 1.0));
    }

    #[test]
    fn preset_geometries() {
        let fig1a = MatrixModel::new(hermite(2000), 16000);
        assert_eq!(fig1a.p(), 4000);
        assert_eq!(fig1a.aspect_ratio(), 0.25);
        let fig3 = MatrixModel::new(ColumnLaw::Tensor { n: 45, d: 3, law: EntryLaw::Rademacher }, 2 * 14190);
        assert_eq!(fig3.p(), 14190);
        assert_eq!(fig3.aspect_ratio(), 0.5);
    }

    #[test]
    fn validation_errors() {
        assert!(ColumnLaw::Tensor { n: 3, d: 4, law: EntryLaw::Rademacher }.validate().is_err());
        assert!(ColumnLaw::Tensor { n: 3, d: 0, law: EntryLaw::Rademacher }.validate().is_err());
        assert!(ColumnLaw::Iid { p: 0, law: EntryLaw::Rademacher }.validate().is_err());
        assert!(MatrixModel::new(hermite(2), 0).validate().is_err());
        let big = MatrixModel::new(hermite(2000), 16000);
        assert!(matches!(
            build_matrix_with_cap(&big, &SeedSpec::new(0), 1_000_000),
            Err(ModelError::MemoryCap { .. })
        ));
    }

    #[test]
    fn deterministic_per_seed() {
        let model = MatrixModel::new(ColumnLaw::Tensor { n: 7, d: 2, law: EntryLaw::StdNormal }, 40);
        let a = build_matrix(&model, &SeedSpec::new(77)).unwrap();
        let b = build_matrix(&model, &SeedSpec::new(77)).unwrap();
        let c = build_matrix(&model, &SeedSpec::new(78)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn columns_come_from_their_own_streams() {
        let law = ColumnLaw::Iid { p: 5, law: EntryLaw::StdNormal };
        let wide = build_matrix(&MatrixModel::new(law.clone(), 10), &SeedSpec::new(3)).unwrap();
        let narrow = build_matrix(&MatrixModel::new(law, 4), &SeedSpec::new(3)).unwrap();
        for i in 0..5 {
            assert_eq!(&wide.row(i)[..4], narrow.row(i));
        }
    }

    #[test]
    fn deterministic_across_thread_pools() {
        let model = MatrixModel::new(hermite(30), 50);
        let seeds = SeedSpec::new(5);
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let multi = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = single.install(|| build_matrix(&model, &seeds)).unwrap();
        let b = multi.install(|| build_matrix(&model, &seeds)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn tensor_layout_matches_direct_products() {
        let law = ColumnLaw::Tensor { n: 6, d: 3, law: EntryLaw::UniformSqrt3 };
        let sampler = law.sampler().unwrap();
        let seeds = SeedSpec::new(12);
        let via_sampler = sampler.sample(&mut seeds.stream(0));
        let direct = tensor_column(6, 3, EntryLaw::UniformSqrt3, &mut seeds.stream(0));
        assert_eq!(via_sampler, direct);
    }

    #[test]
    fn hermite_covariance_is_identity() {
        let cov = empirical_covariance_of_column(&hermite(1), 1_000_000, &SeedSpec::new(21)).unwrap();
        assert!((cov.get(0, 0) - 1.0).abs() < 0.01, "{}", cov.get(0, 0));
        assert!((cov.get(1, 1) - 1.0).abs() < 0.01, "{}", cov.get(1, 1));
        assert!(cov.get(0, 1).abs() < 0.01, "{}", cov.get(0, 1));
    }

    #[test]
    fn xor_covariance_is_quarter_identity() {
        let law = ColumnLaw::BlockIndependent { blocks: vec![BlockSpec::new(BlockKind::XorTriple, 2)] };
        let trials = 100_000;
        let cov = empirical_covariance_of_column(&law, trials, &SeedSpec::new(8)).unwrap();
        let band = 4.0 * (law.fourth_moment() / trials as f64).sqrt();
        for i in 0..6 {
            for j in 0..6 {
                let expected = if i == j { 0.25 } else { 0.0 };
                assert!((cov.get(i, j) - expected).abs() <= band, "({i},{j}) = {}", cov.get(i, j));
            }
        }
    }

    #[test]
    fn tensor_covariance_is_identity() {
        let law = ColumnLaw::Tensor { n: 5, d: 2, law: EntryLaw::Rademacher };
        let trials = 100_000;
        let cov = empirical_covariance_of_column(&law, trials, &SeedSpec::new(9)).unwrap();
        let band = 4.0 * (1.0 / trials as f64).sqrt();
        assert_eq!(cov.rows(), 10);
        for i in 0..10 {
            assert_eq!(cov.get(i, i), 1.0);
            for j in 0..10 {
                if i != j {
                    assert!(cov.get(i, j).abs() <= band, "({i},{j}) = {}", cov.get(i, j));
                }
            }
        }
    }

    #[test]
    fn column_means_vanish() {
        let trials = 100_000;
        for law in [
            hermite(2),
            ColumnLaw::BlockIndependent { blocks: vec![BlockSpec::new(BlockKind::BasisVector { d: 4 }, 2)] },
            ColumnLaw::BlockIndependent { blocks: vec![BlockSpec::new(BlockKind::XorTriple, 1)] },
            ColumnLaw::Tensor { n: 5, d: 2, law: EntryLaw::StdNormal },
        ] {
            let sampler = law.sampler().unwrap();
            let seeds = SeedSpec::new(31);
            let p = sampler.dim();
            let mut mean = vec![0.0; p];
            for t in 0..trials {
                let x = sampler.sample(&mut seeds.stream(t));
                mean.iter_mut().zip(&x).for_each(|(m, v)| *m += v);
            }
            let band = 4.0 / (trials as f64).sqrt();
            for v in mean {
                assert!((v / trials as f64).abs() <= band, "{law:?}");
            }
        }
    }

    #[test]
    fn mean_norm_fourth_matches_simulation() {
        for law in [
            ColumnLaw::Iid { p: 6, law: EntryLaw::UniformSqrt3 },
            ColumnLaw::BlockIndependent {
                blocks: vec![
                    BlockSpec::new(BlockKind::XorTriple, 2),
                    BlockSpec::new(BlockKind::BasisVector { d: 3 }, 1),
                ],
            },
            ColumnLaw::Tensor { n: 6, d: 2, law: EntryLaw::StdNormal },
        ] {
            let sampler = law.sampler().unwrap();
            let seeds = SeedSpec::new(4);
            let trials = 200_000;
            let est: f64 = (0..trials)
                .map(|t| {
                    let x = sampler.sample(&mut seeds.stream(t));
                    let s: f64 = x.iter().map(|v| v * v).sum();
                    s * s
                })
                .sum::<f64>()
                / trials as f64;
            let exact = law.mean_norm_fourth();
            assert!((est - exact).abs() / exact < 0.03, "{law:?}: {est} vs {exact}");
        }
    }
}
