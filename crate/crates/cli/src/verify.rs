//! Verification suites with machine-readable reports.

use mpverify::combinatorics::{
    decay_grid, diag_sum_grid, lemma_bounds_grid, log_concavity_grid, meta_index_census, pair_overlap_census,
    stability_grid, GridReport,
};
use mpverify::concentration::{
    random_symmetric_unit_norm, var_quadform_mc, yaskov_counterexample, QuadFormReport,
};
use mpverify::linalg::DenseMatrix;
use mpverify::models::{empirical_covariance_of_column, BlockKind, BlockSpec, ColumnLaw, EntryLaw, SeedSpec};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub passed: bool,
    pub details: Value,
}

/// Exhaustive grids: Lemma bounds for `n ≤ 60`, log-concavity, decay and
/// stability up to 40, and the diagonal-sum chain for `n ≤ 40`, `d ≤ n/4`,
/// `K ≤ 4`.
pub fn lemma_grids() -> Vec<GridReport> {
    vec![
        lemma_bounds_grid(60),
        log_concavity_grid(40),
        decay_grid(40),
        stability_grid(40, 5),
        diag_sum_grid(40, 4),
    ]
}

pub fn verify_lemmas() -> Result<VerifyReport, CliError> {
    let grids = lemma_grids();
    Ok(VerifyReport {
        suite: "lemmas".into(),
        passed: grids.iter().all(GridReport::all_passed),
        details: serde_json::to_value(&grids)?,
    })
}

pub fn verify_census(n: usize, d: usize) -> Result<VerifyReport, CliError> {
    let census = meta_index_census(n, d)?;
    let pairs = pair_overlap_census(n, d)?;
    Ok(VerifyReport {
        suite: "census".into(),
        passed: census.all_match() && census.constraints_hold() && pairs.all_match(),
        details: json!({ "meta_index": census, "pair_overlap": pairs }),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct VarBoundCase {
    pub matrix: String,
    pub report: QuadFormReport,
    /// `mc_variance − 4·stderr ≤ theoretical_bound`.
    pub within_bound: bool,
}

/// `xᵀAx` variance for `A = I` followed by `matrices − 1` random symmetric
/// matrices of unit spectral norm.
pub fn varcheck(columns: &ColumnLaw, samples: usize, matrices: usize, seed: u64) -> Result<Vec<VarBoundCase>, CliError> {
    let seeds = SeedSpec::new(seed);
    let p = columns.dim();
    (0..matrices)
        .map(|t| {
            let (matrix, a) = if t == 0 {
                ("identity".to_string(), DenseMatrix::identity(p))
            } else {
                (format!("random-{t}"), random_symmetric_unit_norm(p, &seeds.derive(t as u64))?)
            };
            let report = var_quadform_mc(columns, &a, samples, &seeds.derive(1000 + t as u64))?;
            let within_bound = report.mc_variance - 4.0 * report.mc_stderr <= report.theoretical_bound;
            Ok(VarBoundCase { matrix, report, within_bound })
        })
        .collect()
}

pub fn verify_varbounds(columns: &ColumnLaw, samples: usize, matrices: usize, seed: u64) -> Result<VerifyReport, CliError> {
    let cases = varcheck(columns, samples, matrices, seed)?;
    Ok(VerifyReport {
        suite: "varbounds".into(),
        passed: cases.iter().all(|c| c.within_bound),
        details: json!({ "columns": columns, "cases": cases }),
    })
}

pub fn verify_yaskov(n_blocks: usize, samples: usize, seed: u64) -> Result<VerifyReport, CliError> {
    if n_blocks == 0 {
        return Err(CliError::Config("n_blocks must be positive".into()));
    }
    let base = [BlockSpec::new(BlockKind::GaussianHermite, n_blocks)];
    let report = yaskov_counterexample(&base, samples, &SeedSpec::new(seed))?;
    Ok(VerifyReport {
        suite: "yaskov".into(),
        passed: report.within_band(3.0),
        details: serde_json::to_value(&report)?,
    })
}

/// Small models covering every sampler.
pub fn isotropy_models() -> Vec<(String, ColumnLaw)> {
    let blocks = |kind, repeat| ColumnLaw::BlockIndependent { blocks: vec![BlockSpec::new(kind, repeat)] };
    vec![
        ("gaussian_hermite".into(), blocks(BlockKind::GaussianHermite, 6)),
        ("xor_triple".into(), blocks(BlockKind::XorTriple, 4)),
        ("basis_vector".into(), blocks(BlockKind::BasisVector { d: 5 }, 3)),
        ("iid_block".into(), blocks(BlockKind::IidBlock { d: 3, law: EntryLaw::UniformSqrt3 }, 3)),
        ("tensor_rademacher".into(), ColumnLaw::Tensor { n: 6, d: 2, law: EntryLaw::Rademacher }),
        ("tensor_uniform".into(), ColumnLaw::Tensor { n: 5, d: 2, law: EntryLaw::UniformSqrt3 }),
        ("iid_normal".into(), ColumnLaw::Iid { p: 10, law: EntryLaw::StdNormal }),
    ]
}

/// Per-entry variances of the column.
fn expected_diagonal(columns: &ColumnLaw) -> Vec<f64> {
    match columns {
        ColumnLaw::BlockIndependent { blocks } => blocks
            .iter()
            .flat_map(|b| std::iter::repeat_n(b.kind.variance(), b.kind.size() * b.repeat))
            .collect(),
        _ => vec![1.0; columns.dim()],
    }
}

/// `(1/T) Σ xxᵀ` against its expectation, entrywise within `4·√(K/T)`.
pub fn verify_isotropy(models: &[(String, ColumnLaw)], trials: usize, seed: u64) -> Result<VerifyReport, CliError> {
    let mut passed = true;
    let mut rows = Vec::new();
    for (i, (name, columns)) in models.iter().enumerate() {
        let cov = empirical_covariance_of_column(columns, trials, &SeedSpec::new(seed).derive(i as u64))?;
        let diag = expected_diagonal(columns);
        let tolerance = 4.0 * (columns.fourth_moment() / trials as f64).sqrt();
        let mut worst = 0.0f64;
        for (r, &dr) in diag.iter().enumerate() {
            for c in 0..cov.cols() {
                let expected = if r == c { dr } else { 0.0 };
                worst = worst.max((cov.get(r, c) - expected).abs());
            }
        }
        let ok = worst <= tolerance;
        passed &= ok;
        rows.push(json!({ "model": name, "p": columns.dim(), "max_deviation": worst, "tolerance": tolerance, "passed": ok }));
    }
    Ok(VerifyReport { suite: "isotropy".into(), passed, details: json!({ "trials": trials, "models": rows }) })
}
