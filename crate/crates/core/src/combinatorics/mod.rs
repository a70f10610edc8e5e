//! Exact integer checks of binomial-coefficient inequalities and brute-force
//! censuses of subset tuples.

mod census;
mod lemmas;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

pub use census::{
    meta_index_census, meta_index_formula, pair_overlap_census, subset_masks, CensusCell, MetaIndexCensus,
    PairOverlapCensus, PairOverlapRow, MAX_META_TUPLES, MAX_PAIRS,
};
pub use lemmas::{
    check_decay, check_diag_sum, check_lemma_bounds, check_log_concavity, check_stability, decay_grid,
    diag_sum_grid, lemma_bounds_grid, log_concavity_grid, stability_grid, vandermonde_holds, GridReport, E_LOWER,
};

pub type BigCount = BigUint;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CombinatoricsError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("enumeration budget exceeded: {needed} > {budget}")]
    Budget { needed: u128, budget: u128 },
}

/// Exact `C(n, k)`; zero when `k < 0`, `k > n` or `n < 0`.
pub fn binom(n: i64, k: i64) -> BigCount {
    if n < 0 || k < 0 || k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= BigUint::from((n - i) as u64);
        acc /= BigUint::from((i + 1) as u64);
    }
    acc
}

/// Exact values on both sides of a violated inequality.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub relation: String,
    #[serde(serialize_with = "decimal")]
    pub lhs: BigCount,
    #[serde(serialize_with = "decimal")]
    pub rhs: BigCount,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum CheckOutcome {
    Pass,
    Fail(Witness),
    NotApplicable { reason: String },
}

impl CheckOutcome {
    pub fn is_pass(&self) -> bool {
        matches!(self, CheckOutcome::Pass)
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, CheckOutcome::Fail(_))
    }
}

/// `Pass` when `lhs ≤ rhs`, else a witness.
fn le(relation: impl Into<String>, lhs: BigCount, rhs: BigCount) -> CheckOutcome {
    if lhs <= rhs {
        CheckOutcome::Pass
    } else {
        CheckOutcome::Fail(Witness { relation: relation.into(), lhs, rhs })
    }
}

pub(crate) fn decimal<S: Serializer>(value: &BigCount, serializer: S) -> Result<S::Ok, S::Error> {
    serializer.collect_str(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binom_examples() {
        assert_eq!(binom(5, 2), BigUint::from(10u32));
        assert_eq!(binom(17, 0), BigUint::one());
        assert_eq!(binom(10, 11), BigUint::zero());
        assert_eq!(binom(4, -1), BigUint::zero());
        assert_eq!(binom(-3, 1), BigUint::zero());
        assert_eq!(binom(100, 50).to_string(), "100891344545564193334812497256");
    }

    #[test]
    fn binom_matches_pascal() {
        for n in 1..60i64 {
            for k in 0..=n {
                assert_eq!(binom(n, k), binom(n - 1, k - 1) + binom(n - 1, k));
            }
        }
    }
}
