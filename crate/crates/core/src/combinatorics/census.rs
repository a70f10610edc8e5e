use std::collections::BTreeMap;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use super::{binom, decimal, BigCount, CombinatoricsError};

pub const MAX_PAIRS: u128 = 10_000_000;
pub const MAX_META_TUPLES: u128 = 100_000_000;

/// All `d`-subsets of `{0, …, n−1}` as bit masks, in colex order (Gosper's hack).
pub fn subset_masks(n: u32, d: u32) -> Vec<u32> {
    assert!(n <= 31, "subset masks support n <= 31");
    if d > n {
        return Vec::new();
    }
    if d == 0 {
        return vec![0];
    }
    let limit = 1u32 << n;
    let mut out = Vec::new();
    let mut x = (1u32 << d) - 1;
    while x < limit {
        out.push(x);
        let c = x & x.wrapping_neg();
        let r = x + c;
        x = (((r ^ x) >> 2) / c) | r;
    }
    out
}

fn check_size(n: usize, d: usize, power: u32, budget: u128) -> Result<Vec<u32>, CombinatoricsError> {
    if !(1 <= d && d <= n && n <= 31) {
        return Err(CombinatoricsError::Precondition(format!("need 1 <= d <= n <= 31, got n={n}, d={d}")));
    }
    let count = binom(n as i64, d as i64);
    let needed = count.pow(power);
    if needed > BigUint::from(budget) {
        let needed = u128::try_from(&needed).unwrap_or(u128::MAX);
        return Err(CombinatoricsError::Budget { needed, budget });
    }
    Ok(subset_masks(n as u32, d as u32))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairOverlapRow {
    pub v: usize,
    #[serde(serialize_with = "decimal")]
    pub enumerated: BigCount,
    #[serde(serialize_with = "decimal")]
    pub formula: BigCount,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairOverlapCensus {
    pub n: usize,
    pub d: usize,
    pub rows: Vec<PairOverlapRow>,
}

impl PairOverlapCensus {
    pub fn all_match(&self) -> bool {
        self.rows.iter().all(|r| r.enumerated == r.formula)
    }

    pub fn total(&self) -> BigCount {
        self.rows.iter().map(|r| &r.enumerated).sum()
    }
}

/// Ordered pairs `(i, k)` of `d`-subsets grouped by `|i ∩ k|`, against
/// `C(n,d)·C(d,v)·C(n−d,d−v)`.
pub fn pair_overlap_census(n: usize, d: usize) -> Result<PairOverlapCensus, CombinatoricsError> {
    let masks = check_size(n, d, 2, MAX_PAIRS)?;
    let mut counts = vec![0u64; d + 1];
    for &i in &masks {
        for &k in &masks {
            counts[(i & k).count_ones() as usize] += 1;
        }
    }
    let (ni, di) = (n as i64, d as i64);
    let rows = counts
        .into_iter()
        .enumerate()
        .map(|(v, c)| {
            let vi = v as i64;
            PairOverlapRow {
                v,
                enumerated: BigUint::from(c),
                formula: binom(ni, di) * binom(di, vi) * binom(ni - di, di - vi),
            }
        })
        .collect();
    Ok(PairOverlapCensus { n, d, rows })
}

/// Product of the counts of choices for `i`, `j`, `k` and `l` in a `(w, v, r)` cell.
pub fn meta_index_formula(n: usize, d: usize, w: usize, v: usize, r: usize) -> BigCount {
    let (n, d, w, v, r) = (n as i64, d as i64, w as i64, v as i64, r as i64);
    let choices_i = binom(n, d);
    let choices_j = binom(d, v) * binom(n - d, d - v);
    let choices_k = binom(v, r) * binom(n - (2 * d - v), v - w) * binom(2 * (d - v), d - r - (v - w));
    let choices_l = binom(d + w - r, 2 * w - r);
    choices_i * choices_j * choices_k * choices_l
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusCell {
    pub w: usize,
    pub v: usize,
    pub r: usize,
    /// Tuples with `i ≠ j`, any `k` and `l`.
    #[serde(serialize_with = "decimal")]
    pub enumerated: BigCount,
    /// Of those, tuples with `k = l`.
    #[serde(serialize_with = "decimal")]
    pub coincident: BigCount,
    /// Tuples with `i ≠ j` and `k ≠ l`.
    #[serde(serialize_with = "decimal")]
    pub distinct: BigCount,
    #[serde(serialize_with = "decimal")]
    pub formula: BigCount,
}

impl CensusCell {
    pub fn matches(&self) -> bool {
        self.enumerated == self.formula
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MetaIndexCensus {
    pub n: usize,
    pub d: usize,
    /// Every `(w, v, r)` with `w, r ≤ d`, `v ≤ d − 1`, in lexicographic order.
    pub cells: Vec<CensusCell>,
    pub tuples: u64,
    /// Per-tuple constraint violations (first few, as text) and their total.
    pub violations: Vec<String>,
    pub violation_count: u64,
}

impl MetaIndexCensus {
    pub fn all_match(&self) -> bool {
        self.cells.iter().all(CensusCell::matches)
    }

    pub fn constraints_hold(&self) -> bool {
        self.violation_count == 0
    }
}

#[derive(Default)]
struct Tally {
    cells: BTreeMap<(usize, usize, usize), (u64, u64)>,
    tuples: u64,
    violations: Vec<String>,
    violation_count: u64,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        for (key, (a, b)) in other.cells {
            let slot = self.cells.entry(key).or_default();
            slot.0 += a;
            slot.1 += b;
        }
        self.tuples += other.tuples;
        self.violation_count += other.violation_count;
        self.violations.extend(other.violations);
        self
    }
}

const MAX_REPORTED_VIOLATIONS: usize = 16;

fn ones(mask: u32) -> i64 {
    mask.count_ones() as i64
}

/// Checks one admissible tuple and files it under its `(w, v, r)` cell.
fn tally_tuple(tally: &mut Tally, d: i64, [i, j, k, l]: [u32; 4]) {
    let ijk = i | j | k;
    let union = ijk | l;
    let w = 2 * d - ones(ijk);
    let v = ones(i & j);
    let r = ones(i & j & k);
    let single = ijk & !((i & j) | (i & k) | (j & k));
    let at_least_three = (i & j & k) | (i & j & l) | (i & k & l) | (j & k & l);
    let all_four = i & j & k & l;
    let exactly_three = at_least_three & !all_four;

    let checks = [
        (ones(union) == 2 * d - w, "|i∪j∪k∪l| = 2d−w"),
        (0 <= w && w <= v, "w ≤ v"),
        (v < d, "v ≤ d−1"),
        (r <= v, "r ≤ v"),
        (r <= 2 * w, "r ≤ 2w"),
        (r <= d - v + w, "r ≤ d−v+w"),
        (ones(single) == d - 2 * w + r, "|s| = d−2w+r"),
        (2 * w == ones(exactly_three) + 2 * ones(all_four), "2w = |Λ3|+2|Λ4|"),
    ];
    for (ok, what) in checks {
        if !ok {
            tally.violation_count += 1;
            if tally.violations.len() < MAX_REPORTED_VIOLATIONS {
                tally.violations.push(format!("{what} fails for i={i:#b} j={j:#b} k={k:#b} l={l:#b}"));
            }
        }
    }
    tally.tuples += 1;
    if w >= 0 {
        let slot = tally.cells.entry((w as usize, v as usize, r as usize)).or_default();
        slot.0 += 1;
        if k == l {
            slot.1 += 1;
        }
    }
}

/// Brute-force census of ordered tuples `(i, j, k, l)` of `d`-subsets with
/// `i ≠ j` that doubly cover their union, with `l ⊆ i∪j∪k` containing every
/// index of `i∪j∪k` that lies in only one of `i, j, k`.
pub fn meta_index_census(n: usize, d: usize) -> Result<MetaIndexCensus, CombinatoricsError> {
    let masks = check_size(n, d, 4, MAX_META_TUPLES)?;
    let di = d as i64;
    let tally = masks
        .par_iter()
        .map(|&i| {
            let mut tally = Tally::default();
            for &j in masks.iter().filter(|&&j| j != i) {
                for &k in &masks {
                    let ijk = i | j | k;
                    let single = ijk & !((i & j) | (i & k) | (j & k));
                    if ones(single) > di {
                        continue;
                    }
                    for &l in &masks {
                        let union = ijk | l;
                        let twice = (i & j) | (i & k) | (i & l) | (j & k) | (j & l) | (k & l);
                        let double_cover = twice == union;
                        if double_cover && l & !ijk == 0 && single & !l == 0 {
                            tally_tuple(&mut tally, di, [i, j, k, l]);
                        }
                    }
                }
            }
            tally
        })
        .reduce(Tally::default, Tally::merge);

    let mut cells = Vec::new();
    for w in 0..=d {
        for v in 0..d {
            for r in 0..=d {
                let (hits, same) = tally.cells.get(&(w, v, r)).copied().unwrap_or((0, 0));
                cells.push(CensusCell {
                    w,
                    v,
                    r,
                    enumerated: BigUint::from(hits),
                    coincident: BigUint::from(same),
                    distinct: BigUint::from(hits - same),
                    formula: meta_index_formula(n, d, w, v, r),
                });
            }
        }
    }
    // Tuples outside the listed range would be constraint violations already.
    let mut violations = tally.violations;
    violations.truncate(MAX_REPORTED_VIOLATIONS);
    Ok(MetaIndexCensus { n, d, cells, tuples: tally.tuples, violations, violation_count: tally.violation_count })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mask(set: &[u32]) -> u32 {
        set.iter().map(|&e| 1u32 << e).sum()
    }

    #[test]
    fn gosper_is_colex() {
        assert_eq!(subset_masks(4, 2), vec![0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100]);
        assert_eq!(subset_masks(5, 0), vec![0]);
        assert_eq!(subset_masks(5, 5), vec![0b11111]);
        assert!(subset_masks(3, 4).is_empty());
        for n in 1..12 {
            for d in 0..=n {
                let m = subset_masks(n, d);
                assert_eq!(BigUint::from(m.len()), binom(n as i64, d as i64));
                assert!(m.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn pair_overlap_examples() {
        let c = pair_overlap_census(4, 2).unwrap();
        assert!(c.all_match());
        assert_eq!(c.rows[1].enumerated, BigUint::from(24u32));
        assert_eq!(c.rows[0].enumerated, BigUint::from(6u32));
        assert_eq!(c.rows[2].enumerated, BigUint::from(6u32));
        for (n, d) in [(6, 3), (9, 4), (12, 2), (10, 5)] {
            let c = pair_overlap_census(n, d).unwrap();
            assert!(c.all_match(), "n={n} d={d}");
            let p = binom(n as i64, d as i64);
            assert_eq!(c.total(), &p * &p);
            assert_eq!(c.rows[d].enumerated, p);
        }
        assert!(matches!(pair_overlap_census(30, 10), Err(CombinatoricsError::Budget { .. })));
    }

    #[test]
    fn hand_verified_tuple_is_counted_in_cell_zero() {
        // i={1,2}, j={3,4}, k={1,3}, l={2,4}, shifted to 0-based.
        let (i, j, k, l) = (mask(&[0, 1]), mask(&[2, 3]), mask(&[0, 2]), mask(&[1, 3]));
        let mut tally = Tally::default();
        tally_tuple(&mut tally, 2, [i, j, k, l]);
        assert_eq!(tally.violation_count, 0);
        assert_eq!(tally.cells.get(&(0, 0, 0)), Some(&(1, 0)));
    }

    #[test]
    fn small_census_cell_zero() {
        let c = meta_index_census(4, 2).unwrap();
        let cell = c.cells.iter().find(|c| (c.w, c.v, c.r) == (0, 0, 0)).unwrap();
        // 6 choices of i, 1 of j (the complement), 6 of k (any pair), then l
        // is forced to be the complement of k.
        assert_eq!(cell.enumerated, BigUint::from(36u32));
        assert_eq!(cell.formula, BigUint::from(36u32));
        assert_eq!(cell.coincident, BigUint::from(0u32));
        assert!(c.constraints_hold(), "{:?}", c.violations);
        assert!(c.all_match());
    }

    #[test]
    fn coincident_tuples_only_where_l_may_equal_k() {
        // k = l is admissible exactly when the single indices fill k's
        // complement in l, i.e. when d − w − v + r = 0.
        let c = meta_index_census(6, 2).unwrap();
        for cell in &c.cells {
            let free = cell.d_minus(2);
            if cell.coincident > BigUint::from(0u32) {
                assert_eq!(free, 0, "{cell:?}");
            }
        }
        let example = c.cells.iter().find(|c| (c.w, c.v, c.r) == (1, 1, 0)).unwrap();
        assert!(example.coincident > BigUint::from(0u32));
    }

    impl CensusCell {
        fn d_minus(&self, d: usize) -> i64 {
            d as i64 - self.w as i64 - self.v as i64 + self.r as i64
        }
    }

    #[test]
    fn census_budget_guard() {
        assert!(matches!(meta_index_census(12, 4), Err(CombinatoricsError::Budget { .. })));
        assert!(meta_index_census(3, 0).is_err());
    }
}
