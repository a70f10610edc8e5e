use num_bigint::BigUint;
use num_traits::Pow;
use serde::Serialize;

use super::{binom, le, BigCount, CheckOutcome, CombinatoricsError, Witness};

/// `e > 27182818284 / 10¹⁰`. Proving `S ≤ (e_lo·n/d)^d` implies the bound
/// with `e` itself.
pub const E_LOWER: (u64, u64) = (27_182_818_284, 10_000_000_000);

fn big(v: i64) -> BigCount {
    BigUint::from(v as u64)
}

/// `(n/d)^d ≤ C(n,d) ≤ Σ_{k≤d} C(n,k) ≤ (e·n/d)^d`, all cleared of
/// denominators.
pub fn check_lemma_bounds(n: i64, d: i64) -> Result<CheckOutcome, CombinatoricsError> {
    if !(1 <= d && d <= n) {
        return Err(CombinatoricsError::Precondition(format!("need 1 <= d <= n, got n={n}, d={d}")));
    }
    let e = d as u32;
    let c = binom(n, d);
    let dd = big(d).pow(e);
    let left = le("(n/d)^d <= C(n,d)", big(n).pow(e), &dd * &c);
    if !left.is_pass() {
        return Ok(left);
    }
    let sum: BigCount = (0..=d).map(|k| binom(n, k)).sum();
    let middle = le("C(n,d) <= sum_k C(n,k)", c, sum.clone());
    if !middle.is_pass() {
        return Ok(middle);
    }
    let (num, den) = E_LOWER;
    let lhs = sum * dd * BigUint::from(den).pow(e);
    let rhs = (BigUint::from(num) * big(n)).pow(e);
    Ok(le("sum_k C(n,k) <= (e n/d)^d", lhs, rhs))
}

/// `C(a, b−c)·C(a, b+c) ≤ C(a, b)²`.
pub fn check_log_concavity(a: i64, b: i64, c: i64) -> CheckOutcome {
    let b2 = binom(a, b);
    le("C(a,b-c) C(a,b+c) <= C(a,b)^2", binom(a, b - c) * binom(a, b + c), &b2 * &b2)
}

/// `C(m, t−s)·(m−t+1)^s ≤ t^s·C(m, t)`.
pub fn check_decay(m: i64, t: i64, s: i64) -> Result<CheckOutcome, CombinatoricsError> {
    if !(1 <= s && s <= t && t <= m) {
        return Err(CombinatoricsError::Precondition(format!("need 1 <= s <= t <= m, got m={m}, t={t}, s={s}")));
    }
    let e = s as u32;
    Ok(le(
        "C(m,t-s) <= (t/(m-t+1))^s C(m,t)",
        binom(m, t - s) * big(m - t + 1).pow(e),
        big(t).pow(e) * binom(m, t),
    ))
}

/// `C(m+p, t) ≤ (1+δ)·C(m, t)` with `δ = 2tp/(m+1−t)`, only when `δ ≤ ½`.
pub fn check_stability(m: i64, p: i64, t: i64) -> Result<CheckOutcome, CombinatoricsError> {
    if m < 1 || p < 1 || t < 1 || t > m {
        return Err(CombinatoricsError::Precondition(format!(
            "need positive m, p, t with t <= m, got m={m}, p={p}, t={t}"
        )));
    }
    let den = m + 1 - t;
    if 4 * t * p > den {
        return Ok(CheckOutcome::NotApplicable { reason: format!("delta = {}/{} > 1/2", 2 * t * p, den) });
    }
    Ok(le(
        "C(m+p,t) <= (1+delta) C(m,t)",
        binom(m + p, t) * big(den),
        big(den + 2 * t * p) * binom(m, t),
    ))
}

/// `Σ_v C(Kd, v)·C(n−d, d−v) = C(n−d+Kd, d)`.
pub fn vandermonde_holds(n: i64, d: i64, k: i64) -> bool {
    let lhs: BigCount = (0..=d).map(|v| binom(k * d, v) * binom(n - d, d - v)).sum();
    lhs == binom(n - d + k * d, d)
}

/// The diagonal-sum chain: `C(d,v)K^v ≤ C(Kd,v)` for every `v ≤ d`,
/// Vandermonde's identity, and
/// `Σ_{v≥1} C(d,v)C(n−d,d−v)K^v ≤ C(n−d+Kd,d) − C(n−d,d)`.
pub fn check_diag_sum(n: i64, d: i64, k: i64) -> Result<CheckOutcome, CombinatoricsError> {
    if !(1 <= d && d <= n) || k < 1 {
        return Err(CombinatoricsError::Precondition(format!("need 1 <= d <= n and K >= 1, got n={n}, d={d}, K={k}")));
    }
    for v in 0..=d {
        let out = le(format!("C(d,v) K^v <= C(Kd,v) at v={v}"), binom(d, v) * big(k).pow(v as u32), binom(k * d, v));
        if !out.is_pass() {
            return Ok(out);
        }
    }
    let lhs: BigCount = (0..=d).map(|v| binom(k * d, v) * binom(n - d, d - v)).sum();
    let rhs = binom(n - d + k * d, d);
    if lhs != rhs {
        return Ok(CheckOutcome::Fail(Witness { relation: "Vandermonde identity".into(), lhs, rhs }));
    }
    let weighted: BigCount = (1..=d).map(|v| binom(d, v) * binom(n - d, d - v) * big(k).pow(v as u32)).sum();
    Ok(le("diagonal sum <= C(n-d+Kd,d) - C(n-d,d)", weighted, rhs - binom(n - d, d)))
}

/// Tally of a grid run; failures carry their parameters.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct GridReport {
    pub name: String,
    pub checked: usize,
    pub passed: usize,
    pub not_applicable: usize,
    pub failures: Vec<(Vec<i64>, Witness)>,
}

impl GridReport {
    fn new(name: &str) -> Self {
        Self { name: name.into(), ..Self::default() }
    }

    fn record(&mut self, params: Vec<i64>, outcome: CheckOutcome) {
        self.checked += 1;
        match outcome {
            CheckOutcome::Pass => self.passed += 1,
            CheckOutcome::NotApplicable { .. } => self.not_applicable += 1,
            CheckOutcome::Fail(w) => self.failures.push((params, w)),
        }
    }

    pub fn all_passed(&self) -> bool {
        self.failures.is_empty() && self.passed > 0
    }
}

pub fn lemma_bounds_grid(max_n: i64) -> GridReport {
    let mut report = GridReport::new("lemma_bounds");
    for n in 1..=max_n {
        for d in 1..=n {
            report.record(vec![n, d], check_lemma_bounds(n, d).expect("grid respects preconditions"));
        }
    }
    report
}

pub fn log_concavity_grid(max_a: i64) -> GridReport {
    let mut report = GridReport::new("log_concavity");
    for a in 1..=max_a {
        for b in 1..=a {
            for c in 1..=a {
                report.record(vec![a, b, c], check_log_concavity(a, b, c));
            }
        }
    }
    report
}

pub fn decay_grid(max_m: i64) -> GridReport {
    let mut report = GridReport::new("decay");
    for m in 1..=max_m {
        for t in 1..=m {
            for s in 1..=t {
                report.record(vec![m, t, s], check_decay(m, t, s).expect("grid respects preconditions"));
            }
        }
    }
    report
}

pub fn stability_grid(max_m: i64, max_p: i64) -> GridReport {
    let mut report = GridReport::new("stability");
    for m in 1..=max_m {
        for p in 1..=max_p {
            for t in 1..=m {
                report.record(vec![m, p, t], check_stability(m, p, t).expect("grid respects preconditions"));
            }
        }
    }
    report
}

/// `n ≤ max_n`, `1 ≤ d ≤ n/4`, `1 ≤ K ≤ max_k`.
pub fn diag_sum_grid(max_n: i64, max_k: i64) -> GridReport {
    let mut report = GridReport::new("diag_sum");
    for n in 4..=max_n {
        for d in 1..=n / 4 {
            for k in 1..=max_k {
                report.record(vec![n, d, k], check_diag_sum(n, d, k).expect("grid respects preconditions"));
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn lemma_bounds_examples() {
        assert_eq!(check_lemma_bounds(4, 2), Ok(CheckOutcome::Pass));
        for d in 1..=30 {
            assert_eq!(check_lemma_bounds(d, d), Ok(CheckOutcome::Pass));
        }
        assert!(check_lemma_bounds(3, 0).is_err());
        assert!(check_lemma_bounds(3, 4).is_err());
        let grid = lemma_bounds_grid(60);
        assert!(grid.all_passed(), "{:?}", grid.failures);
        assert_eq!(grid.checked, 60 * 61 / 2);
    }

    #[test]
    fn e_lower_bound_is_below_e() {
        let (num, den) = E_LOWER;
        assert!((num as f64 / den as f64) < std::f64::consts::E);
        assert!(std::f64::consts::E - (num as f64 / den as f64) < 1e-9);
    }

    #[test]
    fn log_concavity_examples() {
        assert_eq!(check_log_concavity(4, 2, 1), CheckOutcome::Pass);
        // c = 0 is equality.
        for a in 0..20 {
            for b in 0..=a {
                assert!(check_log_concavity(a, b, 0).is_pass());
            }
        }
        let grid = log_concavity_grid(40);
        assert!(grid.all_passed(), "{:?}", grid.failures);
    }

    #[test]
    fn decay_examples() {
        assert_eq!(check_decay(5, 3, 1), Ok(CheckOutcome::Pass));
        // Equality case: C(5,2)·3 = 30 = 3·C(5,3).
        assert_eq!(binom(5, 2) * BigUint::from(3u32), BigUint::from(3u32) * binom(5, 3));
        for m in 1..=40 {
            for t in 1..=m {
                assert!(check_decay(m, t, t).unwrap().is_pass());
            }
        }
        assert!(check_decay(4, 5, 1).is_err());
        assert!(decay_grid(40).all_passed());
    }

    #[test]
    fn stability_examples() {
        assert_eq!(check_stability(10, 1, 2), Ok(CheckOutcome::Pass));
        // δ = 2·3·1/(5+1−3) = 2 > ½.
        assert!(matches!(check_stability(5, 1, 3), Ok(CheckOutcome::NotApplicable { .. })));
        let grid = stability_grid(40, 5);
        assert!(grid.all_passed(), "{:?}", grid.failures);
        assert!(grid.not_applicable > 0);
    }

    #[test]
    fn diag_sum_examples() {
        let lhs: BigCount = (0..=3).map(|v| binom(6, v) * binom(7, 3 - v)).sum();
        assert_eq!(lhs, BigUint::from(286u32));
        assert_eq!(binom(13, 3), BigUint::from(286u32));
        assert!(vandermonde_holds(10, 3, 2));
        assert_eq!(check_diag_sum(10, 3, 2), Ok(CheckOutcome::Pass));
        // K = 1: the first inequality is an equality.
        for d in 1..10 {
            for v in 0..=d {
                assert_eq!(binom(d, v) * big(1).pow(v as u32), binom(d, v));
            }
            assert!(check_diag_sum(4 * d, d, 1).unwrap().is_pass());
        }
        assert!(check_diag_sum(3, 0, 1).is_err());
        assert!(check_diag_sum(3, 1, 0).is_err());
        let grid = diag_sum_grid(40, 4);
        assert!(grid.all_passed(), "{:?}", grid.failures);
    }

    proptest! {
        #[test]
        fn vandermonde_general(n in 1i64..50, d in 1i64..12, k in 1i64..6) {
            prop_assume!(d <= n);
            prop_assert!(vandermonde_holds(n, d, k));
        }

        #[test]
        fn log_concavity_random(a in 1i64..120, b in 0i64..120, c in 0i64..120) {
            prop_assert!(check_log_concavity(a, b, c).is_pass());
        }
    }
}
