use rand::Rng;

use super::laws::EntryLaw;

/// Iterates `d`-subsets of `{0, …, n−1}` as sorted index arrays in
/// colexicographic order: `{0,1}, {0,2}, {1,2}, {0,3}, …`.
#[derive(Debug, Clone)]
pub struct ColexSubsets {
    n: usize,
    current: Option<Vec<usize>>,
}

impl ColexSubsets {
    pub fn new(n: usize, d: usize) -> Self {
        let current = (d <= n).then(|| (0..d).collect());
        Self { n, current }
    }
}

impl Iterator for ColexSubsets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let c = self.current.as_mut().unwrap();
        let d = c.len();
        // Smallest position that can be bumped without colliding with its successor.
        let mut j = 0;
        while j < d {
            let limit = if j + 1 < d { c[j + 1] } else { self.n };
            if c[j] + 1 < limit {
                break;
            }
            j += 1;
        }
        if j == d {
            self.current = None;
        } else {
            c[j] += 1;
            for (k, slot) in c.iter_mut().enumerate().take(j) {
                *slot = k;
            }
        }
        Some(out)
    }
}

/// Exact `C(n, d)` as `u128`, or `None` on overflow.
pub fn checked_binomial(n: usize, d: usize) -> Option<u128> {
    if d > n {
        return Some(0);
    }
    let d = d.min(n - d);
    let mut acc: u128 = 1;
    for i in 0..d {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// Products `∏_{i∈S} x_i` over all `d`-subsets `S` in colex order.
pub fn tensor_products(x: &[f64], d: usize, out: &mut [f64]) {
    for (slot, subset) in out.iter_mut().zip(ColexSubsets::new(x.len(), d)) {
        *slot = subset.iter().map(|&i| x[i]).product();
    }
}

/// One column of the random tensor model: draws `x ∈ ℝⁿ` i.i.d. from `law`
/// and returns the `C(n, d)` subset products.
pub fn tensor_column<R: Rng + ?Sized>(n: usize, d: usize, law: EntryLaw, rng: &mut R) -> Vec<f64> {
    assert!(1 <= d && d <= n, "tensor degree must satisfy 1 <= d <= n");
    let x: Vec<f64> = (0..n).map(|_| law.sample(rng)).collect();
    let p = checked_binomial(n, d).expect("C(n, d) overflow") as usize;
    let mut out = vec![0.0; p];
    tensor_products(&x, d, &mut out);
    out
}
