//! Dense real matrices, sample covariance, and a symmetric eigenvalue solver.
//!
//! The eigensolver reduces a symmetric matrix to tridiagonal form with
//! Householder reflections and then runs implicit-shift QL on the
//! tridiagonal. Only eigenvalues are computed.

use rayon::prelude::*;
use thiserror::Error;

/// Iteration cap per eigenvalue in the QL sweep.
const QL_MAX_ITERATIONS: usize = 60;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("QL iteration did not converge for eigenvalue {index} after {iterations} iterations")]
    NoConvergence { index: usize, iterations: usize },
}

/// Row-major dense matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in diag.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    /// Builds a matrix from row-major data, rejecting wrong lengths and
    /// non-finite entries.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        let m = Self { rows, cols, data };
        m.check_finite()?;
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(LinalgError::DimensionMismatch("ragged rows".into()));
        }
        Self::from_row_major(rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    pub fn check_finite(&self) -> Result<(), LinalgError> {
        match self.data.iter().position(|v| !v.is_finite()) {
            Some(pos) => Err(LinalgError::NonFinite {
                row: pos / self.cols.max(1),
                col: pos % self.cols.max(1),
            }),
            None => Ok(()),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Returns `(S + Sᵀ)/2`.
    pub fn symmetrized(&self) -> Result<Self, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut s = self.clone();
        for i in 0..n {
            for j in 0..i {
                let avg = 0.5 * (self.get(i, j) + self.get(j, i));
                s.data[i * n + j] = avg;
                s.data[j * n + i] = avg;
            }
        }
        Ok(s)
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn scale(&mut self, factor: f64) {
        self.data.iter_mut().for_each(|v| *v *= factor);
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                let src = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        Ok(out)
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "matvec dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `xᵀ A x` for a square matrix.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        assert!(self.is_square() && x.len() == self.rows);
        (0..self.rows).map(|i| x[i] * dot(self.row(i), x)).sum()
    }
}

/// Eigenvalues of a symmetric matrix in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
}

impl Spectrum {
    /// Sorts the given values ascending.
    pub fn from_unsorted(mut eigenvalues: Vec<f64>) -> Self {
        eigenvalues.sort_by(f64::total_cmp);
        Self { eigenvalues }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn min(&self) -> Option<f64> {
        self.eigenvalues.first().copied()
    }

    pub fn max(&self) -> Option<f64> {
        self.eigenvalues.last().copied()
    }
}

/// Four-lane dot product; the fixed lane split keeps results independent of
/// how callers partition work.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let k = 4 * c;
        acc[0] += a[k] * b[k];
        acc[1] += a[k + 1] * b[k + 1];
        acc[2] += a[k + 2] * b[k + 2];
        acc[3] += a[k + 3] * b[k + 3];
    }
    let mut tail = 0.0;
    for k in 4 * chunks..a.len() {
        tail += a[k] * b[k];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

const COV_ROW_BLOCK: usize = 8;

/// `W = (1/m) X Xᵀ` for a `p×m` data matrix. The result is exactly symmetric.
pub fn sample_covariance(x: &DenseMatrix) -> Result<DenseMatrix, LinalgError> {
    let (p, m) = (x.rows(), x.cols());
    if m == 0 {
        return Err(LinalgError::DimensionMismatch(
            "sample covariance needs at least one column".into(),
        ));
    }
    let inv_m = 1.0 / m as f64;
    let mut w = DenseMatrix::zeros(p, p);

    // Each row block of W is computed against all later rows of X; row j of X
    // is streamed once per block instead of once per row.
    w.data
        .par_chunks_mut(p * COV_ROW_BLOCK)
        .enumerate()
        .for_each(|(block, out)| {
            let i0 = block * COV_ROW_BLOCK;
            let rows_here = out.len() / p.max(1);
            for j in i0..p {
                let xj = x.row(j);
                for r in 0..rows_here {
                    let i = i0 + r;
                    if j < i {
                        continue;
                    }
                    out[r * p + j] = dot(x.row(i), xj) * inv_m;
                }
            }
        });
    for i in 0..p {
        for j in 0..i {
            w.data[i * p + j] = w.data[j * p + i];
        }
    }
    Ok(w)
}

/// Eigenvalues of the symmetric part `(S + Sᵀ)/2`, ascending.
pub fn eigvalsh(s: &DenseMatrix) -> Result<Spectrum, LinalgError> {
    s.check_finite()?;
    let sym = s.symmetrized()?;
    let n = sym.rows();
    if n == 0 {
        return Ok(Spectrum::from_unsorted(Vec::new()));
    }
    let (mut diag, mut off) = tridiagonalize(sym.data.clone(), n);
    tridiagonal_ql(&mut diag, &mut off)?;
    let spectrum = Spectrum::from_unsorted(diag);
    debug_assert!(
        spectral_identities_hold(&sym, &spectrum),
        "trace/Frobenius identities violated by eigvalsh"
    );
    Ok(spectrum)
}

/// Trace and Frobenius checks: `|Σλ − tr S| ≤ p·1e−10·max|S|` and
/// `|Σλ² − ‖S‖²_F| ≤ p·1e−10·max|S|²`.
pub fn spectral_identities_hold(s: &DenseMatrix, spectrum: &Spectrum) -> bool {
    let p = s.rows() as f64;
    let scale = s.max_abs();
    let sum: f64 = spectrum.eigenvalues().iter().sum();
    let sum_sq: f64 = spectrum.eigenvalues().iter().map(|l| l * l).sum();
    let tol = p * 1e-10 * scale;
    (sum - s.trace()).abs() <= tol.max(f64::MIN_POSITIVE)
        && (sum_sq - s.frobenius_norm_sq()).abs() <= (tol * scale).max(f64::MIN_POSITIVE)
}

/// Householder reduction of a full symmetric row-major matrix. Returns the
/// diagonal and the sub-diagonal (`off[k]` couples `k` and `k+1`).
fn tridiagonalize(mut a: Vec<f64>, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    let mut v = vec![0.0; n];
    let mut w = vec![0.0; n];

    for k in 0..n.saturating_sub(2) {
        diag[k] = a[k * n + k];
        let tail = k + 1;
        let len = n - tail;
        let x = &a[k * n + tail..k * n + n];
        let scale = x.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if scale == 0.0 {
            off[k] = 0.0;
            continue;
        }
        let norm = scale * x.iter().map(|v| (v / scale).powi(2)).sum::<f64>().sqrt();
        let alpha = if x[0] > 0.0 { -norm } else { norm };
        let v = &mut v[..len];
        v.copy_from_slice(x);
        v[0] -= alpha;
        let v_norm_sq = dot(v, v);
        off[k] = alpha;
        if v_norm_sq == 0.0 {
            continue;
        }
        let beta = 2.0 / v_norm_sq;

        // p = beta * A22 v
        let w = &mut w[..len];
        {
            let a_ref = &a;
            let v_ref = &*v;
            w.par_iter_mut().enumerate().for_each(|(r, out)| {
                let row = &a_ref[(tail + r) * n + tail..(tail + r) * n + n];
                *out = beta * dot(row, v_ref);
            });
        }
        let half_k = 0.5 * beta * dot(w, v);
        for (wi, vi) in w.iter_mut().zip(v.iter()) {
            *wi -= half_k * vi;
        }

        // A22 -= v wᵀ + w vᵀ
        let (v_ref, w_ref) = (&*v, &*w);
        a[tail * n..]
            .par_chunks_mut(n)
            .enumerate()
            .for_each(|(r, row)| {
                let (vr, wr) = (v_ref[r], w_ref[r]);
                for ((dst, vc), wc) in row[tail..].iter_mut().zip(v_ref).zip(w_ref) {
                    *dst -= vr * wc + wr * vc;
                }
            });
    }
    if n >= 2 {
        diag[n - 2] = a[(n - 2) * n + (n - 2)];
        off[n - 2] = a[(n - 1) * n + (n - 2)];
    }
    diag[n - 1] = a[(n - 1) * n + (n - 1)];
    (diag, off)
}

/// Implicit-shift QL on a symmetric tridiagonal matrix, eigenvalues only.
/// `diag` is overwritten with the (unsorted) eigenvalues.
fn tridiagonal_ql(diag: &mut [f64], off: &mut [f64]) -> Result<(), LinalgError> {
    let n = diag.len();
    let mut e = vec![0.0; n];
    e[..off.len()].copy_from_slice(off);
    let d = diag;
    // Absolute deflation floor: rounding-level couplings between
    // rounding-level diagonals (clusters at zero) never pass the relative test.
    let norm = (0..n).fold(0.0f64, |acc, i| acc.max(d[i].abs() + e[i].abs() + if i > 0 { e[i - 1].abs() } else { 0.0 }));
    let floor = f64::EPSILON * norm;

    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd || e[m].abs() <= floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > QL_MAX_ITERATIONS {
                return Err(LinalgError::NoConvergence {
                    index: l,
                    iterations: QL_MAX_ITERATIONS,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    off.iter_mut().for_each(|v| *v = 0.0);
    Ok(())
}

/// Largest singular value. Symmetric inputs use `max |λ|` directly, others
/// go through the smaller Gram matrix.
pub fn spectral_norm(a: &DenseMatrix) -> Result<f64, LinalgError> {
    a.check_finite()?;
    if a.rows() == 0 || a.cols() == 0 || a.max_abs() == 0.0 {
        return Ok(0.0);
    }
    if a.is_symmetric() {
        let spec = eigvalsh(a)?;
        let lo = spec.min().unwrap_or(0.0).abs();
        let hi = spec.max().unwrap_or(0.0).abs();
        return Ok(lo.max(hi));
    }
    let gram = if a.rows() <= a.cols() {
        // A Aᵀ has entries dot(row_i, row_j).
        let n = a.rows();
        let mut g = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = dot(a.row(i), a.row(j));
                g.set(i, j, v);
                g.set(j, i, v);
            }
        }
        g
    } else {
        let at = a.transpose();
        let n = at.rows();
        let mut g = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = dot(at.row(i), at.row(j));
                g.set(i, j, v);
                g.set(j, i, v);
            }
        }
        g
    };
    let top = eigvalsh(&gram)?.max().unwrap_or(0.0);
    Ok(top.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, seed: u64) -> DenseMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v: f64 = rng.random_range(-1.0..1.0);
                m.set(i, j, v);
                m.set(j, i, v);
            }
        }
        m
    }

    #[test]
    fn covariance_of_identity() {
        let w = sample_covariance(&DenseMatrix::identity(2)).unwrap();
        assert_eq!(w.as_slice(), &[0.5, 0.0, 0.0, 0.5]);
    }

    #[test]
    fn covariance_rank_one() {
        let x = DenseMatrix::from_row_major(2, 1, vec![1.0, 1.0]).unwrap();
        let w = sample_covariance(&x).unwrap();
        assert_eq!(w.as_slice(), &[1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn covariance_of_zeros() {
        let w = sample_covariance(&DenseMatrix::zeros(3, 5)).unwrap();
        assert!(w.as_slice().iter().all(|&v| v == 0.0));
        assert_eq!((w.rows(), w.cols()), (3, 3));
    }

    #[test]
    fn covariance_needs_columns() {
        assert!(matches!(
            sample_covariance(&DenseMatrix::zeros(3, 0)),
            Err(LinalgError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn covariance_matches_naive_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (p, m) = (19, 23);
        let data: Vec<f64> = (0..p * m).map(|_| rng.random_range(-1.0..1.0)).collect();
        let x = DenseMatrix::from_row_major(p, m, data).unwrap();
        let w = sample_covariance(&x).unwrap();
        let naive = x.matmul(&x.transpose()).unwrap();
        for i in 0..p {
            for j in 0..p {
                assert_abs_diff_eq!(w.get(i, j), naive.get(i, j) / m as f64, epsilon = 1e-13);
            }
        }
        assert!(w.is_symmetric());
        let spec = eigvalsh(&w).unwrap();
        let norm = spectral_norm(&w).unwrap();
        assert!(spec.min().unwrap() >= -1e-10 * norm);
    }

    #[test]
    fn eigvalsh_small_cases() {
        let d = eigvalsh(&DenseMatrix::from_diagonal(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(d.eigenvalues(), &[1.0, 2.0, 3.0]);

        let swap = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let s = eigvalsh(&swap).unwrap();
        assert_abs_diff_eq!(s.eigenvalues()[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.eigenvalues()[1], 1.0, epsilon = 1e-14);

        let id = eigvalsh(&DenseMatrix::identity(7)).unwrap();
        assert!(id.eigenvalues().iter().all(|&v| (v - 1.0).abs() < 1e-14));
        assert_eq!(id.len(), 7);
    }

    #[test]
    fn eigvalsh_one_by_one_and_empty() {
        let one = DenseMatrix::from_rows(&[vec![-4.5]]).unwrap();
        assert_eq!(eigvalsh(&one).unwrap().eigenvalues(), &[-4.5]);
        assert!(eigvalsh(&DenseMatrix::zeros(0, 0)).unwrap().is_empty());
    }

    #[test]
    fn eigvalsh_rejects_non_finite() {
        let mut m = DenseMatrix::identity(3);
        m.as_mut_slice()[4] = f64::NAN;
        assert!(matches!(eigvalsh(&m), Err(LinalgError::NonFinite { row: 1, col: 1 })));
    }

    #[test]
    fn eigvalsh_symmetrizes_input() {
        // (S + Sᵀ)/2 of [[0,2],[0,0]] is [[0,1],[1,0]].
        let m = DenseMatrix::from_rows(&[vec![0.0, 2.0], vec![0.0, 0.0]]).unwrap();
        let s = eigvalsh(&m).unwrap();
        assert_abs_diff_eq!(s.eigenvalues()[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.eigenvalues()[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn eigvalsh_known_tridiagonal_spectrum() {
        // Path-graph Laplacian-like matrix 2 on diagonal, -1 off: λ_k = 2 - 2cos(kπ/(n+1)).
        let n = 40;
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 2.0);
            if i + 1 < n {
                m.set(i, i + 1, -1.0);
                m.set(i + 1, i, -1.0);
            }
        }
        let s = eigvalsh(&m).unwrap();
        for (k, &v) in s.eigenvalues().iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert_abs_diff_eq!(v, exact, epsilon = 1e-12);
        }
    }

    #[test]
    fn eigvalsh_wide_gram_matrix() {
        // Rank m < p: p − m eigenvalues at rounding level.
        for (p, m, seed) in [(200, 100, 1), (120, 7, 2), (64, 63, 3)] {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let data: Vec<f64> = (0..p * m).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
            let w = sample_covariance(&DenseMatrix::from_row_major(p, m, data).unwrap()).unwrap();
            let s = eigvalsh(&w).unwrap();
            assert!(spectral_identities_hold(&w, &s));
            let zeros = s.eigenvalues().iter().filter(|v| v.abs() < 1e-10).count();
            assert_eq!(zeros, p - m, "p={p} m={m}");
        }
    }

    #[test]
    fn eigvalsh_identities_on_random_matrices() {
        for seed in 0..10 {
            let m = random_symmetric(30 + seed as usize, seed);
            let s = eigvalsh(&m).unwrap();
            assert!(spectral_identities_hold(&m, &s));
            assert!(s.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn eigvalsh_permutation_invariant() {
        let m = random_symmetric(6, 11);
        let perm = [3usize, 0, 5, 1, 4, 2];
        let mut pm = DenseMatrix::zeros(6, 6);
        for i in 0..6 {
            for j in 0..6 {
                pm.set(i, j, m.get(perm[i], perm[j]));
            }
        }
        let a = eigvalsh(&m).unwrap();
        let b = eigvalsh(&pm).unwrap();
        for (x, y) in a.eigenvalues().iter().zip(b.eigenvalues()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn spectral_norm_examples() {
        assert_abs_diff_eq!(spectral_norm(&DenseMatrix::identity(4)).unwrap(), 1.0, epsilon = 1e-14);
        let d = DenseMatrix::from_diagonal(&[2.0, -5.0]);
        assert_abs_diff_eq!(spectral_norm(&d).unwrap(), 5.0, epsilon = 1e-14);
        let swap = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_abs_diff_eq!(spectral_norm(&swap).unwrap(), 1.0, epsilon = 1e-14);
        assert_eq!(spectral_norm(&DenseMatrix::zeros(3, 4)).unwrap(), 0.0);
    }

    #[test]
    fn spectral_norm_rectangular() {
        // [[3,0],[4,0]] has singular values 5 and 0; [[1,1,1]] has √3.
        let a = DenseMatrix::from_rows(&[vec![3.0, 0.0], vec![4.0, 0.0]]).unwrap();
        assert_abs_diff_eq!(spectral_norm(&a).unwrap(), 5.0, epsilon = 1e-12);
        let b = DenseMatrix::from_rows(&[vec![1.0, 1.0, 1.0]]).unwrap();
        assert_abs_diff_eq!(spectral_norm(&b).unwrap(), 3f64.sqrt(), epsilon = 1e-12);
        let bt = b.transpose();
        assert_abs_diff_eq!(spectral_norm(&bt).unwrap(), 3f64.sqrt(), epsilon = 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn trace_and_frobenius_preserved(n in 1usize..24, seed in any::<u64>()) {
            let m = random_symmetric(n, seed);
            let s = eigvalsh(&m).unwrap();
            prop_assert!(spectral_identities_hold(&m, &s));
        }

        #[test]
        fn covariance_is_psd(p in 1usize..12, m in 1usize..20, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let data: Vec<f64> = (0..p * m).map(|_| rng.random_range(-2.0..2.0)).collect();
            let x = DenseMatrix::from_row_major(p, m, data).unwrap();
            let w = sample_covariance(&x).unwrap();
            let s = eigvalsh(&w).unwrap();
            let norm = s.max().unwrap().abs().max(s.min().unwrap().abs());
            prop_assert!(s.min().unwrap() >= -1e-10 * norm.max(1e-300));
        }
    }
}
