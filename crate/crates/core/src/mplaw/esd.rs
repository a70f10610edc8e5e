use crate::linalg::Spectrum;

use super::{MpLawError, SpectralCdf};

/// Empirical spectral distribution: mass `1/p` at each eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct Esd {
    eigenvalues: Vec<f64>,
}

impl Esd {
    pub fn new(mut eigenvalues: Vec<f64>) -> Result<Self, MpLawError> {
        if eigenvalues.is_empty() || eigenvalues.iter().any(|v| !v.is_finite()) {
            return Err(MpLawError::InvalidSpectrum);
        }
        eigenvalues.sort_by(f64::total_cmp);
        Ok(Self { eigenvalues })
    }

    pub fn from_spectrum(spectrum: Spectrum) -> Result<Self, MpLawError> {
        Self::new(spectrum.into_vec())
    }

    /// For spectra of positive semidefinite matrices: eigenvalues in
    /// `[−tol, tol]` are rounding noise around the kernel and are set to zero.
    pub fn from_psd_spectrum(spectrum: Spectrum, tol: f64) -> Result<Self, MpLawError> {
        let values = spectrum
            .into_vec()
            .into_iter()
            .map(|v| if v.abs() <= tol { 0.0 } else { v })
            .collect();
        Self::new(values)
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `#{λᵢ ≤ x} / p`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.eigenvalues.partition_point(|&v| v <= x) as f64 / self.len() as f64
    }

    /// `#{λᵢ < x} / p`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        self.eigenvalues.partition_point(|&v| v < x) as f64 / self.len() as f64
    }
}

/// `sup_x |F_esd(x) − F(x)|`.
///
/// Between consecutive jumps of either function the difference is monotone,
/// so the supremum is attained by a one-sided limit at a jump: every distinct
/// eigenvalue and every jump point of `law` is examined from both sides.
pub fn ks_distance<L: SpectralCdf + ?Sized>(esd: &Esd, law: &L) -> f64 {
    let values = esd.eigenvalues();
    let p = values.len() as f64;
    let mut sup = 0.0f64;
    let mut i = 0;
    while i < values.len() {
        let x = values[i];
        let mut j = i + 1;
        while j < values.len() && values[j] == x {
            j += 1;
        }
        let below = i as f64 / p;
        let at = j as f64 / p;
        sup = sup
            .max((below - law.cdf_left(x)).abs())
            .max((at - law.cdf(x)).abs());
        i = j;
    }
    for x in law.jump_points() {
        sup = sup
            .max((esd.cdf_left(x) - law.cdf_left(x)).abs())
            .max((esd.cdf(x) - law.cdf(x)).abs());
    }
    sup.min(1.0)
}

#[cfg(test)]
mod tests {
    use super::super::MpLaw;
    use super::*;
    use approx::assert_abs_diff_eq;

    fn mp_quantile(law: &MpLaw, q: f64) -> f64 {
        // Bisection oracle on the continuous CDF.
        let (mut lo, mut hi) = (law.lower_edge(), law.upper_edge());
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if law.cdf(mid) < q {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn rejects_empty_or_non_finite() {
        assert!(Esd::new(vec![]).is_err());
        assert!(Esd::new(vec![1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn step_function_values() {
        let e = Esd::new(vec![2.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(e.cdf(0.5), 0.0);
        assert_eq!(e.cdf(1.0), 0.25);
        assert_eq!(e.cdf_left(2.0), 0.25);
        assert_eq!(e.cdf(2.0), 0.75);
        assert_eq!(e.cdf(3.0), 1.0);
    }

    #[test]
    fn quantile_spectrum_is_close() {
        let law = MpLaw::isotropic(0.25).unwrap();
        let p = 1000;
        let eigs: Vec<f64> = (1..=p)
            .map(|i| mp_quantile(&law, (i as f64 - 0.5) / p as f64))
            .collect();
        let d = ks_distance(&Esd::new(eigs).unwrap(), &law);
        assert!(d <= 1.0 / p as f64 + 1e-6, "distance {d}");
        assert_abs_diff_eq!(d, 0.5 / p as f64, epsilon = 1e-6);
    }

    #[test]
    fn all_mass_at_zero() {
        let law = MpLaw::isotropic(0.5).unwrap();
        let e = Esd::new(vec![0.0; 50]).unwrap();
        assert_abs_diff_eq!(ks_distance(&e, &law), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn atom_at_zero_is_matched() {
        // λ = 2: half the mass sits at zero.
        let law = MpLaw::isotropic(2.0).unwrap();
        let p = 2000;
        let mut eigs = vec![0.0; p / 2];
        eigs.extend((1..=p / 2).map(|i| {
            let q = 0.5 + 0.5 * (i as f64 - 0.5) / (p / 2) as f64;
            let (mut lo, mut hi) = (law.lower_edge(), law.upper_edge());
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if law.cdf(mid) < q {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        }));
        let d = ks_distance(&Esd::new(eigs).unwrap(), &law);
        assert!(d <= 1.0 / p as f64 + 1e-6, "distance {d}");
    }

    #[test]
    fn psd_clamp_only_touches_rounding_noise() {
        let s = Spectrum::from_unsorted(vec![-1e-14, 3e-15, -0.5, 1e-9, 1.0]);
        let e = Esd::from_psd_spectrum(s, 1e-10).unwrap();
        assert_eq!(e.eigenvalues(), &[-0.5, 0.0, 0.0, 1e-9, 1.0]);
    }

    #[test]
    fn inserting_one_eigenvalue_moves_distance_by_at_most_one_over_p() {
        use rand::{Rng, SeedableRng};
        let law = MpLaw::isotropic(0.5).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let p = rng.random_range(5..60);
            let eigs: Vec<f64> = (0..p).map(|_| rng.random_range(0.0..3.2)).collect();
            let base = ks_distance(&Esd::new(eigs.clone()).unwrap(), &law);
            let mut more = eigs;
            more.push(rng.random_range(0.0..3.2));
            let bigger = ks_distance(&Esd::new(more).unwrap(), &law);
            assert!((bigger - base).abs() <= 1.0 / p as f64 + 1e-12);
        }
    }
}
