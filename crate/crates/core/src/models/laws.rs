use std::f64::consts::SQRT_2;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Mean-zero, unit-variance scalar entry distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryLaw {
    /// ±1 with probability ½ each.
    Rademacher,
    /// Uniform on `[−√3, √3]`.
    UniformSqrt3,
    StdNormal,
}

impl EntryLaw {
    pub const ALL: [EntryLaw; 3] = [EntryLaw::Rademacher, EntryLaw::UniformSqrt3, EntryLaw::StdNormal];

    /// `E x⁴`.
    pub fn fourth_moment(self) -> f64 {
        match self {
            EntryLaw::Rademacher => 1.0,
            EntryLaw::UniformSqrt3 => 9.0 / 5.0,
            EntryLaw::StdNormal => 3.0,
        }
    }

    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            EntryLaw::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            EntryLaw::UniformSqrt3 => rng.random_range(-SQRT_3..=SQRT_3),
            EntryLaw::StdNormal => rng.sample(StandardNormal),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EntryLaw::Rademacher => "rademacher",
            EntryLaw::UniformSqrt3 => "uniform_sqrt3",
            EntryLaw::StdNormal => "std_normal",
        }
    }
}

/// Dependent block inside a block-independent column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BlockKind {
    /// `(z, (z²−1)/√2)` with `z ~ N(0,1)`.
    GaussianHermite,
    /// `(b₁, b₂, b₃)` with `b₁, b₂ = ±½` and `b₃ = −2 b₁ b₂`.
    XorTriple,
    /// `±√d · e_i` with `i` uniform in `[d]`.
    BasisVector { d: usize },
    /// `d` independent entries.
    IidBlock { d: usize, law: EntryLaw },
}

impl BlockKind {
    pub fn size(&self) -> usize {
        match *self {
            BlockKind::GaussianHermite => 2,
            BlockKind::XorTriple => 3,
            BlockKind::BasisVector { d } | BlockKind::IidBlock { d, .. } => d,
        }
    }

    /// Common variance of the block entries (the block covariance is this
    /// multiple of the identity).
    pub fn variance(&self) -> f64 {
        match self {
            BlockKind::XorTriple => 0.25,
            _ => 1.0,
        }
    }

    /// Largest fourth moment among the block entries.
    pub fn fourth_moment(&self) -> f64 {
        match *self {
            // E z⁴ = 3, E (z²−1)⁴ / 4 = (105 − 60 + 18 − 4 + 1)/4 = 15.
            BlockKind::GaussianHermite => 15.0,
            BlockKind::XorTriple => 1.0 / 16.0,
            BlockKind::BasisVector { d } => d as f64,
            BlockKind::IidBlock { law, .. } => law.fourth_moment(),
        }
    }

    /// `E ‖x̄‖²` for one block.
    pub fn mean_norm_sq(&self) -> f64 {
        self.size() as f64 * self.variance()
    }

    /// `E ‖x̄‖⁴` for one block.
    pub fn mean_norm_fourth(&self) -> f64 {
        match *self {
            // ‖x̄‖² = (z⁴ + 1)/2, so E‖x̄‖⁴ = (E z⁸ + 2E z⁴ + 1)/4 = (105 + 6 + 1)/4.
            BlockKind::GaussianHermite => 28.0,
            BlockKind::XorTriple => 9.0 / 16.0,
            BlockKind::BasisVector { d } => (d * d) as f64,
            BlockKind::IidBlock { d, law } => {
                let d = d as f64;
                d * (d - 1.0) + d * law.fourth_moment()
            }
        }
    }

    /// Fills `out` (length `size()`) with one draw.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.size());
        match *self {
            BlockKind::GaussianHermite => {
                let z: f64 = rng.sample(StandardNormal);
                out.copy_from_slice(&gaussian_hermite_block(z));
            }
            BlockKind::XorTriple => {
                let b1 = if rng.random::<bool>() { 0.5 } else { -0.5 };
                let b2 = if rng.random::<bool>() { 0.5 } else { -0.5 };
                out.copy_from_slice(&xor_triple_block(b1, b2));
            }
            BlockKind::BasisVector { d } => {
                out.iter_mut().for_each(|v| *v = 0.0);
                let i = rng.random_range(0..d);
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                out[i] = sign * (d as f64).sqrt();
            }
            BlockKind::IidBlock { law, .. } => {
                out.iter_mut().for_each(|v| *v = law.sample(rng));
            }
        }
    }
}

/// Block built from a given standard-normal draw.
pub fn gaussian_hermite_block(z: f64) -> [f64; 2] {
    [z, (z * z - 1.0) / SQRT_2]
}

/// Block built from given first and second entries (each `±½`): the third
/// entry is `+½` when the signs differ and `−½` otherwise.
pub fn xor_triple_block(b1: f64, b2: f64) -> [f64; 3] {
    let third = if (b1 > 0.0) != (b2 > 0.0) { 0.5 } else { -0.5 };
    [b1, b2, third]
}

/// A block kind repeated `repeat` times in a column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockSpec {
    #[serde(flatten)]
    pub kind: BlockKind,
    #[serde(default = "one")]
    pub repeat: usize,
}

fn one() -> usize {
    1
}

impl BlockSpec {
    pub fn new(kind: BlockKind, repeat: usize) -> Self {
        Self { kind, repeat }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn xor_triple_examples() {
        assert_eq!(xor_triple_block(0.5, -0.5), [0.5, -0.5, 0.5]);
        assert_eq!(xor_triple_block(0.5, 0.5), [0.5, 0.5, -0.5]);
        assert_eq!(xor_triple_block(-0.5, -0.5), [-0.5, -0.5, -0.5]);
    }

    #[test]
    fn gaussian_hermite_at_one() {
        assert_eq!(gaussian_hermite_block(1.0), [1.0, 0.0]);
    }

    #[test]
    fn basis_vector_has_single_entry_of_magnitude_sqrt_d() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let kind = BlockKind::BasisVector { d: 4 };
        let mut out = [0.0; 4];
        for _ in 0..200 {
            kind.sample_into(&mut rng, &mut out);
            let nonzero: Vec<f64> = out.iter().copied().filter(|v| *v != 0.0).collect();
            assert_eq!(nonzero.len(), 1);
            assert_eq!(nonzero[0].abs(), 2.0);
        }
    }

    #[test]
    fn xor_identity_on_every_sample() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut out = [0.0; 3];
        for _ in 0..1000 {
            BlockKind::XorTriple.sample_into(&mut rng, &mut out);
            assert_eq!(out[2], -2.0 * out[0] * out[1]);
        }
    }

    #[test]
    fn entry_laws_have_unit_variance_and_stated_fourth_moment() {
        let n = 200_000;
        for law in EntryLaw::ALL {
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            let (mut m1, mut m2, mut m4) = (0.0, 0.0, 0.0);
            for _ in 0..n {
                let x = law.sample(&mut rng);
                m1 += x;
                m2 += x * x;
                m4 += x.powi(4);
            }
            let (m1, m2, m4) = (m1 / n as f64, m2 / n as f64, m4 / n as f64);
            let k = law.fourth_moment();
            // 4σ bands: Var(x) = 1, Var(x²) = K − 1, Var(x⁴) ≤ E x⁸ (≤ 105 for the normal).
            assert!(m1.abs() < 4.0 / (n as f64).sqrt(), "{law:?} mean {m1}");
            assert!((m2 - 1.0).abs() < 4.0 * ((k - 1.0).max(1e-12) / n as f64).sqrt() + 1e-12, "{law:?} var {m2}");
            assert!((m4 - k).abs() < 4.0 * (105.0 / n as f64).sqrt(), "{law:?} m4 {m4}");
        }
    }

    #[test]
    fn block_moments_match_simulation() {
        let n = 400_000;
        for kind in [
            BlockKind::GaussianHermite,
            BlockKind::XorTriple,
            BlockKind::BasisVector { d: 5 },
            BlockKind::IidBlock { d: 3, law: EntryLaw::UniformSqrt3 },
        ] {
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            let mut out = vec![0.0; kind.size()];
            let mut norm4 = 0.0;
            for _ in 0..n {
                kind.sample_into(&mut rng, &mut out);
                let sq: f64 = out.iter().map(|v| v * v).sum();
                norm4 += sq * sq;
            }
            let est = norm4 / n as f64;
            let rel = (est - kind.mean_norm_fourth()).abs() / kind.mean_norm_fourth();
            assert!(rel < 0.05, "{kind:?}: {est} vs {}", kind.mean_norm_fourth());
        }
    }
}
