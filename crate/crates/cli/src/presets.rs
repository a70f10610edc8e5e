//! Experiment geometries of the reference figures, optionally shrunk.

use mpverify::models::{checked_binomial, BlockKind, BlockSpec, ColumnLaw, EntryLaw, MatrixModel};

use crate::config::Comparison;
use crate::error::CliError;

pub const DEFAULT_SCALE: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// 2000 Gaussian–Hermite blocks, 4000 × 16000.
    Figure1a,
    /// 600 XOR triples, 1800 × 12600, entry variance ¼.
    Figure1b,
    /// 10 signed basis-vector blocks of length 700, 7000 × 21000.
    Figure1c,
    /// 80 signed basis-vector blocks of length 80, 6400 × 12800.
    Figure1d,
    /// 2-tensors of an n = 145 vector, m = 2p.
    Figure2(EntryLaw),
    /// 3-tensors of an n = 45 vector, m = 2p.
    Figure3(EntryLaw),
    /// 3-tensors of an n = 100 vector, m = p/7. Far beyond desk scale.
    Figure4,
}

fn law_suffix(law: EntryLaw) -> &'static str {
    match law {
        EntryLaw::Rademacher => "rademacher",
        EntryLaw::UniformSqrt3 => "uniform",
        EntryLaw::StdNormal => "normal",
    }
}

impl Preset {
    pub fn parse(name: &str) -> Result<Preset, CliError> {
        let key = name.strip_prefix("figure").unwrap_or(name);
        let law = |s: &str| match s {
            "rademacher" | "bernoulli" => Some(EntryLaw::Rademacher),
            "uniform" => Some(EntryLaw::UniformSqrt3),
            "normal" | "gaussian" => Some(EntryLaw::StdNormal),
            _ => None,
        };
        let preset = match key {
            "1a" => Some(Preset::Figure1a),
            "1b" => Some(Preset::Figure1b),
            "1c" => Some(Preset::Figure1c),
            "1d" => Some(Preset::Figure1d),
            "4" => Some(Preset::Figure4),
            _ => match key.split_once('-') {
                Some(("2", l)) => law(l).map(Preset::Figure2),
                Some(("3", l)) => law(l).map(Preset::Figure3),
                _ => None,
            },
        };
        preset.ok_or_else(|| CliError::Config(format!("unknown preset '{name}'")))
    }

    /// Presets making up one figure id (`2` and `3` have one panel per law).
    pub fn figure(id: &str) -> Result<Vec<Preset>, CliError> {
        match id.strip_prefix("figure").unwrap_or(id) {
            "2" => Ok(EntryLaw::ALL.iter().map(|&l| Preset::Figure2(l)).collect()),
            "3" => Ok(EntryLaw::ALL.iter().map(|&l| Preset::Figure3(l)).collect()),
            other => Preset::parse(other).map(|p| vec![p]),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Preset::Figure1a => "figure1a".into(),
            Preset::Figure1b => "figure1b".into(),
            Preset::Figure1c => "figure1c".into(),
            Preset::Figure1d => "figure1d".into(),
            Preset::Figure2(l) => format!("figure2-{}", law_suffix(*l)),
            Preset::Figure3(l) => format!("figure3-{}", law_suffix(*l)),
            Preset::Figure4 => "figure4".into(),
        }
    }

    /// Geometry at `scale` ∈ (0, 1]. Block counts, block lengths and `m`
    /// shrink linearly (both factors by `√scale` for the square 1d case);
    /// tensors use the smallest `n` whose `C(n, d)` reaches `scale·p`.
    pub fn model(&self, scale: f64) -> Result<MatrixModel, CliError> {
        if !(scale > 0.0 && scale <= 1.0) {
            return Err(CliError::Config(format!("scale_factor must lie in (0, 1], got {scale}")));
        }
        let shrink = |count: usize, s: f64| ((count as f64 * s).round() as usize).max(1);
        let blocks = |kind: BlockKind, repeat: usize| ColumnLaw::BlockIndependent {
            blocks: vec![BlockSpec::new(kind, repeat)],
        };
        let model = match *self {
            Preset::Figure1a => MatrixModel::new(blocks(BlockKind::GaussianHermite, shrink(2000, scale)), shrink(16000, scale)),
            Preset::Figure1b => MatrixModel::new(blocks(BlockKind::XorTriple, shrink(600, scale)), shrink(12600, scale)),
            Preset::Figure1c => MatrixModel::new(
                blocks(BlockKind::BasisVector { d: shrink(700, scale) }, 10),
                shrink(21000, scale),
            ),
            Preset::Figure1d => {
                let side = shrink(80, scale.sqrt());
                MatrixModel::new(blocks(BlockKind::BasisVector { d: side }, side), 2 * side * side)
            }
            Preset::Figure2(law) => tensor(145, 2, law, scale, |p| 2 * p),
            Preset::Figure3(law) => tensor(45, 3, law, scale, |p| 2 * p),
            Preset::Figure4 => tensor(100, 3, EntryLaw::UniformSqrt3, scale, |p| shrink(p, 1.0 / 7.0)),
        };
        Ok(model)
    }

    pub fn comparison(&self) -> Comparison {
        match self {
            Preset::Figure1b => Comparison::Mp { lambda: None, sigma2: Some(0.25) },
            _ => Comparison::Auto,
        }
    }
}

fn tensor(n_full: usize, d: usize, law: EntryLaw, scale: f64, columns: impl Fn(usize) -> usize) -> MatrixModel {
    let target = scale * checked_binomial(n_full, d).unwrap_or(0) as f64;
    let n = (d..=n_full)
        .find(|&n| checked_binomial(n, d).unwrap_or(0) as f64 >= target)
        .unwrap_or(n_full);
    let p = checked_binomial(n, d).unwrap_or(0) as usize;
    MatrixModel::new(ColumnLaw::Tensor { n, d, law }, columns(p))
}
