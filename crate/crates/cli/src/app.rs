//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use mpverify::combinatorics::meta_index_census;
use mpverify::models::ColumnLaw;

use crate::config::{resolve, resolve_model, resolve_output_dir, ExperimentConfig, Overrides, ResolvedComparison, DEFAULT_SEED};
use crate::error::CliError;
use crate::output::{csv_writer, write_rows};
use crate::presets::Preset;
use crate::simulate::{run_simulate, TheoryLaw};
use crate::verify::{
    isotropy_models, lemma_grids, varcheck, verify_census, verify_isotropy, verify_lemmas, verify_varbounds,
    verify_yaskov, VerifyReport,
};

#[derive(Debug, Parser)]
#[command(name = "mpverify", version, about = "Sample covariance spectra, Marchenko-Pastur laws and exact checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct ExperimentArgs {
    /// JSON config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Preset name, e.g. figure1a or figure2-uniform.
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Shrink factor for presets, in (0, 1]. Defaults to 0.25.
    #[arg(long)]
    pub scale_factor: Option<f64>,
    /// Run presets at their original size.
    #[arg(long)]
    pub full: bool,
}

impl ExperimentArgs {
    fn file(&self) -> Result<ExperimentConfig, CliError> {
        match &self.config {
            Some(path) => ExperimentConfig::from_file(path),
            None => Ok(ExperimentConfig::default()),
        }
    }

    fn columns(&self) -> Result<(String, ColumnLaw, u64), CliError> {
        let file = self.file()?;
        let (name, model, _, _) =
            resolve_model(file.model.as_ref(), self.preset.as_deref(), self.scale_factor, self.full, file.scale_factor)?;
        model.validate()?;
        Ok((name, model.columns, self.seed.or(file.seed).unwrap_or(DEFAULT_SEED)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Lemmas,
    Census,
    Varbounds,
    Yaskov,
    Isotropy,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample one matrix, compare its spectrum with the limit law, write CSV/JSON.
    Simulate {
        #[command(flatten)]
        experiment: ExperimentArgs,
        #[arg(long)]
        bins: Option<usize>,
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Exit with status 1 when the Kolmogorov distance exceeds this.
        #[arg(long)]
        max_ks: Option<f64>,
    },
    /// Tabulate a limit density as `x,density` CSV.
    Density {
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma2: f64,
        /// Population spectrum as `location:weight,…`; uses the Stieltjes solver.
        #[arg(long)]
        atoms: Option<String>,
        #[arg(long, default_value_t = 0.0)]
        from: f64,
        /// Defaults to 1.1 times the upper support edge.
        #[arg(long)]
        to: Option<f64>,
        #[arg(long, default_value_t = 1000)]
        points: usize,
        /// Output file; standard output when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Monte-Carlo variance of quadratic forms against the applicable bound.
    Varcheck {
        #[command(flatten)]
        experiment: ExperimentArgs,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Identity plus `matrices − 1` random unit-norm symmetric matrices.
        #[arg(long, default_value_t = 3)]
        matrices: usize,
    },
    /// Brute-force meta-index census as CSV.
    Census {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Exact binomial-coefficient checks on the default grids.
    Lemmas,
    /// Run a verification suite and print a JSON report.
    Verify {
        suite: Suite,
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        /// Preset name for `varbounds` (default figure1a).
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 3)]
        matrices: usize,
        #[arg(long, default_value_t = 2)]
        n_blocks: usize,
        #[arg(long, default_value_t = 20_000)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        scale_factor: Option<f64>,
        #[arg(long)]
        full: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the preset(s) of one figure: 1a, 1b, 1c, 1d, 2, 3 or 4.
    Figures {
        id: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        output_dir: Option<PathBuf>,
        #[arg(long)]
        scale_factor: Option<f64>,
        #[arg(long)]
        full: bool,
        #[arg(long)]
        bins: Option<usize>,
    },
}

/// Parses `args`, runs the command and returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), CliError> {
    match output {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_report(report: &VerifyReport, output: Option<&Path>) -> Result<bool, CliError> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    emit(&text, output)?;
    Ok(report.passed)
}

fn parse_atoms(spec: &str) -> Result<Vec<(f64, f64)>, CliError> {
    spec.split(',')
        .map(|pair| {
            let (t, w) = pair
                .split_once(':')
                .ok_or_else(|| CliError::Config(format!("atom '{pair}' is not location:weight")))?;
            let num = |s: &str| s.trim().parse::<f64>().map_err(|_| CliError::Config(format!("bad number '{s}'")));
            Ok((num(t)?, num(w)?))
        })
        .collect()
}

/// `Ok(false)` means a verification did not pass.
pub fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Simulate { experiment, bins, output_dir, max_ks } => {
            let file = experiment.file()?;
            let overrides = Overrides {
                preset: experiment.preset.clone(),
                seed: experiment.seed,
                histogram_bins: bins,
                output_dir,
                scale_factor: experiment.scale_factor,
                full: experiment.full,
            };
            let exp = resolve(&file, &overrides)?;
            let result = run_simulate(&exp)?;
            println!(
                "{}: p={} m={} seed={} ks={:.6} -> {}",
                exp.name,
                exp.p,
                exp.m,
                exp.seed,
                result.ks_distance,
                exp.output_dir.display()
            );
            Ok(max_ks.is_none_or(|t| result.ks_distance <= t))
        }
        Command::Density { lambda, sigma2, atoms, from, to, points, output } => {
            let comparison = match atoms {
                Some(spec) => ResolvedComparison::Anisotropic { lambda, atoms: parse_atoms(&spec)? },
                None => ResolvedComparison::Mp { lambda, sigma2 },
            };
            let law = TheoryLaw::from_comparison(&comparison)?;
            let to = match to {
                Some(t) => t,
                None => 1.1 * law.upper_edge(),
            };
            let rows = law.curve(from, to, points)?;
            let mut buf = Vec::new();
            write_rows(&mut buf, ["x", "density"], &rows)?;
            emit(std::str::from_utf8(&buf).expect("csv is utf-8"), output.as_deref())?;
            Ok(true)
        }
        Command::Varcheck { experiment, samples, matrices } => {
            let (name, columns, seed) = experiment.columns()?;
            let cases = varcheck(&columns, samples, matrices, seed)?;
            let ok = cases.iter().all(|c| c.within_bound);
            let report = VerifyReport {
                suite: format!("varcheck:{name}"),
                passed: ok,
                details: serde_json::json!({ "seed": seed, "cases": cases }),
            };
            emit_report(&report, None)
        }
        Command::Census { n, d, output } => {
            let census = meta_index_census(n, d)?;
            let mut buf = Vec::new();
            {
                let mut w = csv_writer(&mut buf);
                w.write_record(["w", "v", "r", "enumerated", "formula", "match", "coincident", "distinct"])?;
                for c in &census.cells {
                    w.write_record([
                        c.w.to_string(),
                        c.v.to_string(),
                        c.r.to_string(),
                        c.enumerated.to_string(),
                        c.formula.to_string(),
                        c.matches().to_string(),
                        c.coincident.to_string(),
                        c.distinct.to_string(),
                    ])?;
                }
                w.flush()?;
            }
            emit(std::str::from_utf8(&buf).expect("csv is utf-8"), output.as_deref())?;
            for v in &census.violations {
                eprintln!("constraint violation: {v}");
            }
            Ok(census.all_match() && census.constraints_hold())
        }
        Command::Lemmas => {
            let grids = lemma_grids();
            for g in &grids {
                println!(
                    "{:<14} checked={:<6} passed={:<6} not_applicable={:<5} failures={}",
                    g.name,
                    g.checked,
                    g.passed,
                    g.not_applicable,
                    g.failures.len()
                );
                for (params, w) in &g.failures {
                    println!("  {params:?}: {} ({} > {})", w.relation, w.lhs, w.rhs);
                }
            }
            Ok(grids.iter().all(|g| g.all_passed()))
        }
        Command::Verify { suite, n, d, model, config, samples, matrices, n_blocks, trials, seed, scale_factor, full, output } => {
            let seed = seed.unwrap_or(DEFAULT_SEED);
            let report = match suite {
                Suite::Lemmas => verify_lemmas()?,
                Suite::Census => verify_census(n, d)?,
                Suite::Varbounds => {
                    let args = ExperimentArgs {
                        preset: if config.is_none() { Some(model.unwrap_or_else(|| "figure1a".into())) } else { model },
                        config,
                        seed: Some(seed),
                        scale_factor,
                        full,
                    };
                    let (_, columns, seed) = args.columns()?;
                    verify_varbounds(&columns, samples, matrices, seed)?
                }
                Suite::Yaskov => verify_yaskov(n_blocks, samples, seed)?,
                Suite::Isotropy => verify_isotropy(&isotropy_models(), trials, seed)?,
            };
            emit_report(&report, output.as_deref())
        }
        Command::Figures { id, seed, output_dir, scale_factor, full, bins } => {
            let root = resolve_output_dir(output_dir.as_deref(), None);
            let presets = Preset::figure(&id)?;
            for preset in presets {
                let overrides = Overrides {
                    preset: Some(preset.name()),
                    seed,
                    histogram_bins: bins,
                    output_dir: Some(root.join(preset.name())),
                    scale_factor,
                    full,
                };
                let exp = resolve(&ExperimentConfig::default(), &overrides)?;
                let result = run_simulate(&exp)?;
                println!("{}: p={} m={} ks={:.6}", exp.name, exp.p, exp.m, result.ks_distance);
            }
            Ok(true)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atoms_parse() {
        assert_eq!(parse_atoms("1:0.5, 2:0.5").unwrap(), vec![(1.0, 0.5), (2.0, 0.5)]);
        assert!(parse_atoms("1").is_err());
        assert!(parse_atoms("a:1").is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(main_with_args(["mpverify", "frobnicate"]), 2);
        assert_eq!(main_with_args(["mpverify", "census", "--n", "4"]), 2);
        assert_eq!(main_with_args(["mpverify", "census", "--n", "40", "--d", "10"]), 2);
    }
}
