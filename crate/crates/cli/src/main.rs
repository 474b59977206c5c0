//! `gga` — verification suites and coefficient queries for algebras
//! generated by Gibbs measures.
//!
//! Exit codes: 0 when every check passes, 1 when any check fails, 2 on
//! usage, parse or computation errors.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::json;

use gga_core::{AlgebraElement, Configuration, PairElement, Region};

use gga::report::{Check, Report};
use gga::spec::{parse_site, BuiltModel, CliError, CliResult, EmbedSpec};
use gga::suites;

#[derive(Parser)]
#[command(name = "gga", version, about = "Genetic and evolution algebras from Gibbs measures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Configurations on the command line are written `tail[+site:label…]`
/// (sites as `x`, `x,y` or `tag#x`) or `@file.json`.
#[derive(Subcommand)]
enum Command {
    /// Run one verification suite; JSON report on stdout, summary on stderr.
    Verify {
        /// One of: markov, nonassoc, decomposition, equiv-potentials,
        /// tau-iso, functionals, tensor, finite-oracle, evo-factorization,
        /// em-ideal-iso, counterexample, embed-finite.
        suite: String,
        /// Model specification file.
        #[arg(long)]
        model: PathBuf,
        /// Seed for all sampled checks.
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Sample count; each suite has its own default.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Print the structural coefficients of one ordered pair.
    Coeff {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// Print the product of two class-algebra basis elements.
    Product {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// Print the product of two pair-basis elements, written "cfgA|cfgB".
    EvoProduct {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// Compare sampled coefficients against exhaustive enumeration.
    OracleCompare {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Embed a finite basis into the subalgebra over its closure window.
    Embed {
        #[arg(long)]
        model: PathBuf,
        /// JSON file with `basis`, `boundary` and optional `enlarged`.
        #[arg(long)]
        configs: PathBuf,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> CliResult<u8> {
    match cli.command {
        Command::Verify {
            suite,
            model,
            seed,
            samples,
        } => {
            let bm = BuiltModel::from_path(&model)?;
            let start = Instant::now();
            let mut report = suites::run_suite(&bm, &suite, seed, samples)?;
            report.duration_ms = start.elapsed().as_millis() as u64;
            Ok(report.emit() as u8)
        }
        Command::Coeff { model, left, right } => {
            let bm = BuiltModel::from_path(&model)?;
            let l = bm.config_arg(&left)?;
            let r = bm.config_arg(&right)?;
            let cv = bm.model.coefficient_vector(&l, &r)?;
            for (omega, c) in cv.iter() {
                println!("{c:.10}  {omega}");
            }
            Ok(0)
        }
        Command::Product { model, left, right } => {
            let bm = BuiltModel::from_path(&model)?;
            let u = AlgebraElement::basis(bm.config_arg(&left)?);
            let v = AlgebraElement::basis(bm.config_arg(&right)?);
            let p = bm.model.product(&u, &v)?;
            for (omega, c) in p.iter() {
                println!("{c:.10}  {omega}");
            }
            Ok(0)
        }
        Command::EvoProduct { model, left, right } => {
            let bm = BuiltModel::from_path(&model)?;
            let u = parse_pair(&bm, &left)?;
            let v = parse_pair(&bm, &right)?;
            let p = bm.model.evo_product(&u, &v)?;
            for ((a, b), c) in p.iter() {
                println!("{c:.10}  [{a} | {b}]");
            }
            Ok(0)
        }
        Command::OracleCompare {
            model,
            samples,
            seed,
        } => {
            let bm = BuiltModel::from_path(&model)?;
            let start = Instant::now();
            let rep =
                gga_core::compare_finite_equivalence(&bm.model, samples, seed, suites::enum_cap())?;
            let mut report = Report::new(
                "oracle-compare",
                seed,
                samples,
                vec![
                    Check::at_most("oracle-genetic", rep.max_genetic_dev, 1e-10)
                        .with_witness(json!({ "comparisons": rep.genetic_comparisons })),
                    Check::at_most("oracle-evolution", rep.max_evolution_dev, 1e-10)
                        .with_witness(json!({ "comparisons": rep.evolution_comparisons })),
                ],
            );
            report.duration_ms = start.elapsed().as_millis() as u64;
            Ok(report.emit() as u8)
        }
        Command::Embed { model, configs } => {
            let bm = BuiltModel::from_path(&model)?;
            let text = std::fs::read_to_string(&configs)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", configs.display())))?;
            let es: EmbedSpec = serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("embed input parse error: {e}")))?;
            let basis = es
                .basis
                .iter()
                .map(|c| bm.config(c))
                .collect::<CliResult<Vec<Configuration>>>()?;
            let boundary = bm.config(&es.boundary)?;
            let enlarged = es
                .enlarged
                .as_ref()
                .map(|raw| {
                    raw.iter()
                        .map(|s| parse_site(bm.model.lattice(), s))
                        .collect::<CliResult<Region>>()
                })
                .transpose()?;
            let start = Instant::now();
            let rep = bm.model.embed_finite_subalgebra(
                &basis,
                enlarged.as_ref(),
                &boundary,
                suites::enum_cap(),
            )?;
            let mut report = Report::new(
                "embed",
                0,
                basis.len(),
                vec![Check::at_most("embed-deviation", rep.max_dev, 1e-12).with_witness(json!({
                    "window": rep.window.to_string(),
                    "enlarged": rep.enlarged.to_string(),
                    "pairs": rep.pairs,
                    "comparisons": rep.comparisons,
                }))],
            );
            report.duration_ms = start.elapsed().as_millis() as u64;
            Ok(report.emit() as u8)
        }
    }
}

fn parse_pair(bm: &BuiltModel, arg: &str) -> CliResult<PairElement> {
    let (a, b) = arg.split_once('|').ok_or_else(|| {
        CliError::Usage(format!("pair {arg} must be written \"cfgA|cfgB\""))
    })?;
    Ok(PairElement::basis(bm.config_arg(a)?, bm.config_arg(b)?))
}
