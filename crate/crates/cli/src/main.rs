use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context as _, Result};
use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use vcgrp_cli::experiment::{run_cell, ExperimentConfig};
use vcgrp_cli::ops::{check_method, parse_elements, CellParams, Inputs, Operation};
use vcgrp_cli::output::{csv_string, emit, json_string, Format, Row};
use vcgrp_cli::load_json;
use vcgrp_core::descriptor::{GroupDesc, MapDescriptor, SetDescriptor};
use vcgrp_core::freiman::{DEFAULT_MAX_ATTEMPTS, DEFAULT_TRIALS};
use vcgrp_core::periods::{DEFAULT_C_SAMPLE, DEFAULT_RETRIES};
use vcgrp_core::rational::{parse_rational, Rational};
use vcgrp_core::stability::DEFAULT_BUDGET;
use vcgrp_core::vc::{Scope, DEFAULT_CAP};
use vcgrp_core::GSet;
use vcgrp_selftest::{run_all, unexpected_failures, Context, Level, DEFAULT_SEED, KNOWN_UNATTAINABLE};

/// Descriptor arguments (`--set`, `--group`, `--map`, ...) take a path to a
/// JSON file or the JSON itself.
#[derive(Parser)]
#[command(name = "vcgrp", version, about = "VC-dimension and additive structure in finite groups")]
struct Cli {
    /// Master seed for every randomized step.
    #[arg(long, global = true, env = "VCGRP_SEED")]
    seed: Option<u64>,
    /// Size of the worker pool; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// VC-dimension of the translates of a set.
    Vcd {
        #[arg(long)]
        set: String,
        #[arg(long)]
        other: Option<String>,
        #[arg(long, default_value = "restricted")]
        scope: Scope,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Convolution 1_A * 1_B.
    Conv {
        #[arg(long)]
        set: String,
        #[arg(long)]
        other: Option<String>,
        #[arg(long, default_value = "fourier")]
        backend: String,
    },
    /// ε-almost-periods of μ_A ∘ 1_B.
    #[command(group(ArgGroup::new("method").args(["exact", "sample", "bohr"])))]
    Periods {
        #[arg(long)]
        set: String,
        #[arg(long)]
        other: Option<String>,
        /// Candidate translates S, as a set descriptor.
        #[arg(long)]
        scope: Option<String>,
        #[arg(long, value_parser = rational)]
        epsilon: Rational,
        #[arg(long)]
        exact: bool,
        /// The default.
        #[arg(long)]
        sample: bool,
        #[arg(long)]
        bohr: bool,
        /// VC-dimension bound for the sample size; computed when absent.
        #[arg(long)]
        d_hint: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_C_SAMPLE)]
        c_sample: u64,
        #[arg(long, default_value_t = DEFAULT_RETRIES)]
        retries: u32,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Realize a Bohr set and check its structure.
    Bohr {
        #[arg(long)]
        group: String,
        /// JSON list of characters, as indices or coordinates: "[[1],[3]]".
        #[arg(long)]
        freqs: String,
        #[arg(long, value_parser = rational)]
        radius: Rational,
        #[arg(long)]
        regular_dilate: bool,
        #[arg(long)]
        check_size_bound: bool,
    },
    /// Characters with |μ̂_A(γ)| ≥ threshold.
    Spectrum {
        #[arg(long)]
        set: String,
        #[arg(long)]
        threshold: f64,
        #[arg(long)]
        chang: bool,
    },
    /// Decompose A as a union of Bohr (or subspace) translates up to ε|A|.
    Regularity {
        #[arg(long)]
        set: String,
        #[arg(long, value_parser = rational)]
        epsilon: Rational,
        #[arg(long, value_parser = rational, conflicts_with = "subspace")]
        nu: Option<Rational>,
        #[arg(long)]
        subspace: bool,
        #[arg(long)]
        d_hint: Option<usize>,
    },
    /// A Bohr set or subspace inside A − A.
    Bogolyubov {
        #[arg(long)]
        set: String,
        #[arg(long, conflicts_with = "doubling")]
        subspace: bool,
        #[arg(long)]
        doubling: bool,
        #[arg(long)]
        d_hint: Option<usize>,
    },
    /// Freiman s-isomorphic model of A in a small vector space.
    Model {
        #[arg(long)]
        set: String,
        #[arg(long)]
        s: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_ATTEMPTS)]
        max_attempts: usize,
    },
    /// Decide whether a finite map is a Freiman s-isomorphism.
    FreimanCheck {
        #[arg(long)]
        map: String,
        #[arg(long)]
        s: usize,
        /// Random trials when exhaustive checking is too large.
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
    },
    /// Decide k-stability (absence of the order property).
    Stability {
        #[arg(long)]
        set: String,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Run the acceptance criteria against brute-force oracles.
    Selftest {
        #[arg(long, value_enum, default_value = "full")]
        level: LevelArg,
        /// Criteria to run, by number or name; all when absent.
        #[arg(long = "criterion")]
        criteria: Vec<String>,
    },
    /// Run an experiment grid from a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

/// The global flags that matter after the pool is built.
struct Globals {
    seed: Option<u64>,
    format: Option<Format>,
    out: Option<PathBuf>,
}

fn load_set(arg: &str) -> Result<GSet> {
    let desc: SetDescriptor = load_json(arg)?;
    desc.build().with_context(|| format!("building set from {arg}"))
}

fn set_inputs(set: &str, other: Option<&str>) -> Result<Inputs> {
    let a = load_set(set)?;
    let b = other.map(load_set).transpose()?;
    if let Some(b) = &b {
        a.same_group(b).context("--set and --other")?;
    }
    Ok(Inputs {
        group: Some(a.group().clone()),
        a: Some(a),
        b,
        s: None,
        map: None,
    })
}

fn empty_inputs() -> Inputs {
    Inputs {
        group: None,
        a: None,
        b: None,
        s: None,
        map: None,
    }
}

/// Builds the operation, its inputs and grid values for a one-shot command.
fn single(command: Command) -> Result<(Operation, Inputs, Option<Rational>, Option<usize>)> {
    Ok(match command {
        Command::Vcd { set, other, scope, cap } => (Operation::Vcd { scope, cap }, set_inputs(&set, other.as_deref())?, None, None),
        Command::Conv { set, other, backend } => (Operation::Conv { backend }, set_inputs(&set, other.as_deref())?, None, None),
        Command::Periods {
            set,
            other,
            scope,
            epsilon,
            exact,
            sample: _,
            bohr,
            d_hint,
            c_sample,
            retries,
            k,
        } => {
            let method = if exact { "exact" } else if bohr { "bohr" } else { "sample" };
            let mut inputs = set_inputs(&set, other.as_deref())?;
            inputs.s = scope.as_deref().map(load_set).transpose()?;
            let op = Operation::Periods {
                method: method.into(),
                c_sample,
                retries,
                k,
            };
            (op, inputs, Some(epsilon), d_hint)
        }
        Command::Bohr {
            group,
            freqs,
            radius,
            regular_dilate,
            check_size_bound,
        } => {
            let desc: GroupDesc = load_json(&group)?;
            let mut inputs = empty_inputs();
            inputs.group = Some(desc.build()?);
            let op = Operation::Bohr {
                freqs: parse_elements(&freqs)?,
                radius,
                regular_dilate,
                check_size_bound,
            };
            (op, inputs, None, None)
        }
        Command::Spectrum { set, threshold, chang } => (Operation::Spectrum { threshold, chang }, set_inputs(&set, None)?, None, None),
        Command::Regularity {
            set,
            epsilon,
            nu,
            subspace,
            d_hint,
        } => {
            let op = Operation::Regularity {
                method: if subspace { "subspace" } else { "bohr" }.into(),
                nu: if subspace { Rational::from_integer(0) } else { nu.unwrap_or(Rational::new(1, 2)) },
            };
            (op, set_inputs(&set, None)?, Some(epsilon), d_hint)
        }
        Command::Bogolyubov {
            set,
            subspace,
            doubling,
            d_hint,
        } => {
            let method = if doubling { "doubling" } else if subspace { "subspace" } else { "bohr" };
            (Operation::Bogolyubov { method: method.into() }, set_inputs(&set, None)?, None, d_hint)
        }
        Command::Model { set, s, max_attempts } => (Operation::Model { s, max_attempts }, set_inputs(&set, None)?, None, None),
        Command::FreimanCheck { map, s, trials } => {
            let desc: MapDescriptor = load_json(&map)?;
            let mut inputs = empty_inputs();
            inputs.map = Some(desc.build()?);
            (Operation::FreimanCheck { s, trials }, inputs, None, None)
        }
        Command::Stability { set, k, budget } => (Operation::Stability { k, budget }, set_inputs(&set, None)?, None, None),
        Command::Selftest { .. } | Command::Run { .. } => unreachable!("handled separately"),
    })
}

fn run_single(cli: &Globals, command: Command) -> Result<bool> {
    let (op, inputs, epsilon, d) = single(command)?;
    check_method(&op)?;
    let seed = cli.seed.unwrap_or(0);
    let cell = run_cell(0, &op, &inputs, CellParams { epsilon, d, seed });
    if let Some(e) = &cell.error {
        anyhow::bail!("{e}");
    }
    let failed: Vec<&str> = cell.checks.iter().filter(|c| c.hard && !c.passed).map(|c| c.name.as_str()).collect();
    for name in &failed {
        eprintln!("hard check failed: {name}");
    }
    let text = match cli.format.unwrap_or(Format::Json) {
        Format::Json => json_string(cell.result.as_ref().expect("ok cells carry a result"))?,
        Format::Csv => csv_string(&[Row::from_cell(&cell)])?,
    };
    emit(&text, cli.out.as_deref())?;
    Ok(failed.is_empty())
}

fn run_experiment(cli: &Globals, path: &Path) -> Result<bool> {
    let config = ExperimentConfig::load(path)?;
    let seed = cli.seed.or(config.seed).unwrap_or(0);
    let start = Instant::now();
    let report = vcgrp_cli::experiment::run(&config, seed)?;
    eprintln!(
        "{} cell(s), {} error(s), hard checks {} passed / {} failed, {:.2}s",
        report.summary.cells,
        report.summary.errors,
        report.summary.hard_checks_passed,
        report.summary.hard_checks_failed,
        start.elapsed().as_secs_f64()
    );
    let text = match cli.format.or(config.format).unwrap_or(Format::Json) {
        Format::Json => json_string(&report)?,
        Format::Csv => csv_string(&report.cells.iter().map(Row::from_cell).collect::<Vec<_>>())?,
    };
    emit(&text, cli.out.as_deref().or(config.output.as_deref()))?;
    Ok(report.summary.all_passed)
}

fn run_selftest(cli: &Globals, level: LevelArg, keys: &[String]) -> Result<bool> {
    let level = match level {
        LevelArg::Quick => Level::Quick,
        LevelArg::Full => Level::Full,
    };
    let ctx = Context::new(cli.seed.unwrap_or(DEFAULT_SEED), level);
    let results = if keys.is_empty() {
        run_all(&ctx, |r| eprintln!("{}", r.summary_line()))
    } else {
        let chosen = keys.iter().map(|k| vcgrp_selftest::find(k)).collect::<vcgrp_core::Result<Vec<_>>>()?;
        chosen
            .iter()
            .map(|c| {
                let r = vcgrp_selftest::run(c.as_ref(), &ctx);
                eprintln!("{}", r.summary_line());
                r
            })
            .collect()
    };
    let unexpected = unexpected_failures(&results);
    let passed = results.iter().filter(|r| r.passed).count();
    eprintln!("{passed}/{} criteria pass", results.len());
    for u in &unexpected {
        eprintln!("unexpected: {u}");
    }
    let text = match cli.format.unwrap_or(Format::Json) {
        Format::Json => json_string(&serde_json::json!({
            "level": level,
            "seed": ctx.seed,
            "results": results,
            "known_unattainable": KNOWN_UNATTAINABLE,
            "unexpected": unexpected,
        }))?,
        Format::Csv => csv_string(
            &results
                .iter()
                .map(|r| {
                    let ok = r.clauses.iter().filter(|c| c.passed).count();
                    Row {
                        operation: "selftest".into(),
                        cell: r.id as usize,
                        epsilon: String::new(),
                        d: String::new(),
                        seed: ctx.seed,
                        status: if r.passed { "pass" } else { "fail" }.into(),
                        metric: r.name.into(),
                        value: format!("{ok}/{}", r.clauses.len()),
                        hard_passed: ok,
                        hard_failed: r.clauses.len() - ok,
                        failed_checks: r.clauses.iter().filter(|c| !c.passed).map(|c| c.name).collect::<Vec<_>>().join(";"),
                        error: r.error.clone().unwrap_or_default(),
                    }
                })
                .collect::<Vec<_>>(),
        )?,
    };
    emit(&text, cli.out.as_deref())?;
    Ok(unexpected.is_empty())
}

fn dispatch(cli: Cli) -> Result<bool> {
    let Cli {
        seed,
        format,
        out,
        command,
        ..
    } = cli;
    let g = Globals { seed, format, out };
    match command {
        Command::Run { config } => run_experiment(&g, &config),
        Command::Selftest { level, criteria } => run_selftest(&g, level, &criteria),
        other => run_single(&g, other),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match cli.threads {
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build(),
        None => rayon::ThreadPoolBuilder::new().build(),
    };
    let pool = match pool {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    };
    match pool.install(|| dispatch(cli)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
