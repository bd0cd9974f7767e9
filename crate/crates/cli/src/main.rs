//! `lpmult`: verification suites, multiplier sweeps and norm tables.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 usage or
//! configuration error.

mod config;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use lpmult::dyadic::{build_family, max_levels};
use lpmult::grid::{make_grid, sample_family, SampledField};
use lpmult::multiplier::operator_norm_sweep;
use lpmult::report::{write_rows, Format};
use lpmult::verify::{parse_suite, run_suite, Check};

use config::{ConstantField, FieldEntry, RunConfig};

#[derive(Parser)]
#[command(
    name = "lpmult",
    version,
    about = "Weighted Littlewood-Paley experiments on periodic grids"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (default: the config's output.path, else stdout)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Worker threads (default: all cores); results do not depend on it
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Seed override for randomized families
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run an invariant suite: grid, dyadic, norms, paraproduct, maximal, embeddings or all
    Verify { suite: String },
    /// Operator-norm sweep for multiplication by the half-space indicator
    Sweep,
    /// Norm table for the configured fields and spaces
    Norm,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

enum Failure {
    /// Usage and configuration errors, exit code 2.
    Usage(anyhow::Error),
    Checks,
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

fn usage(e: anyhow::Error) -> Failure {
    Failure::Usage(e)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> std::result::Result<(), Failure> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path).map_err(usage)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let format: Format = cli
        .format
        .map(Format::from)
        .or(cfg.output.format)
        .unwrap_or(Format::Csv);
    let out = cli.out.clone().or_else(|| cfg.output.path.clone());
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(usage(anyhow::anyhow!("--workers must be at least 1")));
        }
        builder = builder.num_threads(w);
    }
    let pool = builder.build().context("building worker pool")?;
    pool.install(|| match &cli.command {
        Command::Verify { suite } => cmd_verify(suite, format, out.as_deref()),
        Command::Sweep => cmd_sweep(&cfg, format, out.as_deref()),
        Command::Norm => cmd_norm(&cfg, out.as_deref()),
    })
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn cmd_verify(suite: &str, format: Format, out: Option<&Path>) -> std::result::Result<(), Failure> {
    let suite = parse_suite(suite).map_err(|e| usage(e.into()))?;
    let checks = run_suite(suite).context("running suite")?;
    for c in &checks {
        println!(
            "{} {}/{}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.suite,
            c.name,
            c.detail
        );
    }
    let failed: Vec<&Check> = checks.iter().filter(|c| !c.passed).collect();
    println!("{} checks, {} failed", checks.len(), failed.len());
    if let Some(path) = out {
        let mut w = open_out(Some(path))?;
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut w, &checks).context("writing checks")?;
                writeln!(w).context("writing checks")?;
            }
            Format::Csv => {
                writeln!(w, "suite,name,passed,detail").context("writing checks")?;
                for c in &checks {
                    writeln!(
                        w,
                        "{},{},{},\"{}\"",
                        c.suite,
                        c.name,
                        c.passed,
                        c.detail.replace('"', "\"\"")
                    )
                    .context("writing checks")?;
                }
            }
        }
        w.flush().context("writing checks")?;
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn cmd_sweep(cfg: &RunConfig, format: Format, out: Option<&Path>) -> std::result::Result<(), Failure> {
    let sweep = cfg.sweep_config();
    sweep.validate().map_err(|e| usage(e.into()))?;
    let report = operator_norm_sweep(&sweep).context("running sweep")?;
    let mut w = open_out(out)?;
    write_rows(&report.rows, format, &mut w).context("writing report")?;
    w.flush().context("writing report")?;
    Ok(())
}

fn field_on(entry: &FieldEntry, grid: &lpmult::grid::GridSpec, seed: u64) -> Result<SampledField> {
    Ok(match entry {
        FieldEntry::Constant(ConstantField::Constant { value }) => SampledField::from_real_fn(*grid, |_| *value)?,
        FieldEntry::Family(kind) => sample_family(kind, grid, seed)?,
    })
}

fn cmd_norm(cfg: &RunConfig, out: Option<&Path>) -> std::result::Result<(), Failure> {
    let mut w = open_out(out)?;
    writeln!(w, "field,space,N,norm").context("writing table")?;
    for &n in &cfg.grid.n {
        let grid = make_grid(cfg.grid.dim, cfg.grid.half_width, n).context("grid")?;
        let fam = build_family(&grid, cfg.grid.levels.unwrap_or_else(|| max_levels(&grid))).context("family")?;
        for entry in &cfg.norm.fields {
            let f = field_on(entry, &grid, cfg.seed).map_err(usage)?;
            for sp in &cfg.norm.spaces {
                let v = sp
                    .norm(&f, &fam)
                    .with_context(|| format!("{} of {}", sp.label(), entry.id()))?;
                writeln!(w, "\"{}\",\"{}\",{n},{v}", entry.id(), sp.label()).context("writing table")?;
            }
        }
    }
    w.flush().context("writing table")?;
    Ok(())
}
