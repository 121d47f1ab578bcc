//! Command-line front end: `test`, `simulate` and `experiment`.

pub mod config;
pub mod csv_io;

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::copulas::Family;
use crate::error::{Error, Result};
use crate::estimation::Estimator;
use crate::harness::{generate, run_experiment, write_summary, Bins};
use crate::hypothesis::{
    run_test, TestKind, TestReport, TestSettings, TestSpec, DEFAULT_BIAS_SAMPLES,
    DEFAULT_REPLICATES,
};
use crate::matrix::DataMatrix;
use crate::rng::SeedSpec;

pub use config::parse_config;
pub use csv_io::{read_dataset, write_matrix, Dataset};

#[derive(Debug, Parser)]
#[command(
    name = "tiecop",
    version,
    about = "Rank-based copula tests that stay valid under ties"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one test on a CSV data set.
    Test(TestArgs),
    /// Print a (possibly discretized) copula sample as CSV.
    Simulate(SimulateArgs),
    /// Run the Monte Carlo cells of a configuration file.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Args)]
pub struct TestArgs {
    /// exch-cn, exch-an, radsym, evdep or gof.
    #[arg(long = "test")]
    pub kind: TestKind,
    /// Hypothesised family for gof (clayton, gumbel, frank, plackett,
    /// normal, t<df>, surv:<family>).
    #[arg(long)]
    pub family: Option<Family>,
    #[arg(long, default_value = "mpl")]
    pub estimator: Estimator,
    /// Bootstrap replicates; for evdep, samples behind the bias estimate
    /// [default: 1000, evdep 50].
    #[arg(long = "n-boot")]
    pub n_boot: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Use the tie-adapted procedure (default).
    #[arg(long, overrides_with = "no_adapted")]
    pub adapted: bool,
    /// Use the procedure that ignores ties.
    #[arg(long = "no-adapted", overrides_with = "adapted")]
    pub no_adapted: bool,
    /// One-based column indices to use, e.g. `1,2`.
    #[arg(long, value_delimiter = ',')]
    pub columns: Option<Vec<usize>>,
    /// Print the report as JSON.
    #[arg(long)]
    pub json: bool,
    /// CSV file, or `-` for standard input.
    pub data: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Copula family, e.g. gumbel or khoudraji(independence,normal,0.2,0.95).
    #[arg(long)]
    pub family: Family,
    /// Kendall's tau (of each parent for Khoudraji's device).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub tau: f64,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Bins per margin, or `inf` for no discretization.
    #[arg(long, default_value = "inf")]
    pub k: Bins,
    /// Bin exponent: boundaries are (i/k)^t.
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Configuration file.
    pub config: PathBuf,
    /// Directory for `summary.csv` and the per-cell records files.
    #[arg(long, default_value = "results")]
    pub out: PathBuf,
    /// Worker threads [default: all cores].
    #[arg(long)]
    pub jobs: Option<usize>,
}

/// Executes a parsed command line, writing results to `out` and progress
/// to `err`.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Test(a) => cmd_test(a, out),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::Experiment(a) => cmd_experiment(a, out, err),
    }
}

fn load_dataset(path: &Path) -> Result<Dataset> {
    if path == Path::new("-") {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text)?;
        read_dataset(text.as_bytes())
    } else {
        let file = fs::File::open(path)
            .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
        read_dataset(io::BufReader::new(file))
    }
}

pub fn cmd_test(a: TestArgs, out: &mut dyn Write) -> Result<()> {
    let mut data = load_dataset(&a.data)?;
    if let Some(cols) = &a.columns {
        if cols.contains(&0) {
            return Err(Error::Usage("column indices are one-based".into()));
        }
        let zero_based: Vec<usize> = cols.iter().map(|c| c - 1).collect();
        data = data.select(&zero_based)?;
    }
    let d = data.values.ncols();
    if a.kind != TestKind::RadSym && d != 2 {
        return Err(Error::Usage(format!(
            "the {} test needs two columns but the data have {d}; choose them with --columns",
            a.kind
        )));
    }
    let spec = match (a.kind, a.family) {
        (TestKind::GoF, Some(f)) => TestSpec::gof(f, a.estimator),
        (TestKind::GoF, None) => return Err(Error::Usage("--test gof needs --family".into())),
        (_, Some(_)) => return Err(Error::Usage("--family only applies to --test gof".into())),
        (kind, None) => TestSpec::new(kind),
    };
    let default_boot = if a.kind == TestKind::EvDep {
        DEFAULT_BIAS_SAMPLES
    } else {
        DEFAULT_REPLICATES
    };
    let replicates = a.n_boot.unwrap_or(default_boot);
    if replicates == 0 {
        return Err(Error::Usage("--n-boot must be positive".into()));
    }
    let settings = TestSettings::new(replicates, SeedSpec::new(a.seed), !a.no_adapted);
    let matrix = DataMatrix::new(data.values)?;
    let report = run_test(&matrix, &spec, &settings)?;
    if a.json {
        let text = serde_json::to_string_pretty(&report).map_err(|e| Error::Io(e.into()))?;
        writeln!(out, "{text}")?;
    } else {
        write_report(out, &report)?;
    }
    Ok(())
}

fn write_report(out: &mut dyn Write, r: &TestReport) -> Result<()> {
    writeln!(out, "test: {}", r.test)?;
    writeln!(out, "adapted: {}", r.adapted)?;
    writeln!(
        out,
        "statistic: {} = {}",
        r.statistic.name, r.statistic.value
    )?;
    writeln!(out, "n: {}", r.statistic.n)?;
    writeln!(out, "p_value: {}", r.p_value)?;
    writeln!(out, "replicates: {}", r.replicates)?;
    writeln!(out, "seed: {}", r.seed)?;
    for (k, v) in &r.extras {
        match v.as_str() {
            Some(s) => writeln!(out, "{k}: {s}")?,
            None => writeln!(out, "{k}: {v}")?,
        }
    }
    Ok(())
}

pub fn cmd_simulate(a: SimulateArgs, out: &mut dyn Write) -> Result<()> {
    let usage = |e: Error| match e {
        Error::Domain(m) | Error::Capability(m) => Error::Usage(m),
        other => other,
    };
    if a.n < 1 {
        return Err(Error::Usage("--n must be positive".into()));
    }
    let model = a.family.model_from_tau(a.tau, a.dim).map_err(usage)?;
    let mut stream = SeedSpec::new(a.seed).stream();
    let sample = generate(&model, a.n, a.k, a.t, &mut stream).map_err(usage)?;
    write_matrix(out, &sample)
}

pub fn cmd_experiment(a: ExperimentArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let text = fs::read_to_string(&a.config)
        .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", a.config.display())))?;
    let cells = parse_config(&text)?;
    if a.jobs == Some(0) {
        return Err(Error::Usage("--jobs must be positive".into()));
    }
    fs::create_dir_all(&a.out)?;
    let mut results = Vec::with_capacity(cells.len());
    for cell in &cells {
        let records = a.out.join(format!("{}.records.csv", cell.name));
        let r = run_experiment(cell, Some(&records), a.jobs)?;
        writeln!(
            err,
            "{}: {:.1}% [{:.1}, {:.1}] over {} reps ({} failed) in {:.1}s",
            cell.name,
            100.0 * r.rejection_rate,
            100.0 * r.wilson_ci.0,
            100.0 * r.wilson_ci.1,
            r.reps_completed,
            r.reps_failed,
            r.wall_time.as_secs_f64()
        )?;
        results.push(r);
    }
    write_summary(fs::File::create(a.out.join("summary.csv"))?, &results)?;
    write_summary(out, &results)
}
