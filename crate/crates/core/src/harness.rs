//! Data generation by discretizing copula samples, and Monte Carlo
//! experiments measuring rejection rates.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::copulas::{CopulaModel, Family};
use crate::error::{Error, Result};
use crate::hypothesis::{run_test, TestSettings, TestSpec};
use crate::matrix::{DataMatrix, Matrix};
use crate::rng::{SeedSpec, Stream};

/// Number of bins per margin, or no discretization at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Bins {
    Finite(usize),
    Infinite,
}

impl fmt::Display for Bins {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bins::Finite(k) => write!(f, "{k}"),
            Bins::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Bins {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if matches!(s.to_ascii_lowercase().as_str(), "inf" | "infinity" | "∞") {
            return Ok(Bins::Infinite);
        }
        match s.parse::<usize>() {
            Ok(k) if k >= 1 => Ok(Bins::Finite(k)),
            _ => Err(Error::Usage(format!(
                "number of bins must be a positive integer or 'inf', got '{s}'"
            ))),
        }
    }
}

/// Replaces each entry by the center of its bin `(a_m, a_{m+1}]`, where
/// `a_i = (i/k)^t`.
pub fn discretize(sample: &Matrix, bins: Bins, t: f64) -> Result<Matrix> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(format!(
            "bin exponent t must be positive, got {t}"
        )));
    }
    if let Some(bad) = sample.as_slice().iter().find(|&&u| !(u > 0.0 && u <= 1.0)) {
        return Err(Error::domain(format!(
            "values to discretize must lie in (0, 1], got {bad}"
        )));
    }
    let k = match bins {
        Bins::Infinite => return Ok(sample.clone()),
        Bins::Finite(0) => return Err(Error::domain("number of bins must be positive")),
        Bins::Finite(k) => k,
    };
    let edges: Vec<f64> = (0..=k).map(|i| (i as f64 / k as f64).powf(t)).collect();
    // (i^t + (i+1)^t) / (2 k^t) is exact for t = 1
    let scale = 2.0 * (k as f64).powf(t);
    let centers: Vec<f64> = (0..k)
        .map(|i| ((i as f64).powf(t) + ((i + 1) as f64).powf(t)) / scale)
        .collect();
    Ok(sample.map(|u| {
        let guess = (k as f64 * u.powf(1.0 / t)).ceil() as usize;
        let mut m = guess.clamp(1, k) - 1;
        while m > 0 && u <= edges[m] {
            m -= 1;
        }
        while m + 1 < k && u > edges[m + 1] {
            m += 1;
        }
        centers[m]
    }))
}

/// Draws `n` observations from `model` and discretizes them.
pub fn generate(
    model: &CopulaModel,
    n: usize,
    bins: Bins,
    t: f64,
    stream: &mut Stream,
) -> Result<Matrix> {
    let sample = model.sample(n, stream)?;
    discretize(&sample, bins, t)
}

/// 95% Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    const Z: f64 = 1.959_963_984_540_054;
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z * Z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    (
        (center - half).max(0.0).min(p),
        (center + half).min(1.0).max(p),
    )
}

/// One cell of a Monte Carlo design.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    /// Data-generating family; for Khoudraji's device `tau` applies to each
    /// parent.
    pub family: Family,
    pub tau: f64,
    pub dim: usize,
    pub n: usize,
    pub bins: Bins,
    pub t: f64,
    pub test: TestSpec,
    pub adapted: bool,
    /// Bootstrap replicates per test (bias samples for the extreme-value
    /// test).
    pub replicates: usize,
    pub reps: usize,
    pub alpha: f64,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::Usage(format!(
                "{}: reps must be at least 1",
                self.name
            )));
        }
        if self.replicates == 0 {
            return Err(Error::Usage(format!(
                "{}: the number of replicates must be positive",
                self.name
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Usage(format!(
                "{}: alpha must lie in (0, 1)",
                self.name
            )));
        }
        if !(self.t > 0.0 && self.t.is_finite()) {
            return Err(Error::Usage(format!("{}: t must be positive", self.name)));
        }
        if self.bins == Bins::Finite(0) {
            return Err(Error::Usage(format!("{}: k must be at least 1", self.name)));
        }
        self.model().map(|_| ())
    }

    pub fn model(&self) -> Result<CopulaModel> {
        self.family.model_from_tau(self.tau, self.dim)
    }

    fn rep_seed(&self, rep: usize) -> SeedSpec {
        SeedSpec::new(self.seed).derive(rep as u64)
    }

    /// Runs repetition `rep`: draws its data set and applies the test.
    pub fn run_rep(&self, model: &CopulaModel, rep: usize) -> Result<RepRecord> {
        let seed = self.rep_seed(rep);
        let data = generate(
            model,
            self.n,
            self.bins,
            self.t,
            &mut seed.derive(0).stream(),
        )?;
        let data = DataMatrix::new(data)?;
        let settings = TestSettings::new(self.replicates, seed.derive(1), self.adapted);
        let report = run_test(&data, &self.test, &settings)?;
        Ok(RepRecord {
            rep,
            seed_path: seed.to_string(),
            statistic: report.statistic.value,
            p_value: report.p_value,
            reject: report.p_value <= self.alpha,
        })
    }

    fn test_label(&self) -> String {
        match &self.test.family {
            Some(f) => format!("{}:{}:{}", self.test.kind, f, self.test.estimator),
            None => self.test.kind.to_string(),
        }
    }
}

/// One line of the per-repetition results file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepRecord {
    pub rep: usize,
    pub seed_path: String,
    pub statistic: f64,
    pub p_value: f64,
    pub reject: bool,
}

pub const RECORDS_HEADER: &str = "rep,seed_path,statistic,p_value,reject";

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub rejection_rate: f64,
    pub wilson_ci: (f64, f64),
    pub reps_completed: usize,
    pub reps_failed: usize,
    pub wall_time: Duration,
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    Error::Parse {
        line,
        column: 0,
        message: format!("{}: {e}", path.display()),
    }
}

/// Reads completed records, dropping a trailing partial line left by an
/// interrupted write.
pub fn read_records(path: &Path) -> Result<BTreeMap<usize, RepRecord>> {
    let mut text = fs::read_to_string(path)?;
    if !text.ends_with('\n') {
        let keep = text.rfind('\n').map_or(0, |i| i + 1);
        text.truncate(keep);
        fs::write(path, &text)?;
    }
    let mut records = BTreeMap::new();
    if text.is_empty() {
        return Ok(records);
    }
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| csv_error(path, e))?;
    if header.iter().collect::<Vec<_>>().join(",") != RECORDS_HEADER {
        return Err(Error::Parse {
            line: 1,
            column: 0,
            message: format!("{}: expected header '{RECORDS_HEADER}'", path.display()),
        });
    }
    for row in reader.deserialize::<RepRecord>() {
        let r = row.map_err(|e| csv_error(path, e))?;
        records.entry(r.rep).or_insert(r);
    }
    Ok(records)
}

fn format_record(r: &RepRecord) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    w.serialize(r)
        .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn open_records(path: &Path) -> Result<File> {
    let fresh = !path.exists() || fs::metadata(path)?.len() == 0;
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    if fresh {
        writeln!(file, "{RECORDS_HEADER}")?;
    }
    Ok(file)
}

/// Runs every repetition of `cfg` on `jobs` worker threads (all available
/// when `None`). With a records file, completed repetitions are appended as
/// they finish and repetitions already present are not rerun.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    records: Option<&Path>,
    jobs: Option<usize>,
) -> Result<ExperimentResult> {
    cfg.validate()?;
    let start = Instant::now();
    let model = cfg.model()?;
    let mut done = match records {
        Some(p) if p.exists() => read_records(p)?,
        _ => BTreeMap::new(),
    };
    if let Some(extra) = done.keys().find(|&&r| r >= cfg.reps) {
        return Err(Error::domain(format!(
            "records file holds repetition {extra} but the experiment has only {} repetitions",
            cfg.reps
        )));
    }
    let writer = match records {
        Some(p) => Some(Mutex::new(open_records(p)?)),
        None => None,
    };
    let pending: Vec<usize> = (0..cfg.reps).filter(|r| !done.contains_key(r)).collect();
    let run = || -> Vec<(usize, Result<RepRecord>)> {
        pending
            .par_iter()
            .map(|&rep| {
                let outcome = cfg.run_rep(&model, rep).and_then(|rec| {
                    if let Some(w) = &writer {
                        let line = format_record(&rec)?;
                        let mut f = w.lock().expect("records writer poisoned");
                        f.write_all(line.as_bytes())?;
                        f.flush()?;
                    }
                    Ok(rec)
                });
                (rep, outcome)
            })
            .collect()
    };
    let outcomes = match jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|e| Error::Usage(format!("cannot start {j} worker threads: {e}")))?
            .install(run),
        None => run(),
    };
    let mut failures = Vec::new();
    for (rep, outcome) in outcomes {
        match outcome {
            Ok(rec) => {
                done.insert(rep, rec);
            }
            Err(e) => failures.push((rep, e)),
        }
    }
    // more than 1% failed repetitions invalidates the cell
    if failures.len() * 100 > cfg.reps {
        let (rep, e) = failures.swap_remove(0);
        return Err(Error::Degenerate(format!(
            "{}: {} of {} repetitions failed (first, repetition {rep}: {e})",
            cfg.name,
            failures.len() + 1,
            cfg.reps
        )));
    }
    let completed = done.len();
    let rejections = done.values().filter(|r| r.reject).count();
    let rate = if completed == 0 {
        0.0
    } else {
        rejections as f64 / completed as f64
    };
    Ok(ExperimentResult {
        config: cfg.clone(),
        rejection_rate: rate,
        wilson_ci: wilson_interval(rejections, completed),
        reps_completed: completed,
        reps_failed: failures.len(),
        wall_time: start.elapsed(),
    })
}

pub const SUMMARY_HEADER: [&str; 10] = [
    "family",
    "tau",
    "n",
    "k",
    "t",
    "test",
    "adapted",
    "rejection_pct",
    "ci_lo",
    "ci_hi",
];

/// Writes one summary row per experiment cell.
pub fn write_summary<W: Write>(out: W, results: &[ExperimentResult]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(SUMMARY_HEADER).map_err(io)?;
    for r in results {
        let c = &r.config;
        w.write_record([
            c.family.to_string(),
            c.tau.to_string(),
            c.n.to_string(),
            c.bins.to_string(),
            c.t.to_string(),
            c.test_label(),
            c.adapted.to_string(),
            format!("{:.1}", 100.0 * r.rejection_rate),
            format!("{:.1}", 100.0 * r.wilson_ci.0),
            format!("{:.1}", 100.0 * r.wilson_ci.1),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}
