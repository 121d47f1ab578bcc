//! Experiment configuration files.
//!
//! UTF-8 text of `key = value` lines. Keys before the first `[name]` section
//! header are defaults for every cell; each section defines one cell. Blank
//! lines and lines starting with `#` are ignored.
//!
//! | key        | meaning                                        | default |
//! |------------|------------------------------------------------|---------|
//! | family     | data-generating family                         | -       |
//! | tau        | Kendall's tau of the data-generating copula    | 0       |
//! | dim        | dimension                                      | 2       |
//! | n          | sample size                                    | -       |
//! | k          | bins per margin, or `inf`                      | inf     |
//! | t          | bin exponent                                   | 1       |
//! | test       | exch-cn, exch-an, radsym, evdep or gof         | -       |
//! | hypothesis | family under the null (gof only)               | -       |
//! | estimator  | itau or mpl (gof only)                         | mpl     |
//! | adapted    | true or false                                  | true    |
//! | n_boot     | bootstrap replicates (bias samples for evdep)  | 1000/50 |
//! | reps       | Monte Carlo repetitions                        | 1000    |
//! | alpha      | significance level                             | 0.05    |
//! | seed       | master seed                                    | 1       |

use std::collections::BTreeMap;

use crate::copulas::Family;
use crate::error::{Error, Result};
use crate::estimation::Estimator;
use crate::harness::{Bins, ExperimentConfig};
use crate::hypothesis::{TestKind, TestSpec, DEFAULT_BIAS_SAMPLES, DEFAULT_REPLICATES};

const KEYS: [&str; 14] = [
    "family",
    "tau",
    "dim",
    "n",
    "k",
    "t",
    "test",
    "hypothesis",
    "estimator",
    "adapted",
    "n_boot",
    "reps",
    "alpha",
    "seed",
];

/// A value together with the line it came from.
type Entries = BTreeMap<String, (String, usize)>;

fn usage(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Usage(format!("config line {line}: {msg}"))
}

/// Parses a configuration into one experiment per section.
pub fn parse_config(text: &str) -> Result<Vec<ExperimentConfig>> {
    let mut globals = Entries::new();
    let mut sections: Vec<(String, usize, Entries)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| usage(line_no, "section header must end with ']'"))?
                .trim();
            if name.is_empty()
                || !name
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
            {
                return Err(usage(
                    line_no,
                    format!("section name '{name}' must be non-empty and use only letters, digits, '-', '_' or '.'"),
                ));
            }
            if sections.iter().any(|(n, _, _)| n == name) {
                return Err(usage(line_no, format!("duplicate section '{name}'")));
            }
            sections.push((name.to_string(), line_no, Entries::new()));
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| usage(line_no, "expected 'key = value'"))?;
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(usage(line_no, format!("unknown key '{key}'")));
        }
        let target = match sections.last_mut() {
            Some((_, _, entries)) => entries,
            None => &mut globals,
        };
        if target
            .insert(key.to_string(), (value.to_string(), line_no))
            .is_some()
        {
            return Err(usage(line_no, format!("key '{key}' given twice")));
        }
    }
    if sections.is_empty() {
        return Err(Error::Usage("config defines no experiment cells".into()));
    }
    sections
        .into_iter()
        .map(|(name, line, entries)| {
            let mut merged = globals.clone();
            merged.extend(entries);
            build_cell(name, line, &merged)
        })
        .collect()
}

fn get<T: std::str::FromStr>(entries: &Entries, key: &str, cell: &str) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    match entries.get(key) {
        None => Ok(None),
        Some((v, l)) => v
            .parse::<T>()
            .map(Some)
            .map_err(|e| usage(*l, format!("[{cell}] invalid value '{v}' for '{key}': {e}"))),
    }
}

fn require<T: std::str::FromStr>(entries: &Entries, key: &str, cell: &str, line: usize) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    get(entries, key, cell)?
        .ok_or_else(|| usage(line, format!("[{cell}] missing required key '{key}'")))
}

fn build_cell(name: String, line: usize, e: &Entries) -> Result<ExperimentConfig> {
    let cell = name.as_str();
    let kind: TestKind = require(e, "test", cell, line)?;
    let estimator: Estimator = get(e, "estimator", cell)?.unwrap_or(Estimator::Mpl);
    let hypothesis: Option<Family> = get(e, "hypothesis", cell)?;
    let test = match (kind, hypothesis) {
        (TestKind::GoF, Some(f)) => TestSpec::gof(f, estimator),
        (TestKind::GoF, None) => {
            return Err(usage(
                line,
                format!("[{cell}] the gof test needs a 'hypothesis' family"),
            ))
        }
        (_, Some(_)) => {
            return Err(usage(
                line,
                format!("[{cell}] 'hypothesis' only applies to the gof test"),
            ))
        }
        (_, None) => TestSpec::new(kind),
    };
    let default_boot = if kind == TestKind::EvDep {
        DEFAULT_BIAS_SAMPLES
    } else {
        DEFAULT_REPLICATES
    };
    let cfg = ExperimentConfig {
        family: require(e, "family", cell, line)?,
        tau: get(e, "tau", cell)?.unwrap_or(0.0),
        dim: get(e, "dim", cell)?.unwrap_or(2),
        n: require(e, "n", cell, line)?,
        bins: get(e, "k", cell)?.unwrap_or(Bins::Infinite),
        t: get(e, "t", cell)?.unwrap_or(1.0),
        test,
        adapted: get(e, "adapted", cell)?.unwrap_or(true),
        replicates: get(e, "n_boot", cell)?.unwrap_or(default_boot),
        reps: get(e, "reps", cell)?.unwrap_or(1000),
        alpha: get(e, "alpha", cell)?.unwrap_or(0.05),
        seed: get(e, "seed", cell)?.unwrap_or(1),
        name,
    };
    cfg.validate().map_err(|err| match err {
        Error::Usage(m) => usage(line, m),
        other => usage(line, format!("[{}] {other}", cfg.name)),
    })?;
    Ok(cfg)
}
