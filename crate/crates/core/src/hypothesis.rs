//! Tie-adapted bootstrap tests of exchangeability, radial symmetry,
//! extreme-value dependence and parametric goodness of fit, with their
//! non-adapted counterparts.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::copulas::{CopulaModel, Family};
use crate::empirical::kendall_tau_b;
use crate::error::{Error, Result};
use crate::estimation::{fit, Estimator, FitResult, TAU_CAP};
use crate::matrix::{DataMatrix, Matrix};
use crate::ranks::{
    impose_tie_structure, pseudo_observations, PseudoSample, RankMode, TieTemplate,
};
use crate::rng::SeedSpec;
use crate::special::norm_cdf;
use crate::statistics::{
    stat_qn, stat_rna, stat_rnc, stat_sn, stat_tn, tn_leave_one_out, StatisticName, StatisticValue,
};

/// Default bootstrap size for the resampling tests.
pub const DEFAULT_REPLICATES: usize = 1000;
/// Default number of samples behind the `T_n` bias estimate.
pub const DEFAULT_BIAS_SAMPLES: usize = 50;
/// Value returned by [`jackknife_sigma`] when the leave-one-out values do not
/// vary.
pub const SIGMA_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TestKind {
    #[serde(rename = "exch-cn")]
    ExchCn,
    #[serde(rename = "exch-an")]
    ExchAn,
    #[serde(rename = "radsym")]
    RadSym,
    #[serde(rename = "evdep")]
    EvDep,
    #[serde(rename = "gof")]
    GoF,
}

impl TestKind {
    pub const ALL: [TestKind; 5] = [
        TestKind::ExchCn,
        TestKind::ExchAn,
        TestKind::RadSym,
        TestKind::EvDep,
        TestKind::GoF,
    ];

    pub fn statistic(self) -> StatisticName {
        match self {
            TestKind::ExchCn => StatisticName::RnC,
            TestKind::ExchAn => StatisticName::RnA,
            TestKind::RadSym => StatisticName::Qn,
            TestKind::EvDep => StatisticName::Tn,
            TestKind::GoF => StatisticName::Sn,
        }
    }

    /// Smallest sample size accepted by the test.
    pub fn min_n(self) -> usize {
        match self {
            TestKind::GoF => 20,
            _ => 10,
        }
    }
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TestKind::ExchCn => "exch-cn",
            TestKind::ExchAn => "exch-an",
            TestKind::RadSym => "radsym",
            TestKind::EvDep => "evdep",
            TestKind::GoF => "gof",
        })
    }
}

impl FromStr for TestKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        TestKind::ALL
            .into_iter()
            .find(|k| k.to_string() == key)
            .ok_or_else(|| {
                Error::Usage(format!(
                    "unknown test '{s}' (expected exch-cn, exch-an, radsym, evdep or gof)"
                ))
            })
    }
}

/// Statistic used by the exchangeability test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExchangeabilityStatistic {
    RnC,
    RnA,
}

/// Called with `(replicate index, matrix the replicate statistic is computed
/// from)`.
pub type ReplicateObserver = Arc<dyn Fn(usize, &Matrix) + Send + Sync>;

/// Resampling settings shared by all tests.
#[derive(Clone)]
pub struct TestSettings {
    pub replicates: usize,
    pub seed: SeedSpec,
    pub adapted: bool,
    pub observer: Option<ReplicateObserver>,
}

impl fmt::Debug for TestSettings {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestSettings")
            .field("replicates", &self.replicates)
            .field("seed", &self.seed)
            .field("adapted", &self.adapted)
            .field("observer", &self.observer.is_some())
            .finish()
    }
}

impl TestSettings {
    pub fn new(replicates: usize, seed: SeedSpec, adapted: bool) -> Self {
        TestSettings {
            replicates,
            seed,
            adapted,
            observer: None,
        }
    }

    pub fn with_observer(mut self, observer: ReplicateObserver) -> Self {
        self.observer = Some(observer);
        self
    }

    fn observe(&self, k: usize, m: &Matrix) {
        if let Some(obs) = &self.observer {
            obs(k, m);
        }
    }

    fn check(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::domain("the number of replicates must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub test: TestKind,
    pub adapted: bool,
    pub statistic: StatisticValue,
    pub p_value: f64,
    pub replicates: usize,
    pub seed: SeedSpec,
    pub extras: BTreeMap<String, Value>,
}

/// `(#{k : rep_k >= stat} + 0.5) / (N + 1)`.
pub fn pvalue_combine(stat: f64, replicate_stats: &[f64]) -> Result<f64> {
    if replicate_stats.is_empty() {
        return Err(Error::domain("p-value needs at least one replicate"));
    }
    let hits = replicate_stats.iter().filter(|&&r| r >= stat).count();
    Ok((hits as f64 + 0.5) / (replicate_stats.len() as f64 + 1.0))
}

fn require_rows(kind: TestKind, n: usize) -> Result<()> {
    if n < kind.min_n() {
        return Err(Error::domain(format!(
            "the {kind} test needs at least {} observations, got {n}",
            kind.min_n()
        )));
    }
    Ok(())
}

fn require_bivariate(kind: TestKind, d: usize) -> Result<()> {
    if d != 2 {
        return Err(Error::capability(format!(
            "the {kind} test needs bivariate data, got d = {d}"
        )));
    }
    Ok(())
}

fn run_replicates(
    settings: &TestSettings,
    one: impl Fn(usize) -> Result<f64> + Sync + Send,
) -> Result<Vec<f64>> {
    (0..settings.replicates).into_par_iter().map(one).collect()
}

fn report(
    kind: TestKind,
    settings: &TestSettings,
    value: f64,
    n: usize,
    p_value: f64,
    extras: BTreeMap<String, Value>,
) -> TestReport {
    TestReport {
        test: kind,
        adapted: settings.adapted,
        statistic: StatisticValue {
            name: kind.statistic(),
            value,
            n,
        },
        p_value,
        replicates: settings.replicates,
        seed: settings.seed.clone(),
        extras,
    }
}

/// Ranks of a resampled matrix: through the tie template when adapted,
/// directly otherwise.
fn resample_ranks(
    m: &Matrix,
    template: &TieTemplate,
    adapted: bool,
    mode: RankMode,
) -> Result<PseudoSample> {
    if adapted {
        pseudo_observations(&impose_tie_structure(m, template)?, mode)
    } else {
        pseudo_observations(m, mode)
    }
}

/// Symmetrisation bootstrap shared by the exchangeability and radial
/// symmetry tests: `transform` perturbs each row of the pseudo-sample.
fn symmetry_test(
    data: &DataMatrix,
    kind: TestKind,
    settings: &TestSettings,
    statistic: impl Fn(&PseudoSample) -> Result<f64> + Sync + Send,
    transform: impl Fn(&mut [f64]) + Sync + Send,
) -> Result<TestReport> {
    settings.check()?;
    let n = data.nrows();
    require_rows(kind, n)?;
    let template = TieTemplate::from_data(data)?;
    let ps = pseudo_observations(data, RankMode::Average)?;
    let value = statistic(&ps)?;
    let reps = run_replicates(settings, |k| {
        let mut stream = settings.seed.derive(k as u64).stream();
        let mut m = ps.values().clone();
        for i in 0..n {
            if stream.bernoulli_half() {
                transform(m.row_mut(i));
            }
        }
        let resampled = resample_ranks(&m, &template, settings.adapted, RankMode::Average)?;
        settings.observe(k, resampled.values());
        statistic(&resampled)
    })?;
    let p = pvalue_combine(value, &reps)?;
    Ok(report(kind, settings, value, n, p, BTreeMap::new()))
}

/// Exchangeability test: each replicate swaps the coordinates of every row
/// with probability one half.
pub fn test_exchangeability(
    data: &DataMatrix,
    variant: ExchangeabilityStatistic,
    settings: &TestSettings,
) -> Result<TestReport> {
    let kind = match variant {
        ExchangeabilityStatistic::RnC => TestKind::ExchCn,
        ExchangeabilityStatistic::RnA => TestKind::ExchAn,
    };
    require_bivariate(kind, data.ncols())?;
    let swap = |row: &mut [f64]| row.swap(0, 1);
    match variant {
        ExchangeabilityStatistic::RnC => symmetry_test(data, kind, settings, stat_rnc, swap),
        ExchangeabilityStatistic::RnA => symmetry_test(data, kind, settings, stat_rna, swap),
    }
}

/// Radial symmetry test: each replicate reflects every row (`u -> 1 - u`)
/// with probability one half.
pub fn test_radial_symmetry(data: &DataMatrix, settings: &TestSettings) -> Result<TestReport> {
    symmetry_test(
        data,
        TestKind::RadSym,
        settings,
        |ps| Ok(stat_qn(ps)),
        |row| row.iter_mut().for_each(|u| *u = 1.0 - *u),
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JackknifeSigma {
    /// Estimated standard deviation of `√n T_n`.
    pub sigma: f64,
    /// Set when all leave-one-out values coincide and `sigma` is the floor.
    pub degenerate: bool,
}

fn jackknife_from(loo: &[f64]) -> JackknifeSigma {
    let n = loo.len() as f64;
    let mean = loo.iter().sum::<f64>() / n;
    let ss: f64 = loo.iter().map(|t| (t - mean).powi(2)).sum();
    let v = (n - 1.0) / n * ss;
    let sigma = (n * v).sqrt();
    if sigma > SIGMA_FLOOR {
        JackknifeSigma {
            sigma,
            degenerate: false,
        }
    } else {
        JackknifeSigma {
            sigma: SIGMA_FLOOR,
            degenerate: true,
        }
    }
}

/// Jackknife estimate of the standard deviation of `√n T_n`.
pub fn jackknife_sigma(data: &Matrix) -> Result<JackknifeSigma> {
    Ok(jackknife_from(&tn_leave_one_out(data)?))
}

/// Test of extreme-value dependence based on `T_n`. When adapted, the bias
/// of `T_n` under ties is estimated from Gumbel–Hougaard samples carrying the
/// data's tie structure.
pub fn test_evdep(data: &DataMatrix, settings: &TestSettings) -> Result<TestReport> {
    let kind = TestKind::EvDep;
    require_bivariate(kind, data.ncols())?;
    let n = data.nrows();
    require_rows(kind, n)?;
    let tau_b = kendall_tau_b(data)?;
    let value = stat_tn(data)?;
    let jack = jackknife_sigma(data)?;
    let mut extras = BTreeMap::new();
    let bias = if settings.adapted {
        settings.check()?;
        let template = TieTemplate::from_data(data)?;
        let theta = 1.0 / (1.0 - tau_b.clamp(0.0, TAU_CAP));
        let model = CopulaModel::Gumbel { theta, dim: 2 };
        extras.insert("bias_theta".into(), json!(theta));
        let values = run_replicates(settings, |k| {
            let mut stream = settings.seed.derive(k as u64).stream();
            let sample = model.sample(n, &mut stream)?;
            let tied = impose_tie_structure(&sample, &template)?;
            settings.observe(k, &tied);
            stat_tn(&tied)
        })?;
        values.iter().sum::<f64>() / values.len() as f64
    } else {
        0.0
    };
    let z = (n as f64).sqrt() * (value - bias).abs() / jack.sigma;
    let p = (2.0 * norm_cdf(-z)).clamp(f64::MIN_POSITIVE, 1.0);
    extras.insert("tau_b".into(), json!(tau_b));
    extras.insert("bias_hat".into(), json!(bias));
    extras.insert("sigma_hat".into(), json!(jack.sigma));
    extras.insert("sigma_degenerate".into(), json!(jack.degenerate));
    Ok(report(kind, settings, value, n, p, extras))
}

/// Fitted model and `S_n` for one (pseudo-)sample.
fn gof_statistic(
    ps_fit: &PseudoSample,
    ps_max: &PseudoSample,
    family: &Family,
    estimator: Estimator,
) -> Result<(FitResult, f64)> {
    let fitted = fit(ps_fit, family, estimator)?;
    let model = family.with_parameter(fitted.theta, ps_fit.dim())?;
    let value = stat_sn(ps_max, &model)?;
    Ok((fitted, value))
}

/// Parametric bootstrap goodness-of-fit test of a one-parameter family.
/// `S_n` is computed from maximal ranks. The adapted test estimates the
/// parameter from average ranks; the plain test, which knows nothing of
/// ties, uses the maximal-rank pseudo-sample for both. Replicates of the
/// plain test are continuous, so there the choice does not matter.
pub fn test_gof(
    data: &DataMatrix,
    family: &Family,
    estimator: Estimator,
    settings: &TestSettings,
) -> Result<TestReport> {
    let kind = TestKind::GoF;
    settings.check()?;
    require_bivariate(kind, data.ncols())?;
    let n = data.nrows();
    require_rows(kind, n)?;
    if !family.is_one_parameter() {
        return Err(Error::capability(format!(
            "goodness of fit needs a one-parameter family, got {family}"
        )));
    }
    let template = TieTemplate::from_data(data)?;
    let ps_avg = pseudo_observations(data, RankMode::Average)?;
    let ps_max = pseudo_observations(data, RankMode::Maximal)?;
    let ps_fit = if settings.adapted { &ps_avg } else { &ps_max };
    let (fitted, value) = gof_statistic(ps_fit, &ps_max, family, estimator)?;
    let model = family.with_parameter(fitted.theta, 2)?;

    let attempt = |k: usize, seed: &SeedSpec| -> Result<f64> {
        let sample = model.sample(n, &mut seed.stream())?;
        let avg = resample_ranks(&sample, &template, settings.adapted, RankMode::Average)?;
        let max = resample_ranks(&sample, &template, settings.adapted, RankMode::Maximal)?;
        settings.observe(k, max.values());
        Ok(gof_statistic(&avg, &max, family, estimator)?.1)
    };
    let reps = run_replicates(settings, |k| {
        let seed = settings.seed.derive(k as u64);
        match attempt(k, &seed) {
            Ok(v) => Ok(v),
            Err(first) => attempt(k, &seed.derive(1)).map_err(|second| Error::Fit {
                message: format!("estimation failed twice in bootstrap replicate {k}"),
                diagnostics: format!("first attempt: {first}; second attempt: {second}"),
            }),
        }
    })?;
    let p = pvalue_combine(value, &reps)?;
    let mut extras = BTreeMap::new();
    extras.insert("family".into(), json!(family.to_string()));
    extras.insert("estimator".into(), json!(estimator.to_string()));
    extras.insert("theta_n".into(), json!(fitted.theta));
    extras.insert("tau_clamped".into(), json!(fitted.tau_clamped));
    Ok(report(kind, settings, value, n, p, extras))
}

/// Test selection plus the options only some tests use.
#[derive(Debug, Clone, PartialEq)]
pub struct TestSpec {
    pub kind: TestKind,
    /// Hypothesised family (goodness of fit only).
    pub family: Option<Family>,
    pub estimator: Estimator,
}

impl TestSpec {
    pub fn new(kind: TestKind) -> Self {
        TestSpec {
            kind,
            family: None,
            estimator: Estimator::Mpl,
        }
    }

    pub fn gof(family: Family, estimator: Estimator) -> Self {
        TestSpec {
            kind: TestKind::GoF,
            family: Some(family),
            estimator,
        }
    }
}

/// Runs the test described by `spec`.
pub fn run_test(data: &DataMatrix, spec: &TestSpec, settings: &TestSettings) -> Result<TestReport> {
    match spec.kind {
        TestKind::ExchCn => test_exchangeability(data, ExchangeabilityStatistic::RnC, settings),
        TestKind::ExchAn => test_exchangeability(data, ExchangeabilityStatistic::RnA, settings),
        TestKind::RadSym => test_radial_symmetry(data, settings),
        TestKind::EvDep => test_evdep(data, settings),
        TestKind::GoF => {
            let family = spec.family.as_ref().ok_or_else(|| {
                Error::Usage("goodness of fit needs a hypothesised family".into())
            })?;
            test_gof(data, family, spec.estimator, settings)
        }
    }
}
