//! Property checks shared by the standalone property suite and the
//! acceptance runner.

#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use tiecop::copulas::Family;
use tiecop::empirical::PickandsCurve;
use tiecop::estimation::Estimator;
use tiecop::harness::{discretize, Bins};
use tiecop::hypothesis::{run_test, TestKind, TestReport, TestSettings, TestSpec};
use tiecop::ranks::{pseudo_observations, RankMode};
use tiecop::{CopulaModel, DataMatrix, Matrix, SeedSpec};

/// A data set described by a seed, a size and an optional number of levels
/// per margin.
#[derive(Debug, Clone, Copy)]
pub struct DataCase {
    pub seed: u64,
    pub n: usize,
    pub levels: Option<usize>,
}

impl DataCase {
    pub fn matrix(&self) -> Matrix {
        let model = CopulaModel::Gumbel { theta: 1.5, dim: 2 };
        let u = model
            .sample(self.n, &mut SeedSpec::new(self.seed).stream())
            .unwrap();
        match self.levels {
            Some(k) => discretize(&u, Bins::Finite(k), 1.0).unwrap(),
            None => u,
        }
    }

    pub fn data(&self) -> DataMatrix {
        DataMatrix::new(self.matrix()).unwrap()
    }
}

pub fn data_case() -> impl Strategy<Value = DataCase> {
    (any::<u64>(), 20usize..45, prop::option::of(3usize..12))
        .prop_map(|(seed, n, levels)| DataCase { seed, n, levels })
}

pub fn all_specs() -> Vec<TestSpec> {
    TestKind::ALL
        .iter()
        .map(|&k| match k {
            TestKind::GoF => TestSpec::gof(Family::Frank, Estimator::Mpl),
            other => TestSpec::new(other),
        })
        .collect()
}

fn run(
    data: &DataMatrix,
    spec: &TestSpec,
    replicates: usize,
    seed: u64,
    adapted: bool,
) -> Result<TestReport, TestCaseError> {
    let settings = TestSettings::new(replicates, SeedSpec::new(seed), adapted);
    run_test(data, spec, &settings).map_err(|e| TestCaseError::fail(format!("{spec:?}: {e}")))
}

/// Every p-value lies in (0, 1]; bootstrap p-values sit on the grid
/// `(m + 1/2) / (N + 1)`.
pub fn pvalue_range(case: DataCase, adapted: bool) -> Result<(), TestCaseError> {
    let data = case.data();
    let replicates = 19;
    for spec in all_specs() {
        let r = run(&data, &spec, replicates, case.seed, adapted)?;
        prop_assert!(
            r.p_value > 0.0 && r.p_value <= 1.0,
            "{:?}: p = {}",
            spec.kind,
            r.p_value
        );
        if spec.kind != TestKind::EvDep {
            let m = r.p_value * (replicates + 1) as f64 - 0.5;
            prop_assert!((m - m.round()).abs() < 1e-9 && m.round() <= replicates as f64);
        }
    }
    Ok(())
}

/// The same seed gives the same report.
pub fn same_seed(case: DataCase, adapted: bool) -> Result<(), TestCaseError> {
    let data = case.data();
    for spec in all_specs() {
        let a = run(&data, &spec, 9, case.seed, adapted)?;
        let b = run(&data, &spec, 9, case.seed, adapted)?;
        prop_assert_eq!(a, b);
    }
    Ok(())
}

/// Results do not depend on the number of worker threads.
pub fn scheduling(case: DataCase, threads: usize) -> Result<(), TestCaseError> {
    let data = case.data();
    let pool = |t: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .unwrap()
    };
    for spec in all_specs() {
        let one = pool(1).install(|| run(&data, &spec, 9, case.seed, true))?;
        let many = pool(threads).install(|| run(&data, &spec, 9, case.seed, true))?;
        prop_assert_eq!(one, many);
    }
    Ok(())
}

/// Strictly increasing transforms of the margins change no statistic or
/// p-value.
pub fn monotone_invariance(case: DataCase) -> Result<(), TestCaseError> {
    let m = case.matrix();
    let moved = Matrix::from_columns(&[
        m.column(0).iter().map(|x| x * x * x + 2.0 * x).collect(),
        m.column(1).iter().map(|x| (3.0 * x).exp() - 7.0).collect(),
    ])
    .unwrap();
    let (a, b) = (DataMatrix::new(m).unwrap(), DataMatrix::new(moved).unwrap());
    for spec in all_specs() {
        for adapted in [true, false] {
            let x = run(&a, &spec, 9, case.seed, adapted)?;
            let y = run(&b, &spec, 9, case.seed, adapted)?;
            prop_assert_eq!(x.statistic, y.statistic, "{:?}", spec.kind);
            prop_assert_eq!(x.p_value, y.p_value, "{:?}", spec.kind);
        }
    }
    Ok(())
}

/// The Pickands estimate stays inside `max(t, 1 - t) <= A(t) <= 1`.
pub fn pickands_envelope(case: DataCase) -> Result<(), TestCaseError> {
    let ps = pseudo_observations(&case.matrix(), RankMode::Average).unwrap();
    let curve = PickandsCurve::new(&ps).unwrap();
    for i in 0..=200 {
        let t = i as f64 / 200.0;
        let a = curve.evaluate(t);
        prop_assert!(a >= t.max(1.0 - t) && a <= 1.0, "A({t}) = {a}");
    }
    Ok(())
}

pub fn discretize_case() -> impl Strategy<Value = (u64, usize, f64)> {
    (any::<u64>(), 1usize..40, 0.2f64..4.0)
}

/// Discretizing bin centers returns them unchanged.
pub fn discretize_idempotent((seed, k, t): (u64, usize, f64)) -> Result<(), TestCaseError> {
    let mut s = SeedSpec::new(seed).stream();
    let values: Vec<f64> = (0..60).map(|_| 1.0 - s.uniform01()).collect();
    let m = Matrix::from_row_major(30, 2, values).unwrap();
    let once = discretize(&m, Bins::Finite(k), t).unwrap();
    let twice = discretize(&once, Bins::Finite(k), t).unwrap();
    prop_assert_eq!(once, twice);
    Ok(())
}
