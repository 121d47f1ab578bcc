//! Test statistics: `R_nC` and `R_nA` (exchangeability), `Q_n` (radial
//! symmetry), `T_n` (extreme-value dependence) and `S_n` (goodness of fit).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::copulas::CopulaModel;
use crate::empirical::{reflected_le, PickandsCurve};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::ranks::PseudoSample;

/// Number of Simpson nodes used for the `R_nA` integral.
pub const RNA_NODES: usize = 1001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StatisticName {
    RnC,
    RnA,
    Qn,
    Tn,
    Sn,
}

impl fmt::Display for StatisticName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StatisticName::RnC => "R_nC",
            StatisticName::RnA => "R_nA",
            StatisticName::Qn => "Q_n",
            StatisticName::Tn => "T_n",
            StatisticName::Sn => "S_n",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatisticValue {
    pub name: StatisticName,
    pub value: f64,
    pub n: usize,
}

fn require_bivariate(what: &str, d: usize) -> Result<()> {
    if d != 2 {
        return Err(Error::capability(format!(
            "{what} needs bivariate data, got d = {d}"
        )));
    }
    Ok(())
}

/// `Σ_i {C_n(Û_i1, Û_i2) - C_n(Û_i2, Û_i1)}²`.
pub fn stat_rnc(ps: &PseudoSample) -> Result<f64> {
    require_bivariate("R_nC", ps.dim())?;
    let m = ps.values();
    let n = ps.n();
    let mut total = 0.0;
    for i in 0..n {
        let (a, b) = (m.get(i, 0), m.get(i, 1));
        let mut diff = 0i64;
        for k in 0..n {
            let (x, y) = (m.get(k, 0), m.get(k, 1));
            diff += i64::from(x <= a && y <= b) - i64::from(x <= b && y <= a);
        }
        let d = diff as f64 / n as f64;
        total += d * d;
    }
    Ok(total)
}

/// `n ∫_0^1 {A_n(t) - A_n(1 - t)}² dt` by composite Simpson on
/// [`RNA_NODES`] nodes.
pub fn stat_rna(ps: &PseudoSample) -> Result<f64> {
    stat_rna_with_nodes(ps, RNA_NODES)
}

/// [`stat_rna`] with a custom (odd) number of Simpson nodes.
pub fn stat_rna_with_nodes(ps: &PseudoSample, nodes: usize) -> Result<f64> {
    require_bivariate("R_nA", ps.dim())?;
    if nodes < 3 || nodes.is_multiple_of(2) {
        return Err(Error::domain(format!(
            "Simpson's rule needs an odd node count >= 3, got {nodes}"
        )));
    }
    let curve = PickandsCurve::new(ps)?;
    let intervals = nodes - 1;
    let a: Vec<f64> = (0..nodes)
        .map(|k| curve.evaluate(k as f64 / intervals as f64))
        .collect();
    let mut sum = 0.0;
    for k in 0..nodes {
        let g = (a[k] - a[intervals - k]).powi(2);
        let w = if k == 0 || k == intervals {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        sum += w * g;
    }
    let integral = sum / (3.0 * intervals as f64);
    Ok(ps.n() as f64 * integral)
}

/// `C_n` evaluated at each pseudo-observation.
fn empirical_copula_at_sample(m: &Matrix) -> Vec<f64> {
    let n = m.nrows();
    (0..n)
        .map(|i| {
            let u = m.row(i);
            let hits = m
                .rows()
                .filter(|r| r.iter().zip(u).all(|(x, y)| x <= y))
                .count();
            hits as f64 / n as f64
        })
        .collect()
}

/// `Σ_i {C_n(Û_i) - C̄_n(Û_i)}²`, with `C̄_n` the empirical distribution of
/// `1 - Û`.
pub fn stat_qn(ps: &PseudoSample) -> f64 {
    let m = ps.values();
    let n = ps.n();
    let mut total = 0.0;
    for i in 0..n {
        let u = m.row(i);
        let mut diff = 0i64;
        for row in m.rows() {
            let below = row.iter().zip(u).all(|(x, y)| x <= y);
            let reflected_below = row.iter().zip(u).all(|(x, y)| reflected_le(*x, *y));
            diff += i64::from(below) - i64::from(reflected_below);
        }
        let d = diff as f64 / n as f64;
        total += d * d;
    }
    total
}

/// Integer sums behind `T_n`: `(Σ_{i≠j} I_ij, Σ_j (N_j² - N_j))` with
/// `I_ij = 1(X_i1 <= X_j1, X_i2 <= X_j2)` and `N_j = Σ_{i≠j} I_ij`.
pub fn tn_counts(data: &Matrix) -> Result<(u64, u64)> {
    require_bivariate("T_n", data.ncols())?;
    let counts = dominated_counts(data);
    let s1 = counts.iter().sum();
    let s2 = counts.iter().map(|&c| c * c - c).sum();
    Ok((s1, s2))
}

/// `N_j` for every `j`.
pub(crate) fn dominated_counts(data: &Matrix) -> Vec<u64> {
    let n = data.nrows();
    let (x, y) = (data.column(0), data.column(1));
    (0..n)
        .map(|j| {
            (0..n)
                .filter(|&i| i != j && x[i] <= x[j] && y[i] <= y[j])
                .count() as u64
        })
        .collect()
}

pub(crate) fn tn_from_counts(n: usize, s1: u64, s2: u64) -> f64 {
    let n = n as f64;
    -1.0 + 8.0 * s1 as f64 / (n * (n - 1.0)) - 9.0 * s2 as f64 / (n * (n - 1.0) * (n - 2.0))
}

/// `T_n` on raw data (ties enter through the weak inequalities).
pub fn stat_tn(data: &Matrix) -> Result<f64> {
    if data.nrows() < 3 {
        return Err(Error::domain(format!(
            "T_n needs at least 3 observations, got {}",
            data.nrows()
        )));
    }
    let (s1, s2) = tn_counts(data)?;
    Ok(tn_from_counts(data.nrows(), s1, s2))
}

/// `Σ_i {C_n(Û_i) - C(Û_i)}²` for an arbitrary reference copula `C`.
pub fn discrepancy_with(ps: &PseudoSample, reference: impl Fn(&[f64]) -> f64) -> f64 {
    let cn = empirical_copula_at_sample(ps.values());
    cn.iter()
        .zip(ps.values().rows())
        .map(|(c, u)| (c - reference(u)).powi(2))
        .sum()
}

/// `S_n` for a pseudo-sample built from maximal ranks and a fitted model.
pub fn stat_sn(ps_max: &PseudoSample, model: &CopulaModel) -> Result<f64> {
    if model.dim() != ps_max.dim() {
        return Err(Error::domain(format!(
            "model dimension {} does not match data dimension {}",
            model.dim(),
            ps_max.dim()
        )));
    }
    // evaluate once to surface capability errors
    model.cdf(ps_max.row(0))?;
    Ok(discrepancy_with(ps_max, |u| model.cdf_unchecked(u)))
}

/// Leave-one-out `T_n` values, computed in O(n²) by updating the counts.
pub fn tn_leave_one_out(data: &Matrix) -> Result<Vec<f64>> {
    require_bivariate("T_n", data.ncols())?;
    let n = data.nrows();
    if n < 4 {
        return Err(Error::domain(format!(
            "leave-one-out T_n needs at least 4 observations, got {n}"
        )));
    }
    let (x, y) = (data.column(0), data.column(1));
    let counts = dominated_counts(data);
    let s1: u64 = counts.iter().sum();
    let s2: u64 = counts.iter().map(|&c| c * c - c).sum();
    let mut out = Vec::with_capacity(n);
    for m in 0..n {
        // removing m drops the pairs (m, j) and (i, m); every N_j with
        // I_mj = 1 loses one, which changes N_j² - N_j by 2 - 2 N_j.
        let mut dominates = 0u64;
        let mut s2_change = 0u64;
        for j in 0..n {
            if j != m && x[m] <= x[j] && y[m] <= y[j] {
                dominates += 1;
                s2_change += 2 * counts[j] - 2;
            }
        }
        let s1m = s1 - dominates - counts[m];
        let s2m = s2 - (counts[m] * counts[m] - counts[m]) - s2_change;
        out.push(tn_from_counts(n - 1, s1m, s2m));
    }
    Ok(out)
}
