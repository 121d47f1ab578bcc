//! Nonparametric estimators on pseudo-observations: empirical copula,
//! survival empirical copula, the rank-based CFG Pickands estimator and
//! Kendall's tau-b.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::ranks::PseudoSample;
use crate::special::EULER_GAMMA;

/// `C_n(u) = (1/n) #{i : Û_i <= u}`.
pub fn empirical_copula(ps: &PseudoSample, u: &[f64]) -> f64 {
    let hits = ps
        .values()
        .rows()
        .filter(|row| row.iter().zip(u).all(|(x, y)| x <= y))
        .count();
    hits as f64 / ps.n() as f64
}

/// Slack for `1 - x <= y` comparisons. Pseudo-observations live on a grid of
/// spacing at least `1 / (2(n + 1))`, far coarser than this.
const REFLECTION_SLACK: f64 = 1e-10;

/// `1 - x <= y`, robust to the rounding of `1 - x`.
#[inline]
pub(crate) fn reflected_le(x: f64, y: f64) -> bool {
    x + y >= 1.0 - REFLECTION_SLACK
}

/// `(1/n) #{i : 1 - Û_i <= u}`, the empirical distribution of the reflected
/// sample.
pub fn survival_empirical_copula(ps: &PseudoSample, u: &[f64]) -> f64 {
    let hits = ps
        .values()
        .rows()
        .filter(|row| row.iter().zip(u).all(|(x, y)| reflected_le(*x, *y)))
        .count();
    hits as f64 / ps.n() as f64
}

/// Rank-based Capéraà–Fougères–Genest estimate of the Pickands dependence
/// function, corrected so that `A(0) = A(1) = 1` and clamped to the Pickands
/// envelope.
#[derive(Debug, Clone)]
pub struct PickandsCurve {
    /// `ln(-ln Û_i1)` and `ln(-ln Û_i2)`.
    log_x: Vec<f64>,
    log_y: Vec<f64>,
    log_a0: f64,
    log_a1: f64,
}

impl PickandsCurve {
    pub fn new(ps: &PseudoSample) -> Result<Self> {
        if ps.dim() != 2 {
            return Err(Error::capability(format!(
                "Pickands estimation needs bivariate data, got d = {}",
                ps.dim()
            )));
        }
        let mut log_x = Vec::with_capacity(ps.n());
        let mut log_y = Vec::with_capacity(ps.n());
        for row in ps.values().rows() {
            if !row.iter().all(|&u| u > 0.0 && u < 1.0) {
                return Err(Error::domain("pseudo-observations must lie in (0, 1)"));
            }
            log_x.push((-row[0].ln()).ln());
            log_y.push((-row[1].ln()).ln());
        }
        let n = ps.n() as f64;
        let log_a0 = -EULER_GAMMA - log_x.iter().sum::<f64>() / n;
        let log_a1 = -EULER_GAMMA - log_y.iter().sum::<f64>() / n;
        Ok(PickandsCurve {
            log_x,
            log_y,
            log_a0,
            log_a1,
        })
    }

    /// Uncorrected `ln Â(t)`.
    fn log_raw(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.log_a0;
        }
        if t >= 1.0 {
            return self.log_a1;
        }
        let (l1t, lt) = ((1.0 - t).ln(), t.ln());
        let s: f64 = self
            .log_x
            .iter()
            .zip(&self.log_y)
            .map(|(lx, ly)| (lx - l1t).min(ly - lt))
            .sum();
        -EULER_GAMMA - s / self.log_x.len() as f64
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, 1.0);
        let log_a = self.log_raw(t) - (1.0 - t) * self.log_a0 - t * self.log_a1;
        log_a.exp().clamp(t.max(1.0 - t), 1.0)
    }
}

/// The corrected CFG estimate `A_n(t)`.
pub fn cfg_pickands(ps: &PseudoSample, t: f64) -> Result<f64> {
    Ok(PickandsCurve::new(ps)?.evaluate(t))
}

/// Tie-corrected Kendall's tau of a two-column matrix.
pub fn kendall_tau_b(data: &Matrix) -> Result<f64> {
    if data.ncols() != 2 {
        return Err(Error::capability(format!(
            "Kendall's tau-b needs two columns, got {}",
            data.ncols()
        )));
    }
    let n = data.nrows();
    if n < 2 {
        return Err(Error::domain(
            "Kendall's tau-b needs at least two observations",
        ));
    }
    let (x, y) = (data.column(0), data.column(1));
    let (mut concordant, mut discordant) = (0i64, 0i64);
    let (mut tied_x, mut tied_y) = (0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let dx = x[i].total_cmp(&x[j]) as i64;
            let dy = y[i].total_cmp(&y[j]) as i64;
            tied_x += i64::from(dx == 0);
            tied_y += i64::from(dy == 0);
            match dx * dy {
                1 => concordant += 1,
                -1 => discordant += 1,
                _ => {}
            }
        }
    }
    let n0 = (n * (n - 1) / 2) as i64;
    let denom = ((n0 - tied_x) as f64 * (n0 - tied_y) as f64).sqrt();
    if denom == 0.0 {
        return Err(Error::Degenerate(
            "Kendall's tau-b is undefined for a constant column".into(),
        ));
    }
    Ok((concordant - discordant) as f64 / denom)
}
