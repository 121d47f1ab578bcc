//! Ranks with ties, pseudo-observations and tie templates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RankMode {
    /// Tied observations share the mean of the ranks they would occupy.
    Average,
    /// Tied observations share the largest of those ranks, i.e. `n F_n(x)`.
    Maximal,
}

/// Indices of `column` sorted by value, ties kept in row order.
pub fn order(column: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..column.len()).collect();
    idx.sort_by(|&a, &b| column[a].total_cmp(&column[b]));
    idx
}

/// Half-open `[start, end)` runs of equal values in a sorted sequence.
fn tie_runs(sorted: impl Fn(usize) -> f64, n: usize) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && sorted(end) == sorted(start) {
            end += 1;
        }
        runs.push((start, end));
        start = end;
    }
    runs
}

fn run_rank(start: usize, end: usize, mode: RankMode) -> f64 {
    match mode {
        RankMode::Average => (start + end + 1) as f64 / 2.0,
        RankMode::Maximal => end as f64,
    }
}

pub fn compute_ranks(column: &[f64], mode: RankMode) -> Result<Vec<f64>> {
    if column.is_empty() {
        return Err(Error::domain("cannot rank an empty column"));
    }
    let n = column.len();
    let ord = order(column);
    let mut ranks = vec![0.0; n];
    for (start, end) in tie_runs(|k| column[ord[k]], n) {
        let r = run_rank(start, end, mode);
        for &i in &ord[start..end] {
            ranks[i] = r;
        }
    }
    Ok(ranks)
}

/// Sorted multiset of tie-group sizes of a column.
pub fn tie_group_sizes(column: &[f64]) -> Vec<usize> {
    let mut sorted = column.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut sizes: Vec<usize> = tie_runs(|k| sorted[k], sorted.len())
        .into_iter()
        .map(|(a, b)| b - a)
        .collect();
    sizes.sort_unstable();
    sizes
}

/// Scaled ranks `R_ij / (n + 1)`, tagged with the rank mode that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoSample {
    values: Matrix,
    mode: RankMode,
}

impl PseudoSample {
    /// Wraps a matrix of scaled ranks without recomputing anything. The caller
    /// guarantees that entries have the form `r / (n + 1)`.
    pub fn from_scaled_ranks(values: Matrix, mode: RankMode) -> Self {
        PseudoSample { values, mode }
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn mode(&self) -> RankMode {
        self.mode
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn dim(&self) -> usize {
        self.values.ncols()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.values.row(i)
    }

    /// The sample `1 - U_i`.
    pub fn reflected(&self) -> Matrix {
        self.values.map(|u| 1.0 - u)
    }
}

pub fn pseudo_observations(data: &Matrix, mode: RankMode) -> Result<PseudoSample> {
    let n = data.nrows();
    let scale = 1.0 / (n as f64 + 1.0);
    let mut values = Matrix::zeros(n, data.ncols());
    for j in 0..data.ncols() {
        let ranks = compute_ranks(&data.column(j), mode)?;
        for (i, r) in ranks.into_iter().enumerate() {
            values.set(i, j, r * scale);
        }
    }
    Ok(PseudoSample { values, mode })
}

/// Per-column sorted average ranks of the original data: the tie structure
/// to impose on resampled data.
#[derive(Debug, Clone, PartialEq)]
pub struct TieTemplate {
    sorted_ranks: Matrix,
    tie_free: Vec<bool>,
}

impl TieTemplate {
    pub fn from_data(data: &Matrix) -> Result<Self> {
        let (n, d) = (data.nrows(), data.ncols());
        let mut sorted_ranks = Matrix::zeros(n, d);
        let mut tie_free = Vec::with_capacity(d);
        for j in 0..d {
            let mut r = compute_ranks(&data.column(j), RankMode::Average)?;
            r.sort_by(f64::total_cmp);
            tie_free.push(r.iter().enumerate().all(|(i, &v)| v == (i + 1) as f64));
            sorted_ranks.set_column(j, &r);
        }
        Ok(TieTemplate {
            sorted_ranks,
            tie_free,
        })
    }

    pub fn n(&self) -> usize {
        self.sorted_ranks.nrows()
    }

    pub fn dim(&self) -> usize {
        self.sorted_ranks.ncols()
    }

    /// Sorted average ranks `S_{1j} <= ... <= S_{nj}`.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.sorted_ranks.column(j)
    }

    pub fn column_is_tie_free(&self, j: usize) -> bool {
        self.tie_free[j]
    }

    pub fn is_tie_free(&self) -> bool {
        self.tie_free.iter().all(|&t| t)
    }

    fn check_shape(&self, sample: &Matrix) -> Result<()> {
        if sample.nrows() != self.n() || sample.ncols() != self.dim() {
            return Err(Error::domain(format!(
                "sample is {}x{} but the tie template is {}x{}",
                sample.nrows(),
                sample.ncols(),
                self.n(),
                self.dim()
            )));
        }
        Ok(())
    }
}

/// Empirical quantile transform of each sample column onto the template's
/// tie pattern: the entry holding the i-th smallest value of column j
/// receives the order statistic `V_(floor(S_ij))` of that column. Ties in the
/// input are ordered by row index.
pub fn impose_tie_structure(sample: &Matrix, template: &TieTemplate) -> Result<Matrix> {
    template.check_shape(sample)?;
    let n = sample.nrows();
    let mut out = sample.clone();
    for j in 0..sample.ncols() {
        let column = sample.column(j);
        let ord = order(&column);
        let s = template.column(j);
        for i in 0..n {
            // floor(S_ij) is a 1-based rank in 1..=n
            let m = s[i].floor() as usize;
            out.set(ord[i], j, column[ord[m - 1]]);
        }
    }
    Ok(out)
}
