use super::{clamp_open, CopulaModel, FRANK_INDEPENDENCE, PLACKETT_INDEPENDENCE};
use crate::error::Result;
use crate::matrix::Matrix;
use crate::rng::Stream;
use crate::special::{norm_cdf, t_cdf};

/// Above this parameter the Frank log-series frailty is replaced by
/// conditional inversion in the bivariate case.
const FRANK_FRAILTY_MAX: f64 = 35.0;

pub(super) fn sample(model: &CopulaModel, n: usize, s: &mut Stream) -> Result<Matrix> {
    let d = model.dim();
    let mut out = Matrix::zeros(n, d);
    match model {
        CopulaModel::Independence { .. } => fill(&mut out, |row| {
            for x in row {
                *x = s.uniform01();
            }
            Ok(())
        })?,
        CopulaModel::Clayton { theta, .. } => {
            let theta = *theta;
            fill(&mut out, |row| {
                if theta == 0.0 {
                    for x in row.iter_mut() {
                        *x = s.uniform01();
                    }
                    return Ok(());
                }
                let v = s.gamma(1.0 / theta)?;
                for x in row.iter_mut() {
                    // (1 + E/V)^(-1/θ)
                    *x = (-(s.exponential() / v).ln_1p() / theta).exp();
                }
                Ok(())
            })?
        }
        CopulaModel::Gumbel { theta, .. } => {
            let alpha = 1.0 / theta;
            fill(&mut out, |row| {
                let v = s.positive_stable(alpha)?;
                for x in row.iter_mut() {
                    *x = (-(s.exponential() / v).powf(alpha)).exp();
                }
                Ok(())
            })?
        }
        CopulaModel::Frank { theta, .. } => {
            let theta = *theta;
            if theta.abs() < FRANK_INDEPENDENCE {
                return sample(&CopulaModel::Independence { dim: d }, n, s);
            }
            if d == 2 && !(0.0..=FRANK_FRAILTY_MAX).contains(&theta) {
                fill(&mut out, |row| {
                    let u = s.uniform01();
                    let w = s.uniform01();
                    let v = frank_conditional(theta.abs(), u, w);
                    row[0] = u;
                    row[1] = if theta < 0.0 { 1.0 - v } else { v };
                    Ok(())
                })?
            } else {
                let p = -(-theta).exp_m1();
                fill(&mut out, |row| {
                    let v = s.log_series(p)? as f64;
                    for x in row.iter_mut() {
                        // ψ(t) = -ln(1 - p e^{-t}) / θ at t = E / V
                        *x = -(-p * (-s.exponential() / v).exp()).ln_1p() / theta;
                    }
                    Ok(())
                })?
            }
        }
        CopulaModel::Plackett { theta } => {
            let theta = *theta;
            fill(&mut out, |row| {
                let u = s.uniform01();
                let w = s.uniform01();
                row[0] = u;
                row[1] = plackett_conditional(theta, u, w);
                Ok(())
            })?
        }
        CopulaModel::Normal { rho, .. } => {
            let l = equicorrelation_cholesky(*rho, d);
            let mut z = vec![0.0; d];
            fill(&mut out, |row| {
                correlated_normals(&l, s, &mut z);
                for (x, &zj) in row.iter_mut().zip(&z) {
                    *x = norm_cdf(zj);
                }
                Ok(())
            })?
        }
        CopulaModel::StudentT { rho, df, .. } => {
            let l = equicorrelation_cholesky(*rho, d);
            let mut z = vec![0.0; d];
            let nu = f64::from(*df);
            fill(&mut out, |row| {
                correlated_normals(&l, s, &mut z);
                let scale = (s.chi_squared(*df)? / nu).sqrt();
                for (x, &zj) in row.iter_mut().zip(&z) {
                    *x = t_cdf(zj / scale, *df);
                }
                Ok(())
            })?
        }
        CopulaModel::Survival(inner) => {
            let inner_sample = sample(inner, n, s)?;
            out = inner_sample.map(|x| 1.0 - x);
        }
        CopulaModel::Khoudraji {
            first,
            second,
            shapes,
        } => {
            let v = sample(first, n, s)?;
            let w = sample(second, n, s)?;
            for i in 0..n {
                for (j, &sj) in shapes.iter().enumerate() {
                    let x = if sj == 0.0 {
                        v.get(i, j)
                    } else if sj == 1.0 {
                        w.get(i, j)
                    } else {
                        v.get(i, j)
                            .powf(1.0 / (1.0 - sj))
                            .max(w.get(i, j).powf(1.0 / sj))
                    };
                    out.set(i, j, x);
                }
            }
        }
    }
    Ok(out.map(clamp_open))
}

fn fill(out: &mut Matrix, mut row_fn: impl FnMut(&mut [f64]) -> Result<()>) -> Result<()> {
    for i in 0..out.nrows() {
        row_fn(out.row_mut(i))?;
    }
    Ok(())
}

/// Inverse of `v ↦ ∂C/∂u (u, v)` for the Frank copula with θ > 0.
fn frank_conditional(theta: f64, u: f64, w: f64) -> f64 {
    // v = -ln(num / den) / θ with num = (1-w) e^{-θu} + w e^{-θ},
    // den = w + (1-w) e^{-θu}; evaluated on the log scale.
    let log_add = |a: f64, b: f64| {
        let m = a.max(b);
        m + ((a - m).exp() + (b - m).exp()).ln()
    };
    let lw = w.ln();
    let l1w = (-w).ln_1p();
    let log_num = log_add(l1w - theta * u, lw - theta);
    let log_den = log_add(lw, l1w - theta * u);
    -(log_num - log_den) / theta
}

/// Inverse of `v ↦ ∂C/∂u (u, v)` for the Plackett copula.
pub(super) fn plackett_conditional(theta: f64, u: f64, w: f64) -> f64 {
    if (theta - 1.0).abs() < PLACKETT_INDEPENDENCE {
        return w;
    }
    let a = w * (1.0 - w);
    let b = theta + a * (theta - 1.0) * (theta - 1.0);
    let c = 2.0 * a * (u * theta * theta + 1.0 - u) + theta * (1.0 - 2.0 * a);
    let d = theta.sqrt() * (theta + 4.0 * a * u * (1.0 - u) * (1.0 - theta) * (1.0 - theta)).sqrt();
    (c - (1.0 - 2.0 * w) * d) / (2.0 * b)
}

/// Lower Cholesky factor of the `d × d` equicorrelation matrix.
fn equicorrelation_cholesky(rho: f64, d: usize) -> Vec<Vec<f64>> {
    let mut l = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..=i {
            let target = if i == j { 1.0 } else { rho };
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                l[i][j] = (target - s).max(0.0).sqrt();
            } else {
                l[i][j] = (target - s) / l[j][j];
            }
        }
    }
    l
}

fn correlated_normals(l: &[Vec<f64>], s: &mut Stream, z: &mut [f64]) {
    let e: Vec<f64> = (0..z.len()).map(|_| s.standard_normal()).collect();
    for (i, zi) in z.iter_mut().enumerate() {
        *zi = (0..=i).map(|k| l[i][k] * e[k]).sum();
    }
}
