use std::f64::consts::PI;

use super::{CopulaModel, FRANK_INDEPENDENCE, PLACKETT_INDEPENDENCE};
use crate::error::{Error, Result};
use crate::special::{norm_quantile, t_log_pdf, t_quantile};

pub(super) fn supported(model: &CopulaModel) -> bool {
    match model {
        CopulaModel::Khoudraji { .. } => false,
        CopulaModel::Survival(inner) => supported(inner),
        other => other.dim() == 2,
    }
}

/// Log density of a bivariate model at an interior point.
pub(super) fn log_pdf(model: &CopulaModel, u: f64, v: f64) -> Result<f64> {
    if !supported(model) {
        return Err(Error::capability(format!(
            "no density for {} in dimension {}",
            model.family(),
            model.dim()
        )));
    }
    Ok(match model {
        CopulaModel::Independence { .. } => 0.0,
        CopulaModel::Clayton { theta, .. } => clayton(*theta, u, v),
        CopulaModel::Gumbel { theta, .. } => gumbel(*theta, u, v),
        CopulaModel::Frank { theta, .. } => {
            if theta.abs() < FRANK_INDEPENDENCE {
                0.0
            } else if *theta > 0.0 {
                frank(*theta, u, v)
            } else {
                // C_{-θ}(u, v) = u - C_θ(u, 1 - v)
                frank(-theta, u, 1.0 - v)
            }
        }
        CopulaModel::Plackett { theta } => plackett(*theta, u, v),
        CopulaModel::Normal { rho, .. } => normal(*rho, u, v),
        CopulaModel::StudentT { rho, df, .. } => student(*rho, *df, u, v),
        CopulaModel::Survival(inner) => log_pdf(inner, 1.0 - u, 1.0 - v)?,
        CopulaModel::Khoudraji { .. } => unreachable!("rejected above"),
    })
}

/// `ln(e^a + e^b - e^c)` for `c < max(a, b)`.
fn log_add_sub(a: f64, b: f64, c: f64) -> f64 {
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp() - (c - m).exp()).ln()
}

fn clayton(theta: f64, u: f64, v: f64) -> f64 {
    if theta == 0.0 {
        return 0.0;
    }
    let (lu, lv) = (u.ln(), v.ln());
    // ln(u^-θ + v^-θ - 1)
    let ls = log_add_sub(-theta * lu, -theta * lv, 0.0);
    theta.ln_1p() - (theta + 1.0) * (lu + lv) - (2.0 + 1.0 / theta) * ls
}

fn gumbel(theta: f64, u: f64, v: f64) -> f64 {
    let (x, y) = (-u.ln(), -v.ln());
    let (lx, ly) = (x.ln(), y.ln());
    let (hi, lo) = if lx > ly { (lx, ly) } else { (ly, lx) };
    // ln(x^θ + y^θ)
    let ls = theta * hi + (theta * (lo - hi)).exp().ln_1p();
    let a = (ls / theta).exp();
    -a + x + y + (theta - 1.0) * (lx + ly) + (1.0 / theta - 2.0) * ls + (a + theta - 1.0).ln()
}

/// Frank log density for θ > 0, arranged so that no exponential overflows.
fn frank(theta: f64, u: f64, v: f64) -> f64 {
    let (m, big) = if u < v { (u, v) } else { (v, u) };
    let bracket =
        -(-theta * big).exp_m1() + (-theta * (big - m)).exp() * -(-theta * (1.0 - big)).exp_m1();
    theta.ln() + (-(-theta).exp_m1()).ln() - theta * (big - m) - 2.0 * bracket.ln()
}

fn plackett(theta: f64, u: f64, v: f64) -> f64 {
    if (theta - 1.0).abs() < PLACKETT_INDEPENDENCE {
        return 0.0;
    }
    let eta = theta - 1.0;
    let disc = 1.0 + 2.0 * eta * (u + v - 2.0 * u * v) + eta * eta * (u - v) * (u - v);
    theta.ln() + (eta * (u + v - 2.0 * u * v)).ln_1p() - 1.5 * disc.ln()
}

fn normal(rho: f64, u: f64, v: f64) -> f64 {
    let (x, y) = (norm_quantile(u), norm_quantile(v));
    let r2 = 1.0 - rho * rho;
    -0.5 * r2.ln() - (rho * rho * (x * x + y * y) - 2.0 * rho * x * y) / (2.0 * r2)
}

fn student(rho: f64, df: u32, u: f64, v: f64) -> f64 {
    let (x, y) = (t_quantile(u, df), t_quantile(v, df));
    let nu = f64::from(df);
    let r2 = 1.0 - rho * rho;
    let q = (x * x - 2.0 * rho * x * y + y * y) / (nu * r2);
    let joint = -(2.0 * PI).ln() - 0.5 * r2.ln() - 0.5 * (nu + 2.0) * q.ln_1p();
    joint - t_log_pdf(x, df) - t_log_pdf(y, df)
}
