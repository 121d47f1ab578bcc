use std::f64::consts::PI;
use std::sync::OnceLock;

use super::{cdf::plackett, CopulaModel, Family, FRANK_INDEPENDENCE, PLACKETT_INDEPENDENCE};
use crate::error::{Error, Result};
use crate::special::{debye1, gauss_legendre};

pub(super) fn tau_of(model: &CopulaModel) -> Result<f64> {
    match model {
        CopulaModel::Independence { .. } => Ok(0.0),
        CopulaModel::Clayton { theta, .. } => Ok(theta / (theta + 2.0)),
        CopulaModel::Gumbel { theta, .. } => Ok(1.0 - 1.0 / theta),
        CopulaModel::Frank { theta, .. } => Ok(frank_tau(*theta)),
        CopulaModel::Plackett { theta } => Ok(plackett_tau(*theta)),
        CopulaModel::Normal { rho, .. } | CopulaModel::StudentT { rho, .. } => {
            Ok(2.0 / PI * rho.asin())
        }
        CopulaModel::Survival(inner) => tau_of(inner),
        CopulaModel::Khoudraji { .. } => Err(Error::capability(
            "Kendall's tau of a Khoudraji copula has no closed form",
        )),
    }
}

/// `τ(θ) = 1 + 4 (D_1(θ) - 1) / θ`.
pub fn frank_tau(theta: f64) -> f64 {
    if theta.abs() < FRANK_INDEPENDENCE {
        return theta / 9.0;
    }
    1.0 + 4.0 * (debye1(theta) - 1.0) / theta
}

struct Grid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Composite Gauss–Legendre rule on [0, 1]: 4 panels of 32 nodes.
fn unit_grid() -> &'static Grid {
    static GRID: OnceLock<Grid> = OnceLock::new();
    GRID.get_or_init(|| {
        let (x, w) = gauss_legendre(32);
        let panels = 4;
        let h = 1.0 / panels as f64;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for p in 0..panels {
            let a = p as f64 * h;
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(a + h * (xi + 1.0) / 2.0);
                weights.push(wi * h / 2.0);
            }
        }
        Grid { nodes, weights }
    })
}

fn plackett_density(theta: f64, u: f64, v: f64) -> f64 {
    let eta = theta - 1.0;
    let disc = 1.0 + 2.0 * eta * (u + v - 2.0 * u * v) + eta * eta * (u - v) * (u - v);
    theta * (1.0 + eta * (u + v - 2.0 * u * v)) / disc.powf(1.5)
}

/// Kendall's tau of the Plackett copula, `4 ∫∫ C dC - 1` on a tensor
/// Gauss–Legendre grid.
pub fn plackett_tau(theta: f64) -> f64 {
    if (theta - 1.0).abs() < PLACKETT_INDEPENDENCE {
        return 0.0;
    }
    let g = unit_grid();
    let mut total = 0.0;
    for (&u, &wu) in g.nodes.iter().zip(&g.weights) {
        let mut inner = 0.0;
        for (&v, &wv) in g.nodes.iter().zip(&g.weights) {
            inner += wv * plackett(theta, u, v) * plackett_density(theta, u, v);
        }
        total += wu * inner;
    }
    4.0 * total - 1.0
}

pub(super) fn theta_from_tau(family: &Family, tau: f64) -> Result<f64> {
    if !(tau > -1.0 && tau < 1.0) {
        return Err(Error::domain(format!(
            "Kendall's tau must lie in (-1, 1), got {tau}"
        )));
    }
    let nonneg = |name: &str| {
        if tau < 0.0 {
            Err(Error::domain(format!(
                "{name} copula cannot attain negative Kendall's tau ({tau})"
            )))
        } else {
            Ok(())
        }
    };
    match family {
        Family::Clayton => {
            nonneg("clayton")?;
            Ok(2.0 * tau / (1.0 - tau))
        }
        Family::Gumbel => {
            nonneg("gumbel")?;
            Ok(1.0 / (1.0 - tau))
        }
        Family::Normal | Family::StudentT { .. } => Ok((PI * tau / 2.0).sin()),
        Family::Frank => frank_theta(tau),
        Family::Plackett => plackett_theta(tau),
        Family::Survival(inner) => theta_from_tau(inner, tau),
        _ => Err(Error::capability(format!(
            "{family} has no one-parameter Kendall's tau relation"
        ))),
    }
}

fn frank_theta(tau: f64) -> Result<f64> {
    if tau == 0.0 {
        return Ok(0.0);
    }
    // τ(-θ) = -τ(θ): solve for |τ| and restore the sign.
    let target = tau.abs();
    let mut hi = 1.0;
    while frank_tau(hi) < target {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::domain(format!(
                "Kendall's tau {tau} is too extreme for frank"
            )));
        }
    }
    let mut lo = 0.0;
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let t = frank_tau(mid);
        if (t - target).abs() <= 1e-10 {
            break;
        }
        if t < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(tau.signum() * mid)
}

fn plackett_theta(tau: f64) -> Result<f64> {
    if tau == 0.0 {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (-25.0f64, 25.0f64);
    if !(plackett_tau(lo.exp()) < tau && plackett_tau(hi.exp()) > tau) {
        return Err(Error::domain(format!(
            "Kendall's tau {tau} is too extreme for plackett"
        )));
    }
    let mut mid = 0.0;
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let t = plackett_tau(mid.exp());
        if (t - tau).abs() <= 1e-6 && hi - lo < 1e-6 {
            break;
        }
        if t < tau {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(mid.exp())
}
