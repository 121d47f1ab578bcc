//! One-parameter copula estimation: inversion of Kendall's tau-b and
//! maximum pseudo-likelihood.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::copulas::Family;
use crate::empirical::kendall_tau_b;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::ranks::PseudoSample;

/// Floor applied to tau-b for families that cannot represent negative
/// dependence.
pub const TAU_FLOOR: f64 = 1e-4;
/// Cap on |tau-b| so that the inverted parameter stays finite.
pub const TAU_CAP: f64 = 0.99;

const MPL_REL_TOL: f64 = 1e-8;
const MPL_MAX_ITER: usize = 200;
const RHO_LIMIT: f64 = 0.9999;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Estimator {
    ItauB,
    Mpl,
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Estimator::ItauB => "itau",
            Estimator::Mpl => "mpl",
        })
    }
}

impl FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "itau" | "itau-b" | "itaub" => Ok(Estimator::ItauB),
            "mpl" => Ok(Estimator::Mpl),
            other => Err(Error::Usage(format!(
                "unknown estimator '{other}' (expected itau or mpl)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub theta: f64,
    pub method: Estimator,
    /// Pseudo log-likelihood at `theta` (maximum pseudo-likelihood only).
    pub loglik: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Set when tau-b had to be moved into the family's attainable range.
    pub tau_clamped: bool,
}

/// Whether the family (after stripping survival wrappers) only has
/// positive dependence.
fn positive_only(family: &Family) -> bool {
    match family {
        Family::Clayton | Family::Gumbel => true,
        Family::Survival(inner) => positive_only(inner),
        _ => false,
    }
}

/// Moves tau-b into the range the family can attain. Returns the clamped
/// value and whether it changed.
pub fn clamp_tau(family: &Family, tau: f64) -> (f64, bool) {
    let lower = if positive_only(family) {
        TAU_FLOOR
    } else {
        -TAU_CAP
    };
    let clamped = tau.clamp(lower, TAU_CAP);
    (clamped, clamped != tau)
}

/// Inversion of Kendall's tau-b computed on the (raw or pseudo) data.
pub fn fit_itau(data: &Matrix, family: &Family) -> Result<FitResult> {
    if !family.is_one_parameter() {
        return Err(Error::capability(format!(
            "cannot fit {family}: not a one-parameter family"
        )));
    }
    let tau = kendall_tau_b(data)?;
    let (tau, tau_clamped) = clamp_tau(family, tau);
    Ok(FitResult {
        theta: family.theta_from_tau(tau)?,
        method: Estimator::ItauB,
        loglik: None,
        iterations: 0,
        converged: true,
        tau_clamped,
    })
}

/// Pseudo log-likelihood `Σ log c_θ(Û_i)`; `-inf` where undefined.
pub fn pseudo_loglik(ps: &PseudoSample, family: &Family, theta: f64) -> f64 {
    let Ok(model) = family.with_parameter(theta, 2) else {
        return f64::NEG_INFINITY;
    };
    let mut total = 0.0;
    for row in ps.values().rows() {
        match model.log_pdf(row) {
            Ok(v) if v.is_finite() => total += v,
            _ => return f64::NEG_INFINITY,
        }
    }
    total
}

/// Search interval around the initial value.
fn search_interval(family: &Family, theta0: f64) -> (f64, f64) {
    match family {
        Family::Survival(inner) => search_interval(inner, theta0),
        Family::Gumbel => ((theta0 / 8.0).max(1.0), (8.0 * theta0).max(1.0 + 1e-6)),
        Family::Frank => {
            let half = 7.0 * theta0.abs().max(1.0);
            (theta0 - half, theta0 + half)
        }
        Family::Normal | Family::StudentT { .. } => (-RHO_LIMIT, RHO_LIMIT),
        _ => (theta0 / 8.0, 8.0 * theta0),
    }
}

struct Minimum {
    x: f64,
    fx: f64,
    iterations: usize,
    converged: bool,
}

/// Brent's derivative-free minimiser on `[a, b]` (golden section with
/// parabolic steps). Non-finite objective values are treated as `+inf`.
fn brent_minimize(
    f: impl Fn(f64) -> f64,
    mut a: f64,
    mut b: f64,
    rel_tol: f64,
    max_iter: usize,
) -> Minimum {
    const GOLDEN: f64 = 0.381_966_011_250_105_1;
    let eval = |x: f64| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut x = a + GOLDEN * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = eval(x);
    let (mut fw, mut fv) = (fx, fx);
    let (mut d, mut e) = (0.0f64, 0.0f64);
    for iter in 1..=max_iter {
        let m = 0.5 * (a + b);
        let tol1 = rel_tol * x.abs().max(1e-3);
        let tol2 = 2.0 * tol1;
        if (x - m).abs() <= tol2 - 0.5 * (b - a) {
            return Minimum {
                x,
                fx,
                iterations: iter,
                converged: true,
            };
        }
        let mut golden = true;
        if e.abs() > tol1 && fx.is_finite() && fw.is_finite() && fv.is_finite() {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            if !(p.abs() >= (0.5 * q * etemp).abs() || p <= q * (a - x) || p >= q * (b - x)) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(m - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= m { a - x } else { b - x };
            d = GOLDEN * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else {
            x + tol1.copysign(d)
        };
        let fu = eval(u);
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    Minimum {
        x,
        fx,
        iterations: max_iter,
        converged: false,
    }
}

/// Maximum pseudo-likelihood from average-rank pseudo-observations,
/// initialised at the tau-b inversion estimate.
pub fn fit_mpl(ps_avg: &PseudoSample, family: &Family) -> Result<FitResult> {
    if ps_avg.dim() != 2 {
        return Err(Error::capability(format!(
            "pseudo-likelihood fitting needs bivariate data, got d = {}",
            ps_avg.dim()
        )));
    }
    let init = fit_itau(ps_avg.values(), family)?;
    if !family.with_parameter(init.theta, 2)?.has_density() {
        return Err(Error::capability(format!("{family} has no density")));
    }
    let theta0 = init.theta;
    let ll0 = pseudo_loglik(ps_avg, family, theta0);
    let (lo, hi) = search_interval(family, theta0);
    let min = brent_minimize(
        |t| -pseudo_loglik(ps_avg, family, t),
        lo,
        hi,
        MPL_REL_TOL,
        MPL_MAX_ITER,
    );
    let diagnostics = || {
        format!(
            "family {family}, interval [{lo}, {hi}], start {theta0}, last {} after {} iterations",
            min.x, min.iterations
        )
    };
    if !min.fx.is_finite() && !ll0.is_finite() {
        return Err(Error::Fit {
            message: "pseudo log-likelihood is not finite anywhere in the search interval".into(),
            diagnostics: diagnostics(),
        });
    }
    if !min.converged {
        return Err(Error::Fit {
            message: "pseudo-likelihood maximisation did not converge".into(),
            diagnostics: diagnostics(),
        });
    }
    let (theta, loglik) = if -min.fx >= ll0 {
        (min.x, -min.fx)
    } else {
        (theta0, ll0)
    };
    Ok(FitResult {
        theta,
        method: Estimator::Mpl,
        loglik: Some(loglik),
        iterations: min.iterations,
        converged: true,
        tau_clamped: init.tau_clamped,
    })
}

/// Fits `family` with the chosen estimator; both work from average ranks.
pub fn fit(ps_avg: &PseudoSample, family: &Family, estimator: Estimator) -> Result<FitResult> {
    match estimator {
        Estimator::ItauB => fit_itau(ps_avg.values(), family),
        Estimator::Mpl => fit_mpl(ps_avg, family),
    }
}
