//! Parametric copula families: distribution functions, densities, samplers
//! and Kendall's tau relations.
//!
//! [`Family`] names a family without parameters (it is what the command line
//! and configuration files spell, and what estimators fit); [`CopulaModel`]
//! is a fully parameterised copula of a given dimension.

mod cdf;
mod pdf;
mod sample;
mod tau;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub use tau::{frank_tau, plackett_tau};

/// Frank parameters closer to zero than this are evaluated as independence.
pub(crate) const FRANK_INDEPENDENCE: f64 = 1e-6;
/// Plackett parameters closer to one than this are evaluated as independence.
pub(crate) const PLACKETT_INDEPENDENCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Independence,
    Clayton,
    Gumbel,
    Frank,
    Plackett,
    Normal,
    StudentT {
        df: u32,
    },
    Survival(Box<Family>),
    /// Khoudraji's device applied to two parent families; `shapes` has one
    /// entry per dimension.
    Khoudraji {
        first: Box<Family>,
        second: Box<Family>,
        shapes: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum CopulaModel {
    Independence {
        dim: usize,
    },
    /// `theta = 0` is the independence limit.
    Clayton {
        theta: f64,
        dim: usize,
    },
    Gumbel {
        theta: f64,
        dim: usize,
    },
    /// Negative `theta` is supported for `dim = 2` only.
    Frank {
        theta: f64,
        dim: usize,
    },
    Plackett {
        theta: f64,
    },
    /// Equicorrelation normal copula.
    Normal {
        rho: f64,
        dim: usize,
    },
    /// Equicorrelation Student t copula.
    StudentT {
        rho: f64,
        df: u32,
        dim: usize,
    },
    /// Copula of `1 - U` for `U` drawn from the inner copula.
    Survival(Box<CopulaModel>),
    /// `D(u) = C1(u^(1-s)) C2(u^s)`.
    Khoudraji {
        first: Box<CopulaModel>,
        second: Box<CopulaModel>,
        shapes: Vec<f64>,
    },
}

impl Family {
    /// Whether the family is indexed by a single real parameter (and hence
    /// can be fitted).
    pub fn is_one_parameter(&self) -> bool {
        match self {
            Family::Independence | Family::Khoudraji { .. } => false,
            Family::Survival(inner) => inner.is_one_parameter(),
            _ => true,
        }
    }

    /// Open (or half-open) parameter range of a one-parameter family.
    pub fn parameter_bounds(&self) -> Result<(f64, f64)> {
        match self {
            Family::Clayton | Family::Plackett => Ok((0.0, f64::INFINITY)),
            Family::Gumbel => Ok((1.0, f64::INFINITY)),
            Family::Frank => Ok((f64::NEG_INFINITY, f64::INFINITY)),
            Family::Normal | Family::StudentT { .. } => Ok((-1.0, 1.0)),
            Family::Survival(inner) => inner.parameter_bounds(),
            _ => Err(Error::capability(format!("{self} has no scalar parameter"))),
        }
    }

    /// The model with parameter `theta` (the correlation for elliptical
    /// families).
    pub fn with_parameter(&self, theta: f64, dim: usize) -> Result<CopulaModel> {
        let model = match self {
            Family::Clayton => CopulaModel::Clayton { theta, dim },
            Family::Gumbel => CopulaModel::Gumbel { theta, dim },
            Family::Frank => CopulaModel::Frank { theta, dim },
            Family::Plackett => {
                check_bivariate("plackett", dim)?;
                CopulaModel::Plackett { theta }
            }
            Family::Normal => CopulaModel::Normal { rho: theta, dim },
            Family::StudentT { df } => CopulaModel::StudentT {
                rho: theta,
                df: *df,
                dim,
            },
            Family::Survival(inner) => {
                CopulaModel::Survival(Box::new(inner.with_parameter(theta, dim)?))
            }
            _ => return Err(Error::capability(format!("{self} has no scalar parameter"))),
        };
        model.validate()?;
        Ok(model)
    }

    /// Parameter whose model has Kendall's tau equal to `tau`.
    pub fn theta_from_tau(&self, tau: f64) -> Result<f64> {
        tau::theta_from_tau(self, tau)
    }

    /// The model with Kendall's tau `tau`. For Khoudraji's device, `tau` is
    /// the tau of each non-independence parent.
    pub fn model_from_tau(&self, tau: f64, dim: usize) -> Result<CopulaModel> {
        match self {
            Family::Independence => Ok(CopulaModel::Independence { dim }),
            Family::Khoudraji {
                first,
                second,
                shapes,
            } => {
                if shapes.len() != dim {
                    return Err(Error::domain(format!(
                        "khoudraji needs {dim} shape parameters, got {}",
                        shapes.len()
                    )));
                }
                let model = CopulaModel::Khoudraji {
                    first: Box::new(first.model_from_tau(tau, dim)?),
                    second: Box::new(second.model_from_tau(tau, dim)?),
                    shapes: shapes.clone(),
                };
                model.validate()?;
                Ok(model)
            }
            _ => self.with_parameter(self.theta_from_tau(tau)?, dim),
        }
    }
}

fn check_bivariate(name: &str, dim: usize) -> Result<()> {
    if dim != 2 {
        return Err(Error::capability(format!(
            "{name} copula is bivariate only (d = {dim})"
        )));
    }
    Ok(())
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Independence => f.write_str("independence"),
            Family::Clayton => f.write_str("clayton"),
            Family::Gumbel => f.write_str("gumbel"),
            Family::Frank => f.write_str("frank"),
            Family::Plackett => f.write_str("plackett"),
            Family::Normal => f.write_str("normal"),
            Family::StudentT { df } => write!(f, "t{df}"),
            Family::Survival(inner) => write!(f, "surv:{inner}"),
            Family::Khoudraji {
                first,
                second,
                shapes,
            } => {
                write!(f, "khoudraji({first},{second}")?;
                for s in shapes {
                    write!(f, ",{s}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Splits on commas that are not nested inside parentheses.
fn split_top_level(s: &str) -> Option<Vec<&str>> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return None;
                }
            }
            ',' if depth == 0 => {
                parts.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return None;
    }
    parts.push(s[start..].trim());
    Some(parts)
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Family> {
        let s = s.trim();
        let lower = s.to_ascii_lowercase();
        let bad = || Error::Usage(format!("unknown copula family '{s}'"));
        if let Some(inner) = lower.strip_prefix("surv:") {
            return Ok(Family::Survival(Box::new(inner.parse()?)));
        }
        if let Some(args) = lower.strip_prefix("khoudraji(") {
            let args = args.strip_suffix(')').ok_or_else(bad)?;
            let parts = split_top_level(args).ok_or_else(bad)?;
            if parts.len() < 4 {
                return Err(Error::Usage(format!(
                    "khoudraji needs two families and at least two shapes: '{s}'"
                )));
            }
            let shapes = parts[2..]
                .iter()
                .map(|p| {
                    p.parse::<f64>()
                        .map_err(|_| Error::Usage(format!("invalid khoudraji shape '{p}'")))
                })
                .collect::<Result<Vec<_>>>()?;
            if shapes.iter().any(|s| !(0.0..=1.0).contains(s)) {
                return Err(Error::Usage(format!(
                    "khoudraji shapes must lie in [0, 1]: '{s}'"
                )));
            }
            return Ok(Family::Khoudraji {
                first: Box::new(parts[0].parse()?),
                second: Box::new(parts[1].parse()?),
                shapes,
            });
        }
        match lower.as_str() {
            "independence" | "indep" => Ok(Family::Independence),
            "clayton" => Ok(Family::Clayton),
            "gumbel" | "gumbel-hougaard" => Ok(Family::Gumbel),
            "frank" => Ok(Family::Frank),
            "plackett" => Ok(Family::Plackett),
            "normal" | "gaussian" => Ok(Family::Normal),
            _ => {
                let df = lower
                    .strip_prefix('t')
                    .and_then(|d| d.parse::<u32>().ok())
                    .filter(|&d| d >= 1)
                    .ok_or_else(bad)?;
                Ok(Family::StudentT { df })
            }
        }
    }
}

impl CopulaModel {
    pub fn dim(&self) -> usize {
        match self {
            CopulaModel::Independence { dim }
            | CopulaModel::Clayton { dim, .. }
            | CopulaModel::Gumbel { dim, .. }
            | CopulaModel::Frank { dim, .. }
            | CopulaModel::Normal { dim, .. }
            | CopulaModel::StudentT { dim, .. } => *dim,
            CopulaModel::Plackett { .. } => 2,
            CopulaModel::Survival(inner) => inner.dim(),
            CopulaModel::Khoudraji { shapes, .. } => shapes.len(),
        }
    }

    pub fn family(&self) -> Family {
        match self {
            CopulaModel::Independence { .. } => Family::Independence,
            CopulaModel::Clayton { .. } => Family::Clayton,
            CopulaModel::Gumbel { .. } => Family::Gumbel,
            CopulaModel::Frank { .. } => Family::Frank,
            CopulaModel::Plackett { .. } => Family::Plackett,
            CopulaModel::Normal { .. } => Family::Normal,
            CopulaModel::StudentT { df, .. } => Family::StudentT { df: *df },
            CopulaModel::Survival(inner) => Family::Survival(Box::new(inner.family())),
            CopulaModel::Khoudraji {
                first,
                second,
                shapes,
            } => Family::Khoudraji {
                first: Box::new(first.family()),
                second: Box::new(second.family()),
                shapes: shapes.clone(),
            },
        }
    }

    /// The scalar parameter of a one-parameter model.
    pub fn parameter(&self) -> Option<f64> {
        match self {
            CopulaModel::Clayton { theta, .. }
            | CopulaModel::Gumbel { theta, .. }
            | CopulaModel::Frank { theta, .. }
            | CopulaModel::Plackett { theta } => Some(*theta),
            CopulaModel::Normal { rho, .. } | CopulaModel::StudentT { rho, .. } => Some(*rho),
            CopulaModel::Survival(inner) => inner.parameter(),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let dim = self.dim();
        if dim < 2 {
            return Err(Error::domain(format!(
                "copula dimension must be at least 2, got {dim}"
            )));
        }
        let check = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::domain(what.to_string()))
            }
        };
        match self {
            CopulaModel::Independence { .. } => Ok(()),
            CopulaModel::Clayton { theta, .. } => check(
                theta.is_finite() && *theta >= 0.0,
                &format!("clayton parameter must be positive, got {theta}"),
            ),
            CopulaModel::Gumbel { theta, .. } => check(
                theta.is_finite() && *theta >= 1.0,
                &format!("gumbel parameter must be at least 1, got {theta}"),
            ),
            CopulaModel::Frank { theta, dim } => {
                check(
                    theta.is_finite(),
                    &format!("frank parameter must be finite, got {theta}"),
                )?;
                check(
                    *theta >= 0.0 || *dim == 2,
                    "negative frank parameters are only valid in dimension 2",
                )
            }
            CopulaModel::Plackett { theta } => check(
                theta.is_finite() && *theta > 0.0,
                &format!("plackett parameter must be positive, got {theta}"),
            ),
            CopulaModel::Normal { rho, dim } | CopulaModel::StudentT { rho, dim, .. } => {
                let lower = -1.0 / (*dim as f64 - 1.0);
                check(
                    *rho > lower && *rho < 1.0,
                    &format!("equicorrelation must lie in ({lower}, 1), got {rho}"),
                )?;
                if let CopulaModel::StudentT { df, .. } = self {
                    check(*df >= 1, "degrees of freedom must be positive")?;
                }
                Ok(())
            }
            CopulaModel::Survival(inner) => inner.validate(),
            CopulaModel::Khoudraji {
                first,
                second,
                shapes,
            } => {
                first.validate()?;
                second.validate()?;
                check(
                    first.dim() == shapes.len() && second.dim() == shapes.len(),
                    "khoudraji parents and shapes must share the dimension",
                )?;
                check(
                    shapes.iter().all(|s| (0.0..=1.0).contains(s)),
                    "khoudraji shapes must lie in [0, 1]",
                )
            }
        }
    }

    /// Distribution function at `u` in the closed unit cube.
    pub fn cdf(&self, u: &[f64]) -> Result<f64> {
        self.check_point(u, false)?;
        if !cdf::supported(self) {
            return Err(Error::capability(format!(
                "distribution function of {} is available in dimension 2 only",
                self.family()
            )));
        }
        Ok(self.cdf_unchecked(u))
    }

    /// Copula density at `u` in the open unit square.
    pub fn pdf(&self, u: &[f64]) -> Result<f64> {
        Ok(self.log_pdf(u)?.exp())
    }

    pub fn log_pdf(&self, u: &[f64]) -> Result<f64> {
        self.check_point(u, true)?;
        pdf::log_pdf(self, u[0], u[1])
    }

    /// Whether [`CopulaModel::pdf`] is available for this model.
    pub fn has_density(&self) -> bool {
        pdf::supported(self)
    }

    /// Kendall's tau of a bivariate model (or of any bivariate margin of an
    /// exchangeable one).
    pub fn tau(&self) -> Result<f64> {
        tau::tau_of(self)
    }

    /// `n` independent draws, one per row, strictly inside the unit cube.
    pub fn sample(
        &self,
        n: usize,
        stream: &mut crate::rng::Stream,
    ) -> Result<crate::matrix::Matrix> {
        self.validate()?;
        sample::sample(self, n, stream)
    }

    fn check_point(&self, u: &[f64], interior: bool) -> Result<()> {
        if u.len() != self.dim() {
            return Err(Error::domain(format!(
                "point has {} coordinates, copula has dimension {}",
                u.len(),
                self.dim()
            )));
        }
        let inside = |x: &f64| {
            if interior {
                *x > 0.0 && *x < 1.0
            } else {
                (0.0..=1.0).contains(x)
            }
        };
        if !u.iter().all(inside) {
            return Err(Error::domain(format!(
                "point {u:?} lies outside the {} unit cube",
                if interior { "open" } else { "closed" }
            )));
        }
        Ok(())
    }

    pub(crate) fn cdf_unchecked(&self, u: &[f64]) -> f64 {
        cdf::cdf(self, u)
    }
}

/// Moves `u` into the open unit interval.
#[inline]
pub(crate) fn clamp_open(u: f64) -> f64 {
    const HI: f64 = 1.0 - f64::EPSILON / 2.0;
    if u.is_nan() {
        0.5
    } else {
        u.clamp(f64::MIN_POSITIVE, HI)
    }
}
