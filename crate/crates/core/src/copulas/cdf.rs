use super::{CopulaModel, FRANK_INDEPENDENCE, PLACKETT_INDEPENDENCE};
use crate::special::{bvn_cdf, bvt_cdf, norm_quantile, t_quantile};

/// Whether the distribution function is implemented for `model`.
pub(super) fn supported(model: &CopulaModel) -> bool {
    match model {
        CopulaModel::Normal { dim, .. } | CopulaModel::StudentT { dim, .. } => *dim == 2,
        CopulaModel::Survival(inner) => supported(inner),
        CopulaModel::Khoudraji { first, second, .. } => supported(first) && supported(second),
        _ => true,
    }
}

/// Copula distribution function; `u` is assumed to be a valid point of the
/// closed unit cube of the right dimension.
pub(super) fn cdf(model: &CopulaModel, u: &[f64]) -> f64 {
    if u.contains(&0.0) {
        return 0.0;
    }
    let below_one: Vec<usize> = (0..u.len()).filter(|&j| u[j] < 1.0).collect();
    match below_one.len() {
        0 => return 1.0,
        1 => return u[below_one[0]],
        _ => {}
    }
    let value = match model {
        CopulaModel::Independence { .. } => u.iter().product(),
        CopulaModel::Clayton { theta, .. } => clayton(*theta, u),
        CopulaModel::Gumbel { theta, .. } => gumbel(*theta, u),
        CopulaModel::Frank { theta, .. } => frank(*theta, u),
        CopulaModel::Plackett { theta } => plackett(*theta, u[0], u[1]),
        CopulaModel::Normal { rho, .. } => bvn_cdf(norm_quantile(u[0]), norm_quantile(u[1]), *rho),
        CopulaModel::StudentT { rho, df, .. } => {
            bvt_cdf(t_quantile(u[0], *df), t_quantile(u[1], *df), *rho, *df)
        }
        CopulaModel::Survival(inner) => survival(inner, u),
        CopulaModel::Khoudraji {
            first,
            second,
            shapes,
        } => {
            // u^0 = 1 by convention, including at u = 0 (already handled).
            let a: Vec<f64> = u.iter().zip(shapes).map(|(x, s)| x.powf(1.0 - s)).collect();
            let b: Vec<f64> = u.iter().zip(shapes).map(|(x, s)| x.powf(*s)).collect();
            cdf(first, &a) * cdf(second, &b)
        }
    };
    value.clamp(0.0, 1.0)
}

fn clayton(theta: f64, u: &[f64]) -> f64 {
    if theta == 0.0 {
        return u.iter().product();
    }
    // sum of u^-theta - 1 computed via expm1 to keep precision near theta = 0
    let s: f64 = u.iter().map(|x| (-theta * x.ln()).exp_m1()).sum();
    (-(s.ln_1p()) / theta).exp()
}

fn gumbel(theta: f64, u: &[f64]) -> f64 {
    let s: f64 = u.iter().map(|x| (-x.ln()).powf(theta)).sum();
    (-s.powf(1.0 / theta)).exp()
}

fn frank(theta: f64, u: &[f64]) -> f64 {
    if theta.abs() < FRANK_INDEPENDENCE {
        return u.iter().product();
    }
    if theta < 0.0 {
        // bivariate only: C_θ(u, v) = u - C_{-θ}(u, 1 - v)
        return u[0] - frank(-theta, &[u[0], 1.0 - u[1]]);
    }
    // 1 + Π(e^{-θu_j} - 1) / (e^{-θ} - 1)^{d-1} = 1 - a Π (q_j / a) with
    // q_j = 1 - e^{-θu_j}, a = 1 - e^{-θ}; the product is formed on the log
    // scale so that it stays accurate when it is close to one.
    let log_a = (-(-theta).exp()).ln_1p();
    let log_prod: f64 = log_a
        + u.iter()
            .map(|x| (-(-theta * x).exp()).ln_1p() - log_a)
            .sum::<f64>();
    -(-log_prod.exp_m1()).ln() / theta
}

pub(super) fn plackett(theta: f64, u: f64, v: f64) -> f64 {
    if (theta - 1.0).abs() < PLACKETT_INDEPENDENCE {
        return u * v;
    }
    // Rationalised form of the closed-form root; no cancellation near θ = 1.
    let eta = theta - 1.0;
    let s = 1.0 + eta * (u + v);
    let disc = 1.0 + 2.0 * eta * (u + v - 2.0 * u * v) + eta * eta * (u - v) * (u - v);
    2.0 * u * v * theta / (s + disc.sqrt())
}

/// Inclusion–exclusion: `P(1 - U <= u) = Σ_S (-1)^|S| C(w_S)` where `w_S`
/// replaces coordinates in `S` by `1 - u_j` and the rest by 1.
fn survival(inner: &CopulaModel, u: &[f64]) -> f64 {
    let d = u.len();
    let mut total = 0.0;
    let mut w = vec![1.0; d];
    for mask in 0u32..(1 << d) {
        for (j, wj) in w.iter_mut().enumerate() {
            *wj = if mask & (1 << j) != 0 {
                1.0 - u[j]
            } else {
                1.0
            };
        }
        let sign = if mask.count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        total += sign * cdf(inner, &w);
    }
    total
}
