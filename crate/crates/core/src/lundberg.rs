//! Adjustment function, Lundberg root, the entropy-minimal tilt point, the
//! minimal-martingale premium and closed-form ruin probabilities.
//!
//! For a claim tilt argument `r ∈ [0, r_X)` the adjustment function `θ(r)` is
//! the unique solution of
//!
//! ```text
//! M_X(r) · L_W(θ(r) + c·r) = 1,
//! ```
//!
//! with `M_X` the claim mgf and `L_W` the Laplace transform of the
//! interarrival law. `θ` is strictly convex with `θ(0) = 0` and `θ'(0) < 0`
//! under the net profit condition. Its positive zero is the adjustment
//! coefficient `ρ`, its minimizer is `r^(m)`.

use log::debug;

use crate::error::{Error, Result};
use crate::numeric::roots::{self, RootOptions};
use crate::tilting::RiskModel;

/// Residual bound for the adjustment equation.
pub const ADJUSTMENT_RESIDUAL_TOL: f64 = 1e-12;

/// `θ(r)` together with `y(r) = θ(r) + c·r` and the equation residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdjustmentSolution {
    pub r: f64,
    pub theta: f64,
    pub y: f64,
    /// `|M_X(r)·L_W(y) − 1|`.
    pub residual: f64,
}

/// Zero of `θ'` and the matching premium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemmPoint {
    pub r: f64,
    pub theta: f64,
    /// `|θ'(r)|` at the returned point.
    pub residual: f64,
    /// `β·E[X e^{rX}]`, only for exponential interarrival times.
    pub premium: Option<f64>,
}

fn require_mgf(model: &RiskModel) -> Result<f64> {
    let radius = model.claim().mgf_radius();
    if radius > 0.0 {
        Ok(radius)
    } else {
        Err(Error::MgfUnavailable(format!(
            "claim law {} has no moment generating function",
            model.claim()
        )))
    }
}

/// Solves `L_W(s) = target` for `s ≥ 0`, `0 < target ≤ 1`.
fn invert_laplace(model: &RiskModel, target: f64) -> Result<f64> {
    let wait = model.wait();
    if target >= 1.0 {
        return Ok(0.0);
    }
    if let Some((shape, rate)) = wait.gamma_shape_rate() {
        // (rate/(rate+s))^shape = target
        return Ok(rate * ((-target.ln() / shape).exp_m1()));
    }
    let ln_target = target.ln();
    let f = |s: f64| wait.laplace_transform(s).ln() - ln_target;
    let df = |s: f64| -wait.exp_weighted_moment(1, -s) / wait.laplace_transform(s);
    let mut hi = 1.0 / model.wait_mean();
    let mut guard = 0;
    while f(hi) > 0.0 {
        hi *= 2.0;
        guard += 1;
        if guard > 200 {
            return Err(Error::NotFound(format!(
                "Laplace transform never reaches {target}"
            )));
        }
    }
    let root = roots::solve(
        f,
        df,
        0.0,
        hi,
        RootOptions {
            width: 1e-10 * hi.max(1.0),
            ..RootOptions::default()
        },
    )?;
    debug!(
        "laplace inversion: {} bisections, {} newton steps",
        root.bisections, root.newton_steps
    );
    Ok(root.x)
}

/// `θ(r)` from the adjustment equation.
pub fn theta_of_r(model: &RiskModel, r: f64) -> Result<AdjustmentSolution> {
    let radius = require_mgf(model)?;
    if !(r >= 0.0 && r < radius) {
        return Err(Error::DomainError(format!("r = {r} outside [0, {radius})")));
    }
    if r == 0.0 {
        return Ok(AdjustmentSolution {
            r,
            theta: 0.0,
            y: 0.0,
            residual: 0.0,
        });
    }
    let mx = model.claim().mgf(r);
    if !mx.is_finite() {
        return Err(Error::DomainError(format!("M_X({r}) is infinite")));
    }
    let y = invert_laplace(model, 1.0 / mx)?;
    let residual = (mx * model.wait().laplace_transform(y) - 1.0).abs();
    Ok(AdjustmentSolution {
        r,
        theta: y - model.premium() * r,
        y,
        residual,
    })
}

/// Tilted means `(E_P[X e^{γ_r(X)}], E_P[W e^{δ_r(W)}])` of the Esscher pair
/// at `r`, given `y(r)`.
pub(crate) fn esscher_tilted_means(model: &RiskModel, r: f64, y: f64) -> (f64, f64) {
    let claim = model.claim();
    let wait = model.wait();
    let claim_mean = match claim.gamma_shape_rate() {
        Some((shape, rate)) => shape / (rate - r),
        None => claim.exp_weighted_moment(1, r) / claim.mgf(r),
    };
    let wait_mean = match wait.gamma_shape_rate() {
        Some((shape, rate)) => shape / (rate + y),
        None => wait.exp_weighted_moment(1, -y) / wait.laplace_transform(y),
    };
    (claim_mean, wait_mean)
}

/// `θ'(r)` as the ratio of tilted means minus the premium.
pub fn theta_prime(model: &RiskModel, r: f64) -> Result<f64> {
    let sol = theta_of_r(model, r)?;
    let (mx, mw) = esscher_tilted_means(model, r, sol.y);
    Ok(mx / mw - model.premium())
}

/// Increasing probe points inside `(0, radius)`.
fn probe_points(model: &RiskModel, radius: f64) -> Vec<f64> {
    if radius.is_finite() {
        (1..=52).map(|k| radius * (1.0 - 0.5f64.powi(k))).collect()
    } else {
        let base = 1.0 / (16.0 * model.claim_mean());
        (0..64).map(|k| base * 2f64.powi(k)).collect()
    }
}

/// Lundberg exponent: `ln M_X(r) + ln L_W(c·r)`, which has the sign of `θ(r)`.
fn lundberg_exponent(model: &RiskModel, r: f64) -> f64 {
    let mx = model.claim().mgf(r);
    if !mx.is_finite() {
        return f64::INFINITY;
    }
    let lw = model.wait().laplace_transform(model.premium() * r);
    if lw <= 0.0 {
        return f64::INFINITY;
    }
    mx.ln() + lw.ln()
}

/// The adjustment coefficient `ρ > 0` with `θ(ρ) = 0`.
pub fn lundberg_root(model: &RiskModel) -> Result<f64> {
    let radius = require_mgf(model)?;
    let g = |r: f64| lundberg_exponent(model, r);
    let dg = |r: f64| {
        let claim = model.claim();
        let wait = model.wait();
        let s = model.premium() * r;
        claim.exp_weighted_moment(1, r) / claim.mgf(r)
            - model.premium() * wait.exp_weighted_moment(1, -s) / wait.laplace_transform(s)
    };

    let mut lo = None;
    let mut hi = None;
    for r in probe_points(model, radius) {
        let v = g(r);
        if v.is_nan() {
            continue;
        }
        if v < 0.0 {
            lo = Some(r);
        } else if v > 0.0 {
            hi = Some(r);
            break;
        }
    }
    let hi = hi.ok_or_else(|| Error::NotFound(format!("θ(r) stays negative on (0, {radius})")))?;
    let lo = match lo {
        Some(lo) => lo,
        None => {
            // g < 0 just right of 0 because g'(0) = E[X] − c·E[W] < 0
            let mut r = hi / 2.0;
            while g(r) >= 0.0 {
                r /= 2.0;
                if r < 1e-300 {
                    return Err(Error::NotFound("no negative value of θ found".into()));
                }
            }
            r
        }
    };
    let root = roots::solve(
        g,
        dg,
        lo,
        hi,
        RootOptions {
            width: 1e-10 * hi.max(1.0),
            ..RootOptions::default()
        },
    )?;
    debug!(
        "lundberg root: {} bisections, {} newton steps, residual {:e}",
        root.bisections, root.newton_steps, root.residual
    );
    Ok(root.x)
}

/// The point `r^(m)` where `θ'` vanishes.
pub fn memm_point(model: &RiskModel) -> Result<MemmPoint> {
    let radius = require_mgf(model)?;
    let slope0 = model.claim_mean() / model.wait_mean() - model.premium();
    if slope0 >= 0.0 {
        return Err(Error::DomainError(format!(
            "θ'(0) = {slope0} is not negative"
        )));
    }
    let deriv = |r: f64| theta_prime(model, r).unwrap_or(f64::NAN);
    let mut lo = 0.0;
    let mut hi = None;
    for r in probe_points(model, radius) {
        let v = deriv(r);
        if v.is_nan() {
            continue;
        }
        if v < 0.0 {
            lo = r;
        } else {
            hi = Some(r);
            break;
        }
    }
    let hi = hi.ok_or_else(|| Error::NotFound(format!("θ' stays negative on (0, {radius})")))?;
    let root = roots::bisection(
        |r: f64| if r == 0.0 { slope0 } else { deriv(r) },
        lo,
        hi,
        RootOptions {
            width: 1e-15 * hi.max(1.0),
            max_bisections: 400,
            ..RootOptions::default()
        },
    )?;
    let sol = theta_of_r(model, root.x)?;
    let premium = model
        .wait_rate()
        .map(|beta| beta * model.claim().exp_weighted_moment(1, root.x));
    Ok(MemmPoint {
        r: root.x,
        theta: sol.theta,
        residual: root.residual,
        premium,
    })
}

/// `ξ̂ = (β·E[X] − c) / (β·E[X²])` for exponential interarrival times.
pub fn xi_hat(model: &RiskModel) -> Result<f64> {
    let beta = model.wait_rate().ok_or_else(|| {
        Error::UnsupportedCombination(format!(
            "linear tilting needs exponential interarrival times, got {}",
            model.wait()
        ))
    })?;
    let second = model.claim().raw_moment(2.0);
    if !second.is_finite() {
        return Err(Error::SecondMomentInfinite(model.claim().to_string()));
    }
    Ok((beta * model.claim_mean() - model.premium()) / (beta * second))
}

/// Premium `ĉ = β·(E[X] − ξ̂·E[X²])` under the minimal martingale measure.
pub fn mmm_premium(model: &RiskModel) -> Result<f64> {
    let xi = xi_hat(model)?;
    let beta = model.wait_rate().expect("checked by xi_hat");
    Ok(beta * (model.claim_mean() - xi * model.claim().raw_moment(2.0)))
}

/// `ψ(u) = β/(ζc)·exp(−(ζ − β/c)u)` for `Exp(ζ)` claims and `Exp(β)` waits.
pub fn exact_psi_cl_exp(model: &RiskModel, u: f64) -> Result<f64> {
    match (model.claim_rate(), model.wait_rate()) {
        (Some(zeta), Some(beta)) => {
            let c = model.premium();
            Ok(beta / (zeta * c) * (-(zeta - beta / c) * u).exp())
        }
        _ => Err(Error::UnsupportedCombination(
            "closed form needs exponential claims and interarrival times".into(),
        )),
    }
}

/// `ψ(u) = (1 − ρ/ζ)·exp(−ρu)` for `Exp(ζ)` claims and general waits.
pub fn exact_psi_sa_exp(model: &RiskModel, u: f64) -> Result<f64> {
    let zeta = model.claim_rate().ok_or_else(|| {
        Error::UnsupportedCombination("closed form needs exponential claims".into())
    })?;
    let rho = lundberg_root(model)?;
    Ok((1.0 - rho / zeta) * (-rho * u).exp())
}

/// Whichever closed form applies to the model, if any.
pub fn exact_psi(model: &RiskModel, u: f64) -> Option<f64> {
    exact_psi_cl_exp(model, u)
        .or_else(|_| exact_psi_sa_exp(model, u))
        .ok()
}
