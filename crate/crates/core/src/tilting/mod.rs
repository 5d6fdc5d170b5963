//! Risk models, tilting pairs `(γ, δ)` and the laws they induce.
//!
//! A pair changes the claim law to `dQ_X = e^{γ} dP_X` and the interarrival
//! law to `dQ_W = e^{δ} dP_W`. The engine samples from `Q_X`, `Q_W` and
//! accumulates `−γ(X) − δ(W)` along the path.

mod admissibility;
mod law;
mod model;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::distributions::PositiveLaw;
use crate::error::{Error, Result};
use crate::lundberg;

pub use admissibility::{
    check_admissible, hazard_r_max, hazard_theta_min, normalization, Admissibility, MomentMethod,
};
pub use law::{
    exponentially_tilted, hazard_scale_for_mean, hazard_scaled, size_biased, SamplingLaw,
};
pub use model::{ModelConfig, RiskModel};

/// Parametric tilt families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tilt {
    Identity,
    /// Exponential tilt of the claims at `r`, with the waits tilted through
    /// the adjustment function.
    Esscher {
        r: f64,
    },
    /// Linear tilt `γ(x) = ln((1 − ξx)/(1 − ξE[X]))`, exponential waits only.
    Linear {
        xi: f64,
    },
    /// Cumulative hazards multiplied by `r` (claims) and `theta` (waits).
    HazardTwist {
        r: f64,
        theta: f64,
    },
    /// `γ = ln(g/f_X)`, `δ = ln(h/f_W)` for target laws `g`, `h`.
    FromTarget {
        claim: PositiveLaw,
        wait: PositiveLaw,
    },
}

impl fmt::Display for Tilt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tilt::Identity => write!(f, "identity"),
            Tilt::Esscher { r } => write!(f, "esscher(r={r:e})"),
            Tilt::Linear { xi } => write!(f, "linear(xi={xi:e})"),
            Tilt::HazardTwist { r, theta } => write!(f, "hazard(r={r:e}, theta={theta:e})"),
            Tilt::FromTarget { claim, wait } => write!(f, "from_target({claim}, {wait})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Identity,
    Esscher {
        r: f64,
        ln_mx: f64,
        y: f64,
        ln_lw: f64,
    },
    Linear {
        xi: f64,
        ln_norm: f64,
        slope: f64,
    },
    Hazard {
        r: f64,
        theta: f64,
    },
    FromTarget {
        claim: PositiveLaw,
        wait: PositiveLaw,
    },
}

/// A tilt bound to a risk model, with cached normalizers and sampleable
/// tilted laws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiltingPair {
    tilt: Tilt,
    model: RiskModel,
    kind: Kind,
    claim_law: SamplingLaw,
    wait_law: SamplingLaw,
}

fn finite(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be finite, got {v}"
        )))
    }
}

impl TiltingPair {
    pub fn new(tilt: Tilt, model: &RiskModel) -> Result<Self> {
        let claim = *model.claim();
        let wait = *model.wait();
        let (kind, claim_law, wait_law) = match tilt {
            Tilt::Identity => (
                Kind::Identity,
                SamplingLaw::Law(claim),
                SamplingLaw::Law(wait),
            ),
            Tilt::Esscher { r } => {
                finite("r", r)?;
                let sol = lundberg::theta_of_r(model, r)?;
                let kind = Kind::Esscher {
                    r,
                    ln_mx: claim.mgf(r).ln(),
                    y: sol.y,
                    ln_lw: wait.laplace_transform(sol.y).ln(),
                };
                (
                    kind,
                    exponentially_tilted(&claim, r)?,
                    exponentially_tilted(&wait, -sol.y)?,
                )
            }
            Tilt::Linear { xi } => {
                if !(finite("xi", xi)? < 0.0) {
                    return Err(Error::InvalidParameter(format!("xi must be < 0, got {xi}")));
                }
                let beta = model.wait_rate().ok_or_else(|| {
                    Error::UnsupportedCombination(format!(
                        "linear tilting needs exponential interarrival times, got {wait}"
                    ))
                })?;
                let mean = model.claim_mean();
                let norm = 1.0 - xi * mean;
                let kind = Kind::Linear {
                    xi,
                    ln_norm: (-xi * mean).ln_1p(),
                    slope: xi * beta * mean,
                };
                let claim_law = SamplingLaw::Mixture {
                    base: claim,
                    other: size_biased(&claim)?,
                    base_weight: 1.0 / norm,
                };
                let wait_law = SamplingLaw::Law(PositiveLaw::exp(beta * norm)?);
                (kind, claim_law, wait_law)
            }
            Tilt::HazardTwist { r, theta } => {
                for (name, v) in [("r", r), ("theta", theta)] {
                    if !(finite(name, v)? > 0.0) {
                        return Err(Error::InvalidParameter(format!(
                            "{name} must be > 0, got {v}"
                        )));
                    }
                }
                (
                    Kind::Hazard { r, theta },
                    SamplingLaw::Law(hazard_scaled(&claim, r)?),
                    SamplingLaw::Law(hazard_scaled(&wait, theta)?),
                )
            }
            Tilt::FromTarget {
                claim: target_claim,
                wait: target_wait,
            } => {
                check_support(&claim, &target_claim)?;
                check_support(&wait, &target_wait)?;
                (
                    Kind::FromTarget {
                        claim: target_claim,
                        wait: target_wait,
                    },
                    SamplingLaw::Law(target_claim),
                    SamplingLaw::Law(target_wait),
                )
            }
        };
        Ok(Self {
            tilt,
            model: *model,
            kind,
            claim_law,
            wait_law,
        })
    }

    pub fn identity(model: &RiskModel) -> Self {
        Self::new(Tilt::Identity, model).expect("identity pair is always valid")
    }

    /// Pair whose tilted laws are the given targets.
    pub fn from_target(claim: PositiveLaw, wait: PositiveLaw, model: &RiskModel) -> Result<Self> {
        Self::new(Tilt::FromTarget { claim, wait }, model)
    }

    pub fn tilt(&self) -> Tilt {
        self.tilt
    }

    pub fn model(&self) -> &RiskModel {
        &self.model
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.kind, Kind::Identity)
    }

    /// `y(r) = θ(r) + c·r` for Esscher pairs.
    pub fn esscher_y(&self) -> Option<f64> {
        match self.kind {
            Kind::Esscher { y, .. } => Some(y),
            _ => None,
        }
    }

    /// `γ(x)` for `x > 0`.
    pub fn gamma_eval(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::DomainError(format!("γ needs x > 0, got {x}")));
        }
        Ok(self.gamma_at(x))
    }

    /// `δ(w)` for `w > 0`.
    pub fn delta_eval(&self, w: f64) -> Result<f64> {
        if !(w > 0.0) {
            return Err(Error::DomainError(format!("δ needs w > 0, got {w}")));
        }
        Ok(self.delta_at(w))
    }

    pub(crate) fn gamma_at(&self, x: f64) -> f64 {
        match self.kind {
            Kind::Identity => 0.0,
            Kind::Esscher { r, ln_mx, .. } => r * x - ln_mx,
            Kind::Linear { xi, ln_norm, .. } => (-xi * x).ln_1p() - ln_norm,
            Kind::Hazard { r, .. } => hazard_log_ratio(self.model.claim(), r, x),
            Kind::FromTarget { claim, .. } => {
                claim.ln_density(x) - self.model.claim().ln_density(x)
            }
        }
    }

    pub(crate) fn delta_at(&self, w: f64) -> f64 {
        match self.kind {
            Kind::Identity => 0.0,
            Kind::Esscher { y, ln_lw, .. } => -y * w - ln_lw,
            Kind::Linear { ln_norm, slope, .. } => ln_norm + slope * w,
            Kind::Hazard { theta, .. } => hazard_log_ratio(self.model.wait(), theta, w),
            Kind::FromTarget { wait, .. } => wait.ln_density(w) - self.model.wait().ln_density(w),
        }
    }

    /// `Q_X`.
    pub fn tilted_claim_law(&self) -> &SamplingLaw {
        &self.claim_law
    }

    /// `Q_W`.
    pub fn tilted_wait_law(&self) -> &SamplingLaw {
        &self.wait_law
    }
}

/// `ln k − (k − 1)·H(x)`; zero when `k = 1` so laws without a closed hazard
/// may stay untwisted.
fn hazard_log_ratio(law: &PositiveLaw, k: f64, x: f64) -> f64 {
    if k == 1.0 {
        return 0.0;
    }
    let h = law
        .cumulative_hazard(x)
        .expect("hazard availability checked at construction");
    k.ln() - (k - 1.0) * h
}

fn check_support(model: &PositiveLaw, target: &PositiveLaw) -> Result<()> {
    let scale = model.scale_hint();
    for k in -40..=40 {
        let x = scale * 2f64.powi(k);
        let lf = model.ln_density(x);
        let lg = target.ln_density(x);
        if lf.is_finite() && !lg.is_finite() {
            return Err(Error::SupportMismatch(format!(
                "target {target} vanishes at {x:e} where {model} does not"
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EsscherParams {
    pub r: f64,
}

/// Either an absolute `xi` or `xi_factor`, meaning `ξ = factor·ξ̂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi_factor: Option<f64>,
}

/// `theta` plus either an absolute `r` or `r_factor`, meaning
/// `r = factor·r_M(θ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HazardParams {
    pub theta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_factor: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetParams {
    pub claim: PositiveLaw,
    pub wait: PositiveLaw,
}

/// Tilt config: `{"family": "identity"|"esscher"|"linear"|"hazard"|"from_target",
/// "params": {...}}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "family",
    content = "params",
    rename_all = "snake_case",
    deny_unknown_fields
)]
pub enum TiltConfig {
    Identity,
    Esscher(EsscherParams),
    Linear(LinearParams),
    Hazard(HazardParams),
    FromTarget(TargetParams),
}

impl TiltConfig {
    /// Resolves relative parameters against `model`.
    pub fn resolve(&self, model: &RiskModel) -> Result<Tilt> {
        match *self {
            TiltConfig::Identity => Ok(Tilt::Identity),
            TiltConfig::Esscher(p) => Ok(Tilt::Esscher { r: p.r }),
            TiltConfig::Linear(p) => match (p.xi, p.xi_factor) {
                (Some(xi), None) => Ok(Tilt::Linear { xi }),
                (None, Some(f)) => Ok(Tilt::Linear {
                    xi: f * lundberg::xi_hat(model)?,
                }),
                _ => Err(Error::Config(
                    "linear tilt needs exactly one of \"xi\" or \"xi_factor\"".into(),
                )),
            },
            TiltConfig::Hazard(p) => match (p.r, p.r_factor) {
                (Some(r), None) => Ok(Tilt::HazardTwist { r, theta: p.theta }),
                (None, Some(f)) => Ok(Tilt::HazardTwist {
                    r: f * hazard_r_max(model, p.theta)?,
                    theta: p.theta,
                }),
                _ => Err(Error::Config(
                    "hazard tilt needs exactly one of \"r\" or \"r_factor\"".into(),
                )),
            },
            TiltConfig::FromTarget(p) => Ok(Tilt::FromTarget {
                claim: p.claim,
                wait: p.wait,
            }),
        }
    }

    pub fn build(&self, model: &RiskModel) -> Result<TiltingPair> {
        TiltingPair::new(self.resolve(model)?, model)
    }
}
