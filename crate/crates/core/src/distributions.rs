//! Positive continuous laws for claim sizes and interarrival times.
//!
//! Every family except the log-normal and the Pareto (Lomax) law is a
//! special case of the generalized gamma law `GGa(α, b, p)` with density
//!
//! ```text
//! f(x) = |α| x^{αp−1} / (b^{αp} Γ(p)) · exp(−(x/b)^α),   x > 0,
//! ```
//!
//! and is evaluated through that canonical form. The aliases keep their own
//! tag so configs round-trip unchanged:
//!
//! | family        | canonical                |
//! |---------------|--------------------------|
//! | `Exp(λ)`      | `GGa(1, 1/λ, 1)`         |
//! | `Gamma(p, λ)` | `GGa(1, 1/λ, p)` (rate λ)|
//! | `Weibull(α,b)`| `GGa(α, b, 1)`           |
//! | `InvGamma(p,b)` | `GGa(−1, b, p)`        |
//! | `InvWeibull(α,b)` | `GGa(−α, b, 1)`      |
//!
//! The Pareto law is the Lomax form on `(0, ∞)`:
//! `F(x) = 1 − (1 + x/b)^{−a}`.
//!
//! Sampling algorithms are fixed per family so a seed always yields the same
//! stream of variates:
//!
//! * exponential, Weibull, inverse Weibull, Pareto: inversion of the
//!   distribution function driven by one standard exponential `E = −ln U`;
//! * gamma, inverse gamma, generalized gamma: `b·G^{1/α}` with `G` a standard
//!   gamma variate from [`StreamRng::std_gamma`];
//! * log-normal: `exp(μ + σZ)` with a Box–Muller normal `Z`.

use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use statrs::function::gamma::{gamma, gamma_lr, gamma_ur, ln_gamma};

use crate::error::{Error, Result};
use crate::numeric::quadrature::{integrate_half_line, HalfLineOptions, Quadrature};
use crate::rng::StreamRng;

/// Relative tolerance used whenever an expectation has no closed form.
pub const QUADRATURE_REL_TOL: f64 = 1e-10;

/// Family tag and parameters, exactly as they appear in configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params")]
pub enum Family {
    #[serde(rename = "exp")]
    Exp { rate: f64 },
    /// Shape `p`, rate `λ`; mean `p/λ`.
    #[serde(rename = "gamma")]
    Gamma { shape: f64, rate: f64 },
    #[serde(rename = "weibull")]
    Weibull { shape: f64, scale: f64 },
    #[serde(rename = "inv_gamma")]
    InvGamma { shape: f64, scale: f64 },
    #[serde(rename = "inv_weibull")]
    InvWeibull { shape: f64, scale: f64 },
    #[serde(rename = "gen_gamma")]
    GenGamma { alpha: f64, scale: f64, shape: f64 },
    #[serde(rename = "lognormal")]
    LogNormal { mu: f64, sigma: f64 },
    /// Lomax form: shape `a`, scale `b`.
    #[serde(rename = "pareto")]
    Pareto { shape: f64, scale: f64 },
}

/// Internal canonical representation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Canonical {
    GenGamma { alpha: f64, scale: f64, shape: f64 },
    LogNormal { mu: f64, sigma: f64 },
    Pareto { shape: f64, scale: f64 },
}

/// A validated positive continuous law. Immutable once built.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Family", into = "Family")]
pub struct PositiveLaw {
    family: Family,
}

impl TryFrom<Family> for PositiveLaw {
    type Error = Error;

    fn try_from(family: Family) -> Result<Self> {
        PositiveLaw::new(family)
    }
}

impl From<PositiveLaw> for Family {
    fn from(law: PositiveLaw) -> Self {
        law.family
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be finite and > 0, got {v}"
        )))
    }
}

fn gamma_ratio(num: f64, den: f64) -> f64 {
    let diff = num - den;
    if diff.abs() <= 64.0 && diff == diff.round() {
        // Γ(z + n)/Γ(z) = z(z+1)…(z+n−1)
        let (lo, n) = if diff >= 0.0 {
            (den, diff)
        } else {
            (num, -diff)
        };
        let rising = (0..n as u32).fold(1.0, |acc, i| acc * (lo + i as f64));
        return if diff >= 0.0 { rising } else { 1.0 / rising };
    }
    if num < 170.0 && den < 170.0 {
        gamma(num) / gamma(den)
    } else {
        (ln_gamma(num) - ln_gamma(den)).exp()
    }
}

impl PositiveLaw {
    pub fn new(family: Family) -> Result<Self> {
        match family {
            Family::Exp { rate } => positive("rate", rate)?,
            Family::Gamma { shape, rate } => {
                positive("shape", shape)?;
                positive("rate", rate)?;
            }
            Family::Weibull { shape, scale }
            | Family::InvGamma { shape, scale }
            | Family::InvWeibull { shape, scale }
            | Family::Pareto { shape, scale } => {
                positive("shape", shape)?;
                positive("scale", scale)?;
            }
            Family::GenGamma {
                alpha,
                scale,
                shape,
            } => {
                if !alpha.is_finite() || alpha == 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "alpha must be finite and nonzero, got {alpha}"
                    )));
                }
                positive("scale", scale)?;
                positive("shape", shape)?;
            }
            Family::LogNormal { mu, sigma } => {
                if !mu.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "mu must be finite, got {mu}"
                    )));
                }
                positive("sigma", sigma)?;
            }
        }
        Ok(Self { family })
    }

    pub fn exp(rate: f64) -> Result<Self> {
        Self::new(Family::Exp { rate })
    }

    pub fn gamma(shape: f64, rate: f64) -> Result<Self> {
        Self::new(Family::Gamma { shape, rate })
    }

    pub fn weibull(shape: f64, scale: f64) -> Result<Self> {
        Self::new(Family::Weibull { shape, scale })
    }

    pub fn inv_gamma(shape: f64, scale: f64) -> Result<Self> {
        Self::new(Family::InvGamma { shape, scale })
    }

    pub fn inv_weibull(shape: f64, scale: f64) -> Result<Self> {
        Self::new(Family::InvWeibull { shape, scale })
    }

    pub fn gen_gamma(alpha: f64, scale: f64, shape: f64) -> Result<Self> {
        Self::new(Family::GenGamma {
            alpha,
            scale,
            shape,
        })
    }

    pub fn log_normal(mu: f64, sigma: f64) -> Result<Self> {
        Self::new(Family::LogNormal { mu, sigma })
    }

    pub fn pareto(shape: f64, scale: f64) -> Result<Self> {
        Self::new(Family::Pareto { shape, scale })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub(crate) fn canonical(&self) -> Canonical {
        match self.family {
            Family::Exp { rate } => Canonical::GenGamma {
                alpha: 1.0,
                scale: 1.0 / rate,
                shape: 1.0,
            },
            Family::Gamma { shape, rate } => Canonical::GenGamma {
                alpha: 1.0,
                scale: 1.0 / rate,
                shape,
            },
            Family::Weibull { shape, scale } => Canonical::GenGamma {
                alpha: shape,
                scale,
                shape: 1.0,
            },
            Family::InvGamma { shape, scale } => Canonical::GenGamma {
                alpha: -1.0,
                scale,
                shape,
            },
            Family::InvWeibull { shape, scale } => Canonical::GenGamma {
                alpha: -shape,
                scale,
                shape: 1.0,
            },
            Family::GenGamma {
                alpha,
                scale,
                shape,
            } => Canonical::GenGamma {
                alpha,
                scale,
                shape,
            },
            Family::LogNormal { mu, sigma } => Canonical::LogNormal { mu, sigma },
            Family::Pareto { shape, scale } => Canonical::Pareto { shape, scale },
        }
    }

    /// The same law expressed as `GGa(α, b, p)`, when it belongs to that family.
    pub fn as_gen_gamma(&self) -> Option<PositiveLaw> {
        match self.canonical() {
            Canonical::GenGamma {
                alpha,
                scale,
                shape,
            } => Some(PositiveLaw {
                family: Family::GenGamma {
                    alpha,
                    scale,
                    shape,
                },
            }),
            _ => None,
        }
    }

    /// Shape/rate of a gamma-type law (`GGa` with `α = 1`), used for closed
    /// forms of the Laplace transform and its exponential tilts.
    pub(crate) fn gamma_shape_rate(&self) -> Option<(f64, f64)> {
        match self.family {
            Family::Exp { rate } => Some((1.0, rate)),
            Family::Gamma { shape, rate } => Some((shape, rate)),
            Family::GenGamma {
                alpha,
                scale,
                shape,
            } if alpha == 1.0 => Some((shape, 1.0 / scale)),
            Family::Weibull { shape, scale } if shape == 1.0 => Some((1.0, 1.0 / scale)),
            _ => None,
        }
    }

    /// Characteristic scale handed to the quadrature.
    pub fn scale_hint(&self) -> f64 {
        let s = match self.canonical() {
            Canonical::GenGamma {
                alpha,
                scale,
                shape,
            } => scale * shape.powf(1.0 / alpha),
            Canonical::LogNormal { mu, .. } => mu.exp(),
            Canonical::Pareto { scale, .. } => scale,
        };
        if s.is_finite() && s > 0.0 {
            s
        } else {
            1.0
        }
    }

    pub fn ln_density(&self, x: f64) -> f64 {
        if x <= 0.0 || x.is_nan() {
            return f64::NEG_INFINITY;
        }
        match self.family {
            Family::Exp { rate } => rate.ln() - rate * x,
            _ => match self.canonical() {
                Canonical::GenGamma {
                    alpha,
                    scale,
                    shape,
                } => {
                    let z = x / scale;
                    alpha.abs().ln() + (alpha * shape - 1.0) * z.ln()
                        - scale.ln()
                        - ln_gamma(shape)
                        - z.powf(alpha)
                }
                Canonical::LogNormal { mu, sigma } => {
                    let l = x.ln();
                    let d = (l - mu) / sigma;
                    -l - sigma.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln() - 0.5 * d * d
                }
                Canonical::Pareto { shape, scale } => {
                    shape.ln() - scale.ln() - (shape + 1.0) * (x / scale).ln_1p()
                }
            },
        }
    }

    pub fn density(&self, x: f64) -> f64 {
        self.ln_density(x).exp()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x == f64::INFINITY {
            return 1.0;
        }
        match self.family {
            Family::Exp { rate } => -(-rate * x).exp_m1(),
            Family::Weibull { shape, scale } => -(-(x / scale).powf(shape)).exp_m1(),
            Family::InvWeibull { shape, scale } => (-(x / scale).powf(-shape)).exp(),
            _ => match self.canonical() {
                Canonical::GenGamma {
                    alpha,
                    scale,
                    shape,
                } => {
                    let z = (x / scale).powf(alpha);
                    if alpha > 0.0 {
                        gamma_lr(shape, z)
                    } else {
                        gamma_ur(shape, z)
                    }
                }
                Canonical::LogNormal { mu, sigma } => {
                    0.5 * erfc(-(x.ln() - mu) / (sigma * std::f64::consts::SQRT_2))
                }
                Canonical::Pareto { shape, scale } => -(-shape * (x / scale).ln_1p()).exp_m1(),
            },
        }
    }

    pub fn survival(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        match self.family {
            Family::Exp { rate } => (-rate * x).exp(),
            Family::Weibull { shape, scale } => (-(x / scale).powf(shape)).exp(),
            _ => match self.canonical() {
                Canonical::GenGamma {
                    alpha,
                    scale,
                    shape,
                } => {
                    let z = (x / scale).powf(alpha);
                    if alpha > 0.0 {
                        gamma_ur(shape, z)
                    } else {
                        gamma_lr(shape, z)
                    }
                }
                Canonical::LogNormal { mu, sigma } => {
                    0.5 * erfc((x.ln() - mu) / (sigma * std::f64::consts::SQRT_2))
                }
                Canonical::Pareto { shape, scale } => (-shape * (x / scale).ln_1p()).exp(),
            },
        }
    }

    /// `E[X^k]` for `k > 0`; `+∞` when the moment does not exist.
    pub fn raw_moment(&self, k: f64) -> f64 {
        assert!(k > 0.0, "moment order must be positive, got {k}");
        match self.family {
            Family::Exp { rate } => gamma_ratio(k + 1.0, 1.0) / rate.powf(k),
            _ => match self.canonical() {
                Canonical::GenGamma {
                    alpha,
                    scale,
                    shape,
                } => {
                    let shifted = shape + k / alpha;
                    if shifted <= 0.0 {
                        f64::INFINITY
                    } else {
                        scale.powf(k) * gamma_ratio(shifted, shape)
                    }
                }
                Canonical::LogNormal { mu, sigma } => (mu * k + 0.5 * sigma * sigma * k * k).exp(),
                Canonical::Pareto { shape, scale } => {
                    if k >= shape {
                        f64::INFINITY
                    } else {
                        scale.powf(k) * gamma_ratio(k + 1.0, 1.0) * gamma_ratio(shape - k, shape)
                    }
                }
            },
        }
    }

    pub fn mean(&self) -> f64 {
        self.raw_moment(1.0)
    }

    /// True for the families with a closed-form cumulative hazard.
    pub fn has_closed_hazard(&self) -> bool {
        self.hazard_form().is_some()
    }

    /// `(kind, p1, p2)` with kind 0 = Weibull-type `(x/b)^α`, 1 = Pareto
    /// `a·ln(1+x/b)`.
    fn hazard_form(&self) -> Option<(u8, f64, f64)> {
        match self.family {
            Family::Exp { rate } => Some((0, 1.0, 1.0 / rate)),
            Family::Pareto { shape, scale } => Some((1, shape, scale)),
            _ => match self.canonical() {
                Canonical::GenGamma {
                    alpha,
                    scale,
                    shape,
                } if shape == 1.0 && alpha > 0.0 => Some((0, alpha, scale)),
                _ => None,
            },
        }
    }

    /// `H(x) = −ln(1 − F(x))`.
    pub fn cumulative_hazard(&self, x: f64) -> Result<f64> {
        if x < 0.0 || x.is_nan() {
            return Err(Error::DomainError(format!("cumulative hazard at x = {x}")));
        }
        match (self.family, self.hazard_form()) {
            (Family::Exp { rate }, _) => Ok(rate * x),
            (_, Some((0, alpha, scale))) => Ok((x / scale).powf(alpha)),
            (_, Some((_, a, b))) => Ok(a * (x / b).ln_1p()),
            (_, None) => Err(Error::UnsupportedHazard(self.to_string())),
        }
    }

    /// Inverse of [`Self::cumulative_hazard`].
    pub fn cumulative_hazard_inverse(&self, h: f64) -> Result<f64> {
        if h < 0.0 || h.is_nan() {
            return Err(Error::DomainError(format!(
                "inverse cumulative hazard at h = {h}"
            )));
        }
        match (self.family, self.hazard_form()) {
            (Family::Exp { rate }, _) => Ok(h / rate),
            (_, Some((0, alpha, scale))) => Ok(scale * h.powf(1.0 / alpha)),
            (_, Some((_, a, b))) => Ok(b * (h / a).exp_m1()),
            (_, None) => Err(Error::UnsupportedHazard(self.to_string())),
        }
    }

    /// Abscissa of convergence `r_Z = sup{r ≥ 0 : E[e^{rZ}] < ∞}`.
    pub fn mgf_radius(&self) -> f64 {
        match self.canonical() {
            Canonical::GenGamma { alpha, scale, .. } => {
                if alpha > 1.0 {
                    f64::INFINITY
                } else if alpha == 1.0 {
                    1.0 / scale
                } else {
                    0.0
                }
            }
            Canonical::LogNormal { .. } | Canonical::Pareto { .. } => 0.0,
        }
    }

    /// `∫₀^∞ g(x) f(x) dx` by quadrature at [`QUADRATURE_REL_TOL`].
    pub fn expect<G: Fn(f64) -> f64>(&self, g: G) -> Quadrature<f64> {
        let opts = HalfLineOptions {
            rel_tol: QUADRATURE_REL_TOL,
            ..HalfLineOptions::with_scale(self.scale_hint())
        };
        integrate_half_line(|x| g(x) * self.density(x), opts)
    }

    /// `E[X^order · e^{rX}]`; `+∞` when it diverges.
    pub fn exp_weighted_moment(&self, order: u32, r: f64) -> f64 {
        if r == 0.0 {
            return if order == 0 {
                1.0
            } else {
                self.raw_moment(order as f64)
            };
        }
        if r > 0.0 && r >= self.mgf_radius() {
            return f64::INFINITY;
        }
        if let Some((p, rate)) = self.gamma_shape_rate() {
            let tilted = rate - r;
            let n = order as f64;
            return (rate / tilted).powf(p) * gamma_ratio(p + n, p) / tilted.powf(n);
        }
        let n = order as i32;
        let q = if r < 0.0 {
            self.expect(|x| x.powi(n) * (r * x).exp())
        } else {
            // keep the exponential factor inside the log-density to delay overflow
            let opts = HalfLineOptions {
                rel_tol: QUADRATURE_REL_TOL,
                ..HalfLineOptions::with_scale(self.scale_hint())
            };
            integrate_half_line(
                |x: f64| x.powi(n) * (r * x + self.ln_density(x)).exp(),
                opts,
            )
        };
        q.value
    }

    /// `E[e^{−sZ}]` for `s ≥ 0`.
    pub fn laplace_transform(&self, s: f64) -> f64 {
        assert!(s >= 0.0, "Laplace transform argument must be >= 0, got {s}");
        if s == 0.0 {
            return 1.0;
        }
        if let Some((p, rate)) = self.gamma_shape_rate() {
            return if p == 1.0 {
                rate / (rate + s)
            } else {
                (rate / (rate + s)).powf(p)
            };
        }
        self.exp_weighted_moment(0, -s)
    }

    /// `E[e^{rZ}]`; `+∞` for `r ≥ r_Z`.
    pub fn mgf(&self, r: f64) -> f64 {
        if r == 0.0 {
            return 1.0;
        }
        if r < 0.0 {
            return self.laplace_transform(-r);
        }
        if r >= self.mgf_radius() {
            return f64::INFINITY;
        }
        if let Some((p, rate)) = self.gamma_shape_rate() {
            return if p == 1.0 {
                rate / (rate - r)
            } else {
                (rate / (rate - r)).powf(p)
            };
        }
        self.exp_weighted_moment(0, r)
    }

    /// One variate; see the module docs for the algorithm used per family.
    pub fn sample(&self, rng: &mut StreamRng) -> f64 {
        match self.family {
            Family::Exp { rate } => rng.std_exponential() / rate,
            Family::Gamma { shape, rate } => rng.std_gamma(shape) / rate,
            Family::Weibull { shape, scale } => scale * rng.std_exponential().powf(1.0 / shape),
            Family::InvGamma { shape, scale } => scale / rng.std_gamma(shape),
            Family::InvWeibull { shape, scale } => scale * rng.std_exponential().powf(-1.0 / shape),
            Family::GenGamma {
                alpha,
                scale,
                shape,
            } => scale * rng.std_gamma(shape).powf(1.0 / alpha),
            Family::LogNormal { mu, sigma } => (mu + sigma * rng.std_normal()).exp(),
            Family::Pareto { shape, scale } => scale * (rng.std_exponential() / shape).exp_m1(),
        }
    }
}

impl fmt::Display for PositiveLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Exp { rate } => write!(f, "Exp({rate})"),
            Family::Gamma { shape, rate } => write!(f, "Ga({shape},{rate})"),
            Family::Weibull { shape, scale } => write!(f, "Wei({shape},{scale})"),
            Family::InvGamma { shape, scale } => write!(f, "InvGa({shape},{scale})"),
            Family::InvWeibull { shape, scale } => write!(f, "InvWei({shape},{scale})"),
            Family::GenGamma {
                alpha,
                scale,
                shape,
            } => write!(f, "GGa({alpha},{scale},{shape})"),
            Family::LogNormal { mu, sigma } => write!(f, "LN({mu},{sigma})"),
            Family::Pareto { shape, scale } => write!(f, "Pa({shape},{scale})"),
        }
    }
}
