use std::fmt;

use crate::distributions::{Family, PositiveLaw};
use crate::error::{Error, Result};
use crate::numeric::quadrature::{integrate_half_line, HalfLineOptions};
use crate::rng::StreamRng;

/// A law the engine can draw from under the tilted measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SamplingLaw {
    Law(PositiveLaw),
    /// Two-component mixture: `base` with probability `base_weight`,
    /// otherwise `other`. The component is picked with one uniform draw
    /// before the component variate.
    Mixture {
        base: PositiveLaw,
        other: PositiveLaw,
        base_weight: f64,
    },
    /// Density `e^{−s·x} f(x) / L(s)`, sampled by drawing from `base` and
    /// accepting with probability `e^{−s·x}`.
    LaplaceTilted {
        base: PositiveLaw,
        s: f64,
        laplace: f64,
    },
}

impl SamplingLaw {
    pub fn sample(&self, rng: &mut StreamRng) -> f64 {
        match *self {
            SamplingLaw::Law(law) => law.sample(rng),
            SamplingLaw::Mixture {
                base,
                other,
                base_weight,
            } => {
                if rng.uniform() < base_weight {
                    base.sample(rng)
                } else {
                    other.sample(rng)
                }
            }
            SamplingLaw::LaplaceTilted { base, s, .. } => loop {
                let x = base.sample(rng);
                if rng.uniform() < (-s * x).exp() {
                    break x;
                }
            },
        }
    }

    pub fn density(&self, x: f64) -> f64 {
        match *self {
            SamplingLaw::Law(law) => law.density(x),
            SamplingLaw::Mixture {
                base,
                other,
                base_weight,
            } => base_weight * base.density(x) + (1.0 - base_weight) * other.density(x),
            SamplingLaw::LaplaceTilted { base, s, laplace } => {
                (-s * x + base.ln_density(x)).exp() / laplace
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            SamplingLaw::Law(law) => law.cdf(x),
            SamplingLaw::Mixture {
                base,
                other,
                base_weight,
            } => base_weight * base.cdf(x) + (1.0 - base_weight) * other.cdf(x),
            SamplingLaw::LaplaceTilted { .. } => {
                if x <= 0.0 {
                    return 0.0;
                }
                // ∫₀ˣ g(t) dt with t = x·e^{−y}
                let q = integrate_half_line(
                    |y: f64| {
                        let t = x * (-y).exp();
                        self.density(t) * t
                    },
                    HalfLineOptions::default(),
                );
                q.value.min(1.0)
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            SamplingLaw::Law(law) => law.mean(),
            SamplingLaw::Mixture {
                base,
                other,
                base_weight,
            } => base_weight * base.mean() + (1.0 - base_weight) * other.mean(),
            SamplingLaw::LaplaceTilted { base, s, laplace } => {
                base.exp_weighted_moment(1, -s) / laplace
            }
        }
    }
}

impl fmt::Display for SamplingLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SamplingLaw::Law(law) => write!(f, "{law}"),
            SamplingLaw::Mixture {
                base,
                other,
                base_weight,
            } => write!(f, "{base_weight}·{base} + {}·{other}", 1.0 - base_weight),
            SamplingLaw::LaplaceTilted { base, s, .. } => write!(f, "e^(-{s}x)·{base}"),
        }
    }
}

/// Size-biased version of `law` (density `x·f(x)/E[X]`), as a named law.
pub fn size_biased(law: &PositiveLaw) -> Result<PositiveLaw> {
    match law.family() {
        Family::Exp { rate } => PositiveLaw::gamma(2.0, rate),
        Family::Gamma { shape, rate } => PositiveLaw::gamma(shape + 1.0, rate),
        Family::Weibull { shape, scale } => PositiveLaw::gen_gamma(shape, scale, 1.0 + 1.0 / shape),
        Family::InvGamma { shape, scale } if shape > 1.0 => {
            PositiveLaw::inv_gamma(shape - 1.0, scale)
        }
        Family::InvWeibull { shape, scale } if shape > 1.0 => {
            PositiveLaw::gen_gamma(-shape, scale, 1.0 - 1.0 / shape)
        }
        Family::GenGamma {
            alpha,
            scale,
            shape,
        } if shape + 1.0 / alpha > 0.0 => PositiveLaw::gen_gamma(alpha, scale, shape + 1.0 / alpha),
        Family::LogNormal { mu, sigma } => PositiveLaw::log_normal(mu + sigma * sigma, sigma),
        Family::Pareto { .. } => Err(Error::UnsupportedCombination(format!(
            "no named size-biased law for {law}"
        ))),
        _ => Err(Error::NonFiniteMoment(format!("{law} has infinite mean"))),
    }
}

/// Law with survival function `S(x)^k`, i.e. cumulative hazard `k·H(x)`.
pub fn hazard_scaled(law: &PositiveLaw, k: f64) -> Result<PositiveLaw> {
    if k == 1.0 {
        return Ok(*law);
    }
    match law.family() {
        Family::Exp { rate } => PositiveLaw::exp(rate * k),
        Family::Pareto { shape, scale } => PositiveLaw::pareto(shape * k, scale),
        _ => match law.as_gen_gamma().map(|g| g.family()) {
            Some(Family::GenGamma {
                alpha,
                scale,
                shape,
            }) if shape == 1.0 && alpha > 0.0 => {
                PositiveLaw::weibull(alpha, scale * k.powf(-1.0 / alpha))
            }
            _ => Err(Error::UnsupportedHazard(law.to_string())),
        },
    }
}

/// The hazard multiplier `k` for which `hazard_scaled(law, k)` has mean `m`.
pub fn hazard_scale_for_mean(law: &PositiveLaw, m: f64) -> Result<f64> {
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::DomainError(format!(
            "target mean must be finite and > 0, got {m}"
        )));
    }
    match law.family() {
        Family::Pareto { shape, scale } => Ok((1.0 + scale / m) / shape),
        Family::Exp { rate } => Ok(1.0 / (rate * m)),
        _ => match law.as_gen_gamma().map(|g| g.family()) {
            // mean scales as k^{-1/α}
            Some(Family::GenGamma { alpha, shape, .. }) if shape == 1.0 && alpha > 0.0 => {
                Ok((law.mean() / m).powf(alpha))
            }
            _ => Err(Error::UnsupportedHazard(law.to_string())),
        },
    }
}

/// Law with density proportional to `e^{t·x} f(x)` (`t` may be negative),
/// in closed form for gamma-type laws and by rejection for `t < 0`
/// otherwise.
pub fn exponentially_tilted(law: &PositiveLaw, t: f64) -> Result<SamplingLaw> {
    if t == 0.0 {
        return Ok(SamplingLaw::Law(*law));
    }
    if let Some((shape, rate)) = law.gamma_shape_rate() {
        if t >= rate {
            return Err(Error::DomainError(format!(
                "tilt {t} outside the mgf domain of {law}"
            )));
        }
        let tilted = if matches!(law.family(), Family::Exp { .. }) {
            PositiveLaw::exp(rate - t)?
        } else {
            PositiveLaw::gamma(shape, rate - t)?
        };
        return Ok(SamplingLaw::Law(tilted));
    }
    if t < 0.0 {
        return Ok(SamplingLaw::LaplaceTilted {
            base: *law,
            s: -t,
            laplace: law.laplace_transform(-t),
        });
    }
    Err(Error::UnsupportedCombination(format!(
        "no sampling route for the exponential tilt of {law} at {t}"
    )))
}
