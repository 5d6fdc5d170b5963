use serde::{Deserialize, Serialize};

use crate::distributions::PositiveLaw;
use crate::error::{Error, Result};

/// Sparre Andersen risk model: i.i.d. claims, i.i.d. interarrival times and
/// a constant premium rate satisfying the net profit condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskModel {
    claim: PositiveLaw,
    wait: PositiveLaw,
    premium: f64,
    claim_mean: f64,
    wait_mean: f64,
}

impl RiskModel {
    pub fn new(claim: PositiveLaw, wait: PositiveLaw, premium: f64) -> Result<Self> {
        if !(premium.is_finite() && premium > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "premium rate must be finite and > 0, got {premium}"
            )));
        }
        let claim_mean = claim.mean();
        let wait_mean = wait.mean();
        if !claim_mean.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "claim law {claim} has infinite mean"
            )));
        }
        if !wait_mean.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "interarrival law {wait} has infinite mean"
            )));
        }
        let income = premium * wait_mean;
        if income <= claim_mean {
            return Err(Error::NetProfitViolated {
                lhs: income,
                rhs: claim_mean,
            });
        }
        Ok(Self {
            claim,
            wait,
            premium,
            claim_mean,
            wait_mean,
        })
    }

    /// Premium `c = (1 + η)·E[X]/E[W]` from the safety loading `η > 0`.
    pub fn with_loading(claim: PositiveLaw, wait: PositiveLaw, loading: f64) -> Result<Self> {
        if !(loading.is_finite() && loading > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "safety loading must be finite and > 0, got {loading}"
            )));
        }
        let premium = (1.0 + loading) * claim.mean() / wait.mean();
        Self::new(claim, wait, premium)
    }

    pub fn claim(&self) -> &PositiveLaw {
        &self.claim
    }

    pub fn wait(&self) -> &PositiveLaw {
        &self.wait
    }

    pub fn premium(&self) -> f64 {
        self.premium
    }

    pub fn claim_mean(&self) -> f64 {
        self.claim_mean
    }

    pub fn wait_mean(&self) -> f64 {
        self.wait_mean
    }

    /// Implied safety loading `c·E[W]/E[X] − 1`.
    pub fn loading(&self) -> f64 {
        self.premium * self.wait_mean / self.claim_mean - 1.0
    }

    /// Rate `β` when interarrival times are exponential.
    pub fn wait_rate(&self) -> Option<f64> {
        match self.wait.gamma_shape_rate() {
            Some((shape, rate)) if shape == 1.0 => Some(rate),
            _ => None,
        }
    }

    /// Rate `ζ` when claim sizes are exponential.
    pub fn claim_rate(&self) -> Option<f64> {
        match self.claim.gamma_shape_rate() {
            Some((shape, rate)) if shape == 1.0 => Some(rate),
            _ => None,
        }
    }
}

/// Model config:
/// `{"claim": <law>, "wait": <law>, "premium": c}` or with `"loading": η`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub claim: PositiveLaw,
    pub wait: PositiveLaw,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub premium: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loading: Option<f64>,
}

impl ModelConfig {
    pub fn build(&self) -> Result<RiskModel> {
        match (self.premium, self.loading) {
            (Some(c), None) => RiskModel::new(self.claim, self.wait, c),
            (None, Some(eta)) => RiskModel::with_loading(self.claim, self.wait, eta),
            _ => Err(Error::Config(
                "model config needs exactly one of \"premium\" or \"loading\"".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loading_sets_premium() {
        let m = RiskModel::with_loading(
            PositiveLaw::exp(1.0).unwrap(),
            PositiveLaw::gamma(2.0, 1.0).unwrap(),
            0.5,
        )
        .unwrap();
        assert!((m.premium() - 0.75).abs() < 1e-15, "{}", m.premium());
        assert!((m.loading() - 0.5).abs() < 1e-15);
        assert_eq!(m.wait_rate(), None);
        assert_eq!(m.claim_rate(), Some(1.0));
    }

    #[test]
    fn net_profit_condition_enforced() {
        let e = PositiveLaw::exp(1.0).unwrap();
        assert!(matches!(
            RiskModel::new(e, e, 1.0),
            Err(Error::NetProfitViolated { .. })
        ));
        assert!(matches!(
            RiskModel::new(e, e, 0.5),
            Err(Error::NetProfitViolated { .. })
        ));
        assert!(RiskModel::new(e, e, 1.0 + 1e-9).is_ok());
    }

    #[test]
    fn infinite_mean_rejected() {
        let pa = PositiveLaw::pareto(0.9, 1.0).unwrap();
        let e = PositiveLaw::exp(1.0).unwrap();
        assert!(matches!(
            RiskModel::new(pa, e, 10.0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn config_forms() {
        let text = r#"{"claim":{"family":"exp","params":{"rate":1.0}},
                       "wait":{"family":"exp","params":{"rate":1.0}},"loading":0.5}"#;
        let cfg: ModelConfig = serde_json::from_str(text).unwrap();
        assert!((cfg.build().unwrap().premium() - 1.5).abs() < 1e-15);
        let both = r#"{"claim":{"family":"exp","params":{"rate":1.0}},
                       "wait":{"family":"exp","params":{"rate":1.0}},"loading":0.5,"premium":2}"#;
        let cfg: ModelConfig = serde_json::from_str(both).unwrap();
        assert!(matches!(cfg.build(), Err(Error::Config(_))));
    }
}
