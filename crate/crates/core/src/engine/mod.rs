//! Importance-sampling estimators of the ruin probability.
//!
//! Each replication walks `Z_n = Z_{n−1} + X_n − c·W_n` with `W_n ~ Q_W`
//! drawn before `X_n ~ Q_X`, and stops at the first `n` with `Z_n ≥ u`.
//! Replication `i` owns the generator `StreamRng::new(seed, i)`, so results
//! depend only on `(seed, K)` and never on the number of workers.

use std::time::Instant;

use log::{debug, warn};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::stats::WeightStats;
use crate::rng::StreamRng;
use crate::tilting::{RiskModel, TiltingPair};

pub const DEFAULT_MAX_STEPS: u64 = 100_000_000;

/// Simulation settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Initial reserve.
    pub u: f64,
    /// Number of replications.
    pub k: u64,
    pub seed: u64,
    pub max_steps: u64,
    /// Finite time horizon `y`.
    pub horizon: Option<f64>,
    /// Ruin threshold `b ∈ [0, u]`: ruin means the reserve falls below `b`.
    pub threshold: Option<f64>,
}

impl SimConfig {
    pub fn new(u: f64, k: u64, seed: u64) -> Self {
        Self {
            u,
            k,
            seed,
            max_steps: DEFAULT_MAX_STEPS,
            horizon: None,
            threshold: None,
        }
    }

    pub fn with_horizon(mut self, y: f64) -> Self {
        self.horizon = Some(y);
        self
    }

    pub fn with_threshold(mut self, b: f64) -> Self {
        self.threshold = Some(b);
        self
    }

    pub fn with_max_steps(mut self, max_steps: u64) -> Self {
        self.max_steps = max_steps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.u.is_finite() && self.u >= 0.0) {
            return Err(Error::Config(format!(
                "u must be finite and >= 0, got {}",
                self.u
            )));
        }
        if self.k == 0 {
            return Err(Error::Config("K must be at least 1".into()));
        }
        if self.max_steps == 0 {
            return Err(Error::Config("max_steps must be at least 1".into()));
        }
        if let Some(y) = self.horizon {
            if !(y >= 0.0) || y.is_nan() {
                return Err(Error::Config(format!("horizon must be >= 0, got {y}")));
            }
        }
        if let Some(b) = self.threshold {
            if !(b >= 0.0 && b <= self.u) {
                return Err(Error::Config(format!(
                    "threshold must lie in [0, {}], got {b}",
                    self.u
                )));
            }
        }
        Ok(())
    }

    /// Level the walk must reach: `u − b`.
    pub fn level(&self) -> f64 {
        self.u - self.threshold.unwrap_or(0.0)
    }
}

/// Result of one simulated path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicationOutcome {
    /// False only when the horizon passed first.
    pub ruined: bool,
    pub n_claims: u64,
    /// Sum of the interarrival times drawn.
    pub ruin_time: f64,
    /// `−Σγ(X_j) − Σδ(W_j)`.
    pub log_weight: f64,
    /// `Z_N − level` at ruin.
    pub overshoot: f64,
}

impl ReplicationOutcome {
    /// Contribution `1{ruin}·ℓ` to the estimator.
    pub fn contribution(&self) -> f64 {
        if self.ruined {
            self.log_weight.exp()
        } else {
            0.0
        }
    }
}

/// One `(W_n, X_n)` step of a recorded path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub wait: f64,
    pub claim: f64,
}

fn walk(
    pair: &TiltingPair,
    cfg: &SimConfig,
    index: u64,
    mut trace: Option<&mut Vec<Step>>,
) -> Result<ReplicationOutcome> {
    let mut rng = StreamRng::new(cfg.seed, index);
    let premium = pair.model().premium();
    let level = cfg.level();
    let horizon = cfg.horizon.unwrap_or(f64::INFINITY);
    let claim_law = pair.tilted_claim_law();
    let wait_law = pair.tilted_wait_law();
    let identity = pair.is_identity();
    let mut z = 0.0;
    let mut time = 0.0;
    let mut log_weight = 0.0;
    let mut n = 0u64;
    loop {
        if n == cfg.max_steps {
            return Err(Error::StepCapExceeded {
                index,
                max_steps: cfg.max_steps,
            });
        }
        n += 1;
        let w = wait_law.sample(&mut rng);
        time += w;
        if time > horizon {
            return Ok(ReplicationOutcome {
                ruined: false,
                n_claims: n - 1,
                ruin_time: time,
                log_weight,
                overshoot: 0.0,
            });
        }
        let x = claim_law.sample(&mut rng);
        if let Some(t) = trace.as_deref_mut() {
            t.push(Step { wait: w, claim: x });
        }
        if !identity {
            log_weight -= pair.gamma_at(x) + pair.delta_at(w);
        }
        z += x - premium * w;
        if z >= level {
            return Ok(ReplicationOutcome {
                ruined: true,
                n_claims: n,
                ruin_time: time,
                log_weight,
                overshoot: z - level,
            });
        }
    }
}

/// Simulates replication `index` under the tilted measure.
pub fn run_replication(
    pair: &TiltingPair,
    cfg: &SimConfig,
    index: u64,
) -> Result<ReplicationOutcome> {
    walk(pair, cfg, index, None)
}

/// As [`run_replication`], also recording every drawn `(W, X)`.
pub fn run_replication_traced(
    pair: &TiltingPair,
    cfg: &SimConfig,
    index: u64,
) -> Result<(ReplicationOutcome, Vec<Step>)> {
    let mut steps = Vec::new();
    let outcome = walk(pair, cfg, index, Some(&mut steps))?;
    Ok((outcome, steps))
}

/// Estimate with its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateReport {
    pub u: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub rse: f64,
    /// Absolute relative error against a supplied exact value.
    pub are: Option<f64>,
    pub ess: f64,
    pub max_norm_weight: f64,
    pub k: u64,
    pub seed: u64,
    pub runtime_seconds: f64,
    /// Number of replications that ended in ruin.
    pub ruined: u64,
    /// Set when the estimate exceeds one.
    pub exceeds_one: bool,
}

impl EstimateReport {
    pub fn with_exact(mut self, psi: f64) -> Self {
        self.are = Some((psi - self.estimate).abs() / psi);
        self
    }
}

/// Replication contributions `1{ruin}·ℓ_i` in index order.
pub fn contributions(pair: &TiltingPair, cfg: &SimConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let outcomes: Vec<Result<ReplicationOutcome>> = (0..cfg.k)
        .into_par_iter()
        .map(|i| run_replication(pair, cfg, i))
        .collect();
    let mut out = Vec::with_capacity(outcomes.len());
    for o in outcomes {
        out.push(o?.contribution());
    }
    Ok(out)
}

fn simulate(pair: &TiltingPair, cfg: &SimConfig) -> Result<EstimateReport> {
    let start = Instant::now();
    let weights = contributions(pair, cfg)?;
    let stats = WeightStats::from_weights(&weights);
    let ruined = weights.iter().filter(|&&w| w > 0.0).count() as u64;
    let report = EstimateReport {
        u: cfg.u,
        estimate: stats.mean,
        std_error: stats.std_error,
        rse: stats.rse,
        are: None,
        ess: stats.ess,
        max_norm_weight: stats.max_norm_weight,
        k: cfg.k,
        seed: cfg.seed,
        runtime_seconds: start.elapsed().as_secs_f64(),
        ruined,
        exceeds_one: stats.mean > 1.0,
    };
    if report.exceeds_one {
        warn!(
            "estimate {} at u = {} exceeds one",
            report.estimate, report.u
        );
    }
    debug!(
        "u = {}: estimate {:e}, rse {:e}, ess {:.1}, {:.3}s",
        report.u, report.estimate, report.rse, report.ess, report.runtime_seconds
    );
    Ok(report)
}

/// `Ψ_K(u) = (1/K)·Σ ℓ_i`. The pair is expected to be admissible; otherwise
/// paths may never ruin and hit the step cap.
pub fn estimate_psi(pair: &TiltingPair, cfg: &SimConfig) -> Result<EstimateReport> {
    if cfg.horizon.is_some() || cfg.threshold.is_some() {
        return Err(Error::Config(
            "infinite-time estimation takes neither horizon nor threshold".into(),
        ));
    }
    simulate(pair, cfg)
}

/// `Ψ_K(u, y) = (1/K)·Σ 1{τ_u ≤ y}·ℓ_i`.
pub fn estimate_psi_finite(pair: &TiltingPair, cfg: &SimConfig) -> Result<EstimateReport> {
    if cfg.horizon.is_none() {
        return Err(Error::Config(
            "finite-time estimation needs a horizon".into(),
        ));
    }
    if cfg.threshold.is_some() {
        return Err(Error::Config(
            "finite-time estimation takes no threshold".into(),
        ));
    }
    simulate(pair, cfg)
}

/// Probability that the reserve ever falls below `b`: the infinite-time
/// estimate at initial reserve `u − b`.
pub fn estimate_psi_threshold(pair: &TiltingPair, cfg: &SimConfig) -> Result<EstimateReport> {
    cfg.validate()?;
    let b = cfg
        .threshold
        .ok_or_else(|| Error::Config("threshold estimation needs a threshold".into()))?;
    let shifted = SimConfig {
        u: cfg.u - b,
        threshold: None,
        ..*cfg
    };
    let mut report = estimate_psi(pair, &shifted)?;
    report.u = cfg.u;
    Ok(report)
}

/// Crude Monte Carlo (identity tilt) with a finite horizon.
pub fn crude_finite(model: &RiskModel, cfg: &SimConfig) -> Result<EstimateReport> {
    estimate_psi_finite(&TiltingPair::identity(model), cfg)
}
