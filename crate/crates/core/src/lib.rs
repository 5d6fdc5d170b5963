//! Importance-sampling estimation of ruin probabilities in Sparre Andersen
//! (compound renewal) risk models.
//!
//! The reserve `R_t = u + c·t − Σ X_j` is simulated at claim instants under
//! a change of measure given by a tilting pair `(γ, δ)` acting on claim
//! sizes and interarrival times. Whenever the pair makes the tilted model
//! violate the net profit condition, ruin happens almost surely under the new
//! measure and `ψ(u) = E_Q[exp(−Σγ(X_j) − Σδ(W_j))]` with the sums taken up
//! to the ruin claim.
//!
//! * [`distributions`]: claim and interarrival laws.
//! * [`tilting`]: risk models, tilting pairs and the admissibility check.
//! * [`lundberg`]: adjustment function, Lundberg root and exact benchmarks.
//! * [`engine`]: the estimators and their diagnostics.
//! * [`cli`]: configuration files and the `ruinlab` command line.

pub mod cli;
pub mod distributions;
pub mod engine;
pub mod error;
pub mod lundberg;
pub mod numeric;
pub mod rng;
pub mod tilting;

pub use distributions::{Family, PositiveLaw};
pub use engine::{EstimateReport, SimConfig};
pub use error::{Error, Result};
pub use tilting::{RiskModel, Tilt, TiltingPair};

/// `f64` instantiations of the scalar-generic kernels.
pub type Quadrature = numeric::quadrature::Quadrature<f64>;
pub type Root = numeric::roots::Root<f64>;
pub type WeightSummary = numeric::stats::WeightStats<f64>;
