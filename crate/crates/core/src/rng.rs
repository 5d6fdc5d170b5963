//! Deterministic per-replication random streams.
//!
//! Replication `i` of a run with master seed `s` draws from ChaCha8 keyed by
//! `s` (expanded through `SeedableRng::seed_from_u64`) on stream `i`. ChaCha
//! is counter based, so streams are independent of each other and of the
//! order in which replications execute.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Single-owner generator handed to one replication.
#[derive(Debug, Clone)]
pub struct StreamRng {
    inner: ChaCha8Rng,
}

const TWO_POW_MINUS_53: f64 = 1.0 / (1u64 << 53) as f64;

impl StreamRng {
    /// Stream `stream` of the master seed `seed`.
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { inner }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on the open interval (0, 1): the top 53 bits, offset by half
    /// an ulp so neither endpoint is reachable.
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * TWO_POW_MINUS_53
    }

    /// Standard exponential by inversion, `-ln U`.
    pub fn std_exponential(&mut self) -> f64 {
        -self.uniform().ln()
    }

    /// Standard normal by Box–Muller (cosine branch only; one normal per two
    /// uniforms).
    pub fn std_normal(&mut self) -> f64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Standard gamma variate with the given shape (unit rate).
    ///
    /// Shape 1 uses [`Self::std_exponential`]. Shape ≥ 1 uses the
    /// Marsaglia–Tsang squeeze/rejection method with Box–Muller normals;
    /// shape < 1 boosts a shape+1 draw by `U^{1/shape}`.
    pub fn std_gamma(&mut self, shape: f64) -> f64 {
        if shape == 1.0 {
            return self.std_exponential();
        }
        if shape < 1.0 {
            let g = self.std_gamma(shape + 1.0);
            return g * self.uniform().powf(1.0 / shape);
        }
        let d = shape - 1.0 / 3.0;
        let c = 1.0 / (9.0 * d).sqrt();
        loop {
            let (x, v) = loop {
                let x = self.std_normal();
                let v = 1.0 + c * x;
                if v > 0.0 {
                    break (x, v * v * v);
                }
            };
            let u = self.uniform();
            let x2 = x * x;
            if u < 1.0 - 0.0331 * x2 * x2 {
                return d * v;
            }
            if u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
                return d * v;
            }
        }
    }
}
