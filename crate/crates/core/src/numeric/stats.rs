//! Summary statistics of an importance-weight sample.

use super::Scalar;

/// Diagnostics of a weight sample `ℓ_1, …, ℓ_K`.
///
/// The variance is the `1/K` second central moment, so `rse² = (K/ess − 1)/K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightStats<T> {
    pub count: usize,
    pub sum: T,
    pub sum_sq: T,
    pub mean: T,
    pub variance: T,
    pub std_error: T,
    /// `std_error / mean`; zero when every weight is zero.
    pub rse: T,
    /// `(Σℓ)² / Σℓ²`; zero when every weight is zero.
    pub ess: T,
    /// `max ℓ / Σℓ`; zero when every weight is zero.
    pub max_norm_weight: T,
    pub max: T,
}

impl<T: Scalar> WeightStats<T> {
    /// Summarises the weights in slice order. Summation order is fixed by the
    /// slice, so equal inputs give bit-identical results.
    pub fn from_weights(weights: &[T]) -> Self {
        let count = weights.len();
        let n = T::from_usize(count.max(1)).unwrap();
        let mut sum = T::zero();
        let mut sum_sq = T::zero();
        let mut max = T::zero();
        for &w in weights {
            sum = sum + w;
            sum_sq = sum_sq + w * w;
            if w > max {
                max = w;
            }
        }
        let mean = sum / n;
        let mut central = T::zero();
        for &w in weights {
            let d = w - mean;
            central = central + d * d;
        }
        let variance = central / n;
        let std_error = (variance / n).sqrt();
        let (rse, ess, max_norm_weight) = if sum > T::zero() {
            (std_error / mean, sum * sum / sum_sq, max / sum)
        } else {
            (T::zero(), T::zero(), T::zero())
        };
        Self {
            count,
            sum,
            sum_sq,
            mean,
            variance,
            std_error,
            rse,
            ess,
            max_norm_weight,
            max,
        }
    }

    /// `|exact − mean| / exact`.
    pub fn absolute_relative_error(&self, exact: T) -> T {
        ((exact - self.mean) / exact).abs()
    }
}

/// Two-sample-free Kolmogorov–Smirnov statistic of `sample` against `cdf`.
/// Sorts `sample` in place.
pub fn ks_statistic<T: Scalar, F: Fn(T) -> T>(sample: &mut [T], cdf: F) -> T {
    sample.sort_by(|a, b| a.partial_cmp(b).expect("sample contains NaN"));
    let n = T::from_usize(sample.len()).unwrap();
    let mut d = T::zero();
    for (i, &x) in sample.iter().enumerate() {
        let f = cdf(x);
        let lo = T::from_usize(i).unwrap() / n;
        let hi = T::from_usize(i + 1).unwrap() / n;
        d = d.max((f - lo).abs()).max((hi - f).abs());
    }
    d
}

/// Asymptotic p-value of the one-sample KS statistic `d` at sample size `n`,
/// with the Stephens small-sample correction.
pub fn ks_p_value<T: Scalar>(d: T, n: usize) -> T {
    let sqrt_n = T::from_usize(n).unwrap().sqrt();
    let lambda = (sqrt_n + T::lit(0.12) + T::lit(0.11) / sqrt_n) * d;
    if lambda < T::lit(1e-3) {
        return T::one();
    }
    let mut sum = T::zero();
    let mut sign = T::one();
    for k in 1..=100 {
        let k = T::from_i32(k).unwrap();
        let term = sign * (T::lit(-2.0) * k * k * lambda * lambda).exp();
        sum = sum + term;
        if term.abs() < T::epsilon() * sum.abs() {
            break;
        }
        sign = -sign;
    }
    (T::lit(2.0) * sum).max(T::zero()).min(T::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn unit_weights() {
        let s = WeightStats::from_weights(&[1.0f64; 10]);
        assert_eq!(s.mean, 1.0);
        assert_eq!(s.std_error, 0.0);
        assert_eq!(s.ess, 10.0);
        assert_eq!(s.max_norm_weight, 0.1);
    }

    #[test]
    fn all_zero_weights() {
        let s = WeightStats::from_weights(&[0.0f32; 4]);
        assert_eq!(s.mean, 0.0);
        assert_eq!(s.rse, 0.0);
        assert_eq!(s.ess, 0.0);
    }

    #[test]
    fn ks_uniform_sample() {
        let mut xs: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        let d = ks_statistic(&mut xs, |x| x);
        assert!(d <= 0.0005 + 1e-12);
        assert!(ks_p_value(d, 1000) > 0.99);
        assert!(ks_p_value(0.2f64, 1000) < 1e-10);
    }

    proptest! {
        #[test]
        fn rse_and_ess_agree(ws in prop::collection::vec(1e-6f64..1e3, 2..200)) {
            let s = WeightStats::from_weights(&ws);
            let k = ws.len() as f64;
            let lhs = s.rse * s.rse;
            let rhs = (k / s.ess - 1.0) / k;
            prop_assert!((lhs - rhs).abs() <= 1e-9 * lhs.max(1e-12), "{lhs} vs {rhs}");
            prop_assert!(s.ess <= k * (1.0 + 1e-12));
        }
    }
}
