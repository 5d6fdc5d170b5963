use crate::error::{Error, Result};
use crate::numeric::quadrature::{integrate_half_line, HalfLineOptions, Quadrature};
use crate::tilting::law::{hazard_scale_for_mean, hazard_scaled};
use crate::tilting::{RiskModel, SamplingLaw, TiltingPair};

/// How the tilted first moments were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentMethod {
    ClosedForm,
    Quadrature,
}

/// Both sides of `c·E_P[W e^{δ(W)}] ≤ E_P[X e^{γ(X)}]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Admissibility {
    pub in_c_p: bool,
    /// `c·E_Q[W]`.
    pub lhs: f64,
    /// `E_Q[X]`.
    pub rhs: f64,
    pub method: MomentMethod,
}

fn uses_quadrature(law: &SamplingLaw) -> bool {
    matches!(law, SamplingLaw::LaplaceTilted { .. })
}

/// Decides whether the tilted model violates the net profit condition.
pub fn check_admissible(pair: &TiltingPair) -> Result<Admissibility> {
    let claim = pair.tilted_claim_law();
    let wait = pair.tilted_wait_law();
    let rhs = claim.mean();
    let wait_mean = wait.mean();
    if !rhs.is_finite() {
        return Err(Error::NonFiniteMoment(format!(
            "tilted claim law {claim} has infinite mean"
        )));
    }
    if !wait_mean.is_finite() {
        return Err(Error::NonFiniteMoment(format!(
            "tilted interarrival law {wait} has infinite mean"
        )));
    }
    let lhs = pair.model().premium() * wait_mean;
    let method = if uses_quadrature(claim) || uses_quadrature(wait) {
        MomentMethod::Quadrature
    } else {
        MomentMethod::ClosedForm
    };
    Ok(Admissibility {
        in_c_p: lhs <= rhs,
        lhs,
        rhs,
        method,
    })
}

/// Mean of the `θ`-twisted interarrival law.
fn twisted_wait_mean(model: &RiskModel, theta: f64) -> Result<f64> {
    if theta == 1.0 {
        return Ok(model.wait_mean());
    }
    Ok(hazard_scaled(model.wait(), theta)?.mean())
}

/// Largest claim twist `r_M(θ)` keeping `(r, θ)` admissible: the `r` with
/// `E_Q[X] = c·E_Q[W]`.
pub fn hazard_r_max(model: &RiskModel, theta: f64) -> Result<f64> {
    if !(theta.is_finite() && theta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "theta must be > 0, got {theta}"
        )));
    }
    let target = model.premium() * twisted_wait_mean(model, theta).map_err(unsupported)?;
    hazard_scale_for_mean(model.claim(), target).map_err(unsupported)
}

/// Smallest wait twist `θ_m(r)` keeping `(r, θ)` admissible.
pub fn hazard_theta_min(model: &RiskModel, r: f64) -> Result<f64> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidParameter(format!("r must be > 0, got {r}")));
    }
    let claim_mean = if r == 1.0 {
        model.claim_mean()
    } else {
        hazard_scaled(model.claim(), r).map_err(unsupported)?.mean()
    };
    if !claim_mean.is_finite() {
        return Err(Error::NonFiniteMoment(format!(
            "twisted claim law has infinite mean at r = {r}"
        )));
    }
    hazard_scale_for_mean(model.wait(), claim_mean / model.premium()).map_err(unsupported)
}

fn unsupported(e: Error) -> Error {
    match e {
        Error::UnsupportedHazard(m) => {
            Error::UnsupportedCombination(format!("no closed-form hazard for {m}"))
        }
        other => other,
    }
}

fn tilted_scale(law: &SamplingLaw, fallback: f64) -> f64 {
    let m = law.mean();
    if m.is_finite() && m > 0.0 {
        m
    } else {
        fallback
    }
}

/// `(∫ e^{γ} dP_X, ∫ e^{δ} dP_W)` by quadrature.
pub fn normalization(pair: &TiltingPair) -> (Quadrature<f64>, Quadrature<f64>) {
    let model = pair.model();
    let claim_opts = HalfLineOptions {
        rel_tol: 1e-10,
        ..HalfLineOptions::with_scale(tilted_scale(
            pair.tilted_claim_law(),
            model.claim().scale_hint(),
        ))
    };
    let wait_opts = HalfLineOptions {
        rel_tol: 1e-10,
        ..HalfLineOptions::with_scale(tilted_scale(
            pair.tilted_wait_law(),
            model.wait().scale_hint(),
        ))
    };
    let claim = integrate_half_line(
        |x: f64| (pair.gamma_at(x) + model.claim().ln_density(x)).exp(),
        claim_opts,
    );
    let wait = integrate_half_line(
        |w: f64| (pair.delta_at(w) + model.wait().ln_density(w)).exp(),
        wait_opts,
    );
    (claim, wait)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::PositiveLaw;
    use crate::lundberg;
    use crate::tilting::Tilt;

    fn exp_exp() -> RiskModel {
        let e = PositiveLaw::exp(1.0).unwrap();
        RiskModel::new(e, e, 1.5).unwrap()
    }

    fn table4(a: f64) -> RiskModel {
        RiskModel::with_loading(
            PositiveLaw::pareto(a, 3.0).unwrap(),
            PositiveLaw::weibull(0.375, 0.5).unwrap(),
            0.5,
        )
        .unwrap()
    }

    #[test]
    fn identity_rejected_under_npc() {
        let m = exp_exp();
        let a = check_admissible(&TiltingPair::identity(&m)).unwrap();
        assert!(!a.in_c_p);
        assert_eq!(a.lhs, 1.5);
        assert_eq!(a.rhs, 1.0);
    }

    #[test]
    fn linear_boundary_equality() {
        let m = exp_exp();
        let xi = lundberg::xi_hat(&m).unwrap();
        let a = check_admissible(&TiltingPair::new(Tilt::Linear { xi }, &m).unwrap()).unwrap();
        assert!(((a.lhs - a.rhs) / a.rhs).abs() < 1e-10, "{a:?}");
        assert_eq!(a.method, MomentMethod::ClosedForm);
        let a = check_admissible(&TiltingPair::new(Tilt::Linear { xi: 1.95 * xi }, &m).unwrap())
            .unwrap();
        assert!(a.in_c_p);
        let a = check_admissible(&TiltingPair::new(Tilt::Linear { xi: 0.5 * xi }, &m).unwrap())
            .unwrap();
        assert!(!a.in_c_p);
    }

    #[test]
    fn hazard_bounds_are_inverse() {
        let m = table4(1.5);
        for theta in [0.5, 1.0, 1.2, 2.0] {
            let r = hazard_r_max(&m, theta).unwrap();
            let back = hazard_theta_min(&m, r).unwrap();
            assert!(
                (back - theta).abs() < 1e-10 * theta,
                "{theta} -> {r} -> {back}"
            );
            // closed form for Pareto claims and Weibull waits
            let want = (1.0 + 3.0 * theta.powf(1.0 / 0.375) / (m.premium() * m.wait_mean())) / 1.5;
            assert!((r - want).abs() < 1e-12 * want);
            let want_theta =
                (m.premium() / 3.0).powf(0.375) * ((1.5 * r - 1.0) * m.wait_mean()).powf(0.375);
            assert!((back - want_theta).abs() < 1e-10 * want_theta);
        }
    }

    #[test]
    fn hazard_boundary_equality_and_table_configs() {
        for a in [1.5, 2.0, 2.5] {
            let m = table4(a);
            let r_m = hazard_r_max(&m, 1.2).unwrap();
            let at = check_admissible(
                &TiltingPair::new(Tilt::HazardTwist { r: r_m, theta: 1.2 }, &m).unwrap(),
            )
            .unwrap();
            assert!(((at.lhs - at.rhs) / at.rhs).abs() < 1e-10, "{at:?}");
            let inside = check_admissible(
                &TiltingPair::new(
                    Tilt::HazardTwist {
                        r: 0.95 * r_m,
                        theta: 1.2,
                    },
                    &m,
                )
                .unwrap(),
            )
            .unwrap();
            assert!(inside.in_c_p);
        }
    }

    #[test]
    fn r_max_quadrature_oracle() {
        // c·E_P[W e^δ] = E_P[X e^γ] at r_M, both sides by direct quadrature
        let m = table4(1.5);
        let r = hazard_r_max(&m, 1.2).unwrap();
        let pair = TiltingPair::new(Tilt::HazardTwist { r, theta: 1.2 }, &m).unwrap();
        let rhs = m.claim().expect(|x| x * pair.gamma_at(x).exp()).value;
        let lhs = m.premium() * m.wait().expect(|w| w * pair.delta_at(w).exp()).value;
        assert!(((lhs - rhs) / rhs).abs() < 1e-8, "{lhs} vs {rhs}");
    }

    #[test]
    fn counterexample_rejected() {
        // γ(x) = −0.1x − ln M_X(−0.1), δ(w) = 0.1w − ln M_W(0.1)
        let m = exp_exp();
        let pair = TiltingPair::from_target(
            PositiveLaw::exp(1.1).unwrap(),
            PositiveLaw::exp(0.9).unwrap(),
            &m,
        )
        .unwrap();
        let r: f64 = 0.1;
        let want = -r - (1.0 / (1.0 + r)).ln();
        assert!((pair.gamma_eval(1.0).unwrap() - want).abs() < 1e-14);
        let a = check_admissible(&pair).unwrap();
        assert!(!a.in_c_p);
        assert!((a.lhs - 1.5 / 0.9).abs() < 1e-14);
    }

    #[test]
    fn from_target_admissible_by_means() {
        let m = exp_exp();
        let pair = TiltingPair::from_target(
            PositiveLaw::gamma(2.0, 1.0).unwrap(),
            PositiveLaw::exp(1.0).unwrap(),
            &m,
        )
        .unwrap();
        let a = check_admissible(&pair).unwrap();
        assert!(a.in_c_p);
        assert_eq!((a.lhs, a.rhs), (1.5, 2.0));
    }

    #[test]
    fn monotone_pairs_are_admissible() {
        // γ increasing and δ decreasing
        let m = exp_exp();
        let rho = lundberg::lundberg_root(&m).unwrap();
        let xi = lundberg::xi_hat(&m).unwrap();
        let pairs = [
            Tilt::Esscher { r: rho },
            Tilt::Esscher { r: 0.5 },
            Tilt::Linear { xi: 1.95 * xi },
            Tilt::Linear { xi: -3.0 },
            Tilt::HazardTwist { r: 0.6, theta: 1.5 },
            Tilt::HazardTwist { r: 0.3, theta: 4.0 },
        ];
        for t in pairs {
            let pair = TiltingPair::new(t, &m).unwrap();
            let xs: Vec<f64> = (1..60).map(|i| i as f64 * 0.2).collect();
            for w in xs.windows(2) {
                assert!(pair.gamma_at(w[1]) >= pair.gamma_at(w[0]), "{t}");
                assert!(pair.delta_at(w[1]) <= pair.delta_at(w[0]), "{t}");
            }
            assert!(check_admissible(&pair).unwrap().in_c_p, "{t}");
        }
    }

    #[test]
    fn esscher_interval_starts_at_memm_point() {
        let m = exp_exp();
        let rm = lundberg::memm_point(&m).unwrap().r;
        let at = check_admissible(&TiltingPair::new(Tilt::Esscher { r: rm }, &m).unwrap()).unwrap();
        assert!(((at.lhs - at.rhs) / at.rhs).abs() < 1e-9);
        let below =
            check_admissible(&TiltingPair::new(Tilt::Esscher { r: rm * 0.99 }, &m).unwrap())
                .unwrap();
        assert!(!below.in_c_p);
        let rho = lundberg::lundberg_root(&m).unwrap();
        assert!(
            check_admissible(&TiltingPair::new(Tilt::Esscher { r: rho }, &m).unwrap())
                .unwrap()
                .in_c_p
        );
    }

    #[test]
    fn infinite_tilted_mean_reported() {
        let m = table4(1.5);
        // a·r ≤ 1 leaves the twisted Pareto without a mean
        let pair = TiltingPair::new(Tilt::HazardTwist { r: 0.6, theta: 1.2 }, &m).unwrap();
        assert!(matches!(
            check_admissible(&pair),
            Err(Error::NonFiniteMoment(_))
        ));
    }

    #[test]
    fn quadrature_path_recorded() {
        let m = RiskModel::with_loading(
            PositiveLaw::exp(1.0).unwrap(),
            PositiveLaw::weibull(0.375, 0.5).unwrap(),
            0.5,
        )
        .unwrap();
        let rho = lundberg::lundberg_root(&m).unwrap();
        let a = check_admissible(&TiltingPair::new(Tilt::Esscher { r: rho }, &m).unwrap()).unwrap();
        assert_eq!(a.method, MomentMethod::Quadrature);
        assert!(a.in_c_p);
    }

    #[test]
    fn normalization_holds() {
        let m = exp_exp();
        let pair = TiltingPair::new(Tilt::Linear { xi: -0.4875 }, &m).unwrap();
        let (qx, qw) = normalization(&pair);
        assert!((qx.value - 1.0).abs() < 1e-8);
        assert!((qw.value - 1.0).abs() < 1e-8);
    }
}
