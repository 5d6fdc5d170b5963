use proptest::prelude::*;
use ruinlab::engine::{contributions, SimConfig};
use ruinlab::lundberg;
use ruinlab::numeric::quadrature::{integrate_half_line, HalfLineOptions};
use ruinlab::tilting::{check_admissible, hazard_r_max, hazard_theta_min, normalization};
use ruinlab::{Family, PositiveLaw, RiskModel, Tilt, TiltingPair};

fn law_strategy() -> impl Strategy<Value = PositiveLaw> {
    prop_oneof![
        (0.1..10.0f64).prop_map(|r| PositiveLaw::exp(r).unwrap()),
        (0.5..10.0f64, 0.1..10.0f64).prop_map(|(p, r)| PositiveLaw::gamma(p, r).unwrap()),
        (0.3..5.0f64, 0.1..10.0f64).prop_map(|(a, b)| PositiveLaw::weibull(a, b).unwrap()),
        (0.5..10.0f64, 0.1..10.0f64).prop_map(|(p, b)| PositiveLaw::inv_gamma(p, b).unwrap()),
        (0.5..5.0f64, 0.1..10.0f64).prop_map(|(a, b)| PositiveLaw::inv_weibull(a, b).unwrap()),
        (0.3..3.0f64, any::<bool>(), 0.1..10.0f64, 0.5..5.0f64).prop_map(|(a, neg, b, p)| {
            PositiveLaw::gen_gamma(if neg { -a } else { a }, b, p).unwrap()
        }),
        (-2.0..2.0f64, 0.2..2.0f64).prop_map(|(m, s)| PositiveLaw::log_normal(m, s).unwrap()),
        (0.5..5.0f64, 0.1..10.0f64).prop_map(|(a, b)| PositiveLaw::pareto(a, b).unwrap()),
    ]
}

fn integrate_density(law: &PositiveLaw) -> f64 {
    let opts = HalfLineOptions {
        rel_tol: 1e-10,
        ..HalfLineOptions::with_scale(law.scale_hint())
    };
    integrate_half_line(|x: f64| law.density(x), opts).value
}

fn exp_waits_model(claim: PositiveLaw, beta: f64, eta: f64) -> RiskModel {
    RiskModel::with_loading(claim, PositiveLaw::exp(beta).unwrap(), eta).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn densities_integrate_to_one(law in law_strategy()) {
        let total = integrate_density(&law);
        prop_assert!((total - 1.0).abs() < 1e-8, "{law}: {total}");
    }

    #[test]
    fn first_moment_matches_quadrature(law in law_strategy()) {
        let m = law.raw_moment(1.0);
        prop_assume!(m.is_finite() && law.raw_moment(1.5).is_finite());
        let q = law.expect(|x| x).value;
        prop_assert!(((q - m) / m).abs() < 1e-8, "{law}: {q} vs {m}");
    }

    #[test]
    fn transforms_at_zero_are_one(law in law_strategy()) {
        prop_assert_eq!(law.mgf(0.0), 1.0);
        prop_assert_eq!(law.laplace_transform(0.0), 1.0);
    }

    #[test]
    fn hazard_inverse_round_trip(
        law in prop_oneof![
            (0.1..10.0f64).prop_map(|r| PositiveLaw::exp(r).unwrap()),
            (0.3..5.0f64, 0.1..10.0f64).prop_map(|(a, b)| PositiveLaw::weibull(a, b).unwrap()),
            (0.5..5.0f64, 0.1..10.0f64).prop_map(|(a, b)| PositiveLaw::pareto(a, b).unwrap()),
        ],
    ) {
        for i in 1..=100 {
            let h = i as f64 * 0.1;
            let x = law.cumulative_hazard_inverse(h).unwrap();
            let back = law.cumulative_hazard(x).unwrap();
            prop_assert!((back - h).abs() <= 1e-10 * h, "{law}: {h} -> {back}");
        }
    }

    #[test]
    fn gamma_is_generalized_gamma(p in 0.3..10.0f64, rate in 0.1..10.0f64) {
        let a = PositiveLaw::gamma(p, rate).unwrap();
        let b = PositiveLaw::gen_gamma(1.0, 1.0 / rate, p).unwrap();
        for i in 1..=100 {
            let x = i as f64 * 0.1 / rate;
            let (fa, fb) = (a.density(x), b.density(x));
            prop_assert!((fa - fb).abs() <= 1e-12 * fa.max(1e-300));
        }
    }

    #[test]
    fn law_config_round_trips_bit_exactly(law in law_strategy()) {
        let text = serde_json::to_string(&law).unwrap();
        let back: PositiveLaw = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, law);
    }

    #[test]
    fn adjustment_residual_small(
        zeta in 0.2..5.0f64,
        shape in 0.5..4.0f64,
        rate in 0.2..5.0f64,
        eta in 0.05..2.0f64,
        frac in 0.0..0.999f64,
    ) {
        let claim = PositiveLaw::exp(zeta).unwrap();
        let wait = PositiveLaw::gamma(shape, rate).unwrap();
        let m = RiskModel::with_loading(claim, wait, eta).unwrap();
        let sol = lundberg::theta_of_r(&m, frac * zeta).unwrap();
        prop_assert!(sol.residual <= lundberg::ADJUSTMENT_RESIDUAL_TOL, "{sol:?}");
    }

    #[test]
    fn exact_formulas_agree(
        theta in 0.2..5.0f64,
        beta in 0.2..5.0f64,
        eta in 0.05..2.0f64,
        u in 0.0..30.0f64,
    ) {
        let m = exp_waits_model(PositiveLaw::exp(theta).unwrap(), beta, eta);
        let a = lundberg::exact_psi_cl_exp(&m, u).unwrap();
        let b = lundberg::exact_psi_sa_exp(&m, u).unwrap();
        prop_assert!(((a - b) / a).abs() < 1e-12, "{a} vs {b}");
    }

    #[test]
    fn mmm_premium_recovers_model_premium(
        claim in law_strategy(),
        beta in 0.2..5.0f64,
        eta in 0.05..2.0f64,
    ) {
        prop_assume!(claim.raw_moment(2.0).is_finite());
        let m = exp_waits_model(claim, beta, eta);
        let c_hat = lundberg::mmm_premium(&m).unwrap();
        prop_assert!(((c_hat - m.premium()) / m.premium()).abs() < 1e-12);
        prop_assert!(lundberg::xi_hat(&m).unwrap() < 0.0);
    }

    #[test]
    fn linear_normalization(
        claim in law_strategy(),
        beta in 0.2..5.0f64,
        eta in 0.05..2.0f64,
        factor in 1.0..4.0f64,
    ) {
        prop_assume!(claim.raw_moment(2.0).is_finite() && claim.raw_moment(2.5).is_finite());
        prop_assume!(claim.as_gen_gamma().is_some() || matches!(claim.family(), Family::LogNormal { .. }));
        let m = exp_waits_model(claim, beta, eta);
        let xi = factor * lundberg::xi_hat(&m).unwrap();
        let pair = TiltingPair::new(Tilt::Linear { xi }, &m).unwrap();
        let (qx, qw) = normalization(&pair);
        prop_assert!((qx.value - 1.0).abs() < 1e-8, "{claim}: {}", qx.value);
        prop_assert!((qw.value - 1.0).abs() < 1e-8);
        prop_assert!(check_admissible(&pair).unwrap().in_c_p);
    }

    #[test]
    fn hazard_normalization_and_bounds(
        a in 1.2..5.0f64,
        b in 0.5..5.0f64,
        alpha in 0.3..3.0f64,
        scale in 0.2..3.0f64,
        theta in 0.5..1.9f64,
        factor in 0.5..1.0f64,
    ) {
        let m = RiskModel::with_loading(
            PositiveLaw::pareto(a, b).unwrap(),
            PositiveLaw::weibull(alpha, scale).unwrap(),
            0.5,
        )
        .unwrap();
        let r_m = hazard_r_max(&m, theta).unwrap();
        let back = hazard_theta_min(&m, r_m).unwrap();
        prop_assert!((back - theta).abs() <= 1e-10 * theta);
        let r = factor * r_m;
        prop_assume!(a * r > 1.05);
        let pair = TiltingPair::new(Tilt::HazardTwist { r, theta }, &m).unwrap();
        let (qx, qw) = normalization(&pair);
        prop_assert!((qx.value - 1.0).abs() < 1e-8, "{}", qx.value);
        prop_assert!((qw.value - 1.0).abs() < 1e-8, "{}", qw.value);
        prop_assert!(check_admissible(&pair).unwrap().in_c_p);
    }

    #[test]
    fn esscher_normalization(
        zeta in 0.5..3.0f64,
        shape in 0.5..3.0f64,
        eta in 0.1..1.0f64,
        frac in 0.0..0.9f64,
    ) {
        let m = RiskModel::with_loading(
            PositiveLaw::exp(zeta).unwrap(),
            PositiveLaw::gamma(shape, 1.0).unwrap(),
            eta,
        )
        .unwrap();
        let pair = TiltingPair::new(Tilt::Esscher { r: frac * zeta }, &m).unwrap();
        let (qx, qw) = normalization(&pair);
        prop_assert!((qx.value - 1.0).abs() < 1e-8);
        prop_assert!((qw.value - 1.0).abs() < 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn weights_positive_and_identity_weights_one(seed in any::<u64>(), u in 0.0..5.0f64) {
        let e = PositiveLaw::exp(1.0).unwrap();
        let m = RiskModel::new(e, e, 1.5).unwrap();
        let xi = 1.95 * lundberg::xi_hat(&m).unwrap();
        let pair = TiltingPair::new(Tilt::Linear { xi }, &m).unwrap();
        let w = contributions(&pair, &SimConfig::new(u, 200, seed)).unwrap();
        prop_assert!(w.iter().all(|&v| v > 0.0 && v.is_finite()));
        let crude = contributions(
            &TiltingPair::identity(&m),
            &SimConfig::new(u, 200, seed).with_horizon(5.0),
        )
        .unwrap();
        prop_assert!(crude.iter().all(|&v| v == 0.0 || v == 1.0));
    }

    #[test]
    fn monotone_tilts_are_admissible(r in 0.0..1.0f64, theta in 1.0..5.0f64, k in 0.0..1.0f64) {
        // γ nondecreasing and δ nonincreasing in every case below
        let e = PositiveLaw::exp(1.0).unwrap();
        let m = RiskModel::new(e, e, 1.5).unwrap();
        let rho = lundberg::lundberg_root(&m).unwrap();
        let esscher = rho + k * (0.95 - rho);
        let r_m = hazard_r_max(&m, theta).unwrap();
        for t in [
            Tilt::Esscher { r: esscher },
            Tilt::HazardTwist { r: (r * r_m.min(1.0)).max(1e-3), theta },
        ] {
            let pair = TiltingPair::new(t, &m).unwrap();
            prop_assert!(check_admissible(&pair).unwrap().in_c_p, "{t}");
        }
    }
}
