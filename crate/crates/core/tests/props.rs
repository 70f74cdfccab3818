//! Property-based invariants over randomized parameters: CDF shape
//! constraints, quantile/CDF inversion, credibility identities, and
//! exact recursion/batch agreement.

use proptest::prelude::*;

use opcap_core::conjugate::{
    pareto_xi_credibility, pareto_xi_step, pareto_xi_update, poisson_gamma_credibility,
    ParetoXiPosterior,
};
use opcap_core::distributions::{
    gamma_cdf, gamma_quantile, lognormal_quantile, pareto_cdf, pareto_quantile, std_normal_quantile,
};
use opcap_core::special;
use opcap_core::{GammaParams, ParetoParams};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gamma_cdf_is_monotone_into_unit_interval(
        alpha in 0.2f64..50.0,
        beta in 0.05f64..5.0,
        x1 in 0.0f64..40.0,
        dx in 0.0f64..20.0,
    ) {
        let p = GammaParams::new(alpha, beta).unwrap();
        let c1 = gamma_cdf(x1, &p).unwrap();
        let c2 = gamma_cdf(x1 + dx, &p).unwrap();
        prop_assert!((0.0..=1.0).contains(&c1));
        prop_assert!(c2 >= c1 - 1e-14);
    }

    #[test]
    fn gamma_quantile_inverts_cdf_on_interior(
        alpha in 0.3f64..40.0,
        beta in 0.05f64..4.0,
        q in 0.001f64..0.999,
    ) {
        let p = GammaParams::new(alpha, beta).unwrap();
        let x = gamma_quantile(q, &p).unwrap();
        prop_assert!((gamma_cdf(x, &p).unwrap() - q).abs() < 1e-8);
    }

    #[test]
    fn normal_and_lognormal_quantiles_invert(
        q in 0.001f64..0.999,
        mu in -2.0f64..2.0,
        sigma in 0.1f64..3.0,
    ) {
        let z = std_normal_quantile(q).unwrap();
        prop_assert!((special::std_normal_cdf(z) - q).abs() < 1e-10);
        let x = lognormal_quantile(q, mu, sigma).unwrap();
        let back = special::std_normal_cdf((x.ln() - mu) / sigma);
        prop_assert!((back - q).abs() < 1e-9);
    }

    #[test]
    fn pareto_quantile_inverts_cdf(
        q in 0.001f64..0.999,
        xi in 0.3f64..8.0,
        threshold in 0.2f64..10.0,
    ) {
        let p = ParetoParams::new(xi, threshold).unwrap();
        let x = pareto_quantile(q, &p).unwrap();
        prop_assert!(x >= threshold);
        prop_assert!((pareto_cdf(x, &p) - q).abs() < 1e-10);
    }

    #[test]
    fn poisson_gamma_credibility_identity_is_exact(
        alpha in 0.2f64..20.0,
        beta in 0.02f64..2.0,
        counts in prop::collection::vec(0u64..6, 1..30),
    ) {
        let prior = GammaParams::new(alpha, beta).unwrap();
        let cred = poisson_gamma_credibility(&prior, &counts).unwrap();
        prop_assert!(cred.weight >= 0.0 && cred.weight < 1.0);
        let combined =
            cred.weight * cred.data_estimate + (1.0 - cred.weight) * cred.prior_estimate;
        prop_assert_eq!(combined, cred.combined);
        let post = opcap_core::conjugate::poisson_gamma_update(&prior, &counts).unwrap();
        prop_assert!((cred.combined - post.mean()).abs() <= 1e-12 * post.mean().max(1e-12));
    }

    #[test]
    fn pareto_fold_equals_batch(
        alpha in 0.5f64..20.0,
        beta in 0.05f64..1.0,
        xs in prop::collection::vec(1.0f64..50.0, 1..25),
    ) {
        let prior = GammaParams::new(alpha, beta).unwrap();
        let batch = pareto_xi_update(&prior, 1.0, &xs).unwrap();
        let mut fold = ParetoXiPosterior::from_prior(prior, 1.0).unwrap();
        for &x in &xs {
            fold = pareto_xi_step(&fold, x).unwrap();
        }
        prop_assert!((fold.params.alpha - batch.params.alpha).abs()
            <= 1e-12 * batch.params.alpha);
        prop_assert!((fold.params.beta - batch.params.beta).abs() <= 1e-12 * batch.params.beta);
        // Credibility identity for the same data.
        let cred = pareto_xi_credibility(&prior, 1.0, &xs).unwrap();
        prop_assert!((cred.combined - batch.params.alpha * batch.params.beta).abs()
            <= 1e-10 * cred.combined.abs().max(1e-12));
    }

    #[test]
    fn truncation_mass_is_a_probability(
        alpha in 0.5f64..30.0,
        beta in 0.05f64..2.0,
        bound in 0.0f64..3.0,
    ) {
        let p = GammaParams::new(alpha, beta).unwrap();
        prop_assume!(special::reg_upper_gamma(alpha, bound / beta) > 1e-9);
        let t = opcap_core::TruncatedGamma::new(p, bound, f64::INFINITY).unwrap();
        prop_assert!(t.mass > 0.0 && t.mass <= 1.0 + 1e-15);
        // Quantiles respect the support.
        let x = t.quantile(0.37).unwrap();
        prop_assert!(x >= bound);
    }
}
