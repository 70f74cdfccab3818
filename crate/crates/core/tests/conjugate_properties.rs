//! Structural properties of the conjugate updaters: the posterior is
//! proportional to prior × likelihood (density-ratio check on a grid),
//! recursion matches batch updating, posterior spread contracts, and
//! the Bayes trajectory of the truncated Pareto-Gamma model behaves.

mod common;

use opcap_core::conjugate::{
    lognormal_mu_step, lognormal_mu_update, pareto_xi_step, pareto_xi_update, poisson_gamma_step,
    poisson_gamma_update, truncated_posterior_mean, NormalMuPosterior, ParetoXiPosterior,
    PoissonGammaPosterior,
};
use opcap_core::distributions::{gamma_pdf, normal_pdf};
use opcap_core::rng::{sample_pareto, RngStream};
use opcap_core::special;
use opcap_core::{GammaParams, NormalParams, ParetoParams};

/// The grid ratio posterior(θ) / (prior(θ)·likelihood(θ)) must be a
/// constant: that is conjugacy, checked without algebra.
#[test]
fn poisson_gamma_density_ratio_is_constant() {
    let prior = GammaParams::new(3.407, 0.147).unwrap();
    let counts = [0u64, 2, 1, 0, 3];
    let post = poisson_gamma_update(&prior, &counts).unwrap();
    let log_lik = |lambda: f64| -> f64 {
        counts
            .iter()
            .map(|&n| -lambda + n as f64 * lambda.ln() - special::ln_gamma(n as f64 + 1.0))
            .sum()
    };
    let mut ratios = Vec::new();
    for i in 1..=40 {
        let lambda = 0.05 * i as f64;
        let log_ratio = gamma_pdf(lambda, &post.params).unwrap().ln()
            - gamma_pdf(lambda, &prior).unwrap().ln()
            - log_lik(lambda);
        ratios.push(log_ratio);
    }
    let first = ratios[0];
    for r in &ratios {
        assert!((r - first).abs() < 1e-8, "log-ratio drifts: {r} vs {first}");
    }
}

#[test]
fn lognormal_mu_density_ratio_is_constant() {
    let prior = NormalParams::new(0.2, 0.8).unwrap();
    let sigma = 1.5;
    let ys = [0.4, -0.9, 1.3];
    let post = lognormal_mu_update(&prior, sigma, &ys).unwrap();
    let log_lik = |mu: f64| -> f64 {
        ys.iter()
            .map(|&y| -((y - mu) * (y - mu)) / (2.0 * sigma * sigma))
            .sum::<f64>()
    };
    let mut ratios = Vec::new();
    for i in 0..=40 {
        let mu = -2.0 + 4.0 * i as f64 / 40.0;
        let log_ratio =
            normal_pdf(mu, &post.params).ln() - normal_pdf(mu, &prior).ln() - log_lik(mu);
        ratios.push(log_ratio);
    }
    let first = ratios[0];
    for r in &ratios {
        assert!((r - first).abs() < 1e-8);
    }
}

#[test]
fn pareto_gamma_density_ratio_is_constant() {
    let prior = GammaParams::new(4.0, 0.5).unwrap();
    let threshold = 1.0;
    let xs = [1.5, 3.0, 1.01, 7.5];
    let post = pareto_xi_update(&prior, threshold, &xs).unwrap();
    let log_lik = |xi: f64| -> f64 {
        xs.iter()
            .map(|&x| (xi / threshold).ln() - (xi + 1.0) * (x / threshold).ln())
            .sum::<f64>()
    };
    let mut ratios = Vec::new();
    for i in 1..=40 {
        let xi = 0.2 * i as f64;
        let log_ratio = gamma_pdf(xi, &post.params).unwrap().ln()
            - gamma_pdf(xi, &prior).unwrap().ln()
            - log_lik(xi);
        ratios.push(log_ratio);
    }
    let first = ratios[0];
    for r in &ratios {
        assert!((r - first).abs() < 1e-8);
    }
}

#[test]
fn recursive_equals_batch_over_random_sequences() {
    let mut stream = RngStream::new(77, 0);
    for _ in 0..100 {
        let len = 1 + (stream.uniform_open() * 40.0) as usize;

        // Poisson-Gamma.
        let prior = GammaParams::new(
            0.5 + 5.0 * stream.uniform_open(),
            0.05 + stream.uniform_open(),
        )
        .unwrap();
        let counts: Vec<u64> = (0..len)
            .map(|_| (stream.uniform_open() * 4.0) as u64)
            .collect();
        let batch = poisson_gamma_update(&prior, &counts).unwrap();
        let mut fold = PoissonGammaPosterior::from_prior(prior);
        for &n in &counts {
            fold = poisson_gamma_step(&fold, n).unwrap();
        }
        assert!((fold.params.alpha - batch.params.alpha).abs() <= 1e-12 * batch.params.alpha);
        assert!((fold.params.beta - batch.params.beta).abs() <= 1e-12 * batch.params.beta);

        // LogNormal-Normal.
        let nprior =
            NormalParams::new(stream.uniform_open() - 0.5, 0.3 + stream.uniform_open()).unwrap();
        let sigma = 0.5 + stream.uniform_open();
        let ys: Vec<f64> = (0..len)
            .map(|_| 2.0 * stream.uniform_open() - 1.0)
            .collect();
        let nbatch = lognormal_mu_update(&nprior, sigma, &ys).unwrap();
        let mut nfold = NormalMuPosterior::from_prior(nprior, sigma).unwrap();
        for &y in &ys {
            nfold = lognormal_mu_step(&nfold, y).unwrap();
        }
        assert!(
            (nfold.params.mu - nbatch.params.mu).abs() <= 1e-12 * nbatch.params.mu.abs().max(1.0)
        );
        assert!((nfold.params.sigma - nbatch.params.sigma).abs() <= 1e-12 * nbatch.params.sigma);

        // Pareto-Gamma.
        let gprior = GammaParams::new(
            1.0 + 10.0 * stream.uniform_open(),
            0.1 + 0.4 * stream.uniform_open(),
        )
        .unwrap();
        let xs: Vec<f64> = (0..len)
            .map(|_| 1.0 + 9.0 * stream.uniform_open())
            .collect();
        let gbatch = pareto_xi_update(&gprior, 1.0, &xs).unwrap();
        let mut gfold = ParetoXiPosterior::from_prior(gprior, 1.0).unwrap();
        for &x in &xs {
            gfold = pareto_xi_step(&gfold, x).unwrap();
        }
        assert!((gfold.params.alpha - gbatch.params.alpha).abs() <= 1e-12 * gbatch.params.alpha);
        assert!((gfold.params.beta - gbatch.params.beta).abs() <= 1e-12 * gbatch.params.beta);
    }
}

#[test]
fn fold_of_single_pareto_steps_matches_batch_on_thirty_draws() {
    let mut stream = RngStream::new(41, 0);
    let pareto = ParetoParams::new(4.0, 1.0).unwrap();
    let xs: Vec<f64> = (0..30)
        .map(|_| sample_pareto(&pareto, &mut stream).unwrap())
        .collect();
    let prior = GammaParams::truncated_below(23.086, 0.217, 2.0).unwrap();
    let batch = pareto_xi_update(&prior, 1.0, &xs).unwrap();
    let mut fold = ParetoXiPosterior::from_prior(prior, 1.0).unwrap();
    for &x in &xs {
        fold = pareto_xi_step(&fold, x).unwrap();
    }
    assert!((fold.params.beta - batch.params.beta).abs() <= 1e-13 * batch.params.beta);
    assert_eq!(fold.params.lower_trunc, Some(2.0));
}

#[test]
fn posterior_spread_contracts() {
    // Normal: σ̂₀² strictly decreases with every observation, whatever
    // the data.
    let prior = NormalParams::new(0.0, 1.0).unwrap();
    let mut post = NormalMuPosterior::from_prior(prior, 2.0).unwrap();
    let mut last = post.variance();
    for k in 0..30 {
        post = lognormal_mu_step(&post, (k as f64 * 0.77).sin() * 3.0).unwrap();
        assert!(post.variance() < last);
        last = post.variance();
    }

    // Poisson-Gamma: the variance α̂β̂² is nonincreasing along a
    // constant count sequence consistent with the prior mean (a single
    // large surprise year can raise it, which is correct behaviour).
    let prior = GammaParams::new(3.407, 0.147).unwrap();
    let mut post = PoissonGammaPosterior::from_prior(prior);
    let mut last = post.variance();
    for _ in 0..40 {
        post = poisson_gamma_step(&post, 0).unwrap();
        assert!(post.variance() <= last);
        last = post.variance();
    }
    let mut post1 = PoissonGammaPosterior::from_prior(prior);
    let mut last1 = post1.variance();
    for _ in 0..40 {
        post1 = poisson_gamma_step(&post1, 1).unwrap();
        assert!(post1.variance() <= last1 * (1.0 + 1e-12));
        last1 = post1.variance();
    }
}

#[test]
fn credibility_weight_increases_with_observations() {
    let prior = GammaParams::new(3.407, 0.147).unwrap();
    let mut last_w = 0.0;
    for n in 1..=50usize {
        let counts = vec![1u64; n];
        let cred = opcap_core::conjugate::poisson_gamma_credibility(&prior, &counts).unwrap();
        assert!(cred.weight > last_w);
        assert!(cred.weight < 1.0);
        // Identity holds exactly.
        let post = poisson_gamma_update(&prior, &counts).unwrap();
        assert!((cred.combined - post.mean()).abs() <= 1e-12 * post.mean());
        last_w = cred.weight;
    }
}

#[test]
fn truncated_posterior_mean_agrees_with_quadrature() {
    // Quadrature oracle for the closed-form truncated mean.
    let params = GammaParams::truncated_below(23.086, 0.217, 2.0).unwrap();
    let trunc = opcap_core::TruncatedGamma::new(params.untruncated(), 2.0, f64::INFINITY).unwrap();
    let hi = trunc.quantile(1.0 - 1e-13).unwrap();
    let by_quadrature =
        opcap_core::solve::adaptive_simpson(&|xi| xi * trunc.pdf(xi), 2.0, hi, 1e-10);
    let direct = truncated_posterior_mean(&params).unwrap();
    assert!(
        (by_quadrature - direct).abs() < 1e-6,
        "{by_quadrature} vs {direct}"
    );
    // The round trip of the worked prior: E[ξ] = 5 within 0.01.
    assert!((direct - 5.0).abs() < 0.01, "mean={direct}");
}

#[test]
fn truncated_prior_trajectory_stays_stable() {
    // Folding Pareto(ξ=4, L=1) draws from the truncated prior: the
    // Bayes estimates should move from the prior mean toward the truth
    // without the wild swings of the small-sample MLE.
    let prior = GammaParams::truncated_below(23.086, 0.217, 2.0).unwrap();
    let pareto = ParetoParams::new(4.0, 1.0).unwrap();
    let mut stream = RngStream::new(42, 3);
    let mut post = ParetoXiPosterior::from_prior(prior, 1.0).unwrap();
    let mut estimates = Vec::new();
    for _ in 0..20 {
        let x = sample_pareto(&pareto, &mut stream).unwrap();
        post = pareto_xi_step(&post, x).unwrap();
        estimates.push(truncated_posterior_mean(&post.params).unwrap());
    }
    for (k, e) in estimates.iter().enumerate() {
        assert!(
            *e > 2.0 && *e < 7.0,
            "step {k}: estimate {e} left the plausible band"
        );
    }
    // Consecutive steps move the estimate by a bounded amount (the
    // first observations can shift it by up to ~1, later ones less).
    for w in estimates.windows(2) {
        assert!((w[1] - w[0]).abs() < 1.5);
    }
}
