//! Simulation checks for the panel estimators: the moment identities of
//! the standardized frequencies, estimator unbiasedness, cross-method
//! agreement, and invariance under exposure rescaling.

mod common;

use opcap_core::empirical_bayes::{fit_mle, fit_mom, BankSeries, CountPanel, CountRecord};
use opcap_core::rng::{sample_gamma, sample_poisson, RngStream};
use opcap_core::GammaParams;

/// Draws a panel from the hierarchical model: λ_j ~ Gamma(α, β),
/// N_{j,k} ~ Poisson(λ_j V_{j,k}).
fn synthetic_panel(
    j: usize,
    k: usize,
    alpha: f64,
    beta: f64,
    exposures: impl Fn(&mut RngStream) -> f64,
    stream: &mut RngStream,
) -> CountPanel {
    let hyper = GammaParams::new(alpha, beta).unwrap();
    let banks = (0..j)
        .map(|jj| {
            let lambda = sample_gamma(&hyper, stream).unwrap();
            let records = (0..k)
                .map(|kk| {
                    let v = exposures(stream);
                    CountRecord {
                        year: kk as i32 + 1,
                        count: sample_poisson(lambda * v, stream).unwrap(),
                        exposure: v,
                    }
                })
                .collect();
            BankSeries {
                bank_id: format!("b{jj}"),
                records,
            }
        })
        .collect();
    CountPanel { banks }
}

#[test]
fn standardized_frequency_variance_identity() {
    // Var(F_{j,k}) = λ₀/V + σ₀² at fixed exposure V, by simulation.
    let (alpha, beta) = (3.407, 0.147);
    let (lambda0, sigma0_sq) = (alpha * beta, alpha * beta * beta);
    let mut stream = RngStream::new(7, 0);
    for &v in &[0.5f64, 1.0, 2.0] {
        let n = 200_000usize;
        let hyper = GammaParams::new(alpha, beta).unwrap();
        let fs: Vec<f64> = (0..n)
            .map(|_| {
                let lambda = sample_gamma(&hyper, &mut stream).unwrap();
                sample_poisson(lambda * v, &mut stream).unwrap() as f64 / v
            })
            .collect();
        let expected = lambda0 / v + sigma0_sq;
        let observed = common::variance(&fs);
        // SE of the sample variance via the fourth-moment rough bound.
        let fourth: f64 = fs.iter().map(|f| (f - lambda0).powi(4)).sum::<f64>() / n as f64;
        let se = ((fourth - observed * observed) / n as f64).sqrt();
        assert!(
            (observed - expected).abs() < 4.0 * se,
            "v={v}: var {observed} vs {expected} (se {se})"
        );
    }
}

#[test]
fn moment_estimators_are_unbiased_in_simulation() {
    // Reduced-size version of the full unbiasedness run (the acceptance
    // suite runs 2000 panels): 400 panels, J=50, K=5, V in [0.5, 2].
    let (alpha, beta) = (3.407, 0.147);
    let (lambda0, sigma0_sq) = (alpha * beta, alpha * beta * beta);
    let mut stream = RngStream::new(11, 0);
    let reps = 400usize;
    let mut lambda_hats = Vec::with_capacity(reps);
    let mut sigma_tilde = Vec::with_capacity(reps);
    for _ in 0..reps {
        let panel = synthetic_panel(
            50,
            5,
            alpha,
            beta,
            |s| 0.5 + 1.5 * s.uniform_open(),
            &mut stream,
        );
        let est = fit_mom(&panel).unwrap();
        lambda_hats.push(est.lambda0);
        sigma_tilde.push(est.sigma0_sq_unclamped.unwrap());
    }
    let se_l = common::se_mean(&lambda_hats);
    assert!(
        (common::mean(&lambda_hats) - lambda0).abs() < 3.0 * se_l,
        "lambda0 mean {} vs {lambda0} (se {se_l})",
        common::mean(&lambda_hats)
    );
    let se_s = common::se_mean(&sigma_tilde);
    assert!(
        (common::mean(&sigma_tilde) - sigma0_sq).abs() < 3.0 * se_s,
        "sigma0_sq mean {} vs {sigma0_sq} (se {se_s})",
        common::mean(&sigma_tilde)
    );
}

#[test]
fn mle_and_mom_agree_on_large_panels() {
    let (alpha, beta) = (3.407, 0.147);
    let mut stream = RngStream::new(13, 0);
    // Two independent large panels give a sense of the simulation SE.
    let mut mle_l0 = Vec::new();
    let mut mom_l0 = Vec::new();
    for _ in 0..6 {
        let panel = synthetic_panel(150, 8, alpha, beta, |_| 1.0, &mut stream);
        mle_l0.push(fit_mle(&panel).unwrap().lambda0);
        mom_l0.push(fit_mom(&panel).unwrap().lambda0);
    }
    let diff: Vec<f64> = mle_l0.iter().zip(&mom_l0).map(|(a, b)| a - b).collect();
    let se = common::se_mean(&diff).max(1e-4);
    assert!(
        common::mean(&diff).abs() < 2.0 * se + 0.01,
        "methods disagree: {:?} vs {:?}",
        mle_l0,
        mom_l0
    );
}

#[test]
fn rate_estimates_are_invariant_under_exposure_rescaling() {
    // (N, cV) panels generated with rate λ/c give λ̂_j distributed like
    // λ̂_j/c from (N, V) panels with rate λ; two-sample KS over 500
    // replicates of a J=1 bank statistic.
    let c = 4.0;
    let (alpha, beta) = (3.407, 0.147);
    let mut stream = RngStream::new(17, 0);
    let reps = 500usize;
    let mut scaled: Vec<f64> = Vec::with_capacity(reps);
    let mut reference: Vec<f64> = Vec::with_capacity(reps);
    let hyper = GammaParams::new(alpha, beta).unwrap();
    let hyper_scaled = GammaParams::new(alpha, beta / c).unwrap(); // rate λ/c
    for _ in 0..reps {
        // Reference: rate λ, exposure V = 1.3, K = 5 years.
        let lambda = sample_gamma(&hyper, &mut stream).unwrap();
        let lam_hat: f64 = (0..5)
            .map(|_| sample_poisson(lambda * 1.3, &mut stream).unwrap() as f64 / 1.3)
            .sum::<f64>()
            / 5.0;
        reference.push(lam_hat / c);
        // Scaled: rate λ/c, exposure cV.
        let lambda_s = sample_gamma(&hyper_scaled, &mut stream).unwrap();
        let lam_hat_s: f64 = (0..5)
            .map(|_| sample_poisson(lambda_s * c * 1.3, &mut stream).unwrap() as f64 / (c * 1.3))
            .sum::<f64>()
            / 5.0;
        scaled.push(lam_hat_s);
    }
    let d = common::ks_two_sample(&scaled, &reference);
    assert!(d < common::ks_two_sample_critical(reps, reps), "ks={d}");
}

#[test]
fn nll_decreases_toward_truth_on_average() {
    // Over synthetic panels the likelihood at the true parameters beats
    // clearly wrong ones most of the time.
    let (alpha, beta) = (3.407, 0.147);
    let mut stream = RngStream::new(19, 0);
    let mut wins = 0;
    let total = 50;
    for _ in 0..total {
        let panel = synthetic_panel(40, 5, alpha, beta, |_| 1.0, &mut stream);
        let at_truth =
            opcap_core::empirical_bayes::neg_log_likelihood(alpha, beta, &panel).unwrap();
        let off =
            opcap_core::empirical_bayes::neg_log_likelihood(alpha * 4.0, beta, &panel).unwrap();
        if at_truth < off {
            wins += 1;
        }
    }
    assert!(wins > total * 8 / 10, "truth won only {wins}/{total}");
}
