//! Hyperparameter estimation for the Gamma prior on Poisson rates from
//! multi-bank count panels, with known exposure weights, plus per-bank
//! posteriors and the Negative Binomial predictive count distribution.
//!
//! Counts `N_{j,k}` for bank `j` in year `k` are Poisson(λ_j · V_{j,k})
//! given the bank's risk profile λ_j, and the profiles are exchangeable
//! Gamma(α, β) draws across banks. Marginalizing the profiles gives the
//! panel likelihood
//!
//! `ln Ψ ∝ Σ_j { lnΓ(α+N_j) - lnΓ(α) - α ln β - (α+N_j) ln(1/β + V_j) }`
//!
//! with `N_j`, `V_j` the per-bank totals. [`fit_mle`] maximizes it over
//! `(ln α, ln β)`; [`fit_mom`] matches the first two moments of the
//! standardized frequencies `F_{j,k} = N_{j,k}/V_{j,k}` instead.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solve;
use crate::special;
use crate::{GammaParams, NegBinParams};

// ---------------------------------------------------------------------------
// Panel types
// ---------------------------------------------------------------------------

/// One year of one bank: count and exposure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountRecord {
    pub year: i32,
    pub count: u64,
    pub exposure: f64,
}

/// The annual count series of one bank.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BankSeries {
    pub bank_id: String,
    pub records: Vec<CountRecord>,
}

impl BankSeries {
    pub fn total_count(&self) -> u64 {
        self.records.iter().map(|r| r.count).sum()
    }

    pub fn total_exposure(&self) -> f64 {
        self.records.iter().map(|r| r.exposure).sum()
    }

    /// Standardized rate estimate `λ̂_j = K_j⁻¹ Σ_k N_{j,k}/V_{j,k}`.
    pub fn rate_estimate(&self) -> f64 {
        let k = self.records.len() as f64;
        self.records
            .iter()
            .map(|r| r.count as f64 / r.exposure)
            .sum::<f64>()
            / k
    }
}

/// Multi-bank panel of annual counts with exposures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountPanel {
    pub banks: Vec<BankSeries>,
}

impl CountPanel {
    pub fn validate(&self) -> Result<()> {
        if self.banks.is_empty() {
            return Err(Error::invalid("panel has no banks"));
        }
        for bank in &self.banks {
            if bank.records.is_empty() {
                return Err(Error::invalid(format!(
                    "bank {} has no records",
                    bank.bank_id
                )));
            }
            for r in &bank.records {
                if !(r.exposure > 0.0 && r.exposure.is_finite()) {
                    return Err(Error::invalid(format!(
                        "bank {} year {}: exposure must be positive, got {}",
                        bank.bank_id, r.year, r.exposure
                    )));
                }
            }
        }
        Ok(())
    }

    fn require_multiple_banks(&self) -> Result<()> {
        self.validate()?;
        if self.banks.len() < 2 {
            return Err(Error::invalid(
                "hyperparameter estimation needs at least 2 banks for a variance",
            ));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Estimates
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimationMethod {
    Mle,
    MethodOfMoments,
}

/// Estimator health flag. `BoundarySolution` marks an MLE that ran into
/// the optimization bounds; `HomogeneousPortfolio` marks a panel with no
/// detectable cross-bank variance (σ̂₀² clamped to 0, α/β undefined).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateFlag {
    Ok,
    BoundarySolution,
    HomogeneousPortfolio,
}

/// Estimated hyperparameters of the Gamma profile distribution.
/// `lambda0 = αβ` and `sigma0_sq = αβ²` hold by construction whenever
/// `alpha`/`beta` are defined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperEstimate {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub lambda0: f64,
    pub sigma0_sq: f64,
    /// Moment estimator before the clamp at zero (MoM only).
    pub sigma0_sq_unclamped: Option<f64>,
    pub method: EstimationMethod,
    pub loglik: Option<f64>,
    pub flag: EstimateFlag,
}

/// Which penalty term the moment estimator subtracts. The unbiased form
/// divides each bank's exposure-inverse sum by `K_j²`; the legacy form
/// divides by `K_j` and overstates the penalty whenever `K_j > 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentPenalty {
    #[default]
    Unbiased,
    Legacy,
}

// ---------------------------------------------------------------------------
// Likelihood
// ---------------------------------------------------------------------------

/// Negative marginal log-likelihood of the panel (up to the constant
/// count-permutation term that does not involve α, β).
pub fn neg_log_likelihood(alpha: f64, beta: f64, panel: &CountPanel) -> Result<f64> {
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(Error::invalid(format!(
            "likelihood needs positive parameters, got alpha={alpha}, beta={beta}"
        )));
    }
    panel.validate()?;
    let mut ll = 0.0;
    for bank in &panel.banks {
        let n_j = bank.total_count() as f64;
        let v_j = bank.total_exposure();
        ll += special::ln_gamma(alpha + n_j)
            - special::ln_gamma(alpha)
            - alpha * beta.ln()
            - (alpha + n_j) * (1.0 / beta + v_j).ln();
    }
    Ok(-ll)
}

/// Gradient of the *log-likelihood* with respect to (α, β).
fn log_likelihood_gradient(alpha: f64, beta: f64, panel: &CountPanel) -> (f64, f64) {
    let mut d_alpha = 0.0;
    let mut d_beta = 0.0;
    for bank in &panel.banks {
        let n_j = bank.total_count() as f64;
        let v_j = bank.total_exposure();
        d_alpha += special::digamma(alpha + n_j)
            - special::digamma(alpha)
            - beta.ln()
            - (1.0 / beta + v_j).ln();
        d_beta += -alpha / beta + (alpha + n_j) / (beta * (1.0 + beta * v_j));
    }
    (d_alpha, d_beta)
}

// ---------------------------------------------------------------------------
// MLE
// ---------------------------------------------------------------------------

const LOG_PARAM_BOUND: f64 = 23.0; // e^23 ≈ 1e10: optimization box in log space.

/// Maximum-likelihood fit of (α, β) over the positive quadrant,
/// optimized in log coordinates. Starts a simplex from the moment
/// estimate plus two perturbations, then polishes with damped Newton on
/// the analytic gradient. All-zero panels maximize on the boundary
/// (β → 0) and are reported as such rather than failing.
pub fn fit_mle(panel: &CountPanel) -> Result<HyperEstimate> {
    panel.require_multiple_banks()?;
    if panel.banks.iter().all(|b| b.total_count() == 0) {
        // ln Ψ = -α Σ_j ln(1 + βV_j) increases without bound as β → 0.
        return Ok(HyperEstimate {
            alpha: None,
            beta: None,
            lambda0: 0.0,
            sigma0_sq: 0.0,
            sigma0_sq_unclamped: None,
            method: EstimationMethod::Mle,
            loglik: Some(0.0),
            flag: EstimateFlag::BoundarySolution,
        });
    }

    let objective = |x: &[f64]| -> f64 {
        if x.iter().any(|v| v.abs() > LOG_PARAM_BOUND) {
            return 1e12;
        }
        neg_log_likelihood(x[0].exp(), x[1].exp(), panel).unwrap_or(1e12)
    };

    // Multistart: moment estimate plus two perturbations.
    let mom = fit_mom(panel)?;
    let base = match (mom.alpha, mom.beta) {
        (Some(a), Some(b)) => vec![a.ln(), b.ln()],
        _ => vec![0.0, mom.lambda0.max(1e-4).ln()],
    };
    let starts = [
        base.clone(),
        vec![base[0] + 1.0, base[1] - 1.0],
        vec![base[0] - 1.0, base[1] + 1.0],
    ];
    let mut best: Option<(Vec<f64>, f64)> = None;
    for start in &starts {
        let (x, v) = solve::nelder_mead(&objective, start, solve::SimplexOptions::default());
        if best.as_ref().is_none_or(|(_, bv)| v < *bv) {
            best = Some((x, v));
        }
    }
    let (mut x, _) = best.expect("at least one start");

    // Newton polish on the analytic score in log coordinates.
    for _ in 0..60 {
        let (alpha, beta) = (x[0].exp(), x[1].exp());
        let (ga, gb) = log_likelihood_gradient(alpha, beta, panel);
        // Chain rule to log coordinates.
        let g = [ga * alpha, gb * beta];
        if (g[0] * g[0] + g[1] * g[1]).sqrt() < 1e-11 {
            break;
        }
        // Finite-difference Jacobian of the log-space score.
        let score = |y: &[f64]| -> [f64; 2] {
            let (a, b) = (y[0].exp(), y[1].exp());
            let (da, db) = log_likelihood_gradient(a, b, panel);
            [da * a, db * b]
        };
        let h = 1e-6;
        let mut jac = [[0.0f64; 2]; 2];
        for j in 0..2 {
            let mut yp = [x[0], x[1]];
            yp[j] += h;
            let sp = score(&yp);
            yp[j] -= 2.0 * h;
            let sm = score(&yp);
            for i in 0..2 {
                jac[i][j] = (sp[i] - sm[i]) / (2.0 * h);
            }
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det.abs() < 1e-300 {
            break;
        }
        let dx = [
            -(jac[1][1] * g[0] - jac[0][1] * g[1]) / det,
            -(-jac[1][0] * g[0] + jac[0][0] * g[1]) / det,
        ];
        let gnorm = (g[0] * g[0] + g[1] * g[1]).sqrt();
        if gnorm < 1e-4 && dx[0].abs().max(dx[1].abs()) < 0.1 {
            // Close to the optimum the objective differences fall below
            // floating-point resolution; iterate on the score directly.
            x = vec![x[0] + dx[0], x[1] + dx[1]];
            continue;
        }
        // Damp: accept the longest step that does not worsen the objective.
        let f0 = objective(&x);
        let mut step = 1.0;
        let mut moved = false;
        for _ in 0..20 {
            let trial = [x[0] + step * dx[0], x[1] + step * dx[1]];
            if objective(&trial) <= f0 {
                x = trial.to_vec();
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if !moved {
            break;
        }
    }

    let alpha = x[0].exp();
    let beta = x[1].exp();
    let on_boundary = x.iter().any(|v| v.abs() > LOG_PARAM_BOUND - 0.5);
    let loglik = -neg_log_likelihood(alpha, beta, panel)?;
    Ok(HyperEstimate {
        alpha: Some(alpha),
        beta: Some(beta),
        lambda0: alpha * beta,
        sigma0_sq: alpha * beta * beta,
        sigma0_sq_unclamped: None,
        method: EstimationMethod::Mle,
        loglik: Some(loglik),
        flag: if on_boundary {
            EstimateFlag::BoundarySolution
        } else {
            EstimateFlag::Ok
        },
    })
}

// ---------------------------------------------------------------------------
// Method of moments
// ---------------------------------------------------------------------------

/// Moment estimator with the unbiased penalty term.
pub fn fit_mom(panel: &CountPanel) -> Result<HyperEstimate> {
    fit_mom_with_penalty(panel, MomentPenalty::Unbiased)
}

/// Moment estimator:
/// `λ̂₀ = J⁻¹ Σ_j λ̂_j` and
/// `σ̃₀² = (J-1)⁻¹ Σ_j (λ̂_j - λ̂₀)² - (λ̂₀/J) Σ_j K_j⁻² Σ_k 1/V_{j,k}`
/// (the `Unbiased` form), clamped at zero. The `Legacy` penalty uses
/// `K_j⁻¹` in place of `K_j⁻²`.
pub fn fit_mom_with_penalty(panel: &CountPanel, penalty: MomentPenalty) -> Result<HyperEstimate> {
    panel.require_multiple_banks()?;
    let j = panel.banks.len() as f64;
    let rates: Vec<f64> = panel.banks.iter().map(|b| b.rate_estimate()).collect();
    let lambda0 = rates.iter().sum::<f64>() / j;
    let spread = rates
        .iter()
        .map(|r| (r - lambda0) * (r - lambda0))
        .sum::<f64>()
        / (j - 1.0);
    let penalty_sum: f64 = panel
        .banks
        .iter()
        .map(|b| {
            let k = b.records.len() as f64;
            let inv_v: f64 = b.records.iter().map(|r| 1.0 / r.exposure).sum();
            match penalty {
                MomentPenalty::Unbiased => inv_v / (k * k),
                MomentPenalty::Legacy => inv_v / k,
            }
        })
        .sum();
    let unclamped = spread - lambda0 / j * penalty_sum;
    let sigma0_sq = unclamped.max(0.0);

    let (alpha, beta, flag) = if sigma0_sq > 0.0 && lambda0 > 0.0 {
        let beta = sigma0_sq / lambda0;
        (
            Some(lambda0 * lambda0 / sigma0_sq),
            Some(beta),
            EstimateFlag::Ok,
        )
    } else {
        // No cross-bank heterogeneity detected: a Gamma shape is not
        // identified, report the homogeneous rate instead of inventing one.
        (None, None, EstimateFlag::HomogeneousPortfolio)
    };
    Ok(HyperEstimate {
        alpha,
        beta,
        lambda0,
        sigma0_sq,
        sigma0_sq_unclamped: Some(unclamped),
        method: EstimationMethod::MethodOfMoments,
        loglik: None,
        flag,
    })
}

// ---------------------------------------------------------------------------
// Per-bank posterior and predictive counts
// ---------------------------------------------------------------------------

/// Posterior of a bank's rate profile under the fitted hyperprior:
/// `α̂ = α + Σ_k N_{j,k}`, `β̂ = β / (1 + β·Σ_k V_{j,k})`.
pub fn bank_posterior(hyper: &GammaParams, bank: &BankSeries) -> Result<GammaParams> {
    hyper.validate()?;
    for r in &bank.records {
        if !(r.exposure > 0.0 && r.exposure.is_finite()) {
            return Err(Error::invalid(format!(
                "bank {} year {}: exposure must be positive",
                bank.bank_id, r.year
            )));
        }
    }
    let alpha_hat = hyper.alpha + bank.total_count() as f64;
    let beta_hat = hyper.beta / (1.0 + hyper.beta * bank.total_exposure());
    GammaParams::new(alpha_hat, beta_hat)
}

/// Predictive distribution of next year's count at exposure `V`:
/// NegBin(r = α̂, p = 1/(1 + V·β̂)), mean `α̂·β̂·V`.
pub fn predictive_counts(posterior: &GammaParams, next_exposure: f64) -> Result<NegBinParams> {
    posterior.validate()?;
    if !(next_exposure > 0.0 && next_exposure.is_finite()) {
        return Err(Error::invalid(format!(
            "exposure must be positive, got {next_exposure}"
        )));
    }
    NegBinParams::new(
        posterior.alpha,
        1.0 / (1.0 + next_exposure * posterior.beta),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn panel(records: Vec<(&str, Vec<(u64, f64)>)>) -> CountPanel {
        CountPanel {
            banks: records
                .into_iter()
                .map(|(id, rows)| BankSeries {
                    bank_id: id.to_string(),
                    records: rows
                        .into_iter()
                        .enumerate()
                        .map(|(i, (count, exposure))| CountRecord {
                            year: i as i32 + 1,
                            count,
                            exposure,
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    #[test]
    fn nll_zero_count_closed_form() {
        // One bank, N=0, V=1: -lnΨ = α ln(1+β), matching the marginal
        // probability (1+βV)^{-α} of observing nothing.
        let p = panel(vec![("a", vec![(0, 1.0)])]);
        for &(alpha, beta) in &[(1.0, 1.0), (3.407, 0.147), (0.5, 2.0)] {
            let v = neg_log_likelihood(alpha, beta, &p).unwrap();
            assert!((v - alpha * (1.0f64 + beta).ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn nll_matches_quadrature_of_marginal() {
        // Independent oracle: integrate Poisson(n|λV)·Gamma(λ;α,β) dλ
        // numerically and compare per-bank likelihood contributions.
        let alpha = 2.3;
        let beta = 0.4;
        let (n, v) = (3u64, 1.7);
        let p = panel(vec![("a", vec![(n, v)])]);
        let direct = (-neg_log_likelihood(alpha, beta, &p).unwrap()).exp();
        let integrand = |lambda: f64| -> f64 {
            let pois = (-(lambda * v) + (n as f64) * (lambda * v).ln()
                - special::ln_gamma(n as f64 + 1.0))
            .exp();
            let gamma =
                ((alpha - 1.0) * (lambda / beta).ln() - lambda / beta - special::ln_gamma(alpha))
                    .exp()
                    / beta;
            pois * gamma
        };
        let marginal = solve::adaptive_simpson(&integrand, 1e-12, 30.0, 1e-13);
        // The likelihood drops the V^N/N! permutation factor; divide it out.
        let factor = ((n as f64) * v.ln() - special::ln_gamma(n as f64 + 1.0)).exp();
        assert!(
            (direct * factor / marginal - 1.0).abs() < 1e-8,
            "direct={direct}, marginal={marginal}"
        );
    }

    #[test]
    fn nll_rejects_bad_parameters() {
        let p = panel(vec![("a", vec![(0, 1.0)]), ("b", vec![(1, 1.0)])]);
        assert!(neg_log_likelihood(-1.0, 1.0, &p).is_err());
        assert!(neg_log_likelihood(1.0, 0.0, &p).is_err());
    }

    #[test]
    fn mom_direct_arithmetic() {
        // V ≡ 1, equal K: λ̂₀ is the grand mean of the annual counts.
        let p = panel(vec![
            ("a", vec![(1, 1.0), (3, 1.0)]),
            ("b", vec![(0, 1.0), (2, 1.0)]),
            ("c", vec![(4, 1.0), (2, 1.0)]),
        ]);
        let est = fit_mom(&p).unwrap();
        assert!((est.lambda0 - 2.0).abs() < 1e-14);
        // Penalty: λ̂₀/J · Σ_j K_j⁻² Σ_k 1/V = (2/3)·(3·2/4) = 1.
        let spread =
            ((2.0f64 - 2.0).powi(2) + (1.0f64 - 2.0).powi(2) + (3.0f64 - 2.0).powi(2)) / 2.0;
        assert!((est.sigma0_sq_unclamped.unwrap() - (spread - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn mom_zero_variance_clamps_to_homogeneous() {
        let p = panel(vec![("a", vec![(1, 1.0)]), ("b", vec![(1, 1.0)])]);
        let est = fit_mom(&p).unwrap();
        assert_eq!(est.flag, EstimateFlag::HomogeneousPortfolio);
        assert_eq!(est.sigma0_sq, 0.0);
        assert!(est.alpha.is_none());
        assert!(est.sigma0_sq_unclamped.unwrap() <= 0.0);
    }

    #[test]
    fn mom_legacy_penalty_is_larger_for_multi_year_banks() {
        let p = panel(vec![
            ("a", vec![(1, 1.0), (3, 1.0), (2, 1.0)]),
            ("b", vec![(0, 1.0), (2, 1.0), (5, 1.0)]),
        ]);
        let unbiased = fit_mom_with_penalty(&p, MomentPenalty::Unbiased).unwrap();
        let legacy = fit_mom_with_penalty(&p, MomentPenalty::Legacy).unwrap();
        assert!(
            legacy.sigma0_sq_unclamped.unwrap() < unbiased.sigma0_sq_unclamped.unwrap(),
            "legacy penalty must subtract more"
        );
    }

    #[test]
    fn mle_smallest_legal_panel_runs() {
        let p = panel(vec![("a", vec![(1, 1.0)]), ("b", vec![(0, 1.0)])]);
        let est = fit_mle(&p).unwrap();
        assert!(est.lambda0.is_finite());
        assert!(est.loglik.is_some());
    }

    #[test]
    fn mle_all_zero_panel_reports_boundary() {
        let p = panel(vec![("a", vec![(0, 1.0)]), ("b", vec![(0, 1.0)])]);
        let est = fit_mle(&p).unwrap();
        assert_eq!(est.flag, EstimateFlag::BoundarySolution);
        assert_eq!(est.lambda0, 0.0);
    }

    #[test]
    fn mle_gradient_vanishes_at_optimum() {
        // Small deterministic panel with real heterogeneity.
        let p = panel(vec![
            ("a", vec![(0, 1.0), (1, 1.2), (0, 0.8)]),
            ("b", vec![(2, 1.0), (1, 1.1), (3, 0.9)]),
            ("c", vec![(1, 1.0), (0, 1.0), (1, 1.0)]),
            ("d", vec![(4, 1.3), (2, 0.7), (2, 1.0)]),
        ]);
        let est = fit_mle(&p).unwrap();
        let (a, b) = (est.alpha.unwrap(), est.beta.unwrap());
        let (ga, gb) = log_likelihood_gradient(a, b, &p);
        assert!(
            (ga * ga + gb * gb).sqrt() < 1e-6,
            "gradient norm too large: ({ga}, {gb}) at ({a}, {b})"
        );
        // Finite-difference cross-check of the analytic score.
        let h = 1e-5;
        let fd_a = (-neg_log_likelihood(a + h, b, &p).unwrap()
            + neg_log_likelihood(a - h, b, &p).unwrap())
            / (2.0 * h);
        assert!((fd_a - ga).abs() < 1e-6);
    }

    #[test]
    fn bank_posterior_reduces_to_plain_update_at_unit_exposure() {
        let hyper = GammaParams::new(3.407, 0.147).unwrap();
        let bank = BankSeries {
            bank_id: "a".into(),
            records: vec![
                CountRecord {
                    year: 1,
                    count: 0,
                    exposure: 1.0,
                },
                CountRecord {
                    year: 2,
                    count: 2,
                    exposure: 1.0,
                },
            ],
        };
        let post = bank_posterior(&hyper, &bank).unwrap();
        let plain = crate::conjugate::poisson_gamma_update(&hyper, &[0, 2]).unwrap();
        assert_eq!(post.alpha, plain.params.alpha);
        assert_eq!(post.beta, plain.params.beta);
    }

    #[test]
    fn bank_posterior_direct_arithmetic() {
        let hyper = GammaParams::new(1.0, 1.0).unwrap();
        let bank = BankSeries {
            bank_id: "x".into(),
            records: vec![CountRecord {
                year: 1,
                count: 3,
                exposure: 2.0,
            }],
        };
        let post = bank_posterior(&hyper, &bank).unwrap();
        assert!((post.alpha - 4.0).abs() < 1e-15);
        assert!((post.beta - 1.0 / 3.0).abs() < 1e-15);
        // Empty series keeps the hyperprior.
        let empty = BankSeries {
            bank_id: "y".into(),
            records: vec![],
        };
        let kept = bank_posterior(&hyper, &empty).unwrap();
        assert_eq!(kept.alpha, hyper.alpha);
        assert_eq!(kept.beta, hyper.beta);
    }

    #[test]
    fn predictive_counts_parameters_and_mean() {
        let post = GammaParams::new(1.0, 1.0).unwrap();
        let nb = predictive_counts(&post, 1.0).unwrap();
        assert!((nb.r - 1.0).abs() < 1e-15);
        assert!((nb.p - 0.5).abs() < 1e-15);
        // Predictive mean r(1-p)/p = α̂β̂V for assorted parameters.
        for &(a, b, v) in &[
            (2.0, 0.3, 1.0),
            (3.4, 0.13, 2.5),
            (0.7, 1.1, 0.4),
            (5.0, 0.05, 10.0),
        ] {
            let nb = predictive_counts(&GammaParams::new(a, b).unwrap(), v).unwrap();
            assert!((nb.mean() - a * b * v).abs() < 1e-12 * (a * b * v));
        }
    }
}
