//! Turns expert opinions into structural prior hyperparameters by
//! solving the matching moment/interval equations numerically.
//!
//! Every fit follows the same contract: the returned parameters, pushed
//! back through the forward kernels in [`crate::distributions`],
//! reproduce the stated targets to `1e-8` (the residuals are recorded in
//! the accompanying [`FitReport`]). Interval probabilities default to
//! `2/3` when the expert does not state one.
//!
//! Solver layout: each two-parameter system is reduced to one equation
//! (substituting the mean constraint) and solved by a geometric bracket
//! scan plus bisection; the truncated-Gamma fits nest a second bisection
//! for the scale inside the outer shape search. `fit_least_squares`
//! handles over- or under-constrained opinion sets that the dedicated
//! solvers reject.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solve;
use crate::special;
use crate::{GammaParams, NormalParams, TruncatedGamma};

/// Default interval probability when the expert does not specify one.
pub const DEFAULT_INTERVAL_PROB: f64 = 2.0 / 3.0;

/// Residual tolerance for a fit to count as converged.
pub const FIT_TOL: f64 = 1e-8;

const ALPHA_BRACKET: (f64, f64) = (1e-4, 1e6);
const SIGMA0_BRACKET: (f64, f64) = (1e-6, 50.0);
const SCAN_POINTS: usize = 600;

// ---------------------------------------------------------------------------
// Opinion and report types
// ---------------------------------------------------------------------------

/// The functional of the risk-profile distribution the expert speaks
/// about.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    Mean,
    Quantile(f64),
    QuantileRatio(f64, f64),
    Vco,
}

/// An elicited statement: a point estimate of some functional, with an
/// optional credible interval `[a, b]` of probability `prob`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpertOpinion {
    pub functional: Functional,
    pub point: f64,
    pub interval: Option<(f64, f64)>,
    pub prob: Option<f64>,
}

impl ExpertOpinion {
    pub fn mean(point: f64) -> Self {
        ExpertOpinion {
            functional: Functional::Mean,
            point,
            interval: None,
            prob: None,
        }
    }

    pub fn quantile(q: f64, point: f64) -> Self {
        ExpertOpinion {
            functional: Functional::Quantile(q),
            point,
            interval: None,
            prob: None,
        }
    }

    pub fn with_interval(mut self, a: f64, b: f64, prob: Option<f64>) -> Self {
        self.interval = Some((a, b));
        self.prob = prob;
        self
    }

    pub fn prob_or_default(&self) -> f64 {
        self.prob.unwrap_or(DEFAULT_INTERVAL_PROB)
    }

    fn require_interval(&self) -> Result<(f64, f64, f64)> {
        let (a, b) = self.interval.ok_or_else(|| {
            Error::invalid("opinion under-determines two parameters: an interval is required")
        })?;
        let p = self.prob_or_default();
        if !(a < b) {
            return Err(Error::invalid(format!(
                "interval must satisfy a < b, got [{a}, {b}]"
            )));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::invalid(format!(
                "interval probability must be in (0,1), got {p}"
            )));
        }
        Ok((a, b, p))
    }
}

/// Residual record of a numerical fit. For the dedicated solvers
/// `converged` means every residual is within [`FIT_TOL`]; for
/// [`fit_least_squares`] it means the optimizer reached a stationary
/// compromise, whose (possibly large) residuals are reported verbatim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl FitReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    fn from_residuals(residuals: Vec<f64>, iterations: usize) -> Self {
        let converged = residuals.iter().all(|r| r.abs() <= FIT_TOL);
        FitReport {
            residuals,
            iterations,
            converged,
        }
    }
}

// ---------------------------------------------------------------------------
// Poisson-Gamma (frequency priors)
// ---------------------------------------------------------------------------

/// Fits Gamma(α, β) to an expert mean `E[λ]` and credible interval:
/// `αβ = E[λ]` and `F(b) - F(a) = p`.
pub fn fit_poisson_gamma(opinion: &ExpertOpinion) -> Result<(GammaParams, FitReport)> {
    if opinion.functional != Functional::Mean {
        return Err(Error::invalid("fit_poisson_gamma expects a mean opinion"));
    }
    let mean = opinion.point;
    let (a, b, p) = opinion.require_interval()?;
    if !(mean > 0.0) || !(a >= 0.0) {
        return Err(Error::invalid(format!(
            "fit_poisson_gamma needs E[lambda] > 0 and a >= 0, got mean={mean}, a={a}"
        )));
    }

    let prob_gap = |alpha: f64| -> f64 {
        let beta = mean / alpha;
        let hi = special::reg_lower_gamma(alpha, b / beta);
        let lo = special::reg_lower_gamma(alpha, a / beta);
        hi - lo - p
    };
    let alpha = solve_on_log_bracket(&prob_gap, ALPHA_BRACKET, || {
        format!("no Gamma(alpha, beta) with mean {mean} puts probability {p} on [{a}, {b}]")
    })?;
    let params = GammaParams::new(alpha, mean / alpha)?;
    let residuals = vec![params.mean_untruncated() / mean - 1.0, prob_gap(alpha)];
    Ok((params, FitReport::from_residuals(residuals, SCAN_POINTS)))
}

/// Closed-form Gamma fit from a mean and coefficient of variation:
/// `Vco(λ) = 1/√α` gives `α = 1/Vco²`, `β = E[λ]·Vco²`.
pub fn fit_poisson_gamma_vco(mean: f64, vco: f64) -> Result<GammaParams> {
    if !(mean > 0.0) || !(vco > 0.0) {
        return Err(Error::invalid(format!(
            "fit_poisson_gamma_vco needs mean > 0 and vco > 0, got mean={mean}, vco={vco}"
        )));
    }
    let alpha = 1.0 / (vco * vco);
    GammaParams::new(alpha, mean / alpha)
}

// ---------------------------------------------------------------------------
// LogNormal-Normal (severity location priors, sigma known)
// ---------------------------------------------------------------------------

/// Fits Normal(μ₀, σ₀) for the LogNormal location μ from an opinion on
/// the expected loss `E[M] = exp(μ₀ + σ²/2 + σ₀²/2)` and a credible
/// interval for `M`.
pub fn fit_lognormal_mu_prior_from_mean(
    sigma: f64,
    opinion: &ExpertOpinion,
) -> Result<(NormalParams, FitReport)> {
    fit_lognormal_mu_interval(sigma, sigma * sigma / 2.0, opinion)
}

/// Same as [`fit_lognormal_mu_prior_from_mean`] but the opinion speaks
/// about a quantile: `E[Q_q] = exp(μ₀ + σ·Z_q + σ₀²/2)`.
pub fn fit_lognormal_mu_prior_from_quantile(
    sigma: f64,
    q: f64,
    opinion: &ExpertOpinion,
) -> Result<(NormalParams, FitReport)> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::invalid(format!(
            "quantile level must be in (0,1), got {q}"
        )));
    }
    let z = special::std_normal_quantile_kernel(q);
    fit_lognormal_mu_interval(sigma, sigma * z, opinion)
}

/// Shared interval solver: `shift` is σ²/2 for the mean functional and
/// σ·Z_q for a quantile. Solves for σ₀, then backs out
/// `μ₀ = ln(point) - shift - σ₀²/2`.
fn fit_lognormal_mu_interval(
    sigma: f64,
    shift: f64,
    opinion: &ExpertOpinion,
) -> Result<(NormalParams, FitReport)> {
    if !(sigma > 0.0) {
        return Err(Error::invalid(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    let point = opinion.point;
    let (a, b, p) = opinion.require_interval()?;
    if !(point > 0.0 && a > 0.0) {
        return Err(Error::invalid(format!(
            "lognormal fit needs positive point estimate and interval, got point={point}, a={a}"
        )));
    }
    let ln_point = point.ln();
    let prob_gap = |sigma0: f64| -> f64 {
        let mu0 = ln_point - shift - sigma0 * sigma0 / 2.0;
        special::std_normal_cdf((b.ln() - shift - mu0) / sigma0)
            - special::std_normal_cdf((a.ln() - shift - mu0) / sigma0)
            - p
    };
    let sigma0 = solve_on_log_bracket(&prob_gap, SIGMA0_BRACKET, || {
        format!(
            "no sigma0 in ({}, {}) satisfies the interval equation",
            SIGMA0_BRACKET.0, SIGMA0_BRACKET.1
        )
    })?;
    let mu0 = ln_point - shift - sigma0 * sigma0 / 2.0;
    let params = NormalParams::new(mu0, sigma0)?;
    let residuals = vec![
        ((mu0 + shift + sigma0 * sigma0 / 2.0).exp()) / point - 1.0,
        prob_gap(sigma0),
    ];
    Ok((params, FitReport::from_residuals(residuals, SCAN_POINTS)))
}

/// Closed-form fit when the uncertainty of the expected loss is a
/// coefficient of variation instead of an interval.
///
/// Unconditionally `M` is LogNormal(μ₀ + σ²/2, σ₀), so
/// `Vco(M) = sqrt(exp(σ₀²) - 1)` depends on σ₀ alone:
/// `σ₀ = sqrt(ln(1 + Vco²))` and `μ₀ = ln E[M] - σ²/2 - σ₀²/2`.
pub fn fit_lognormal_mu_prior_from_mean_vco(
    sigma: f64,
    mean: f64,
    vco: f64,
) -> Result<NormalParams> {
    lognormal_vco_fit(sigma * sigma / 2.0, mean, vco, sigma)
}

/// Quantile flavor of the Vco closed form: `Q_q` is
/// LogNormal(μ₀ + σ·Z_q, σ₀), so the same σ₀ identity applies with the
/// shift σ·Z_q.
pub fn fit_lognormal_mu_prior_from_quantile_vco(
    sigma: f64,
    q: f64,
    point: f64,
    vco: f64,
) -> Result<NormalParams> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::invalid(format!(
            "quantile level must be in (0,1), got {q}"
        )));
    }
    lognormal_vco_fit(
        sigma * special::std_normal_quantile_kernel(q),
        point,
        vco,
        sigma,
    )
}

fn lognormal_vco_fit(shift: f64, point: f64, vco: f64, sigma: f64) -> Result<NormalParams> {
    if !(sigma > 0.0) || !(point > 0.0) || !(vco > 0.0) {
        return Err(Error::invalid(format!(
            "vco fit needs sigma, point, vco > 0, got sigma={sigma}, point={point}, vco={vco}"
        )));
    }
    let sigma0 = (1.0 + vco * vco).ln().sqrt();
    NormalParams::new(point.ln() - shift - sigma0 * sigma0 / 2.0, sigma0)
}

/// Recovers σ from the ratio of two quantiles of the same LogNormal:
/// `σ = ln(Q_{q2}/Q_{q1}) / (Z_{q2} - Z_{q1})`; the location μ cancels.
pub fn sigma_from_quantile_ratio(q1: f64, q2: f64, ratio: f64) -> Result<f64> {
    if !(q1 > 0.0 && q1 < 1.0 && q2 > 0.0 && q2 < 1.0 && q1 < q2) {
        return Err(Error::invalid(format!(
            "quantile levels must satisfy 0 < q1 < q2 < 1, got q1={q1}, q2={q2}"
        )));
    }
    if !(ratio > 1.0) {
        return Err(Error::invalid(format!(
            "quantile ratio must exceed 1, got {ratio}"
        )));
    }
    let z1 = special::std_normal_quantile_kernel(q1);
    let z2 = special::std_normal_quantile_kernel(q2);
    Ok(ratio.ln() / (z2 - z1))
}

// ---------------------------------------------------------------------------
// Pareto-Gamma (tail-index priors, truncated below B)
// ---------------------------------------------------------------------------

/// Fits a Gamma prior for the tail index ξ, truncated below `B`, to an
/// expert mean `E[ξ]` and credible interval `[a, b]` for ξ:
/// the truncated-mean equation and
/// `(F(b) - F(a)) / (1 - F(B)) = p` hold simultaneously.
pub fn fit_pareto_gamma(
    lower_bound: f64,
    opinion: &ExpertOpinion,
) -> Result<(GammaParams, FitReport)> {
    if opinion.functional != Functional::Mean {
        return Err(Error::invalid("fit_pareto_gamma expects a mean opinion"));
    }
    if !(lower_bound >= 0.0) {
        return Err(Error::invalid(format!(
            "lower bound must be >= 0, got {lower_bound}"
        )));
    }
    let mean = opinion.point;
    let (a, b, p) = opinion.require_interval()?;
    if !(mean > lower_bound) {
        return Err(Error::invalid(format!(
            "expert mean {mean} must exceed the truncation bound {lower_bound}"
        )));
    }
    if !(lower_bound <= a) {
        return Err(Error::invalid(format!(
            "interval must lie in the truncated support, got a={a} < B={lower_bound}"
        )));
    }

    let prob_gap = |alpha: f64| -> f64 {
        match beta_matching_truncated_mean(alpha, lower_bound, mean) {
            Some(beta) => truncated_interval_prob(alpha, beta, lower_bound, a, b) - p,
            None => f64::NAN,
        }
    };
    let alpha = solve_on_log_bracket(&prob_gap, ALPHA_BRACKET, || {
        format!(
            "no truncated Gamma with mean {mean} above {lower_bound} puts probability {p} on \
             [{a}, {b}]"
        )
    })?;
    let beta = beta_matching_truncated_mean(alpha, lower_bound, mean)
        .ok_or_else(|| Error::non_convergence("inner scale solve failed at the fitted shape"))?;
    let params = if lower_bound > 0.0 {
        GammaParams::truncated_below(alpha, beta, lower_bound)?
    } else {
        GammaParams::new(alpha, beta)?
    };
    let report = pareto_fit_report(&params, mean, prob_gap(alpha));
    Ok((params, report))
}

/// Fits the truncated Gamma prior from an interval opinion on the
/// *expected loss* `μ(ξ) = Lξ/(ξ-1)` (decreasing in ξ), which pins one
/// equation:
/// `(F(ã) - F(b̃)) / (1 - F(B)) = p` with `ã = a/(a-L)`, `b̃ = b/(b-L)`.
/// A companion mean opinion `E[ξ]` supplies the second equation; without
/// it the system is under-determined and this returns an error (route
/// such sets through [`fit_least_squares`]).
pub fn fit_pareto_gamma_from_mean_interval(
    lower_bound: f64,
    threshold: f64,
    a: f64,
    b: f64,
    prob: f64,
    companion_mean_xi: Option<f64>,
) -> Result<(GammaParams, FitReport)> {
    if !(lower_bound > 1.0) {
        return Err(Error::invalid(format!(
            "expected-loss opinions need B > 1 (finite means), got B={lower_bound}"
        )));
    }
    let max_b = lower_bound * threshold / (lower_bound - 1.0);
    if !(threshold < a && a < b) || b > max_b {
        return Err(Error::infeasible(format!(
            "interval bounds must satisfy L < a < b <= B*L/(B-1) = {max_b}, got [{a}, {b}]"
        )));
    }
    let xi_lo = b / (b - threshold); // μ(ξ) = b
    let xi_hi = a / (a - threshold); // μ(ξ) = a
    fit_pareto_gamma_from_xi_window(lower_bound, xi_lo, xi_hi, prob, companion_mean_xi)
}

/// Same as [`fit_pareto_gamma_from_mean_interval`] for an interval
/// opinion on the quantile `Q_q(ξ)`:
/// `(F(C₂) - F(C₁)) / (1 - F(B)) = p` with
/// `C₁ = -ln(1-q)/ln(b/L)`, `C₂ = -ln(1-q)/ln(a/L)`.
pub fn fit_pareto_gamma_from_quantile_interval(
    lower_bound: f64,
    threshold: f64,
    q: f64,
    a: f64,
    b: f64,
    prob: f64,
    companion_mean_xi: Option<f64>,
) -> Result<(GammaParams, FitReport)> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::invalid(format!(
            "quantile level must be in (0,1), got {q}"
        )));
    }
    if !(lower_bound > 0.0) {
        return Err(Error::invalid(format!(
            "lower bound must be positive, got {lower_bound}"
        )));
    }
    let max_b = threshold * (-(1.0 - q).ln() / lower_bound).exp();
    if !(threshold < a && a < b) || b > max_b {
        return Err(Error::infeasible(format!(
            "interval bounds must satisfy L < a < b <= L*exp(-ln(1-q)/B) = {max_b}, got [{a}, {b}]"
        )));
    }
    let c1 = -(1.0 - q).ln() / (b / threshold).ln();
    let c2 = -(1.0 - q).ln() / (a / threshold).ln();
    fit_pareto_gamma_from_xi_window(lower_bound, c1, c2, prob, companion_mean_xi)
}

fn fit_pareto_gamma_from_xi_window(
    lower_bound: f64,
    xi_lo: f64,
    xi_hi: f64,
    prob: f64,
    companion_mean_xi: Option<f64>,
) -> Result<(GammaParams, FitReport)> {
    if !(prob > 0.0 && prob < 1.0) {
        return Err(Error::invalid(format!(
            "interval probability must be in (0,1), got {prob}"
        )));
    }
    let mean = companion_mean_xi.ok_or_else(|| {
        Error::invalid(
            "one interval equation cannot pin two parameters: supply a companion E[xi] opinion \
             or use fit_least_squares",
        )
    })?;
    if !(mean > lower_bound) {
        return Err(Error::invalid(format!(
            "companion mean {mean} must exceed the truncation bound {lower_bound}"
        )));
    }
    let prob_gap = |alpha: f64| -> f64 {
        match beta_matching_truncated_mean(alpha, lower_bound, mean) {
            Some(beta) => truncated_interval_prob(alpha, beta, lower_bound, xi_lo, xi_hi) - prob,
            None => f64::NAN,
        }
    };
    let alpha = solve_on_log_bracket(&prob_gap, ALPHA_BRACKET, || {
        format!(
            "no truncated Gamma with mean {mean} above {lower_bound} puts probability {prob} on \
             the implied xi-window [{xi_lo:.6}, {xi_hi:.6}]"
        )
    })?;
    let beta = beta_matching_truncated_mean(alpha, lower_bound, mean)
        .ok_or_else(|| Error::non_convergence("inner scale solve failed at the fitted shape"))?;
    let params = GammaParams::truncated_below(alpha, beta, lower_bound)?;
    let report = pareto_fit_report(&params, mean, prob_gap(alpha));
    Ok((params, report))
}

fn pareto_fit_report(params: &GammaParams, mean: f64, prob_residual: f64) -> FitReport {
    let fitted_mean = match params.lower_trunc {
        Some(b) if b > 0.0 => TruncatedGamma::new(params.untruncated(), b, f64::INFINITY)
            .map(|t| t.mean())
            .unwrap_or(f64::NAN),
        _ => params.mean_untruncated(),
    };
    FitReport::from_residuals(vec![fitted_mean / mean - 1.0, prob_residual], SCAN_POINTS)
}

/// Mass the truncated prior assigns to `[lo, hi]`.
fn truncated_interval_prob(alpha: f64, beta: f64, lower: f64, lo: f64, hi: f64) -> f64 {
    let tail = special::reg_upper_gamma(alpha, lower / beta);
    if !(tail > 0.0) {
        return f64::NAN;
    }
    let lo_cdf = special::reg_lower_gamma(alpha, lo.max(lower) / beta);
    let hi_cdf = if hi.is_finite() {
        special::reg_lower_gamma(alpha, hi / beta)
    } else {
        1.0
    };
    (hi_cdf - lo_cdf) / tail
}

/// Inner solve: the scale β at which the Gamma(α, β) truncated below
/// `lower` has the requested mean. The truncated mean is increasing in β
/// with infimum `lower`, and dominates the untruncated mean αβ, so
/// `[tiny, mean/α]` brackets the root.
fn beta_matching_truncated_mean(alpha: f64, lower: f64, mean: f64) -> Option<f64> {
    if lower <= 0.0 {
        return Some(mean / alpha);
    }
    let mean_gap = |beta: f64| -> f64 {
        let tail = special::reg_upper_gamma(alpha, lower / beta);
        if tail < 1e-280 {
            // Mass above the bound underflows; the conditional
            // distribution hugs the bound with an exponential-like tail
            // of scale β. Enough for the bracketing sign.
            return lower + beta - mean;
        }
        let tail1 = special::reg_upper_gamma(alpha + 1.0, lower / beta);
        alpha * beta * tail1 / tail - mean
    };
    let hi = mean / alpha;
    let mut lo = hi * 1e-12;
    let mut tries = 0;
    while mean_gap(lo) > 0.0 {
        lo *= 0.5;
        tries += 1;
        if tries > 200 {
            return None;
        }
    }
    solve::bisect(&mean_gap, lo, hi, 1e-12 * mean, 200).ok()
}

/// Scans `f` for a sign change on a geometric grid over `bracket` and
/// bisects. NaN values are skipped during the scan.
fn solve_on_log_bracket<F, M>(f: &F, bracket: (f64, f64), infeasible_msg: M) -> Result<f64>
where
    F: Fn(f64) -> f64,
    M: Fn() -> String,
{
    let (lo, hi) = solve::scan_bracket(f, bracket.0, bracket.1, SCAN_POINTS)
        .ok_or_else(|| Error::infeasible(infeasible_msg()))?;
    solve::bisect(f, lo, hi, 1e-12, 300)
}

// ---------------------------------------------------------------------------
// Expected functionals of a truncated Gamma prior (numerical)
// ---------------------------------------------------------------------------

/// Functional of ξ whose prior expectation is requested.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailFunctional {
    /// `μ(ξ) = L·ξ/(ξ-1)`; needs the truncation bound above 1.
    ExpectedLoss { threshold: f64 },
    /// `Q_q(ξ) = L·exp(-ln(1-q)/ξ)`.
    ExpectedQuantile { threshold: f64, q: f64 },
}

/// Expectation of a tail functional against a truncated Gamma prior,
/// by adaptive quadrature between the far quantiles of the truncated
/// distribution (capped at `B + 50·α·β`), with the remaining tail
/// bounded through monotonicity of the integrand.
pub fn truncated_gamma_expected_functional(
    params: &GammaParams,
    functional: TailFunctional,
) -> Result<f64> {
    params.validate()?;
    let lower = params.lower_trunc.ok_or_else(|| {
        Error::invalid("expected functionals are defined for truncated priors; set lower_trunc")
    })?;
    let g: Box<dyn Fn(f64) -> f64> = match functional {
        TailFunctional::ExpectedLoss { threshold } => {
            if !(lower > 1.0) {
                return Err(Error::invalid(format!(
                    "expected loss needs truncation above 1 (finite means), got B={lower}"
                )));
            }
            if !(threshold > 0.0) {
                return Err(Error::invalid("threshold must be positive"));
            }
            Box::new(move |xi: f64| threshold * xi / (xi - 1.0))
        }
        TailFunctional::ExpectedQuantile { threshold, q } => {
            if !(q > 0.0 && q < 1.0) {
                return Err(Error::invalid(format!(
                    "quantile level must be in (0,1), got {q}"
                )));
            }
            if !(lower > 0.0) {
                return Err(Error::invalid(
                    "expected quantile needs a positive truncation bound",
                ));
            }
            if !(threshold > 0.0) {
                return Err(Error::invalid("threshold must be positive"));
            }
            Box::new(move |xi: f64| threshold * (-(1.0 - q).ln() / xi).exp())
        }
    };
    let trunc = TruncatedGamma::new(params.untruncated(), lower, f64::INFINITY)?;
    // Integrate between far quantiles of the truncated prior so the
    // quadrature never misses a concentrated spike.
    let cap = lower + 50.0 * params.alpha * params.beta;
    let lo = trunc.quantile(1e-13)?.max(lower);
    let hi = trunc.quantile(1.0 - 1e-13)?.min(cap).max(lo * (1.0 + 1e-9));
    let integrand = |xi: f64| g(xi) * trunc.pdf(xi);
    let scale = g(lo).abs().max(1.0);
    let mut value = solve::adaptive_simpson(&integrand, lo, hi, 1e-10 * scale);
    // Right tail: g decreases toward its limit, so the remaining mass
    // contributes at most g(hi) each.
    let tail_mass = (1.0 - trunc.cdf(hi)).max(0.0);
    value += g(hi) * tail_mass;
    // Left edge below the far quantile.
    let head_mass = trunc.cdf(lo);
    value += g(lower) * head_mass;
    Ok(value)
}

// ---------------------------------------------------------------------------
// Nonlinear least squares over arbitrary opinion sets
// ---------------------------------------------------------------------------

/// One target equation for [`fit_least_squares`]. Gamma-family and
/// LogNormal-family constraints cannot be mixed in one fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitConstraint {
    /// `αβ = target` (untruncated mean).
    GammaMean { target: f64 },
    /// `F(b) - F(a) = prob` (untruncated interval mass).
    GammaInterval { a: f64, b: f64, prob: f64 },
    /// Truncated mean equation above `lower`.
    TruncGammaMean { lower: f64, target: f64 },
    /// Truncated interval mass on `[a, b]` above `lower`.
    TruncGammaInterval {
        lower: f64,
        a: f64,
        b: f64,
        prob: f64,
    },
    /// `E[L·ξ/(ξ-1)] = target` under the truncated prior.
    TruncGammaExpectedLoss {
        lower: f64,
        threshold: f64,
        target: f64,
    },
    /// `E[Q_q(ξ)] = target` under the truncated prior.
    TruncGammaExpectedQuantile {
        lower: f64,
        threshold: f64,
        q: f64,
        target: f64,
    },
    /// Expected-loss interval equation above `lower`.
    ParetoMeanInterval {
        lower: f64,
        threshold: f64,
        a: f64,
        b: f64,
        prob: f64,
    },
    /// Quantile interval equation above `lower`.
    ParetoQuantileInterval {
        lower: f64,
        threshold: f64,
        q: f64,
        a: f64,
        b: f64,
        prob: f64,
    },
    /// `exp(μ₀ + σ²/2 + σ₀²/2) = target`.
    LognormalMean { sigma: f64, target: f64 },
    /// Interval mass for the expected loss `M`.
    LognormalMeanInterval {
        sigma: f64,
        a: f64,
        b: f64,
        prob: f64,
    },
    /// `exp(μ₀ + σZ_q + σ₀²/2) = target`.
    LognormalQuantile { sigma: f64, q: f64, target: f64 },
    /// Interval mass for the quantile `Q_q`.
    LognormalQuantileInterval {
        sigma: f64,
        q: f64,
        a: f64,
        b: f64,
        prob: f64,
    },
}

impl FitConstraint {
    fn is_lognormal(&self) -> bool {
        matches!(
            self,
            FitConstraint::LognormalMean { .. }
                | FitConstraint::LognormalMeanInterval { .. }
                | FitConstraint::LognormalQuantile { .. }
                | FitConstraint::LognormalQuantileInterval { .. }
        )
    }
}

/// Parameters produced by [`fit_least_squares`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FittedParams {
    Gamma(GammaParams),
    Normal(NormalParams),
}

/// Minimizes the weighted squared residuals of two or more constraint
/// equations over positive (α, β) or (μ₀, σ₀). Consistent, correctly
/// counted constraint sets solve exactly (residuals ≤ 1e-8);
/// contradictory sets converge to the least-squares compromise with the
/// residuals reported as-is.
pub fn fit_least_squares(
    constraints: &[(FitConstraint, f64)],
) -> Result<(FittedParams, FitReport)> {
    if constraints.len() < 2 {
        return Err(Error::invalid(
            "fit_least_squares needs at least 2 constraints",
        ));
    }
    if constraints.iter().any(|(_, w)| !(*w > 0.0)) {
        return Err(Error::invalid("constraint weights must be positive"));
    }
    let lognormal = constraints[0].0.is_lognormal();
    if constraints
        .iter()
        .any(|(c, _)| c.is_lognormal() != lognormal)
    {
        return Err(Error::invalid(
            "cannot mix Gamma-family and LogNormal-family constraints in one fit",
        ));
    }

    let weights: Vec<f64> = constraints.iter().map(|(_, w)| *w).collect();
    let residual_fn = |x: &[f64]| -> Vec<f64> {
        constraints
            .iter()
            .map(|(c, _)| constraint_residual(c, x, lognormal))
            .collect()
    };
    let objective = |x: &[f64]| -> f64 {
        residual_fn(x)
            .iter()
            .zip(&weights)
            .map(|(r, w)| if r.is_finite() { w * r * r } else { 1e12 })
            .sum()
    };

    let x0 = initial_guess(constraints, lognormal);
    let (xm, _) = solve::nelder_mead(&objective, &x0, solve::SimplexOptions::default());
    let (xf, residuals, gn_iters) = solve::gauss_newton(&residual_fn, &xm, &weights, 60);

    let params = if lognormal {
        FittedParams::Normal(NormalParams::new(xf[0], xf[1].exp())?)
    } else {
        let lower = constraints.iter().find_map(|(c, _)| constraint_lower(c));
        let alpha = xf[0].exp();
        let beta = xf[1].exp();
        match lower {
            Some(b) if b > 0.0 => {
                FittedParams::Gamma(GammaParams::truncated_below(alpha, beta, b)?)
            }
            _ => FittedParams::Gamma(GammaParams::new(alpha, beta)?),
        }
    };
    // Least-squares compromise: `converged` records that the optimizer
    // finished, the residuals say how consistent the opinions were.
    let report = FitReport {
        residuals,
        iterations: gn_iters,
        converged: true,
    };
    Ok((params, report))
}

fn constraint_lower(c: &FitConstraint) -> Option<f64> {
    match c {
        FitConstraint::TruncGammaMean { lower, .. }
        | FitConstraint::TruncGammaInterval { lower, .. }
        | FitConstraint::TruncGammaExpectedLoss { lower, .. }
        | FitConstraint::TruncGammaExpectedQuantile { lower, .. }
        | FitConstraint::ParetoMeanInterval { lower, .. }
        | FitConstraint::ParetoQuantileInterval { lower, .. } => Some(*lower),
        _ => None,
    }
}

fn constraint_residual(c: &FitConstraint, x: &[f64], lognormal: bool) -> f64 {
    if lognormal {
        let mu0 = x[0];
        let sigma0 = x[1].exp();
        return match c {
            FitConstraint::LognormalMean { sigma, target } => {
                (mu0 + sigma * sigma / 2.0 + sigma0 * sigma0 / 2.0).exp() / target - 1.0
            }
            FitConstraint::LognormalMeanInterval { sigma, a, b, prob } => {
                let shift = sigma * sigma / 2.0;
                special::std_normal_cdf((b.ln() - shift - mu0) / sigma0)
                    - special::std_normal_cdf((a.ln() - shift - mu0) / sigma0)
                    - prob
            }
            FitConstraint::LognormalQuantile { sigma, q, target } => {
                let shift = sigma * special::std_normal_quantile_kernel(*q);
                (mu0 + shift + sigma0 * sigma0 / 2.0).exp() / target - 1.0
            }
            FitConstraint::LognormalQuantileInterval {
                sigma,
                q,
                a,
                b,
                prob,
            } => {
                let shift = sigma * special::std_normal_quantile_kernel(*q);
                special::std_normal_cdf((b.ln() - shift - mu0) / sigma0)
                    - special::std_normal_cdf((a.ln() - shift - mu0) / sigma0)
                    - prob
            }
            _ => f64::NAN,
        };
    }
    let alpha = x[0].exp();
    let beta = x[1].exp();
    match c {
        FitConstraint::GammaMean { target } => alpha * beta / target - 1.0,
        FitConstraint::GammaInterval { a, b, prob } => {
            special::reg_lower_gamma(alpha, b / beta)
                - special::reg_lower_gamma(alpha, a / beta)
                - prob
        }
        FitConstraint::TruncGammaMean { lower, target } => {
            match TruncatedGamma::new(
                GammaParams {
                    alpha,
                    beta,
                    lower_trunc: None,
                },
                *lower,
                f64::INFINITY,
            ) {
                Ok(t) => t.mean() / target - 1.0,
                Err(_) => f64::NAN,
            }
        }
        FitConstraint::TruncGammaInterval { lower, a, b, prob } => {
            truncated_interval_prob(alpha, beta, *lower, *a, *b) - prob
        }
        FitConstraint::TruncGammaExpectedLoss {
            lower,
            threshold,
            target,
        } => match GammaParams::truncated_below(alpha, beta, *lower) {
            Ok(p) => truncated_gamma_expected_functional(
                &p,
                TailFunctional::ExpectedLoss {
                    threshold: *threshold,
                },
            )
            .map(|v| v / target - 1.0)
            .unwrap_or(f64::NAN),
            Err(_) => f64::NAN,
        },
        FitConstraint::TruncGammaExpectedQuantile {
            lower,
            threshold,
            q,
            target,
        } => match GammaParams::truncated_below(alpha, beta, *lower) {
            Ok(p) => truncated_gamma_expected_functional(
                &p,
                TailFunctional::ExpectedQuantile {
                    threshold: *threshold,
                    q: *q,
                },
            )
            .map(|v| v / target - 1.0)
            .unwrap_or(f64::NAN),
            Err(_) => f64::NAN,
        },
        FitConstraint::ParetoMeanInterval {
            lower,
            threshold,
            a,
            b,
            prob,
        } => {
            let xi_lo = b / (b - threshold);
            let xi_hi = a / (a - threshold);
            truncated_interval_prob(alpha, beta, *lower, xi_lo, xi_hi) - prob
        }
        FitConstraint::ParetoQuantileInterval {
            lower,
            threshold,
            q,
            a,
            b,
            prob,
        } => {
            let c1 = -(1.0 - q).ln() / (b / threshold).ln();
            let c2 = -(1.0 - q).ln() / (a / threshold).ln();
            truncated_interval_prob(alpha, beta, *lower, c1, c2) - prob
        }
        _ => f64::NAN,
    }
}

fn initial_guess(constraints: &[(FitConstraint, f64)], lognormal: bool) -> Vec<f64> {
    if lognormal {
        for (c, _) in constraints {
            match c {
                FitConstraint::LognormalMean { sigma, target } => {
                    return vec![target.ln() - sigma * sigma / 2.0, (0.3f64).ln()];
                }
                FitConstraint::LognormalQuantile { sigma, q, target } => {
                    let shift = sigma * special::std_normal_quantile_kernel(*q);
                    return vec![target.ln() - shift, (0.3f64).ln()];
                }
                _ => {}
            }
        }
        return vec![0.0, (0.3f64).ln()];
    }
    let mut mean = 1.0;
    for (c, _) in constraints {
        match c {
            FitConstraint::GammaMean { target } | FitConstraint::TruncGammaMean { target, .. } => {
                mean = *target;
                break;
            }
            FitConstraint::GammaInterval { a, b, .. }
            | FitConstraint::TruncGammaInterval { a, b, .. } => {
                mean = 0.5 * (a + b);
            }
            _ => {}
        }
    }
    let alpha0 = 4.0f64;
    vec![alpha0.ln(), (mean / alpha0).ln()]
}
