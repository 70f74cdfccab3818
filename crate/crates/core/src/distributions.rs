//! Distribution parameter types and deterministic kernels (density, CDF,
//! quantile, pmf) for every family the model uses.
//!
//! Quantiles are computed by safeguarded Newton iteration on the CDF
//! inside a doubling bracket; the iteration stops once the CDF residual
//! is below a few hundred ulps or the bracket cannot shrink further.
//! Seeded samplers live in [`crate::rng`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{cast, Real};
use crate::special;

/// Mass below this threshold in a truncated region is treated as
/// numerically empty and reported as an error instead of producing
/// unusable conditional distributions.
pub const NEGLIGIBLE_MASS: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Parameter types
// ---------------------------------------------------------------------------

/// Gamma(α, β) in the shape/scale parameterization (mean `α·β`),
/// optionally truncated below `lower_trunc`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaParams<T> {
    pub alpha: T,
    pub beta: T,
    #[serde(default = "none_t", skip_serializing_if = "Option::is_none")]
    pub lower_trunc: Option<T>,
}

fn none_t<T>() -> Option<T> {
    None
}

impl<T: Real> GammaParams<T> {
    pub fn new(alpha: T, beta: T) -> Result<Self> {
        if !(alpha > T::zero() && alpha.is_finite()) || !(beta > T::zero() && beta.is_finite()) {
            return Err(Error::invalid(format!(
                "gamma parameters must be positive and finite, got alpha={alpha}, beta={beta}"
            )));
        }
        Ok(GammaParams {
            alpha,
            beta,
            lower_trunc: None,
        })
    }

    /// Same parameters, truncated to `[lower, ∞)`.
    pub fn truncated_below(alpha: T, beta: T, lower: T) -> Result<Self> {
        if !(lower >= T::zero() && lower.is_finite()) {
            return Err(Error::invalid(format!(
                "truncation bound must be a finite nonnegative real, got {lower}"
            )));
        }
        let mut p = Self::new(alpha, beta)?;
        p.lower_trunc = Some(lower);
        Ok(p)
    }

    /// The untruncated base distribution.
    pub fn untruncated(&self) -> Self {
        GammaParams {
            alpha: self.alpha,
            beta: self.beta,
            lower_trunc: None,
        }
    }

    /// Mean of the untruncated distribution, `α·β`.
    pub fn mean_untruncated(&self) -> T {
        self.alpha * self.beta
    }

    /// Variance of the untruncated distribution, `α·β²`.
    pub fn variance_untruncated(&self) -> T {
        self.alpha * self.beta * self.beta
    }

    /// Probability mass above the truncation point (1 when untruncated).
    pub fn truncation_mass(&self) -> T {
        match self.lower_trunc {
            None => T::one(),
            Some(b) if b <= T::zero() => T::one(),
            Some(b) => special::reg_upper_gamma(self.alpha, b / self.beta),
        }
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.alpha, self.beta)?;
        if let Some(b) = self.lower_trunc {
            if !(b >= T::zero() && b.is_finite()) {
                return Err(Error::invalid(format!("invalid truncation bound {b}")));
            }
            if self.truncation_mass() < cast(NEGLIGIBLE_MASS) {
                return Err(Error::invalid(format!(
                    "gamma truncation at {b} leaves negligible mass (< {NEGLIGIBLE_MASS})"
                )));
            }
        }
        Ok(())
    }
}

/// Normal(μ, σ) location/scale pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalParams<T> {
    pub mu: T,
    pub sigma: T,
}

impl<T: Real> NormalParams<T> {
    pub fn new(mu: T, sigma: T) -> Result<Self> {
        if !mu.is_finite() || !(sigma > T::zero() && sigma.is_finite()) {
            return Err(Error::invalid(format!(
                "normal parameters must be finite with sigma > 0, got mu={mu}, sigma={sigma}"
            )));
        }
        Ok(NormalParams { mu, sigma })
    }
}

/// Pareto tail with index `ξ` over threshold `L`: density
/// `ξ/L · (x/L)^{-ξ-1}` for `x ≥ L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParetoParams<T> {
    pub xi: T,
    pub threshold: T,
}

impl<T: Real> ParetoParams<T> {
    pub fn new(xi: T, threshold: T) -> Result<Self> {
        if !(xi > T::zero() && xi.is_finite()) || !(threshold > T::zero() && threshold.is_finite())
        {
            return Err(Error::invalid(format!(
                "pareto parameters must be positive and finite, got xi={xi}, threshold={threshold}"
            )));
        }
        Ok(ParetoParams { xi, threshold })
    }

    /// Mean `L·ξ/(ξ-1)`; infinite when `ξ ≤ 1`.
    pub fn mean(&self) -> T {
        if self.xi > T::one() {
            self.threshold * self.xi / (self.xi - T::one())
        } else {
            T::infinity()
        }
    }
}

/// Negative Binomial with size `r` and success probability `p`; the
/// predictive count distribution of a Gamma-mixed Poisson.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NegBinParams<T> {
    pub r: T,
    pub p: T,
}

impl<T: Real> NegBinParams<T> {
    pub fn new(r: T, p: T) -> Result<Self> {
        if !(r > T::zero() && r.is_finite()) || !(p > T::zero() && p < T::one()) {
            return Err(Error::invalid(format!(
                "negative binomial needs r > 0 and p in (0,1), got r={r}, p={p}"
            )));
        }
        Ok(NegBinParams { r, p })
    }

    /// Mean `r·(1-p)/p`.
    pub fn mean(&self) -> T {
        self.r * (T::one() - self.p) / self.p
    }
}

/// Joint prior for (μ, σ²) of a log-normal severity: σ² is scaled
/// inverse chi-squared with `nu` degrees of freedom and scale `beta`,
/// and μ | σ² is Normal(θ, σ²/φ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalInvChiSqParams<T> {
    pub nu: T,
    pub beta: T,
    pub theta: T,
    pub phi: T,
}

impl<T: Real> NormalInvChiSqParams<T> {
    pub fn new(nu: T, beta: T, theta: T, phi: T) -> Result<Self> {
        if !(nu > T::zero()) || !(beta > T::zero()) || !(phi > T::zero()) || !theta.is_finite() {
            return Err(Error::invalid(format!(
                "normal-inv-chi-squared needs nu, beta, phi > 0, got nu={nu}, beta={beta}, \
                 theta={theta}, phi={phi}"
            )));
        }
        Ok(NormalInvChiSqParams {
            nu,
            beta,
            theta,
            phi,
        })
    }

    /// Scale of the shifted-t marginal of μ: `sqrt(β/(ν·φ))`.
    pub fn t_scale(&self) -> T {
        (self.beta / (self.nu * self.phi)).sqrt()
    }
}

// ---------------------------------------------------------------------------
// Gamma kernels
// ---------------------------------------------------------------------------

/// CDF of the untruncated Gamma(α, β) at `x ≥ 0`.
pub fn gamma_cdf<T: Real>(x: T, params: &GammaParams<T>) -> Result<T> {
    params.untruncated().validate()?;
    if params.lower_trunc.is_some() {
        return Err(Error::invalid(
            "gamma_cdf expects untruncated parameters; use TruncatedGamma::cdf",
        ));
    }
    if !x.is_finite() && !(x == T::infinity()) {
        return Err(Error::invalid(format!(
            "gamma_cdf needs finite x >= 0, got {x}"
        )));
    }
    if x < T::zero() {
        return Err(Error::invalid(format!("gamma_cdf needs x >= 0, got {x}")));
    }
    Ok(special::reg_lower_gamma(params.alpha, x / params.beta))
}

/// Survival function `1 - F(x)` of the untruncated Gamma, computed in
/// the tail without cancellation.
pub fn gamma_sf<T: Real>(x: T, params: &GammaParams<T>) -> Result<T> {
    params.untruncated().validate()?;
    if x < T::zero() {
        return Err(Error::invalid(format!("gamma_sf needs x >= 0, got {x}")));
    }
    Ok(special::reg_upper_gamma(params.alpha, x / params.beta))
}

/// Density of the untruncated Gamma(α, β).
pub fn gamma_pdf<T: Real>(x: T, params: &GammaParams<T>) -> Result<T> {
    params.untruncated().validate()?;
    if x < T::zero() {
        return Ok(T::zero());
    }
    if x == T::zero() {
        // Limit value: finite only for α >= 1.
        return Ok(if params.alpha > T::one() {
            T::zero()
        } else if params.alpha == T::one() {
            T::one() / params.beta
        } else {
            T::infinity()
        });
    }
    let a = params.alpha;
    let b = params.beta;
    Ok(((a - T::one()) * (x / b).ln() - x / b - special::ln_gamma(a)).exp() / b)
}

/// Quantile of the untruncated Gamma(α, β) for `p` in `(0, 1)`.
pub fn gamma_quantile<T: Real>(p: T, params: &GammaParams<T>) -> Result<T> {
    params.untruncated().validate()?;
    if !(p > T::zero() && p < T::one()) {
        return Err(Error::invalid(format!(
            "gamma_quantile needs p in (0,1), got {p}"
        )));
    }
    let a = params.alpha;
    // Wilson-Hilferty starting point in the unit-scale variable.
    let z = special::std_normal_quantile_kernel(p);
    let nine_a = cast::<T>(9.0) * a;
    let wh = a * (T::one() - T::one() / nine_a + z / nine_a.sqrt()).powi(3);
    let guess = if wh.is_finite() && wh > T::zero() {
        wh
    } else {
        a
    };
    let unit = GammaParams {
        alpha: a,
        beta: T::one(),
        lower_trunc: None,
    };
    let x = invert_cdf(
        |x| special::reg_lower_gamma(a, x),
        |x| gamma_pdf(x, &unit).unwrap_or(T::zero()),
        p,
        guess,
    )?;
    Ok(x * params.beta)
}

// ---------------------------------------------------------------------------
// Normal / log-normal kernels
// ---------------------------------------------------------------------------

/// Standard normal quantile `Z_q`.
pub fn std_normal_quantile<T: Real>(q: T) -> Result<T> {
    if !(q > T::zero() && q < T::one()) {
        return Err(Error::invalid(format!(
            "std_normal_quantile needs q in (0,1), got {q}"
        )));
    }
    Ok(special::std_normal_quantile_kernel(q))
}

/// CDF of Normal(μ, σ).
pub fn normal_cdf<T: Real>(x: T, params: &NormalParams<T>) -> T {
    special::std_normal_cdf((x - params.mu) / params.sigma)
}

/// Density of Normal(μ, σ).
pub fn normal_pdf<T: Real>(x: T, params: &NormalParams<T>) -> T {
    special::std_normal_pdf((x - params.mu) / params.sigma) / params.sigma
}

/// Quantile of Normal(μ, σ).
pub fn normal_quantile<T: Real>(q: T, params: &NormalParams<T>) -> Result<T> {
    Ok(params.mu + params.sigma * std_normal_quantile(q)?)
}

/// Mean of LogNormal(μ, σ): `exp(μ + σ²/2)`.
pub fn lognormal_mean<T: Real>(mu: T, sigma: T) -> Result<T> {
    if !mu.is_finite() || !(sigma >= T::zero() && sigma.is_finite()) {
        return Err(Error::invalid(format!(
            "lognormal_mean needs finite mu and sigma >= 0, got mu={mu}, sigma={sigma}"
        )));
    }
    Ok((mu + sigma * sigma / cast(2.0)).exp())
}

/// Quantile of LogNormal(μ, σ): `exp(μ + σ·Z_q)`.
pub fn lognormal_quantile<T: Real>(q: T, mu: T, sigma: T) -> Result<T> {
    if !(sigma > T::zero()) {
        return Err(Error::invalid(format!(
            "lognormal_quantile needs sigma > 0, got {sigma}"
        )));
    }
    Ok((mu + sigma * std_normal_quantile(q)?).exp())
}

/// Density of LogNormal(μ, σ).
pub fn lognormal_pdf<T: Real>(x: T, mu: T, sigma: T) -> T {
    if x <= T::zero() {
        return T::zero();
    }
    special::std_normal_pdf((x.ln() - mu) / sigma) / (x * sigma)
}

// ---------------------------------------------------------------------------
// Pareto kernels
// ---------------------------------------------------------------------------

/// CDF of the Pareto tail: `1 - (x/L)^{-ξ}` for `x ≥ L`.
pub fn pareto_cdf<T: Real>(x: T, params: &ParetoParams<T>) -> T {
    if x <= params.threshold {
        T::zero()
    } else {
        T::one() - (x / params.threshold).powf(-params.xi)
    }
}

/// Density of the Pareto tail.
pub fn pareto_pdf<T: Real>(x: T, params: &ParetoParams<T>) -> T {
    if x < params.threshold {
        T::zero()
    } else {
        params.xi / params.threshold * (x / params.threshold).powf(-params.xi - T::one())
    }
}

/// Quantile of the Pareto tail: `L·exp(-ln(1-q)/ξ)`, always `≥ L`.
pub fn pareto_quantile<T: Real>(q: T, params: &ParetoParams<T>) -> Result<T> {
    if !(q > T::zero() && q < T::one()) {
        return Err(Error::invalid(format!(
            "pareto_quantile needs q in (0,1), got {q}"
        )));
    }
    Ok(params.threshold * (-(T::one() - q).ln() / params.xi).exp())
}

// ---------------------------------------------------------------------------
// Negative binomial pmf
// ---------------------------------------------------------------------------

/// Probability of observing `n` events under NegBin(r, p):
/// `Γ(n+r)/(Γ(r)·n!) · (1-p)^n · p^r`.
pub fn negbin_pmf<T: Real>(n: u64, params: &NegBinParams<T>) -> Result<T> {
    NegBinParams::new(params.r, params.p)?;
    let nf: T = cast(n as f64);
    let r = params.r;
    let ln_pmf =
        special::ln_gamma(nf + r) - special::ln_gamma(r) - special::ln_gamma(nf + T::one())
            + nf * (T::one() - params.p).ln()
            + r * params.p.ln();
    Ok(ln_pmf.exp())
}

// ---------------------------------------------------------------------------
// Shifted-t marginal of the joint (μ, σ²) prior
// ---------------------------------------------------------------------------

/// Unnormalized marginal density of μ under the joint prior:
/// `[1 + φ(μ-θ)²/β]^{-(ν+1)/2}`. Equals 1 at the mode `μ = θ`.
pub fn shifted_t_pdf_unnormalized<T: Real>(mu_val: T, params: &NormalInvChiSqParams<T>) -> T {
    let d = mu_val - params.theta;
    (T::one() + params.phi * d * d / params.beta).powf(-(params.nu + T::one()) / cast(2.0))
}

/// Normalized marginal density of μ: a Student-t with `ν` degrees of
/// freedom, location `θ` and scale `sqrt(β/(ν·φ))`.
pub fn shifted_t_pdf<T: Real>(mu_val: T, params: &NormalInvChiSqParams<T>) -> T {
    let nu = params.nu;
    let s = params.t_scale();
    let z = (mu_val - params.theta) / s;
    let half = cast::<T>(0.5);
    let ln_norm = special::ln_gamma((nu + T::one()) * half)
        - special::ln_gamma(nu * half)
        - half * (nu * cast::<T>(std::f64::consts::PI)).ln()
        - s.ln();
    let ln_kernel = -(nu + T::one()) * half * (T::one() + z * z / nu).ln();
    (ln_norm + ln_kernel).exp()
}

/// CDF of the shifted-t marginal of μ.
pub fn shifted_t_cdf<T: Real>(mu_val: T, params: &NormalInvChiSqParams<T>) -> T {
    special::student_t_cdf((mu_val - params.theta) / params.t_scale(), params.nu)
}

/// Quantile of the shifted-t marginal of μ.
pub fn shifted_t_quantile<T: Real>(q: T, params: &NormalInvChiSqParams<T>) -> Result<T> {
    if !(q > T::zero() && q < T::one()) {
        return Err(Error::invalid(format!(
            "shifted_t_quantile needs q in (0,1), got {q}"
        )));
    }
    let nu = params.nu;
    // Invert the standardized t CDF, then shift and scale.
    let guess = special::std_normal_quantile_kernel(q);
    let z = invert_unbounded_cdf(|t| special::student_t_cdf(t, nu), q, guess)?;
    Ok(params.theta + params.t_scale() * z)
}

// ---------------------------------------------------------------------------
// Two-sided truncation
// ---------------------------------------------------------------------------

/// A Gamma distribution restricted and renormalized to `[lower, upper]`.
#[derive(Debug, Clone, Copy)]
pub struct TruncatedGamma<T> {
    pub base: GammaParams<T>,
    pub lower: T,
    pub upper: T,
    pub mass: T,
}

impl<T: Real> TruncatedGamma<T> {
    /// Restrict `base` to `[lower, upper]` (use `0`/`+∞` for one-sided
    /// truncation). Errors when the interval carries negligible mass.
    pub fn new(base: GammaParams<T>, lower: T, upper: T) -> Result<Self> {
        base.untruncated().validate()?;
        let lower = lower.max(T::zero());
        if !(lower < upper) {
            return Err(Error::invalid(format!(
                "truncation interval must satisfy lower < upper, got [{lower}, {upper}]"
            )));
        }
        let base = base.untruncated();
        let lo_cdf = special::reg_lower_gamma(base.alpha, lower / base.beta);
        let hi_cdf = if upper.is_finite() {
            special::reg_lower_gamma(base.alpha, upper / base.beta)
        } else {
            T::one()
        };
        // Right tail via the survival function to keep relative accuracy.
        let mass = if !upper.is_finite() {
            special::reg_upper_gamma(base.alpha, lower / base.beta)
        } else {
            hi_cdf - lo_cdf
        };
        if mass < cast(NEGLIGIBLE_MASS) {
            return Err(Error::invalid(format!(
                "truncation to [{lower}, {upper}] leaves negligible mass {mass}"
            )));
        }
        Ok(TruncatedGamma {
            base,
            lower,
            upper,
            mass,
        })
    }

    pub fn pdf(&self, x: T) -> T {
        if x < self.lower || x > self.upper {
            T::zero()
        } else {
            gamma_pdf(x, &self.base).unwrap_or(T::zero()) / self.mass
        }
    }

    pub fn cdf(&self, x: T) -> T {
        if x <= self.lower {
            return T::zero();
        }
        if x >= self.upper {
            return T::one();
        }
        let lo = special::reg_lower_gamma(self.base.alpha, self.lower / self.base.beta);
        let fx = special::reg_lower_gamma(self.base.alpha, x / self.base.beta);
        ((fx - lo) / self.mass).min(T::one())
    }

    /// Conditional inverse transform: maps `u ∈ (0,1)` into the
    /// untruncated CDF range `[F(lower), F(upper))` and inverts.
    pub fn quantile(&self, u: T) -> Result<T> {
        if !(u > T::zero() && u < T::one()) {
            return Err(Error::invalid(format!(
                "truncated quantile needs u in (0,1), got {u}"
            )));
        }
        let lo = special::reg_lower_gamma(self.base.alpha, self.lower / self.base.beta);
        let p = (lo + u * self.mass).min(T::one() - T::epsilon());
        let x = gamma_quantile(p, &self.base)?;
        Ok(x.max(self.lower).min(self.upper))
    }

    /// Mean of the truncated distribution. For lower-only truncation at
    /// `B` this is `α·β·(1-F_{α+1,β}(B))/(1-F_{α,β}(B))`, extended with
    /// the matching upper-tail correction for two-sided intervals.
    pub fn mean(&self) -> T {
        let a1 = self.base.alpha + T::one();
        let lo1 = special::reg_lower_gamma(a1, self.lower / self.base.beta);
        let hi1 = if self.upper.is_finite() {
            special::reg_lower_gamma(a1, self.upper / self.base.beta)
        } else {
            T::one()
        };
        let mass1 = if !self.upper.is_finite() {
            special::reg_upper_gamma(a1, self.lower / self.base.beta)
        } else {
            hi1 - lo1
        };
        self.base.mean_untruncated() * mass1 / self.mass
    }
}

/// A Normal distribution restricted and renormalized to `[lower, upper]`.
#[derive(Debug, Clone, Copy)]
pub struct TruncatedNormal<T> {
    pub base: NormalParams<T>,
    pub lower: T,
    pub upper: T,
    pub mass: T,
}

impl<T: Real> TruncatedNormal<T> {
    pub fn new(base: NormalParams<T>, lower: T, upper: T) -> Result<Self> {
        NormalParams::new(base.mu, base.sigma)?;
        if !(lower < upper) {
            return Err(Error::invalid(format!(
                "truncation interval must satisfy lower < upper, got [{lower}, {upper}]"
            )));
        }
        let lo_cdf = if lower.is_finite() {
            normal_cdf(lower, &base)
        } else {
            T::zero()
        };
        let hi_cdf = if upper.is_finite() {
            normal_cdf(upper, &base)
        } else {
            T::one()
        };
        let mass = hi_cdf - lo_cdf;
        if mass < cast(NEGLIGIBLE_MASS) {
            return Err(Error::invalid(format!(
                "truncation to [{lower}, {upper}] leaves negligible mass {mass}"
            )));
        }
        Ok(TruncatedNormal {
            base,
            lower,
            upper,
            mass,
        })
    }

    pub fn pdf(&self, x: T) -> T {
        if x < self.lower || x > self.upper {
            T::zero()
        } else {
            normal_pdf(x, &self.base) / self.mass
        }
    }

    pub fn cdf(&self, x: T) -> T {
        if x <= self.lower {
            return T::zero();
        }
        if x >= self.upper {
            return T::one();
        }
        let lo = if self.lower.is_finite() {
            normal_cdf(self.lower, &self.base)
        } else {
            T::zero()
        };
        ((normal_cdf(x, &self.base) - lo) / self.mass).min(T::one())
    }
}

// ---------------------------------------------------------------------------
// CDF inversion helpers
// ---------------------------------------------------------------------------

/// Inverts a CDF supported on `[0, ∞)` by bracketing + safeguarded
/// Newton. `pdf` supplies the derivative; `guess` seeds the bracket.
fn invert_cdf<T, F, D>(cdf: F, pdf: D, p: T, guess: T) -> Result<T>
where
    T: Real,
    F: Fn(T) -> T,
    D: Fn(T) -> T,
{
    let mut lo = T::zero();
    let mut hi = guess.max(T::min_positive_value() * cast(1e6));
    // Grow the upper bracket until it encloses p.
    let mut grow = 0;
    while cdf(hi) < p {
        lo = hi;
        hi *= cast(2.0);
        grow += 1;
        if grow > 600 {
            return Err(Error::non_convergence(format!(
                "cdf inversion failed to bracket p={p}"
            )));
        }
    }
    newton_in_bracket(cdf, pdf, p, lo, hi)
}

/// Inverts a CDF supported on the whole real line.
fn invert_unbounded_cdf<T, F>(cdf: F, p: T, guess: T) -> Result<T>
where
    T: Real,
    F: Fn(T) -> T,
{
    let one: T = cast(1.0);
    let mut lo = guess - one;
    let mut hi = guess + one;
    let mut step = one;
    let mut grow = 0;
    while cdf(lo) > p {
        step *= cast(2.0);
        lo -= step;
        grow += 1;
        if grow > 600 {
            return Err(Error::non_convergence("cdf inversion: no lower bracket"));
        }
    }
    step = one;
    while cdf(hi) < p {
        step *= cast(2.0);
        hi += step;
        grow += 1;
        if grow > 1200 {
            return Err(Error::non_convergence("cdf inversion: no upper bracket"));
        }
    }
    // Bisection only; derivative-free is plenty at these call rates.
    let tol = cast::<T>(200.0) * T::epsilon();
    for _ in 0..500 {
        let mid = (lo + hi) / cast(2.0);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let f = cdf(mid) - p;
        if f.abs() <= tol {
            return Ok(mid);
        }
        if f < T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) / cast(2.0))
}

fn newton_in_bracket<T, F, D>(cdf: F, pdf: D, p: T, mut lo: T, mut hi: T) -> Result<T>
where
    T: Real,
    F: Fn(T) -> T,
    D: Fn(T) -> T,
{
    let tol = cast::<T>(200.0) * T::epsilon();
    let mut x = (lo + hi) / cast(2.0);
    for _ in 0..200 {
        let f = cdf(x) - p;
        if f.abs() <= tol {
            return Ok(x);
        }
        if f < T::zero() {
            lo = x;
        } else {
            hi = x;
        }
        let d = pdf(x);
        let newton = if d > T::zero() { x - f / d } else { T::nan() };
        x = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            (lo + hi) / cast(2.0)
        };
        if hi - lo <= (lo.abs() + hi.abs()) * T::epsilon() {
            return Ok(x);
        }
    }
    // Bracket collapsed without meeting the residual tolerance; the
    // midpoint is the best representable answer.
    Ok((lo + hi) / cast(2.0))
}
