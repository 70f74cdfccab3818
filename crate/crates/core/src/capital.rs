//! Monte Carlo engine for annual-loss distributions and high-quantile
//! capital, per risk cell and bank-wide.
//!
//! Each replication draws the risk profiles (frequency rate λ and the
//! severity profile) from their posterior distributions, then the annual
//! count N ~ Poisson(λ·V) and N severities from the profile fixed for
//! the whole year, and sums them into the annual loss. Replication `k`
//! owns [`RngStream`] `(seed, k)`, so runs are bit-identical regardless
//! of thread count. Profiles can be coupled across cells through a
//! Gaussian copula on the profile draws; counts and severities stay
//! conditionally independent given the profiles.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{shifted_t_quantile, TruncatedGamma};
use crate::error::{Error, Result};
use crate::rng::{
    gamma_from_uniform, sample_gamma, sample_lognormal, sample_normal, sample_normal_inv_chi_sq,
    sample_pareto, sample_poisson, RngStream,
};
use crate::special;
use crate::{GammaParams, NormalInvChiSqParams, NormalParams, ParetoParams};

/// Mass of `Pr[ξ ≤ 1]` above which an unacknowledged Pareto cell is
/// refused (predicted severity means are infinite on that event).
const INFINITE_MEAN_DIAGNOSTIC: f64 = 0.01;

// ---------------------------------------------------------------------------
// Risk-cell model
// ---------------------------------------------------------------------------

/// Posterior of the frequency rate λ: a Gamma distribution (possibly
/// truncated below) or a point mass for a fully collapsed posterior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaPosterior {
    Gamma(GammaParams),
    Fixed(f64),
}

impl LambdaPosterior {
    fn validate(&self) -> Result<()> {
        match self {
            LambdaPosterior::Gamma(g) => g.validate(),
            LambdaPosterior::Fixed(v) if *v >= 0.0 && v.is_finite() => Ok(()),
            LambdaPosterior::Fixed(v) => Err(Error::invalid(format!(
                "fixed rate must be finite and >= 0, got {v}"
            ))),
        }
    }

    fn draw(&self, stream: &mut RngStream) -> Result<f64> {
        match self {
            LambdaPosterior::Gamma(g) => sample_gamma(g, stream),
            LambdaPosterior::Fixed(v) => Ok(*v),
        }
    }

    fn quantile(&self, u: f64) -> Result<f64> {
        match self {
            LambdaPosterior::Gamma(g) => gamma_from_uniform(g, u),
            LambdaPosterior::Fixed(v) => Ok(*v),
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            LambdaPosterior::Gamma(g) => match g.lower_trunc {
                Some(b) if b > 0.0 => TruncatedGamma::new(g.untruncated(), b, f64::INFINITY)
                    .map(|t| t.mean())
                    .unwrap_or(f64::NAN),
                _ => g.mean_untruncated(),
            },
            LambdaPosterior::Fixed(v) => *v,
        }
    }
}

/// Posterior of the LogNormal location μ (σ known) or a point mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MuPosterior {
    Normal(NormalParams),
    Fixed(f64),
}

impl MuPosterior {
    fn draw(&self, stream: &mut RngStream) -> Result<f64> {
        match self {
            MuPosterior::Normal(n) => sample_normal(n, stream),
            MuPosterior::Fixed(v) => Ok(*v),
        }
    }

    fn quantile(&self, u: f64) -> Result<f64> {
        match self {
            MuPosterior::Normal(n) => crate::distributions::normal_quantile(u, n),
            MuPosterior::Fixed(v) => Ok(*v),
        }
    }
}

/// Posterior of the Pareto tail index ξ or a point mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum XiPosterior {
    Gamma(GammaParams),
    Fixed(f64),
}

impl XiPosterior {
    fn draw(&self, stream: &mut RngStream) -> Result<f64> {
        match self {
            XiPosterior::Gamma(g) => sample_gamma(g, stream),
            XiPosterior::Fixed(v) => Ok(*v),
        }
    }

    fn quantile(&self, u: f64) -> Result<f64> {
        match self {
            XiPosterior::Gamma(g) => gamma_from_uniform(g, u),
            XiPosterior::Fixed(v) => Ok(*v),
        }
    }

    /// Posterior mass of the infinite-predicted-mean region `ξ ≤ 1`.
    pub fn infinite_mean_mass(&self) -> f64 {
        match self {
            XiPosterior::Gamma(g) => {
                let one_cdf = special::reg_lower_gamma(g.alpha, 1.0 / g.beta);
                match g.lower_trunc {
                    Some(b) if b >= 1.0 => 0.0,
                    Some(b) => {
                        let b_cdf = special::reg_lower_gamma(g.alpha, b / g.beta);
                        ((one_cdf - b_cdf) / g.truncation_mass()).max(0.0)
                    }
                    None => one_cdf,
                }
            }
            XiPosterior::Fixed(v) => {
                if *v <= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Severity model of one risk cell, with parameter uncertainty carried
/// by the posterior of its profile coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeverityModel {
    /// LogNormal severities, σ known, μ uncertain.
    LogNormal { mu: MuPosterior, sigma: f64 },
    /// LogNormal severities with (μ, σ²) jointly uncertain.
    LogNormalJoint { posterior: NormalInvChiSqParams },
    /// Pareto exceedances over `threshold` with uncertain tail index.
    Pareto { xi: XiPosterior, threshold: f64 },
}

/// One severity profile draw, fixed for a simulated year.
#[derive(Debug, Clone, Copy)]
enum SeverityProfile {
    LogNormal { mu: f64, sigma: f64 },
    Pareto(ParetoParams),
}

impl SeverityProfile {
    fn draw_loss(&self, stream: &mut RngStream) -> Result<f64> {
        match self {
            SeverityProfile::LogNormal { mu, sigma } => sample_lognormal(*mu, *sigma, stream),
            SeverityProfile::Pareto(p) => sample_pareto(p, stream),
        }
    }
}

/// Optional floor on the coefficient of variation of a posterior, to
/// keep parameter uncertainty from collapsing entirely as data
/// accumulates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FloorSpec {
    /// Minimum Vco (standard deviation over mean) of the profile draw.
    pub min_vco: f64,
}

/// One risk cell: frequency posterior, severity model, exposure scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskCellModel {
    pub cell_id: String,
    pub frequency: LambdaPosterior,
    pub severity: SeverityModel,
    /// Next-year exposure multiplying the Poisson rate (default 1).
    #[serde(default = "default_exposure")]
    pub exposure: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variance_floor: Option<FloorSpec>,
    /// Accepts Pareto cells whose posterior puts mass on ξ ≤ 1; the
    /// simulation then runs with quantiles intact but unreliable means.
    #[serde(default)]
    pub acknowledge_infinite_mean: bool,
}

fn default_exposure() -> f64 {
    1.0
}

impl RiskCellModel {
    pub fn validate(&self) -> Result<()> {
        self.frequency.validate()?;
        if !(self.exposure > 0.0 && self.exposure.is_finite()) {
            return Err(Error::invalid(format!(
                "cell {}: exposure must be positive, got {}",
                self.cell_id, self.exposure
            )));
        }
        if let Some(f) = &self.variance_floor {
            if !(f.min_vco > 0.0) {
                return Err(Error::invalid(format!(
                    "cell {}: variance floor must be positive",
                    self.cell_id
                )));
            }
        }
        match &self.severity {
            SeverityModel::LogNormal { mu, sigma } => {
                if !(*sigma > 0.0 && sigma.is_finite()) {
                    return Err(Error::invalid(format!(
                        "cell {}: severity sigma must be positive",
                        self.cell_id
                    )));
                }
                if let MuPosterior::Normal(n) = mu {
                    NormalParams::new(n.mu, n.sigma)?;
                }
            }
            SeverityModel::LogNormalJoint { posterior } => {
                NormalInvChiSqParams::new(
                    posterior.nu,
                    posterior.beta,
                    posterior.theta,
                    posterior.phi,
                )?;
            }
            SeverityModel::Pareto { xi, threshold } => {
                if !(*threshold > 0.0 && threshold.is_finite()) {
                    return Err(Error::invalid(format!(
                        "cell {}: pareto threshold must be positive",
                        self.cell_id
                    )));
                }
                if let XiPosterior::Gamma(g) = xi {
                    g.validate()?;
                }
                let mass = xi.infinite_mean_mass();
                if mass > INFINITE_MEAN_DIAGNOSTIC && !self.acknowledge_infinite_mean {
                    return Err(Error::invalid(format!(
                        "cell {}: posterior puts probability {mass:.4} on the tail index <= 1 \
                         (infinite predicted mean); truncate the prior above 1 or set \
                         acknowledge_infinite_mean",
                        self.cell_id
                    )));
                }
            }
        }
        Ok(())
    }

    /// The model with the Vco floor applied to its posteriors.
    fn floored(&self) -> Result<RiskCellModel> {
        let mut model = self.clone();
        if let Some(floor) = self.variance_floor {
            if let LambdaPosterior::Gamma(g) = &model.frequency {
                model.frequency = LambdaPosterior::Gamma(apply_variance_floor_gamma(g, &floor)?);
            }
            match &model.severity {
                SeverityModel::LogNormal {
                    mu: MuPosterior::Normal(n),
                    sigma,
                } => {
                    model.severity = SeverityModel::LogNormal {
                        mu: MuPosterior::Normal(apply_variance_floor_normal(n, &floor)?),
                        sigma: *sigma,
                    };
                }
                SeverityModel::Pareto {
                    xi: XiPosterior::Gamma(g),
                    threshold,
                } => {
                    model.severity = SeverityModel::Pareto {
                        xi: XiPosterior::Gamma(apply_variance_floor_gamma(g, &floor)?),
                        threshold: *threshold,
                    };
                }
                _ => {}
            }
        }
        Ok(model)
    }
}

// ---------------------------------------------------------------------------
// Variance floor
// ---------------------------------------------------------------------------

/// Floors the coefficient of variation of a Gamma posterior while
/// preserving its mean: Vco = 1/√α, so α drops to `1/floor²` and β
/// rises to keep αβ fixed. Truncation bounds are carried through.
pub fn apply_variance_floor_gamma(
    posterior: &GammaParams,
    floor: &FloorSpec,
) -> Result<GammaParams> {
    posterior.validate()?;
    if !(floor.min_vco > 0.0) {
        return Err(Error::invalid("variance floor must be positive"));
    }
    let vco = 1.0 / posterior.alpha.sqrt();
    if vco >= floor.min_vco {
        return Ok(*posterior);
    }
    let alpha = 1.0 / (floor.min_vco * floor.min_vco);
    let beta = posterior.mean_untruncated() / alpha;
    let mut adjusted = GammaParams::new(alpha, beta)?;
    adjusted.lower_trunc = posterior.lower_trunc;
    Ok(adjusted)
}

/// Floors the Vco of a Normal posterior (σ̂₀ relative to |μ̂₀|),
/// raising σ̂₀ and leaving the mean untouched. A zero-mean posterior has
/// no defined Vco and is returned unchanged.
pub fn apply_variance_floor_normal(
    posterior: &NormalParams,
    floor: &FloorSpec,
) -> Result<NormalParams> {
    NormalParams::new(posterior.mu, posterior.sigma)?;
    if !(floor.min_vco > 0.0) {
        return Err(Error::invalid("variance floor must be positive"));
    }
    if posterior.mu == 0.0 {
        return Ok(*posterior);
    }
    let target = floor.min_vco * posterior.mu.abs();
    if posterior.sigma >= target {
        Ok(*posterior)
    } else {
        NormalParams::new(posterior.mu, target)
    }
}

// ---------------------------------------------------------------------------
// Dependence structure
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CopulaKind {
    Independent,
    Gaussian,
}

/// Which profile coordinate of which cell a copula dimension drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileRole {
    Frequency,
    Severity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileCoordinate {
    pub cell: usize,
    pub role: ProfileRole,
}

/// Dependence structure over selected risk-profile coordinates. The
/// correlation matrix lives on exactly the coordinates listed in
/// `coupling`; every other profile draw stays independent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CopulaSpec {
    pub kind: CopulaKind,
    #[serde(default)]
    pub coupling: Vec<ProfileCoordinate>,
    #[serde(default)]
    pub correlation: Vec<Vec<f64>>,
}

impl CopulaSpec {
    pub fn independent() -> Self {
        CopulaSpec {
            kind: CopulaKind::Independent,
            coupling: Vec::new(),
            correlation: Vec::new(),
        }
    }

    fn validate(&self, n_cells: usize) -> Result<()> {
        if self.kind == CopulaKind::Independent {
            return Ok(());
        }
        let d = self.coupling.len();
        if d == 0 {
            return Err(Error::invalid(
                "gaussian copula needs at least one coupled coordinate",
            ));
        }
        if self.correlation.len() != d || self.correlation.iter().any(|row| row.len() != d) {
            return Err(Error::invalid(format!(
                "correlation matrix must be {d}x{d} to match the coupling list"
            )));
        }
        for c in &self.coupling {
            if c.cell >= n_cells {
                return Err(Error::invalid(format!(
                    "coupled coordinate references cell {} but only {} cells exist",
                    c.cell, n_cells
                )));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for c in &self.coupling {
            if !seen.insert((c.cell, c.role)) {
                return Err(Error::invalid(format!(
                    "coordinate (cell {}, {:?}) coupled twice",
                    c.cell, c.role
                )));
            }
        }
        for i in 0..d {
            if (self.correlation[i][i] - 1.0).abs() > 1e-12 {
                return Err(Error::invalid(
                    "correlation matrix must have a unit diagonal",
                ));
            }
            for j in 0..d {
                if (self.correlation[i][j] - self.correlation[j][i]).abs() > 1e-12 {
                    return Err(Error::invalid("correlation matrix must be symmetric"));
                }
            }
        }
        Ok(())
    }

    /// Square-root factor `A` with `A·Aᵀ = correlation`, via the
    /// symmetric eigendecomposition so singular (comonotone) matrices
    /// factor exactly. Negative eigenvalues beyond round-off are a
    /// validation error reporting the smallest one.
    fn factor(&self) -> Result<nalgebra::DMatrix<f64>> {
        let d = self.coupling.len();
        let m = nalgebra::DMatrix::from_fn(d, d, |i, j| self.correlation[i][j]);
        let eig = nalgebra::SymmetricEigen::new(m);
        let min_eig = eig
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -1e-8 {
            return Err(Error::invalid(format!(
                "correlation matrix is not positive semidefinite (smallest eigenvalue {min_eig})"
            )));
        }
        let sqrt_vals = nalgebra::DVector::from_iterator(
            d,
            eig.eigenvalues.iter().map(|&v| f64::max(v, 0.0).sqrt()),
        );
        Ok(&eig.eigenvectors * nalgebra::DMatrix::from_diagonal(&sqrt_vals))
    }
}

// ---------------------------------------------------------------------------
// Results
// ---------------------------------------------------------------------------

/// Per-cell output of a capital run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub cell_id: String,
    pub samples: Vec<f64>,
    pub quantile: f64,
    pub mean: f64,
    /// Posterior mass on ξ ≤ 1 for Pareto cells; means are unreliable
    /// when this is materially positive.
    pub infinite_mean_mass: f64,
}

/// Annual-loss samples and quantile summaries of one Monte Carlo run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapitalResult {
    pub per_cell: Vec<CellResult>,
    pub total_samples: Vec<f64>,
    pub total_quantile: f64,
    /// Sum of the per-cell quantiles: the perfect-dependence capital.
    pub sum_of_quantiles: f64,
    pub quantile_level: f64,
    pub seed: u64,
    pub replications: usize,
}

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

fn draw_severity_profile(
    severity: &SeverityModel,
    stream: &mut RngStream,
) -> Result<SeverityProfile> {
    match severity {
        SeverityModel::LogNormal { mu, sigma } => Ok(SeverityProfile::LogNormal {
            mu: mu.draw(stream)?,
            sigma: *sigma,
        }),
        SeverityModel::LogNormalJoint { posterior } => {
            let (mu, sigma_sq) = sample_normal_inv_chi_sq(posterior, stream)?;
            Ok(SeverityProfile::LogNormal {
                mu,
                sigma: sigma_sq.sqrt(),
            })
        }
        SeverityModel::Pareto { xi, threshold } => {
            let xi_draw = xi.draw(stream)?.max(f64::MIN_POSITIVE);
            Ok(SeverityProfile::Pareto(ParetoParams {
                xi: xi_draw,
                threshold: *threshold,
            }))
        }
    }
}

/// Severity profile from a copula uniform on the cell's profile
/// coordinate. Joint (μ, σ²) posteriors couple through μ (its shifted-t
/// marginal); σ² is then drawn conditionally from the stream.
fn severity_profile_from_uniform(
    severity: &SeverityModel,
    u: f64,
    stream: &mut RngStream,
) -> Result<SeverityProfile> {
    match severity {
        SeverityModel::LogNormal { mu, sigma } => Ok(SeverityProfile::LogNormal {
            mu: mu.quantile(u)?,
            sigma: *sigma,
        }),
        SeverityModel::LogNormalJoint { posterior } => {
            let mu = shifted_t_quantile(u, posterior)?;
            // σ² | μ is scaled inverse chi-squared with ν+1 degrees of
            // freedom and scale β + φ(μ-θ)².
            let d = mu - posterior.theta;
            let cond_nu = posterior.nu + 1.0;
            let cond_beta = posterior.beta + posterior.phi * d * d;
            let chi2: f64 = rand::distributions::Distribution::sample(
                &rand_distr::Gamma::new(cond_nu / 2.0, 2.0)
                    .map_err(|e| Error::invalid(format!("chi-squared sampler: {e}")))?,
                stream.rng_mut(),
            );
            let sigma_sq = cond_beta / f64::max(chi2, f64::MIN_POSITIVE);
            Ok(SeverityProfile::LogNormal {
                mu,
                sigma: sigma_sq.sqrt(),
            })
        }
        SeverityModel::Pareto { xi, threshold } => {
            let xi_draw = xi.quantile(u)?.max(f64::MIN_POSITIVE);
            Ok(SeverityProfile::Pareto(ParetoParams {
                xi: xi_draw,
                threshold: *threshold,
            }))
        }
    }
}

fn compound_year(
    lambda: f64,
    profile: &SeverityProfile,
    exposure: f64,
    stream: &mut RngStream,
) -> Result<f64> {
    let n = sample_poisson(lambda * exposure, stream)?;
    let mut z = 0.0;
    for _ in 0..n {
        z += profile.draw_loss(stream)?;
    }
    Ok(z)
}

/// Simulates one year of one cell: profile draws, then the compound sum.
pub fn simulate_cell_year(model: &RiskCellModel, stream: &mut RngStream) -> Result<f64> {
    model.validate()?;
    let floored = model.floored()?;
    let lambda = floored.frequency.draw(stream)?;
    let profile = draw_severity_profile(&floored.severity, stream)?;
    compound_year(lambda, &profile, floored.exposure, stream)
}

/// Runs `replications` independent years for every cell. Replication
/// `k` uses stream `(seed, k)`; cells consume the stream in their
/// declared order.
pub fn run_independent(
    models: &[RiskCellModel],
    replications: usize,
    quantile_level: f64,
    seed: u64,
) -> Result<CapitalResult> {
    run_copula(
        models,
        &CopulaSpec::independent(),
        replications,
        quantile_level,
        seed,
    )
}

/// Runs the coupled simulation: profile draws of the coupled
/// coordinates share a Gaussian copula with the given correlation; all
/// remaining randomness is independent across cells and replications.
pub fn run_copula(
    models: &[RiskCellModel],
    copula: &CopulaSpec,
    replications: usize,
    quantile_level: f64,
    seed: u64,
) -> Result<CapitalResult> {
    if models.is_empty() {
        return Err(Error::invalid("at least one risk cell is required"));
    }
    if replications == 0 {
        return Err(Error::invalid("at least one replication is required"));
    }
    if !(quantile_level > 0.0 && quantile_level < 1.0) {
        return Err(Error::invalid(format!(
            "quantile level must be in (0,1), got {quantile_level}"
        )));
    }
    let floored: Vec<RiskCellModel> = models
        .iter()
        .map(|m| {
            m.validate()?;
            m.floored()
        })
        .collect::<Result<_>>()?;
    copula.validate(models.len())?;
    let factor = match copula.kind {
        CopulaKind::Independent => None,
        CopulaKind::Gaussian => Some(copula.factor()?),
    };

    // One replication: the per-cell annual losses.
    let one_rep = |k: usize| -> Result<Vec<f64>> {
        let mut stream = RngStream::new(seed, k as u64);
        // Step 1: coupled profile uniforms, if any.
        let mut coupled_u: Vec<(ProfileCoordinate, f64)> = Vec::new();
        if let Some(a) = &factor {
            let d = copula.coupling.len();
            let unit = NormalParams {
                mu: 0.0,
                sigma: 1.0,
            };
            let mut g = nalgebra::DVector::zeros(d);
            for i in 0..d {
                g[i] = sample_normal(&unit, &mut stream)?;
            }
            let z = a * g;
            coupled_u = copula
                .coupling
                .iter()
                .zip(z.iter())
                .map(|(c, &zi)| (*c, special::std_normal_cdf(zi)))
                .collect();
        }
        let uniform_for = |cell: usize, role: ProfileRole| -> Option<f64> {
            coupled_u
                .iter()
                .find(|(c, _)| c.cell == cell && c.role == role)
                .map(|(_, u)| *u)
        };

        let mut losses = Vec::with_capacity(floored.len());
        for (j, model) in floored.iter().enumerate() {
            let lambda = match uniform_for(j, ProfileRole::Frequency) {
                Some(u) => model.frequency.quantile(clamp_open_unit(u))?,
                None => model.frequency.draw(&mut stream)?,
            };
            let profile = match uniform_for(j, ProfileRole::Severity) {
                Some(u) => {
                    severity_profile_from_uniform(&model.severity, clamp_open_unit(u), &mut stream)?
                }
                None => draw_severity_profile(&model.severity, &mut stream)?,
            };
            losses.push(compound_year(
                lambda,
                &profile,
                model.exposure,
                &mut stream,
            )?);
        }
        Ok(losses)
    };

    // Replications are embarrassingly parallel; collect preserves the
    // replication order so aggregation is thread-count independent.
    let rows: Vec<Vec<f64>> = (0..replications)
        .into_par_iter()
        .map(one_rep)
        .collect::<Result<_>>()?;

    let mut per_cell = Vec::with_capacity(models.len());
    for (j, model) in models.iter().enumerate() {
        let samples: Vec<f64> = rows.iter().map(|r| r[j]).collect();
        let q = empirical_quantile(&samples, quantile_level)?;
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        let infinite_mean_mass = match &model.severity {
            SeverityModel::Pareto { xi, .. } => xi.infinite_mean_mass(),
            _ => 0.0,
        };
        per_cell.push(CellResult {
            cell_id: model.cell_id.clone(),
            samples,
            quantile: q,
            mean,
            infinite_mean_mass,
        });
    }
    let total_samples: Vec<f64> = rows.iter().map(|r| r.iter().sum()).collect();
    let total_quantile = empirical_quantile(&total_samples, quantile_level)?;
    let sum_of_quantiles = per_cell.iter().map(|c| c.quantile).sum();
    Ok(CapitalResult {
        per_cell,
        total_samples,
        total_quantile,
        sum_of_quantiles,
        quantile_level,
        seed,
        replications,
    })
}

fn clamp_open_unit(u: f64) -> f64 {
    u.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON)
}

// ---------------------------------------------------------------------------
// Quantile estimators and diagnostics
// ---------------------------------------------------------------------------

/// Empirical quantile as the ceil-index order statistic: the
/// `ceil(q·K)`-th smallest sample (1-based), with no interpolation, so
/// reported capital is always an observed loss value.
pub fn empirical_quantile(samples: &[f64], q: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::invalid("empirical quantile of an empty sample"));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::invalid(format!(
            "quantile level must be in (0,1), got {q}"
        )));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let k = sorted.len();
    let idx = ((q * k as f64).ceil() as usize).clamp(1, k);
    Ok(sorted[idx - 1])
}

/// Interpolated variant (linear between bracketing order statistics).
pub fn empirical_quantile_interpolated(samples: &[f64], q: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::invalid("empirical quantile of an empty sample"));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::invalid(format!(
            "quantile level must be in (0,1), got {q}"
        )));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let k = sorted.len();
    let pos = q * (k as f64 - 1.0);
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let w = pos - lo as f64;
    Ok(sorted[lo] * (1.0 - w) + sorted[hi] * w)
}

/// Sum of the per-cell quantiles (the perfect-dependence aggregate),
/// reported alongside the total-loss quantile for comparison.
pub fn capital_sum_of_quantiles(result: &CapitalResult) -> f64 {
    result.per_cell.iter().map(|c| c.quantile).sum()
}

/// Bootstrap confidence interval for the empirical quantile of a
/// sample, used to compare runs within Monte Carlo noise.
pub fn bootstrap_quantile_ci(
    samples: &[f64],
    q: f64,
    resamples: usize,
    level: f64,
    seed: u64,
) -> Result<(f64, f64)> {
    if samples.is_empty() {
        return Err(Error::invalid("bootstrap of an empty sample"));
    }
    let mut stream = RngStream::new(seed, u64::MAX);
    let n = samples.len();
    let mut stats = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        let mut resample = Vec::with_capacity(n);
        for _ in 0..n {
            let idx = (stream.uniform_open() * n as f64) as usize;
            resample.push(samples[idx.min(n - 1)]);
        }
        stats.push(empirical_quantile(&resample, q)?);
    }
    stats.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let lo_idx = (((1.0 - level) / 2.0) * resamples as f64) as usize;
    let hi_idx = ((1.0 - (1.0 - level) / 2.0) * resamples as f64) as usize;
    Ok((
        stats[lo_idx.min(resamples - 1)],
        stats[hi_idx.min(resamples - 1)],
    ))
}
