//! JSON run configuration: one block per command, overridable by CLI
//! flags. Paths are resolved relative to the current working directory.

use std::path::PathBuf;

use serde::Deserialize;

use opcap_core::capital::{CopulaSpec, RiskCellModel};
use opcap_core::empirical_bayes::MomentPenalty;
use opcap_core::{GammaParams, NormalParams};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// In audit mode simulation/calibration seeds must be explicit;
    /// falling back to a default is a validation error.
    #[serde(default)]
    pub audit: bool,
    #[serde(default)]
    pub fit_prior: Option<FitPriorConfig>,
    #[serde(default)]
    pub update: Option<UpdateConfig>,
    #[serde(default)]
    pub calibrate: Option<CalibrateConfig>,
    #[serde(default)]
    pub simulate: Option<SimulateConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitPriorConfig {
    pub fits: Vec<FitSpec>,
    pub out: Option<PathBuf>,
}

/// One prior-fitting task. `prob` defaults to 2/3 wherever omitted.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum FitSpec {
    /// Gamma prior for a Poisson rate from E[λ] and an interval.
    PoissonGamma {
        id: String,
        mean: f64,
        interval: (f64, f64),
        prob: Option<f64>,
    },
    /// Closed-form Gamma prior from E[λ] and a coefficient of variation.
    PoissonGammaVco { id: String, mean: f64, vco: f64 },
    /// Normal prior for the LogNormal location μ with σ known, from an
    /// estimate of the mean (or of the `quantile`-level quantile) plus
    /// an interval.
    LognormalMu {
        id: String,
        sigma: f64,
        quantile: Option<f64>,
        estimate: f64,
        interval: (f64, f64),
        prob: Option<f64>,
    },
    /// Closed-form variant with a coefficient of variation.
    LognormalMuVco {
        id: String,
        sigma: f64,
        quantile: Option<f64>,
        estimate: f64,
        vco: f64,
    },
    /// Truncated Gamma prior for the Pareto tail index from E[ξ] and an
    /// interval for ξ.
    ParetoGamma {
        id: String,
        lower_bound: f64,
        mean: f64,
        interval: (f64, f64),
        prob: Option<f64>,
    },
    /// Tail-index prior from an interval for the expected loss,
    /// paired with a companion E[ξ].
    ParetoGammaMeanInterval {
        id: String,
        lower_bound: f64,
        threshold: f64,
        interval: (f64, f64),
        prob: Option<f64>,
        companion_mean: Option<f64>,
    },
    /// Tail-index prior from an interval for the `quantile`-level
    /// quantile, paired with a companion E[ξ].
    ParetoGammaQuantileInterval {
        id: String,
        lower_bound: f64,
        threshold: f64,
        quantile: f64,
        interval: (f64, f64),
        prob: Option<f64>,
        companion_mean: Option<f64>,
    },
}

impl FitSpec {
    pub fn id(&self) -> &str {
        match self {
            FitSpec::PoissonGamma { id, .. }
            | FitSpec::PoissonGammaVco { id, .. }
            | FitSpec::LognormalMu { id, .. }
            | FitSpec::LognormalMuVco { id, .. }
            | FitSpec::ParetoGamma { id, .. }
            | FitSpec::ParetoGammaMeanInterval { id, .. }
            | FitSpec::ParetoGammaQuantileInterval { id, .. } => id,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum UpdateConfig {
    /// Fold annual counts into a Gamma posterior for the rate.
    PoissonGamma {
        data: PathBuf,
        prior: GammaParams,
        /// Bank to use when the file holds several; otherwise the file
        /// must contain exactly one.
        bank: Option<String>,
        out: Option<PathBuf>,
    },
    /// Fold exceedances into a Gamma posterior for the tail index.
    ParetoGamma {
        data: PathBuf,
        cell: Option<String>,
        threshold: f64,
        prior: GammaParams,
        /// Exclude losses below the threshold (reporting how many were
        /// dropped) instead of treating them as a validation error.
        #[serde(default)]
        drop_below_threshold: bool,
        out: Option<PathBuf>,
    },
    /// Fold log-losses into a Normal posterior for μ (σ known).
    LognormalMu {
        data: PathBuf,
        cell: Option<String>,
        sigma: f64,
        prior: NormalParams,
        out: Option<PathBuf>,
    },
}

impl UpdateConfig {
    pub fn out(&self) -> Option<&PathBuf> {
        match self {
            UpdateConfig::PoissonGamma { out, .. }
            | UpdateConfig::ParetoGamma { out, .. }
            | UpdateConfig::LognormalMu { out, .. } => out.as_ref(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrateConfig {
    pub data: PathBuf,
    #[serde(default)]
    pub moment_penalty: MomentPenalty,
    /// Treat the observations as already standardized by exposure:
    /// any exposure column is ignored and V ≡ 1 is used throughout.
    #[serde(default)]
    pub pre_scaled: bool,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub cells: Vec<RiskCellModel>,
    #[serde(default)]
    pub copula: Option<CopulaSpec>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub quantile: Option<f64>,
    /// Applies this Vco floor to every cell that does not set its own.
    #[serde(default)]
    pub variance_floor: Option<f64>,
    /// Use the interpolated quantile estimator instead of the
    /// ceil-index order statistic.
    #[serde(default)]
    pub interpolated_quantile: bool,
    pub out_dir: Option<PathBuf>,
}

/// Flag overrides applied on top of the config file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub quantile: Option<f64>,
}

pub fn load(path: &std::path::Path) -> opcap_core::Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        opcap_core::Error::Io(format!("cannot read config {}: {e}", path.display()))
    })?;
    serde_json::from_str(&text)
        .map_err(|e| opcap_core::Error::invalid(format!("config {}: {e}", path.display())))
}
