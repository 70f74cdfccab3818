//! Bayesian frequency/severity modelling for operational risk.
//!
//! The crate combines expert opinions (encoded as conjugate prior
//! distributions) with observed loss data, and feeds the resulting
//! posteriors into a compound-Poisson Monte Carlo engine that estimates
//! annual-loss distributions and high quantiles per risk cell and
//! bank-wide.
//!
//! Layering:
//!
//! - [`special`], [`distributions`], [`conjugate`]: numeric kernels and
//!   closed-form prior/posterior maps, generic over the scalar type via
//!   [`scalar::Real`] (`f64` aliases are re-exported at the crate root).
//! - [`elicitation`]: solves the moment/interval equations that turn
//!   expert opinions into structural hyperparameters.
//! - [`empirical_bayes`]: hyperparameter estimation from multi-bank
//!   count panels (MLE and method of moments) plus per-bank posteriors
//!   and Negative Binomial predictive counts.
//! - [`capital`]: seeded Monte Carlo for annual losses, independent or
//!   coupled through a Gaussian copula on the risk-profile draws.
//! - [`io`]: CSV ingestion/emission for counts and losses.

// Validations are written as `!(x > 0.0)` on purpose: the negated form
// rejects NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod capital;
pub mod conjugate;
pub mod distributions;
pub mod elicitation;
pub mod empirical_bayes;
pub mod error;
pub mod io;
pub mod rng;
pub mod scalar;
pub mod solve;
pub mod special;

pub use error::{Error, Result};
pub use rng::RngStream;

// Concrete `f64` aliases for the generic kernel types. Everything above
// the kernel layer (solvers, Monte Carlo, I/O) works in `f64` and uses
// these aliases.
pub type GammaParams = distributions::GammaParams<f64>;
pub type NormalParams = distributions::NormalParams<f64>;
pub type ParetoParams = distributions::ParetoParams<f64>;
pub type NegBinParams = distributions::NegBinParams<f64>;
pub type NormalInvChiSqParams = distributions::NormalInvChiSqParams<f64>;
pub type TruncatedGamma = distributions::TruncatedGamma<f64>;
pub type TruncatedNormal = distributions::TruncatedNormal<f64>;

pub type PoissonGammaPosterior = conjugate::PoissonGammaPosterior<f64>;
pub type NormalMuPosterior = conjugate::NormalMuPosterior<f64>;
pub type ParetoXiPosterior = conjugate::ParetoXiPosterior<f64>;
pub type CredibilityDecomposition = conjugate::CredibilityDecomposition<f64>;
