//! Command implementations. Every command is a pure function of
//! (config, input files, seed): reruns produce byte-identical outputs.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use opcap_core::capital::{self, CopulaSpec};
use opcap_core::conjugate::{
    lognormal_mu_step, pareto_xi_step, poisson_gamma_step_with_exposure, truncated_posterior_mean,
    NormalMuPosterior, ParetoXiPosterior, PoissonGammaPosterior,
};
use opcap_core::elicitation::{self, ExpertOpinion, FitReport};
use opcap_core::empirical_bayes::{self, HyperEstimate};
use opcap_core::io::{self, fmt_sig12, round_sig12, TrajectoryRow};
use opcap_core::{Error, Result};

use crate::config::{
    CalibrateConfig, FitPriorConfig, FitSpec, Overrides, SimulateConfig, UpdateConfig,
};

const DEFAULT_SAMPLES: usize = 100_000;
const DEFAULT_QUANTILE: f64 = 0.999;
const DEFAULT_SEED: u64 = 42;

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)
                .map_err(|e| Error::Io(format!("cannot create {}: {e}", dir.display())))?;
        }
    }
    std::fs::write(path, bytes)
        .map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))
}

// ---------------------------------------------------------------------------
// fit-prior
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
struct FitOutput {
    id: String,
    family: &'static str,
    params: serde_json::Value,
    residuals: Vec<f64>,
    iterations: usize,
    converged: bool,
}

fn gamma_json(g: &opcap_core::GammaParams) -> serde_json::Value {
    let mut v = json!({
        "alpha": round_sig12(g.alpha),
        "beta": round_sig12(g.beta),
    });
    if let Some(b) = g.lower_trunc {
        v["lower_trunc"] = json!(round_sig12(b));
    }
    v
}

fn normal_json(n: &opcap_core::NormalParams) -> serde_json::Value {
    json!({ "mu0": round_sig12(n.mu), "sigma0": round_sig12(n.sigma) })
}

fn closed_form_report() -> FitReport {
    FitReport {
        residuals: vec![0.0],
        iterations: 0,
        converged: true,
    }
}

fn run_fit(spec: &FitSpec) -> Result<FitOutput> {
    let (family, params, report) = match spec {
        FitSpec::PoissonGamma {
            mean,
            interval,
            prob,
            ..
        } => {
            let opinion = ExpertOpinion::mean(*mean).with_interval(interval.0, interval.1, *prob);
            let (params, report) = elicitation::fit_poisson_gamma(&opinion)?;
            ("poisson_gamma", gamma_json(&params), report)
        }
        FitSpec::PoissonGammaVco { mean, vco, .. } => {
            let params = elicitation::fit_poisson_gamma_vco(*mean, *vco)?;
            (
                "poisson_gamma_vco",
                gamma_json(&params),
                closed_form_report(),
            )
        }
        FitSpec::LognormalMu {
            sigma,
            quantile,
            estimate,
            interval,
            prob,
            ..
        } => {
            let opinion =
                ExpertOpinion::mean(*estimate).with_interval(interval.0, interval.1, *prob);
            let (params, report) = match quantile {
                Some(q) => elicitation::fit_lognormal_mu_prior_from_quantile(*sigma, *q, &opinion)?,
                None => elicitation::fit_lognormal_mu_prior_from_mean(*sigma, &opinion)?,
            };
            ("lognormal_mu", normal_json(&params), report)
        }
        FitSpec::LognormalMuVco {
            sigma,
            quantile,
            estimate,
            vco,
            ..
        } => {
            let params = match quantile {
                Some(q) => elicitation::fit_lognormal_mu_prior_from_quantile_vco(
                    *sigma, *q, *estimate, *vco,
                )?,
                None => elicitation::fit_lognormal_mu_prior_from_mean_vco(*sigma, *estimate, *vco)?,
            };
            (
                "lognormal_mu_vco",
                normal_json(&params),
                closed_form_report(),
            )
        }
        FitSpec::ParetoGamma {
            lower_bound,
            mean,
            interval,
            prob,
            ..
        } => {
            let opinion = ExpertOpinion::mean(*mean).with_interval(interval.0, interval.1, *prob);
            let (params, report) = elicitation::fit_pareto_gamma(*lower_bound, &opinion)?;
            ("pareto_gamma", gamma_json(&params), report)
        }
        FitSpec::ParetoGammaMeanInterval {
            lower_bound,
            threshold,
            interval,
            prob,
            companion_mean,
            ..
        } => {
            let (params, report) = elicitation::fit_pareto_gamma_from_mean_interval(
                *lower_bound,
                *threshold,
                interval.0,
                interval.1,
                prob.unwrap_or(elicitation::DEFAULT_INTERVAL_PROB),
                *companion_mean,
            )?;
            ("pareto_gamma_mean_interval", gamma_json(&params), report)
        }
        FitSpec::ParetoGammaQuantileInterval {
            lower_bound,
            threshold,
            quantile,
            interval,
            prob,
            companion_mean,
            ..
        } => {
            let (params, report) = elicitation::fit_pareto_gamma_from_quantile_interval(
                *lower_bound,
                *threshold,
                *quantile,
                interval.0,
                interval.1,
                prob.unwrap_or(elicitation::DEFAULT_INTERVAL_PROB),
                *companion_mean,
            )?;
            (
                "pareto_gamma_quantile_interval",
                gamma_json(&params),
                report,
            )
        }
    };
    Ok(FitOutput {
        id: spec.id().to_string(),
        family,
        params,
        residuals: report.residuals.iter().map(|r| round_sig12(*r)).collect(),
        iterations: report.iterations,
        converged: report.converged,
    })
}

pub fn cmd_fit_prior(config: &FitPriorConfig, out: &mut impl Write) -> Result<()> {
    if config.fits.is_empty() {
        return Err(Error::invalid("fit_prior block has no fits"));
    }
    let mut outputs = Vec::with_capacity(config.fits.len());
    writeln!(
        out,
        "{:<16} {:<30} {:>14} {:>10}",
        "id", "family", "max_residual", "converged"
    )?;
    for spec in &config.fits {
        let fitted = run_fit(spec)?;
        let max_res = fitted.residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        writeln!(
            out,
            "{:<16} {:<30} {:>14} {:>10}",
            fitted.id,
            fitted.family,
            fmt_sig12(max_res),
            fitted.converged
        )?;
        writeln!(out, "  params: {}", fitted.params)?;
        outputs.push(fitted);
    }
    if let Some(path) = &config.out {
        let doc = json!({ "fits": outputs });
        write_file(path, format!("{:#}\n", doc).as_bytes())?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// update
// ---------------------------------------------------------------------------

fn pick_single<'a, T>(
    map: &'a std::collections::BTreeMap<String, T>,
    wanted: &Option<String>,
    what: &str,
) -> Result<(&'a String, &'a T)> {
    match wanted {
        Some(id) => map
            .get_key_value(id)
            .ok_or_else(|| Error::invalid(format!("{what} `{id}` not found in data file"))),
        None => {
            if map.len() == 1 {
                Ok(map.iter().next().unwrap())
            } else {
                Err(Error::invalid(format!(
                    "data file holds {} {what}s; name one in the config",
                    map.len()
                )))
            }
        }
    }
}

pub fn cmd_update(
    config: &UpdateConfig,
    out_override: Option<&PathBuf>,
) -> Result<Vec<TrajectoryRow>> {
    let rows = match config {
        UpdateConfig::PoissonGamma {
            data, prior, bank, ..
        } => {
            let panel = io::ingest_counts(data)?;
            let by_bank: std::collections::BTreeMap<String, _> = panel
                .banks
                .into_iter()
                .map(|b| (b.bank_id.clone(), b))
                .collect();
            let (_, series) = pick_single(&by_bank, bank, "bank")?;
            let mut records = series.records.clone();
            records.sort_by_key(|r| r.year);
            let mut post = PoissonGammaPosterior::from_prior(*prior);
            let mut rows = Vec::with_capacity(records.len());
            let mut cum_count = 0u64;
            let mut cum_exposure = 0.0;
            for (step, r) in records.iter().enumerate() {
                post = poisson_gamma_step_with_exposure(&post, r.count, r.exposure)?;
                cum_count += r.count;
                cum_exposure += r.exposure;
                rows.push(TrajectoryRow {
                    step: step + 1,
                    alpha_hat: post.params.alpha,
                    beta_hat: post.params.beta,
                    bayes_estimate: post.mean(),
                    mle_estimate: cum_count as f64 / cum_exposure,
                });
            }
            rows
        }
        UpdateConfig::ParetoGamma {
            data,
            cell,
            threshold,
            prior,
            drop_below_threshold,
            ..
        } => {
            let cells = io::ingest_losses(data)?;
            let (cell_id, sample) = pick_single(&cells, cell, "cell")?;
            let amounts = if *drop_below_threshold {
                let t = io::apply_threshold(sample, *threshold)?;
                if t.below_threshold > 0 {
                    eprintln!(
                        "note: cell {cell_id}: excluded {} losses below the threshold {threshold}",
                        t.below_threshold
                    );
                }
                t.retained
            } else {
                // A loss below the threshold is a modelling error here,
                // not something to drop silently.
                sample.amounts.clone()
            };
            let mut post = ParetoXiPosterior::from_prior(*prior, *threshold)?;
            let mut rows = Vec::with_capacity(amounts.len());
            let mut log_sum = 0.0;
            for (step, &x) in amounts.iter().enumerate() {
                post = pareto_xi_step(&post, x)?;
                log_sum += (x / *threshold).ln();
                let mle = if log_sum > 0.0 {
                    (step as f64 + 1.0) / log_sum
                } else {
                    f64::INFINITY
                };
                rows.push(TrajectoryRow {
                    step: step + 1,
                    alpha_hat: post.params.alpha,
                    beta_hat: post.params.beta,
                    bayes_estimate: truncated_posterior_mean(&post.params)?,
                    mle_estimate: mle,
                });
            }
            rows
        }
        UpdateConfig::LognormalMu {
            data,
            cell,
            sigma,
            prior,
            ..
        } => {
            let cells = io::ingest_losses(data)?;
            let (_, sample) = pick_single(&cells, cell, "cell")?;
            let mut post = NormalMuPosterior::from_prior(*prior, *sigma)?;
            let mut rows = Vec::with_capacity(sample.amounts.len());
            let mut y_sum = 0.0;
            for (step, &x) in sample.amounts.iter().enumerate() {
                let y = x.ln();
                post = lognormal_mu_step(&post, y)?;
                y_sum += y;
                rows.push(TrajectoryRow {
                    step: step + 1,
                    alpha_hat: post.params.mu,
                    beta_hat: post.params.sigma,
                    bayes_estimate: post.mean(),
                    mle_estimate: y_sum / (step as f64 + 1.0),
                });
            }
            rows
        }
    };
    if let Some(path) = out_override.or(config.out()) {
        let mut buf = Vec::new();
        io::emit_trajectory(&rows, &mut buf)?;
        write_file(path, &buf)?;
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// calibrate
// ---------------------------------------------------------------------------

fn hyper_json(est: &HyperEstimate) -> serde_json::Value {
    json!({
        "alpha": est.alpha.map(round_sig12),
        "beta": est.beta.map(round_sig12),
        "lambda0": round_sig12(est.lambda0),
        "sigma0_sq": round_sig12(est.sigma0_sq),
        "sigma0_sq_unclamped": est.sigma0_sq_unclamped.map(round_sig12),
        "loglik": est.loglik.map(round_sig12),
        "flag": serde_json::to_value(est.flag).unwrap(),
    })
}

pub fn cmd_calibrate(config: &CalibrateConfig, out: &mut impl Write) -> Result<()> {
    let mut panel = io::ingest_counts(&config.data)?;
    if config.pre_scaled {
        for bank in &mut panel.banks {
            for r in &mut bank.records {
                r.exposure = 1.0;
            }
        }
    }
    if panel.banks.is_empty() {
        writeln!(out, "warning: empty panel, nothing to calibrate")?;
        return Err(Error::invalid("count panel is empty"));
    }
    let mle = empirical_bayes::fit_mle(&panel)?;
    let mom = empirical_bayes::fit_mom_with_penalty(&panel, config.moment_penalty)?;
    writeln!(out, "{:<14} {:>16} {:>16}", "estimate", "mle", "mom")?;
    let fmt_opt = |v: Option<f64>| v.map(fmt_sig12).unwrap_or_else(|| "-".into());
    writeln!(
        out,
        "{:<14} {:>16} {:>16}",
        "alpha",
        fmt_opt(mle.alpha),
        fmt_opt(mom.alpha)
    )?;
    writeln!(
        out,
        "{:<14} {:>16} {:>16}",
        "beta",
        fmt_opt(mle.beta),
        fmt_opt(mom.beta)
    )?;
    writeln!(
        out,
        "{:<14} {:>16} {:>16}",
        "lambda0",
        fmt_sig12(mle.lambda0),
        fmt_sig12(mom.lambda0)
    )?;
    writeln!(
        out,
        "{:<14} {:>16} {:>16}",
        "sigma0_sq",
        fmt_sig12(mle.sigma0_sq),
        fmt_sig12(mom.sigma0_sq)
    )?;
    writeln!(out, "{:<14} {:>16?} {:>16?}", "flag", mle.flag, mom.flag)?;
    if let Some(path) = &config.out {
        let doc = json!({ "mle": hyper_json(&mle), "mom": hyper_json(&mom) });
        write_file(path, format!("{:#}\n", doc).as_bytes())?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

pub fn cmd_simulate(
    config: &SimulateConfig,
    overrides: &Overrides,
    audit: bool,
    out: &mut impl Write,
) -> Result<()> {
    let seed = match overrides.seed.or(config.seed) {
        Some(s) => s,
        None if audit => {
            return Err(Error::invalid(
                "audit mode requires an explicit seed for simulate",
            ))
        }
        None => DEFAULT_SEED,
    };
    let samples = overrides
        .samples
        .or(config.samples)
        .unwrap_or(DEFAULT_SAMPLES);
    let quantile = overrides
        .quantile
        .or(config.quantile)
        .unwrap_or(DEFAULT_QUANTILE);
    if config.cells.is_empty() {
        return Err(Error::invalid("simulate block has no cells"));
    }

    // A run-level variance floor applies to cells without their own.
    let mut cells = config.cells.clone();
    if let Some(min_vco) = config.variance_floor {
        for cell in &mut cells {
            if cell.variance_floor.is_none() {
                cell.variance_floor = Some(capital::FloorSpec { min_vco });
            }
        }
    }

    let copula = config
        .copula
        .clone()
        .unwrap_or_else(CopulaSpec::independent);
    let result = capital::run_copula(&cells, &copula, samples, quantile, seed)?;

    let (total_q, per_cell_q): (f64, Vec<f64>) = if config.interpolated_quantile {
        (
            capital::empirical_quantile_interpolated(&result.total_samples, quantile)?,
            result
                .per_cell
                .iter()
                .map(|c| capital::empirical_quantile_interpolated(&c.samples, quantile))
                .collect::<Result<_>>()?,
        )
    } else {
        (
            result.total_quantile,
            result.per_cell.iter().map(|c| c.quantile).collect(),
        )
    };
    let sum_of_quantiles: f64 = per_cell_q.iter().sum();

    writeln!(out, "{:<16} {:>18} {:>18}", "cell", "quantile", "mean")?;
    for (cell, q) in result.per_cell.iter().zip(&per_cell_q) {
        writeln!(
            out,
            "{:<16} {:>18} {:>18}",
            cell.cell_id,
            fmt_sig12(*q),
            fmt_sig12(cell.mean)
        )?;
        if cell.infinite_mean_mass > 0.0 {
            writeln!(
                out,
                "  note: posterior mass {} on tail index <= 1; means are unreliable",
                fmt_sig12(cell.infinite_mean_mass)
            )?;
        }
    }
    writeln!(out, "{:<16} {:>18}", "total", fmt_sig12(total_q))?;
    writeln!(
        out,
        "{:<16} {:>18}",
        "sum_of_quantiles",
        fmt_sig12(sum_of_quantiles)
    )?;

    if let Some(dir) = &config.out_dir {
        std::fs::create_dir_all(dir)
            .map_err(|e| Error::Io(format!("cannot create {}: {e}", dir.display())))?;
        let summary = json!({
            "seed": seed,
            "replications": samples,
            "quantile_level": quantile,
            "per_cell": result
                .per_cell
                .iter()
                .zip(&per_cell_q)
                .map(|(c, q)| {
                    json!({
                        "cell_id": c.cell_id,
                        "quantile": round_sig12(*q),
                        "mean": round_sig12(c.mean),
                        "infinite_mean_mass": round_sig12(c.infinite_mean_mass),
                    })
                })
                .collect::<Vec<_>>(),
            "total_quantile": round_sig12(total_q),
            "sum_of_quantiles": round_sig12(sum_of_quantiles),
        });
        write_file(
            &dir.join("summary.json"),
            format!("{:#}\n", summary).as_bytes(),
        )?;
        let mut buf = Vec::new();
        io::emit_samples(&result.total_samples, &mut buf)?;
        write_file(&dir.join("total_samples.csv"), &buf)?;
        for cell in &result.per_cell {
            let mut buf = Vec::new();
            io::emit_samples(&cell.samples, &mut buf)?;
            write_file(
                &dir.join(format!("cell_{}_samples.csv", cell.cell_id)),
                &buf,
            )?;
        }
    }
    Ok(())
}
