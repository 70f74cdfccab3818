//! CSV ingestion and emission for count panels and loss samples.
//!
//! Schemas (headers mandatory, UTF-8):
//!
//! - counts: `bank_id,year,count,exposure`
//! - losses: `cell_id,year,amount`
//! - posterior trajectories: `step,alpha_hat,beta_hat,bayes_estimate,mle_estimate`
//!
//! All floating-point output is printed with 12 significant digits so
//! equal inputs reproduce byte-identical files.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::empirical_bayes::{BankSeries, CountPanel, CountRecord};
use crate::error::{Error, Result};

/// One loss observation of a risk cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossRecord {
    pub cell_id: String,
    pub year: i32,
    pub amount: f64,
}

/// Losses of one cell, in file order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LossSample {
    pub amounts: Vec<f64>,
}

/// Result of ingesting a loss file against a severity threshold: losses
/// below the threshold are excluded but counted, never silently dropped.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ThresholdedLosses {
    pub retained: Vec<f64>,
    pub below_threshold: usize,
}

/// Formats a float with 12 significant digits.
pub fn fmt_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    format!("{:.11e}", x)
}

/// Rounds a float to 12 significant digits (for JSON emission).
pub fn round_sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    fmt_sig12(x).parse().unwrap_or(x)
}

// ---------------------------------------------------------------------------
// Ingestion
// ---------------------------------------------------------------------------

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map(|p| p.line()).unwrap_or(0)
}

fn parse_field<T: std::str::FromStr>(
    record: &csv::StringRecord,
    idx: usize,
    name: &str,
) -> Result<T> {
    let raw = record.get(idx).ok_or_else(|| {
        Error::invalid(format!(
            "line {}: missing column `{}`",
            line_of(record),
            name
        ))
    })?;
    raw.trim().parse::<T>().map_err(|_| {
        Error::invalid(format!(
            "line {}: cannot parse `{}` as {}",
            line_of(record),
            raw,
            name
        ))
    })
}

fn header_index(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| Error::invalid(format!("missing required column `{name}` in header")))
}

/// Reads a count panel from `bank_id,year,count,exposure` CSV. Banks
/// appear in first-occurrence order; an empty body yields an empty
/// panel (callers decide whether that is acceptable).
pub fn ingest_counts(path: impl AsRef<Path>) -> Result<CountPanel> {
    let file = std::fs::File::open(path.as_ref())
        .map_err(|e| Error::Io(format!("cannot open {}: {e}", path.as_ref().display())))?;
    read_counts(file)
}

/// Reader-based variant of [`ingest_counts`].
pub fn read_counts<R: Read>(reader: R) -> Result<CountPanel> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let bank_idx = header_index(&headers, "bank_id")?;
    let year_idx = header_index(&headers, "year")?;
    let count_idx = header_index(&headers, "count")?;
    let exposure_idx = headers.iter().position(|h| h.trim() == "exposure");

    let mut order: Vec<String> = Vec::new();
    let mut by_bank: BTreeMap<String, Vec<CountRecord>> = BTreeMap::new();
    for record in rdr.records() {
        let record = record?;
        let bank: String = parse_field(&record, bank_idx, "bank_id")?;
        let year: i32 = parse_field(&record, year_idx, "year")?;
        let count: i64 = parse_field(&record, count_idx, "count")?;
        if count < 0 {
            return Err(Error::invalid(format!(
                "line {}: count must be nonnegative, got {count}",
                line_of(&record)
            )));
        }
        let exposure: f64 = match exposure_idx {
            Some(idx) => parse_field(&record, idx, "exposure")?,
            None => 1.0,
        };
        if !(exposure > 0.0 && exposure.is_finite()) {
            return Err(Error::invalid(format!(
                "line {}: exposure must be positive, got {exposure}",
                line_of(&record)
            )));
        }
        if !by_bank.contains_key(&bank) {
            order.push(bank.clone());
        }
        by_bank.entry(bank).or_default().push(CountRecord {
            year,
            count: count as u64,
            exposure,
        });
    }
    let banks = order
        .into_iter()
        .map(|id| BankSeries {
            bank_id: id.clone(),
            records: by_bank.remove(&id).unwrap(),
        })
        .collect();
    Ok(CountPanel { banks })
}

/// Reads per-cell losses from `cell_id,year,amount` CSV, preserving file
/// order within each cell.
pub fn ingest_losses(path: impl AsRef<Path>) -> Result<BTreeMap<String, LossSample>> {
    let file = std::fs::File::open(path.as_ref())
        .map_err(|e| Error::Io(format!("cannot open {}: {e}", path.as_ref().display())))?;
    read_losses(file)
}

/// Reader-based variant of [`ingest_losses`].
pub fn read_losses<R: Read>(reader: R) -> Result<BTreeMap<String, LossSample>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let cell_idx = header_index(&headers, "cell_id")?;
    header_index(&headers, "year")?;
    let amount_idx = header_index(&headers, "amount")?;

    let mut cells: BTreeMap<String, LossSample> = BTreeMap::new();
    for record in rdr.records() {
        let record = record?;
        let cell: String = parse_field(&record, cell_idx, "cell_id")?;
        let amount: f64 = parse_field(&record, amount_idx, "amount")?;
        if !(amount > 0.0 && amount.is_finite()) {
            return Err(Error::invalid(format!(
                "line {}: amount must be positive, got {amount}",
                line_of(&record)
            )));
        }
        cells.entry(cell).or_default().amounts.push(amount);
    }
    Ok(cells)
}

/// Splits a cell's losses at the severity threshold `L` for Pareto tail
/// modelling: values `≥ L` are retained, the rest are excluded with an
/// explicit count.
pub fn apply_threshold(sample: &LossSample, threshold: f64) -> Result<ThresholdedLosses> {
    if !(threshold > 0.0 && threshold.is_finite()) {
        return Err(Error::invalid(format!(
            "threshold must be positive, got {threshold}"
        )));
    }
    let mut out = ThresholdedLosses::default();
    for &x in &sample.amounts {
        if x >= threshold {
            out.retained.push(x);
        } else {
            out.below_threshold += 1;
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

/// Writes a count panel in the canonical `bank_id,year,count,exposure`
/// schema. Emit → ingest → emit is byte-identical.
pub fn emit_counts<W: std::io::Write>(panel: &CountPanel, mut w: W) -> Result<()> {
    writeln!(w, "bank_id,year,count,exposure")?;
    for bank in &panel.banks {
        for r in &bank.records {
            writeln!(
                w,
                "{},{},{},{}",
                bank.bank_id,
                r.year,
                r.count,
                fmt_sig12(r.exposure)
            )?;
        }
    }
    Ok(())
}

/// Writes per-cell losses in the canonical `cell_id,year,amount` schema.
pub fn emit_losses<W: std::io::Write>(records: &[LossRecord], mut w: W) -> Result<()> {
    writeln!(w, "cell_id,year,amount")?;
    for r in records {
        writeln!(w, "{},{},{}", r.cell_id, r.year, fmt_sig12(r.amount))?;
    }
    Ok(())
}

/// One row of a posterior-trajectory file. For Gamma-family updates the
/// parameter columns are (α̂, β̂); for the LogNormal-μ family they carry
/// (μ̂₀, σ̂₀) under the same header.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub step: usize,
    pub alpha_hat: f64,
    pub beta_hat: f64,
    pub bayes_estimate: f64,
    pub mle_estimate: f64,
}

/// Writes a posterior trajectory in the canonical schema
/// `step,alpha_hat,beta_hat,bayes_estimate,mle_estimate`.
pub fn emit_trajectory<W: std::io::Write>(rows: &[TrajectoryRow], mut w: W) -> Result<()> {
    writeln!(w, "step,alpha_hat,beta_hat,bayes_estimate,mle_estimate")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            r.step,
            fmt_sig12(r.alpha_hat),
            fmt_sig12(r.beta_hat),
            fmt_sig12(r.bayes_estimate),
            fmt_sig12(r.mle_estimate)
        )?;
    }
    Ok(())
}

/// Writes annual-loss samples as `replication,loss`.
pub fn emit_samples<W: std::io::Write>(samples: &[f64], mut w: W) -> Result<()> {
    writeln!(w, "replication,loss")?;
    for (k, z) in samples.iter().enumerate() {
        writeln!(w, "{},{}", k, fmt_sig12(*z))?;
    }
    Ok(())
}
