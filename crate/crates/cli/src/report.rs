//! Deterministic output emission: runs.jsonl, summary.json, deltas.tsv,
//! timing.json, best_params.json and hypotest.json.
//!
//! All files except timing.json are pure functions of the configuration, so
//! rerunning an experiment reproduces them byte for byte; wall-clock values
//! are confined to timing.json.

use std::io::Write;
use std::path::Path;

use faircca_core::DataMatrix;

use crate::error::{CliError, Result};
use crate::experiment::ExperimentOutput;
use crate::hypothesis::HypothesisOutput;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Tsv,
}

impl std::str::FromStr for OutputFormat {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "tsv" => Ok(OutputFormat::Tsv),
            other => Err(CliError::Config(format!(
                "unknown format '{other}' (expected json or tsv)"
            ))),
        }
    }
}

pub fn write_experiment(out: &ExperimentOutput, dir: &Path, format: OutputFormat) -> Result<()> {
    std::fs::create_dir_all(dir)?;

    let mut runs_file = std::io::BufWriter::new(std::fs::File::create(dir.join("runs.jsonl"))?);
    for run in &out.runs {
        writeln!(
            runs_file,
            "{}",
            serde_json::to_string(run).expect("record serializes")
        )?;
    }
    for failure in &out.failures {
        writeln!(
            runs_file,
            "{}",
            serde_json::to_string(failure).expect("failure serializes")
        )?;
    }
    runs_file.flush()?;

    let summary = serde_json::json!({
        "cells": out.summary,
        "failures": out.failures,
        "deltas_error": out.deltas_error,
    });
    std::fs::write(
        dir.join("summary.json"),
        serde_json::to_string_pretty(&summary).expect("summary serializes"),
    )?;
    if format == OutputFormat::Tsv {
        let mut text = String::from("method\tmodality\tmetric\tmean\tstd\tn\n");
        for cell in &out.summary {
            text.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\n",
                cell.method.name(),
                cell.modality.name(),
                cell.metric,
                cell.mean,
                cell.std,
                cell.n
            ));
        }
        std::fs::write(dir.join("summary.tsv"), text)?;
    }

    let mut deltas = String::from("dim\tdelta_corr_pct\tdelta_fair_pct\n");
    for row in &out.deltas {
        deltas.push_str(&format!(
            "{}\t{}\t{}\n",
            row.dim, row.delta_corr_pct, row.delta_fair_pct
        ));
    }
    std::fs::write(dir.join("deltas.tsv"), deltas)?;

    std::fs::write(
        dir.join("timing.json"),
        serde_json::to_string_pretty(&serde_json::json!({ "per_method": out.timing }))
            .expect("timing serializes"),
    )?;

    if !out.best_params.is_empty() {
        std::fs::write(
            dir.join("best_params.json"),
            serde_json::to_string_pretty(&out.best_params).expect("params serialize"),
        )?;
    }
    Ok(())
}

pub fn write_hypothesis(out: &HypothesisOutput, dir: &Path, format: OutputFormat) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(
        dir.join("hypotest.json"),
        serde_json::to_string_pretty(out).expect("hypotest serializes"),
    )?;
    if format == OutputFormat::Tsv {
        let mut text = String::from("metric\tmodality\tstat\ttype\tp\tdecision\n");
        for (metric, row) in &out.table {
            for (modality, cell) in row {
                text.push_str(&format!(
                    "{metric}\t{modality}\t{}\t{}\t{}\t{}\n",
                    cell.stat, cell.test_type, cell.p, cell.decision
                ));
            }
        }
        std::fs::write(dir.join("hypotest.tsv"), text)?;
    }
    Ok(())
}

/// Projected-feature CSV with an f1..fR header, shortest-round-trip floats.
pub fn write_projection_csv(path: &Path, m: &DataMatrix) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    let header: Vec<String> = (1..=m.n_features()).map(|j| format!("f{j}")).collect();
    writeln!(f, "{}", header.join(","))?;
    let v = m.values();
    for i in 0..m.n_samples() {
        let row: Vec<String> = (0..m.n_features())
            .map(|j| format!("{}", v[(i, j)]))
            .collect();
        writeln!(f, "{}", row.join(","))?;
    }
    f.flush()?;
    Ok(())
}
