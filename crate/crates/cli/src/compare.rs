//! Side-by-side table of several experiments, one row per model.

use std::fmt::Write as _;
use std::path::Path;

use sonn_core::ModelTag;
use thiserror::Error;

use crate::config::ExperimentConfig;
use crate::output::Provenance;
use crate::run::{run_all, ConnectionCell, ResultRow};

#[derive(Debug, Error)]
pub enum CompareError {
    #[error("nothing to compare")]
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub model: ModelTag,
    pub experiment: String,
    pub config_hash: String,
    pub seed: u64,
    /// The failure message when the experiment did not finish.
    pub result: Result<ResultRow, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
}

/// Runs every config and tabulates the results in [`ModelTag::ALL`] order.
pub fn compare_models(configs: &[ExperimentConfig]) -> Result<ComparisonTable, CompareError> {
    if configs.is_empty() {
        return Err(CompareError::Empty);
    }
    let outcomes = run_all(configs);
    let mut rows: Vec<ComparisonRow> = configs
        .iter()
        .zip(outcomes)
        .map(|(c, o)| ComparisonRow {
            model: c.model.tag(),
            experiment: c.id.clone(),
            config_hash: c.hash(),
            seed: c.seed,
            result: o.map(|o| o.row).map_err(|e| e.to_string()),
        })
        .collect();
    rows.sort_by_key(|r| ModelTag::ALL.iter().position(|&t| t == r.model));
    Ok(ComparisonTable { rows })
}

const HEADER: [&str; 6] = ["type", "#N", "QE", "#Con./CM", "#Red./CM", "status"];

fn cell(c: &ConnectionCell) -> String {
    match c.cm {
        Some(cm) => format!("{}/{cm:.2}", c.count),
        None => format!("{}/-", c.count),
    }
}

impl ComparisonTable {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.result.is_err()).count()
    }

    fn cells(&self) -> Vec<[String; 6]> {
        self.rows
            .iter()
            .map(|r| match &r.result {
                Ok(row) => [
                    r.model.label().to_string(),
                    row.neurons.to_string(),
                    format!("{:.2}", row.qe),
                    cell(&row.connections),
                    row.reduced.as_ref().map(cell).unwrap_or_default(),
                    "ok".to_string(),
                ],
                Err(msg) => [
                    r.model.label().to_string(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    format!("FAILED: {msg}"),
                ],
            })
            .collect()
    }

    fn provenance_lines(&self) -> Vec<String> {
        self.rows
            .iter()
            .map(|r| {
                Provenance { experiment: r.experiment.clone(), config_hash: r.config_hash.clone(), seed: Some(r.seed) }
                    .csv_comment()
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for line in self.provenance_lines() {
            writeln!(out, "{line}").unwrap();
        }
        writeln!(out, "{}", HEADER.join(",")).unwrap();
        for row in self.cells() {
            let quoted: Vec<String> = row
                .iter()
                .map(|c| if c.contains([',', '"', '\n']) { format!("\"{}\"", c.replace('"', "\"\"")) } else { c.clone() })
                .collect();
            writeln!(out, "{}", quoted.join(",")).unwrap();
        }
        out
    }

    /// Column-aligned text with the provenance lines underneath.
    pub fn to_text(&self) -> String {
        let cells = self.cells();
        let mut width = HEADER.map(|h| h.chars().count());
        for row in &cells {
            for (w, c) in width.iter_mut().zip(row) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |row: &[String]| {
            let padded: Vec<String> = row
                .iter()
                .zip(width)
                .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
                .collect();
            padded.join("  ").trim_end().to_string()
        };
        let mut out = String::new();
        writeln!(out, "{}", line(&HEADER.map(String::from))).unwrap();
        writeln!(out, "{}", line(&width.map(|w| "-".repeat(w)))).unwrap();
        for row in &cells {
            writeln!(out, "{}", line(row)).unwrap();
        }
        writeln!(out).unwrap();
        for l in self.provenance_lines() {
            writeln!(out, "{l}").unwrap();
        }
        out
    }

    /// Writes `comparison.csv` and `comparison.txt` into `dir`.
    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("comparison.csv"), self.to_csv())?;
        std::fs::write(dir.join("comparison.txt"), self.to_text())
    }
}
