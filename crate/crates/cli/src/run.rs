//! Running one experiment end to end and writing its bundle.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sonn_core::dataset::{generate_synthetic, load_dataset, DataFormat, DatasetError};
use sonn_core::metrics::{MetricsError, MetricsOptions, MetricsReport};
use sonn_core::models::ModelError;
use sonn_core::network::Network;
use sonn_core::planner::{plan, PlanOptions, PlanResult};
use sonn_core::reduction::{reduce_connections, ReductionLog};
use sonn_core::{Dataset, JointConfig, ModelTag};
use thiserror::Error;

use crate::config::ExperimentConfig;
use crate::export::{export_plot_data, ExportError};
use crate::output::{write_csv, write_json, write_network, Provenance};

#[derive(Debug, Error)]
pub enum StageError {
    #[error("dataset: {0}")]
    Dataset(#[from] DatasetError),
    #[error("training: {0}")]
    Model(#[from] ModelError),
    #[error("metrics: {0}")]
    Metrics(#[from] MetricsError),
    #[error("plot export: {0}")]
    Export(#[from] ExportError),
    #[error("writing results: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
#[error("experiment `{id}` failed: {source}")]
pub struct RunError {
    pub id: String,
    #[source]
    pub source: StageError,
}

/// Connection count and C-measure, one cell of the results table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConnectionCell {
    pub count: usize,
    /// `None` when no two neurons are connected.
    pub cm: Option<f64>,
}

/// One line of `results.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub model: ModelTag,
    pub config_hash: String,
    pub seed: u64,
    #[serde(rename = "#N")]
    pub neurons: usize,
    #[serde(rename = "QE")]
    pub qe: f64,
    #[serde(rename = "#Con./CM")]
    pub connections: ConnectionCell,
    /// Blank for lattice models and when reduction is off.
    #[serde(rename = "#Red./CM")]
    pub reduced: Option<ConnectionCell>,
    pub components: usize,
    pub coverage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanOutcome {
    pub start: JointConfig,
    pub goal: JointConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<PlanResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub row: ResultRow,
    pub dir: PathBuf,
    pub network: Network,
    pub reduced: Option<(Network, ReductionLog)>,
    pub plans: Vec<PlanOutcome>,
}

pub fn load_data(config: &ExperimentConfig) -> Result<Dataset, DatasetError> {
    let d = &config.dataset;
    let raw = match (&d.synthetic, &d.path) {
        (Some(spec), _) => generate_synthetic(spec, d.seed.unwrap_or(config.seed))?,
        (None, Some(p)) => {
            let path = config.resolve(p);
            let format = DataFormat::from_path(&path)
                .ok_or_else(|| DatasetError::Config(format!("{}: unknown extension, use .csv or .json", path.display())))?;
            load_dataset(&path, format)?
        }
        (None, None) => return Err(DatasetError::Config("no dataset source".into())),
    };
    Ok(raw.interpolated(d.interpolation_rounds).with_order(d.order))
}

/// Trains, measures, reduces, plans and exports one experiment into
/// [`ExperimentConfig::experiment_dir`].
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome, RunError> {
    run_inner(config).map_err(|source| RunError { id: config.id.clone(), source })
}

fn run_inner(config: &ExperimentConfig) -> Result<ExperimentOutcome, StageError> {
    let hash = config.hash();
    let prov = Provenance { experiment: config.id.clone(), config_hash: hash.clone(), seed: Some(config.seed) };
    let dir = config.experiment_dir();
    fs::create_dir_all(&dir)?;

    let data = load_data(config)?;
    let net = config.model.train(&data, config.seed)?;
    let tag = config.model.tag();
    let metric = config.model.metric();
    let opts = MetricsOptions {
        cm_pairs: config.metrics.cm_pairs,
        coverage_radius: config.metrics.coverage_radius,
        seed: config.seed,
    };
    let report = MetricsReport::compute(&net, &data, metric, &opts)?;

    let reduced = (tag.is_growing() && config.reduction.enabled).then(|| reduce_connections(&net, config.reduction.threshold));
    let reduced_report = match &reduced {
        Some((r, _)) => Some(MetricsReport::compute(r, &data, metric, &opts)?),
        None => None,
    };

    let row = ResultRow {
        experiment: config.id.clone(),
        model: tag,
        config_hash: hash,
        seed: config.seed,
        neurons: report.n_neurons,
        qe: report.qe,
        connections: ConnectionCell { count: report.n_edges, cm: report.cm },
        reduced: reduced_report.as_ref().map(|r| ConnectionCell { count: r.n_edges, cm: r.cm }),
        components: report.n_components,
        coverage: report.coverage_fraction,
    };

    #[derive(Serialize)]
    struct Config<'a> {
        config: &'a ExperimentConfig,
    }
    write_json(&dir.join("config.json"), &prov, &Config { config })?;
    write_network(&dir.join("network.json"), &prov, &net)?;

    #[derive(Serialize)]
    struct Metrics<'a> {
        row: &'a ResultRow,
        original: &'a MetricsReport,
        reduced: Option<&'a MetricsReport>,
    }
    write_json(&dir.join("metrics.json"), &prov, &Metrics { row: &row, original: &report, reduced: reduced_report.as_ref() })?;

    if let Some((r, log)) = &reduced {
        write_network(&dir.join("network_reduced.json"), &prov, r)?;
        #[derive(Serialize)]
        struct Log<'a> {
            log: &'a ReductionLog,
        }
        write_json(&dir.join("reduction_log.json"), &prov, &Log { log })?;
    }

    let plan_net = reduced.as_ref().map_or(&net, |(r, _)| r);
    let plans = run_plans(config, plan_net);
    #[derive(Serialize)]
    struct Plans<'a> {
        network: &'a str,
        plans: &'a [PlanOutcome],
    }
    let which = if reduced.is_some() { "reduced" } else { "original" };
    write_json(&dir.join("plans.json"), &prov, &Plans { network: which, plans: &plans })?;
    for (i, p) in plans.iter().enumerate() {
        if let Some(res) = &p.result {
            write_waypoints(&dir.join(format!("plan_{i:02}_waypoints.csv")), &prov, res)?;
        }
    }

    if config.plot.enabled {
        export_plot_data(&net, &data, config.plot.joints, &dir, "plot", &prov)?;
        if let Some((r, _)) = &reduced {
            export_plot_data(r, &data, config.plot.joints, &dir, "plot_reduced", &prov)?;
        }
    }

    Ok(ExperimentOutcome { row, dir, network: net, reduced, plans })
}

fn run_plans(config: &ExperimentConfig, net: &Network) -> Vec<PlanOutcome> {
    config
        .plans
        .iter()
        .map(|q| {
            let opts = PlanOptions { filter: q.filter, ..Default::default() };
            let (result, error) = match plan(net, &q.start, &q.goal, &opts) {
                Ok(r) => (Some(r), None),
                Err(e) => (None, Some(e.to_string())),
            };
            PlanOutcome { start: q.start, goal: q.goal, result, error }
        })
        .collect()
}

pub fn write_waypoints(path: &Path, prov: &Provenance, res: &PlanResult) -> std::io::Result<()> {
    let mut buf = Vec::new();
    res.write_waypoints_csv(&mut buf)?;
    let text = String::from_utf8(buf).expect("csv is utf-8");
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default().to_string();
    write_csv(path, prov, &header, lines.map(str::to_string))
}

/// Runs experiments concurrently; results come back in input order.
pub fn run_all(configs: &[ExperimentConfig]) -> Vec<Result<ExperimentOutcome, RunError>> {
    configs.par_iter().map(run_experiment).collect()
}

/// Rewrites `path` with one JSON row per successful experiment.
pub fn write_results(path: &Path, rows: &[&ResultRow]) -> std::io::Result<()> {
    let mut text = String::new();
    for row in rows {
        text.push_str(&serde_json::to_string(row).map_err(std::io::Error::other)?);
        text.push('\n');
    }
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, text)
}
