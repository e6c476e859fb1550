use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use sonn_core::dataset::{load_dataset, DataFormat};
use sonn_core::kinematics::ArmModel;
use sonn_core::network::EdgeFilter;
use sonn_core::planner::{plan, PlanOptions};
use sonn_core::JointConfig;
use sonn_cli::output::{read_network, write_json, Provenance};
use sonn_cli::run::write_waypoints;
use sonn_cli::{compare_models, export_plot_data, load_experiments, run_all, write_results, ExperimentConfig};

#[derive(Parser)]
#[command(name = "sonn", version, about = "Learn reduced C-spaces with self-organizing networks and plan on them")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every experiment (grid cell) of a config file.
    Run {
        config: PathBuf,
        /// Overrides `output_dir`.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Overrides `seed`.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run several configs and print a comparison table.
    Compare {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
        /// Where experiment bundles and comparison.{csv,txt} go.
        #[arg(long, default_value = "results")]
        output_dir: PathBuf,
    },
    /// Plan a path on a saved network.
    Plan {
        #[arg(long)]
        network: PathBuf,
        /// Six comma-separated joint angles in degrees.
        #[arg(long, allow_hyphen_values = true)]
        start: String,
        #[arg(long, allow_hyphen_values = true)]
        goal: String,
        #[arg(long, value_enum, default_value_t = Filter::All)]
        filter: Filter,
        /// Arm description (JSON DH table); UR3 when omitted.
        #[arg(long)]
        arm: Option<PathBuf>,
        /// Plan JSON; printed to stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        waypoints: Option<PathBuf>,
    },
    /// Write samples, neurons and edges projected onto three joints.
    ExportPlots {
        #[arg(long)]
        network: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        /// Three distinct zero-based joint indices.
        #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
        joints: Vec<usize>,
        #[arg(long)]
        output_dir: PathBuf,
    },
    /// Parse and validate config files, listing the experiments they expand to.
    ValidateConfig {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Filter {
    All,
    ExcludeTemporal,
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn load(path: &Path) -> Result<Vec<ExperimentConfig>> {
    load_experiments(path).with_context(|| format!("invalid config {}", path.display()))
}

fn parse_config(text: &str) -> Result<JointConfig> {
    let values: Vec<f64> = text
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .with_context(|| format!("`{text}` is not a list of numbers"))?;
    match JointConfig::from_slice(&values) {
        Some(q) if q.is_finite() => Ok(q),
        _ => bail!("expected six finite joint angles, got `{text}`"),
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Run { config, output_dir, seed } => {
            let mut configs = load(&config)?;
            for c in &mut configs {
                if let Some(dir) = &output_dir {
                    c.output_dir = std::path::absolute(dir)?;
                }
                if let Some(s) = seed {
                    c.seed = s;
                }
            }
            let outcomes = run_all(&configs);
            let mut failed = 0;
            let mut rows = Vec::new();
            for o in &outcomes {
                match o {
                    Ok(o) => {
                        println!("{}: {}", o.row.experiment, serde_json::to_string(&o.row)?);
                        rows.push(&o.row);
                    }
                    Err(e) => {
                        eprintln!("error: {e}");
                        failed += 1;
                    }
                }
            }
            let root = configs[0].resolve(&configs[0].output_dir);
            write_results(&root.join("results.jsonl"), &rows)?;
            if failed > 0 {
                bail!("{failed} of {} experiments failed", configs.len());
            }
        }
        Command::Compare { configs, output_dir } => {
            let out = std::path::absolute(&output_dir)?;
            let mut all = Vec::new();
            for path in &configs {
                for mut c in load(path)? {
                    c.output_dir = out.clone();
                    all.push(c);
                }
            }
            let table = compare_models(&all)?;
            table.write(&out)?;
            print!("{}", table.to_text());
            let rows: Vec<_> = table.rows.iter().filter_map(|r| r.result.as_ref().ok()).collect();
            write_results(&out.join("results.jsonl"), &rows)?;
            if table.failures() > 0 {
                bail!("{} of {} experiments failed", table.failures(), table.rows.len());
            }
        }
        Command::Plan { network, start, goal, filter, arm, output, waypoints } => {
            let text = std::fs::read_to_string(&network).with_context(|| format!("reading {}", network.display()))?;
            let (net, prov) = read_network(&text).with_context(|| format!("parsing {}", network.display()))?;
            let prov = prov.unwrap_or_else(|| Provenance::for_input("plan", text.as_bytes()));
            let arm = match arm {
                Some(p) => ArmModel::from_file(&p).with_context(|| format!("reading {}", p.display()))?,
                None => ArmModel::ur3(),
            };
            let filter = match filter {
                Filter::All => EdgeFilter::All,
                Filter::ExcludeTemporal => EdgeFilter::ExcludeTemporal,
            };
            let result = plan(&net, &parse_config(&start)?, &parse_config(&goal)?, &PlanOptions { filter, arm })?;
            #[derive(serde::Serialize)]
            struct Body<'a> {
                plan: &'a sonn_core::planner::PlanResult,
            }
            match output {
                Some(p) => write_json(&p, &prov, &Body { plan: &result })?,
                None => println!("{}", result.to_json()),
            }
            if let Some(p) = waypoints {
                write_waypoints(&p, &prov, &result)?;
            }
        }
        Command::ExportPlots { network, dataset, joints, output_dir } => {
            let text = std::fs::read_to_string(&network).with_context(|| format!("reading {}", network.display()))?;
            let (net, prov) = read_network(&text).with_context(|| format!("parsing {}", network.display()))?;
            let prov = prov.unwrap_or_else(|| Provenance::for_input("export", text.as_bytes()));
            let format = DataFormat::from_path(&dataset).context("dataset must be .csv or .json")?;
            let data = load_dataset(&dataset, format).with_context(|| format!("reading {}", dataset.display()))?;
            let joints: [usize; 3] = joints.try_into().map_err(|_| anyhow::anyhow!("give exactly three joints"))?;
            let files = export_plot_data(&net, &data, joints, &output_dir, "plot", &prov)?;
            println!("{}\n{}\n{}", files.samples.display(), files.neurons.display(), files.edges.display());
        }
        Command::ValidateConfig { configs } => {
            for path in &configs {
                for c in load(path)? {
                    println!("{}\t{}\t{}\t{}", path.display(), c.id, c.model.tag(), c.hash());
                }
            }
        }
    }
    Ok(())
}
