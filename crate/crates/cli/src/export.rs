//! Plot data: the 6-D samples and network projected onto three joints.

use std::fs;
use std::path::{Path, PathBuf};

use sonn_core::network::{EdgeKind, Network, NeuronId};
use sonn_core::{Dataset, DOF};
use thiserror::Error;

use crate::output::{fmt_f64, write_csv, Provenance};

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("joint indices {0:?} must be distinct")]
    NotDistinct([usize; 3]),
    #[error("joint index {0} is out of range 0..{DOF}")]
    OutOfRange(usize),
    #[error("network dimension is {0}, expected {DOF}")]
    Dimension(usize),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed edge file line {line}: {text}")]
    Parse { line: usize, text: String },
}

pub fn check_joints(joints: [usize; 3]) -> Result<(), ExportError> {
    if let Some(&j) = joints.iter().find(|&&j| j >= DOF) {
        return Err(ExportError::OutOfRange(j));
    }
    if joints[0] == joints[1] || joints[0] == joints[2] || joints[1] == joints[2] {
        return Err(ExportError::NotDistinct(joints));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlotFiles {
    pub samples: PathBuf,
    pub neurons: PathBuf,
    pub edges: PathBuf,
}

/// Writes `{stem}_samples.csv`, `{stem}_neurons.csv` and `{stem}_edges.csv` into `dir`.
///
/// Columns are named after the 1-based joints, e.g. `j1,j2,j3`.
pub fn export_plot_data(
    net: &Network,
    data: &Dataset,
    joints: [usize; 3],
    dir: &Path,
    stem: &str,
    provenance: &Provenance,
) -> Result<PlotFiles, ExportError> {
    check_joints(joints)?;
    if net.dim() != DOF {
        return Err(ExportError::Dimension(net.dim()));
    }
    fs::create_dir_all(dir)?;
    let cols = joints.map(|j| format!("j{}", j + 1)).join(",");
    let project = |v: &[f64]| joints.map(|j| fmt_f64(v[j])).join(",");

    let files = PlotFiles {
        samples: dir.join(format!("{stem}_samples.csv")),
        neurons: dir.join(format!("{stem}_neurons.csv")),
        edges: dir.join(format!("{stem}_edges.csv")),
    };
    let samples = data.trajectories.iter().flat_map(|t| {
        t.samples.iter().enumerate().map(move |(i, s)| format!("{},{i},{}", t.id, project(s.as_slice())))
    });
    write_csv(&files.samples, provenance, &format!("trajectory,index,{cols}"), samples)?;
    let neurons = net.neurons().map(|n| format!("{},{}", n.id, project(&n.weight)));
    write_csv(&files.neurons, provenance, &format!("id,{cols}"), neurons)?;
    let edges = net.edges().map(|e| format!("{},{},{}", e.a, e.b, kind_name(e.kind)));
    write_csv(&files.edges, provenance, "a,b,kind", edges)?;
    Ok(files)
}

fn kind_name(kind: EdgeKind) -> &'static str {
    match kind {
        EdgeKind::Topological => "topological",
        EdgeKind::Temporal => "temporal",
        EdgeKind::Lattice => "lattice",
    }
}

/// Parses an edges file written by [`export_plot_data`].
pub fn read_plot_edges(path: &Path) -> Result<Vec<(NeuronId, NeuronId, EdgeKind)>, ExportError> {
    let text = fs::read_to_string(path)?;
    let mut out = Vec::new();
    let body = text.lines().enumerate().filter(|(_, l)| !l.starts_with('#')).skip(1);
    for (i, line) in body {
        let bad = || ExportError::Parse { line: i + 1, text: line.to_string() };
        let mut f = line.split(',');
        let (Some(a), Some(b), Some(k), None) = (f.next(), f.next(), f.next(), f.next()) else {
            return Err(bad());
        };
        let kind = match k {
            "topological" => EdgeKind::Topological,
            "temporal" => EdgeKind::Temporal,
            "lattice" => EdgeKind::Lattice,
            _ => return Err(bad()),
        };
        out.push((a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?, kind));
    }
    Ok(out)
}
