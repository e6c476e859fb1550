//! Provenance stamps and file writers shared by every output.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use sonn_core::network::{GraphFile, Network, NetworkError};

/// Identifies the experiment a file came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub experiment: String,
    pub config_hash: String,
    /// `None` for outputs derived from files that carried no seed.
    pub seed: Option<u64>,
}

impl Provenance {
    /// Stamp for ad-hoc commands: the hash of the input bytes stands in for a config hash.
    pub fn for_input(name: &str, bytes: &[u8]) -> Self {
        Self { experiment: name.to_string(), config_hash: hex::encode(Sha256::digest(bytes)), seed: None }
    }

    /// Comment line placed at the top of CSV outputs.
    pub fn csv_comment(&self) -> String {
        let seed = self.seed.map_or_else(|| "none".to_string(), |s| s.to_string());
        format!("# experiment={} config_hash={} seed={}", self.experiment, self.config_hash, seed)
    }
}

#[derive(Serialize)]
struct Stamped<'a, T: Serialize> {
    provenance: &'a Provenance,
    #[serde(flatten)]
    body: &'a T,
}

/// Pretty JSON with a `provenance` field next to the body's fields.
pub fn write_json<T: Serialize>(path: &Path, provenance: &Provenance, body: &T) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(&Stamped { provenance, body }).map_err(io::Error::other)?;
    text.push('\n');
    fs::write(path, text)
}

/// Writes `lines` under a provenance comment.
pub fn write_csv(path: &Path, provenance: &Provenance, header: &str, lines: impl IntoIterator<Item = String>) -> io::Result<()> {
    let mut out = io::BufWriter::new(fs::File::create(path)?);
    writeln!(out, "{}", provenance.csv_comment())?;
    writeln!(out, "{header}")?;
    for line in lines {
        writeln!(out, "{line}")?;
    }
    out.flush()
}

#[derive(Serialize, Deserialize)]
struct NetworkFile {
    provenance: Option<Provenance>,
    network: GraphFile,
}

pub fn write_network(path: &Path, provenance: &Provenance, net: &Network) -> io::Result<()> {
    #[derive(Serialize)]
    struct Body {
        network: GraphFile,
    }
    write_json(path, provenance, &Body { network: net.to_graph_file() })
}

/// Reads a network written by [`write_network`] or a bare graph file.
pub fn read_network(text: &str) -> Result<(Network, Option<Provenance>), NetworkError> {
    if let Ok(file) = serde_json::from_str::<NetworkFile>(text) {
        return Ok((Network::from_graph_file(file.network)?, file.provenance));
    }
    Ok((Network::from_json(text)?, None))
}

/// Shortest round-trip decimal form, so CSV values parse back bit-exact.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use sonn_core::network::EdgeKind;
    use sonn_core::ModelTag;

    #[test]
    fn network_round_trips_with_and_without_stamp() {
        let mut net = Network::new(6, ModelTag::Gng);
        let a = net.add_neuron(vec![0.1; 6], vec![]);
        let b = net.add_neuron(vec![1.0 / 3.0; 6], vec![]);
        net.refresh_edge(a, b, EdgeKind::Topological);
        let p = Provenance { experiment: "x".into(), config_hash: "ab".into(), seed: Some(4) };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("n.json");
        write_network(&path, &p, &net).unwrap();
        let (back, prov) = read_network(&fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(back, net);
        assert_eq!(prov, Some(p));
        let (bare, prov) = read_network(&net.to_json()).unwrap();
        assert_eq!(bare, net);
        assert_eq!(prov, None);
    }

    #[test]
    fn floats_print_round_trip() {
        for v in [0.1, 1.0 / 3.0, -90.0, 1e-300, 123456.789] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
        assert_eq!(fmt_f64(-90.0), "-90.0");
    }
}
