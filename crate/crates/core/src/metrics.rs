//! Quality measures for a trained network.
//!
//! * quantization error: mean distance from each sample to its nearest neuron;
//! * C-measure: over reachable neuron pairs, `mean(d_w · d_hop) / mean(d_hop)`,
//!   where `d_w` is the Euclidean weight distance and `d_hop` the graph hop
//!   distance. Large values mean hop-distant neurons are also far apart in
//!   weight space. A single edge of length `w` scores `w`;
//! * coverage: fraction of samples with a neuron within a Chebyshev radius.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::Dataset;
use crate::models::DistanceMetric;
use crate::network::{EdgeFilter, Network, NeuronId};

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("network has no neurons")]
    EmptyNetwork,
    #[error("dataset has no samples")]
    EmptyDataset,
    #[error("C-measure is undefined: none of the {pairs} evaluated pairs is connected")]
    NoReachablePairs { pairs: usize },
}

pub fn quantization_error(net: &Network, data: &Dataset, metric: DistanceMetric) -> Result<f64, MetricsError> {
    if net.is_empty() {
        return Err(MetricsError::EmptyNetwork);
    }
    if data.is_empty() {
        return Err(MetricsError::EmptyDataset);
    }
    let weights: Vec<&[f64]> = net.neurons().map(|n| n.weight.as_slice()).collect();
    let mut total = 0.0;
    for x in data.samples() {
        let best = weights
            .iter()
            .map(|w| metric.distance_sq(x.as_slice(), w))
            .fold(f64::INFINITY, f64::min);
        total += best.sqrt();
    }
    Ok(total / data.total_samples() as f64)
}

/// Fraction of samples with some neuron within Chebyshev distance `radius`.
/// An empty network or dataset covers nothing.
pub fn coverage(net: &Network, data: &Dataset, radius: f64) -> f64 {
    if net.is_empty() || data.is_empty() {
        return 0.0;
    }
    let weights: Vec<&[f64]> = net.neurons().map(|n| n.weight.as_slice()).collect();
    let covered = data
        .samples()
        .filter(|x| {
            weights.iter().any(|w| {
                x.as_slice().iter().zip(w.iter()).all(|(a, b)| (a - b).abs() <= radius)
            })
        })
        .count();
    covered as f64 / data.total_samples() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CMeasure {
    pub value: f64,
    /// Share of evaluated pairs that lie in different components.
    pub unreachable_fraction: f64,
    /// Number of evaluated pairs, reachable or not.
    pub pairs: usize,
}

#[derive(Default)]
struct CmAccumulator {
    weighted: f64,
    hops: f64,
    reachable: usize,
    pairs: usize,
}

impl CmAccumulator {
    fn add(&mut self, net: &Network, i: NeuronId, j: NeuronId, hop: Option<usize>) {
        self.pairs += 1;
        if let Some(h) = hop {
            let h = h as f64;
            self.weighted += DistanceMetric::Euclid.distance(net.weight(i), net.weight(j)) * h;
            self.hops += h;
            self.reachable += 1;
        }
    }

    fn finish(self) -> Result<CMeasure, MetricsError> {
        if self.reachable == 0 {
            return Err(MetricsError::NoReachablePairs { pairs: self.pairs });
        }
        Ok(CMeasure {
            value: self.weighted / self.hops,
            unreachable_fraction: (self.pairs - self.reachable) as f64 / self.pairs as f64,
            pairs: self.pairs,
        })
    }
}

/// C-measure over every unordered neuron pair.
pub fn c_measure_exhaustive(net: &Network, filter: EdgeFilter) -> Result<CMeasure, MetricsError> {
    if net.is_empty() {
        return Err(MetricsError::EmptyNetwork);
    }
    let ids: Vec<NeuronId> = net.ids().collect();
    let mut acc = CmAccumulator::default();
    for (k, &i) in ids.iter().enumerate() {
        let hops = net.bfs_hops(i, filter);
        for &j in &ids[k + 1..] {
            acc.add(net, i, j, hops[j]);
        }
    }
    acc.finish()
}

/// C-measure estimated from `pairs` uniformly drawn pairs of distinct neurons.
/// Pairs sharing a first neuron reuse one BFS.
pub fn c_measure_sampled(net: &Network, pairs: usize, seed: u64, filter: EdgeFilter) -> Result<CMeasure, MetricsError> {
    let ids: Vec<NeuronId> = net.ids().collect();
    if ids.is_empty() {
        return Err(MetricsError::EmptyNetwork);
    }
    let mut acc = CmAccumulator::default();
    if ids.len() < 2 {
        return acc.finish();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut drawn: Vec<(usize, usize)> = (0..pairs)
        .map(|_| {
            let a = rng.gen_range(0..ids.len());
            let mut b = rng.gen_range(0..ids.len() - 1);
            if b >= a {
                b += 1;
            }
            (a, b)
        })
        .collect();
    drawn.sort_unstable();
    let mut current: Option<(usize, Vec<Option<usize>>)> = None;
    for (a, b) in drawn {
        if current.as_ref().is_none_or(|(src, _)| *src != a) {
            current = Some((a, net.bfs_hops(ids[a], filter)));
        }
        let hops = &current.as_ref().expect("set above").1;
        acc.add(net, ids[a], ids[b], hops[ids[b]]);
    }
    acc.finish()
}

/// Exhaustive when the network has at most `pairs` unordered pairs,
/// sampled otherwise.
pub fn c_measure(net: &Network, pairs: usize, seed: u64) -> Result<CMeasure, MetricsError> {
    let n = net.len();
    if n.saturating_mul(n.saturating_sub(1)) / 2 <= pairs {
        c_measure_exhaustive(net, EdgeFilter::All)
    } else {
        c_measure_sampled(net, pairs, seed, EdgeFilter::All)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsOptions {
    pub cm_pairs: usize,
    pub coverage_radius: f64,
    pub seed: u64,
}

impl Default for MetricsOptions {
    fn default() -> Self {
        Self { cm_pairs: 100_000, coverage_radius: 10.0, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub qe: f64,
    /// `None` when no pair of neurons is connected.
    pub cm: Option<f64>,
    pub cm_unreachable_fraction: Option<f64>,
    pub n_neurons: usize,
    pub n_edges: usize,
    pub n_components: usize,
    pub coverage_fraction: f64,
}

impl MetricsReport {
    pub fn compute(
        net: &Network,
        data: &Dataset,
        metric: DistanceMetric,
        opts: &MetricsOptions,
    ) -> Result<Self, MetricsError> {
        let qe = quantization_error(net, data, metric)?;
        let cm = match c_measure(net, opts.cm_pairs, opts.seed) {
            Ok(cm) => Some(cm),
            Err(MetricsError::NoReachablePairs { .. }) => None,
            Err(e) => return Err(e),
        };
        Ok(Self {
            qe,
            cm: cm.map(|c| c.value),
            cm_unreachable_fraction: cm.map(|c| c.unreachable_fraction),
            n_neurons: net.len(),
            n_edges: net.edge_count(),
            n_components: net.connected_components(EdgeFilter::All).len(),
            coverage_fraction: coverage(net, data, opts.coverage_radius),
        })
    }
}
