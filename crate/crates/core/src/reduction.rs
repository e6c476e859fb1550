//! Connection reduction: drop connections longer than a joint-angle threshold
//! unless that would disconnect their two neurons.
//!
//! Over-threshold edges are visited longest first (ties by edge key). Each is
//! removed tentatively; a breadth-first search then checks that its end
//! points are still connected, and the edge is restored if they are not.

use serde::{Deserialize, Serialize};

use crate::network::{EdgeFilter, EdgeKind, Network, NetworkError, NeuronId};

/// Largest absolute per-joint difference, in the units of the inputs.
pub fn chebyshev(a: &[f64], b: &[f64]) -> Result<f64, NetworkError> {
    if a.len() != b.len() {
        return Err(NetworkError::Dimension { expected: a.len(), found: b.len() });
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RemovedEdge {
    pub a: NeuronId,
    pub b: NeuronId,
    pub kind: EdgeKind,
    /// Chebyshev length of the edge in degrees.
    pub length: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReductionLog {
    pub threshold: f64,
    pub removed: Vec<RemovedEdge>,
    /// Over-threshold edges kept because they are bridges.
    pub kept: Vec<RemovedEdge>,
}

impl ReductionLog {
    pub fn removed_count(&self) -> usize {
        self.removed.len()
    }
}

/// Returns the reduced copy of `net` and a log of the decisions.
pub fn reduce_connections(net: &Network, threshold: f64) -> (Network, ReductionLog) {
    let mut out = net.clone();
    let log = reduce_in_place(&mut out, threshold);
    (out, log)
}

pub fn reduce_in_place(net: &mut Network, threshold: f64) -> ReductionLog {
    let mut candidates: Vec<RemovedEdge> = net
        .edges()
        .filter_map(|e| {
            let length = chebyshev(net.weight(e.a), net.weight(e.b)).expect("weights share a dimension");
            (length > threshold).then_some(RemovedEdge { a: e.a, b: e.b, kind: e.kind, length })
        })
        .collect();
    candidates.sort_by(|x, y| {
        y.length.total_cmp(&x.length).then_with(|| (x.a, x.b, x.kind).cmp(&(y.a, y.b, y.kind)))
    });

    let mut log = ReductionLog { threshold, ..Default::default() };
    for c in candidates {
        let age = net.remove_edge(c.a, c.b, c.kind).expect("candidate edge present");
        if net.hop_distance(c.a, c.b, EdgeFilter::All).is_some() {
            log.removed.push(c);
        } else {
            net.insert_edge(c.a, c.b, c.kind, age);
            log.kept.push(c);
        }
    }
    log
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::ModelTag;

    fn net(points: &[f64], edges: &[(usize, usize)]) -> Network {
        let mut n = Network::new(6, ModelTag::Gng);
        for &p in points {
            n.add_neuron(vec![p, 0.0, 0.0, 0.0, 0.0, 0.0], vec![]);
        }
        for &(a, b) in edges {
            n.refresh_edge(a, b, EdgeKind::Topological);
        }
        n
    }

    #[test]
    fn chebyshev_takes_the_largest_joint_gap() {
        let a = [0.0; 6];
        let b = [5.0, -3.0, 9.0, 0.0, 0.0, 0.0];
        assert_eq!(chebyshev(&a, &b), Ok(9.0));
        assert_eq!(chebyshev(&a, &a), Ok(0.0));
        assert!(chebyshev(&a, &b[..3]).is_err());
    }

    #[test]
    fn triangle_loses_its_long_side() {
        // 0 —5— 1 —5— 2, and a direct 0–2 edge of length 15 (> 10)
        let mut n = net(&[0.0, 5.0, 15.0], &[(0, 1), (1, 2)]);
        n.refresh_edge(0, 2, EdgeKind::Topological);
        let (reduced, log) = reduce_connections(&n, 10.0);
        assert_eq!(log.removed_count(), 1);
        assert_eq!(reduced.edge_count(), 2);
        assert!(!reduced.has_edge(0, 2, EdgeKind::Topological));
        assert_eq!(reduced.connected_components(EdgeFilter::All).len(), 1);
    }

    #[test]
    fn bridges_survive() {
        let n = net(&[0.0, 5.0, 20.0, 25.0], &[(0, 1), (1, 2), (2, 3)]);
        let (reduced, log) = reduce_connections(&n, 10.0);
        assert_eq!(log.removed_count(), 0);
        assert_eq!(log.kept.len(), 1);
        assert_eq!(reduced, n);
    }

    #[test]
    fn longest_edge_goes_first() {
        // square with two long sides: only one of them can go
        let mut n = net(&[0.0, 0.0, 0.0, 0.0], &[]);
        for (id, y) in [(1, 12.0), (2, 30.0), (3, 18.0)] {
            n.neuron_mut(id).unwrap().weight[1] = y;
        }
        for (a, b) in [(0, 1), (1, 2), (2, 3), (3, 0)] {
            n.refresh_edge(a, b, EdgeKind::Topological);
        }
        let (_, log) = reduce_connections(&n, 10.0);
        // lengths: 0–1 12, 1–2 18, 2–3 12, 0–3 18; ties resolve by key
        assert_eq!(log.removed.len(), 1);
        assert_eq!((log.removed[0].a, log.removed[0].b), (0, 3));
    }
}
