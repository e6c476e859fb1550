//! Graph of neurons shared by all trainers, the metrics, the reduction and the planner.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::models::{DistanceMetric, ModelTag};

/// Stable neuron index. Ids of removed neurons are never handed out again.
pub type NeuronId = usize;

#[derive(Debug, Error, PartialEq)]
pub enum NetworkError {
    #[error("network has {available} selectable neurons, at least 2 are required")]
    Insufficient { available: usize },
    #[error("unknown neuron {0}")]
    UnknownNeuron(NeuronId),
    #[error("vector has dimension {found}, network expects {expected}")]
    Dimension { expected: usize, found: usize },
    #[error("malformed graph: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    /// Learned neighborhood connection (GNG family, SGNG segments).
    Topological,
    /// SGNG connection between successive best matching segments.
    Temporal,
    /// Fixed SOM lattice neighbor.
    Lattice,
}

/// Which edges a traversal may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeFilter {
    #[default]
    All,
    ExcludeTemporal,
}

impl EdgeFilter {
    pub fn admits(self, kind: EdgeKind) -> bool {
        match self {
            Self::All => true,
            Self::ExcludeTemporal => kind != EdgeKind::Temporal,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Neuron {
    pub id: NeuronId,
    pub weight: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub contexts: Vec<Vec<f64>>,
    #[serde(default)]
    pub error: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_pos: Option<(usize, usize)>,
}

/// Unordered neuron pair plus edge kind; `a < b` always.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeKey {
    pub a: NeuronId,
    pub b: NeuronId,
    pub kind: EdgeKind,
}

impl EdgeKey {
    pub fn new(a: NeuronId, b: NeuronId, kind: EdgeKind) -> Self {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        Self { a, b, kind }
    }

    pub fn other(&self, n: NeuronId) -> NeuronId {
        if self.a == n {
            self.b
        } else {
            self.a
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub a: NeuronId,
    pub b: NeuronId,
    pub age: u32,
    pub kind: EdgeKind,
}

impl Edge {
    pub fn key(&self) -> EdgeKey {
        EdgeKey::new(self.a, self.b, self.kind)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PruneReport {
    pub edges_removed: usize,
    pub neurons_removed: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    dim: usize,
    model: ModelTag,
    neurons: Vec<Option<Neuron>>,
    edges: BTreeMap<EdgeKey, u32>,
    adjacency: Vec<BTreeSet<(NeuronId, EdgeKind)>>,
    live: usize,
}

impl Network {
    pub fn new(dim: usize, model: ModelTag) -> Self {
        Self {
            dim,
            model,
            neurons: Vec::new(),
            edges: BTreeMap::new(),
            adjacency: Vec::new(),
            live: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn model(&self) -> ModelTag {
        self.model
    }

    /// Number of live neurons.
    pub fn len(&self) -> usize {
        self.live
    }

    pub fn is_empty(&self) -> bool {
        self.live == 0
    }

    /// One past the largest id ever assigned.
    pub fn id_bound(&self) -> usize {
        self.neurons.len()
    }

    pub fn add_neuron(&mut self, weight: Vec<f64>, contexts: Vec<Vec<f64>>) -> NeuronId {
        debug_assert_eq!(weight.len(), self.dim);
        debug_assert!(contexts.iter().all(|c| c.len() == self.dim));
        let id = self.neurons.len();
        self.neurons.push(Some(Neuron { id, weight, contexts, error: 0.0, grid_pos: None }));
        self.adjacency.push(BTreeSet::new());
        self.live += 1;
        id
    }

    pub fn contains(&self, id: NeuronId) -> bool {
        self.neurons.get(id).is_some_and(Option::is_some)
    }

    pub fn neuron(&self, id: NeuronId) -> Option<&Neuron> {
        self.neurons.get(id).and_then(Option::as_ref)
    }

    pub fn neuron_mut(&mut self, id: NeuronId) -> Option<&mut Neuron> {
        self.neurons.get_mut(id).and_then(Option::as_mut)
    }

    pub fn weight(&self, id: NeuronId) -> &[f64] {
        &self.neurons[id].as_ref().expect("live neuron").weight
    }

    /// Live neurons in ascending id order.
    pub fn neurons(&self) -> impl Iterator<Item = &Neuron> {
        self.neurons.iter().flatten()
    }

    pub fn neurons_mut(&mut self) -> impl Iterator<Item = &mut Neuron> {
        self.neurons.iter_mut().flatten()
    }

    pub fn ids(&self) -> impl Iterator<Item = NeuronId> + '_ {
        self.neurons().map(|n| n.id)
    }

    /// Removes a neuron together with all of its edges.
    pub fn remove_neuron(&mut self, id: NeuronId) -> Option<Neuron> {
        let neuron = self.neurons.get_mut(id)?.take()?;
        let incident: Vec<_> = std::mem::take(&mut self.adjacency[id]).into_iter().collect();
        for (other, kind) in incident {
            self.edges.remove(&EdgeKey::new(id, other, kind));
            self.adjacency[other].remove(&(id, kind));
        }
        self.live -= 1;
        Some(neuron)
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().map(|(k, &age)| Edge { a: k.a, b: k.b, age, kind: k.kind })
    }

    pub fn has_edge(&self, a: NeuronId, b: NeuronId, kind: EdgeKind) -> bool {
        self.edges.contains_key(&EdgeKey::new(a, b, kind))
    }

    pub fn edge_age(&self, a: NeuronId, b: NeuronId, kind: EdgeKind) -> Option<u32> {
        self.edges.get(&EdgeKey::new(a, b, kind)).copied()
    }

    /// Inserts an edge with the given age, replacing the age of an existing one.
    pub fn insert_edge(&mut self, a: NeuronId, b: NeuronId, kind: EdgeKind, age: u32) {
        assert!(a != b, "self loops are not allowed");
        assert!(self.contains(a) && self.contains(b), "edge endpoints must exist");
        self.edges.insert(EdgeKey::new(a, b, kind), age);
        self.adjacency[a].insert((b, kind));
        self.adjacency[b].insert((a, kind));
    }

    /// Sets the age of edge `(a, b)` to zero, creating it if needed.
    pub fn refresh_edge(&mut self, a: NeuronId, b: NeuronId, kind: EdgeKind) {
        self.insert_edge(a, b, kind, 0);
    }

    pub fn remove_edge(&mut self, a: NeuronId, b: NeuronId, kind: EdgeKind) -> Option<u32> {
        let age = self.edges.remove(&EdgeKey::new(a, b, kind))?;
        self.adjacency[a].remove(&(b, kind));
        self.adjacency[b].remove(&(a, kind));
        Some(age)
    }

    /// Incident `(neighbor, kind)` pairs in ascending order.
    pub fn incident(&self, id: NeuronId) -> impl Iterator<Item = (NeuronId, EdgeKind)> + '_ {
        self.adjacency.get(id).into_iter().flatten().copied()
    }

    /// Distinct neighbors over all edge kinds, ascending.
    pub fn neighbors(&self, id: NeuronId) -> Vec<NeuronId> {
        self.neighbors_filtered(id, EdgeFilter::All)
    }

    pub fn neighbors_filtered(&self, id: NeuronId, filter: EdgeFilter) -> Vec<NeuronId> {
        let mut out: Vec<NeuronId> =
            self.incident(id).filter(|(_, k)| filter.admits(*k)).map(|(n, _)| n).collect();
        out.dedup();
        out
    }

    pub fn degree(&self, id: NeuronId) -> usize {
        self.adjacency.get(id).map_or(0, BTreeSet::len)
    }

    /// Increments the age of every edge incident to `around`.
    pub fn age_edges(&mut self, around: NeuronId) {
        for &(other, kind) in self.adjacency.get(around).into_iter().flatten() {
            if let Some(age) = self.edges.get_mut(&EdgeKey::new(around, other, kind)) {
                *age = age.saturating_add(1);
            }
        }
    }

    /// Drops every edge older than `max_age`, then drops the neurons those
    /// removals left without any edge. The network never shrinks below two
    /// neurons.
    pub fn prune_stale(&mut self, max_age: u32) -> PruneReport {
        let stale: Vec<EdgeKey> =
            self.edges.iter().filter(|(_, &age)| age > max_age).map(|(k, _)| *k).collect();
        let mut report = PruneReport { edges_removed: stale.len(), neurons_removed: 0 };
        let mut touched = BTreeSet::new();
        for key in stale {
            self.remove_edge(key.a, key.b, key.kind);
            touched.insert(key.a);
            touched.insert(key.b);
        }
        for id in touched {
            if self.live <= 2 {
                break;
            }
            if self.contains(id) && self.degree(id) == 0 {
                self.remove_neuron(id);
                report.neurons_removed += 1;
            }
        }
        report
    }

    /// The two distinct selectable neurons with the smallest `distance`;
    /// ties go to the lower id.
    pub fn bmu_by<F>(&self, blocked: &[NeuronId], mut distance: F) -> Result<(NeuronId, NeuronId), NetworkError>
    where
        F: FnMut(&Neuron) -> f64,
    {
        let mut best: Option<(f64, NeuronId)> = None;
        let mut second: Option<(f64, NeuronId)> = None;
        let mut available = 0;
        for n in self.neurons() {
            if blocked.contains(&n.id) {
                continue;
            }
            available += 1;
            let d = distance(n);
            match best {
                Some((bd, _)) if d >= bd => {
                    if second.is_none_or(|(sd, _)| d < sd) {
                        second = Some((d, n.id));
                    }
                }
                _ => {
                    second = best;
                    best = Some((d, n.id));
                }
            }
        }
        match (best, second) {
            (Some((_, a)), Some((_, b))) => Ok((a, b)),
            _ => Err(NetworkError::Insufficient { available }),
        }
    }

    /// Best and second-best matching units for `x` under `metric`.
    pub fn bmu(
        &self,
        x: &[f64],
        metric: DistanceMetric,
        blocked: &[NeuronId],
    ) -> Result<(NeuronId, NeuronId), NetworkError> {
        self.bmu_by(blocked, |n| metric.distance_sq(x, &n.weight))
    }

    /// Single nearest neuron (lowest id on ties).
    pub fn nearest(&self, x: &[f64], metric: DistanceMetric) -> Option<NeuronId> {
        let mut best: Option<(f64, NeuronId)> = None;
        for n in self.neurons() {
            let d = metric.distance_sq(x, &n.weight);
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, n.id));
            }
        }
        best.map(|(_, id)| id)
    }

    /// Hop counts from `source` to every id (`None` when unreachable or removed).
    pub fn bfs_hops(&self, source: NeuronId, filter: EdgeFilter) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.id_bound()];
        if !self.contains(source) {
            return dist;
        }
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap_or(0);
            for (v, kind) in self.incident(u) {
                if filter.admits(kind) && dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Shortest edge-count distance, or `None` when `b` cannot be reached.
    pub fn hop_distance(&self, a: NeuronId, b: NeuronId, filter: EdgeFilter) -> Option<usize> {
        if !self.contains(a) || !self.contains(b) {
            return None;
        }
        if a == b {
            return Some(0);
        }
        let mut seen = vec![false; self.id_bound()];
        seen[a] = true;
        let mut frontier = vec![a];
        let mut hops = 0;
        while !frontier.is_empty() {
            hops += 1;
            let mut next = Vec::new();
            for u in frontier {
                for (v, kind) in self.incident(u) {
                    if !filter.admits(kind) || seen[v] {
                        continue;
                    }
                    if v == b {
                        return Some(hops);
                    }
                    seen[v] = true;
                    next.push(v);
                }
            }
            frontier = next;
        }
        None
    }

    /// Connected components, each sorted ascending, ordered by smallest member.
    pub fn connected_components(&self, filter: EdgeFilter) -> Vec<Vec<NeuronId>> {
        let mut seen = vec![false; self.id_bound()];
        let mut out = Vec::new();
        for start in self.ids() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut stack = vec![start];
            while let Some(u) = stack.pop() {
                for (v, kind) in self.incident(u) {
                    if filter.admits(kind) && !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                        stack.push(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn to_graph_file(&self) -> GraphFile {
        GraphFile {
            model: self.model,
            dim: self.dim,
            id_bound: self.id_bound(),
            neurons: self.neurons().cloned().collect(),
            edges: self.edges().collect(),
        }
    }

    pub fn from_graph_file(file: GraphFile) -> Result<Self, NetworkError> {
        let mut net = Self::new(file.dim, file.model);
        let bound = file.neurons.iter().map(|n| n.id + 1).max().unwrap_or(0).max(file.id_bound);
        net.neurons = vec![None; bound];
        net.adjacency = vec![BTreeSet::new(); bound];
        for n in file.neurons {
            if n.weight.len() != file.dim {
                return Err(NetworkError::Dimension { expected: file.dim, found: n.weight.len() });
            }
            if let Some(bad) = n.contexts.iter().find(|c| c.len() != file.dim) {
                return Err(NetworkError::Dimension { expected: file.dim, found: bad.len() });
            }
            let id = n.id;
            if net.neurons[id].replace(n).is_some() {
                return Err(NetworkError::Malformed(format!("duplicate neuron id {id}")));
            }
            net.live += 1;
        }
        for e in file.edges {
            if e.a == e.b {
                return Err(NetworkError::Malformed(format!("self loop on neuron {}", e.a)));
            }
            for end in [e.a, e.b] {
                if !net.contains(end) {
                    return Err(NetworkError::UnknownNeuron(end));
                }
            }
            net.insert_edge(e.a, e.b, e.kind, e.age);
        }
        Ok(net)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_graph_file()).expect("graph serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, NetworkError> {
        let file: GraphFile =
            serde_json::from_str(text).map_err(|e| NetworkError::Malformed(e.to_string()))?;
        Self::from_graph_file(file)
    }
}

/// On-disk graph layout: neurons `{id, weight, contexts?, error, grid_pos?}`
/// and edges `{a, b, age, kind}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub model: ModelTag,
    pub dim: usize,
    #[serde(default)]
    pub id_bound: usize,
    pub neurons: Vec<Neuron>,
    pub edges: Vec<Edge>,
}
