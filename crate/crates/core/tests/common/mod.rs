#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sonn_core::dataset::{Dataset, JointConfig, Trajectory, TrajectorySource};
use sonn_core::network::{EdgeKind, Network};
use sonn_core::ModelTag;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_config(rng: &mut ChaCha8Rng, span: f64) -> JointConfig {
    let mut q = [0.0; 6];
    for v in &mut q {
        *v = rng.gen_range(-span..span);
    }
    JointConfig(q)
}

/// `n` neurons with random weights and `m` random edges of random kinds;
/// parallel edges of different kinds are allowed.
pub fn random_graph(seed: u64, n: usize, m: usize, span: f64) -> Network {
    let mut r = rng(seed);
    let mut net = Network::new(6, ModelTag::Gng);
    for _ in 0..n {
        net.add_neuron(random_config(&mut r, span).0.to_vec(), vec![]);
    }
    let kinds = [EdgeKind::Topological, EdgeKind::Temporal];
    for _ in 0..m {
        let a = r.gen_range(0..n);
        let b = r.gen_range(0..n);
        if a != b {
            net.refresh_edge(a, b, kinds[r.gen_range(0..2)]);
        }
    }
    net
}

pub fn random_dataset(seed: u64, trajectories: usize, len: usize, span: f64) -> Dataset {
    let mut r = rng(seed);
    let trajs = (0..trajectories)
        .map(|k| {
            let samples = (0..len).map(|_| random_config(&mut r, span)).collect();
            Trajectory::new(format!("t{k}"), samples, TrajectorySource::Synthetic).unwrap()
        })
        .collect();
    Dataset::new(trajs)
}

/// 3-D spiral embedded in the first three joints, split into trajectories.
pub fn spiral(trajectories: usize, len: usize) -> Dataset {
    let total = (trajectories * len) as f64;
    let trajs = (0..trajectories)
        .map(|k| {
            let samples = (0..len)
                .map(|i| {
                    let t = (k * len + i) as f64 / total * 4.0 * std::f64::consts::PI;
                    JointConfig([40.0 * t.cos(), 40.0 * t.sin(), 8.0 * t, 0.0, 0.0, 0.0])
                })
                .collect();
            Trajectory::new(format!("s{k}"), samples, TrajectorySource::Synthetic).unwrap()
        })
        .collect();
    Dataset::new(trajs)
}

/// Undirected multigraph as an edge list over dense indices.
pub struct EdgeList {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl EdgeList {
    pub fn from_network(net: &Network) -> (Self, Vec<usize>) {
        let ids: Vec<usize> = net.ids().collect();
        let mut index = vec![usize::MAX; net.id_bound()];
        for (i, &id) in ids.iter().enumerate() {
            index[id] = i;
        }
        let edges = net.edges().map(|e| (index[e.a], index[e.b])).collect();
        (Self { n: ids.len(), edges }, ids)
    }
}

pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut x = x;
        while self.parent[x] != r {
            let next = self.parent[x];
            self.parent[x] = r;
            x = next;
        }
        r
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Unit-weight Dijkstra from `s` with a linear-scan priority selection.
pub fn dijkstra(g: &EdgeList, s: usize) -> Vec<Option<usize>> {
    let mut adj = vec![Vec::new(); g.n];
    for &(a, b) in &g.edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut dist: Vec<Option<usize>> = vec![None; g.n];
    let mut done = vec![false; g.n];
    dist[s] = Some(0);
    loop {
        let mut pick: Option<usize> = None;
        for v in 0..g.n {
            if !done[v] && dist[v].is_some() && pick.is_none_or(|p| dist[v] < dist[p]) {
                pick = Some(v);
            }
        }
        let Some(u) = pick else { break };
        done[u] = true;
        let du = dist[u].unwrap();
        for &v in &adj[u] {
            if dist[v].is_none_or(|dv| du + 1 < dv) {
                dist[v] = Some(du + 1);
            }
        }
    }
    dist
}

/// Tarjan's bridge finding on a multigraph; returns a flag per edge.
pub fn bridges(g: &EdgeList) -> Vec<bool> {
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); g.n];
    for (i, &(a, b)) in g.edges.iter().enumerate() {
        adj[a].push((b, i));
        adj[b].push((a, i));
    }
    let mut disc = vec![usize::MAX; g.n];
    let mut low = vec![0; g.n];
    let mut is_bridge = vec![false; g.edges.len()];
    let mut timer = 0;
    for root in 0..g.n {
        if disc[root] != usize::MAX {
            continue;
        }
        // iterative DFS: (vertex, edge used to enter, next adjacency index)
        let mut stack = vec![(root, usize::MAX, 0usize)];
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        while let Some(&mut (u, via, ref mut next)) = stack.last_mut() {
            if *next < adj[u].len() {
                let (v, e) = adj[u][*next];
                *next += 1;
                if e == via {
                    continue;
                }
                if disc[v] == usize::MAX {
                    disc[v] = timer;
                    low[v] = timer;
                    timer += 1;
                    stack.push((v, e, 0));
                } else {
                    low[u] = low[u].min(disc[v]);
                }
            } else {
                stack.pop();
                if let Some(&(p, _, _)) = stack.last() {
                    low[p] = low[p].min(low[u]);
                    if low[u] > disc[p] {
                        is_bridge[via] = true;
                    }
                }
            }
        }
    }
    is_bridge
}
