//! Wavefront planning on a learned network.
//!
//! The start and goal configurations snap to their nearest neurons
//! (Euclidean, contexts ignored). A breadth-first wave spreads from the goal
//! neuron, labelling each neuron with its hop count; the path then descends
//! from the start neuron, always stepping to the lowest-id neighbor whose
//! label is one smaller.

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::JointConfig;
use crate::kinematics::ArmModel;
use crate::models::DistanceMetric;
use crate::network::{EdgeFilter, Network, NeuronId};
use crate::reduction::chebyshev;

#[derive(Debug, Error, PartialEq)]
pub enum PlanError {
    #[error("network has no neurons")]
    EmptyNetwork,
    #[error("network dimension is {0}, planning needs 6 joint angles")]
    Dimension(usize),
    #[error(
        "no path: start neuron {start} lies in component {start_component}, goal neuron {goal} in component {goal_component}"
    )]
    NoPath { start: NeuronId, goal: NeuronId, start_component: usize, goal_component: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanOptions {
    /// Which edges the wave may cross.
    pub filter: EdgeFilter,
    /// Arm used for the Cartesian path length.
    pub arm: ArmModel,
}

impl Default for PlanOptions {
    fn default() -> Self {
        Self { filter: EdgeFilter::All, arm: ArmModel::ur3() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathStats {
    /// Neurons on the path.
    pub resolution: usize,
    /// Largest Chebyshev step between consecutive waypoints (degrees).
    pub max_jump: f64,
    /// End-effector polyline length through the waypoints (meters).
    pub cartesian_length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanResult {
    pub neuron_path: Vec<NeuronId>,
    /// Start configuration, the neuron weights along the path, goal configuration.
    pub waypoints: Vec<JointConfig>,
    pub stats: PathStats,
}

impl PlanResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan serializes")
    }

    /// Writes the waypoints as `j1..j6` rows.
    pub fn write_waypoints_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "j1,j2,j3,j4,j5,j6")?;
        for w in &self.waypoints {
            let row: Vec<String> = w.0.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

pub fn plan(net: &Network, start: &JointConfig, goal: &JointConfig, opts: &PlanOptions) -> Result<PlanResult, PlanError> {
    if net.dim() != crate::DOF {
        return Err(PlanError::Dimension(net.dim()));
    }
    let s = net.nearest(start.as_slice(), DistanceMetric::Euclid).ok_or(PlanError::EmptyNetwork)?;
    let g = net.nearest(goal.as_slice(), DistanceMetric::Euclid).ok_or(PlanError::EmptyNetwork)?;

    let wave = net.bfs_hops(g, opts.filter);
    let Some(mut label) = wave[s] else {
        let comps = net.connected_components(opts.filter);
        let find = |id| comps.iter().position(|c| c.binary_search(&id).is_ok()).expect("every neuron has a component");
        return Err(PlanError::NoPath { start: s, goal: g, start_component: find(s), goal_component: find(g) });
    };

    let mut path = vec![s];
    let mut at = s;
    while label > 0 {
        at = net
            .incident(at)
            .filter(|&(v, kind)| opts.filter.admits(kind) && wave[v] == Some(label - 1))
            .map(|(v, _)| v)
            .min()
            .expect("a BFS label always has a predecessor");
        label -= 1;
        path.push(at);
    }

    let mut waypoints = Vec::with_capacity(path.len() + 2);
    waypoints.push(*start);
    waypoints.extend(path.iter().map(|&id| JointConfig::from_slice(net.weight(id)).expect("six angles")));
    waypoints.push(*goal);
    let mut result = PlanResult {
        neuron_path: path,
        waypoints,
        stats: PathStats { resolution: 0, max_jump: 0.0, cartesian_length: 0.0 },
    };
    result.stats = path_stats(&result, &opts.arm);
    Ok(result)
}

pub fn path_stats(result: &PlanResult, arm: &ArmModel) -> PathStats {
    let mut max_jump: f64 = 0.0;
    let mut length = 0.0;
    for pair in result.waypoints.windows(2) {
        max_jump = max_jump.max(chebyshev(pair[0].as_slice(), pair[1].as_slice()).expect("same dimension"));
        length += (arm.fk(&pair[1]).position - arm.fk(&pair[0]).position).norm();
    }
    PathStats { resolution: result.neuron_path.len(), max_jump, cartesian_length: length }
}
