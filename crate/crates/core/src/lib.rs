//! Self-organizing neural networks for reducing a robot's configuration space.
//!
//! Joint-space trajectories are quantized by one of seven self-organizing
//! models (SOM, MSOM, γ-SOM, GNG, MGNG, γ-GNG, SGNG). The learned graph can be
//! pruned of over-long connections and then searched with a wavefront
//! (breadth-first) planner to produce new joint-space paths.
//!
//! ```no_run
//! use sonn_core::dataset::{generate_synthetic, SyntheticSpec};
//! use sonn_core::models::{train_gng, GngParams};
//! use sonn_core::planner::{plan, PlanOptions};
//! use sonn_core::reduction::reduce_connections;
//!
//! let data = generate_synthetic(&SyntheticSpec::default(), 7).unwrap();
//! let net = train_gng(&data, &GngParams::default(), 7).unwrap();
//! let (reduced, _removed) = reduce_connections(&net, 10.0);
//! let start = data.trajectories[0].samples[0];
//! let goal = data.trajectories[1].samples[0];
//! let result = plan(&reduced, &start, &goal, &PlanOptions::default());
//! ```

pub mod dataset;
pub mod kinematics;
pub mod metrics;
pub mod models;
pub mod network;
pub mod planner;
pub mod reduction;

pub use dataset::{Dataset, JointConfig, Trajectory};
pub use models::{DistanceMetric, GngParams, ModelTag, SgngParams, SomParams};
pub use network::{Network, NeuronId};

/// Number of joints of the arms this crate targets.
pub const DOF: usize = 6;
