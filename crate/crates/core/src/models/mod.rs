//! The seven trainers and their hyperparameters.
//!
//! | model    | topology            | temporal context     |
//! |----------|---------------------|----------------------|
//! | SOM      | fixed 2-D lattice   | none                 |
//! | MSOM     | fixed 2-D lattice   | single merge context |
//! | γ-SOM    | fixed 2-D lattice   | γ-memory of depth K  |
//! | GNG      | grown, aged edges   | none                 |
//! | MGNG     | grown, aged edges   | single merge context |
//! | γ-GNG    | grown, aged edges   | γ-memory of depth K  |
//! | SGNG     | grown segments      | temporal edges       |
//!
//! Every trainer is a pure function of `(data, params, seed)`.

mod context;
mod gng;
mod metric;
mod params;
mod sgng;
mod som;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use context::{GammaContext, MergeContext, NoContext, TemporalContext};
pub use gng::{train_gamma_gng, train_gamma_gng_observed, train_gng, train_gng_observed, train_mgng, train_mgng_observed};
pub use metric::DistanceMetric;
pub use params::{ContextParams, GngParams, SgngParams, SomParams};
pub use sgng::{best_matching_segments, build_portion, replay_assignments, segment_distance, train_sgng, train_sgng_observed, Portion, SegmentMatch};
pub use som::{train_gamma_som, train_gamma_som_observed, train_msom, train_msom_observed, train_som, train_som_observed};

use crate::dataset::Dataset;
use crate::network::{Network, NetworkError, NeuronId};

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParam { field: &'static str, reason: String },
    #[error(transparent)]
    Network(#[from] NetworkError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelTag {
    Gng,
    Mgng,
    GammaGng,
    Sgng,
    Som,
    Msom,
    GammaSom,
}

impl ModelTag {
    pub const ALL: [ModelTag; 7] = [
        ModelTag::Gng,
        ModelTag::Mgng,
        ModelTag::GammaGng,
        ModelTag::Sgng,
        ModelTag::Som,
        ModelTag::Msom,
        ModelTag::GammaSom,
    ];

    pub fn is_growing(self) -> bool {
        matches!(self, Self::Gng | Self::Mgng | Self::GammaGng | Self::Sgng)
    }

    pub fn is_lattice(self) -> bool {
        !self.is_growing()
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Gng => "gng",
            Self::Mgng => "mgng",
            Self::GammaGng => "gamma_gng",
            Self::Sgng => "sgng",
            Self::Som => "som",
            Self::Msom => "msom",
            Self::GammaSom => "gamma_som",
        }
    }

    /// Label used in comparison tables.
    pub fn label(self) -> &'static str {
        match self {
            Self::Gng => "GNG",
            Self::Mgng => "MGNG",
            Self::GammaGng => "γ-GNG",
            Self::Sgng => "SGNG",
            Self::Som => "SOM",
            Self::Msom => "MSOM",
            Self::GammaSom => "γ-SOM",
        }
    }
}

impl std::fmt::Display for ModelTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ModelTag {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown model `{s}`"))
    }
}

/// One training presentation, reported to a [`TrainObserver`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepEvent {
    /// Zero-based presentation index.
    pub step: usize,
    /// Winning neuron (for SGNG: the segment end matched to the portion start).
    pub winner: NeuronId,
    pub runner_up: Option<NeuronId>,
}

/// Hook called after every completed training step.
pub trait TrainObserver {
    fn on_step(&mut self, _event: &StepEvent, _net: &Network) {}
}

impl TrainObserver for () {}

/// Records the winner sequence of a run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WinnerTrace {
    pub steps: Vec<(NeuronId, Option<NeuronId>)>,
}

impl TrainObserver for WinnerTrace {
    fn on_step(&mut self, event: &StepEvent, _net: &Network) {
        self.steps.push((event.winner, event.runner_up));
    }
}

impl<F: FnMut(&StepEvent, &Network)> TrainObserver for F {
    fn on_step(&mut self, event: &StepEvent, net: &Network) {
        self(event, net)
    }
}

/// A model together with its parameters, as selected by an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    Som(SomParams),
    Msom(SomParams),
    GammaSom(SomParams),
    Gng(GngParams),
    Mgng {
        #[serde(flatten)]
        gng: GngParams,
        #[serde(default)]
        context: ContextParams,
    },
    GammaGng {
        #[serde(flatten)]
        gng: GngParams,
        #[serde(default)]
        context: ContextParams,
    },
    Sgng(SgngParams),
}

impl ModelSpec {
    pub fn tag(&self) -> ModelTag {
        match self {
            Self::Som(_) => ModelTag::Som,
            Self::Msom(_) => ModelTag::Msom,
            Self::GammaSom(_) => ModelTag::GammaSom,
            Self::Gng(_) => ModelTag::Gng,
            Self::Mgng { .. } => ModelTag::Mgng,
            Self::GammaGng { .. } => ModelTag::GammaGng,
            Self::Sgng(_) => ModelTag::Sgng,
        }
    }

    pub fn metric(&self) -> DistanceMetric {
        match self {
            Self::Som(p) | Self::Msom(p) | Self::GammaSom(p) => p.metric,
            Self::Gng(p) | Self::Mgng { gng: p, .. } | Self::GammaGng { gng: p, .. } => p.metric,
            Self::Sgng(p) => p.gng.metric,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        match self {
            Self::Som(p) => {
                p.validate()?;
                if p.depth != 0 {
                    return Err(ModelError::InvalidParam { field: "depth", reason: "plain SOM has no context".into() });
                }
                Ok(())
            }
            Self::Msom(p) => p.validate(),
            Self::GammaSom(p) => {
                p.validate()?;
                if p.depth == 0 {
                    return Err(ModelError::InvalidParam { field: "depth", reason: "γ-SOM needs depth ≥ 1".into() });
                }
                Ok(())
            }
            Self::Gng(p) => p.validate(),
            Self::Mgng { gng, context } => {
                gng.validate()?;
                context.validate()
            }
            Self::GammaGng { gng, context } => {
                gng.validate()?;
                context.validate()?;
                if context.depth == 0 {
                    return Err(ModelError::InvalidParam { field: "context.depth", reason: "γ-GNG needs depth ≥ 1".into() });
                }
                Ok(())
            }
            Self::Sgng(p) => p.validate(),
        }
    }

    pub fn train(&self, data: &Dataset, seed: u64) -> Result<Network, ModelError> {
        self.train_observed(data, seed, &mut ())
    }

    pub fn train_observed<O: TrainObserver>(
        &self,
        data: &Dataset,
        seed: u64,
        obs: &mut O,
    ) -> Result<Network, ModelError> {
        match self {
            Self::Som(p) => train_som_observed(data, p, seed, obs),
            Self::Msom(p) => train_msom_observed(data, p, seed, obs),
            Self::GammaSom(p) => train_gamma_som_observed(data, p, seed, obs),
            Self::Gng(p) => train_gng_observed(data, p, seed, obs),
            Self::Mgng { gng, context } => train_mgng_observed(data, gng, context, seed, obs),
            Self::GammaGng { gng, context } => train_gamma_gng_observed(data, gng, context, seed, obs),
            Self::Sgng(p) => train_sgng_observed(data, p, seed, obs),
        }
    }
}

pub(crate) fn ensure_data(data: &Dataset) -> Result<(), ModelError> {
    if data.is_empty() {
        Err(ModelError::EmptyDataset)
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tag_names_round_trip() {
        for tag in ModelTag::ALL {
            assert_eq!(tag.name().parse::<ModelTag>(), Ok(tag));
        }
        assert!("ng".parse::<ModelTag>().is_err());
    }

    #[test]
    fn spec_parses_from_json() {
        let spec: ModelSpec = serde_json::from_str(
            r#"{"kind":"mgng","runs":2,"metric":"euclid_plus_cos","context":{"alpha":0.1}}"#,
        )
        .unwrap();
        match &spec {
            ModelSpec::Mgng { gng, context } => {
                assert_eq!(gng.runs, 2);
                assert_eq!(gng.metric, DistanceMetric::EuclidPlusCos);
                assert_eq!(context.alpha, 0.1);
                assert_eq!(context.beta, 0.7);
            }
            other => panic!("{other:?}"),
        }
        spec.validate().unwrap();
    }
}
