//! Growing models: GNG, MGNG and γ-GNG.
//!
//! Per presentation: pick winner and runner-up (skipping recently blocked
//! winners), age the winner's edges, accumulate its error, move it and its
//! neighbors toward the input, refresh the winner/runner-up edge and drop
//! stale edges. Every `lambda` presentations a neuron is inserted between the
//! neuron with the largest error and its worst neighbor. All errors then
//! decay by `zeta`.

use std::collections::VecDeque;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::Dataset;
use crate::network::{EdgeFilter, EdgeKind, Network, NetworkError, NeuronId};

use super::context::{adapt, GammaContext, MergeContext, NoContext, TemporalContext};
use super::{ensure_data, ContextParams, GngParams, ModelError, ModelTag, StepEvent, TrainObserver};

pub fn train_gng(data: &Dataset, p: &GngParams, seed: u64) -> Result<Network, ModelError> {
    train_gng_observed(data, p, seed, &mut ())
}

pub fn train_gng_observed<O: TrainObserver>(
    data: &Dataset,
    p: &GngParams,
    seed: u64,
    obs: &mut O,
) -> Result<Network, ModelError> {
    train_growing(data, p, NoContext, ModelTag::Gng, seed, obs)
}

/// Merge GNG; `context.depth` is ignored.
pub fn train_mgng(data: &Dataset, p: &GngParams, context: &ContextParams, seed: u64) -> Result<Network, ModelError> {
    train_mgng_observed(data, p, context, seed, &mut ())
}

pub fn train_mgng_observed<O: TrainObserver>(
    data: &Dataset,
    p: &GngParams,
    context: &ContextParams,
    seed: u64,
    obs: &mut O,
) -> Result<Network, ModelError> {
    context.validate()?;
    let ctx = MergeContext::new(context.alpha, context.beta, crate::DOF);
    train_growing(data, p, ctx, ModelTag::Mgng, seed, obs)
}

pub fn train_gamma_gng(
    data: &Dataset,
    p: &GngParams,
    context: &ContextParams,
    seed: u64,
) -> Result<Network, ModelError> {
    train_gamma_gng_observed(data, p, context, seed, &mut ())
}

pub fn train_gamma_gng_observed<O: TrainObserver>(
    data: &Dataset,
    p: &GngParams,
    context: &ContextParams,
    seed: u64,
    obs: &mut O,
) -> Result<Network, ModelError> {
    context.validate()?;
    if context.depth == 0 {
        return Err(ModelError::InvalidParam { field: "depth", reason: "γ-GNG needs depth ≥ 1".into() });
    }
    let ctx = GammaContext::new(context.alpha, context.beta, context.depth, crate::DOF);
    train_growing(data, p, ctx, ModelTag::GammaGng, seed, obs)
}

/// Places `count` neurons on distinct random samples.
pub(crate) fn seed_neurons(
    data: &Dataset,
    count: usize,
    depth: usize,
    tag: ModelTag,
    rng: &mut ChaCha8Rng,
) -> Result<Network, ModelError> {
    let flat: Vec<&[f64]> = data.samples().map(|s| s.as_slice()).collect();
    if flat.len() < count {
        return Err(ModelError::InvalidParam {
            field: "start_size",
            reason: format!("dataset has only {} samples", flat.len()),
        });
    }
    let mut net = Network::new(crate::DOF, tag);
    for i in rand::seq::index::sample(rng, flat.len(), count).into_iter() {
        let w = flat[i].to_vec();
        net.add_neuron(w.clone(), vec![w; depth]);
    }
    Ok(net)
}

/// Inserts a neuron halfway between the largest-error neuron and its
/// largest-error topological neighbor. Returns the new id, if any.
pub(crate) fn insert_neuron(net: &mut Network, delta: f64) -> Option<NeuronId> {
    let mut q: Option<(f64, NeuronId)> = None;
    for n in net.neurons() {
        if q.is_none_or(|(e, _)| n.error > e) {
            q = Some((n.error, n.id));
        }
    }
    let (_, q) = q?;
    let mut f: Option<(f64, NeuronId)> = None;
    for nb in net.neighbors_filtered(q, EdgeFilter::ExcludeTemporal) {
        let e = net.neuron(nb)?.error;
        if f.is_none_or(|(fe, _)| e > fe) {
            f = Some((e, nb));
        }
    }
    let (_, f) = f?;

    let (nq, nf) = (net.neuron(q)?, net.neuron(f)?);
    let weight: Vec<f64> = nq.weight.iter().zip(&nf.weight).map(|(a, b)| 0.5 * (a + b)).collect();
    let contexts: Vec<Vec<f64>> = nq
        .contexts
        .iter()
        .zip(&nf.contexts)
        .map(|(ca, cb)| ca.iter().zip(cb).map(|(a, b)| 0.5 * (a + b)).collect())
        .collect();

    let r = net.add_neuron(weight, contexts);
    net.remove_edge(q, f, EdgeKind::Topological);
    net.refresh_edge(q, r, EdgeKind::Topological);
    net.refresh_edge(r, f, EdgeKind::Topological);
    let eq = {
        let n = net.neuron_mut(q)?;
        n.error *= delta;
        n.error
    };
    net.neuron_mut(f)?.error *= delta;
    net.neuron_mut(r)?.error = eq;
    Some(r)
}

pub(crate) fn decay_errors(net: &mut Network, zeta: f64) {
    for n in net.neurons_mut() {
        n.error *= zeta;
    }
}

/// Keeps the last `len` winners out of selection.
#[derive(Debug, Clone)]
pub(crate) struct BlockList<T> {
    len: usize,
    recent: VecDeque<T>,
}

impl<T: Copy + PartialEq> BlockList<T> {
    pub(crate) fn new(len: usize) -> Self {
        Self { len, recent: VecDeque::with_capacity(len + 1) }
    }

    pub(crate) fn push(&mut self, item: T) {
        if self.len == 0 {
            return;
        }
        self.recent.push_back(item);
        while self.recent.len() > self.len {
            self.recent.pop_front();
        }
    }

    pub(crate) fn as_slice(&mut self) -> &[T] {
        self.recent.make_contiguous()
    }
}

fn train_growing<C: TemporalContext, O: TrainObserver>(
    data: &Dataset,
    p: &GngParams,
    mut ctx: C,
    tag: ModelTag,
    seed: u64,
    obs: &mut O,
) -> Result<Network, ModelError> {
    p.validate()?;
    ensure_data(data)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut net = seed_neurons(data, p.start_size, ctx.depth(), tag, &mut rng)?;
    let mut blocked = BlockList::new(p.blocked_steps);
    let mut step = 0usize;

    for _ in 0..p.runs {
        for ti in data.epoch_order(&mut rng) {
            let mut prev: Option<NeuronId> = None;
            for x in &data.trajectories[ti].samples {
                let x = x.as_slice();
                match prev.and_then(|id| net.neuron(id)) {
                    Some(b) => ctx.advance(b),
                    None => ctx.reset(x),
                }

                let metric = p.metric;
                let pick = net.bmu_by(blocked.as_slice(), |n| ctx.distance(metric, x, n));
                let (s1, s2) = match pick {
                    Ok(pair) => pair,
                    // too few neurons left to honor the block list
                    Err(NetworkError::Insufficient { .. }) => net.bmu_by(&[], |n| ctx.distance(metric, x, n))?,
                    Err(e) => return Err(e.into()),
                };

                net.age_edges(s1);
                let err = ctx.distance(metric, x, net.neuron(s1).expect("winner exists"));
                {
                    let n = net.neuron_mut(s1).expect("winner exists");
                    n.error += err;
                    adapt(n, x, ctx.descriptors(), p.eta_bmu);
                }
                for nb in net.neighbors_filtered(s1, EdgeFilter::ExcludeTemporal) {
                    if let Some(n) = net.neuron_mut(nb) {
                        adapt(n, x, ctx.descriptors(), p.eta_n);
                    }
                }
                net.refresh_edge(s1, s2, EdgeKind::Topological);
                net.prune_stale(p.epsilon_age);

                step += 1;
                if step.is_multiple_of(p.lambda) && net.len() < p.max_neurons {
                    insert_neuron(&mut net, p.delta);
                }
                decay_errors(&mut net, p.zeta);

                blocked.push(s1);
                prev = Some(s1);
                obs.on_step(&StepEvent { step: step - 1, winner: s1, runner_up: Some(s2) }, &net);
            }
        }
    }
    Ok(net)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{JointConfig, Trajectory, TrajectorySource};
    use crate::models::WinnerTrace;

    fn spiral(n: usize) -> Dataset {
        let samples = (0..n)
            .map(|i| {
                let t = i as f64 / n as f64 * 4.0 * std::f64::consts::PI;
                JointConfig([20.0 * t.cos(), 20.0 * t.sin(), 5.0 * t, 0.0, 0.0, 0.0])
            })
            .collect();
        Dataset::new(vec![Trajectory::new("s", samples, TrajectorySource::Synthetic).unwrap()])
    }

    #[test]
    fn blocked_winner_is_not_reselected() {
        let data = spiral(200);
        let p = GngParams { blocked_steps: 2, runs: 2, ..Default::default() };
        let mut trace = WinnerTrace::default();
        train_gng_observed(&data, &p, 3, &mut trace).unwrap();
        let winners: Vec<_> = trace.steps.iter().map(|s| s.0).collect();
        for w in winners.windows(3) {
            assert!(w[2] != w[1] && w[2] != w[0], "{w:?}");
        }
    }

    #[test]
    fn zero_alpha_context_models_follow_gng() {
        let data = spiral(150);
        let p = GngParams { runs: 2, ..Default::default() };
        let ctx = ContextParams { alpha: 0.0, beta: 0.7, depth: 3 };
        let mut base = WinnerTrace::default();
        let mut merge = WinnerTrace::default();
        let mut gamma = WinnerTrace::default();
        train_gng_observed(&data, &p, 5, &mut base).unwrap();
        train_mgng_observed(&data, &p, &ctx, 5, &mut merge).unwrap();
        train_gamma_gng_observed(&data, &p, &ctx, 5, &mut gamma).unwrap();
        assert_eq!(base, merge);
        assert_eq!(base, gamma);
    }

    #[test]
    fn insertion_splits_worst_edge() {
        let mut net = Network::new(1, ModelTag::Gng);
        for w in [0.0, 10.0, 30.0] {
            net.add_neuron(vec![w], vec![]);
        }
        net.refresh_edge(0, 1, EdgeKind::Topological);
        net.refresh_edge(1, 2, EdgeKind::Topological);
        net.neuron_mut(1).unwrap().error = 4.0;
        net.neuron_mut(2).unwrap().error = 2.0;
        let r = insert_neuron(&mut net, 0.5).unwrap();
        assert_eq!(net.weight(r), &[20.0]);
        assert!(!net.has_edge(1, 2, EdgeKind::Topological));
        assert!(net.has_edge(1, r, EdgeKind::Topological) && net.has_edge(r, 2, EdgeKind::Topological));
        assert_eq!(net.neuron(1).unwrap().error, 2.0);
        assert_eq!(net.neuron(2).unwrap().error, 1.0);
        assert_eq!(net.neuron(r).unwrap().error, 2.0);
    }

    #[test]
    fn empty_dataset_is_an_error() {
        assert_eq!(train_gng(&Dataset::default(), &GngParams::default(), 0), Err(ModelError::EmptyDataset));
    }
}
