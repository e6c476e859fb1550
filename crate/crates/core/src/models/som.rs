//! Lattice models: SOM, MSOM and γ-SOM.
//!
//! Neuron `r * cols + c` sits at lattice position `(r, c)`; the lattice edges
//! are the fixed 4-neighborhood. Width and learning rate decay as
//! `σ(t) = σ₀·exp(−t/T)` and `η(t) = η₀·exp(−t/T)` over the `T` presentations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::Dataset;
use crate::network::{EdgeKind, Network, NeuronId};

use super::context::{adapt, GammaContext, MergeContext, NoContext, TemporalContext};
use super::{ensure_data, ModelError, ModelTag, SomParams, StepEvent, TrainObserver};

/// Neighborhood factors below this are treated as zero.
const NEIGHBORHOOD_FLOOR: f64 = 1e-12;

pub fn train_som(data: &Dataset, p: &SomParams, seed: u64) -> Result<Network, ModelError> {
    train_som_observed(data, p, seed, &mut ())
}

pub fn train_som_observed<O: TrainObserver>(
    data: &Dataset,
    p: &SomParams,
    seed: u64,
    obs: &mut O,
) -> Result<Network, ModelError> {
    if p.depth != 0 {
        return Err(ModelError::InvalidParam { field: "depth", reason: "plain SOM has no context".into() });
    }
    train_lattice(data, p, NoContext, ModelTag::Som, seed, obs)
}

/// Merge SOM: one merge context per neuron. `p.depth` is ignored.
pub fn train_msom(data: &Dataset, p: &SomParams, seed: u64) -> Result<Network, ModelError> {
    train_msom_observed(data, p, seed, &mut ())
}

pub fn train_msom_observed<O: TrainObserver>(
    data: &Dataset,
    p: &SomParams,
    seed: u64,
    obs: &mut O,
) -> Result<Network, ModelError> {
    let ctx = MergeContext::new(p.alpha, p.beta, crate::DOF);
    train_lattice(data, p, ctx, ModelTag::Msom, seed, obs)
}

pub fn train_gamma_som(data: &Dataset, p: &SomParams, seed: u64) -> Result<Network, ModelError> {
    train_gamma_som_observed(data, p, seed, &mut ())
}

pub fn train_gamma_som_observed<O: TrainObserver>(
    data: &Dataset,
    p: &SomParams,
    seed: u64,
    obs: &mut O,
) -> Result<Network, ModelError> {
    if p.depth == 0 {
        return Err(ModelError::InvalidParam { field: "depth", reason: "γ-SOM needs depth ≥ 1".into() });
    }
    let ctx = GammaContext::new(p.alpha, p.beta, p.depth, crate::DOF);
    train_lattice(data, p, ctx, ModelTag::GammaSom, seed, obs)
}

fn init_lattice<R: Rng>(data: &Dataset, p: &SomParams, depth: usize, tag: ModelTag, rng: &mut R) -> Network {
    let (lo, hi) = data.bounding_box().expect("non-empty dataset");
    let mut net = Network::new(crate::DOF, tag);
    for r in 0..p.rows {
        for c in 0..p.cols {
            let weight: Vec<f64> = lo
                .iter()
                .zip(&hi)
                .map(|(&l, &h)| if l < h { rng.gen_range(l..=h) } else { l })
                .collect();
            let contexts = vec![weight.clone(); depth];
            let id = net.add_neuron(weight, contexts);
            if let Some(n) = net.neuron_mut(id) {
                n.grid_pos = Some((r, c));
            }
        }
    }
    for r in 0..p.rows {
        for c in 0..p.cols {
            let id = r * p.cols + c;
            if c + 1 < p.cols {
                net.refresh_edge(id, id + 1, EdgeKind::Lattice);
            }
            if r + 1 < p.rows {
                net.refresh_edge(id, id + p.cols, EdgeKind::Lattice);
            }
        }
    }
    net
}

fn train_lattice<C: TemporalContext, O: TrainObserver>(
    data: &Dataset,
    p: &SomParams,
    mut ctx: C,
    tag: ModelTag,
    seed: u64,
    obs: &mut O,
) -> Result<Network, ModelError> {
    p.validate()?;
    ensure_data(data)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut net = init_lattice(data, p, ctx.depth(), tag, &mut rng);

    let total = (p.runs * data.total_samples()) as f64;
    let reach = (2.0 * (1.0 / NEIGHBORHOOD_FLOOR).ln()).sqrt();
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

                let mut winner = 0;
                let mut best = f64::INFINITY;
                for n in net.neurons() {
                    let d = ctx.distance(p.metric, x, n);
                    if d < best {
                        best = d;
                        winner = n.id;
                    }
                }

                let decay = (-(step as f64) / total).exp();
                let sigma = p.sigma * decay;
                let eta = p.eta * decay;
                let (wr, wc) = (winner / p.cols, winner % p.cols);
                let radius = (sigma * reach).ceil() as usize;
                let two_sigma_sq = 2.0 * sigma * sigma;
                for r in wr.saturating_sub(radius)..=(wr + radius).min(p.rows - 1) {
                    for c in wc.saturating_sub(radius)..=(wc + radius).min(p.cols - 1) {
                        let dr = r as f64 - wr as f64;
                        let dc = c as f64 - wc as f64;
                        let h = (-(dr * dr + dc * dc) / two_sigma_sq).exp();
                        if h < NEIGHBORHOOD_FLOOR {
                            continue;
                        }
                        if let Some(n) = net.neuron_mut(r * p.cols + c) {
                            adapt(n, x, ctx.descriptors(), eta * h);
                        }
                    }
                }

                obs.on_step(&StepEvent { step, winner, runner_up: None }, &net);
                prev = Some(winner);
                step += 1;
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

    fn ring_dataset() -> Dataset {
        let trajs = (0..4)
            .map(|k| {
                let samples = (0..40)
                    .map(|i| {
                        let t = (k * 40 + i) as f64 / 160.0 * std::f64::consts::TAU;
                        JointConfig([50.0 * t.cos(), 50.0 * t.sin(), 0.0, 0.0, 0.0, 0.0])
                    })
                    .collect();
                Trajectory::new(format!("r{k}"), samples, TrajectorySource::Synthetic).unwrap()
            })
            .collect();
        Dataset::new(trajs)
    }

    fn small(rows: usize, cols: usize) -> SomParams {
        SomParams { rows, cols, sigma: 2.0, eta: 0.3, runs: 3, ..Default::default() }
    }

    #[test]
    fn single_neuron_stays_inside_the_ring() {
        let data = ring_dataset();
        let net = train_som(&data, &small(1, 1), 1).unwrap();
        let w = net.weight(0);
        // convex updates keep the weight inside the convex hull of the data
        assert!(w[0].hypot(w[1]) < 50.0, "{w:?}");
    }

    #[test]
    fn tiny_sigma_moves_only_the_winner() {
        let data = ring_dataset();
        let p = SomParams { sigma: 1e-6, runs: 1, ..small(3, 3) };
        let before = init_lattice(&data, &p, 0, ModelTag::Som, &mut ChaCha8Rng::seed_from_u64(4));
        let mut moved_other = false;
        let mut last = before.clone();
        let mut obs = |e: &StepEvent, net: &Network| {
            for n in net.neurons() {
                if n.id != e.winner && n.weight != last.weight(n.id) {
                    moved_other = true;
                }
            }
            last = net.clone();
        };
        train_som_observed(&data, &p, 4, &mut obs).unwrap();
        assert!(!moved_other);
    }

    #[test]
    fn lattice_shape_and_edges() {
        let net = train_som(&ring_dataset(), &small(4, 5), 2).unwrap();
        assert_eq!(net.len(), 20);
        // 4·4 horizontal + 3·5 vertical
        assert_eq!(net.edge_count(), 31);
        assert!(net.edges().all(|e| e.kind == EdgeKind::Lattice));
        assert_eq!(net.neuron(7).unwrap().grid_pos, Some((1, 2)));
    }

    #[test]
    fn zero_alpha_msom_follows_som_winners() {
        let data = ring_dataset();
        let p = SomParams { alpha: 0.0, ..small(5, 5) };
        let mut som = WinnerTrace::default();
        let mut msom = WinnerTrace::default();
        train_som_observed(&data, &p, 9, &mut som).unwrap();
        train_msom_observed(&data, &p, 9, &mut msom).unwrap();
        assert_eq!(som, msom);
    }

    #[test]
    fn depth_checks() {
        let data = ring_dataset();
        let p = SomParams { depth: 2, ..small(2, 2) };
        assert!(train_som(&data, &p, 0).is_err());
        let p = SomParams { depth: 0, ..small(2, 2) };
        assert!(train_gamma_som(&data, &p, 0).is_err());
        assert_eq!(train_som(&Dataset::default(), &small(2, 2), 0), Err(ModelError::EmptyDataset));
    }
}
