mod common;

use common::*;
use rand::Rng;
use sonn_core::dataset::{generate_synthetic, Dataset, JointConfig, PresentationOrder, SyntheticSpec, Trajectory, TrajectorySource};
use sonn_core::metrics::quantization_error;
use sonn_core::models::*;
use sonn_core::network::{EdgeKind, Network, Neuron};

/// Neuron states after every step.
#[derive(Default)]
struct Snapshots(Vec<Vec<Neuron>>);

impl TrainObserver for Snapshots {
    fn on_step(&mut self, _: &StepEvent, net: &Network) {
        self.0.push(net.neurons().cloned().collect());
    }
}

fn snapshots<F>(train: F) -> Vec<Vec<Neuron>>
where
    F: FnOnce(&mut Snapshots) -> Result<Network, ModelError>,
{
    let mut obs = Snapshots::default();
    train(&mut obs).unwrap();
    obs.0
}

#[test]
fn gng_grows_by_one_neuron_per_lambda() {
    let data = spiral(1, 100);
    let p = GngParams { runs: 1, epsilon_age: 1_000_000, ..Default::default() };
    let net = train_gng(&data, &p, 1).unwrap();
    assert_eq!(net.len(), 4 + 100 / 20);
    assert_eq!(net.id_bound(), net.len());

    let p = GngParams { runs: 3, epsilon_age: 1_000_000, max_neurons: 15, ..Default::default() };
    assert_eq!(train_gng(&data, &p, 1).unwrap().len(), 15);
    let p = GngParams { runs: 3, epsilon_age: 1_000_000, ..Default::default() };
    let ctx = ContextParams { depth: 2, ..Default::default() };
    assert_eq!(train_gamma_gng(&data, &p, &ctx, 1).unwrap().len(), 4 + 300 / 20);
}

#[test]
fn gamma_som_depth_one_is_msom_at_every_step() {
    let data = spiral(3, 30);
    let p = SomParams { rows: 6, cols: 5, sigma: 2.0, runs: 2, depth: 1, ..Default::default() };
    let merge = snapshots(|o| train_msom_observed(&data, &p, 4, o));
    let gamma = snapshots(|o| train_gamma_som_observed(&data, &p, 4, o));
    assert_eq!(merge.len(), 180);
    assert_eq!(merge, gamma);
}

#[test]
fn gamma_gng_depth_one_is_mgng_at_every_step() {
    let data = spiral(3, 40);
    let p = GngParams { runs: 3, blocked_steps: 2, ..Default::default() };
    let ctx = ContextParams { depth: 1, ..Default::default() };
    let merge = snapshots(|o| train_mgng_observed(&data, &p, &ctx, 6, o));
    let gamma = snapshots(|o| train_gamma_gng_observed(&data, &p, &ctx, 6, o));
    assert_eq!(merge, gamma);
}

#[test]
fn zero_alpha_gamma_som_follows_som() {
    let data = spiral(2, 40);
    let p = SomParams { rows: 5, cols: 5, alpha: 0.0, runs: 2, ..Default::default() };
    let mut som = WinnerTrace::default();
    let mut gamma = WinnerTrace::default();
    train_som_observed(&data, &p, 2, &mut som).unwrap();
    train_gamma_som_observed(&data, &SomParams { depth: 3, ..p.clone() }, 2, &mut gamma).unwrap();
    assert_eq!(som, gamma);
}

#[test]
fn mgng_contexts_stay_inside_the_data_box() {
    let data = spiral(4, 40);
    let (lo, hi) = data.bounding_box().unwrap();
    let p = GngParams { runs: 2, ..Default::default() };
    let mut obs = |_: &StepEvent, net: &Network| {
        for n in net.neurons() {
            for c in &n.contexts {
                for j in 0..6 {
                    assert!(c[j] >= lo[j] - 1e-9 && c[j] <= hi[j] + 1e-9, "{c:?}");
                }
            }
        }
    };
    train_mgng_observed(&data, &p, &ContextParams::default(), 3, &mut obs).unwrap();
}

#[test]
fn constant_input_drives_gamma_contexts_to_the_input() {
    let x = JointConfig([12.0, -30.0, 45.0, 0.0, 7.0, 90.0]);
    let traj = Trajectory::new("c", vec![x; 2000], TrajectorySource::Synthetic).unwrap();
    // a second trajectory spreads the bounding box
    let other = Trajectory::new("o", vec![JointConfig([0.0; 6]), JointConfig([100.0; 6])], TrajectorySource::Synthetic).unwrap();
    let data = Dataset::new(vec![other, traj]);
    let p = SomParams { rows: 1, cols: 1, depth: 3, runs: 4, ..Default::default() };
    let net = train_gamma_som(&data, &p, 1).unwrap();
    let n = net.neuron(0).unwrap();
    for c in &n.contexts {
        for j in 0..6 {
            assert!((c[j] - x.0[j]).abs() < 1e-3, "{c:?}");
        }
    }
}

#[test]
fn trained_som_beats_a_random_lattice() {
    let ring: Vec<Trajectory> = (0..5)
        .map(|k| {
            let samples = (0..60)
                .map(|i| {
                    let t = (k * 60 + i) as f64 / 300.0 * std::f64::consts::TAU;
                    JointConfig([60.0 * t.cos(), 60.0 * t.sin(), 0.0, 0.0, 0.0, 0.0])
                })
                .collect();
            Trajectory::new(format!("r{k}"), samples, TrajectorySource::Synthetic).unwrap()
        })
        .collect();
    let data = Dataset::new(ring);
    // σ decays only to σ₀/e, so a wide start would fold the small lattice inward
    let p = SomParams { rows: 10, cols: 10, sigma: 1.0, runs: 4, ..Default::default() };
    let trained = train_som(&data, &p, 5).unwrap();

    let (lo, hi) = data.bounding_box().unwrap();
    let mut r = rng(5);
    let mut random = Network::new(6, ModelTag::Som);
    for _ in 0..100 {
        let w: Vec<f64> = (0..6).map(|j| if lo[j] < hi[j] { r.gen_range(lo[j]..=hi[j]) } else { lo[j] }).collect();
        random.add_neuron(w, vec![]);
    }
    let m = DistanceMetric::Euclid;
    assert!(quantization_error(&trained, &data, m).unwrap() < quantization_error(&random, &data, m).unwrap());
}

#[test]
fn gng_on_a_spiral_improves_on_its_seed_neurons() {
    let data = spiral(6, 50);
    let p = GngParams { runs: 4, ..Default::default() };
    let mut first: Option<Network> = None;
    let mut obs = |_: &StepEvent, net: &Network| {
        if first.is_none() {
            first = Some(net.clone());
        }
    };
    let net = train_gng_observed(&data, &p, 8, &mut obs).unwrap();
    let m = DistanceMetric::Euclid;
    let start = quantization_error(&first.unwrap(), &data, m).unwrap();
    let end = quantization_error(&net, &data, m).unwrap();
    assert!(end < start, "{end} !< {start}");
}

#[test]
fn sgng_segments_align_with_their_portions_on_replay() {
    let data = generate_synthetic(&SyntheticSpec::default(), 15).unwrap();
    let p = SgngParams::default();
    let net = train_sgng(&data, &p, 15).unwrap();
    let audit = replay_assignments(&net, &data, &p);
    assert!(audit.len() > data.total_samples() / 2);
    let mut cos: Vec<f64> = audit.iter().map(|a| a.1).collect();
    cos.sort_by(f64::total_cmp);
    let q10 = cos[cos.len() / 10];
    let median = cos[cos.len() / 2];
    assert!(q10 >= std::f64::consts::FRAC_1_SQRT_2, "10% quantile {q10}");
    assert!(median >= 0.9, "median {median}");
    assert!(net.edges().any(|e| e.kind == EdgeKind::Temporal));
    assert!(net.edges().all(|e| e.kind != EdgeKind::Lattice));
}

#[test]
fn sgng_skips_degenerate_portions() {
    let still = Trajectory::new("still", vec![JointConfig([5.0; 6]); 30], TrajectorySource::Synthetic).unwrap();
    let line = Trajectory::new(
        "line",
        (0..10).map(|i| JointConfig([i as f64, 0.0, 0.0, 0.0, 0.0, 0.0])).collect(),
        TrajectorySource::Synthetic,
    )
    .unwrap();
    let data = Dataset::new(vec![line, still]);
    let p = SgngParams { gng: GngParams { runs: 2, ..Default::default() }, ..Default::default() };
    let mut steps = 0;
    let mut obs = |_: &StepEvent, _: &Network| steps += 1;
    train_sgng_observed(&data, &p, 1, &mut obs).unwrap();
    // only the moving trajectory contributes presentations
    assert_eq!(steps, 2 * 9);
}

#[test]
fn every_trainer_is_deterministic() {
    let data = generate_synthetic(&SyntheticSpec { n_trajectories: 4, n_samples: 30, ..Default::default() }, 3)
        .unwrap()
        .with_order(PresentationOrder::ShuffledTrajectories);
    let som = SomParams { rows: 4, cols: 4, runs: 2, ..Default::default() };
    let gng = GngParams { runs: 2, blocked_steps: 2, ..Default::default() };
    let specs = vec![
        ModelSpec::Som(som.clone()),
        ModelSpec::Msom(som.clone()),
        ModelSpec::GammaSom(SomParams { depth: 2, ..som }),
        ModelSpec::Gng(gng.clone()),
        ModelSpec::Mgng { gng: gng.clone(), context: ContextParams::default() },
        ModelSpec::GammaGng { gng: gng.clone(), context: ContextParams { depth: 3, ..Default::default() } },
        ModelSpec::Sgng(SgngParams { gng, ..Default::default() }),
    ];
    for spec in specs {
        let a = spec.train(&data, 21).unwrap();
        let b = spec.train(&data, 21).unwrap();
        assert_eq!(a, b, "{}", spec.tag());
        assert_eq!(a.model(), spec.tag());
        assert_ne!(a, spec.train(&data, 22).unwrap(), "{}", spec.tag());
    }
}

#[test]
fn lattice_models_keep_their_shape() {
    let data = spiral(2, 30);
    let p = SomParams { rows: 7, cols: 3, runs: 1, depth: 2, ..Default::default() };
    for net in [
        train_som(&data, &SomParams { depth: 0, ..p.clone() }, 1).unwrap(),
        train_msom(&data, &p, 1).unwrap(),
        train_gamma_som(&data, &p, 1).unwrap(),
    ] {
        assert_eq!(net.len(), 21);
        assert_eq!(net.edge_count(), 7 * 2 + 6 * 3);
        assert!(net.edges().all(|e| e.kind == EdgeKind::Lattice));
    }
}

#[test]
fn empty_data_is_rejected_by_every_trainer() {
    let empty = Dataset::default();
    assert_eq!(train_sgng(&empty, &SgngParams::default(), 0), Err(ModelError::EmptyDataset));
    assert_eq!(train_mgng(&empty, &GngParams::default(), &ContextParams::default(), 0), Err(ModelError::EmptyDataset));
    assert_eq!(train_msom(&empty, &SomParams::default(), 0), Err(ModelError::EmptyDataset));
}
