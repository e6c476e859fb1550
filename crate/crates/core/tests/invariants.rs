mod common;

use std::collections::BTreeSet;

use common::*;
use proptest::prelude::*;
use sonn_core::dataset::{interpolate, load_dataset, save_dataset, DataFormat, Dataset, JointConfig, Trajectory, TrajectorySource};
use sonn_core::metrics::{c_measure_exhaustive, coverage, quantization_error};
use sonn_core::models::*;
use sonn_core::network::{EdgeFilter, EdgeKind, Network, NeuronId};
use sonn_core::reduction::{chebyshev, reduce_connections};

fn config() -> impl Strategy<Value = JointConfig> {
    prop::array::uniform6(-180.0f64..180.0).prop_map(JointConfig)
}

fn trajectory(min: usize, max: usize) -> impl Strategy<Value = Trajectory> {
    prop::collection::vec(config(), min..max)
        .prop_map(|s| Trajectory::new("p", s, TrajectorySource::Synthetic).unwrap())
}

fn dataset() -> impl Strategy<Value = Dataset> {
    prop::collection::vec(trajectory(5, 25), 1..4).prop_map(|mut ts| {
        for (i, t) in ts.iter_mut().enumerate() {
            t.id = format!("t{i}");
        }
        Dataset::new(ts)
    })
}

/// Checks the per-step graph invariants of the growing models.
struct GrowthAudit {
    epsilon: u32,
    max_neurons: usize,
    start_size: usize,
    touched: BTreeSet<NeuronId>,
}

impl TrainObserver for GrowthAudit {
    fn on_step(&mut self, e: &StepEvent, net: &Network) {
        self.touched.insert(e.winner);
        self.touched.extend(e.runner_up);
        assert!(net.edges().all(|edge| edge.age <= self.epsilon));
        assert!(net.len() >= 2 && net.len() <= self.max_neurons);
        for id in net.ids() {
            if net.degree(id) == 0 {
                // only seed neurons that were never matched may be isolated
                assert!(id < self.start_size && !self.touched.contains(&id), "isolated neuron {id}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn interpolation_keeps_originals_and_halves_steps(t in trajectory(2, 20), rounds in 0u32..4) {
        let out = interpolate(&t, rounds);
        let k = 1usize << rounds;
        prop_assert_eq!(out.len(), (t.len() - 1) * k + 1);
        for (i, s) in t.samples.iter().enumerate() {
            prop_assert_eq!(&out.samples[i * k], s);
        }
        for (i, w) in t.samples.windows(2).enumerate() {
            let step = w[0].chebyshev(&w[1]);
            for j in 0..k {
                let sub = out.samples[i * k + j].chebyshev(&out.samples[i * k + j + 1]);
                prop_assert!(sub <= step / k as f64 * (1.0 + 1e-9) + 1e-12);
            }
        }
    }

    #[test]
    fn csv_and_json_round_trip_bit_exact(data in dataset()) {
        let dir = tempfile::tempdir().unwrap();
        for (name, format) in [("d.csv", DataFormat::Csv), ("d.json", DataFormat::Json)] {
            let path = dir.path().join(name);
            save_dataset(&data, &path, format).unwrap();
            let back = load_dataset(&path, format).unwrap();
            prop_assert_eq!(back.trajectories.len(), data.trajectories.len());
            for (a, b) in back.trajectories.iter().zip(&data.trajectories) {
                prop_assert_eq!(&a.id, &b.id);
                for (x, y) in a.samples.iter().zip(&b.samples) {
                    for j in 0..6 {
                        prop_assert_eq!(x.0[j].to_bits(), y.0[j].to_bits());
                    }
                }
            }
        }
    }

    #[test]
    fn bmu_returns_two_distinct_unblocked_neurons(seed in 0u64..1000, n in 3usize..40, block in 0usize..3) {
        let net = random_graph(seed, n, 0, 100.0);
        let mut r = rng(seed + 1);
        let x = random_config(&mut r, 100.0);
        let blocked: Vec<NeuronId> = (0..block.min(n - 2)).collect();
        let (a, b) = net.bmu(x.as_slice(), DistanceMetric::Euclid, &blocked).unwrap();
        prop_assert_ne!(a, b);
        prop_assert!(!blocked.contains(&a) && !blocked.contains(&b));
    }

    #[test]
    fn components_partition_the_neurons(seed in 0u64..1000, n in 1usize..50, m in 0usize..60) {
        let net = random_graph(seed, n, m, 10.0);
        let comps = net.connected_components(EdgeFilter::All);
        let mut all: Vec<NeuronId> = comps.concat();
        all.sort_unstable();
        let len = all.len();
        all.dedup();
        prop_assert_eq!(all.len(), len);
        prop_assert_eq!(all, net.ids().collect::<Vec<_>>());
    }

    #[test]
    fn adding_a_neuron_never_raises_qe(seed in 0u64..1000, extra in config()) {
        let mut net = random_graph(seed, 10, 0, 90.0);
        let data = random_dataset(seed, 2, 20, 90.0);
        let before = quantization_error(&net, &data, DistanceMetric::Euclid).unwrap();
        net.add_neuron(extra.0.to_vec(), vec![]);
        prop_assert!(quantization_error(&net, &data, DistanceMetric::Euclid).unwrap() <= before);
    }

    #[test]
    fn coverage_grows_with_radius(seed in 0u64..1000, r1 in 0.0f64..80.0, dr in 0.0f64..80.0) {
        let net = random_graph(seed, 15, 0, 90.0);
        let data = random_dataset(seed + 7, 2, 20, 90.0);
        let (a, b) = (coverage(&net, &data, r1), coverage(&net, &data, r1 + dr));
        prop_assert!(a <= b);
        prop_assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn c_measure_ignores_neuron_numbering(seed in 0u64..1000, n in 2usize..25, m in 1usize..50) {
        let net = random_graph(seed, n, m, 50.0);
        let mut order: Vec<NeuronId> = net.ids().collect();
        order.reverse();
        let mut relabeled = Network::new(6, ModelTag::Gng);
        let mut map = vec![0; n];
        for &old in &order {
            map[old] = relabeled.add_neuron(net.weight(old).to_vec(), vec![]);
        }
        for e in net.edges() {
            relabeled.refresh_edge(map[e.a], map[e.b], e.kind);
        }
        match (c_measure_exhaustive(&net, EdgeFilter::All), c_measure_exhaustive(&relabeled, EdgeFilter::All)) {
            (Ok(a), Ok(b)) => {
                prop_assert!((a.value - b.value).abs() <= 1e-12 * a.value.max(1.0));
                prop_assert_eq!(a.pairs, b.pairs);
            }
            (a, b) => prop_assert_eq!(a.is_err(), b.is_err()),
        }
    }

    #[test]
    fn reduction_contract(seed in 0u64..1000, n in 2usize..40, m in 0usize..80, threshold in 1.0f64..20.0) {
        let net = random_graph(seed, n, m, 15.0);
        let (reduced, log) = reduce_connections(&net, threshold);
        prop_assert_eq!(
            reduced.connected_components(EdgeFilter::All).len(),
            net.connected_components(EdgeFilter::All).len()
        );
        prop_assert_eq!(reduced.edge_count() + log.removed.len(), net.edge_count());
        for e in &log.removed {
            prop_assert!(e.length > threshold);
            prop_assert!(chebyshev(net.weight(e.a), net.weight(e.b)).unwrap() > threshold);
        }
        let (again, log2) = reduce_connections(&reduced, threshold);
        prop_assert_eq!(log2.removed.len(), 0);
        prop_assert_eq!(again, reduced);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn growing_models_keep_graph_invariants(
        data in dataset(),
        seed in 0u64..1000,
        blocked in 0usize..3,
        epsilon in 5u32..40,
        max_neurons in 4usize..30,
        which in 0usize..4,
    ) {
        let gng = GngParams { runs: 2, blocked_steps: blocked, epsilon_age: epsilon, max_neurons, lambda: 5, ..Default::default() };
        let mut audit = GrowthAudit { epsilon, max_neurons, start_size: gng.start_size, touched: BTreeSet::new() };
        let ctx = ContextParams { depth: 2, ..Default::default() };
        let net = match which {
            0 => train_gng_observed(&data, &gng, seed, &mut audit),
            1 => train_mgng_observed(&data, &gng, &ctx, seed, &mut audit),
            2 => train_gamma_gng_observed(&data, &gng, &ctx, seed, &mut audit),
            _ => train_sgng_observed(&data, &SgngParams { gng: gng.clone(), ..Default::default() }, seed, &mut audit),
        }.unwrap();
        prop_assert!(net.len() <= max_neurons);
        for e in net.edges() {
            prop_assert!(e.a != e.b && net.contains(e.a) && net.contains(e.b));
        }
    }

    #[test]
    fn weights_stay_in_the_data_box(data in dataset(), seed in 0u64..1000, which in 0usize..7) {
        let som = SomParams { rows: 3, cols: 4, runs: 2, ..Default::default() };
        let gng = GngParams { runs: 2, lambda: 7, ..Default::default() };
        let spec = match which {
            0 => ModelSpec::Som(som),
            1 => ModelSpec::Msom(som),
            2 => ModelSpec::GammaSom(SomParams { depth: 2, ..som }),
            3 => ModelSpec::Gng(gng),
            4 => ModelSpec::Mgng { gng, context: ContextParams::default() },
            5 => ModelSpec::GammaGng { gng, context: ContextParams { depth: 2, ..Default::default() } },
            _ => ModelSpec::Sgng(SgngParams { gng, ..Default::default() }),
        };
        let net = spec.train(&data, seed).unwrap();
        let (lo, hi) = data.bounding_box().unwrap();
        for n in net.neurons() {
            for j in 0..6 {
                prop_assert!(n.weight[j] >= lo[j] - 1e-9 && n.weight[j] <= hi[j] + 1e-9);
            }
            for c in &n.contexts {
                prop_assert_eq!(c.len(), 6);
            }
        }
        if spec.tag().is_lattice() {
            prop_assert!(net.edges().all(|e| e.kind == EdgeKind::Lattice));
        }
    }
}
