//! Segment GNG: the quantization unit is a segment (a topological edge
//! between two neurons) matched against short, nearly straight portions of
//! a trajectory.
//!
//! For each sample a portion is grown backwards from it for as long as the
//! inner samples stay close to the chord joining the portion's extreme
//! points. The best matching linear segment minimizes
//! `w_close · ‖mid(S) − mid(φ)‖ + w_parallel · (1 − |cos∠(S, φ)|)`.
//! Its end points move toward the portion's extreme points, the previous and
//! current best segments are joined by a temporal edge, and the best and
//! second-best segments by a topological edge. Aging, pruning, insertion and
//! error decay follow GNG.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::{Dataset, JointConfig};
use crate::network::{EdgeFilter, EdgeKey, EdgeKind, Network, NeuronId};

use super::gng::{decay_errors, insert_neuron, BlockList};
use super::{ensure_data, DistanceMetric, ModelError, ModelTag, SgngParams, StepEvent, TrainObserver};

/// A nearly straight stretch of trajectory ending at the current sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Portion {
    /// Oldest sample of the portion.
    pub start: Vec<f64>,
    /// Current sample.
    pub end: Vec<f64>,
    /// Number of samples covered.
    pub samples: usize,
}

impl Portion {
    pub fn midpoint(&self) -> Vec<f64> {
        self.start.iter().zip(&self.end).map(|(a, b)| 0.5 * (a + b)).collect()
    }

    pub fn direction(&self) -> Vec<f64> {
        self.end.iter().zip(&self.start).map(|(a, b)| a - b).collect()
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Distance of `p` from the line through `a` and `b`.
fn distance_to_line(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let dir: Vec<f64> = b.iter().zip(a).map(|(x, y)| x - y).collect();
    let len_sq: f64 = dir.iter().map(|x| x * x).sum();
    let rel: Vec<f64> = p.iter().zip(a).map(|(x, y)| x - y).collect();
    if len_sq == 0.0 {
        return norm(&rel);
    }
    let t = rel.iter().zip(&dir).map(|(r, d)| r * d).sum::<f64>() / len_sq;
    rel.iter().zip(&dir).map(|(r, d)| (r - t * d).powi(2)).sum::<f64>().sqrt()
}

/// Grows the portion ending at `samples[t]` backwards while it stays within
/// `tol · chord` of its chord and spans at most `max_len` samples.
/// Returns `None` when no non-degenerate portion exists.
pub fn build_portion(samples: &[JointConfig], t: usize, max_len: usize, tol: f64) -> Option<Portion> {
    if t == 0 || t >= samples.len() {
        return None;
    }
    let end = samples[t].as_slice();
    let mut best: Option<usize> = None;
    let mut tau = 1;
    while tau <= t && tau < max_len {
        let start = samples[t - tau].as_slice();
        let chord = norm(&end.iter().zip(start).map(|(a, b)| a - b).collect::<Vec<_>>());
        if chord > 0.0 {
            let straight = (t - tau + 1..t)
                .all(|i| distance_to_line(samples[i].as_slice(), start, end) <= tol * chord);
            if !straight {
                break;
            }
            best = Some(tau);
        }
        tau += 1;
    }
    best.map(|tau| Portion { start: samples[t - tau].0.to_vec(), end: end.to_vec(), samples: tau + 1 })
}

/// Matching cost of segment `a`–`b` for a portion.
pub fn segment_distance(a: &[f64], b: &[f64], portion: &Portion, p: &SgngParams, metric: DistanceMetric) -> f64 {
    let mid: Vec<f64> = a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect();
    let close = metric.distance(&mid, &portion.midpoint());
    let dir: Vec<f64> = b.iter().zip(a).map(|(x, y)| x - y).collect();
    let v = portion.direction();
    let (ns, nv) = (norm(&dir), norm(&v));
    let cos = if ns > 0.0 && nv > 0.0 {
        dir.iter().zip(&v).map(|(x, y)| x * y).sum::<f64>() / (ns * nv)
    } else {
        0.0
    };
    p.w_close * close + p.w_parallel * (1.0 - cos.abs().min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentMatch {
    pub best: EdgeKey,
    pub second: Option<EdgeKey>,
    pub distance: f64,
}

/// Best and second-best topological segments for a portion, skipping
/// `blocked`; ties go to the smaller edge key.
pub fn best_matching_segments(
    net: &Network,
    portion: &Portion,
    p: &SgngParams,
    blocked: &[EdgeKey],
) -> Option<SegmentMatch> {
    let mut best: Option<(f64, EdgeKey)> = None;
    let mut second: Option<(f64, EdgeKey)> = None;
    for e in net.edges().filter(|e| e.kind == EdgeKind::Topological) {
        let key = e.key();
        if blocked.contains(&key) {
            continue;
        }
        let d = segment_distance(net.weight(e.a), net.weight(e.b), portion, p, p.gng.metric);
        match best {
            Some((bd, _)) if d >= bd => {
                if second.is_none_or(|(sd, _)| d < sd) {
                    second = Some((d, key));
                }
            }
            _ => {
                second = best;
                best = Some((d, key));
            }
        }
    }
    best.map(|(distance, best)| SegmentMatch { best, second: second.map(|s| s.1), distance })
}

/// Orients segment `key` so that the first returned end point faces the
/// portion start.
fn orient(net: &Network, key: EdgeKey, portion: &Portion, metric: DistanceMetric) -> (NeuronId, NeuronId) {
    let (wa, wb) = (net.weight(key.a), net.weight(key.b));
    let straight = metric.distance_sq(wa, &portion.start) + metric.distance_sq(wb, &portion.end);
    let crossed = metric.distance_sq(wb, &portion.start) + metric.distance_sq(wa, &portion.end);
    if crossed < straight {
        (key.b, key.a)
    } else {
        (key.a, key.b)
    }
}

fn pull(net: &mut Network, id: NeuronId, target: &[f64], rate: f64) {
    if let Some(n) = net.neuron_mut(id) {
        for (w, t) in n.weight.iter_mut().zip(target) {
            *w += rate * (t - *w);
        }
    }
}

pub fn train_sgng(data: &Dataset, p: &SgngParams, seed: u64) -> Result<Network, ModelError> {
    train_sgng_observed(data, p, seed, &mut ())
}

pub fn train_sgng_observed<O: TrainObserver>(
    data: &Dataset,
    p: &SgngParams,
    seed: u64,
    obs: &mut O,
) -> Result<Network, ModelError> {
    p.validate()?;
    ensure_data(data)?;
    let g = &p.gng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Initial segments sit on random consecutive sample pairs.
    let mut net = Network::new(crate::DOF, ModelTag::Sgng);
    let pairs: Vec<(usize, usize)> = data
        .trajectories
        .iter()
        .enumerate()
        .flat_map(|(ti, t)| (1..t.len()).map(move |i| (ti, i)))
        .collect();
    if pairs.len() < g.start_size / 2 {
        return Err(ModelError::InvalidParam {
            field: "start_size",
            reason: format!("dataset has only {} sample pairs", pairs.len()),
        });
    }
    for k in rand::seq::index::sample(&mut rng, pairs.len(), g.start_size / 2).into_iter() {
        let (ti, i) = pairs[k];
        let s = &data.trajectories[ti].samples;
        let a = net.add_neuron(s[i - 1].0.to_vec(), vec![]);
        let b = net.add_neuron(s[i].0.to_vec(), vec![]);
        net.refresh_edge(a, b, EdgeKind::Topological);
    }

    let mut blocked = BlockList::new(g.blocked_steps);
    let mut step = 0usize;
    for _ in 0..g.runs {
        for ti in data.epoch_order(&mut rng) {
            let samples = &data.trajectories[ti].samples;
            let mut prev: Option<(NeuronId, NeuronId)> = None;
            for t in 1..samples.len() {
                let Some(portion) = build_portion(samples, t, p.max_portion, p.linearity_tol) else {
                    continue;
                };
                let found = best_matching_segments(&net, &portion, p, blocked.as_slice())
                    .or_else(|| best_matching_segments(&net, &portion, p, &[]));
                let Some(m) = found else {
                    // every segment was pruned away; restart from this portion
                    let a = net.add_neuron(portion.start.clone(), vec![]);
                    let b = net.add_neuron(portion.end.clone(), vec![]);
                    net.refresh_edge(a, b, EdgeKind::Topological);
                    continue;
                };

                let (head, tail) = orient(&net, m.best, &portion, g.metric);
                net.age_edges(head);
                net.age_edges(tail);
                for (id, target) in [(head, &portion.start), (tail, &portion.end)] {
                    let n = net.neuron_mut(id).expect("segment end exists");
                    n.error += g.metric.distance_sq(&n.weight, target);
                }
                pull(&mut net, head, &portion.start, g.eta_bmu);
                pull(&mut net, tail, &portion.end, g.eta_bmu);
                for (end, other, target) in [(head, tail, &portion.start), (tail, head, &portion.end)] {
                    for nb in net.neighbors_filtered(end, EdgeFilter::ExcludeTemporal) {
                        if nb != other {
                            pull(&mut net, nb, target, g.eta_n);
                        }
                    }
                }
                net.refresh_edge(head, tail, EdgeKind::Topological);

                if let Some(second) = m.second {
                    let ends = [m.best.a, m.best.b];
                    if !ends.contains(&second.a) && !ends.contains(&second.b) {
                        let (x, y) = closest_ends(&net, m.best, second, g.metric);
                        net.refresh_edge(x, y, EdgeKind::Topological);
                    }
                }
                if let Some((_, prev_tail)) = prev {
                    if prev_tail != head && net.contains(prev_tail) {
                        net.refresh_edge(prev_tail, head, EdgeKind::Temporal);
                    }
                }
                net.prune_stale(g.epsilon_age);

                step += 1;
                if step.is_multiple_of(g.lambda) && net.len() < g.max_neurons {
                    insert_neuron(&mut net, g.delta);
                }
                decay_errors(&mut net, g.zeta);

                blocked.push(m.best);
                prev = Some((head, tail));
                obs.on_step(&StepEvent { step: step - 1, winner: head, runner_up: Some(tail) }, &net);
            }
        }
    }
    Ok(net)
}

/// Replays the data against a trained network without adapting it and
/// reports, for each portion, its best segment and their `|cos|`.
pub fn replay_assignments(net: &Network, data: &Dataset, p: &SgngParams) -> Vec<(EdgeKey, f64)> {
    let mut out = Vec::new();
    for traj in &data.trajectories {
        for t in 1..traj.samples.len() {
            let Some(portion) = build_portion(&traj.samples, t, p.max_portion, p.linearity_tol) else {
                continue;
            };
            let Some(m) = best_matching_segments(net, &portion, p, &[]) else {
                continue;
            };
            let dir: Vec<f64> = net.weight(m.best.b).iter().zip(net.weight(m.best.a)).map(|(x, y)| x - y).collect();
            let v = portion.direction();
            let denom = norm(&dir) * norm(&v);
            let cos = if denom > 0.0 { dir.iter().zip(&v).map(|(x, y)| x * y).sum::<f64>() / denom } else { 0.0 };
            out.push((m.best, cos.abs()));
        }
    }
    out
}

fn closest_ends(net: &Network, s: EdgeKey, t: EdgeKey, metric: DistanceMetric) -> (NeuronId, NeuronId) {
    let mut best = (f64::INFINITY, s.a, t.a);
    for x in [s.a, s.b] {
        for y in [t.a, t.b] {
            let d = metric.distance_sq(net.weight(x), net.weight(y));
            if d < best.0 {
                best = (d, x, y);
            }
        }
    }
    (best.1, best.2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(v: [f64; 6]) -> JointConfig {
        JointConfig(v)
    }

    fn two_segment_net(offset: f64) -> Network {
        let mut net = Network::new(6, ModelTag::Sgng);
        let a = net.add_neuron(vec![0.0; 6], vec![]);
        let b = net.add_neuron(vec![10.0, 0.0, 0.0, 0.0, 0.0, 0.0], vec![]);
        let c = net.add_neuron(vec![0.0, offset, 0.0, 0.0, 0.0, 0.0], vec![]);
        let d = net.add_neuron(vec![10.0, offset, 0.0, 0.0, 0.0, 0.0], vec![]);
        net.refresh_edge(a, b, EdgeKind::Topological);
        net.refresh_edge(c, d, EdgeKind::Topological);
        net
    }

    #[test]
    fn overlaying_segment_has_zero_distance() {
        let samples = vec![cfg([0.0; 6]), cfg([10.0, 0.0, 0.0, 0.0, 0.0, 0.0])];
        let portion = build_portion(&samples, 1, 5, 0.1).unwrap();
        let net = two_segment_net(30.0);
        let m = best_matching_segments(&net, &portion, &SgngParams::default(), &[]).unwrap();
        assert_eq!(m.best, EdgeKey::new(0, 1, EdgeKind::Topological));
        assert_eq!(m.distance, 0.0);
    }

    #[test]
    fn nearer_parallel_segment_wins() {
        let samples = vec![cfg([0.0, 4.0, 0.0, 0.0, 0.0, 0.0]), cfg([10.0, 4.0, 0.0, 0.0, 0.0, 0.0])];
        let portion = build_portion(&samples, 1, 5, 0.1).unwrap();
        let net = two_segment_net(5.0);
        let m = best_matching_segments(&net, &portion, &SgngParams::default(), &[]).unwrap();
        assert_eq!(m.best, EdgeKey::new(2, 3, EdgeKind::Topological));
        assert_eq!(m.second, Some(EdgeKey::new(0, 1, EdgeKind::Topological)));
    }

    #[test]
    fn portion_grows_along_a_line_and_stops_at_a_corner() {
        let mut samples: Vec<JointConfig> =
            (0..4).map(|i| cfg([i as f64, 0.0, 0.0, 0.0, 0.0, 0.0])).collect();
        samples.extend((1..4).map(|i| cfg([3.0, i as f64, 0.0, 0.0, 0.0, 0.0])));
        // straight run 0..=3
        let p = build_portion(&samples, 3, 10, 0.05).unwrap();
        assert_eq!(p.samples, 4);
        // after the corner only the vertical leg is straight
        let p = build_portion(&samples, 6, 10, 0.05).unwrap();
        assert_eq!(p.samples, 4);
        assert_eq!(p.start[1], 0.0);
        // cap on length
        let p = build_portion(&samples, 3, 2, 0.05).unwrap();
        assert_eq!(p.samples, 2);
    }

    #[test]
    fn degenerate_portions_are_skipped() {
        let samples = vec![cfg([1.0; 6]); 3];
        assert_eq!(build_portion(&samples, 2, 5, 0.1), None);
        assert_eq!(build_portion(&samples, 0, 5, 0.1), None);
    }

    #[test]
    fn odd_start_size_is_rejected() {
        let p = SgngParams { gng: crate::models::GngParams { start_size: 3, ..Default::default() }, ..Default::default() };
        let data = crate::dataset::generate_synthetic(&Default::default(), 1).unwrap();
        assert!(matches!(train_sgng(&data, &p, 1), Err(ModelError::InvalidParam { field: "start_size", .. })));
    }
}
