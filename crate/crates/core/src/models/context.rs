//! Temporal context descriptors for the merge (MSOM/MGNG) and γ-memory
//! (γ-SOM/γ-GNG) models.
//!
//! A model keeps a global descriptor computed from the previous winner and
//! compares it with the context vectors stored on every neuron. Descriptors
//! are reset to the current input at the start of each trajectory.

use crate::network::Neuron;

use super::DistanceMetric;

pub trait TemporalContext {
    /// Context vectors carried by every neuron.
    fn depth(&self) -> usize;

    /// Starts a new sequence at input `x`.
    fn reset(&mut self, x: &[f64]);

    /// Recomputes the descriptors from the previous winner.
    fn advance(&mut self, prev: &Neuron);

    /// Winner-selection distance of `neuron` for input `x`.
    fn distance(&self, metric: DistanceMetric, x: &[f64], neuron: &Neuron) -> f64;

    /// Current descriptors, one per context level.
    fn descriptors(&self) -> &[Vec<f64>];
}

/// Context-free models: the distance is the plain squared metric.
#[derive(Debug, Clone, Default)]
pub struct NoContext;

impl TemporalContext for NoContext {
    fn depth(&self) -> usize {
        0
    }

    fn reset(&mut self, _x: &[f64]) {}

    fn advance(&mut self, _prev: &Neuron) {}

    #[inline]
    fn distance(&self, metric: DistanceMetric, x: &[f64], neuron: &Neuron) -> f64 {
        metric.distance_sq(x, &neuron.weight)
    }

    fn descriptors(&self) -> &[Vec<f64>] {
        &[]
    }
}

/// Single merge context: `c(t) = (1 − β)·w_b + β·c_b`.
#[derive(Debug, Clone)]
pub struct MergeContext {
    alpha: f64,
    beta: f64,
    descriptor: [Vec<f64>; 1],
}

impl MergeContext {
    pub fn new(alpha: f64, beta: f64, dim: usize) -> Self {
        Self { alpha, beta, descriptor: [vec![0.0; dim]] }
    }
}

impl TemporalContext for MergeContext {
    fn depth(&self) -> usize {
        1
    }

    fn reset(&mut self, x: &[f64]) {
        self.descriptor[0].copy_from_slice(x);
    }

    fn advance(&mut self, prev: &Neuron) {
        let (w, c) = (&prev.weight, &prev.contexts[0]);
        for (j, d) in self.descriptor[0].iter_mut().enumerate() {
            *d = (1.0 - self.beta) * w[j] + self.beta * c[j];
        }
    }

    #[inline]
    fn distance(&self, metric: DistanceMetric, x: &[f64], neuron: &Neuron) -> f64 {
        (1.0 - self.alpha) * metric.distance_sq(x, &neuron.weight)
            + self.alpha * metric.distance_sq(&self.descriptor[0], &neuron.contexts[0])
    }

    fn descriptors(&self) -> &[Vec<f64>] {
        &self.descriptor
    }
}

/// γ-memory of depth K:
/// `c_1(t) = (1 − β)·w_b + β·c_{1,b}`, `c_k(t) = (1 − β)·c_{k−1,b} + β·c_{k,b}`.
#[derive(Debug, Clone)]
pub struct GammaContext {
    alpha: f64,
    beta: f64,
    descriptors: Vec<Vec<f64>>,
}

impl GammaContext {
    pub fn new(alpha: f64, beta: f64, depth: usize, dim: usize) -> Self {
        assert!(depth >= 1, "γ-memory needs at least one level");
        Self { alpha, beta, descriptors: vec![vec![0.0; dim]; depth] }
    }
}

impl TemporalContext for GammaContext {
    fn depth(&self) -> usize {
        self.descriptors.len()
    }

    fn reset(&mut self, x: &[f64]) {
        for d in &mut self.descriptors {
            d.copy_from_slice(x);
        }
    }

    fn advance(&mut self, prev: &Neuron) {
        for (k, desc) in self.descriptors.iter_mut().enumerate() {
            let lower = if k == 0 { &prev.weight } else { &prev.contexts[k - 1] };
            let own = &prev.contexts[k];
            for (j, d) in desc.iter_mut().enumerate() {
                *d = (1.0 - self.beta) * lower[j] + self.beta * own[j];
            }
        }
    }

    #[inline]
    fn distance(&self, metric: DistanceMetric, x: &[f64], neuron: &Neuron) -> f64 {
        let k = self.descriptors.len() as f64;
        let mut context_sum = 0.0;
        for (desc, own) in self.descriptors.iter().zip(&neuron.contexts) {
            context_sum += metric.distance_sq(desc, own);
        }
        (1.0 - self.alpha) * metric.distance_sq(x, &neuron.weight) + (self.alpha / k) * context_sum
    }

    fn descriptors(&self) -> &[Vec<f64>] {
        &self.descriptors
    }
}

/// Moves a neuron's weight toward `x` and its contexts toward the descriptors.
#[inline]
pub(crate) fn adapt(neuron: &mut Neuron, x: &[f64], descriptors: &[Vec<f64>], rate: f64) {
    for (w, xi) in neuron.weight.iter_mut().zip(x) {
        *w += rate * (xi - *w);
    }
    for (c, desc) in neuron.contexts.iter_mut().zip(descriptors) {
        for (ci, di) in c.iter_mut().zip(desc) {
            *ci += rate * (di - *ci);
        }
    }
}
