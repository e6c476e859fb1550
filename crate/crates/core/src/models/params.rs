//! Hyperparameter bundles. Defaults are the constants of the reference study:
//! the GNG constants of its parameter study and the SOM settings of its model
//! comparison.

use serde::{Deserialize, Serialize};

use super::{DistanceMetric, ModelError};

fn check(ok: bool, field: &'static str, reason: &str) -> Result<(), ModelError> {
    if ok {
        Ok(())
    } else {
        Err(ModelError::InvalidParam { field, reason: reason.to_string() })
    }
}

fn unit_open(v: f64) -> bool {
    v > 0.0 && v < 1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GngParams {
    /// Neurons placed on random samples before training.
    pub start_size: usize,
    /// Step size pulling the best matching unit toward the input.
    pub eta_bmu: f64,
    /// Step size for the best matching unit's graph neighbors.
    pub eta_n: f64,
    /// A neuron is inserted every `lambda` presentations.
    pub lambda: usize,
    /// Multiplicative decay applied to every accumulated error per presentation.
    pub zeta: f64,
    /// Factor applied to the errors of the two neurons split by an insertion.
    pub delta: f64,
    /// Edges older than this are deleted.
    pub epsilon_age: u32,
    pub max_neurons: usize,
    /// Passes over the whole dataset.
    pub runs: usize,
    /// Presentations during which a fresh winner is excluded from selection.
    pub blocked_steps: usize,
    pub metric: DistanceMetric,
}

impl Default for GngParams {
    fn default() -> Self {
        Self {
            start_size: 4,
            eta_bmu: 0.06,
            eta_n: 0.005,
            lambda: 20,
            zeta: 0.995,
            delta: 0.3,
            epsilon_age: 100,
            max_neurons: 50_000,
            runs: 4,
            blocked_steps: 0,
            metric: DistanceMetric::Euclid,
        }
    }
}

impl GngParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        check(self.start_size >= 2, "start_size", "must be at least 2")?;
        check(unit_open(self.eta_bmu), "eta_bmu", "must lie in (0, 1)")?;
        check(unit_open(self.eta_n), "eta_n", "must lie in (0, 1)")?;
        check(self.lambda >= 1, "lambda", "must be at least 1")?;
        check(unit_open(self.zeta), "zeta", "must lie in (0, 1)")?;
        check(unit_open(self.delta), "delta", "must lie in (0, 1)")?;
        check(self.epsilon_age >= 1, "epsilon_age", "must be at least 1")?;
        check(self.max_neurons >= self.start_size, "max_neurons", "must be at least start_size")?;
        check(self.runs >= 1, "runs", "must be at least 1")?;
        Ok(())
    }
}

/// Temporal context settings shared by the merge and γ-memory models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContextParams {
    /// Weight of the context term in the winner distance.
    pub alpha: f64,
    /// Blend between the previous winner's weight and its context.
    pub beta: f64,
    /// Number of context vectors per neuron (γ-memory depth).
    pub depth: usize,
}

impl Default for ContextParams {
    fn default() -> Self {
        Self { alpha: 0.3, beta: 0.7, depth: 1 }
    }
}

impl ContextParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        check((0.0..=1.0).contains(&self.alpha), "alpha", "must lie in [0, 1]")?;
        check((0.0..=1.0).contains(&self.beta), "beta", "must lie in [0, 1]")?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SomParams {
    pub rows: usize,
    pub cols: usize,
    /// Initial Gaussian neighborhood width in lattice units.
    pub sigma: f64,
    /// Initial learning rate.
    pub eta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub runs: usize,
    pub depth: usize,
    pub metric: DistanceMetric,
}

impl Default for SomParams {
    fn default() -> Self {
        Self {
            rows: 100,
            cols: 100,
            sigma: 5.0,
            eta: 0.2,
            alpha: 0.3,
            beta: 0.7,
            runs: 4,
            depth: 0,
            metric: DistanceMetric::Euclid,
        }
    }
}

impl SomParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        check(self.rows >= 1 && self.cols >= 1, "rows/cols", "lattice must be non-empty")?;
        check(self.sigma > 0.0 && self.sigma.is_finite(), "sigma", "must be positive")?;
        check(self.eta > 0.0 && self.eta <= 1.0, "eta", "must lie in (0, 1]")?;
        check((0.0..=1.0).contains(&self.alpha), "alpha", "must lie in [0, 1]")?;
        check((0.0..=1.0).contains(&self.beta), "beta", "must lie in [0, 1]")?;
        check(self.runs >= 1, "runs", "must be at least 1")?;
        Ok(())
    }

    pub fn context(&self) -> ContextParams {
        ContextParams { alpha: self.alpha, beta: self.beta, depth: self.depth }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SgngParams {
    #[serde(flatten)]
    pub gng: GngParams,
    /// Most samples a trajectory portion may span.
    pub max_portion: usize,
    /// Largest allowed distance of an inner portion sample from the chord,
    /// relative to the chord length.
    pub linearity_tol: f64,
    /// Weight of the midpoint distance term (degrees).
    pub w_close: f64,
    /// Weight of the `1 − |cos|` parallelism term.
    pub w_parallel: f64,
}

impl Default for SgngParams {
    fn default() -> Self {
        Self {
            gng: GngParams::default(),
            max_portion: 5,
            linearity_tol: 0.1,
            w_close: 1.0,
            w_parallel: 10.0,
        }
    }
}

impl SgngParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        self.gng.validate()?;
        check(self.gng.start_size.is_multiple_of(2), "start_size", "must be even (neurons come in segment pairs)")?;
        check(self.max_portion >= 2, "max_portion", "must be at least 2")?;
        check(self.linearity_tol > 0.0, "linearity_tol", "must be positive")?;
        check(self.w_close >= 0.0 && self.w_parallel >= 0.0, "w_close/w_parallel", "must be non-negative")?;
        check(self.w_close + self.w_parallel > 0.0, "w_close/w_parallel", "must not both be zero")?;
        Ok(())
    }
}
