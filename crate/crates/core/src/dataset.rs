//! Joint-trajectory training data: loading, saving, synthesis and interpolation.
//!
//! Angles are degrees throughout. The on-disk CSV layout is
//! `trajectory_id,j1,j2,j3,j4,j5,j6`, one sample per row; rows that share a
//! trajectory id form one trajectory in file order. A header row and `#`
//! comment lines are accepted. The JSON layout is
//! `{"trajectories": [{"id": "...", "samples": [[j1..j6], ...]}]}`.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::ops::{Index, IndexMut};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kinematics::ArmModel;
use crate::DOF;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("line {line}: expected {expected} joint angles, found {found}")]
    Dimension { line: u64, expected: usize, found: usize },
    #[error("dataset contains no samples")]
    Empty,
    #[error("trajectory `{id}` has {len} samples, at least 2 are required")]
    TooShort { id: String, len: usize },
    #[error("non-finite joint angle in trajectory `{id}`")]
    NonFinite { id: String },
    #[error("invalid synthetic spec: {0}")]
    Config(String),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

/// A single 6-DOF joint configuration in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct JointConfig(pub [f64; DOF]);

impl JointConfig {
    pub const fn new(angles: [f64; DOF]) -> Self {
        Self(angles)
    }

    /// Builds a configuration from a slice, which must hold exactly six angles.
    pub fn from_slice(angles: &[f64]) -> Option<Self> {
        let arr: [f64; DOF] = angles.try_into().ok()?;
        Some(Self(arr))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|a| a.is_finite())
    }

    pub fn midpoint(&self, other: &Self) -> Self {
        let mut out = [0.0; DOF];
        for (o, (a, b)) in out.iter_mut().zip(self.0.iter().zip(other.0.iter())) {
            *o = 0.5 * (a + b);
        }
        Self(out)
    }

    /// Largest absolute per-joint difference.
    pub fn chebyshev(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl Index<usize> for JointConfig {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for JointConfig {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl From<[f64; DOF]> for JointConfig {
    fn from(a: [f64; DOF]) -> Self {
        Self(a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TrajectorySource {
    #[default]
    File,
    Synthetic,
    Interpolated,
}

/// Temporally ordered joint samples of one demonstration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub id: String,
    pub samples: Vec<JointConfig>,
    #[serde(default)]
    pub source: TrajectorySource,
}

impl Trajectory {
    pub fn new(
        id: impl Into<String>,
        samples: Vec<JointConfig>,
        source: TrajectorySource,
    ) -> Result<Self, DatasetError> {
        let id = id.into();
        if samples.len() < 2 {
            return Err(DatasetError::TooShort { id, len: samples.len() });
        }
        if !samples.iter().all(JointConfig::is_finite) {
            return Err(DatasetError::NonFinite { id });
        }
        Ok(Self { id, samples, source })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PresentationOrder {
    /// Trajectories in dataset order, every run.
    #[default]
    TrajectorySequential,
    /// Trajectory order reshuffled each run; samples inside a trajectory keep their order.
    ShuffledTrajectories,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Dataset {
    pub trajectories: Vec<Trajectory>,
    #[serde(default)]
    pub presentation_order: PresentationOrder,
}

impl Dataset {
    pub fn new(trajectories: Vec<Trajectory>) -> Self {
        Self { trajectories, presentation_order: PresentationOrder::default() }
    }

    pub fn with_order(mut self, order: PresentationOrder) -> Self {
        self.presentation_order = order;
        self
    }

    pub fn total_samples(&self) -> usize {
        self.trajectories.iter().map(Trajectory::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.total_samples() == 0
    }

    pub fn samples(&self) -> impl Iterator<Item = &JointConfig> {
        self.trajectories.iter().flat_map(|t| t.samples.iter())
    }

    /// Per-joint `(min, max)` over every sample, or `None` for an empty dataset.
    pub fn bounding_box(&self) -> Option<([f64; DOF], [f64; DOF])> {
        let mut it = self.samples();
        let first = it.next()?;
        let (mut lo, mut hi) = (first.0, first.0);
        for s in it {
            for j in 0..DOF {
                lo[j] = lo[j].min(s[j]);
                hi[j] = hi[j].max(s[j]);
            }
        }
        Some((lo, hi))
    }

    /// Trajectory visiting order for one training run.
    pub fn epoch_order<R: Rng>(&self, rng: &mut R) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.trajectories.len()).collect();
        if self.presentation_order == PresentationOrder::ShuffledTrajectories {
            order.shuffle(rng);
        }
        order
    }

    pub fn interpolated(&self, rounds: u32) -> Self {
        Self {
            trajectories: self.trajectories.iter().map(|t| interpolate(t, rounds)).collect(),
            presentation_order: self.presentation_order,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataFormat {
    Csv,
    Json,
}

impl DataFormat {
    /// Guesses the format from a file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "csv" => Some(Self::Csv),
            "json" => Some(Self::Json),
            _ => None,
        }
    }
}

pub fn load_dataset(path: impl AsRef<Path>, format: DataFormat) -> Result<Dataset, DatasetError> {
    let file = File::open(path.as_ref())?;
    match format {
        DataFormat::Csv => read_csv(BufReader::new(file)),
        DataFormat::Json => {
            let ds: Dataset = serde_json::from_reader(BufReader::new(file))?;
            validate(ds)
        }
    }
}

pub fn save_dataset(
    data: &Dataset,
    path: impl AsRef<Path>,
    format: DataFormat,
) -> Result<(), DatasetError> {
    let mut out = BufWriter::new(File::create(path.as_ref())?);
    match format {
        DataFormat::Csv => write_csv(data, &mut out)?,
        DataFormat::Json => serde_json::to_writer_pretty(&mut out, data)?,
    }
    out.flush()?;
    Ok(())
}

fn validate(ds: Dataset) -> Result<Dataset, DatasetError> {
    if ds.is_empty() {
        return Err(DatasetError::Empty);
    }
    for t in &ds.trajectories {
        if t.samples.len() < 2 {
            return Err(DatasetError::TooShort { id: t.id.clone(), len: t.samples.len() });
        }
        if !t.samples.iter().all(JointConfig::is_finite) {
            return Err(DatasetError::NonFinite { id: t.id.clone() });
        }
    }
    Ok(ds)
}

/// Parses the CSV layout described in the module docs.
pub fn read_csv<R: std::io::Read>(reader: R) -> Result<Dataset, DatasetError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut order: Vec<String> = Vec::new();
    let mut groups: HashMap<String, Vec<JointConfig>> = HashMap::new();
    let mut first = true;
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if first {
            first = false;
            if record.get(0).is_some_and(|f| f.eq_ignore_ascii_case("trajectory_id")) {
                continue;
            }
        }
        if record.iter().all(str::is_empty) {
            continue;
        }
        if record.len() != DOF + 1 {
            return Err(DatasetError::Dimension {
                line,
                expected: DOF,
                found: record.len().saturating_sub(1),
            });
        }
        let id = record[0].to_string();
        let mut q = [0.0; DOF];
        for (j, field) in record.iter().skip(1).enumerate() {
            let v: f64 = field.parse().map_err(|_| DatasetError::Parse {
                line,
                message: format!("joint {} is not a number: `{field}`", j + 1),
            })?;
            if !v.is_finite() {
                return Err(DatasetError::Parse {
                    line,
                    message: format!("joint {} is not finite", j + 1),
                });
            }
            q[j] = v;
        }
        if !groups.contains_key(&id) {
            order.push(id.clone());
        }
        groups.entry(id).or_default().push(JointConfig(q));
    }

    if order.is_empty() {
        return Err(DatasetError::Empty);
    }
    let trajectories = order
        .into_iter()
        .map(|id| {
            let samples = groups.remove(&id).unwrap_or_default();
            Trajectory::new(id, samples, TrajectorySource::File)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Dataset::new(trajectories))
}

pub fn write_csv<W: Write>(data: &Dataset, out: W) -> Result<(), DatasetError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["trajectory_id", "j1", "j2", "j3", "j4", "j5", "j6"])?;
    for t in &data.trajectories {
        for s in &t.samples {
            let mut row = Vec::with_capacity(DOF + 1);
            row.push(t.id.clone());
            row.extend(s.0.iter().map(|v| v.to_string()));
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Densifies a trajectory by repeatedly inserting linear midpoints.
///
/// Each round maps `n` samples to `2n - 1`; the originals stay in place at
/// every `2^rounds`-th index.
pub fn interpolate(traj: &Trajectory, rounds: u32) -> Trajectory {
    let mut samples = traj.samples.clone();
    for _ in 0..rounds {
        let mut next = Vec::with_capacity(samples.len() * 2);
        for pair in samples.windows(2) {
            next.push(pair[0]);
            next.push(pair[0].midpoint(&pair[1]));
        }
        if let Some(last) = samples.last() {
            next.push(*last);
        }
        samples = next;
    }
    Trajectory {
        id: traj.id.clone(),
        samples,
        source: if rounds == 0 { traj.source } else { TrajectorySource::Interpolated },
    }
}

/// Where synthetic trajectories start and end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EndpointLayout {
    /// Start and goal drawn uniformly inside the joint-limit box.
    Uniform,
    /// Start and goal drawn from configurations whose end effector lies on a
    /// regular grid over a horizontal plane (the table), one representative
    /// configuration per grid cell. Found by forward-kinematics rejection
    /// sampling, no inverse kinematics involved.
    TableGrid {
        /// Grid pitch in meters.
        spacing: f64,
        /// Height of the grid plane in meters.
        height: f64,
        /// Accepted distance above/below the plane in meters.
        band: f64,
        /// Random configurations examined while filling the grid.
        candidates: usize,
        /// Working posture the candidates are drawn around, so that every
        /// cell is reached with the same arm configuration family.
        posture: [f64; DOF],
        /// Largest per-joint offset from `posture` in degrees.
        posture_spread: f64,
    },
}

impl Default for EndpointLayout {
    fn default() -> Self {
        Self::TableGrid {
            spacing: 0.05,
            height: 0.05,
            band: 0.025,
            candidates: 20_000,
            posture: [0.0, -90.0, 90.0, -90.0, -90.0, 0.0],
            posture_spread: 60.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticSpec {
    pub n_trajectories: usize,
    pub n_samples: usize,
    pub joint_min: [f64; DOF],
    pub joint_max: [f64; DOF],
    /// Lateral deviation of the curve's inner control points, as a fraction
    /// of the start-goal distance per joint.
    pub bend: f64,
    pub layout: EndpointLayout,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            n_trajectories: 15,
            n_samples: 50,
            joint_min: [-180.0; DOF],
            joint_max: [180.0; DOF],
            bend: 0.2,
            layout: EndpointLayout::default(),
        }
    }
}

impl SyntheticSpec {
    fn validate(&self) -> Result<(), DatasetError> {
        if self.n_trajectories == 0 {
            return Err(DatasetError::Config("n_trajectories must be positive".into()));
        }
        if self.n_samples < 2 {
            return Err(DatasetError::Config("n_samples must be at least 2".into()));
        }
        for j in 0..DOF {
            let (lo, hi) = (self.joint_min[j], self.joint_max[j]);
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(DatasetError::Config(format!("joint {} has an invalid limit range", j + 1)));
            }
        }
        if !(self.bend.is_finite() && self.bend >= 0.0) {
            return Err(DatasetError::Config("bend must be non-negative".into()));
        }
        if let EndpointLayout::TableGrid { spacing, band, candidates, posture, posture_spread, .. } = &self.layout {
            if !(*spacing > 0.0 && *band > 0.0 && *candidates > 0) {
                return Err(DatasetError::Config("table grid needs positive spacing, band and candidates".into()));
            }
            if !(posture.iter().all(|v| v.is_finite()) && *posture_spread > 0.0) {
                return Err(DatasetError::Config("table grid needs a finite posture and a positive spread".into()));
            }
        }
        Ok(())
    }

    fn random_config<R: Rng>(&self, rng: &mut R) -> JointConfig {
        JointConfig(std::array::from_fn(|j| {
            let (lo, hi) = (self.joint_min[j], self.joint_max[j]);
            if lo < hi { rng.gen_range(lo..=hi) } else { lo }
        }))
    }

    fn clamp(&self, mut q: JointConfig) -> JointConfig {
        for j in 0..DOF {
            q[j] = q[j].clamp(self.joint_min[j], self.joint_max[j]);
        }
        q
    }
}

/// Generates smooth random trajectories; fully determined by `(spec, seed)`.
///
/// Each trajectory is a cubic Bézier curve in joint space from a start to a
/// goal configuration, sampled at uniform curve parameter.
pub fn generate_synthetic(spec: &SyntheticSpec, seed: u64) -> Result<Dataset, DatasetError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let anchors = match &spec.layout {
        EndpointLayout::Uniform => None,
        EndpointLayout::TableGrid { spacing, height, band, candidates, posture, posture_spread } => {
            let arm = ArmModel::ur3();
            let grid = TableGrid { spacing: *spacing, height: *height, band: *band, candidates: *candidates };
            let anchors = table_grid_anchors(spec, &arm, &grid, JointConfig(*posture), *posture_spread, &mut rng);
            if anchors.len() < 2 {
                return Err(DatasetError::Config(
                    "table grid layout found fewer than two reachable cells".into(),
                ));
            }
            Some(anchors)
        }
    };

    let mut trajectories = Vec::with_capacity(spec.n_trajectories);
    for k in 0..spec.n_trajectories {
        let (start, goal) = match &anchors {
            None => (spec.random_config(&mut rng), spec.random_config(&mut rng)),
            Some(a) => {
                let picks = rand::seq::index::sample(&mut rng, a.len(), 2);
                (a[picks.index(0)], a[picks.index(1)])
            }
        };
        let mut c1 = [0.0; DOF];
        let mut c2 = [0.0; DOF];
        for j in 0..DOF {
            let span = goal[j] - start[j];
            let wiggle = spec.bend * span.abs();
            let n1 = if wiggle > 0.0 { rng.gen_range(-wiggle..=wiggle) } else { 0.0 };
            let n2 = if wiggle > 0.0 { rng.gen_range(-wiggle..=wiggle) } else { 0.0 };
            c1[j] = start[j] + span / 3.0 + n1;
            c2[j] = start[j] + 2.0 * span / 3.0 + n2;
        }
        let (c1, c2) = (spec.clamp(JointConfig(c1)), spec.clamp(JointConfig(c2)));

        let n = spec.n_samples;
        let samples = (0..n)
            .map(|i| {
                let s = i as f64 / (n - 1) as f64;
                let u = 1.0 - s;
                let (b0, b1, b2, b3) = (u * u * u, 3.0 * u * u * s, 3.0 * u * s * s, s * s * s);
                let mut q = [0.0; DOF];
                for j in 0..DOF {
                    q[j] = b0 * start[j] + b1 * c1[j] + b2 * c2[j] + b3 * goal[j];
                }
                spec.clamp(JointConfig(q))
            })
            .collect();
        trajectories.push(Trajectory::new(format!("syn{k:03}"), samples, TrajectorySource::Synthetic)?);
    }
    Ok(Dataset::new(trajectories))
}

struct TableGrid {
    spacing: f64,
    height: f64,
    band: f64,
    candidates: usize,
}

/// One configuration per reachable grid cell: the candidate closest to
/// `posture` among those whose end effector lies in the cell's band.
fn table_grid_anchors<R: Rng>(
    spec: &SyntheticSpec,
    arm: &ArmModel,
    grid: &TableGrid,
    posture: JointConfig,
    spread: f64,
    rng: &mut R,
) -> Vec<JointConfig> {
    // BTreeMap keeps the cell order stable
    let mut best: std::collections::BTreeMap<(i64, i64), (f64, JointConfig)> = Default::default();
    for _ in 0..grid.candidates {
        let mut q = posture;
        for j in 0..DOF {
            q[j] += rng.gen_range(-spread..=spread);
        }
        let q = spec.clamp(q);
        let p = arm.fk(&q).position;
        if (p.z - grid.height).abs() > grid.band {
            continue;
        }
        let cell = ((p.x / grid.spacing).round() as i64, (p.y / grid.spacing).round() as i64);
        let d = q.chebyshev(&posture);
        match best.get(&cell) {
            Some((bd, _)) if *bd <= d => {}
            _ => {
                best.insert(cell, (d, q));
            }
        }
    }
    best.into_values().map(|(_, q)| q).collect()
}
