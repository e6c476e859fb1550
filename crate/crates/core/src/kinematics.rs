//! Forward kinematics of a 6-DOF serial arm described by standard
//! Denavit-Hartenberg parameters.
//!
//! Joint angles enter in degrees; DH angles are stored in radians.

use std::path::Path;

use nalgebra::{Matrix3, Matrix4, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::JointConfig;
use crate::DOF;

const UR3_DH: &str = include_str!("../data/ur3_dh.json");

#[derive(Debug, Error)]
pub enum KinematicsError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed arm model: {0}")]
    Json(#[from] serde_json::Error),
    #[error("arm model needs exactly {DOF} DH rows, found {0}")]
    RowCount(usize),
    #[error("arm model row {0} has a non-finite entry")]
    NonFinite(usize),
}

/// One standard DH row: `Rot_z(θ + offset) · Trans_z(d) · Trans_x(a) · Rot_x(α)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DhRow {
    pub a: f64,
    pub alpha: f64,
    pub d: f64,
    #[serde(default)]
    pub theta_offset: f64,
}

impl DhRow {
    fn transform(&self, theta: f64) -> Matrix4<f64> {
        let (st, ct) = (theta + self.theta_offset).sin_cos();
        let (sa, ca) = self.alpha.sin_cos();
        Matrix4::new(
            ct, -st * ca, st * sa, self.a * ct,
            st, ct * ca, -ct * sa, self.a * st,
            0.0, sa, ca, self.d,
            0.0, 0.0, 0.0, 1.0,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmModel {
    #[serde(default)]
    pub name: String,
    pub rows: Vec<DhRow>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    /// End-effector position in meters.
    pub position: Vector3<f64>,
    pub rotation: Matrix3<f64>,
}

impl ArmModel {
    pub fn new(name: impl Into<String>, rows: Vec<DhRow>) -> Result<Self, KinematicsError> {
        let model = Self { name: name.into(), rows };
        model.validate()?;
        Ok(model)
    }

    /// The UR3 with the manufacturer's published DH table.
    pub fn ur3() -> Self {
        Self::from_json(UR3_DH).expect("bundled UR3 model is valid")
    }

    pub fn from_json(text: &str) -> Result<Self, KinematicsError> {
        let model: Self = serde_json::from_str(text)?;
        model.validate()?;
        Ok(model)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, KinematicsError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    fn validate(&self) -> Result<(), KinematicsError> {
        if self.rows.len() != DOF {
            return Err(KinematicsError::RowCount(self.rows.len()));
        }
        for (i, r) in self.rows.iter().enumerate() {
            if ![r.a, r.alpha, r.d, r.theta_offset].iter().all(|v| v.is_finite()) {
                return Err(KinematicsError::NonFinite(i));
            }
        }
        Ok(())
    }

    /// Upper bound on the end-effector distance from the base: `Σ |a| + |d|`.
    pub fn reach(&self) -> f64 {
        self.rows.iter().map(|r| r.a.abs() + r.d.abs()).sum()
    }

    pub fn transform(&self, q: &JointConfig) -> Matrix4<f64> {
        self.rows
            .iter()
            .zip(q.0.iter())
            .fold(Matrix4::identity(), |acc, (row, deg)| acc * row.transform(deg.to_radians()))
    }

    pub fn fk(&self, q: &JointConfig) -> Pose {
        let t = self.transform(q);
        Pose {
            position: Vector3::new(t[(0, 3)], t[(1, 3)], t[(2, 3)]),
            rotation: t.fixed_view::<3, 3>(0, 0).into_owned(),
        }
    }
}
