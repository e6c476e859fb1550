use serde::{Deserialize, Serialize};

/// Distance between joint-angle vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMetric {
    /// Plain Euclidean distance on the raw angles.
    #[default]
    Euclid,
    /// Euclidean distance over periodic per-joint differences
    /// `min(|Δ| mod 360, 360 − |Δ| mod 360)`.
    #[serde(alias = "euclid+cos", alias = "euclid + cos")]
    EuclidPlusCos,
}

impl DistanceMetric {
    #[inline]
    pub fn joint_delta(self, a: f64, b: f64) -> f64 {
        match self {
            Self::Euclid => (a - b).abs(),
            Self::EuclidPlusCos => {
                let d = (a - b).abs().rem_euclid(360.0);
                d.min(360.0 - d)
            }
        }
    }

    #[inline]
    pub fn distance_sq(self, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        match self {
            Self::Euclid => a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum(),
            Self::EuclidPlusCos => a
                .iter()
                .zip(b)
                .map(|(x, y)| {
                    let d = self.joint_delta(*x, *y);
                    d * d
                })
                .sum(),
        }
    }

    #[inline]
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        self.distance_sq(a, b).sqrt()
    }
}

impl std::fmt::Display for DistanceMetric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Euclid => "euclid",
            Self::EuclidPlusCos => "euclid_plus_cos",
        })
    }
}
