use serde::{Deserialize, Serialize};

use crate::geometry::{cluster_decompose, Mark, MarkedPoint, Point, Window};

/// Bounded local observables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Observable {
    /// Number of points in `region`, optionally of one mark.
    Count {
        region: Window,
        mark: Option<Mark>,
    },
    /// Fraction of `+` points in `region`, zero when empty.
    PlusFraction {
        region: Window,
    },
    /// Number of clusters of radius-`r` balls meeting `region`.
    ClusterCount {
        region: Window,
        r: f64,
    },
    /// Whether no two points of different marks are closer than `2r`.
    HardcoreValid {
        r: f64,
    },
    Constant {
        value: f64,
    },
}

impl Observable {
    pub fn eval(&self, omega: &[MarkedPoint]) -> f64 {
        match self {
            Observable::Count { region, mark } => omega
                .iter()
                .filter(|p| region.contains(&p.pos) && mark.is_none_or(|m| p.mark == m))
                .count() as f64,
            Observable::PlusFraction { region } => {
                let inside: Vec<&MarkedPoint> = omega.iter().filter(|p| region.contains(&p.pos)).collect();
                if inside.is_empty() {
                    0.0
                } else {
                    inside.iter().filter(|p| p.mark == Mark::PLUS).count() as f64 / inside.len() as f64
                }
            }
            Observable::ClusterCount { region, r } => {
                let pos: Vec<Point> = omega.iter().map(|p| p.pos.clone()).collect();
                cluster_decompose(&pos, *r)
                    .blocks
                    .iter()
                    .filter(|b| b.iter().any(|&i| region.contains(&pos[i])))
                    .count() as f64
            }
            Observable::HardcoreValid { r } => {
                let pos: Vec<Point> = omega.iter().map(|p| p.pos.clone()).collect();
                let ok = cluster_decompose(&pos, *r)
                    .blocks
                    .iter()
                    .all(|b| b.iter().all(|&i| omega[i].mark == omega[b[0]].mark));
                if ok {
                    1.0
                } else {
                    0.0
                }
            }
            Observable::Constant { value } => *value,
        }
    }

    /// Whether the value depends on the configuration outside `lam` only.
    pub fn exterior_measurable(&self, lam: &Window) -> bool {
        match self {
            Observable::Count { region, .. } | Observable::PlusFraction { region } => region.disjoint(lam),
            Observable::Constant { .. } => true,
            _ => false,
        }
    }

    pub fn constant(&self) -> Option<f64> {
        match self {
            Observable::Constant { value } => Some(*value),
            _ => None,
        }
    }
}
