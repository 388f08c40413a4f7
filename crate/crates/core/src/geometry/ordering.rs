use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::Point;
use crate::error::{Error, Result};

/// Total orders on `R^d` used to pick cell anchors.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointOrder {
    /// Euclidean norm, then hyperspherical angles, then coordinates.
    Cyclic,
    /// Coordinates in order; invariant under translations.
    Lexicographic,
}

fn lex(a: &Point, b: &Point) -> Ordering {
    for (x, y) in a.coords().iter().zip(b.coords()) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// Hyperspherical angles `φ_k = atan2(|x_{k+1..}|, x_k)` with the last one
/// signed, in `[-π, π]`.
fn angles(p: &Point) -> Vec<f64> {
    let c = p.coords();
    let d = c.len();
    if d < 2 {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(d - 1);
    for k in 0..d - 2 {
        let tail = c[k + 1..].iter().map(|x| x * x).sum::<f64>().sqrt();
        out.push(tail.atan2(c[k]));
    }
    out.push(c[d - 1].atan2(c[d - 2]));
    out
}

impl PointOrder {
    /// Total comparison; equal only for identical points.
    pub fn cmp(&self, a: &Point, b: &Point) -> Ordering {
        match self {
            PointOrder::Lexicographic => lex(a, b),
            PointOrder::Cyclic => {
                let na: f64 = a.coords().iter().map(|x| x * x).sum();
                let nb: f64 = b.coords().iter().map(|x| x * x).sum();
                na.total_cmp(&nb)
                    .then_with(|| {
                        angles(a)
                            .iter()
                            .zip(angles(b).iter())
                            .map(|(x, y)| x.total_cmp(y))
                            .find(|o| *o != Ordering::Equal)
                            .unwrap_or(Ordering::Equal)
                    })
                    .then_with(|| lex(a, b))
            }
        }
    }

    /// `a < b`, failing on equal points.
    pub fn less(&self, a: &Point, b: &Point) -> Result<bool> {
        match self.cmp(a, b) {
            Ordering::Less => Ok(true),
            Ordering::Greater => Ok(false),
            Ordering::Equal => Err(Error::EqualPoints),
        }
    }

    /// Index of the least point, failing if it is not unique.
    pub fn argmin(&self, points: &[&Point]) -> Result<usize> {
        let mut best = 0;
        for i in 1..points.len() {
            match self.cmp(points[i], points[best]) {
                Ordering::Less => best = i,
                Ordering::Equal => return Err(Error::EqualPoints),
                Ordering::Greater => {}
            }
        }
        Ok(best)
    }
}
