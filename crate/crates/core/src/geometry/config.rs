use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use super::{Norm, Window};
use crate::error::{Error, Result};

/// A point of `R^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point(SmallVec<[f64; 3]>);

impl Point {
    pub fn new(coords: &[f64]) -> Self {
        Point(SmallVec::from_slice(coords))
    }

    pub fn origin(dim: usize) -> Self {
        Point(SmallVec::from_elem(0.0, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    /// Euclidean distance.
    pub fn dist(&self, other: &Point) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn dist_with(&self, other: &Point, norm: Norm) -> f64 {
        match norm {
            Norm::Euclidean => self.dist(other),
            Norm::Max => self
                .0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        }
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn translated(&self, shift: &[f64]) -> Point {
        Point(self.0.iter().zip(shift).map(|(a, s)| a + s).collect())
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(SmallVec::from_vec(v))
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.0.into_vec()
    }
}

/// A mark from a finite alphabet. Marks 0 and 1 are the WRM spins `+`, `-`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mark(pub u8);

impl Mark {
    pub const PLUS: Mark = Mark(0);
    pub const MINUS: Mark = Mark(1);

    pub fn flipped(self) -> Mark {
        match self {
            Mark::PLUS => Mark::MINUS,
            Mark::MINUS => Mark::PLUS,
            m => m,
        }
    }
}

impl fmt::Display for Mark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Mark::PLUS => write!(f, "+"),
            Mark::MINUS => write!(f, "-"),
            Mark(k) => write!(f, "{k}"),
        }
    }
}

impl std::str::FromStr for Mark {
    type Err = Error;

    fn from_str(s: &str) -> Result<Mark> {
        match s {
            "+" => Ok(Mark::PLUS),
            "-" => Ok(Mark::MINUS),
            other => other
                .parse::<u8>()
                .map(Mark)
                .map_err(|_| Error::Parse(format!("bad mark {other:?}"))),
        }
    }
}

impl Serialize for Mark {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Mark {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Mark, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkedPoint {
    #[serde(rename = "x")]
    pub pos: Point,
    pub mark: Mark,
}

impl MarkedPoint {
    pub fn new(coords: &[f64], mark: Mark) -> Self {
        MarkedPoint {
            pos: Point::new(coords),
            mark,
        }
    }

    /// Bit pattern used for hashing and exact comparisons.
    pub(crate) fn key(&self) -> impl Iterator<Item = u64> + '_ {
        self.pos
            .coords()
            .iter()
            .map(|c| c.to_bits())
            .chain(std::iter::once(self.mark.0 as u64))
    }
}

/// A finite simple marked configuration inside an observation window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConfiguration")]
pub struct MarkedConfiguration {
    dim: usize,
    window: Window,
    points: Vec<MarkedPoint>,
}

#[derive(Deserialize)]
struct RawConfiguration {
    dim: usize,
    window: Window,
    points: Vec<MarkedPoint>,
}

impl TryFrom<RawConfiguration> for MarkedConfiguration {
    type Error = Error;

    fn try_from(raw: RawConfiguration) -> Result<Self> {
        MarkedConfiguration::new(raw.dim, raw.window, raw.points)
    }
}

impl MarkedConfiguration {
    /// Validates dimensions, finiteness, containment and simplicity.
    pub fn new(dim: usize, window: Window, points: Vec<MarkedPoint>) -> Result<Self> {
        window.validate()?;
        if window.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: window.dim(),
            });
        }
        for (i, p) in points.iter().enumerate() {
            if p.pos.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.pos.dim(),
                });
            }
            if p.pos.coords().iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidParameter(format!("point {i} is not finite")));
            }
            if !window.contains(&p.pos) {
                return Err(Error::OutsideWindow(i));
            }
        }
        if let Some(i) = first_duplicate(&points) {
            return Err(Error::DuplicatePoint(i));
        }
        Ok(MarkedConfiguration { dim, window, points })
    }

    pub fn empty(window: Window) -> Self {
        MarkedConfiguration {
            dim: window.dim(),
            window,
            points: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn points(&self) -> &[MarkedPoint] {
        &self.points
    }

    pub fn into_points(self) -> Vec<MarkedPoint> {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn positions(&self) -> Vec<Point> {
        self.points.iter().map(|p| p.pos.clone()).collect()
    }

    /// Splits into the parts inside and outside `lam`.
    pub fn split(&self, lam: &Window) -> (Vec<MarkedPoint>, Vec<MarkedPoint>) {
        self.points.iter().cloned().partition(|p| lam.contains(&p.pos))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

fn first_duplicate(points: &[MarkedPoint]) -> Option<usize> {
    let mut keys: Vec<(Vec<u64>, usize)> = points
        .iter()
        .enumerate()
        .map(|(i, p)| (p.pos.coords().iter().map(|c| c.to_bits()).collect(), i))
        .collect();
    keys.sort();
    keys.windows(2)
        .filter(|w| w[0].0 == w[1].0)
        .map(|w| w[0].1.max(w[1].1))
        .min()
}
