use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::Point;
use crate::error::{Error, Result};

/// Norm used for distances between points and windows.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    Euclidean,
    Max,
}

/// A closed bounded observation window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Window {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
}

impl Window {
    pub fn new_box(lo: &[f64], hi: &[f64]) -> Result<Window> {
        let w = Window::Box {
            lo: lo.to_vec(),
            hi: hi.to_vec(),
        };
        w.validate()?;
        Ok(w)
    }

    pub fn new_ball(center: &[f64], radius: f64) -> Result<Window> {
        let w = Window::Ball {
            center: center.to_vec(),
            radius,
        };
        w.validate()?;
        Ok(w)
    }

    /// `[0, side]^d`.
    pub fn unit_box(dim: usize, side: f64) -> Window {
        Window::Box {
            lo: vec![0.0; dim],
            hi: vec![side; dim],
        }
    }

    /// `[-half, half]^d`.
    pub fn centered_box(dim: usize, half: f64) -> Window {
        Window::Box {
            lo: vec![-half; dim],
            hi: vec![half; dim],
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Window::Box { lo, hi } => {
                if lo.is_empty() || lo.len() != hi.len() {
                    return Err(Error::InvalidWindow("box corners disagree".into()));
                }
                if lo.iter().chain(hi).any(|c| !c.is_finite()) {
                    return Err(Error::InvalidWindow("non-finite corner".into()));
                }
                if lo.iter().zip(hi).any(|(l, h)| l > h) {
                    return Err(Error::InvalidWindow("box has lo > hi".into()));
                }
            }
            Window::Ball { center, radius } => {
                if center.is_empty() || center.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidWindow("bad ball center".into()));
                }
                if !(radius.is_finite() && *radius >= 0.0) {
                    return Err(Error::InvalidWindow("bad ball radius".into()));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            Window::Box { lo, .. } => lo.len(),
            Window::Ball { center, .. } => center.len(),
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        match self {
            Window::Box { lo, hi } => p
                .coords()
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(x, (l, h))| l <= x && x <= h),
            Window::Ball { center, radius } => p.dist(&Point::new(center)) <= *radius,
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            Window::Box { lo, hi } => lo.iter().zip(hi).map(|(l, h)| h - l).product(),
            Window::Ball { center, radius } => ball_volume(center.len(), *radius),
        }
    }

    /// Distance from `p` to the window, zero inside.
    pub fn distance(&self, p: &Point, norm: Norm) -> f64 {
        match self {
            Window::Box { lo, hi } => {
                let gaps = p
                    .coords()
                    .iter()
                    .zip(lo.iter().zip(hi))
                    .map(|(x, (l, h))| (l - x).max(x - h).max(0.0));
                match norm {
                    Norm::Euclidean => gaps.map(|g| g * g).sum::<f64>().sqrt(),
                    Norm::Max => gaps.fold(0.0, f64::max),
                }
            }
            Window::Ball { center, radius } => match norm {
                Norm::Euclidean => (p.dist(&Point::new(center)) - radius).max(0.0),
                Norm::Max => {
                    // smallest s with the cube of half-side s around p
                    // meeting the ball; bisection on a monotone predicate
                    let c = Point::new(center);
                    if p.dist(&c) <= *radius {
                        return 0.0;
                    }
                    let meets = |s: f64| {
                        let cube = Window::Box {
                            lo: p.coords().iter().map(|x| x - s).collect(),
                            hi: p.coords().iter().map(|x| x + s).collect(),
                        };
                        cube.distance(&c, Norm::Euclidean) <= *radius
                    };
                    let (mut lo, mut hi) = (0.0, p.dist_with(&c, Norm::Max));
                    for _ in 0..200 {
                        let mid = 0.5 * (lo + hi);
                        if mid <= lo || mid >= hi {
                            break;
                        }
                        if meets(mid) {
                            hi = mid;
                        } else {
                            lo = mid;
                        }
                    }
                    hi
                }
            },
        }
    }

    /// Axis-aligned bounding box as `(lo, hi)`.
    pub fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Window::Box { lo, hi } => (lo.clone(), hi.clone()),
            Window::Ball { center, radius } => (
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
        }
    }

    pub fn translated(&self, shift: &[f64]) -> Window {
        match self {
            Window::Box { lo, hi } => Window::Box {
                lo: lo.iter().zip(shift).map(|(a, s)| a + s).collect(),
                hi: hi.iter().zip(shift).map(|(a, s)| a + s).collect(),
            },
            Window::Ball { center, radius } => Window::Ball {
                center: center.iter().zip(shift).map(|(a, s)| a + s).collect(),
                radius: *radius,
            },
        }
    }

    /// Box grown by `by` in every coordinate; a ball grows its radius.
    pub fn enlarged(&self, by: f64) -> Window {
        match self {
            Window::Box { lo, hi } => Window::Box {
                lo: lo.iter().map(|a| a - by).collect(),
                hi: hi.iter().map(|a| a + by).collect(),
            },
            Window::Ball { center, radius } => Window::Ball {
                center: center.clone(),
                radius: radius + by,
            },
        }
    }

    /// Whether `other` is contained in `self`.
    pub fn contains_window(&self, other: &Window) -> bool {
        match (self, other) {
            (Window::Box { lo, hi }, _) => {
                let (olo, ohi) = other.bounds();
                lo.iter().zip(&olo).all(|(a, b)| a <= b) && hi.iter().zip(&ohi).all(|(a, b)| b <= a)
            }
            (Window::Ball { center, radius }, Window::Ball { center: c2, radius: r2 }) => {
                Point::new(center).dist(&Point::new(c2)) + r2 <= *radius
            }
            (Window::Ball { center, radius }, Window::Box { lo, hi }) => {
                // farthest corner
                let far: Vec<f64> = center
                    .iter()
                    .zip(lo.iter().zip(hi))
                    .map(|(c, (l, h))| if (c - l).abs() > (h - c).abs() { *l } else { *h })
                    .collect();
                Point::new(center).dist(&Point::new(&far)) <= *radius
            }
        }
    }

    /// Whether the two windows share no point.
    pub fn disjoint(&self, other: &Window) -> bool {
        match (self, other) {
            (Window::Box { lo, hi }, Window::Box { lo: l2, hi: h2 }) => lo
                .iter()
                .zip(hi)
                .zip(l2.iter().zip(h2))
                .any(|((a, b), (c, d))| b < c || d < a),
            (Window::Ball { center, radius }, w) | (w, Window::Ball { center, radius }) => {
                w.distance(&Point::new(center), Norm::Euclidean) > *radius
            }
        }
    }

    /// The open `r`-neighbourhood `{x : dist(x, self) < r}`.
    pub fn mollify(&self, r: f64) -> Mollified {
        Mollified { base: self.clone(), r }
    }
}

/// Volume of the Euclidean ball of radius `r` in `R^d`.
pub fn ball_volume(d: usize, r: f64) -> f64 {
    // V_d = 2π/d V_{d-2}
    let mut v = if d.is_multiple_of(2) { 1.0 } else { 2.0 };
    let mut k = if d.is_multiple_of(2) { 2 } else { 3 };
    while k <= d {
        v *= 2.0 * std::f64::consts::PI / k as f64;
        k += 2;
    }
    v * r.powi(d as i32)
}

/// Open neighbourhood of a window.
#[derive(Clone, Debug, PartialEq)]
pub struct Mollified {
    pub base: Window,
    pub r: f64,
}

impl Mollified {
    pub fn contains(&self, p: &Point) -> bool {
        self.base.distance(p, Norm::Euclidean) < self.r
    }

    /// A box containing the neighbourhood.
    pub fn bounding_window(&self) -> Window {
        let (lo, hi) = self.base.bounds();
        Window::Box {
            lo: lo.iter().map(|a| a - self.r).collect(),
            hi: hi.iter().map(|a| a + self.r).collect(),
        }
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        match self {
            Window::Box { lo, hi } => write!(f, "box:{},{}", join(lo), join(hi)),
            Window::Ball { center, radius } => write!(f, "ball:{},{}", join(center), radius),
        }
    }
}

/// Parses `box:lo1,..,lod,hi1,..,hid` or `ball:c1,..,cd,R`.
impl FromStr for Window {
    type Err = Error;

    fn from_str(s: &str) -> Result<Window> {
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("window {s:?} lacks a kind prefix")))?;
        let nums: Vec<f64> = rest
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad number {t:?} in window")))
            })
            .collect::<Result<_>>()?;
        match kind {
            "box" => {
                if nums.is_empty() || !nums.len().is_multiple_of(2) {
                    return Err(Error::Parse("box needs 2d numbers".into()));
                }
                let d = nums.len() / 2;
                Window::new_box(&nums[..d], &nums[d..])
            }
            "ball" => {
                if nums.len() < 2 {
                    return Err(Error::Parse("ball needs d+1 numbers".into()));
                }
                let d = nums.len() - 1;
                Window::new_ball(&nums[..d], nums[d])
            }
            other => Err(Error::Parse(format!("unknown window kind {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_roundtrip() {
        let w: Window = "box:0,0,10,5".parse().unwrap();
        assert_eq!(w.volume(), 50.0);
        assert_eq!(w.to_string().parse::<Window>().unwrap(), w);
        let b: Window = "ball:1,2,3".parse().unwrap();
        assert!((b.volume() - 9.0 * std::f64::consts::PI).abs() < 1e-12);
        assert!("disk:1,2".parse::<Window>().is_err());
        assert!("box:1,0,0,1".parse::<Window>().is_err());
    }

    #[test]
    fn ball_volumes() {
        assert!((ball_volume(1, 1.0) - 2.0).abs() < 1e-15);
        assert!((ball_volume(3, 1.0) - 4.0 / 3.0 * std::f64::consts::PI).abs() < 1e-13);
        assert!((ball_volume(4, 1.0) - std::f64::consts::PI.powi(2) / 2.0).abs() < 1e-13);
    }

    #[test]
    fn box_distance() {
        let w = Window::unit_box(2, 1.0);
        let p = Point::new(&[4.0, 5.0]);
        assert_eq!(w.distance(&p, Norm::Euclidean), 5.0);
        assert_eq!(w.distance(&p, Norm::Max), 4.0);
        assert_eq!(w.distance(&Point::new(&[0.5, 0.5]), Norm::Euclidean), 0.0);
    }
}
