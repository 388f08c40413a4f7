use serde::{Deserialize, Serialize};

use super::{Norm, Point};
use crate::error::{Error, Result};

/// Nondecreasing radii `r_1 <= r_2 <= ...` with `r_m -> ∞`, and the norm
/// they are measured in.
///
/// The first radii are listed explicitly; past the list the schedule grows
/// linearly by `step`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiiSchedule {
    pub norm: Norm,
    radii: Vec<f64>,
    step: f64,
}

impl RadiiSchedule {
    /// `r_m = m * step`.
    pub fn linear(norm: Norm, step: f64) -> Result<Self> {
        Self::explicit(norm, Vec::new(), step)
    }

    pub fn explicit(norm: Norm, radii: Vec<f64>, step: f64) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::InvalidParameter("schedule step must be positive".into()));
        }
        if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::InvalidParameter("radii must be positive".into()));
        }
        if radii.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidParameter("radii must be nondecreasing".into()));
        }
        Ok(RadiiSchedule { norm, radii, step })
    }

    pub fn listed(&self) -> &[f64] {
        &self.radii
    }

    /// `r_m` for `m >= 1`.
    pub fn radius(&self, m: usize) -> f64 {
        assert!(m >= 1, "annuli are indexed from 1");
        let n = self.radii.len();
        if m <= n {
            self.radii[m - 1]
        } else {
            let last = if n == 0 { 0.0 } else { self.radii[n - 1] };
            last + (m - n) as f64 * self.step
        }
    }

    /// Smallest `m >= 1` with `dist <= r_m` (closed balls).
    pub fn index_of_distance(&self, dist: f64) -> usize {
        if let Some(pos) = self.radii.iter().position(|r| dist <= *r) {
            return pos + 1;
        }
        let n = self.radii.len();
        let last = if n == 0 { 0.0 } else { self.radii[n - 1] };
        let mut k = ((dist - last) / self.step).ceil().max(1.0) as usize;
        // guard against rounding in the division
        while k > 1 && dist <= last + (k - 1) as f64 * self.step {
            k -= 1;
        }
        while dist > last + k as f64 * self.step {
            k += 1;
        }
        n + k
    }

    /// Annulus index of `y` relative to `x`.
    pub fn annulus_index(&self, x: &Point, y: &Point) -> usize {
        self.index_of_distance(x.dist_with(y, self.norm))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_balls() {
        let s = RadiiSchedule::linear(Norm::Max, 1.0).unwrap();
        assert_eq!(s.index_of_distance(0.0), 1);
        assert_eq!(s.index_of_distance(1.0), 1);
        assert_eq!(s.index_of_distance(1.0 + 1e-12), 2);
        assert_eq!(s.index_of_distance(2.5), 3);
    }

    #[test]
    fn explicit_then_linear() {
        let s = RadiiSchedule::explicit(Norm::Euclidean, vec![2.0, 2.0, 5.0], 1.0).unwrap();
        assert_eq!(s.index_of_distance(1.0), 1);
        assert_eq!(s.index_of_distance(3.0), 3);
        assert_eq!(s.index_of_distance(5.5), 4);
        assert_eq!(s.radius(5), 7.0);
    }
}
