use crate::geometry::{cluster_decompose, MarkedPoint, Point, Window};

use super::PreModification;

/// Hard-core Widom-Rowlinson gas: points of different species may not come
/// closer than `2r`.
///
/// The indicator is evaluated on all pairs of the configuration, so the
/// weight does not depend on `Λ` and an invalid exterior is inadmissible.
#[derive(Clone, Debug)]
pub struct HardcoreWr {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub r: f64,
}

impl HardcoreWr {
    /// Whether no two points of different marks lie closer than `2r`.
    pub fn valid(&self, omega: &[MarkedPoint]) -> bool {
        let pos: Vec<Point> = omega.iter().map(|p| p.pos.clone()).collect();
        cluster_decompose(&pos, self.r)
            .blocks
            .iter()
            .all(|b| b.iter().all(|&i| omega[i].mark == omega[b[0]].mark))
    }
}

impl PreModification for HardcoreWr {
    fn log_weight(&self, _lam: &Window, omega: &[MarkedPoint]) -> f64 {
        if self.valid(omega) {
            0.0
        } else {
            f64::NEG_INFINITY
        }
    }

    fn reference_intensities(&self) -> Vec<f64> {
        vec![self.lambda_plus, self.lambda_minus]
    }

    fn range(&self) -> Option<f64> {
        Some(2.0 * self.r)
    }

    fn connection_threshold(&self) -> Option<f64> {
        Some(2.0 * self.r)
    }

    fn name(&self) -> String {
        format!("hardcore-wr(r={})", self.r)
    }
}
