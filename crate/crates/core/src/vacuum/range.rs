use rand::Rng;
use serde::Serialize;

use crate::error::Result;
use crate::geometry::MarkedPoint;
use crate::sampling::{stream_rng, uniform_point};

use super::VacuumPotential;

/// Outcome of probing `Φ(η) = 0` for hyperedges wider than the range.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RangeReport {
    pub probes: usize,
    /// Probes whose own weight vanishes; the statement does not apply.
    pub skipped_zero_weight: usize,
    /// Largest `|Φ(η)|` among applicable probes.
    pub max_abs: f64,
    pub violations: usize,
}

/// Samples `η` of size 2 to `max_size` containing a pair farther apart than
/// `range` and checks `Φ(η) = 0` to within `tol`.
pub fn check_finite_range(
    phi: &VacuumPotential<'_>,
    range: f64,
    probes: usize,
    max_size: usize,
    intensities: usize,
    tol: f64,
    seed: u64,
) -> Result<RangeReport> {
    let volume = phi.volume().clone();
    let mut report = RangeReport {
        probes: 0,
        skipped_zero_weight: 0,
        max_abs: 0.0,
        violations: 0,
    };
    let mut rng = stream_rng(seed, 0);
    let mut attempts = 0usize;
    while report.probes < probes {
        attempts += 1;
        if attempts > 1000 * probes.max(1) {
            break;
        }
        let size = rng.random_range(2..=max_size.max(2));
        let eta: Vec<MarkedPoint> = (0..size)
            .map(|_| MarkedPoint {
                pos: uniform_point(&volume, &mut rng),
                mark: crate::geometry::Mark(rng.random_range(0..intensities.max(1)) as u8),
            })
            .collect();
        let wide = (0..size).any(|i| (i + 1..size).any(|j| eta[i].pos.dist(&eta[j].pos) > range));
        if !wide {
            continue;
        }
        report.probes += 1;
        if phi.log_ratio(&eta)? == f64::NEG_INFINITY {
            report.skipped_zero_weight += 1;
            continue;
        }
        let v = phi.phi(&eta)?;
        report.max_abs = report.max_abs.max(v.abs());
        if !(v.abs() <= tol) {
            report.violations += 1;
        }
    }
    Ok(report)
}
