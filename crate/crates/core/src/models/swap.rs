use rand::Rng;
use serde::Serialize;

use crate::error::Result;
use crate::geometry::{MarkedPoint, Window};
use crate::sampling::{sample_poisson_points, stream_rng};

use super::PreModification;

/// Outcome of [`premod_swap_check`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SwapReport {
    pub trials: usize,
    /// Largest additive error among trials where both sides are finite.
    pub max_error: f64,
    /// Trials where exactly one side vanishes.
    pub structural_failures: usize,
    /// Trials where both sides vanish.
    pub both_zero: usize,
}

/// Random box `Λ ⊂ Δ ⊂ window`.
fn nested_boxes<R: Rng + ?Sized>(window: &Window, rng: &mut R) -> (Window, Window) {
    let (lo, hi) = window.bounds();
    let mut dlo = Vec::new();
    let mut dhi = Vec::new();
    let mut llo = Vec::new();
    let mut lhi = Vec::new();
    for (l, h) in lo.iter().zip(&hi) {
        let mut a = [rng.random_range(*l..*h), rng.random_range(*l..*h)];
        a.sort_by(f64::total_cmp);
        let mut b = [rng.random_range(a[0]..=a[1]), rng.random_range(a[0]..=a[1])];
        b.sort_by(f64::total_cmp);
        dlo.push(a[0]);
        dhi.push(a[1]);
        llo.push(b[0]);
        lhi.push(b[1]);
    }
    (Window::Box { lo: llo, hi: lhi }, Window::Box { lo: dlo, hi: dhi })
}

/// Checks `h_Δ(ω_Λ ω_{Λᶜ}) h_Λ(ω'_Λ ω_{Λᶜ}) = h_Λ(ω_Λ ω_{Λᶜ}) h_Δ(ω'_Λ ω_{Λᶜ})`
/// in log space on random `Λ ⊂ Δ` inside `window` and Poisson samples at the
/// model's reference intensities.
pub fn premod_swap_check(model: &dyn PreModification, window: &Window, trials: usize, seed: u64) -> Result<SwapReport> {
    let intensities = model.reference_intensities();
    let mut report = SwapReport {
        trials,
        max_error: 0.0,
        structural_failures: 0,
        both_zero: 0,
    };
    for i in 0..trials {
        let mut rng = stream_rng(seed, i as u64);
        let (lam, delta) = nested_boxes(window, &mut rng);
        let omega = sample_poisson_points(window, &intensities, &mut rng)?;
        let omega2 = sample_poisson_points(window, &intensities, &mut rng)?;
        let ext: Vec<MarkedPoint> = omega.iter().filter(|p| !lam.contains(&p.pos)).cloned().collect();
        let zeta: Vec<MarkedPoint> = omega.clone();
        let mut zeta2: Vec<MarkedPoint> = omega2.into_iter().filter(|p| lam.contains(&p.pos)).collect();
        zeta2.extend(ext);
        let lhs = model.log_weight(&delta, &zeta) + model.log_weight(&lam, &zeta2);
        let rhs = model.log_weight(&lam, &zeta) + model.log_weight(&delta, &zeta2);
        match (lhs == f64::NEG_INFINITY, rhs == f64::NEG_INFINITY) {
            (true, true) => report.both_zero += 1,
            (false, false) => report.max_error = report.max_error.max((lhs - rhs).abs()),
            _ => report.structural_failures += 1,
        }
    }
    Ok(report)
}
