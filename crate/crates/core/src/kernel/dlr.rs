use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{MarkedPoint, Window};
use crate::models::PreModification;
use crate::sampling::{derive_seed, sample_poisson_points, stream_rng};

use super::{weighted_ratio, Budget, Estimate, Observable, SpecificationKernel};

/// One-stage `γ_Δ f` against two-stage `γ_Δ γ_Λ f`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DlrReport {
    pub one_stage: Estimate,
    pub two_stage: Estimate,
    pub z: f64,
}

/// Compares `γ_Δ(f | ω)` with `γ_Δ(γ_Λ f | ω)` for `Λ ⊆ Δ`.
///
/// The two-stage estimate draws `outer.samples` configurations in `Δ`,
/// weights them by `h_Δ`, and replaces `f` by an inner estimate of
/// `γ_Λ(f | ·)` with `inner.samples` draws each. The one-stage estimate uses
/// an independent stream. `z` is the difference over the combined standard
/// error.
pub fn dlr_consistency_check(
    model: &dyn PreModification,
    lam: &Window,
    delta: &Window,
    exterior: &[MarkedPoint],
    f: &Observable,
    outer: &Budget,
    inner: &Budget,
) -> Result<DlrReport> {
    if !delta.contains_window(lam) {
        return Err(Error::InvalidParameter("Λ must lie inside Δ".into()));
    }
    let ext: Vec<MarkedPoint> = exterior.iter().filter(|p| !delta.contains(&p.pos)).cloned().collect();
    let k_delta = SpecificationKernel::new(model, delta.clone())?;
    let one_stage = k_delta.apply(f, &ext, outer)?;

    let k_lam = SpecificationKernel::new(model, lam.clone())?;
    let intensities = model.reference_intensities();
    let sizes = outer.batch_sizes();
    let stream_base = sizes.len() as u64;
    let batches = crate::par::map_indices(sizes.len(), |b| -> Result<Vec<(f64, f64)>> {
        // streams disjoint from the one-stage run
        let mut rng = stream_rng(outer.seed, stream_base + b as u64);
        let mut out = Vec::with_capacity(sizes[b]);
        for j in 0..sizes[b] {
            let mut omega = sample_poisson_points(delta, &intensities, &mut rng)?;
            omega.extend_from_slice(&ext);
            let lw = model.log_weight(delta, &omega);
            if lw == f64::NEG_INFINITY {
                out.push((lw, 0.0));
                continue;
            }
            let inner_budget = Budget {
                seed: derive_seed(inner.seed, b as u64, j as u64),
                ..*inner
            };
            let g = k_lam.apply(f, &omega, &inner_budget)?;
            out.push((lw, g.value));
        }
        Ok(out)
    });
    let batches: Vec<Vec<(f64, f64)>> = batches.into_iter().collect::<Result<_>>()?;
    let two_stage = weighted_ratio(&batches)?;
    let se = (one_stage.std_error.powi(2) + two_stage.std_error.powi(2)).sqrt();
    let diff = two_stage.value - one_stage.value;
    let z = if diff == 0.0 { 0.0 } else { diff / se };
    Ok(DlrReport {
        one_stage,
        two_stage,
        z,
    })
}
