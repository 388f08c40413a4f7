//! Specification kernels `γ_Λ(f | ω)` by self-normalised importance
//! sampling against the reference Poisson process, and DLR consistency
//! checks.

mod dlr;
mod observable;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{MarkedPoint, Window};
use crate::models::PreModification;
use crate::numeric::{neumaier, NeumaierSum};
use crate::sampling::{sample_poisson_points, stream_rng};

pub use dlr::{dlr_consistency_check, DlrReport};
pub use observable::Observable;

/// Sample size, batch count and seed of an importance-sampling run.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub samples: usize,
    pub batches: usize,
    pub seed: u64,
}

impl Budget {
    pub fn new(samples: usize, seed: u64) -> Self {
        Budget {
            samples,
            batches: 20.min(samples.max(1)),
            seed,
        }
    }

    fn batch_sizes(&self) -> Vec<usize> {
        let b = self.batches.clamp(1, self.samples.max(1));
        (0..b)
            .map(|i| self.samples / b + usize::from(i < self.samples % b))
            .collect()
    }
}

/// Monte Carlo estimate with its standard error and effective sample size.
#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    pub ess: f64,
    pub samples: usize,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate {
            value,
            std_error: 0.0,
            ess: f64::INFINITY,
            samples: 0,
        }
    }
}

/// Self-normalised ratio `Σ w f / Σ w` from log weights, with a batch-means
/// standard error of the linearised estimator.
pub(crate) fn weighted_ratio(batches: &[Vec<(f64, f64)>]) -> Result<Estimate> {
    let max = batches
        .iter()
        .flatten()
        .map(|(lw, _)| *lw)
        .fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Err(Error::DegenerateWeights);
    }
    let w = |lw: f64| (lw - max).exp();
    let total_w = neumaier(batches.iter().flatten().map(|(lw, _)| w(*lw)));
    let total_wf = neumaier(
        batches
            .iter()
            .flatten()
            .filter(|(lw, _)| *lw > f64::NEG_INFINITY)
            .map(|(lw, f)| w(*lw) * f),
    );
    let sum_w2 = neumaier(batches.iter().flatten().map(|(lw, _)| w(*lw).powi(2)));
    let value = total_wf / total_w;
    let n: usize = batches.iter().map(Vec::len).sum();
    let b = batches.len();
    let std_error = if b < 2 {
        f64::NAN
    } else {
        // U_b has mean zero and (1/B) Σ U_b ≈ value - truth
        let mut acc = NeumaierSum::new();
        for batch in batches {
            let u: f64 = batch
                .iter()
                .filter(|(lw, _)| *lw > f64::NEG_INFINITY)
                .map(|(lw, f)| w(*lw) * (f - value))
                .sum::<f64>()
                * b as f64
                / total_w;
            acc.add(u * u);
        }
        (acc.value() / (b as f64 * (b as f64 - 1.0))).sqrt()
    };
    Ok(Estimate {
        value,
        std_error,
        ess: total_w * total_w / sum_w2,
        samples: n,
    })
}

/// The kernel `γ_Λ` of a pre-modification.
pub struct SpecificationKernel<'m> {
    model: &'m dyn PreModification,
    lam: Window,
}

impl<'m> SpecificationKernel<'m> {
    pub fn new(model: &'m dyn PreModification, lam: Window) -> Result<Self> {
        lam.validate()?;
        Ok(SpecificationKernel { model, lam })
    }

    pub fn window(&self) -> &Window {
        &self.lam
    }

    /// `(log h_Λ(ζ ω_{Λᶜ}), f(ζ ω_{Λᶜ}))` for reference samples `ζ` in `Λ`.
    fn draw(&self, f: &Observable, exterior: &[MarkedPoint], budget: &Budget) -> Result<Vec<Vec<(f64, f64)>>> {
        let intensities = self.model.reference_intensities();
        let sizes = budget.batch_sizes();
        let batches = crate::par::map_indices(sizes.len(), |b| -> Result<Vec<(f64, f64)>> {
            let mut rng = stream_rng(budget.seed, b as u64);
            let mut out = Vec::with_capacity(sizes[b]);
            for _ in 0..sizes[b] {
                let mut omega = sample_poisson_points(&self.lam, &intensities, &mut rng)?;
                omega.extend_from_slice(exterior);
                out.push((self.model.log_weight(&self.lam, &omega), f.eval(&omega)));
            }
            Ok(out)
        });
        batches.into_iter().collect()
    }

    fn exterior_only(&self, exterior: &[MarkedPoint]) -> Vec<MarkedPoint> {
        exterior
            .iter()
            .filter(|p| !self.lam.contains(&p.pos))
            .cloned()
            .collect()
    }

    /// `γ_Λ(f | ω)`; only the part of `exterior` outside `Λ` is used.
    pub fn apply(&self, f: &Observable, exterior: &[MarkedPoint], budget: &Budget) -> Result<Estimate> {
        let ext = self.exterior_only(exterior);
        if !self.model.admits(&self.lam, &ext) {
            return Err(Error::Inadmissible);
        }
        if let Some(c) = f.constant() {
            return Ok(Estimate::exact(c));
        }
        if f.exterior_measurable(&self.lam) {
            return Ok(Estimate::exact(f.eval(&ext)));
        }
        if budget.samples == 0 {
            return Err(Error::InvalidParameter("zero samples".into()));
        }
        let est = weighted_ratio(&self.draw(f, &ext, budget)?)?;
        if est.ess < 0.01 * budget.samples as f64 {
            log::warn!(
                "effective sample size {:.1} below 1% of {} samples",
                est.ess,
                budget.samples
            );
        }
        Ok(est)
    }

    /// `Z_Λ(ω) = E[h_Λ(ζ ω_{Λᶜ})]` under the reference process.
    pub fn partition_function(&self, exterior: &[MarkedPoint], budget: &Budget) -> Result<Estimate> {
        let ext = self.exterior_only(exterior);
        if budget.samples < 2 {
            return Err(Error::InvalidParameter("need at least two samples".into()));
        }
        let draws: Vec<f64> = self
            .draw(&Observable::Constant { value: 0.0 }, &ext, budget)?
            .into_iter()
            .flatten()
            .map(|(lw, _)| lw.exp())
            .collect();
        let n = draws.len() as f64;
        let mean = neumaier(draws.iter().cloned()) / n;
        let var = neumaier(draws.iter().map(|w| (w - mean).powi(2))) / (n - 1.0);
        let sum_w2 = neumaier(draws.iter().map(|w| w * w));
        Ok(Estimate {
            value: mean,
            std_error: (var / n).sqrt(),
            ess: if sum_w2 > 0.0 { (mean * n).powi(2) / sum_w2 } else { 0.0 },
            samples: draws.len(),
        })
    }
}

/// Free-function form of [`SpecificationKernel::apply`].
pub fn kernel_apply(
    model: &dyn PreModification,
    lam: &Window,
    f: &Observable,
    exterior: &[MarkedPoint],
    budget: &Budget,
) -> Result<Estimate> {
    SpecificationKernel::new(model, lam.clone())?.apply(f, exterior, budget)
}
