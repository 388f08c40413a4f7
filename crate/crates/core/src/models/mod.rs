//! Pre-modifications `h_Λ` of a marked Poisson reference process.
//!
//! A pre-modification is given by its log weight `log h_Λ(ω)`, with
//! `f64::NEG_INFINITY` standing for a vanishing weight. Implementations must
//! satisfy `h_Λ(ω) h_Δ(ω_{Λᶜ}) = h_Δ(ω)` for `Λ ⊆ Δ`.

mod hardcore;
mod potts;
mod swap;
mod wrm;

use crate::geometry::{MarkedPoint, Window};

pub use hardcore::HardcoreWr;
pub use potts::{potts_pair_potential, PottsGas, StepPotential};
pub use swap::{premod_swap_check, SwapReport};
pub use wrm::{critical_time_bisection, gibbs_threshold, Convention, TimeEvolvedWrm, WrmParams};

pub trait PreModification: Send + Sync {
    /// `log h_Λ(ω)`, `-∞` when the weight is zero.
    fn log_weight(&self, lam: &Window, omega: &[MarkedPoint]) -> f64;

    /// Intensities of the reference process, one per mark.
    fn reference_intensities(&self) -> Vec<f64>;

    /// Declared interaction range, if finite.
    fn range(&self) -> Option<f64> {
        None
    }

    /// Distance below which points interact; hyperedges not connected at
    /// this threshold carry no vacuum potential.
    fn connection_threshold(&self) -> Option<f64> {
        None
    }

    /// Whether `h_Λ(ω_Λ ω_{Λᶜ}) > 0` for some interior, here tested with the
    /// empty interior.
    fn admits(&self, lam: &Window, exterior: &[MarkedPoint]) -> bool {
        self.log_weight(lam, exterior) > f64::NEG_INFINITY
    }

    fn name(&self) -> String;
}

impl<M: PreModification + ?Sized> PreModification for &M {
    fn log_weight(&self, lam: &Window, omega: &[MarkedPoint]) -> f64 {
        (**self).log_weight(lam, omega)
    }
    fn reference_intensities(&self) -> Vec<f64> {
        (**self).reference_intensities()
    }
    fn range(&self) -> Option<f64> {
        (**self).range()
    }
    fn connection_threshold(&self) -> Option<f64> {
        (**self).connection_threshold()
    }
    fn admits(&self, lam: &Window, exterior: &[MarkedPoint]) -> bool {
        (**self).admits(lam, exterior)
    }
    fn name(&self) -> String {
        (**self).name()
    }
}

impl<M: PreModification + ?Sized> PreModification for Box<M> {
    fn log_weight(&self, lam: &Window, omega: &[MarkedPoint]) -> f64 {
        (**self).log_weight(lam, omega)
    }
    fn reference_intensities(&self) -> Vec<f64> {
        (**self).reference_intensities()
    }
    fn range(&self) -> Option<f64> {
        (**self).range()
    }
    fn connection_threshold(&self) -> Option<f64> {
        (**self).connection_threshold()
    }
    fn admits(&self, lam: &Window, exterior: &[MarkedPoint]) -> bool {
        (**self).admits(lam, exterior)
    }
    fn name(&self) -> String {
        (**self).name()
    }
}

/// The reference process itself, `h ≡ 1`.
#[derive(Clone, Debug)]
pub struct Unmodified {
    pub intensities: Vec<f64>,
}

impl PreModification for Unmodified {
    fn log_weight(&self, _lam: &Window, _omega: &[MarkedPoint]) -> f64 {
        0.0
    }
    fn reference_intensities(&self) -> Vec<f64> {
        self.intensities.clone()
    }
    fn range(&self) -> Option<f64> {
        Some(0.0)
    }
    fn connection_threshold(&self) -> Option<f64> {
        Some(0.0)
    }
    fn name(&self) -> String {
        "poisson".into()
    }
}

/// Negative control: tilts a model by `β |ω_Λ| vol(Λ)`, which breaks the
/// consistency of the weights across volumes.
pub struct VolumeTilt<M> {
    pub inner: M,
    pub beta: f64,
}

impl<M: PreModification> PreModification for VolumeTilt<M> {
    fn log_weight(&self, lam: &Window, omega: &[MarkedPoint]) -> f64 {
        let inside = omega.iter().filter(|p| lam.contains(&p.pos)).count();
        self.inner.log_weight(lam, omega) + self.beta * inside as f64 * lam.volume()
    }
    fn reference_intensities(&self) -> Vec<f64> {
        self.inner.reference_intensities()
    }
    fn name(&self) -> String {
        format!("{}+tilt({})", self.inner.name(), self.beta)
    }
}
