use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{neighbor_pairs, MarkedPoint, Point, Window};

use super::PreModification;

/// Radial step `J·1{|d| < R}`; `J = +∞` gives a hard core.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepPotential {
    pub strength: f64,
    pub range: f64,
}

impl StepPotential {
    pub const ZERO: StepPotential = StepPotential {
        strength: 0.0,
        range: 0.0,
    };

    pub fn value(&self, d: f64) -> f64 {
        if d < self.range && self.strength != 0.0 {
            self.strength
        } else {
            0.0
        }
    }
}

/// Continuum Potts gas with `q` colours and pair energy
/// `1{σ_x ≠ σ_y} φ(x-y) + ψ(x-y)`.
#[derive(Clone, Debug)]
pub struct PottsGas {
    intensities: Vec<f64>,
    phi: StepPotential,
    psi: StepPotential,
}

impl PottsGas {
    pub fn new(intensities: Vec<f64>, phi: StepPotential, psi: StepPotential) -> Result<Self> {
        if intensities.len() < 2 || intensities.len() > 256 {
            return Err(Error::InvalidParameter("Potts needs 2..=256 colours".into()));
        }
        for s in [phi, psi] {
            if s.strength.is_nan() || s.strength == f64::NEG_INFINITY || !(s.range >= 0.0) {
                return Err(Error::InvalidParameter("bad step potential".into()));
            }
        }
        Ok(PottsGas { intensities, phi, psi })
    }

    pub fn colours(&self) -> usize {
        self.intensities.len()
    }

    pub fn pair_energy(&self, x: &MarkedPoint, y: &MarkedPoint) -> f64 {
        let d = x.pos.dist(&y.pos);
        let mut e = self.psi.value(d);
        if x.mark != y.mark {
            e += self.phi.value(d);
        }
        e
    }
}

/// Pair potential of the Potts gas on a hyperedge; zero unless `|η| = 2`.
pub fn potts_pair_potential(model: &PottsGas, eta: &[MarkedPoint]) -> f64 {
    match eta {
        [x, y] => model.pair_energy(x, y),
        _ => 0.0,
    }
}

impl PreModification for PottsGas {
    fn log_weight(&self, lam: &Window, omega: &[MarkedPoint]) -> f64 {
        let pos: Vec<Point> = omega.iter().map(|p| p.pos.clone()).collect();
        let inside: Vec<bool> = pos.iter().map(|p| lam.contains(p)).collect();
        let range = self.phi.range.max(self.psi.range);
        let mut acc = crate::numeric::NeumaierSum::new();
        for (i, j) in neighbor_pairs(&pos, range) {
            if inside[i] || inside[j] {
                acc.add(-self.pair_energy(&omega[i], &omega[j]));
            }
        }
        acc.value()
    }

    fn reference_intensities(&self) -> Vec<f64> {
        self.intensities.clone()
    }

    fn range(&self) -> Option<f64> {
        Some(self.phi.range.max(self.psi.range))
    }

    fn connection_threshold(&self) -> Option<f64> {
        self.range()
    }

    fn name(&self) -> String {
        format!("potts(q={})", self.colours())
    }
}
