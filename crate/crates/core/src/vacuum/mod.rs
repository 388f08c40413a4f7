//! Möbius-inverted vacuum potentials.
//!
//! For a finite `η ⊆ Λ`,
//! `Φ(η) = -Σ_{ξ⊆η} (-1)^{|η∖ξ|} log( h_Λ(ξ) / h_Λ(∅) )`,
//! and `Φ(η) = +∞` when `h_Λ(η) = 0`. The value does not depend on the
//! volume `Λ` as long as it contains `η`.

mod hamiltonian;
mod range;
mod series;

use std::collections::HashMap;
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::geometry::{MarkedPoint, Window};
use crate::models::PreModification;
use crate::numeric::NeumaierSum;

pub use hamiltonian::{
    adjacency, closed_form_hamiltonian, enumerate_hyperedges, hamiltonian_report, is_connected, vacuum_hamiltonian,
    HamiltonianReport, Hyperedge, SupportFamily,
};
pub use range::{check_finite_range, RangeReport};
pub use series::{
    clique_potential_from_binomial, decay_phi, decay_phi_truncated, wrm_phi_binomial, wrm_phi_series,
    wrm_phi_series_truncated, SeriesValue,
};

/// Default cap on `|η|` for direct evaluation.
pub const DEFAULT_CAP: usize = 20;
/// Cap on `|ω|` for full Möbius reconstruction (`3^|ω|` terms).
pub const RECONSTRUCTION_CAP: usize = 14;

/// Only subsets up to this size are memoised.
const CACHED_SIZE: usize = 24;

/// Vacuum potential of a model, evaluated inside a fixed volume.
pub struct VacuumPotential<'m> {
    model: &'m dyn PreModification,
    volume: Window,
    cap: usize,
    log_empty: f64,
    cache: Option<Mutex<HashMap<Vec<u64>, f64>>>,
}

impl<'m> VacuumPotential<'m> {
    pub fn new(model: &'m dyn PreModification, volume: Window) -> Result<Self> {
        volume.validate()?;
        let log_empty = model.log_weight(&volume, &[]);
        if !log_empty.is_finite() {
            return Err(Error::HereditaryPositivity("h(∅) must be positive".into()));
        }
        Ok(VacuumPotential {
            model,
            volume,
            cap: DEFAULT_CAP,
            log_empty,
            cache: Some(Mutex::new(HashMap::new())),
        })
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    /// Disables memoisation of subset weights.
    pub fn without_cache(mut self) -> Self {
        self.cache = None;
        self
    }

    pub fn model(&self) -> &'m dyn PreModification {
        self.model
    }

    pub fn volume(&self) -> &Window {
        &self.volume
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    fn check_contained(&self, pts: &[MarkedPoint]) -> Result<()> {
        if pts.iter().all(|p| self.volume.contains(&p.pos)) {
            Ok(())
        } else {
            Err(Error::NotContained)
        }
    }

    /// `log(h_Λ(ξ)/h_Λ(∅))` for `ξ ⊆ Λ`.
    pub fn log_ratio(&self, xi: &[MarkedPoint]) -> Result<f64> {
        self.check_contained(xi)?;
        Ok(self.log_ratio_unchecked(xi))
    }

    fn log_ratio_unchecked(&self, xi: &[MarkedPoint]) -> f64 {
        if xi.is_empty() {
            return 0.0;
        }
        let cache = match &self.cache {
            Some(c) if xi.len() <= CACHED_SIZE => c,
            _ => return self.model.log_weight(&self.volume, xi) - self.log_empty,
        };
        let key = subset_key(xi);
        if let Some(v) = cache.lock().unwrap().get(&key) {
            return *v;
        }
        let v = self.model.log_weight(&self.volume, xi) - self.log_empty;
        cache.lock().unwrap().insert(key, v);
        v
    }

    /// `Φ(η)`.
    pub fn phi(&self, eta: &[MarkedPoint]) -> Result<f64> {
        self.phi_given(eta, &vec![true; eta.len()])
    }

    /// `Φ(η, ω)` where `present[i]` says whether `η_i ∈ ω`; only `ω ∩ η`
    /// enters. This vanishes unless `η ⊆ ω` and `ρ(ω ∩ η) > 0`.
    pub fn phi_given(&self, eta: &[MarkedPoint], present: &[bool]) -> Result<f64> {
        let n = eta.len();
        if n > self.cap || n >= 64 {
            return Err(Error::CapExceeded { size: n, cap: self.cap });
        }
        if present.len() != n {
            return Err(Error::InvalidParameter("mask length differs from η".into()));
        }
        self.check_contained(eta)?;
        if n == 0 {
            return Ok(0.0);
        }
        let full: u64 = (1u64 << n) - 1;
        let omega_mask = present
            .iter()
            .enumerate()
            .filter(|(_, p)| **p)
            .fold(0u64, |m, (i, _)| m | (1 << i));
        let subset =
            |mask: u64| -> Vec<MarkedPoint> { (0..n).filter(|i| mask >> i & 1 == 1).map(|i| eta[i].clone()).collect() };
        let top = self.log_ratio_unchecked(&subset(full & omega_mask));
        if top == f64::NEG_INFINITY {
            return Ok(f64::INFINITY);
        }
        let mut acc = NeumaierSum::new();
        // iterate over all ξ ⊆ η, evaluated at ω ∩ ξ
        let mut xi = full;
        loop {
            let v = self.log_ratio_unchecked(&subset(xi & omega_mask));
            if v == f64::NEG_INFINITY {
                return Err(Error::HereditaryPositivity(format!(
                    "a subset of a positive configuration of size {n} has zero weight"
                )));
            }
            let sign = if (n - xi.count_ones() as usize).is_multiple_of(2) {
                1.0
            } else {
                -1.0
            };
            acc.add(sign * v);
            if xi == 0 {
                break;
            }
            xi = (xi - 1) & full;
        }
        Ok(-acc.value())
    }

    /// `Φ` of every subset of `points`, indexed by bitmask, by a fast Möbius
    /// transform of the subset weights.
    pub fn phi_table(&self, points: &[MarkedPoint]) -> Result<Vec<f64>> {
        let n = points.len();
        if n > self.cap || n >= 32 {
            return Err(Error::CapExceeded { size: n, cap: self.cap });
        }
        let logs = self.subset_logs(points)?;
        let size = logs.len();
        for mask in 1..size {
            if logs[mask] > f64::NEG_INFINITY {
                for i in 0..n {
                    if mask >> i & 1 == 1 && logs[mask ^ (1 << i)] == f64::NEG_INFINITY {
                        return Err(Error::HereditaryPositivity(
                            "a subset of a positive configuration has zero weight".into(),
                        ));
                    }
                }
            }
        }
        let mut f: Vec<f64> = logs.iter().map(|v| if v.is_finite() { *v } else { 0.0 }).collect();
        for i in 0..n {
            let bit = 1 << i;
            for mask in 0..size {
                if mask & bit != 0 {
                    f[mask] -= f[mask ^ bit];
                }
            }
        }
        Ok(f.iter()
            .zip(&logs)
            .map(|(g, l)| if l.is_finite() { -g } else { f64::INFINITY })
            .collect())
    }

    /// `log(h_Λ(ξ)/h_Λ(∅))` for every `ξ ⊆ points`, indexed by bitmask.
    pub fn subset_logs(&self, points: &[MarkedPoint]) -> Result<Vec<f64>> {
        let n = points.len();
        if n >= 32 {
            return Err(Error::CapExceeded { size: n, cap: self.cap });
        }
        self.check_contained(points)?;
        let mut logs = vec![0.0; 1usize << n];
        for (mask, slot) in logs.iter_mut().enumerate().skip(1) {
            let sub: Vec<MarkedPoint> = (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| points[i].clone())
                .collect();
            *slot = self.log_ratio_unchecked(&sub);
        }
        Ok(logs)
    }

    /// Sums `Φ(η)` over all `η ⊆ ω` by the direct formula and compares with
    /// `-log(h_Λ(ω)/h_Λ(∅))`.
    pub fn mobius_reconstruct(&self, omega: &[MarkedPoint]) -> Result<Reconstruction> {
        let n = omega.len();
        if n > RECONSTRUCTION_CAP.min(self.cap) {
            return Err(Error::CapExceeded {
                size: n,
                cap: RECONSTRUCTION_CAP.min(self.cap),
            });
        }
        let target = -self.log_ratio(omega)?;
        let logs = self.subset_logs(omega)?;
        let mut acc = NeumaierSum::new();
        for eta in 0usize..(1 << n) {
            acc.add(direct_from_logs(&logs, eta)?);
        }
        let sum = acc.value();
        let error = if sum == target { 0.0 } else { (sum - target).abs() };
        Ok(Reconstruction { sum, target, error })
    }
}

/// Result of [`VacuumPotential::mobius_reconstruct`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Reconstruction {
    pub sum: f64,
    pub target: f64,
    pub error: f64,
}

/// `Φ(η)` from a table of subset log weights, by the alternating sum over
/// the subsets of the bitmask `eta`.
pub fn direct_from_logs(logs: &[f64], eta: usize) -> Result<f64> {
    if logs[eta] == f64::NEG_INFINITY {
        return Ok(f64::INFINITY);
    }
    let n = eta.count_ones();
    let mut acc = NeumaierSum::new();
    let mut xi = eta;
    loop {
        let v = logs[xi];
        if v == f64::NEG_INFINITY {
            return Err(Error::HereditaryPositivity(
                "a subset of a positive configuration has zero weight".into(),
            ));
        }
        acc.add(if (n - xi.count_ones()).is_multiple_of(2) { v } else { -v });
        if xi == 0 {
            break;
        }
        xi = (xi - 1) & eta;
    }
    Ok(-acc.value())
}

/// Order-independent key of a finite marked point set.
fn subset_key(xi: &[MarkedPoint]) -> Vec<u64> {
    let mut per: Vec<Vec<u64>> = xi.iter().map(|p| p.key().collect()).collect();
    per.sort_unstable();
    per.concat()
}

/// Free-function form of [`VacuumPotential::phi`] with volume `Λ`.
///
/// Debug builds also evaluate in the bounding box of `η` and assert that
/// the two volumes agree.
pub fn vacuum_phi(model: &dyn PreModification, eta: &[MarkedPoint], lam: &Window) -> Result<f64> {
    let v = VacuumPotential::new(model, lam.clone())?.without_cache().phi(eta)?;
    #[cfg(debug_assertions)]
    if !eta.is_empty() && eta.len() <= 10 {
        let d = lam.dim();
        let lo: Vec<f64> = (0..d)
            .map(|i| eta.iter().map(|p| p.pos.coords()[i]).fold(f64::INFINITY, f64::min))
            .collect();
        let hi: Vec<f64> = (0..d)
            .map(|i| eta.iter().map(|p| p.pos.coords()[i]).fold(f64::NEG_INFINITY, f64::max))
            .collect();
        let tight = Window::Box { lo, hi };
        if let Ok(w) = VacuumPotential::new(model, tight).and_then(|p| p.without_cache().phi(eta)) {
            debug_assert!(
                w == v || (w - v).abs() <= 1e-9 * (1.0 + v.abs()),
                "vacuum potential depends on the volume: {v} vs {w}"
            );
        }
    }
    Ok(v)
}
