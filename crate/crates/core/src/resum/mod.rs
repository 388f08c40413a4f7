//! Resummation of a vacuum potential into cells `(x, m)`.
//!
//! Each hyperedge `η` is assigned to its least point `x` in a total order and
//! to the index `m` of the outermost annulus around `x` that it reaches. The
//! cell potential `Ψ_{x,m}` collects `Φ(η)` over the hyperedges of that cell
//! and is computed in closed form from differences of log weights:
//! with `V_m` the points above `x` within radius `r_m`,
//! `S_m = -log(h(V_m ∪ {x})/h(V_m))` and `Ψ_{x,m} = S_m - S_{m-1}`.
//!
//! A cell enters the Hamiltonian of `Λ` when its horizon, the closed ball of
//! radius `r_m` around `x`, meets `Λ`. Every hyperedge meeting `Λ` lies in
//! such a cell, so the resummed and vacuum Hamiltonians differ by a sum over
//! exterior hyperedges only.

mod modulus;
mod summability;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{connected_within, MarkedPoint, Norm, Point, PointOrder, RadiiSchedule, Window};
use crate::numeric::NeumaierSum;
use crate::vacuum::{
    adjacency, enumerate_hyperedges, is_connected, vacuum_hamiltonian, SupportFamily, VacuumPotential,
};

pub use modulus::{adversarial_probes, kappa_modulus, random_probes, WrmModulus};
pub use summability::{abs_sum_partial, density_statistic, SummabilityReport};

/// The two resummations: anchored at the origin, or translation invariant.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Cyclic order, Euclidean annuli.
    Cyclic,
    /// Lexicographic order, max-norm annuli.
    TranslationInvariant,
}

impl Variant {
    pub fn order(self) -> PointOrder {
        match self {
            Variant::Cyclic => PointOrder::Cyclic,
            Variant::TranslationInvariant => PointOrder::Lexicographic,
        }
    }

    pub fn norm(self) -> Norm {
        match self {
            Variant::Cyclic => Norm::Euclidean,
            Variant::TranslationInvariant => Norm::Max,
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Variant> {
        match s {
            "cyclic" => Ok(Variant::Cyclic),
            "ti" | "translation-invariant" => Ok(Variant::TranslationInvariant),
            other => Err(Error::Parse(format!("unknown variant {other:?}"))),
        }
    }
}

/// A grading cell `(x, m)` of a configuration with its label `ω_{x,m}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cell {
    pub anchor: usize,
    pub index: usize,
    pub radius: f64,
    /// The anchor followed by the points above it in annulus `m`.
    pub members: Vec<usize>,
}

/// Order plus radii schedule.
#[derive(Clone, Debug, PartialEq)]
pub struct Grading {
    variant: Variant,
    schedule: RadiiSchedule,
}

impl Grading {
    pub fn new(variant: Variant, schedule: RadiiSchedule) -> Result<Self> {
        if schedule.norm != variant.norm() {
            return Err(Error::InvalidParameter(
                "schedule norm does not match the variant".into(),
            ));
        }
        Ok(Grading { variant, schedule })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn schedule(&self) -> &RadiiSchedule {
        &self.schedule
    }

    /// Points above `x` with their annulus index.
    pub fn upper_set(&self, pts: &[Point], x: usize) -> Result<Vec<(usize, usize)>> {
        let order = self.variant.order();
        let mut out = Vec::new();
        for (y, p) in pts.iter().enumerate() {
            if y != x && order.less(&pts[x], p)? {
                out.push((y, self.schedule.annulus_index(&pts[x], p)));
            }
        }
        Ok(out)
    }

    /// The cell `(x, m)` of a hyperedge given by indices into `pts`.
    pub fn cell_of(&self, pts: &[Point], eta: &[usize]) -> Result<(usize, usize)> {
        if eta.is_empty() {
            return Err(Error::InvalidParameter("empty hyperedge has no cell".into()));
        }
        let refs: Vec<&Point> = eta.iter().map(|&i| &pts[i]).collect();
        let x = eta[self.variant.order().argmin(&refs)?];
        let m = eta
            .iter()
            .filter(|&&y| y != x)
            .map(|&y| self.schedule.annulus_index(&pts[x], &pts[y]))
            .max()
            .unwrap_or(1);
        Ok((x, m))
    }

    /// Grades `pts`. All nonempty cells: `m = 1` for every anchor plus every annulus that
    /// holds a point above it.
    pub fn cells(&self, pts: &[Point]) -> Result<Vec<Cell>> {
        let mut out = Vec::new();
        for x in 0..pts.len() {
            let upper = self.upper_set(pts, x)?;
            let mut idx: Vec<usize> = upper.iter().map(|(_, m)| *m).collect();
            idx.push(1);
            idx.sort_unstable();
            idx.dedup();
            out.extend(idx.into_iter().map(|m| {
                let mut members = vec![x];
                members.extend(upper.iter().filter(|(_, k)| *k == m).map(|(y, _)| *y));
                Cell {
                    anchor: x,
                    index: m,
                    radius: self.schedule.radius(m),
                    members,
                }
            }));
        }
        Ok(out)
    }

    /// Cell label `ω_{x,m}`: the anchor and the points above it in annulus
    /// `m`.
    pub fn label(&self, pts: &[Point], x: usize, m: usize) -> Result<Vec<usize>> {
        let mut out = vec![x];
        out.extend(
            self.upper_set(pts, x)?
                .into_iter()
                .filter(|(_, k)| *k == m)
                .map(|(y, _)| y),
        );
        Ok(out)
    }

    /// Whether the horizon of `(x, m)` meets `Λ`.
    pub fn horizon_meets(&self, lam: &Window, x: &Point, m: usize) -> bool {
        lam.distance(x, self.variant.norm()) <= self.schedule.radius(m)
    }
}

/// `Ψ` of one cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellValue {
    pub anchor: usize,
    pub index: usize,
    pub radius: f64,
    pub psi: f64,
}

/// The resummed potential of a vacuum potential.
pub struct HyperedgePotential<'a> {
    grading: Grading,
    phi: &'a VacuumPotential<'a>,
}

impl<'a> HyperedgePotential<'a> {
    pub fn new(grading: Grading, phi: &'a VacuumPotential<'a>) -> Self {
        HyperedgePotential { grading, phi }
    }

    pub fn grading(&self) -> &Grading {
        &self.grading
    }

    pub fn vacuum(&self) -> &VacuumPotential<'a> {
        self.phi
    }

    fn log_ratio(&self, pts: &[MarkedPoint]) -> Result<f64> {
        let v = self.phi.log_ratio(pts)?;
        if v == f64::NEG_INFINITY {
            return Err(Error::InvalidParameter(
                "resummation needs strictly positive weights".into(),
            ));
        }
        Ok(v)
    }

    /// `Ψ_{x,m}` for every `m ∈ M_x`, in increasing `m`.
    pub fn psi_anchor(&self, omega: &[MarkedPoint], x: usize) -> Result<Vec<CellValue>> {
        let pts: Vec<Point> = omega.iter().map(|p| p.pos.clone()).collect();
        let mut upper = self.grading.upper_set(&pts, x)?;
        upper.sort_by_key(|&(_, m)| m);
        let mut out = Vec::new();
        let mut v: Vec<MarkedPoint> = Vec::new();
        let mut prev_s = 0.0;
        let mut k = 0;
        let mut m = 1;
        loop {
            while k < upper.len() && upper[k].1 <= m {
                v.push(omega[upper[k].0].clone());
                k += 1;
            }
            let mut with_x = v.clone();
            with_x.push(omega[x].clone());
            let s = -(self.log_ratio(&with_x)? - self.log_ratio(&v)?);
            out.push(CellValue {
                anchor: x,
                index: m,
                radius: self.grading.schedule.radius(m),
                psi: s - prev_s,
            });
            prev_s = s;
            match upper.get(k) {
                Some(&(_, next)) => m = next,
                None => break,
            }
        }
        Ok(out)
    }

    /// `Ψ_{x,m}` in closed form.
    pub fn psi(&self, omega: &[MarkedPoint], x: usize, m: usize) -> Result<f64> {
        Ok(self
            .psi_anchor(omega, x)?
            .into_iter()
            .find(|c| c.index == m)
            .map_or(0.0, |c| c.psi))
    }

    /// `Ψ_{x,m}` by summing `Φ(η)` over the hyperedges of the cell.
    pub fn psi_enumerated(&self, omega: &[MarkedPoint], x: usize, m: usize, family: SupportFamily) -> Result<f64> {
        let pts: Vec<Point> = omega.iter().map(|p| p.pos.clone()).collect();
        let upper: Vec<(usize, usize)> = self
            .grading
            .upper_set(&pts, x)?
            .into_iter()
            .filter(|&(_, k)| k <= m)
            .collect();
        // local index 0 is the anchor
        let mut local = vec![omega[x].clone()];
        let mut level = vec![0usize];
        for &(y, k) in &upper {
            local.push(omega[y].clone());
            level.push(k);
        }
        let local_pos: Vec<Point> = local.iter().map(|p| p.pos.clone()).collect();
        let keep_local: Vec<usize> = match family {
            SupportFamily::Connected { threshold } => connected_within(&local_pos, threshold)
                .blocks
                .into_iter()
                .find(|b| b.contains(&0))
                .unwrap_or_default(),
            _ => (0..local.len()).collect(),
        };
        let sub: Vec<MarkedPoint> = keep_local.iter().map(|&i| local[i].clone()).collect();
        let sub_level: Vec<usize> = keep_local.iter().map(|&i| level[i]).collect();
        let sub_pos: Vec<Point> = sub.iter().map(|p| p.pos.clone()).collect();
        let adj = match family {
            SupportFamily::Connected { threshold } => Some(adjacency(&sub_pos, threshold)),
            _ => None,
        };
        let table = self.phi.phi_table(&sub)?;
        let mut acc = NeumaierSum::new();
        for (mask, value) in table.iter().enumerate() {
            if mask & 1 == 0 {
                continue;
            }
            if let Some(adj) = &adj {
                if !is_connected(mask as u64, adj) {
                    continue;
                }
            }
            if family == SupportFamily::PairsAndSingletons && mask.count_ones() > 2 {
                continue;
            }
            let top = (0..sub.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| sub_level[i])
                .max()
                .unwrap_or(0);
            let cell_m = top.max(1);
            if cell_m == m {
                acc.add(*value);
            }
        }
        Ok(acc.value())
    }

    /// All cells with their `Ψ`.
    pub fn all_cells(&self, omega: &[MarkedPoint]) -> Result<Vec<CellValue>> {
        let per = crate::par::map_indices(omega.len(), |x| self.psi_anchor(omega, x));
        let mut out = Vec::new();
        for r in per {
            out.extend(r?);
        }
        Ok(out)
    }

    /// `H^Ψ_Λ(ω)`: the sum of `Ψ` over cells whose horizon meets `Λ`.
    pub fn hamiltonian(&self, lam: &Window, omega: &[MarkedPoint]) -> Result<f64> {
        let mut acc = NeumaierSum::new();
        for c in self.all_cells(omega)? {
            if self.grading.horizon_meets(lam, &omega[c.anchor].pos, c.index) {
                acc.add(c.psi);
            }
        }
        Ok(acc.value())
    }

    /// `Σ Φ(η)` over exterior hyperedges whose cell horizon meets `Λ`; the
    /// difference `H^Ψ_Λ - H^Φ_Λ`.
    pub fn boundary_sum(&self, lam: &Window, omega: &[MarkedPoint], family: SupportFamily) -> Result<f64> {
        let ext: Vec<MarkedPoint> = omega.iter().filter(|p| !lam.contains(&p.pos)).cloned().collect();
        let pts: Vec<Point> = ext.iter().map(|p| p.pos.clone()).collect();
        let edges = enumerate_hyperedges(self.phi, &ext, family, |_| true)?;
        let mut acc = NeumaierSum::new();
        for e in edges {
            let (x, m) = self.grading.cell_of(&pts, &e.members)?;
            if self.grading.horizon_meets(lam, &pts[x], m) {
                acc.add(e.value);
            }
        }
        Ok(acc.value())
    }
}

/// Outcome of comparing `H^Ψ_Λ` and `H^Φ_Λ` across interiors.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub psi_hamiltonians: Vec<f64>,
    pub phi_hamiltonians: Vec<f64>,
    pub differences: Vec<f64>,
    /// `max - min` of the differences.
    pub spread: f64,
    /// The exterior sum each difference should equal.
    pub boundary_sum: f64,
    pub max_boundary_error: f64,
}

/// Evaluates `H^Ψ_Λ(ω^i) - H^Φ_Λ(ω^i)` for configurations sharing their part
/// outside `Λ`. `H^Φ` is summed over hyperedges of `family`.
pub fn hamiltonian_equivalence_check(
    psi: &HyperedgePotential<'_>,
    lam: &Window,
    variants: &[Vec<MarkedPoint>],
    family: SupportFamily,
) -> Result<EquivalenceReport> {
    if variants.is_empty() {
        return Err(Error::InvalidParameter("no configurations to compare".into()));
    }
    let boundary_sum = psi.boundary_sum(lam, &variants[0], family)?;
    let mut report = EquivalenceReport {
        psi_hamiltonians: Vec::new(),
        phi_hamiltonians: Vec::new(),
        differences: Vec::new(),
        spread: 0.0,
        boundary_sum,
        max_boundary_error: 0.0,
    };
    for omega in variants {
        let hp = psi.hamiltonian(lam, omega)?;
        let hf = vacuum_hamiltonian(psi.vacuum(), lam, omega, family)?;
        report.psi_hamiltonians.push(hp);
        report.phi_hamiltonians.push(hf);
        report.differences.push(hp - hf);
        report.max_boundary_error = report.max_boundary_error.max((hp - hf - boundary_sum).abs());
    }
    let lo = report.differences.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = report.differences.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    report.spread = hi - lo;
    Ok(report)
}
