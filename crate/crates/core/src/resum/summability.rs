use serde::Serialize;

use crate::error::Result;
use crate::geometry::{MarkedPoint, Point, Window};
use crate::numeric::NeumaierSum;

use super::HyperedgePotential;

/// Partial sums of `|Ψ|` over growing neighbourhoods of `Λ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummabilityReport {
    pub radii: Vec<f64>,
    pub partial_sums: Vec<f64>,
    pub density: f64,
    pub nondecreasing: bool,
}

/// `Σ |Ψ_{x,m}|` over cells whose horizon lies within distance `R` of `Λ`,
/// for each `R` in `radii`.
pub fn abs_sum_partial(
    psi: &HyperedgePotential<'_>,
    lam: &Window,
    omega: &[MarkedPoint],
    radii: &[f64],
) -> Result<SummabilityReport> {
    let norm = psi.grading().variant().norm();
    let mut reach: Vec<(f64, f64)> = psi
        .all_cells(omega)?
        .into_iter()
        .map(|c| (lam.distance(&omega[c.anchor].pos, norm) + c.radius, c.psi.abs()))
        .collect();
    reach.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut sorted_radii: Vec<f64> = radii.to_vec();
    sorted_radii.sort_by(f64::total_cmp);
    let mut partial_sums = Vec::with_capacity(radii.len());
    let mut acc = NeumaierSum::new();
    let mut k = 0;
    for r in &sorted_radii {
        while k < reach.len() && reach[k].0 <= *r {
            acc.add(reach[k].1);
            k += 1;
        }
        partial_sums.push(acc.value());
    }
    let nondecreasing = partial_sums.windows(2).all(|w| w[0] <= w[1]);
    let center = match lam {
        Window::Box { lo, hi } => lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect(),
        Window::Ball { center, .. } => center.clone(),
    };
    let density = density_statistic(
        omega,
        &Point::from(center),
        1 + radii.iter().cloned().fold(0.0, f64::max) as usize,
    );
    Ok(SummabilityReport {
        radii: sorted_radii,
        partial_sums,
        density,
        nondecreasing,
    })
}

/// `sup_{1<=n<=max_n} n^{-d} |ω ∩ B(center, n/2)|`.
pub fn density_statistic(omega: &[MarkedPoint], center: &Point, max_n: usize) -> f64 {
    let d = center.dim() as i32;
    let mut dists: Vec<f64> = omega.iter().map(|p| p.pos.dist(center)).collect();
    dists.sort_by(f64::total_cmp);
    let mut best: f64 = 0.0;
    let mut k = 0;
    for n in 1..=max_n.max(1) {
        let half = 0.5 * n as f64;
        while k < dists.len() && dists[k] <= half {
            k += 1;
        }
        best = best.max(k as f64 / (n as f64).powi(d));
    }
    best
}
