use crate::error::{Error, Result};
use crate::geometry::{connected_within, neighbor_pairs, MarkedPoint, Point, Window};
use crate::models::PreModification;
use crate::numeric::NeumaierSum;

use super::VacuumPotential;

/// Which hyperedges are enumerated when summing a potential.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum SupportFamily {
    /// Every subset; exponential, capped.
    All,
    /// Subsets connected in the graph joining points closer than
    /// `threshold`. Exact for potentials vanishing off connected sets.
    Connected { threshold: f64 },
    /// Singletons and pairs; exact for pair potentials.
    PairsAndSingletons,
}

impl SupportFamily {
    /// The tightest exact family the model declares.
    pub fn for_model(model: &dyn PreModification) -> SupportFamily {
        match model.connection_threshold() {
            Some(t) => SupportFamily::Connected { threshold: t },
            None => SupportFamily::All,
        }
    }
}

/// A hyperedge `η`, as indices into a configuration, with `Φ(η)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Hyperedge {
    pub members: Vec<usize>,
    pub value: f64,
}

/// Neighbour bitmasks of the graph joining points closer than `threshold`.
pub fn adjacency(points: &[Point], threshold: f64) -> Vec<u64> {
    assert!(points.len() <= 64);
    let mut adj = vec![0u64; points.len()];
    for (i, j) in neighbor_pairs(points, threshold) {
        adj[i] |= 1 << j;
        adj[j] |= 1 << i;
    }
    adj
}

/// Whether the subgraph induced by `mask` is connected.
pub fn is_connected(mask: u64, adj: &[u64]) -> bool {
    if mask == 0 {
        return false;
    }
    let start = mask.trailing_zeros() as usize;
    let mut seen = 1u64 << start;
    let mut frontier = seen;
    while frontier != 0 {
        let i = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let fresh = adj[i] & mask & !seen;
        seen |= fresh;
        frontier |= fresh;
    }
    seen == mask
}

fn members(mask: u64, map: &[usize]) -> Vec<usize> {
    (0..map.len()).filter(|i| mask >> i & 1 == 1).map(|i| map[i]).collect()
}

/// Lists the hyperedges of `points` in `family` accepted by `keep`.
pub fn enumerate_hyperedges(
    phi: &VacuumPotential<'_>,
    points: &[MarkedPoint],
    family: SupportFamily,
    keep: impl Fn(&[usize]) -> bool,
) -> Result<Vec<Hyperedge>> {
    let mut out = Vec::new();
    match family {
        SupportFamily::All => {
            let table = phi.phi_table(points)?;
            let map: Vec<usize> = (0..points.len()).collect();
            for (mask, value) in table.iter().enumerate().skip(1) {
                let m = members(mask as u64, &map);
                if keep(&m) {
                    out.push(Hyperedge {
                        members: m,
                        value: *value,
                    });
                }
            }
        }
        SupportFamily::Connected { threshold } => {
            let pos: Vec<Point> = points.iter().map(|p| p.pos.clone()).collect();
            for block in connected_within(&pos, threshold).blocks {
                if block.len() > phi.cap() {
                    return Err(Error::CapExceeded {
                        size: block.len(),
                        cap: phi.cap(),
                    });
                }
                let local: Vec<MarkedPoint> = block.iter().map(|&i| points[i].clone()).collect();
                let local_pos: Vec<Point> = local.iter().map(|p| p.pos.clone()).collect();
                let adj = adjacency(&local_pos, threshold);
                let table = phi.phi_table(&local)?;
                for (mask, value) in table.iter().enumerate().skip(1) {
                    if !is_connected(mask as u64, &adj) {
                        continue;
                    }
                    let m = members(mask as u64, &block);
                    if keep(&m) {
                        out.push(Hyperedge {
                            members: m,
                            value: *value,
                        });
                    }
                }
            }
        }
        SupportFamily::PairsAndSingletons => {
            for i in 0..points.len() {
                if keep(&[i]) {
                    out.push(Hyperedge {
                        members: vec![i],
                        value: phi.phi(&points[i..=i])?,
                    });
                }
            }
            for i in 0..points.len() {
                for j in i + 1..points.len() {
                    if keep(&[i, j]) {
                        let pair = [points[i].clone(), points[j].clone()];
                        out.push(Hyperedge {
                            members: vec![i, j],
                            value: phi.phi(&pair)?,
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `H^Φ_Λ(ω) = Σ_{η ⊆ ω, η ∩ Λ ≠ ∅} Φ(η)` by enumeration.
pub fn vacuum_hamiltonian(
    phi: &VacuumPotential<'_>,
    lam: &Window,
    omega: &[MarkedPoint],
    family: SupportFamily,
) -> Result<f64> {
    let inside: Vec<bool> = omega.iter().map(|p| lam.contains(&p.pos)).collect();
    let edges = enumerate_hyperedges(phi, omega, family, |m| m.iter().any(|&i| inside[i]))?;
    let mut acc = NeumaierSum::new();
    acc.extend(edges.iter().map(|e| e.value));
    Ok(acc.value())
}

/// `H_{Λ,Δ}` with its contributions and the closed-form cross-check.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianReport {
    pub lam: Window,
    pub delta: Window,
    pub value: f64,
    /// Nonzero contributions, members indexing `ω_Δ`.
    pub contributions: Vec<Hyperedge>,
    pub closed_form: f64,
}

/// Enumerates `H_{Λ,Δ}(ω) = Σ_{η ⊆ ω_Δ, η ∩ Λ ≠ ∅} Φ(η)`.
pub fn hamiltonian_report(
    phi: &VacuumPotential<'_>,
    lam: &Window,
    delta: &Window,
    omega: &[MarkedPoint],
    family: SupportFamily,
) -> Result<HamiltonianReport> {
    if !delta.contains_window(lam) {
        return Err(Error::InvalidParameter("Λ must lie inside Δ".into()));
    }
    let in_delta: Vec<MarkedPoint> = omega.iter().filter(|p| delta.contains(&p.pos)).cloned().collect();
    let inside: Vec<bool> = in_delta.iter().map(|p| lam.contains(&p.pos)).collect();
    let contributions: Vec<Hyperedge> = enumerate_hyperedges(phi, &in_delta, family, |m| m.iter().any(|&i| inside[i]))?
        .into_iter()
        .filter(|e| e.value != 0.0)
        .collect();
    let mut acc = NeumaierSum::new();
    acc.extend(contributions.iter().map(|e| e.value));
    Ok(HamiltonianReport {
        lam: lam.clone(),
        delta: delta.clone(),
        value: acc.value(),
        contributions,
        closed_form: closed_form_hamiltonian(phi.model(), lam, &in_delta),
    })
}

/// `-[log h_Λ(ω) - log h_Λ(ω_{Λᶜ})]`.
pub fn closed_form_hamiltonian(model: &dyn PreModification, lam: &Window, omega: &[MarkedPoint]) -> f64 {
    let outside: Vec<MarkedPoint> = omega.iter().filter(|p| !lam.contains(&p.pos)).cloned().collect();
    let full = model.log_weight(lam, omega);
    if full == f64::NEG_INFINITY {
        return f64::INFINITY;
    }
    -(full - model.log_weight(lam, &outside))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn connectivity_by_bfs() {
        let pts: Vec<Point> = [0.0, 0.9, 1.8, 4.0].iter().map(|x| Point::new(&[*x])).collect();
        let adj = adjacency(&pts, 1.0);
        assert!(is_connected(0b0111, &adj));
        assert!(!is_connected(0b0101, &adj));
        assert!(!is_connected(0b1001, &adj));
        assert!(is_connected(0b1000, &adj));
    }
}
