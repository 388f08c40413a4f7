//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use hyperedge::geometry::{Mark, MarkedPoint, Point};

pub fn mp(x: f64, y: f64, mark: u8) -> MarkedPoint {
    MarkedPoint::new(&[x, y], Mark(mark))
}

pub fn positions(omega: &[MarkedPoint]) -> Vec<Point> {
    omega.iter().map(|p| p.pos.clone()).collect()
}

/// Connected components of the graph `|x - y| < threshold`, by a
/// Floyd-Warshall transitive closure; sorted blocks, ordered by least index.
pub fn components_floyd(points: &[Point], threshold: f64) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut reach = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            let d: f64 = points[i]
                .coords()
                .iter()
                .zip(points[j].coords())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            reach[i][j] = i == j || d < threshold;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if reach[i][k] && reach[k][j] {
                    reach[i][j] = true;
                }
            }
        }
    }
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for i in 0..n {
        if !seen[i] {
            let block: Vec<usize> = (0..n).filter(|&j| reach[i][j]).collect();
            for &j in &block {
                seen[j] = true;
            }
            out.push(block);
        }
    }
    out
}

/// `p_t(+,+)` written as a matrix exponential series of the generator
/// `[[-1, 1], [1, -1]]`.
pub fn p_same_series(t: f64) -> f64 {
    // exp(tQ) = I + Σ t^n Q^n / n!, with Q^n = (-2)^{n-1} Q
    let mut term = 1.0;
    let mut acc = 1.0;
    for n in 1..200 {
        term *= t / n as f64;
        acc -= term * (-2f64).powi(n - 1);
    }
    acc
}

/// `log` of the time-evolved WR cluster density against the product of the
/// given per-site intensities: for each cluster `C`,
/// `λ₊^|C| Π p(+, σ) + λ₋^|C| Π p(-, σ)`, divided by `Π ref(σ)`.
pub fn evolved_wr_log_density(
    lambda_plus: f64,
    lambda_minus: f64,
    t: f64,
    r: f64,
    reference: [f64; 2],
    omega: &[MarkedPoint],
) -> f64 {
    let same = p_same_series(t);
    let flip = 1.0 - same;
    let mut total = 0.0;
    for block in components_floyd(&positions(omega), 2.0 * r) {
        let mut from_plus = lambda_plus.powi(block.len() as i32);
        let mut from_minus = lambda_minus.powi(block.len() as i32);
        let mut reference_mass = 1.0;
        for &i in &block {
            let plus = omega[i].mark == Mark::PLUS;
            from_plus *= if plus { same } else { flip };
            from_minus *= if plus { flip } else { same };
            reference_mass *= reference[omega[i].mark.0 as usize];
        }
        total += ((from_plus + from_minus) / reference_mass).ln();
    }
    total
}

pub fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
