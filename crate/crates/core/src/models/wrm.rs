use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{cluster_decompose, Mark, MarkedPoint, Point, Window};
use crate::sampling::flip_probabilities;

use super::PreModification;

/// Parameters of the time-evolved Widom-Rowlinson model: intensities of the
/// two species, ball radius and evolution time (`t = ∞` allowed).
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WrmParams {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub r: f64,
    pub t: f64,
}

impl WrmParams {
    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !ok(self.lambda_plus) || !ok(self.lambda_minus) {
            return Err(Error::InvalidParameter("intensities must be positive".into()));
        }
        if !ok(self.r) {
            return Err(Error::InvalidParameter("radius must be positive".into()));
        }
        if self.t.is_nan() || self.t <= 0.0 {
            return Err(Error::InvalidParameter(
                "time must be positive; use the hard-core model at t = 0".into(),
            ));
        }
        Ok(())
    }
}

/// How single-site factors are handled.
///
/// `Raw` keeps the reference at the flip-evolved intensities `F(±)` and
/// divides by the single-site factors; `Absorbed` moves those factors into
/// the reference, which then has intensities `(λ₊p₊₊, λ₊p₊₋)`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    Raw,
    Absorbed,
}

/// The Gibbsianness threshold `t_G = -½ ln((λ₊-λ₋)/(λ₊+λ₋))`, `None` unless
/// `λ₊ > λ₋`.
pub fn gibbs_threshold(lambda_plus: f64, lambda_minus: f64) -> Option<f64> {
    (lambda_plus > lambda_minus && lambda_minus > 0.0)
        .then(|| -0.5 * ((lambda_plus - lambda_minus) / (lambda_plus + lambda_minus)).ln())
}

/// `t_G` by bisection on `b(t) = 1`, for cross-checking the closed form.
pub fn critical_time_bisection(lambda_plus: f64, lambda_minus: f64) -> Option<f64> {
    gibbs_threshold(lambda_plus, lambda_minus)?;
    // b(t) = λ₋p₊₊ / (λ₊p₊₋) decreases from ∞ to λ₋/λ₊ < 1
    let b = |t: f64| {
        let (same, flip) = flip_probabilities(t);
        lambda_minus * same / (lambda_plus * flip)
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while b(hi) > 1.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if b(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Time-evolved WRM pre-modification.
///
/// With `κ(k,l) = log(1 + a^k b^l)` summed over the clusters `C` of the union
/// of balls and `L(ω) = Σ_C κ(C) - Σ_x s(x)` (`s` only in the raw
/// convention), the weight is `log h_Λ(ω) = L(ω) - L(ω_{Λᶜ})`.
#[derive(Clone, Debug)]
pub struct TimeEvolvedWrm {
    params: WrmParams,
    convention: Convention,
    log_a: f64,
    log_b: f64,
}

impl TimeEvolvedWrm {
    pub fn new(params: WrmParams, convention: Convention) -> Result<Self> {
        params.validate()?;
        let (same, flip) = flip_probabilities(params.t);
        let (lp, lm) = (params.lambda_plus, params.lambda_minus);
        let log_a = (lm * flip).ln() - (lp * same).ln();
        let log_b = (lm * same).ln() - (lp * flip).ln();
        Ok(TimeEvolvedWrm {
            params,
            convention,
            log_a,
            log_b,
        })
    }

    pub fn params(&self) -> &WrmParams {
        &self.params
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn a(&self) -> f64 {
        self.log_a.exp()
    }

    pub fn b(&self) -> f64 {
        self.log_b.exp()
    }

    /// Contraction constant `max(a, b)`.
    pub fn contraction(&self) -> f64 {
        self.log_a.max(self.log_b).exp()
    }

    /// Flip-evolved intensities `(F(+), F(-))`.
    pub fn evolved_intensities(&self) -> (f64, f64) {
        let (same, flip) = flip_probabilities(self.params.t);
        let (lp, lm) = (self.params.lambda_plus, self.params.lambda_minus);
        (lp * same + lm * flip, lp * flip + lm * same)
    }

    /// `κ(k, l) = log(1 + a^k b^l)`.
    pub fn kappa(&self, k: usize, l: usize) -> f64 {
        kappa_from_logs(self.log_a, self.log_b, k, l)
    }

    /// Single-site factor `log(1+a)` or `log(1+b)`.
    pub fn single(&self, mark: Mark) -> f64 {
        match mark {
            Mark::PLUS => self.kappa(1, 0),
            _ => self.kappa(0, 1),
        }
    }

    fn marks_count(points: &[MarkedPoint], block: &[usize]) -> (usize, usize) {
        let k = block.iter().filter(|&&i| points[i].mark == Mark::PLUS).count();
        (k, block.len() - k)
    }

    /// Cluster energy: `κ(η)` if `η` (indices into `omega`) is a cluster of
    /// `omega`, else zero. Depends on `omega` only within `2r` of `η`.
    pub fn cluster_potential(&self, eta: &[usize], omega: &[MarkedPoint]) -> f64 {
        if eta.is_empty() {
            return 0.0;
        }
        let pos: Vec<Point> = omega.iter().map(|p| p.pos.clone()).collect();
        let clusters = cluster_decompose(&pos, self.params.r);
        let label = clusters.labels[eta[0]];
        let mut sorted = eta.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if clusters.blocks[label] != sorted {
            return 0.0;
        }
        let (k, l) = Self::marks_count(omega, eta);
        self.kappa(k, l)
    }

    /// `L(ω)` of a finite configuration.
    pub fn bare_log(&self, omega: &[MarkedPoint]) -> f64 {
        let pos: Vec<Point> = omega.iter().map(|p| p.pos.clone()).collect();
        let clusters = cluster_decompose(&pos, self.params.r);
        let mut acc = crate::numeric::NeumaierSum::new();
        for block in &clusters.blocks {
            let (k, l) = Self::marks_count(omega, block);
            acc.add(self.kappa(k, l));
        }
        if self.convention == Convention::Raw {
            for p in omega {
                acc.add(-self.single(p.mark));
            }
        }
        acc.value()
    }

    /// The product over clusters meeting `Λ`, without the exterior
    /// correction. It agrees with [`log_weight`](PreModification::log_weight)
    /// when `ω ⊆ Λ`, but is not consistent across volumes once clusters
    /// straddle the boundary; kept for comparison.
    pub fn cluster_product_log_weight(&self, lam: &Window, omega: &[MarkedPoint]) -> f64 {
        let pos: Vec<Point> = omega.iter().map(|p| p.pos.clone()).collect();
        let clusters = cluster_decompose(&pos, self.params.r);
        let mut acc = crate::numeric::NeumaierSum::new();
        for block in &clusters.blocks {
            if block.iter().any(|&i| lam.contains(&omega[i].pos)) {
                let (k, l) = Self::marks_count(omega, block);
                acc.add(self.kappa(k, l));
            }
        }
        if self.convention == Convention::Raw {
            for p in omega.iter().filter(|p| lam.contains(&p.pos)) {
                acc.add(-self.single(p.mark));
            }
        }
        acc.value()
    }
}

pub(crate) fn kappa_from_logs(log_a: f64, log_b: f64, k: usize, l: usize) -> f64 {
    let mut e = 0.0;
    if k > 0 {
        e += k as f64 * log_a;
    }
    if l > 0 {
        e += l as f64 * log_b;
    }
    if e > 30.0 {
        // log(1+x) = log x + log1p(1/x) avoids overflow
        e + (-e).exp().ln_1p()
    } else {
        e.exp().ln_1p()
    }
}

impl PreModification for TimeEvolvedWrm {
    fn log_weight(&self, lam: &Window, omega: &[MarkedPoint]) -> f64 {
        let outside: Vec<MarkedPoint> = omega.iter().filter(|p| !lam.contains(&p.pos)).cloned().collect();
        if outside.len() == omega.len() {
            return 0.0;
        }
        self.bare_log(omega) - self.bare_log(&outside)
    }

    fn reference_intensities(&self) -> Vec<f64> {
        match self.convention {
            Convention::Raw => {
                let (fp, fm) = self.evolved_intensities();
                vec![fp, fm]
            }
            Convention::Absorbed => {
                let (same, flip) = flip_probabilities(self.params.t);
                vec![self.params.lambda_plus * same, self.params.lambda_plus * flip]
            }
        }
    }

    fn connection_threshold(&self) -> Option<f64> {
        Some(2.0 * self.params.r)
    }

    fn name(&self) -> String {
        format!(
            "twrm(λ+={}, λ-={}, r={}, t={}, {:?})",
            self.params.lambda_plus, self.params.lambda_minus, self.params.r, self.params.t, self.convention
        )
    }
}
