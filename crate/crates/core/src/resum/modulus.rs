use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Mark, MarkedPoint, Norm, Point, RadiiSchedule, Window};
use crate::models::{PreModification, TimeEvolvedWrm};
use crate::sampling::{sample_poisson_points, stream_rng};

/// Analytic continuity modulus of the WRM weights.
///
/// A cluster that has to reach from near a point to distance `ρ` holds at
/// least `ρ/(2r) - 1` points, so its `κ` is at most
/// `log(1 + c^{ρ/(2r) - 1}) <= c^{-1} log(1 + c^{ρ/(2r)})`, with `c` the
/// contraction constant. At most `1 + 3^d` clusters touch a point, which
/// gives the modulus `2K log(1 + c^{ρ/(2r)})` with `K = (1 + 3^d)/c`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WrmModulus {
    pub k: f64,
    pub c: f64,
    pub r: f64,
}

impl WrmModulus {
    pub fn for_model(model: &TimeEvolvedWrm, dim: usize) -> Result<Self> {
        let c = model.contraction();
        if !(c < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "contraction constant {c} >= 1: below the Gibbsianness threshold"
            )));
        }
        Ok(WrmModulus {
            k: (1.0 + 3f64.powi(dim as i32)) / c,
            c,
            r: model.params().r,
        })
    }

    pub fn with_k(mut self, k: f64) -> Self {
        self.k = k;
        self
    }

    /// `2K log(1 + c^{ρ/(2r)})`.
    pub fn at_radius(&self, rho: f64) -> f64 {
        2.0 * self.k * self.c.powf(rho / (2.0 * self.r)).ln_1p()
    }

    /// Bound on the change of `log h` at a point when the configuration is
    /// cut to the ball of diameter `n` around it.
    pub fn kappa(&self, n: f64) -> f64 {
        self.at_radius(0.5 * n)
    }

    /// Base `s` with `kappa(n) = 2K log(1 + s^n)`.
    pub fn s(&self) -> f64 {
        self.c.powf(1.0 / (4.0 * self.r))
    }

    /// Smallest multiple of `step` with `at_radius(ρ) < m^{-2}`.
    pub fn radius_for(&self, m: usize, step: f64) -> f64 {
        let target = 1.0 / (m as f64 * m as f64);
        // c^u < expm1(target / 2K)
        let u = (target / (2.0 * self.k)).exp_m1().ln() / self.c.ln();
        let mut j = ((2.0 * self.r * u) / step).floor().max(1.0);
        while j > 1.0 && self.at_radius((j - 1.0) * step) < target {
            j -= 1.0;
        }
        while self.at_radius(j * step) >= target {
            j += 1.0;
        }
        j * step
    }

    /// The radii schedule honouring `at_radius(r_m) < m^{-2}` for
    /// `m <= count`, then growing linearly.
    pub fn schedule(&self, norm: Norm, step: f64, count: usize) -> Result<RadiiSchedule> {
        let radii: Vec<f64> = (1..=count).map(|m| self.radius_for(m, step)).collect();
        RadiiSchedule::explicit(norm, radii, step)
    }
}

fn point_window(dim: usize) -> Window {
    Window::Ball {
        center: vec![0.0; dim],
        radius: 0.0,
    }
}

/// `sup_probes |log h_0(ω) - log h_0(ω_{Λ_n})|` with `Λ_n` the closed ball of
/// diameter `n` at the origin. Probes must contain the origin.
pub fn kappa_modulus(model: &dyn PreModification, dim: usize, n: f64, probes: &[Vec<MarkedPoint>]) -> Result<f64> {
    let origin = point_window(dim);
    let lam_n = Window::new_ball(&vec![0.0; dim], 0.5 * n)?;
    let mut sup: f64 = 0.0;
    for omega in probes {
        if !omega.iter().any(|p| origin.contains(&p.pos)) {
            return Err(Error::InvalidParameter("probe lacks a point at the origin".into()));
        }
        let cut: Vec<MarkedPoint> = omega.iter().filter(|p| lam_n.contains(&p.pos)).cloned().collect();
        let d = model.log_weight(&origin, omega) - model.log_weight(&origin, &cut);
        sup = sup.max(d.abs());
    }
    Ok(sup)
}

/// Poisson configurations in `[-extent, extent]^d` with a point added at
/// the origin.
pub fn random_probes(
    model: &dyn PreModification,
    dim: usize,
    extent: f64,
    count: usize,
    seed: u64,
) -> Result<Vec<Vec<MarkedPoint>>> {
    let window = Window::centered_box(dim, extent);
    let intensities = model.reference_intensities();
    (0..count)
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let mut pts = sample_poisson_points(&window, &intensities, &mut rng)?;
            let origin = Point::origin(dim);
            pts.retain(|p| p.pos != origin);
            let mark = Mark(rng.random_range(0..intensities.len()) as u8);
            pts.push(MarkedPoint { pos: origin, mark });
            Ok(pts)
        })
        .collect()
}

/// Chains of equally marked points from the origin out past the sphere of
/// radius `n/2`, spaced just under `2r`, along each coordinate direction.
/// The mark with the larger ratio is used, which maximises the surviving
/// `κ` of the cut cluster.
pub fn adversarial_probes(model: &TimeEvolvedWrm, dim: usize, n: f64) -> Vec<Vec<MarkedPoint>> {
    let r = model.params().r;
    let mark = if model.a() >= model.b() {
        Mark::PLUS
    } else {
        Mark::MINUS
    };
    let spacing = 2.0 * r * (1.0 - 1e-3);
    let steps = ((0.5 * n + 4.0 * r) / spacing).ceil() as usize + 1;
    let mut out = Vec::new();
    for axis in 0..dim {
        for sign in [1.0, -1.0] {
            for offset in [0.0, 0.5] {
                let chain: Vec<MarkedPoint> = (0..steps)
                    .map(|k| {
                        let mut c = vec![0.0; dim];
                        if k > 0 {
                            c[axis] = sign * (k as f64 - offset) * spacing;
                        }
                        MarkedPoint {
                            pos: Point::from(c),
                            mark,
                        }
                    })
                    .collect();
                out.push(chain);
            }
        }
    }
    out
}
