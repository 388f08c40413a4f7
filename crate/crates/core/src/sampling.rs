//! Seeded sampling of marked Poisson processes and spin-flip evolution.
//!
//! Every random stream is a ChaCha8 generator keyed by `(seed, stream)`, so a
//! batch of samples drawn in parallel is reproducible independent of thread
//! scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::geometry::{Mark, MarkedConfiguration, MarkedPoint, Point, Window};

/// Seed for sub-run `(i, j)` of `seed`, decorrelated by SplitMix64 so that
/// nearby parent seeds do not share sub-runs.
pub fn derive_seed(seed: u64, i: u64, j: u64) -> u64 {
    let mix = |mut z: u64| {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    };
    mix(mix(mix(seed) ^ i) ^ j)
}

/// Generator for stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Poisson variate with the given mean.
pub fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<usize> {
    if !(mean.is_finite() && mean >= 0.0) {
        return Err(Error::InvalidParameter(format!("Poisson mean {mean}")));
    }
    if mean == 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(mean).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let n: f64 = dist.sample(rng);
    Ok(n as usize)
}

/// Uniform point in the window.
pub fn uniform_point<R: Rng + ?Sized>(window: &Window, rng: &mut R) -> Point {
    match window {
        Window::Box { lo, hi } => {
            let c: Vec<f64> = lo
                .iter()
                .zip(hi)
                .map(|(l, h)| if l == h { *l } else { rng.random_range(*l..=*h) })
                .collect();
            Point::from(c)
        }
        Window::Ball { .. } => {
            let (lo, hi) = window.bounds();
            let cube = Window::Box { lo, hi };
            loop {
                let p = uniform_point(&cube, rng);
                if window.contains(&p) {
                    return p;
                }
            }
        }
    }
}

/// Marked Poisson process in `window`; `intensities[k]` is the intensity of
/// mark `k`.
pub fn sample_poisson<R: Rng + ?Sized>(
    window: &Window,
    intensities: &[f64],
    rng: &mut R,
) -> Result<MarkedConfiguration> {
    let points = sample_poisson_points(window, intensities, rng)?;
    MarkedConfiguration::new(window.dim(), window.clone(), points)
}

/// Like [`sample_poisson`] without building a validated configuration.
pub fn sample_poisson_points<R: Rng + ?Sized>(
    window: &Window,
    intensities: &[f64],
    rng: &mut R,
) -> Result<Vec<MarkedPoint>> {
    window.validate()?;
    if intensities.is_empty() || intensities.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
        return Err(Error::InvalidParameter("intensities must be finite and >= 0".into()));
    }
    if intensities.len() > u8::MAX as usize + 1 {
        return Err(Error::InvalidParameter("too many marks".into()));
    }
    let total: f64 = intensities.iter().sum();
    let n = poisson_count(total * window.volume(), rng)?;
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        let pos = uniform_point(window, rng);
        let mut u = rng.random::<f64>() * total;
        let mut mark = intensities.len() - 1;
        for (k, l) in intensities.iter().enumerate() {
            if u < *l {
                mark = k;
                break;
            }
            u -= l;
        }
        points.push(MarkedPoint {
            pos,
            mark: Mark(mark as u8),
        });
    }
    Ok(points)
}

/// Transition probabilities `(p_t(σ,σ), p_t(σ,-σ))` of the rate-one
/// independent spin flip.
pub fn flip_probabilities(t: f64) -> (f64, f64) {
    if t.is_infinite() {
        return (0.5, 0.5);
    }
    let e = (-2.0 * t).exp();
    (0.5 * (1.0 + e), -0.5 * (-2.0 * t).exp_m1())
}

/// The stochastic matrix `p_t`, rows and columns ordered `(+, -)`.
pub fn transition_matrix(t: f64) -> Result<[[f64; 2]; 2]> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("time {t} must be >= 0")));
    }
    let (s, f) = flip_probabilities(t);
    Ok([[s, f], [f, s]])
}

/// `(F(+), F(-)) = (λ₊p₊₊ + λ₋p₋₊, λ₊p₊₋ + λ₋p₋₋)`.
pub fn evolved_intensities(lambda_plus: f64, lambda_minus: f64, t: f64) -> Result<(f64, f64)> {
    let p = transition_matrix(t)?;
    Ok((
        lambda_plus * p[0][0] + lambda_minus * p[1][0],
        lambda_plus * p[0][1] + lambda_minus * p[1][1],
    ))
}

/// Evolves the marks of a configuration with a fresh generator for `seed`.
pub fn time_evolve_marks(config: &MarkedConfiguration, t: f64, seed: u64) -> Result<MarkedConfiguration> {
    let mut points = config.points().to_vec();
    evolve_marks(&mut points, t, &mut stream_rng(seed, 0))?;
    MarkedConfiguration::new(config.dim(), config.window().clone(), points)
}

/// Runs the spin flip for time `t` on every point independently.
pub fn evolve_marks<R: Rng + ?Sized>(points: &mut [MarkedPoint], t: f64, rng: &mut R) -> Result<()> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("time {t} must be >= 0")));
    }
    let (_, flip) = flip_probabilities(t);
    for p in points.iter_mut() {
        if p.mark.0 > 1 {
            return Err(Error::InvalidParameter("spin flip needs marks +/-".into()));
        }
        if rng.random::<f64>() < flip {
            p.mark = p.mark.flipped();
        }
    }
    Ok(())
}
