mod common;

use hyperedge::geometry::{Mark, MarkedPoint, Window};
use hyperedge::sampling::{
    derive_seed, evolve_marks, evolved_intensities, flip_probabilities, poisson_count, sample_poisson,
    sample_poisson_points, stream_rng, time_evolve_marks, transition_matrix, uniform_point,
};
use proptest::prelude::*;

use common::p_same_series;

/// Loose upper quantile of χ² with `df` degrees of freedom (about 4.5σ).
fn chi2_limit(df: usize) -> f64 {
    df as f64 + 4.5 * (2.0 * df as f64).sqrt()
}

#[test]
fn poisson_counts_match_the_pmf() {
    let mean = 6.5;
    let n = 40_000;
    let mut rng = stream_rng(11, 0);
    let mut hist = [0usize; 25];
    for _ in 0..n {
        let k = poisson_count(mean, &mut rng).unwrap();
        hist[k.min(24)] += 1;
    }
    let mut pmf = vec![0.0; 25];
    let mut p = (-mean).exp();
    for (k, slot) in pmf.iter_mut().enumerate().take(24) {
        *slot = p;
        p *= mean / (k + 1) as f64;
    }
    pmf[24] = 1.0 - pmf[..24].iter().sum::<f64>();
    let chi2: f64 = hist
        .iter()
        .zip(&pmf)
        .filter(|(_, p)| **p * n as f64 > 5.0)
        .map(|(o, p)| {
            let e = p * n as f64;
            (*o as f64 - e).powi(2) / e
        })
        .sum();
    assert!(chi2 < chi2_limit(20), "chi2 = {chi2}");
}

#[test]
fn poisson_count_edge_cases() {
    let mut rng = stream_rng(0, 0);
    assert_eq!(poisson_count(0.0, &mut rng).unwrap(), 0);
    assert!(poisson_count(-1.0, &mut rng).is_err());
    assert!(poisson_count(f64::NAN, &mut rng).is_err());
}

#[test]
fn points_are_uniform_in_boxes() {
    let w = Window::new_box(&[-1.0, 2.0], &[4.0, 7.0]).unwrap();
    let mut rng = stream_rng(3, 1);
    let mut hist = vec![0usize; 100];
    let n = 50_000;
    for _ in 0..n {
        let p = uniform_point(&w, &mut rng);
        assert!(w.contains(&p));
        let i = ((p.coords()[0] + 1.0) / 0.5).floor() as usize;
        let j = ((p.coords()[1] - 2.0) / 0.5).floor() as usize;
        hist[i.min(9) * 10 + j.min(9)] += 1;
    }
    let e = n as f64 / 100.0;
    let chi2: f64 = hist.iter().map(|o| (*o as f64 - e).powi(2) / e).sum();
    assert!(chi2 < chi2_limit(99), "chi2 = {chi2}");
}

#[test]
fn points_are_uniform_in_balls() {
    // radial law: P(|x - c| <= s) = (s/R)^d
    let w = Window::new_ball(&[1.0, 1.0, 1.0], 2.0).unwrap();
    let mut rng = stream_rng(5, 0);
    let n = 40_000;
    let mut hist = [0usize; 10];
    for _ in 0..n {
        let p = uniform_point(&w, &mut rng);
        assert!(w.contains(&p));
        let s = p.coords().iter().map(|c| (c - 1.0) * (c - 1.0)).sum::<f64>().sqrt() / 2.0;
        hist[((s.powi(3)) * 10.0).floor().min(9.0) as usize] += 1;
    }
    let e = n as f64 / 10.0;
    let chi2: f64 = hist.iter().map(|o| (*o as f64 - e).powi(2) / e).sum();
    assert!(chi2 < chi2_limit(9), "chi2 = {chi2}");
}

#[test]
fn mark_frequencies_follow_intensities() {
    let w = Window::unit_box(2, 30.0);
    let pts = sample_poisson_points(&w, &[2.0, 0.5, 0.5], &mut stream_rng(9, 0)).unwrap();
    let n = pts.len() as f64;
    let expected_n = 3.0 * 900.0;
    assert!((n - expected_n).abs() < 5.0 * expected_n.sqrt());
    let plus = pts.iter().filter(|p| p.mark == Mark(0)).count() as f64;
    let z = (plus - n * 2.0 / 3.0) / (n * 2.0 / 3.0 * (1.0 / 3.0)).sqrt();
    assert!(z.abs() < 4.5, "z = {z}");
}

#[test]
fn sampling_is_deterministic_per_seed_and_stream() {
    let w = Window::unit_box(2, 5.0);
    let a = sample_poisson(&w, &[1.0, 1.0], &mut stream_rng(42, 7)).unwrap();
    let b = sample_poisson(&w, &[1.0, 1.0], &mut stream_rng(42, 7)).unwrap();
    let c = sample_poisson(&w, &[1.0, 1.0], &mut stream_rng(42, 8)).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn zero_intensity_gives_empty_configurations() {
    let w = Window::unit_box(2, 5.0);
    let c = sample_poisson(&w, &[0.0, 0.0], &mut stream_rng(1, 0)).unwrap();
    assert!(c.is_empty());
    assert!(sample_poisson(&w, &[-1.0], &mut stream_rng(1, 0)).is_err());
    assert!(sample_poisson(&w, &[], &mut stream_rng(1, 0)).is_err());
}

#[test]
fn derived_seeds_differ() {
    let mut seen = std::collections::HashSet::new();
    for s in 0..20 {
        for i in 0..20 {
            for j in 0..20 {
                assert!(seen.insert(derive_seed(s, i, j)));
            }
        }
    }
}

proptest! {
    #[test]
    fn transition_matrix_is_the_generator_exponential(t in 0.0f64..5.0) {
        let p = transition_matrix(t).unwrap();
        let same = p_same_series(t);
        prop_assert!((p[0][0] - same).abs() < 1e-10);
        prop_assert!((p[1][1] - same).abs() < 1e-10);
        prop_assert!((p[0][1] - (1.0 - same)).abs() < 1e-10);
        for row in p {
            prop_assert!((row[0] + row[1] - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn transition_matrices_form_a_semigroup(s in 0.0f64..3.0, t in 0.0f64..3.0) {
        let (ps, pt, pst) = (transition_matrix(s).unwrap(), transition_matrix(t).unwrap(), transition_matrix(s + t).unwrap());
        for i in 0..2 {
            for j in 0..2 {
                let prod = ps[i][0] * pt[0][j] + ps[i][1] * pt[1][j];
                prop_assert!((prod - pst[i][j]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn evolved_intensities_are_the_pushforward(lp in 0.0f64..5.0, lm in 0.0f64..5.0, t in 0.0f64..4.0) {
        let (same, flip) = flip_probabilities(t);
        let (fp, fm) = evolved_intensities(lp, lm, t).unwrap();
        prop_assert!((fp - (lp * same + lm * flip)).abs() < 1e-12);
        prop_assert!((fm - (lp * flip + lm * same)).abs() < 1e-12);
        prop_assert!((fp + fm - (lp + lm)).abs() < 1e-12);
    }
}

#[test]
fn flip_limits() {
    assert_eq!(flip_probabilities(0.0), (1.0, 0.0));
    let (s, f) = flip_probabilities(f64::INFINITY);
    assert_eq!((s, f), (0.5, 0.5));
    // the small-t flip probability keeps full relative precision
    let (_, f) = flip_probabilities(1e-12);
    assert!((f / 1e-12 - 1.0).abs() < 1e-9);
    assert!(transition_matrix(-1.0).is_err());
}

#[test]
fn empirical_flip_frequency_matches_p_t() {
    let t = 0.4;
    let n = 60_000;
    let mut pts: Vec<MarkedPoint> = (0..n).map(|i| MarkedPoint::new(&[i as f64], Mark::PLUS)).collect();
    evolve_marks(&mut pts, t, &mut stream_rng(2, 0)).unwrap();
    let flipped = pts.iter().filter(|p| p.mark == Mark::MINUS).count() as f64;
    let p = 1.0 - p_same_series(t);
    let z = (flipped - n as f64 * p) / (n as f64 * p * (1.0 - p)).sqrt();
    assert!(z.abs() < 4.5, "z = {z}");
}

#[test]
fn evolution_keeps_positions_and_is_seeded() {
    let w = Window::unit_box(2, 6.0);
    let c = sample_poisson(&w, &[1.0, 1.0], &mut stream_rng(4, 0)).unwrap();
    let a = time_evolve_marks(&c, 0.7, 99).unwrap();
    let b = time_evolve_marks(&c, 0.7, 99).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.positions(), c.positions());
    assert_eq!(time_evolve_marks(&c, 0.0, 5).unwrap(), c);
}

#[test]
fn evolution_rejects_non_binary_marks() {
    let mut pts = vec![MarkedPoint::new(&[0.0], Mark(2))];
    assert!(evolve_marks(&mut pts, 1.0, &mut stream_rng(0, 0)).is_err());
}
