mod common;

use hyperedge::geometry::{MarkedPoint, Norm, Point, RadiiSchedule, Window};
use hyperedge::models::{Convention, HardcoreWr, PreModification, TimeEvolvedWrm, WrmParams};
use hyperedge::resum::{
    abs_sum_partial, adversarial_probes, density_statistic, hamiltonian_equivalence_check, kappa_modulus,
    random_probes, Grading, HyperedgePotential, Variant, WrmModulus,
};
use hyperedge::sampling::{sample_poisson_points, stream_rng};
use hyperedge::vacuum::{SupportFamily, VacuumPotential};
use proptest::prelude::*;
use rand::Rng;

use common::{mp, positions};

fn low_wrm() -> TimeEvolvedWrm {
    TimeEvolvedWrm::new(
        WrmParams {
            lambda_plus: 0.3,
            lambda_minus: 0.1,
            r: 0.5,
            t: 1.0,
        },
        Convention::Absorbed,
    )
    .unwrap()
}

fn grading(variant: Variant, step: f64) -> Grading {
    Grading::new(variant, RadiiSchedule::linear(variant.norm(), step).unwrap()).unwrap()
}

fn scatter(seed: u64, n: usize, lo: f64, hi: f64) -> Vec<MarkedPoint> {
    let mut rng = stream_rng(seed, 0);
    (0..n)
        .map(|_| {
            mp(
                rng.random_range(lo..hi),
                rng.random_range(lo..hi),
                rng.random_range(0..2),
            )
        })
        .collect()
}

/// Least `m` whose closed ball holds `q`, by walking the schedule.
fn annulus(g: &Grading, x: &Point, q: &Point) -> usize {
    let d = x.dist_with(q, g.variant().norm());
    let mut m = 1;
    while d > g.schedule().radius(m) {
        m += 1;
    }
    m
}

fn variant_strategy() -> impl Strategy<Value = Variant> {
    prop_oneof![Just(Variant::Cyclic), Just(Variant::TranslationInvariant)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    /// Every nonempty subset lands in exactly one listed cell, and the cells
    /// account for all `2^n - 1` subsets.
    #[test]
    fn grading_is_exhaustive_and_disjoint(seed in 0u64..100_000, n in 1usize..9, step in 0.2f64..1.5, variant in variant_strategy()) {
        let g = grading(variant, step);
        let omega = scatter(seed, n, -2.0, 2.0);
        let pts = positions(&omega);
        let cells = g.cells(&pts).unwrap();
        let order = variant.order();
        for mask in 1usize..1 << n {
            let eta: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            // oracle: least point by pairwise comparison, outermost annulus
            let x = *eta.iter().find(|&&i| eta.iter().all(|&j| j == i || order.less(&pts[i], &pts[j]).unwrap())).unwrap();
            let m = eta.iter().filter(|&&y| y != x).map(|&y| annulus(&g, &pts[x], &pts[y])).max().unwrap_or(1);
            prop_assert_eq!(g.cell_of(&pts, &eta).unwrap(), (x, m));
            prop_assert_eq!(cells.iter().filter(|c| c.anchor == x && c.index == m).count(), 1);
        }
        // counting: cell (x, m) holds 2^{#below} (2^{#at} - 1) subsets, plus
        // the singleton when m = 1
        let mut total = 0usize;
        for c in &cells {
            let upper = g.upper_set(&pts, c.anchor).unwrap();
            let below = upper.iter().filter(|(_, k)| *k < c.index).count();
            let at = upper.iter().filter(|(_, k)| *k == c.index).count();
            prop_assert_eq!(c.members.len(), at + 1);
            total += if c.index == 1 { 1 << at } else { (1 << below) * ((1 << at) - 1) };
        }
        prop_assert_eq!(total, (1 << n) - 1);
    }

    #[test]
    fn closed_form_cells_match_enumeration(seed in 0u64..100_000, n in 1usize..8, step in 0.3f64..1.5, variant in variant_strategy()) {
        let model = low_wrm();
        let phi = VacuumPotential::new(&model, Window::centered_box(2, 3.0)).unwrap();
        let psi = HyperedgePotential::new(grading(variant, step), &phi);
        let omega = scatter(seed, n, -1.5, 1.5);
        for c in psi.all_cells(&omega).unwrap() {
            let e = psi.psi_enumerated(&omega, c.anchor, c.index, SupportFamily::All).unwrap();
            prop_assert!((c.psi - e).abs() < 1e-10, "{:?} vs {}", c, e);
            let conn = psi.psi_enumerated(&omega, c.anchor, c.index, SupportFamily::Connected { threshold: 1.0 }).unwrap();
            prop_assert!((c.psi - conn).abs() < 1e-9);
        }
    }

    /// Summing every cell gives `Σ_{η ⊆ ω} Φ(η) = -log(h(ω)/h(∅))`.
    #[test]
    fn cells_sum_to_the_log_weight(seed in 0u64..100_000, n in 0usize..14, variant in variant_strategy()) {
        let model = low_wrm();
        let lam = Window::centered_box(2, 3.0);
        let phi = VacuumPotential::new(&model, lam.clone()).unwrap();
        let psi = HyperedgePotential::new(grading(variant, 0.5), &phi);
        let omega = scatter(seed, n, -3.0, 3.0);
        let total: f64 = psi.all_cells(&omega).unwrap().iter().map(|c| c.psi).sum();
        let want = -(model.log_weight(&lam, &omega) - model.log_weight(&lam, &[]));
        prop_assert!((total - want).abs() < 1e-10 * want.abs().max(1.0));
    }

    #[test]
    fn translation_invariant_cells_move_with_the_configuration(seed in 0u64..100_000, n in 1usize..10) {
        let model = low_wrm();
        let phi = VacuumPotential::new(&model, Window::centered_box(2, 60.0)).unwrap();
        let psi = HyperedgePotential::new(grading(Variant::TranslationInvariant, 0.5), &phi);
        let omega = scatter(seed, n, -2.0, 2.0);
        let base = psi.all_cells(&omega).unwrap();
        let mut rng = stream_rng(seed, 1);
        for _ in 0..50 {
            let s = [rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0)];
            let moved: Vec<MarkedPoint> = omega.iter().map(|p| MarkedPoint { pos: p.pos.translated(&s), mark: p.mark }).collect();
            let cells = psi.all_cells(&moved).unwrap();
            prop_assert_eq!(cells.len(), base.len());
            for (a, b) in base.iter().zip(&cells) {
                prop_assert_eq!((a.anchor, a.index), (b.anchor, b.index));
                prop_assert!((a.psi - b.psi).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn density_statistic_matches_direct_count(seed in 0u64..100_000, n in 0usize..40, max_n in 1usize..12) {
        let omega = scatter(seed, n, -4.0, 4.0);
        let c = Point::new(&[0.3, -0.2]);
        let mut want: f64 = 0.0;
        for k in 1..=max_n {
            let inside = omega.iter().filter(|p| p.pos.dist(&c) <= 0.5 * k as f64).count();
            want = want.max(inside as f64 / (k * k) as f64);
        }
        prop_assert_eq!(density_statistic(&omega, &c, max_n), want);
    }
}

fn shared_exterior_variants(
    model: &TimeEvolvedWrm,
    delta: &Window,
    lam: &Window,
    count: usize,
    seed: u64,
) -> Vec<Vec<MarkedPoint>> {
    let int = model.reference_intensities();
    let mut rng = stream_rng(seed, 0);
    let outside: Vec<MarkedPoint> = sample_poisson_points(delta, &int, &mut rng)
        .unwrap()
        .into_iter()
        .filter(|p| !lam.contains(&p.pos))
        .collect();
    (0..count)
        .map(|i| {
            let mut v = outside.clone();
            v.extend(sample_poisson_points(lam, &int, &mut stream_rng(seed, 1 + i as u64)).unwrap());
            v
        })
        .collect()
}

#[test]
fn resummed_hamiltonians_differ_by_an_exterior_term() {
    let model = low_wrm();
    let delta = Window::unit_box(2, 8.0);
    let lam = Window::new_box(&[2.0, 2.0], &[6.0, 6.0]).unwrap();
    let phi = VacuumPotential::new(&model, delta.clone()).unwrap();
    let family = SupportFamily::for_model(&model);
    for variant in [Variant::Cyclic, Variant::TranslationInvariant] {
        let psi = HyperedgePotential::new(grading(variant, 0.5), &phi);
        for seed in 0..6 {
            let vs = shared_exterior_variants(&model, &delta, &lam, 5, seed);
            let rep = hamiltonian_equivalence_check(&psi, &lam, &vs, family).unwrap();
            assert!(rep.spread < 1e-6, "{variant:?} seed {seed}: {rep:?}");
            assert!(rep.max_boundary_error < 1e-8, "{variant:?} seed {seed}: {rep:?}");
        }
    }
}

#[test]
fn modulus_bounds_the_measured_continuity() {
    let model = low_wrm();
    let modulus = WrmModulus::for_model(&model, 2).unwrap();
    assert_eq!(modulus.k, 10.0 / modulus.c);
    for n in [1.0, 2.0, 4.0, 8.0] {
        let adv = adversarial_probes(&model, 2, n);
        let rnd = random_probes(&model, 2, n + 3.0, 200, 7).unwrap();
        let measured = kappa_modulus(&model, 2, n, &adv)
            .unwrap()
            .max(kappa_modulus(&model, 2, n, &rnd).unwrap());
        assert!(
            measured <= modulus.kappa(n),
            "n = {n}: {measured} > {}",
            modulus.kappa(n)
        );
        // the chain probes do detect the cut
        assert!(kappa_modulus(&model, 2, n, &adv).unwrap() > 0.0);
    }
    assert!((modulus.kappa(3.0) - 2.0 * modulus.k * modulus.s().powf(3.0).ln_1p()).abs() < 1e-12);
}

#[test]
fn schedule_radii_are_minimal_and_meet_the_target() {
    let modulus = WrmModulus::for_model(&low_wrm(), 2).unwrap();
    let step = 0.25;
    let s = modulus.schedule(Norm::Euclidean, step, 30).unwrap();
    for m in 1..=30 {
        let target = 1.0 / (m * m) as f64;
        let r = s.radius(m);
        assert!(modulus.at_radius(r) < target, "m = {m}");
        assert!(
            r <= step || modulus.at_radius(r - step) >= target,
            "m = {m} not minimal"
        );
        assert!(m == 1 || r >= s.radius(m - 1));
    }
    // past the listed radii growth is linear
    assert!((s.radius(32) - s.radius(31) - step).abs() < 1e-12);
}

#[test]
fn modulus_needs_a_contraction() {
    let early = TimeEvolvedWrm::new(
        WrmParams {
            lambda_plus: 2.0,
            lambda_minus: 1.0,
            r: 0.5,
            t: 0.2,
        },
        Convention::Absorbed,
    )
    .unwrap();
    assert!(WrmModulus::for_model(&early, 2).is_err());
}

#[test]
fn partial_sums_grow_and_saturate() {
    let model = low_wrm();
    let delta = Window::unit_box(2, 8.0);
    let lam = Window::new_box(&[3.0, 3.0], &[5.0, 5.0]).unwrap();
    let phi = VacuumPotential::new(&model, delta.clone()).unwrap();
    let psi = HyperedgePotential::new(grading(Variant::Cyclic, 0.5), &phi);
    let omega = sample_poisson_points(&delta, &model.reference_intensities(), &mut stream_rng(3, 0)).unwrap();
    let radii: Vec<f64> = (1..=30).map(|k| k as f64).collect();
    let rep = abs_sum_partial(&psi, &lam, &omega, &radii).unwrap();
    assert!(rep.nondecreasing);
    let all: f64 = psi.all_cells(&omega).unwrap().iter().map(|c| c.psi.abs()).sum();
    assert!((rep.partial_sums.last().unwrap() - all).abs() < 1e-9 * all.max(1.0));
}

#[test]
fn grading_errors() {
    let lin = RadiiSchedule::linear(Norm::Max, 1.0).unwrap();
    assert!(Grading::new(Variant::Cyclic, lin).is_err());
    let g = grading(Variant::Cyclic, 1.0);
    assert!(g.cell_of(&[Point::new(&[0.0, 0.0])], &[]).is_err());
    assert!("sideways".parse::<Variant>().is_err());
    assert_eq!("ti".parse::<Variant>().unwrap(), Variant::TranslationInvariant);
}

#[test]
fn resummation_rejects_zero_weights() {
    let hard = HardcoreWr {
        lambda_plus: 1.0,
        lambda_minus: 1.0,
        r: 0.5,
    };
    let phi = VacuumPotential::new(&hard, Window::unit_box(2, 3.0)).unwrap();
    let psi = HyperedgePotential::new(grading(Variant::Cyclic, 1.0), &phi);
    let omega = [mp(1.0, 1.0, 0), mp(1.3, 1.0, 1)];
    assert!(psi.all_cells(&omega).is_err());
}

#[test]
fn horizon_is_a_closed_ball() {
    let g = grading(Variant::TranslationInvariant, 1.0);
    let lam = Window::new_box(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
    // max-norm distance exactly 2 from the box
    let x = Point::new(&[3.0, 0.5]);
    assert!(!g.horizon_meets(&lam, &x, 1));
    assert!(g.horizon_meets(&lam, &x, 2));
}
