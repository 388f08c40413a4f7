mod common;

use hyperedge::geometry::{Mark, MarkedPoint, Window};
use hyperedge::models::{
    critical_time_bisection, gibbs_threshold, potts_pair_potential, premod_swap_check, Convention, HardcoreWr,
    PottsGas, PreModification, StepPotential, TimeEvolvedWrm, Unmodified, VolumeTilt, WrmParams,
};
use hyperedge::sampling::{sample_poisson_points, stream_rng};
use proptest::prelude::*;

use common::{components_floyd, evolved_wr_log_density, mp, p_same_series, positions};

fn wrm(lp: f64, lm: f64, r: f64, t: f64, convention: Convention) -> TimeEvolvedWrm {
    TimeEvolvedWrm::new(
        WrmParams {
            lambda_plus: lp,
            lambda_minus: lm,
            r,
            t,
        },
        convention,
    )
    .unwrap()
}

#[test]
fn swap_identity_holds_for_shipped_models() {
    let window = Window::unit_box(2, 10.0);
    let hard = HardcoreWr {
        lambda_plus: 2.0,
        lambda_minus: 1.0,
        r: 0.5,
    };
    let soft = PottsGas::new(
        vec![1.0, 1.0, 1.0],
        StepPotential {
            strength: 0.7,
            range: 0.8,
        },
        StepPotential {
            strength: 0.2,
            range: 0.5,
        },
    )
    .unwrap();
    let models: Vec<Box<dyn PreModification>> = vec![
        Box::new(wrm(2.0, 1.0, 0.5, 1.0, Convention::Absorbed)),
        Box::new(wrm(2.0, 1.0, 0.5, 1.0, Convention::Raw)),
        Box::new(wrm(1.0, 0.8, 0.4, 0.1, Convention::Absorbed)),
        Box::new(hard),
        Box::new(soft),
        Box::new(Unmodified {
            intensities: vec![1.0, 2.0],
        }),
    ];
    for m in &models {
        let rep = premod_swap_check(m.as_ref(), &window, 100, 17).unwrap();
        assert!(rep.max_error < 1e-10, "{}: {:?}", m.name(), rep);
        assert_eq!(rep.structural_failures, 0, "{}", m.name());
    }
}

#[test]
fn volume_tilt_breaks_the_swap_identity() {
    let broken = VolumeTilt {
        inner: Unmodified {
            intensities: vec![1.0, 1.0],
        },
        beta: 0.3,
    };
    let rep = premod_swap_check(&broken, &Window::unit_box(2, 10.0), 50, 3).unwrap();
    assert!(rep.max_error > 1e-3, "{rep:?}");
}

#[test]
fn cluster_product_form_is_not_consistent_across_volumes() {
    // Two points in one cluster straddling the boundary of Λ ⊂ Δ.
    let m = wrm(2.0, 1.0, 0.5, 1.0, Convention::Absorbed);
    let lam = Window::new_box(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
    let delta = Window::new_box(&[0.0, 0.0], &[3.0, 3.0]).unwrap();
    let omega = vec![mp(0.9, 0.5, 0), mp(1.5, 0.5, 1)];
    let alt = vec![mp(1.5, 0.5, 1)];
    let lhs = m.cluster_product_log_weight(&delta, &omega) + m.cluster_product_log_weight(&lam, &alt);
    let rhs = m.cluster_product_log_weight(&lam, &omega) + m.cluster_product_log_weight(&delta, &alt);
    assert!((lhs - rhs).abs() > 1e-3);
    let lhs = m.log_weight(&delta, &omega) + m.log_weight(&lam, &alt);
    let rhs = m.log_weight(&lam, &omega) + m.log_weight(&delta, &alt);
    assert!((lhs - rhs).abs() < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    /// Summing the initial species out of each cluster of the hard-core gas
    /// and pushing it through the flip gives the weight in closed form.
    #[test]
    fn wrm_weight_is_the_evolved_widom_rowlinson_density(
        seed in 0u64..10_000,
        lp in 0.5f64..3.0,
        ratio in 0.1f64..0.95,
        t in 0.05f64..3.0,
        raw in any::<bool>(),
    ) {
        let lm = lp * ratio;
        let r = 0.5;
        let convention = if raw { Convention::Raw } else { Convention::Absorbed };
        let m = wrm(lp, lm, r, t, convention);
        let lam = Window::unit_box(2, 3.0);
        let omega = sample_poisson_points(&lam, &[1.5, 1.5], &mut stream_rng(seed, 0)).unwrap();
        let same = p_same_series(t);
        let reference = if raw {
            [lp * same + lm * (1.0 - same), lp * (1.0 - same) + lm * same]
        } else {
            [lp * same, lp * (1.0 - same)]
        };
        let want = evolved_wr_log_density(lp, lm, t, r, reference, &omega);
        let got = m.log_weight(&lam, &omega);
        prop_assert!((got - want).abs() < 1e-9 * want.abs().max(1.0), "{} vs {}", got, want);
    }

    #[test]
    fn kappa_ratios(lp in 0.5f64..5.0, ratio in 0.05f64..0.99, t in 0.01f64..5.0) {
        let lm = lp * ratio;
        let m = wrm(lp, lm, 0.5, t, Convention::Absorbed);
        // a b = (λ₋/λ₊)² for every t
        prop_assert!((m.a() * m.b() - ratio * ratio).abs() < 1e-12);
        let same = p_same_series(t);
        prop_assert!((m.a() - lm * (1.0 - same) / (lp * same)).abs() < 1e-9 * m.a().max(1.0));
        prop_assert!((m.kappa(2, 1) - (m.a().powi(2) * m.b()).ln_1p()).abs() < 1e-12);
        prop_assert!(m.contraction() >= m.a().max(m.b()) * (1.0 - 1e-15));
    }

    #[test]
    fn gibbs_threshold_is_where_b_crosses_one(lp in 0.2f64..10.0, ratio in 0.01f64..0.99) {
        let lm = lp * ratio;
        let tg = gibbs_threshold(lp, lm).unwrap();
        let m = wrm(lp, lm, 0.5, tg, Convention::Absorbed);
        prop_assert!((m.b() - 1.0).abs() < 1e-10);
        prop_assert!((critical_time_bisection(lp, lm).unwrap() - tg).abs() < 1e-10);
        // just past the threshold both ratios are below one
        let later = wrm(lp, lm, 0.5, tg * 1.01 + 1e-3, Convention::Absorbed);
        prop_assert!(later.contraction() < 1.0);
    }

    #[test]
    fn hardcore_validity_is_the_pairwise_condition(seed in 0u64..10_000, r in 0.05f64..0.5) {
        let m = HardcoreWr { lambda_plus: 1.0, lambda_minus: 1.0, r };
        let omega = sample_poisson_points(&Window::unit_box(2, 3.0), &[1.0, 1.0], &mut stream_rng(seed, 0)).unwrap();
        let pos = positions(&omega);
        let pairwise_ok = (0..omega.len()).all(|i| {
            (0..omega.len()).all(|j| omega[i].mark == omega[j].mark || pos[i].dist(&pos[j]) >= 2.0 * r)
        });
        // the cluster criterion and the pairwise one agree
        let clusters_ok = components_floyd(&pos, 2.0 * r)
            .iter()
            .all(|b| b.iter().all(|&i| omega[i].mark == omega[b[0]].mark));
        prop_assert_eq!(pairwise_ok, clusters_ok);
        prop_assert_eq!(m.valid(&omega), pairwise_ok);
    }
}

#[test]
fn gibbs_threshold_anchor_value() {
    let exact = 0.5 * 3f64.ln();
    assert!((gibbs_threshold(2.0, 1.0).unwrap() - exact).abs() < 1e-15);
    assert!((critical_time_bisection(2.0, 1.0).unwrap() - exact).abs() < 1e-10);
    assert!(gibbs_threshold(1.0, 1.0).is_none());
    assert!(gibbs_threshold(1.0, 2.0).is_none());
}

#[test]
fn wrm_parameter_validation() {
    let bad = |lp: f64, lm: f64, r: f64, t: f64| {
        TimeEvolvedWrm::new(
            WrmParams {
                lambda_plus: lp,
                lambda_minus: lm,
                r,
                t,
            },
            Convention::Absorbed,
        )
        .is_err()
    };
    assert!(bad(-1.0, 1.0, 0.5, 1.0));
    assert!(bad(1.0, 1.0, 0.0, 1.0));
    assert!(bad(1.0, 1.0, 0.5, 0.0));
    assert!(bad(1.0, 1.0, 0.5, f64::NAN));
    assert!(!bad(1.0, 1.0, 0.5, f64::INFINITY));
}

#[test]
fn wrm_weight_depends_only_on_clusters_touching_lambda() {
    let m = wrm(2.0, 1.0, 0.5, 1.0, Convention::Absorbed);
    let lam = Window::new_box(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
    let base = vec![mp(0.5, 0.5, 0), mp(1.2, 0.5, 1)];
    let mut far = base.clone();
    far.push(mp(5.0, 5.0, 1));
    // the far cluster enters and cancels, so only rounding remains
    assert!((m.log_weight(&lam, &base) - m.log_weight(&lam, &far)).abs() < 1e-14);
    assert_eq!(m.log_weight(&lam, &[mp(5.0, 5.0, 0)]), 0.0);
}

#[test]
fn infinite_time_gives_independent_marks() {
    // at t = ∞ the flip forgets the initial species, a = b = λ₋/λ₊
    let m = wrm(2.0, 1.0, 0.5, f64::INFINITY, Convention::Absorbed);
    assert!((m.a() - 0.5).abs() < 1e-15 && (m.b() - 0.5).abs() < 1e-15);
}

#[test]
fn potts_pair_energies() {
    let g = PottsGas::new(
        vec![1.0, 1.0],
        StepPotential {
            strength: 2.0,
            range: 1.0,
        },
        StepPotential {
            strength: 0.5,
            range: 0.3,
        },
    )
    .unwrap();
    let a = MarkedPoint::new(&[0.0, 0.0], Mark(0));
    let b_close_other = MarkedPoint::new(&[0.2, 0.0], Mark(1));
    let b_far = MarkedPoint::new(&[2.0, 0.0], Mark(1));
    let b_same = MarkedPoint::new(&[0.5, 0.0], Mark(0));
    assert_eq!(g.pair_energy(&a, &b_close_other), 2.0 + 0.5);
    assert_eq!(g.pair_energy(&a, &b_far), 0.0);
    assert_eq!(g.pair_energy(&a, &b_same), 0.0);
    let eta = [a.clone(), b_close_other.clone()];
    assert_eq!(potts_pair_potential(&g, &eta), 2.5);
    let lam = Window::unit_box(2, 3.0);
    assert!((g.log_weight(&lam, &eta) + 2.5).abs() < 1e-15);
    assert!(PottsGas::new(vec![1.0], StepPotential::ZERO, StepPotential::ZERO).is_err());
}

#[test]
fn hard_potts_forbids_close_mismatches() {
    let g = PottsGas::new(
        vec![1.0, 1.0, 1.0],
        StepPotential {
            strength: f64::INFINITY,
            range: 1.0,
        },
        StepPotential::ZERO,
    )
    .unwrap();
    let lam = Window::unit_box(2, 3.0);
    let eta = [
        MarkedPoint::new(&[0.0, 0.0], Mark(0)),
        MarkedPoint::new(&[0.5, 0.0], Mark(2)),
    ];
    assert_eq!(g.log_weight(&lam, &eta), f64::NEG_INFINITY);
}
