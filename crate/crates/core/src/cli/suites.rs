//! Property suites behind `hyperedge check`.
//!
//! Each suite has a default trial count and a pass tolerance; `--trials`
//! overrides the count, and zero trials is a vacuous pass.

use clap::ValueEnum;
use rand::Rng;
use serde::Serialize;

use crate::error::Result;
use crate::geometry::{Mark, MarkedPoint, Norm, Window};
use crate::kernel::{dlr_consistency_check, Budget, Observable};
use crate::models::{
    critical_time_bisection, gibbs_threshold, premod_swap_check, Convention, HardcoreWr, PreModification,
    TimeEvolvedWrm, Unmodified, VolumeTilt, WrmParams,
};
use crate::resum::{hamiltonian_equivalence_check, Grading, HyperedgePotential, Variant, WrmModulus};
use crate::sampling::{sample_poisson_points, stream_rng, uniform_point};
use crate::vacuum::{check_finite_range, decay_phi, hamiltonian_report, SupportFamily, VacuumPotential};

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteName {
    All,
    Swap,
    Vacuum,
    Reconstruction,
    Hamiltonian,
    Range,
    Nonzero,
    Threshold,
    Decay,
    Resum,
    Dlr,
    NegativeControl,
}

impl SuiteName {
    /// Suites run by `all`; the negative control is opt-in since it is
    /// expected to flag the broken model.
    pub const DEFAULT: [SuiteName; 10] = [
        SuiteName::Swap,
        SuiteName::Vacuum,
        SuiteName::Reconstruction,
        SuiteName::Hamiltonian,
        SuiteName::Range,
        SuiteName::Nonzero,
        SuiteName::Threshold,
        SuiteName::Decay,
        SuiteName::Resum,
        SuiteName::Dlr,
    ];

    pub fn default_trials(self) -> usize {
        match self {
            SuiteName::All => 0,
            SuiteName::Swap => 500,
            SuiteName::Vacuum => 1000,
            SuiteName::Reconstruction => 200,
            SuiteName::Hamiltonian => 200,
            SuiteName::Range => 500,
            SuiteName::Nonzero => 1000,
            SuiteName::Threshold => 100,
            SuiteName::Decay => 4,
            SuiteName::Resum => 20,
            SuiteName::Dlr => 1,
            SuiteName::NegativeControl => 1,
        }
    }

    fn label(self) -> &'static str {
        match self {
            SuiteName::All => "all",
            SuiteName::Swap => "swap",
            SuiteName::Vacuum => "vacuum",
            SuiteName::Reconstruction => "reconstruction",
            SuiteName::Hamiltonian => "hamiltonian",
            SuiteName::Range => "range",
            SuiteName::Nonzero => "nonzero",
            SuiteName::Threshold => "threshold",
            SuiteName::Decay => "decay",
            SuiteName::Resum => "resum",
            SuiteName::Dlr => "dlr",
            SuiteName::NegativeControl => "negative-control",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub trials: usize,
    /// Worst observed error, or the z-score for the sampling suites.
    pub metric: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl SuiteResult {
    fn within(name: &'static str, trials: usize, metric: f64, tolerance: f64) -> Self {
        SuiteResult {
            name,
            passed: metric <= tolerance,
            trials,
            metric,
            tolerance,
            note: None,
        }
    }

    fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Runs `suite` (or every default suite for `All`).
pub fn run(suite: SuiteName, trials: Option<usize>, seed: u64) -> Result<Vec<SuiteResult>> {
    let selected: Vec<SuiteName> = match suite {
        SuiteName::All => SuiteName::DEFAULT.to_vec(),
        s => vec![s],
    };
    selected
        .into_iter()
        .map(|s| run_one(s, trials.unwrap_or(s.default_trials()), seed))
        .collect()
}

pub fn run_one(suite: SuiteName, trials: usize, seed: u64) -> Result<SuiteResult> {
    if trials == 0 {
        return Ok(SuiteResult {
            name: suite.label(),
            passed: true,
            trials: 0,
            metric: 0.0,
            tolerance: 0.0,
            note: Some("no trials".into()),
        });
    }
    match suite {
        SuiteName::All => unreachable!("expanded by run"),
        SuiteName::Swap => swap(trials, seed),
        SuiteName::Vacuum => vacuum(trials, seed),
        SuiteName::Reconstruction => reconstruction(trials, seed),
        SuiteName::Hamiltonian => hamiltonian(trials, seed),
        SuiteName::Range => range(trials, seed),
        SuiteName::Nonzero => nonzero(trials, seed),
        SuiteName::Threshold => threshold(trials, seed),
        SuiteName::Decay => decay(trials),
        SuiteName::Resum => resum(trials, seed),
        SuiteName::Dlr => dlr(seed),
        SuiteName::NegativeControl => negative_control(seed),
    }
}

/// The time-evolved WRM at `λ₊ = 2, λ₋ = 1, r = 1/2, t = 1`.
pub fn reference_wrm(convention: Convention) -> TimeEvolvedWrm {
    TimeEvolvedWrm::new(
        WrmParams {
            lambda_plus: 2.0,
            lambda_minus: 1.0,
            r: 0.5,
            t: 1.0,
        },
        convention,
    )
    .expect("valid parameters")
}

fn square(lo: f64, hi: f64) -> Window {
    Window::Box {
        lo: vec![lo, lo],
        hi: vec![hi, hi],
    }
}

/// `size` uniform points in `window` with uniformly random marks.
pub fn random_points<R: Rng + ?Sized>(window: &Window, size: usize, marks: u8, rng: &mut R) -> Vec<MarkedPoint> {
    (0..size)
        .map(|_| MarkedPoint {
            pos: uniform_point(window, rng),
            mark: Mark(rng.random_range(0..marks)),
        })
        .collect()
}

fn swap(trials: usize, seed: u64) -> Result<SuiteResult> {
    let window = Window::unit_box(2, 10.0);
    let mut worst: f64 = 0.0;
    let mut structural = 0;
    let hardcore = HardcoreWr {
        lambda_plus: 2.0,
        lambda_minus: 1.0,
        r: 0.5,
    };
    let models: [&dyn PreModification; 3] = [
        &reference_wrm(Convention::Absorbed),
        &reference_wrm(Convention::Raw),
        &hardcore,
    ];
    for m in models {
        let rep = premod_swap_check(m, &window, trials, seed)?;
        worst = worst.max(rep.max_error);
        structural += rep.structural_failures;
    }
    let mut res = SuiteResult::within("swap", trials, worst, 1e-10);
    if structural > 0 {
        res.passed = false;
        res = res.note(format!("{structural} structural failures"));
    }
    Ok(res)
}

fn vacuum(trials: usize, seed: u64) -> Result<SuiteResult> {
    let model = reference_wrm(Convention::Absorbed);
    let small = square(0.0, 1.5);
    let phi_small = VacuumPotential::new(&model, small.clone())?;
    let phi_large = VacuumPotential::new(&model, square(-2.0, 4.0))?;
    let mut worst: f64 = 0.0;
    for i in 0..trials {
        let mut rng = stream_rng(seed, i as u64);
        let size = rng.random_range(1..=6);
        let eta = random_points(&small, size, 2, &mut rng);
        let v = phi_small.phi(&eta)?;
        worst = worst.max((v - phi_large.phi(&eta)?).abs());
        let full = (1usize << size) - 1;
        for mask in 0..full {
            let present: Vec<bool> = (0..size).map(|j| mask >> j & 1 == 1).collect();
            worst = worst.max(phi_small.phi_given(&eta, &present)?.abs());
        }
    }
    Ok(SuiteResult::within("vacuum", trials, worst, 1e-10))
}

fn reconstruction(trials: usize, seed: u64) -> Result<SuiteResult> {
    let model = reference_wrm(Convention::Absorbed);
    let lam = square(0.0, 2.0);
    let phi = VacuumPotential::new(&model, lam.clone())?;
    let mut worst: f64 = 0.0;
    for i in 0..trials {
        let mut rng = stream_rng(seed, i as u64);
        let size = rng.random_range(0..=10);
        let omega = random_points(&lam, size, 2, &mut rng);
        let rec = phi.mobius_reconstruct(&omega)?;
        worst = worst.max(rec.error / rec.target.abs().max(1.0));
    }
    Ok(SuiteResult::within("reconstruction", trials, worst, 1e-8))
}

fn hamiltonian(trials: usize, seed: u64) -> Result<SuiteResult> {
    let model = reference_wrm(Convention::Absorbed);
    let delta = square(0.0, 2.0);
    let phi = VacuumPotential::new(&model, delta.clone())?;
    let family = SupportFamily::for_model(&model);
    let intensities = model.reference_intensities();
    let mut worst: f64 = 0.0;
    for i in 0..trials {
        let mut rng = stream_rng(seed, i as u64);
        let (a, b) = (rng.random_range(0.0..1.0), rng.random_range(1.0..2.0));
        let lam = square(a, b);
        let omega = sample_poisson_points(&delta, &intensities, &mut rng)?;
        if omega.len() > phi.cap() {
            continue;
        }
        let rep = hamiltonian_report(&phi, &lam, &delta, &omega, family)?;
        worst = worst.max((rep.value - rep.closed_form).abs() / rep.closed_form.abs().max(1.0));
    }
    Ok(SuiteResult::within("hamiltonian", trials, worst, 1e-8))
}

fn range(trials: usize, seed: u64) -> Result<SuiteResult> {
    let model = HardcoreWr {
        lambda_plus: 2.0,
        lambda_minus: 1.0,
        r: 0.5,
    };
    let phi = VacuumPotential::new(&model, square(0.0, 2.0))?;
    let rep = check_finite_range(&phi, 2.0 * model.r, trials, 6, 2, 1e-10, seed)?;
    let mut res = SuiteResult::within("range", rep.probes, rep.max_abs, 1e-10);
    res.passed &= rep.violations == 0 && rep.probes == trials;
    Ok(res.note(format!("{} zero-weight probes skipped", rep.skipped_zero_weight)))
}

fn nonzero(trials: usize, seed: u64) -> Result<SuiteResult> {
    let model = reference_wrm(Convention::Absorbed);
    let phi = VacuumPotential::new(&model, Window::new_box(&[-1.0, -1.0], &[5.0, 2.0])?)?;
    let left = square(0.0, 1.0);
    let right = Window::new_box(&[2.5, 0.0], &[3.5, 1.0])?;
    let mut worst: f64 = 0.0;
    for i in 0..trials {
        let mut rng = stream_rng(seed, i as u64);
        let (k, l) = (rng.random_range(1..=3), rng.random_range(1..=3));
        let mut eta = random_points(&left, k, 2, &mut rng);
        eta.extend(random_points(&right, l, 2, &mut rng));
        worst = worst.max(phi.phi(&eta)?.abs());
    }
    Ok(SuiteResult::within("nonzero", trials, worst, 1e-8))
}

fn threshold(trials: usize, seed: u64) -> Result<SuiteResult> {
    let exact = 0.5 * 3f64.ln();
    let mut worst = (critical_time_bisection(2.0, 1.0).unwrap_or(f64::NAN) - exact).abs();
    let mut rng = stream_rng(seed, 0);
    for _ in 0..trials {
        let lm = rng.random_range(0.05..5.0);
        let lp = lm * rng.random_range(1.05..20.0);
        let t = gibbs_threshold(lp, lm).unwrap_or(f64::NAN);
        let model = TimeEvolvedWrm::new(
            WrmParams {
                lambda_plus: lp,
                lambda_minus: lm,
                r: 0.5,
                t,
            },
            Convention::Absorbed,
        )?;
        worst = worst.max((model.b() - 1.0).abs());
    }
    Ok(SuiteResult::within("threshold", trials, worst, 1e-10))
}

fn decay(trials: usize) -> Result<SuiteResult> {
    let bound = 2.0 * 4f64.ln() + 1.0;
    let mut worst: f64 = 0.0;
    let mut tail: f64 = 0.0;
    for n in [10usize, 100, 1000, 10_000].into_iter().take(trials) {
        let v = decay_phi(n, 0.25)?;
        worst = worst.max(v.value.abs() * (n as f64).ln());
        tail = tail.max(v.tail_bound);
    }
    let mut res = SuiteResult::within("decay", trials.min(4), worst, bound);
    res.passed &= tail < 1e-12;
    Ok(res.note(format!("largest tail bound {tail:e}")))
}

fn resum(trials: usize, seed: u64) -> Result<SuiteResult> {
    let model = TimeEvolvedWrm::new(
        WrmParams {
            lambda_plus: 0.3,
            lambda_minus: 0.1,
            r: 0.5,
            t: 1.0,
        },
        Convention::Absorbed,
    )?;
    let window = square(0.0, 8.0);
    let lam = square(2.0, 6.0);
    let schedule = WrmModulus::for_model(&model, 2)?.schedule(Norm::Euclidean, 0.5, 200)?;
    let grading = Grading::new(Variant::Cyclic, schedule)?;
    let phi = VacuumPotential::new(&model, window.clone())?;
    let psi = HyperedgePotential::new(grading, &phi);
    let family = SupportFamily::for_model(&model);
    let intensities = model.reference_intensities();
    let mut worst: f64 = 0.0;
    for e in 0..trials {
        let base = seed.wrapping_add(1000 * e as u64);
        let exterior: Vec<MarkedPoint> = sample_poisson_points(&window, &intensities, &mut stream_rng(base, 0))?
            .into_iter()
            .filter(|p| !lam.contains(&p.pos))
            .collect();
        let variants = (1..=5)
            .map(|v| {
                let mut w = sample_poisson_points(&lam, &intensities, &mut stream_rng(base, v))?;
                w.extend(exterior.iter().cloned());
                Ok(w)
            })
            .collect::<Result<Vec<_>>>()?;
        worst = worst.max(hamiltonian_equivalence_check(&psi, &lam, &variants, family)?.spread);
    }
    Ok(SuiteResult::within("resum", trials, worst, 1e-6))
}

fn dlr_windows() -> (Window, Window) {
    (square(0.0, 1.0), square(-0.5, 1.5))
}

fn dlr(seed: u64) -> Result<SuiteResult> {
    let (lam, delta) = dlr_windows();
    let f = Observable::Count {
        region: lam.clone(),
        mark: None,
    };
    let poisson = Unmodified {
        intensities: vec![2.0, 1.0],
    };
    let outer = Budget::new(100_000, seed);
    let inner = Budget::new(50, seed.wrapping_add(1));
    let zp = dlr_consistency_check(&poisson, &lam, &delta, &[], &f, &outer, &inner)?.z;
    let wrm = reference_wrm(Convention::Absorbed);
    let g = Observable::ClusterCount {
        region: lam.clone(),
        r: 0.5,
    };
    let zw = dlr_consistency_check(&wrm, &lam, &delta, &[], &g, &outer, &inner)?.z;
    let worst = zp.abs().max(zw.abs() / 2.0);
    Ok(SuiteResult::within("dlr", 2, worst, 2.0).note(format!("poisson z = {zp:.3}, wrm z = {zw:.3}")))
}

/// Passes when the volume-tilted Poisson model is detected (`z > 10`).
fn negative_control(seed: u64) -> Result<SuiteResult> {
    let (lam, delta) = dlr_windows();
    let f = Observable::Count {
        region: lam.clone(),
        mark: None,
    };
    let broken = VolumeTilt {
        inner: Unmodified {
            intensities: vec![2.0, 1.0],
        },
        beta: 0.05,
    };
    let rep = dlr_consistency_check(
        &broken,
        &lam,
        &delta,
        &[],
        &f,
        &Budget::new(20_000, seed),
        &Budget::new(100, seed.wrapping_add(1)),
    )?;
    Ok(SuiteResult {
        name: "negative-control",
        passed: rep.z.abs() > 10.0,
        trials: 1,
        metric: rep.z.abs(),
        tolerance: 10.0,
        note: Some(format!("broken model detected: {}", rep.z.abs() > 10.0)),
    })
}
