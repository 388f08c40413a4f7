//! The `hyperedge` command line driver.
//!
//! Exit codes: 0 success, 1 a check suite failed, 2 usage or input error.
//! Every output embeds a [`RunManifest`].

mod manifest;
pub mod suites;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::geometry::{cluster_decompose, Mark, MarkedConfiguration, MarkedPoint, Norm, RadiiSchedule, Window};
use crate::kernel::{dlr_consistency_check, Budget, Observable, SpecificationKernel};
use crate::models::{
    Convention, HardcoreWr, PottsGas, PreModification, StepPotential, TimeEvolvedWrm, Unmodified, VolumeTilt, WrmParams,
};
use crate::resum::{abs_sum_partial, hamiltonian_equivalence_check, Grading, HyperedgePotential, Variant, WrmModulus};
use crate::sampling::{evolve_marks, sample_poisson, sample_poisson_points, stream_rng};
use crate::vacuum::{decay_phi, decay_phi_truncated, enumerate_hyperedges, SupportFamily, VacuumPotential};

pub use manifest::RunManifest;

#[derive(Parser, Debug)]
#[command(
    name = "hyperedge",
    version,
    about = "Vacuum potentials and hyperedge resummation for marked Poisson gases"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Record wall time in the manifest (breaks byte-identical reruns)
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sample a marked Poisson configuration, optionally spin-flip evolved
    Sample(SampleArgs),
    /// Cluster decomposition of a configuration
    Clusters(ClustersArgs),
    /// Per-hyperedge vacuum potential table (CSV)
    Vacuum(VacuumArgs),
    /// Resummed cell potentials, partial sums and Hamiltonian equivalence
    Resum(ResumArgs),
    /// Decay table of the WRM clique potential φ(n) (CSV)
    Decay(DecayArgs),
    /// One-stage versus two-stage kernel estimates
    Dlr(DlrArgs),
    /// Run the property suites
    Check(CheckArgs),
}

fn parse_window(s: &str) -> std::result::Result<Window, String> {
    s.parse::<Window>().map_err(|e| e.to_string())
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Twrm,
    Hardcore,
    Potts,
    Poisson,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConventionArg {
    Raw,
    Absorbed,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ModelArgs {
    #[arg(long, value_enum, default_value = "twrm")]
    pub model: ModelKind,
    #[arg(long, default_value_t = 2.0)]
    pub lambda_plus: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda_minus: f64,
    /// Ball radius; points interact below distance 2r
    #[arg(long, default_value_t = 0.5)]
    pub r: f64,
    /// Spin-flip time, `inf` allowed
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    #[arg(long, value_enum, default_value = "absorbed")]
    pub convention: ConventionArg,
    /// Potts colours; each gets intensity (λ₊+λ₋)/q
    #[arg(long, default_value_t = 3)]
    pub q: u8,
    /// Potts colour-mismatch strength (`inf` for a hard core)
    #[arg(long, default_value_t = f64::INFINITY)]
    pub potts_j: f64,
    /// Potts interaction range
    #[arg(long, default_value_t = 1.0)]
    pub potts_range: f64,
}

impl ModelArgs {
    pub fn build(&self) -> Result<Box<dyn PreModification>> {
        Ok(match self.model {
            ModelKind::Twrm => Box::new(self.wrm()?),
            ModelKind::Hardcore => Box::new(HardcoreWr {
                lambda_plus: self.lambda_plus,
                lambda_minus: self.lambda_minus,
                r: self.r,
            }),
            ModelKind::Potts => {
                if self.q < 2 {
                    return Err(Error::InvalidParameter("Potts needs q >= 2".into()));
                }
                let each = (self.lambda_plus + self.lambda_minus) / self.q as f64;
                Box::new(PottsGas::new(
                    vec![each; self.q as usize],
                    StepPotential {
                        strength: self.potts_j,
                        range: self.potts_range,
                    },
                    StepPotential::ZERO,
                )?)
            }
            ModelKind::Poisson => Box::new(Unmodified {
                intensities: vec![self.lambda_plus, self.lambda_minus],
            }),
        })
    }

    pub fn wrm(&self) -> Result<TimeEvolvedWrm> {
        TimeEvolvedWrm::new(
            WrmParams {
                lambda_plus: self.lambda_plus,
                lambda_minus: self.lambda_minus,
                r: self.r,
                t: self.t,
            },
            match self.convention {
                ConventionArg::Raw => Convention::Raw,
                ConventionArg::Absorbed => Convention::Absorbed,
            },
        )
    }
}

#[derive(Args, Debug, Serialize)]
pub struct SampleArgs {
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Window, e.g. box:0,0,10,10 or ball:0,0,5 (default [0,10]^dim)
    #[arg(long, value_parser = parse_window)]
    pub window: Option<Window>,
    #[arg(long, default_value_t = 2.0)]
    pub lambda_plus: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda_minus: f64,
    /// Evolve the marks by the spin flip for this time
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct ClustersArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    pub r: f64,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyArg {
    /// Connected subsets when the model declares a threshold, else all
    Auto,
    All,
    Connected,
    Pairs,
}

#[derive(Args, Debug, Serialize)]
pub struct VacuumArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = crate::vacuum::DEFAULT_CAP)]
    pub cap: usize,
    #[arg(long, value_enum, default_value = "auto")]
    pub family: FamilyArg,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VariantArg {
    Cyclic,
    Ti,
}

#[derive(Args, Debug, Serialize)]
pub struct ResumArgs {
    #[arg(long, value_enum, default_value = "cyclic")]
    pub variant: VariantArg,
    #[arg(long, default_value_t = 0.3)]
    pub lambda_plus: f64,
    #[arg(long, default_value_t = 0.1)]
    pub lambda_minus: f64,
    #[arg(long, default_value_t = 0.5)]
    pub r: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    /// Sampling window
    #[arg(long, value_parser = parse_window, default_value = "box:0,0,8,8")]
    pub window: Window,
    /// Inner volume Λ (default: the middle half of the window)
    #[arg(long, value_parser = parse_window)]
    pub lam: Option<Window>,
    #[arg(long)]
    pub seed: u64,
    /// Largest neighbourhood radius for the partial sums
    #[arg(long, default_value_t = 8.0)]
    pub dmax: f64,
    /// Grid step of the radii schedule
    #[arg(long, default_value_t = 1.0)]
    pub step: f64,
    /// Cluster-attachment constant K of the modulus (default: packing bound)
    #[arg(long)]
    pub k: Option<f64>,
    /// Interior variants for the equivalence check
    #[arg(long, default_value_t = 5)]
    pub variants: usize,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct DecayArgs {
    #[arg(long, default_value_t = 0.25)]
    pub alpha: f64,
    /// Comma-separated cluster sizes
    #[arg(long, value_delimiter = ',', default_value = "1,10,100,1000,10000")]
    pub n: Vec<usize>,
    /// Fixed truncation order (default: adaptive, tail below 1e-12)
    #[arg(long)]
    pub terms: Option<usize>,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObservableArg {
    Count,
    PlusFraction,
    ClusterCount,
    HardcoreValid,
}

#[derive(Args, Debug, Serialize)]
pub struct DlrArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_parser = parse_window, default_value = "box:0,0,1,1")]
    pub lam: Window,
    #[arg(long, value_parser = parse_window, default_value = "box:-0.5,-0.5,1.5,1.5")]
    pub delta: Window,
    #[arg(long, value_enum, default_value = "cluster-count")]
    pub observable: ObservableArg,
    /// One-stage sample size
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    /// Two-stage outer sample size (default n/50)
    #[arg(long)]
    pub outer: Option<usize>,
    /// Two-stage inner sample size
    #[arg(long, default_value_t = 500)]
    pub inner: usize,
    #[arg(long)]
    pub seed: u64,
    /// Negative control: tilt log h_Λ by β·|ω_Λ|·vol(Λ)
    #[arg(long, default_value_t = 0.0)]
    pub tilt: f64,
    /// Exterior configuration JSON
    #[arg(long)]
    pub exterior: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct CheckArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: suites::SuiteName,
    /// Override the trial count of every selected suite
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

/// Parses `args` and runs; returns the exit code.
pub fn main_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            code
        }
    }
}

/// Runs a parsed command line; returns the exit code.
pub fn run(cli: Cli) -> i32 {
    let start = std::time::Instant::now();
    let timing = cli.timing;
    let outcome = match &cli.command {
        Command::Sample(a) => cmd_sample(a).map(|v| (v, a.out.clone(), 0)),
        Command::Clusters(a) => cmd_clusters(a).map(|v| (v, a.out.clone(), 0)),
        Command::Vacuum(a) => cmd_vacuum(a).map(|v| (v, a.out.clone(), 0)),
        Command::Resum(a) => cmd_resum(a).map(|v| (v, a.out.clone(), 0)),
        Command::Decay(a) => cmd_decay(a).map(|v| (v, a.out.clone(), 0)),
        Command::Dlr(a) => cmd_dlr(a).map(|v| (v, a.out.clone(), 0)),
        Command::Check(a) => cmd_check(a).map(|(v, ok)| (v, a.out.clone(), if ok { 0 } else { 1 })),
    };
    match outcome {
        Ok((mut output, out, code)) => {
            if timing {
                output.set_wall_time(start.elapsed().as_secs_f64() * 1e3);
            }
            match write_output(out.as_ref(), &output.render()) {
                Ok(()) => code,
                Err(e) => {
                    eprintln!("error: {e}");
                    2
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

/// A rendered command result: JSON with an embedded manifest, or CSV with
/// the manifest as a comment header.
pub enum Output {
    Json { body: Value, manifest: RunManifest },
    Csv { body: String, manifest: RunManifest },
}

impl Output {
    fn set_wall_time(&mut self, ms: f64) {
        match self {
            Output::Json { manifest, .. } | Output::Csv { manifest, .. } => manifest.wall_time_ms = Some(ms),
        }
    }

    pub fn render(&self) -> String {
        match self {
            Output::Json { body, manifest } => {
                let mut body = body.clone();
                if let Value::Object(map) = &mut body {
                    map.insert("manifest".into(), serde_json::to_value(manifest).expect("manifest"));
                }
                let mut s = serde_json::to_string_pretty(&body).expect("json output");
                s.push('\n');
                s
            }
            Output::Csv { body, manifest } => format!("{}{}", manifest.csv_header(), body),
        }
    }
}

fn write_output(path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

fn params<T: Serialize>(args: &T) -> Value {
    serde_json::to_value(args).unwrap_or(Value::Null)
}

fn read_config(path: &PathBuf) -> Result<MarkedConfiguration> {
    MarkedConfiguration::from_json(&std::fs::read_to_string(path)?)
}

fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

pub fn cmd_sample(a: &SampleArgs) -> Result<Output> {
    let window = a.window.clone().unwrap_or_else(|| Window::unit_box(a.dim, 10.0));
    if window.dim() != a.dim {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            got: window.dim(),
        });
    }
    let mut rng = stream_rng(a.seed, 0);
    let config = sample_poisson(&window, &[a.lambda_plus, a.lambda_minus], &mut rng)?;
    let config = match a.t {
        Some(t) => {
            let mut pts = config.into_points();
            evolve_marks(&mut pts, t, &mut rng)?;
            MarkedConfiguration::new(a.dim, window, pts)?
        }
        None => config,
    };
    let plus = config.points().iter().filter(|p| p.mark == Mark::PLUS).count();
    let mut body = serde_json::to_value(&config)?;
    body["counts"] = json!({ "plus": plus, "minus": config.len() - plus });
    Ok(Output::Json {
        body,
        manifest: RunManifest::new("sample", params(a), Some(a.seed)),
    })
}

pub fn cmd_clusters(a: &ClustersArgs) -> Result<Output> {
    if !(a.r > 0.0) {
        return Err(Error::InvalidParameter("r must be positive".into()));
    }
    let config = read_config(&a.input)?;
    let c = cluster_decompose(&config.positions(), a.r);
    Ok(Output::Json {
        body: json!({ "count": c.len(), "labels": c.labels, "blocks": c.blocks }),
        manifest: RunManifest::new("clusters", params(a), None),
    })
}

pub fn cmd_vacuum(a: &VacuumArgs) -> Result<Output> {
    let config = read_config(&a.input)?;
    let model = a.model.build()?;
    let phi = VacuumPotential::new(model.as_ref(), config.window().clone())?.with_cap(a.cap);
    let family = match a.family {
        FamilyArg::Auto => SupportFamily::for_model(model.as_ref()),
        FamilyArg::All => SupportFamily::All,
        FamilyArg::Pairs => SupportFamily::PairsAndSingletons,
        FamilyArg::Connected => SupportFamily::Connected {
            threshold: model
                .connection_threshold()
                .ok_or_else(|| Error::InvalidParameter("model has no connection threshold".into()))?,
        },
    };
    let edges = enumerate_hyperedges(&phi, config.points(), family, |_| true)?;
    let mut body = String::from("edge,marks,value\n");
    for e in edges.iter().filter(|e| e.value != 0.0) {
        let idx: Vec<String> = e.members.iter().map(|i| i.to_string()).collect();
        let marks: Vec<String> = e.members.iter().map(|&i| config.points()[i].mark.to_string()).collect();
        body.push_str(&format!("{},{},{}\n", idx.join(";"), marks.join(";"), fmt_f64(e.value)));
    }
    Ok(Output::Csv {
        body,
        manifest: RunManifest::new("vacuum", params(a), None),
    })
}

fn middle_half(w: &Window) -> Window {
    let (lo, hi) = w.bounds();
    Window::Box {
        lo: lo.iter().zip(&hi).map(|(l, h)| l + 0.25 * (h - l)).collect(),
        hi: lo.iter().zip(&hi).map(|(l, h)| l + 0.75 * (h - l)).collect(),
    }
}

pub fn cmd_resum(a: &ResumArgs) -> Result<Output> {
    let model = TimeEvolvedWrm::new(
        WrmParams {
            lambda_plus: a.lambda_plus,
            lambda_minus: a.lambda_minus,
            r: a.r,
            t: a.t,
        },
        Convention::Absorbed,
    )?;
    let dim = a.window.dim();
    let lam = a.lam.clone().unwrap_or_else(|| middle_half(&a.window));
    if !a.window.contains_window(&lam) {
        return Err(Error::InvalidParameter("Λ must lie inside the window".into()));
    }
    let variant = match a.variant {
        VariantArg::Cyclic => Variant::Cyclic,
        VariantArg::Ti => Variant::TranslationInvariant,
    };
    let schedule = match variant {
        Variant::Cyclic => {
            let mut modulus = WrmModulus::for_model(&model, dim)?;
            if let Some(k) = a.k {
                modulus = modulus.with_k(k);
            }
            modulus.schedule(Norm::Euclidean, a.step, 200)?
        }
        Variant::TranslationInvariant => RadiiSchedule::linear(Norm::Max, a.step)?,
    };
    let grading = Grading::new(variant, schedule.clone())?;
    let intensities = model.reference_intensities();
    let omega = sample_poisson_points(&a.window, &intensities, &mut stream_rng(a.seed, 0))?;
    let phi = VacuumPotential::new(&model, a.window.clone())?;
    let psi = HyperedgePotential::new(grading.clone(), &phi);

    let cells = psi.all_cells(&omega)?;
    let pts: Vec<_> = omega.iter().map(|p| p.pos.clone()).collect();
    let labels = grading.cells(&pts)?;
    let cells_json: Vec<Value> = cells
        .iter()
        .zip(&labels)
        .map(|(c, l)| {
            json!({
                "anchor": c.anchor, "index": c.index, "radius": c.radius,
                "members": l.members, "psi": c.psi,
            })
        })
        .collect();

    let mut radii = Vec::new();
    let mut r = a.step;
    while r <= a.dmax + 1e-12 {
        radii.push(r);
        r += a.step;
    }
    let summ = abs_sum_partial(&psi, &lam, &omega, &radii)?;

    let exterior: Vec<MarkedPoint> = omega.iter().filter(|p| !lam.contains(&p.pos)).cloned().collect();
    let mut variants = vec![omega.clone()];
    for i in 1..a.variants.max(1) {
        let mut v = sample_poisson_points(&lam, &intensities, &mut stream_rng(a.seed, i as u64))?;
        v.extend(exterior.iter().cloned());
        variants.push(v);
    }
    let family = SupportFamily::Connected { threshold: 2.0 * a.r };
    let equivalence = hamiltonian_equivalence_check(&psi, &lam, &variants, family)?;

    let body = json!({
        "variant": variant,
        "points": omega,
        "lam": lam,
        "schedule": schedule.listed().iter().take(20).collect::<Vec<_>>(),
        "cells": cells_json,
        "partial_sums": summ.radii.iter().zip(&summ.partial_sums)
            .map(|(r, s)| json!({"radius": r, "sum": s})).collect::<Vec<_>>(),
        "nondecreasing": summ.nondecreasing,
        "density": summ.density,
        "equivalence": equivalence,
    });
    Ok(Output::Json {
        body,
        manifest: RunManifest::new("resum", params(a), Some(a.seed)),
    })
}

pub fn cmd_decay(a: &DecayArgs) -> Result<Output> {
    if !(a.alpha > 0.0 && a.alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("alpha {} must lie in (0, 1)", a.alpha)));
    }
    let bound = 2.0 * (1.0 / a.alpha).ln() + 1.0;
    let mut body = String::from("n,phi,abs_phi_ln_n,tail_bound,terms,bounded\n");
    for &n in &a.n {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be >= 1".into()));
        }
        let v = match a.terms {
            Some(j) => decay_phi_truncated(n, a.alpha, j),
            None => decay_phi(n, a.alpha)?,
        };
        let scaled = v.value.abs() * (n as f64).ln();
        body.push_str(&format!(
            "{n},{},{},{},{},{}\n",
            fmt_f64(v.value),
            fmt_f64(scaled),
            fmt_f64(v.tail_bound),
            v.terms,
            scaled <= bound
        ));
    }
    Ok(Output::Csv {
        body,
        manifest: RunManifest::new("decay", params(a), None),
    })
}

fn observable(kind: ObservableArg, lam: &Window, r: f64) -> Observable {
    match kind {
        ObservableArg::Count => Observable::Count {
            region: lam.clone(),
            mark: None,
        },
        ObservableArg::PlusFraction => Observable::PlusFraction { region: lam.clone() },
        ObservableArg::ClusterCount => Observable::ClusterCount { region: lam.clone(), r },
        ObservableArg::HardcoreValid => Observable::HardcoreValid { r },
    }
}

pub fn cmd_dlr(a: &DlrArgs) -> Result<Output> {
    let base = a.model.build()?;
    let model: Box<dyn PreModification> = if a.tilt != 0.0 {
        Box::new(VolumeTilt {
            inner: base,
            beta: a.tilt,
        })
    } else {
        base
    };
    let exterior = match &a.exterior {
        Some(p) => read_config(p)?.into_points(),
        None => Vec::new(),
    };
    let f = observable(a.observable, &a.lam, a.model.r);
    // two-stage run, then an independent one-stage run at its own size
    let outer = Budget::new(a.outer.unwrap_or((a.n / 50).max(2)), a.seed);
    let inner = Budget::new(a.inner, a.seed.wrapping_add(1));
    let mut report = dlr_consistency_check(model.as_ref(), &a.lam, &a.delta, &exterior, &f, &outer, &inner)?;
    if a.n != outer.samples {
        let kernel = SpecificationKernel::new(model.as_ref(), a.delta.clone())?;
        report.one_stage = kernel.apply(&f, &exterior, &Budget::new(a.n, a.seed.wrapping_add(2)))?;
        let se = (report.one_stage.std_error.powi(2) + report.two_stage.std_error.powi(2)).sqrt();
        let diff = report.two_stage.value - report.one_stage.value;
        report.z = if diff == 0.0 { 0.0 } else { diff / se };
    }
    let body = json!({
        "estimate": report.two_stage.value,
        "stderr": report.two_stage.std_error,
        "z": report.z,
        "ess": report.two_stage.ess,
        "consistent": report.z.abs() < 4.0,
        "one_stage": report.one_stage,
        "two_stage": report.two_stage,
    });
    Ok(Output::Json {
        body,
        manifest: RunManifest::new("dlr", params(a), Some(a.seed)),
    })
}

pub fn cmd_check(a: &CheckArgs) -> Result<(Output, bool)> {
    let results = suites::run(a.suite, a.trials, a.seed)?;
    let passed = results.iter().all(|r| r.passed);
    let body = json!({ "passed": passed, "suites": results });
    Ok((
        Output::Json {
            body,
            manifest: RunManifest::new("check", params(a), Some(a.seed)),
        },
        passed,
    ))
}
