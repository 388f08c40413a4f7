//! Browser bindings for the demo page in `www/`.
//!
//! Every operation has a plain Rust form returning JSON or an error string,
//! so it can be tested natively, and a `#[wasm_bindgen]` wrapper.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use hyperedge::geometry::{cluster_decompose, MarkedPoint, Norm, RadiiSchedule, Window};
use hyperedge::models::{gibbs_threshold, Convention, PreModification, TimeEvolvedWrm, WrmParams};
use hyperedge::resum::{Grading, HyperedgePotential, Variant, WrmModulus};
use hyperedge::sampling::{evolve_marks, sample_poisson_points, stream_rng};
use hyperedge::vacuum::{decay_phi, VacuumPotential};

/// Largest window side the page may request; keeps the point count small.
const MAX_SIDE: f64 = 30.0;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn wrm(lambda_plus: f64, lambda_minus: f64, r: f64, t: f64) -> Result<TimeEvolvedWrm, String> {
    TimeEvolvedWrm::new(
        WrmParams {
            lambda_plus,
            lambda_minus,
            r,
            t,
        },
        Convention::Absorbed,
    )
    .map_err(err)
}

/// Samples the `±` Poisson gas on `[0, side]²`, flips the marks for time
/// `t`, and labels the clusters of radius-`r` balls.
pub fn sample_wrm_json(
    lambda_plus: f64,
    lambda_minus: f64,
    r: f64,
    t: f64,
    side: f64,
    seed: u64,
) -> Result<String, String> {
    if !(side > 0.0 && side <= MAX_SIDE) {
        return Err(format!("side must lie in (0, {MAX_SIDE}]"));
    }
    let model = wrm(lambda_plus, lambda_minus, r, t)?;
    let window = Window::unit_box(2, side);
    let mut rng = stream_rng(seed, 0);
    let mut points = sample_poisson_points(&window, &[lambda_plus, lambda_minus], &mut rng).map_err(err)?;
    evolve_marks(&mut points, t, &mut rng).map_err(err)?;
    let pos: Vec<_> = points.iter().map(|p| p.pos.clone()).collect();
    let clusters = cluster_decompose(&pos, r);
    Ok(json!({
        "side": side,
        "lambda_plus": lambda_plus,
        "lambda_minus": lambda_minus,
        "r": r,
        "t": t,
        "points": points,
        "labels": clusters.labels,
        "clusters": clusters.len(),
        "a": model.a(),
        "b": model.b(),
        "gibbs_threshold": gibbs_threshold(lambda_plus, lambda_minus),
    })
    .to_string())
}

/// `(n, φ(n), |φ(n)| ln n)` at roughly log-spaced `n` up to `n_max`.
pub fn decay_curve_json(alpha: f64, n_max: usize) -> Result<String, String> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err("alpha must lie in (0, 1)".into());
    }
    let mut ns: Vec<usize> = Vec::new();
    let mut x = 1.0f64;
    while (x as usize) <= n_max.max(1) {
        let n = x.round() as usize;
        if ns.last() != Some(&n) {
            ns.push(n);
        }
        x *= 1.25;
    }
    let rows = ns
        .into_iter()
        .map(|n| {
            let v = decay_phi(n, alpha).map_err(err)?;
            Ok(json!({ "n": n, "phi": v.value, "scaled": v.value.abs() * (n as f64).ln() }))
        })
        .collect::<Result<Vec<Value>, String>>()?;
    Ok(json!({ "alpha": alpha, "bound": 2.0 * (1.0 / alpha).ln() + 1.0, "rows": rows }).to_string())
}

/// The resummed cells `Ψ_{x,m}` anchored at point `anchor` of a sampled
/// configuration (as returned by [`sample_wrm_json`]).
pub fn resum_cells_json(config: &str, anchor: usize, variant: &str, step: f64) -> Result<String, String> {
    let v: Value = serde_json::from_str(config).map_err(err)?;
    let points: Vec<MarkedPoint> = serde_json::from_value(v["points"].clone()).map_err(err)?;
    let side = v["side"].as_f64().ok_or("missing side")?;
    let r = v["r"].as_f64().ok_or("missing r")?;
    if anchor >= points.len() {
        return Err(format!("anchor {anchor} out of range"));
    }
    let field = |k: &str| v[k].as_f64().ok_or(format!("missing {k}"));
    let model = wrm(field("lambda_plus")?, field("lambda_minus")?, r, field("t")?)?;
    let variant: Variant = variant.parse().map_err(err)?;
    let schedule = match variant {
        Variant::Cyclic => WrmModulus::for_model(&model, 2)
            .and_then(|m| m.schedule(Norm::Euclidean, step, 200))
            .map_err(err)?,
        Variant::TranslationInvariant => RadiiSchedule::linear(Norm::Max, step).map_err(err)?,
    };
    let grading = Grading::new(variant, schedule).map_err(err)?;
    let phi = VacuumPotential::new(&model, Window::unit_box(2, side)).map_err(err)?;
    let psi = HyperedgePotential::new(grading.clone(), &phi);
    let pos: Vec<_> = points.iter().map(|p| p.pos.clone()).collect();
    let cells = psi
        .psi_anchor(&points, anchor)
        .map_err(err)?
        .into_iter()
        .map(|c| {
            let members = grading.label(&pos, c.anchor, c.index).map_err(err)?;
            Ok(json!({ "index": c.index, "radius": c.radius, "psi": c.psi, "members": members }))
        })
        .collect::<Result<Vec<Value>, String>>()?;
    Ok(json!({
        "anchor": anchor,
        "model": model.name(),
        "cells": cells,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn sample_wrm(
    lambda_plus: f64,
    lambda_minus: f64,
    r: f64,
    t: f64,
    side: f64,
    seed: u32,
) -> Result<String, JsValue> {
    sample_wrm_json(lambda_plus, lambda_minus, r, t, side, seed as u64).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn decay_curve(alpha: f64, n_max: u32) -> Result<String, JsValue> {
    decay_curve_json(alpha, n_max as usize).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn resum_cells(config: &str, anchor: u32, variant: &str, step: f64) -> Result<String, JsValue> {
    resum_cells_json(config, anchor as usize, variant, step).map_err(|e| JsValue::from_str(&e))
}
