//! Browser bindings. Every export returns a JSON string; the `*_json`
//! functions are the same operations without the JavaScript error wrapper.

use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::*;
use yamabe_core::asymptotics::{counterexample_report, FConvention};
use yamabe_core::invariants::{
    lambda_hp2, lambda_lower, lambda_lower_min, model_constants, yamabe_sphere, ModelSpace,
};
use yamabe_core::yamabe_ode::{
    find_bracket, integrate, shoot_with, theorem_check, RadialProblem, RadialSolution,
    ShootOptions,
};

const BITS: u32 = 96;
const DIGITS: usize = 12;
/// Trajectories are thinned to at most this many points for plotting.
const MAX_POINTS: usize = 600;

#[derive(Serialize)]
struct Bound {
    k: i64,
    value: f64,
    decimal: String,
}

/// `Lambda_{n,k}` for `2 <= k <= n-4`, with `mu(S^n)`, the minimum and
/// `lambda_n` when `n >= 11`.
pub fn lambda_profile_json(n: i64) -> Result<String, String> {
    if !(6..=400).contains(&n) {
        return Err(format!("n must lie in 6..=400, got {n}"));
    }
    let e = |e: yamabe_core::Error| e.to_string();
    let bounds = (2..=n - 4)
        .map(|k| {
            let v = lambda_lower(n, k, BITS).map_err(e)?.value;
            Ok(Bound {
                k,
                value: v.to_f64(),
                decimal: v.to_decimal(DIGITS),
            })
        })
        .collect::<Result<Vec<_>, String>>()?;
    let sphere = yamabe_sphere(n, BITS).map_err(e)?;
    let min = lambda_lower_min(n, BITS).map_err(e)?;
    let hp2 = if n >= 11 {
        Some(lambda_hp2(n, BITS).map_err(e)?.value.to_decimal(DIGITS))
    } else {
        None
    };
    Ok(json!({
        "n": n,
        "sphere": sphere.to_decimal(DIGITS),
        "sphere_value": sphere.to_f64(),
        "bounds": bounds,
        "min": min.value.to_decimal(DIGITS),
        "argmin": min.argmin,
        "lambda_hp2": hp2,
    })
    .to_string())
}

fn thinned(s: &RadialSolution) -> serde_json::Value {
    let step = s.samples.len().div_ceil(MAX_POINTS).max(1);
    let pts: Vec<_> = s
        .samples
        .iter()
        .enumerate()
        .filter(|(i, _)| i % step == 0 || *i + 1 == s.samples.len())
        .map(|(_, x)| (x.r, x.u, s.tau_at(x)))
        .collect();
    json!({
        "r": pts.iter().map(|p| p.0).collect::<Vec<_>>(),
        "u": pts.iter().map(|p| p.1).collect::<Vec<_>>(),
        "tau": pts.iter().map(|p| p.2).collect::<Vec<_>>(),
    })
}

/// Radial solution on `H_c^{k+1} x S^{n-k-1}` with `mu = n(n-1)`. A positive
/// `u0` is integrated as given; otherwise the decaying solution is shot for.
pub fn radial_json(n: i64, k: i64, c: f64, u0: f64) -> Result<String, String> {
    let e = |e: yamabe_core::Error| e.to_string();
    let m = ModelSpace::new(n, k, c).map_err(e)?;
    if n > 40 {
        return Err(format!("n = {n} is too large for the demo"));
    }
    let mu = (n * (n - 1)) as f64;
    let opts = ShootOptions::default();
    let (sol, u0_used, shot) = if u0 > 0.0 && u0.is_finite() {
        let p = RadialProblem::new(m, mu, u0).map_err(e)?;
        (integrate(&p, opts.radius(&m), 1e-9).map_err(e)?, u0, false)
    } else {
        let b = find_bracket(&m, mu, &opts)
            .map_err(e)?
            .ok_or_else(|| "no bracket between crossing and non-crossing data".to_string())?;
        let r = shoot_with(&m, mu, b, 1e-9, &opts).map_err(e)?;
        (r.solution, r.u0_star, true)
    };
    let verdict = theorem_check(&sol);
    let mc = model_constants(&m);
    Ok(json!({
        "n": n, "k": k, "c": c, "mu": mu,
        "u0": u0_used,
        "shot": shot,
        "classification": sol.classification.label(),
        "sqrt_alpha": mc.alpha.sqrt(),
        "tau_threshold": mc.tau_threshold,
        "verdict": verdict,
        "trajectory": thinned(&sol),
    })
    .to_string())
}

pub fn counterexample_json(n: i64, paper_stated: bool) -> Result<String, String> {
    let conv = if paper_stated {
        FConvention::PaperStated
    } else {
        FConvention::Derived
    };
    let r = counterexample_report(n, conv).map_err(|e| e.to_string())?;
    serde_json::to_string(&r).map_err(|e| e.to_string())
}

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = lambdaProfile)]
pub fn lambda_profile(n: i32) -> Result<String, JsError> {
    js(lambda_profile_json(n.into()))
}

#[wasm_bindgen(js_name = radialSolution)]
pub fn radial_solution(n: i32, k: i32, c: f64, u0: f64) -> Result<String, JsError> {
    js(radial_json(n.into(), k.into(), c, u0))
}

#[wasm_bindgen]
pub fn counterexample(n: i32, paper_stated: bool) -> Result<String, JsError> {
    js(counterexample_json(n.into(), paper_stated))
}
