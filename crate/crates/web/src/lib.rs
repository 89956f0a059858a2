//! WebAssembly entry points for the demo page.
//!
//! Each export takes plain numbers or JSON text and returns JSON text. The
//! work is done by the functions in [`ops`], which are ordinary Rust and
//! testable off the browser.

use wasm_bindgen::prelude::*;

pub mod ops;

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

/// Regime and limit weights on an `s × t` grid of a two-parameter family.
#[wasm_bindgen(js_name = phaseGrid)]
pub fn phase_grid(family: &str, s_lo: f64, s_hi: f64, s_n: usize, t_lo: f64, t_hi: f64, t_n: usize) -> Result<String, JsError> {
    js(ops::phase_grid(family, (s_lo, s_hi, s_n), (t_lo, t_hi, t_n)))
}

/// `ln(λ-1)`, `μ[0]`, `μ[1]` over evenly spaced β, with fitted rates.
#[wasm_bindgen(js_name = betaSweep)]
pub fn beta_sweep(potential: &str, beta_lo: f64, beta_hi: f64, n: usize) -> Result<String, JsError> {
    js(ops::beta_sweep(potential, beta_lo, beta_hi, n))
}

/// Rule report and stage-by-stage masses for a schedule; an empty string
/// runs the bundled schedule.
#[wasm_bindgen(js_name = nonselection)]
pub fn nonselection(schedule: &str) -> Result<String, JsError> {
    js(ops::nonselection(schedule))
}

/// Preset inputs for the page.
#[wasm_bindgen(js_name = presets)]
pub fn presets() -> String {
    ops::presets()
}
