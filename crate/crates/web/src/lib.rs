//! WebAssembly bindings behind `www/index.html`.
//!
//! Each exported function is a thin wrapper over a plain Rust function in
//! [`demo`], which the native tests call directly.

use wasm_bindgen::prelude::*;

pub mod demo;

/// Even `n` in `[from, to]` and `G(n)/(𝔖(n) n)`, interleaved as `n0, r0, n1, r1, ...`.
#[wasm_bindgen]
pub fn ratio_curve(from: u32, to: u32) -> Result<Vec<f64>, JsError> {
    demo::ratio_curve(from as u64, to as u64).map_err(|e| JsError::new(&e))
}

/// Hardy's `Z(t)` for the character `q:<q>,idx:<index>` at `samples` points of `[t_lo, t_hi]`.
#[wasm_bindgen]
pub fn hardy_curve(q: u32, index: &str, t_lo: f64, t_hi: f64, samples: u32) -> Result<Vec<f64>, JsError> {
    demo::hardy_curve(q as u64, index, t_lo, t_hi, samples as usize).map_err(|e| JsError::new(&e))
}

/// Verified zeros up to height `t` as JSON `[{"beta":..,"gamma":..}, ...]`.
#[wasm_bindgen]
pub fn zeros_json(q: u32, index: &str, t: f64) -> Result<String, JsError> {
    demo::zeros_json(q as u64, index, t).map_err(|e| JsError::new(&e))
}

/// The `compare` report as JSON.
#[wasm_bindgen]
pub fn compare_json(q: u32, n: f64, delta: f64) -> Result<String, JsError> {
    demo::compare_json(q as u64, n, delta).map_err(|e| JsError::new(&e))
}
