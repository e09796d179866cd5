//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every entry point takes the trap frequency `omega` in units of g and
//! starts from the built-in reference parameters with the trap retuned, so
//! the Lamb-Dicke parameter follows `omega^-1/2`. Energies are relative to
//! `(m+1)ω_a`. Arrays cross the boundary as flat `Float64Array`s.

use vibron_qed::diag::{eigen_decompose, validate_roots, DEFAULT_NMAX};
use vibron_qed::dynamics::{self, TimeGrid};
use vibron_qed::fock::{build_block, PhononBasis};
use vibron_qed::gfun::{self, lowest_roots, GOptions, Window, DEFAULT_GRID_DENSITY};
use vibron_qed::{DimensionlessModel, ModelParams};
use wasm_bindgen::prelude::*;

fn model(omega: f64) -> Result<DimensionlessModel, String> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(format!("trap frequency must be positive (got {omega})"));
    }
    let base = DimensionlessModel::from_si(&ModelParams::reference()).map_err(|e| e.to_string())?;
    Ok(base.with_trap(omega))
}

fn sector(m: i32) -> Result<usize, String> {
    usize::try_from(m).map_err(|_| format!("sector index m must be >= 0 (got {m})"))
}

/// `[E0, G0, E1, G1, ...]`, with `G = NaN` on pole samples.
pub fn scan_values(omega: f64, m: i32, lo: f64, hi: f64, points: usize) -> Result<Vec<f64>, String> {
    let model = model(omega)?;
    let w = Window::new(lo, hi).map_err(|e| e.to_string())?;
    let pts = gfun::scan(sector(m)?, &model, w, points.max(2), &GOptions::default()).map_err(|e| e.to_string())?;
    Ok(pts
        .iter()
        .flat_map(|p| [p.energy, p.value.filter(|_| !p.near_pole).unwrap_or(f64::NAN)])
        .collect())
}

/// Lowest roots followed by one trailing entry: the largest distance to the
/// matching eigenvalue, or `NaN` if validation failed.
pub fn root_values(omega: f64, m: i32, levels: usize) -> Result<Vec<f64>, String> {
    let model = model(omega)?;
    let m = sector(m)?;
    let mut roots = lowest_roots(m, &model, levels, DEFAULT_GRID_DENSITY, &GOptions::default()).map_err(|e| e.to_string())?;
    let basis = PhononBasis::new(120).map_err(|e| e.to_string())?;
    let sys = eigen_decompose(&build_block(m, &model, basis)).map_err(|e| e.to_string())?;
    let rep = validate_roots(&mut roots, &sys, 1e-6).map_err(|e| e.to_string())?;
    let mut out = roots.energies();
    out.push(if rep.passed() { rep.max_diff } else { f64::NAN });
    Ok(out)
}

/// `[period, n_samples, P..., n_freq, omega..., |f|...]`; the period is `NaN`
/// when no oscillation is found.
pub fn dynamics_values(omega: f64, m: i32, t_max: f64, dt: f64) -> Result<Vec<f64>, String> {
    let model = model(omega)?;
    let grid = TimeGrid::new(t_max, dt).map_err(|e| e.to_string())?;
    let res = dynamics::run(sector(m)?, &model, DEFAULT_NMAX, &grid).map_err(|e| e.to_string())?;
    let mags = res.spectrum.magnitudes();
    let mut out = Vec::with_capacity(3 + res.population.len() + 2 * mags.len());
    out.push(res.period().unwrap_or(f64::NAN));
    out.push(res.population.len() as f64);
    out.extend(&res.population);
    out.push(mags.len() as f64);
    out.extend(&res.spectrum.omega);
    out.extend(mags);
    Ok(out)
}

#[wasm_bindgen]
pub fn gscan(omega: f64, m: i32, lo: f64, hi: f64, points: usize) -> Result<Vec<f64>, JsError> {
    scan_values(omega, m, lo, hi, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn roots(omega: f64, m: i32, levels: usize) -> Result<Vec<f64>, JsError> {
    root_values(omega, m, levels).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn dynamics(omega: f64, m: i32, t_max: f64, dt: f64) -> Result<Vec<f64>, JsError> {
    dynamics_values(omega, m, t_max, dt).map_err(|e| JsError::new(&e))
}
