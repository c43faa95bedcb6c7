//! Browser bindings for three demo views. Every export returns a JSON string
//! so the page needs no generated type glue beyond `wasm-bindgen` itself.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use colossal::oscillation::{contour_data, delta_phi_family, Grid};
use colossal::robin::{x_value, E_GAMMA};
use colossal::{CaSequence, OscParams, PrimeSieve};

/// Enough primes for the first few thousand CA numbers while staying small in the browser.
const DEMO_SIEVE_LIMIT: u64 = 200_000;
const MAX_WALK: usize = 5_000;

#[derive(Serialize)]
struct Contours {
    levels: Vec<Level>,
    asymptote_angle: Option<f64>,
}

#[derive(Serialize)]
struct Level {
    level: f64,
    polylines: Vec<Vec<(f64, f64)>>,
}

#[derive(Serialize)]
struct Curve {
    x: f64,
    derivative: bool,
    points: Vec<(f64, f64)>,
}

#[derive(Serialize)]
struct Walk {
    e_gamma: f64,
    points: Vec<(usize, f64)>,
}

fn to_json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

pub fn contours_json(
    b: f64,
    delta: f64,
    levels: &[f64],
    hi: f64,
    cells: usize,
) -> Result<String, String> {
    let p = OscParams::new(b, delta).map_err(|e| e.to_string())?;
    let data =
        contour_data(&p, Grid::square(0.02, hi, cells), levels).map_err(|e| e.to_string())?;
    to_json(&Contours {
        levels: data
            .levels
            .into_iter()
            .map(|l| Level {
                level: l.level,
                polylines: l.polylines,
            })
            .collect(),
        asymptote_angle: data.asymptote_angle,
    })
}

pub fn delta_phi_json(samples: usize) -> Result<String, String> {
    let curves: Vec<Curve> = delta_phi_family(samples)
        .into_iter()
        .map(|c| Curve {
            x: c.x,
            derivative: c.derivative,
            points: c.points,
        })
        .collect();
    to_json(&curves)
}

pub fn x_walk_json(last: usize) -> Result<String, String> {
    if !(2..=MAX_WALK).contains(&last) {
        return Err(format!("walk length must be in 2..={MAX_WALK}"));
    }
    let sieve = PrimeSieve::new(DEMO_SIEVE_LIMIT).map_err(|e| e.to_string())?;
    let seq = CaSequence::generate(&sieve, last).map_err(|e| e.to_string())?;
    let points = seq
        .records()
        .iter()
        .skip(1)
        .filter_map(|r| x_value(&r.stats).ok().map(|x| (r.index, x)))
        .collect();
    to_json(&Walk {
        e_gamma: E_GAMMA,
        points,
    })
}

/// Level sets of the oscillation quotient g on `[0.02, hi]²`.
#[wasm_bindgen]
pub fn contours(
    b: f64,
    delta: f64,
    levels: Vec<f64>,
    hi: f64,
    cells: usize,
) -> Result<String, JsError> {
    contours_json(b, delta, &levels, hi, cells).map_err(|e| JsError::new(&e))
}

/// The nine Δφ curves and their φ-derivatives.
#[wasm_bindgen]
pub fn delta_phi_curves(samples: usize) -> Result<String, JsError> {
    delta_phi_json(samples).map_err(|e| JsError::new(&e))
}

/// `(i, X(n_i))` for `2 ≤ i ≤ last`.
#[wasm_bindgen]
pub fn x_walk(last: usize) -> Result<String, JsError> {
    x_walk_json(last).map_err(|e| JsError::new(&e))
}
