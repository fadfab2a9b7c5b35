//! Browser bindings over `cherry-core`.
//!
//! Every export returns JSON text; the page parses it. The plain functions
//! are the implementation and are tested natively.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use cherry_core::arith::{mod1, BigReal};
use cherry_core::classify::{biperiodic_eigen, classify_point, curve_trace};
use cherry_core::pipeline::{tune_spec, MapSpec};
use cherry_core::rotation::{check_closest_returns, ContinuedFraction};

/// Working precision for the field and curve; doubles are shown anyway.
const PREC: usize = 96;
/// Upper bound on grid and sample counts.
const MAX_POINTS: usize = 40_000;

#[derive(Debug, Serialize)]
pub struct Field {
    pub a: u64,
    pub b: u64,
    pub nx: usize,
    pub ny: usize,
    pub l1: [f64; 2],
    pub l2: [f64; 2],
    /// Row-major, `ny` rows from `l2[0]` upwards; `null` off the domain.
    pub lambda_u: Vec<Option<f64>>,
}

#[derive(Debug, Serialize)]
pub struct Graph {
    pub c: f64,
    pub flat: [f64; 2],
    pub xs: Vec<f64>,
    /// `f(x)` in `[0, 1)`.
    pub ys: Vec<f64>,
    pub returns: Vec<u64>,
}

fn cell(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    if n == 1 {
        lo
    } else {
        lo + (hi - lo) * i as f64 / (n - 1) as f64
    }
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("serializable")
}

/// `lambda_u(a, b; l1, l2)` on an `nx` by `ny` grid.
pub fn lambda_field(
    a: u64,
    b: u64,
    l1: [f64; 2],
    l2: [f64; 2],
    nx: usize,
    ny: usize,
) -> Result<Field, String> {
    if a == 0 || b == 0 {
        return Err("a and b must be positive".into());
    }
    if nx == 0 || ny == 0 || nx * ny > MAX_POINTS {
        return Err(format!("grid must have 1..={MAX_POINTS} points"));
    }
    if !(l1[0] >= 1.0 && l2[0] >= 1.0 && l1[1] >= l1[0] && l2[1] >= l2[0]) {
        return Err("exponent ranges must start at or above 1".into());
    }
    let mut values = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        let y = BigReal::from_f64(cell(l2[0], l2[1], ny, j), PREC);
        for i in 0..nx {
            let x = BigReal::from_f64(cell(l1[0], l1[1], nx, i), PREC);
            let v = biperiodic_eigen(a, b, &x, &y).ok().map(|(_, u)| u.to_f64());
            values.push(v.filter(|u| u.is_finite()));
        }
    }
    Ok(Field {
        a,
        b,
        nx,
        ny,
        l1,
        l2,
        lambda_u: values,
    })
}

pub fn verdict(rho: &str, l1: &str, l2: &str) -> Result<String, String> {
    let cf: ContinuedFraction = rho.parse().map_err(|e| format!("{e}"))?;
    let x = BigReal::parse(l1, 128).map_err(|e| e.to_string())?;
    let y = BigReal::parse(l2, 128).map_err(|e| e.to_string())?;
    let one = BigReal::one(128);
    if x < one || y < one {
        return Err("exponents must be >= 1".into());
    }
    Ok(json(&classify_point(&cf, &x, &y)))
}

/// `(l1, l2)` pairs on `lambda_u = 1` for `steps + 1` values of `l1`.
pub fn transition_curve(
    a: u64,
    b: u64,
    start: f64,
    stop: f64,
    steps: usize,
) -> Result<Vec<[f64; 2]>, String> {
    if a == 0 || b == 0 {
        return Err("a and b must be positive".into());
    }
    if !(start > 1.0 && stop >= start) || steps == 0 || steps > MAX_POINTS {
        return Err("need 1 < start <= stop and a positive step count".into());
    }
    let grid: Vec<BigReal> = (0..=steps)
        .map(|i| BigReal::from_f64(cell(start, stop, steps + 1, i), PREC))
        .collect();
    let report = curve_trace(a, b, &grid, PREC).map_err(|e| e.to_string())?;
    Ok(grid
        .iter()
        .zip(&report.points)
        .filter_map(|(x, p)| p.ell2_value.as_ref().map(|y| [x.to_f64(), y.to_f64()]))
        .collect())
}

/// Tunes a map to `rho` at `depth` and samples its graph.
pub fn map_graph(
    l1: &str,
    l2: &str,
    u_left: &str,
    u_length: &str,
    rho: &str,
    depth: usize,
    samples: usize,
) -> Result<Graph, String> {
    if !(2..=14).contains(&depth) {
        return Err("depth must lie in 2..=14".into());
    }
    if !(2..=MAX_POINTS).contains(&samples) {
        return Err(format!("samples must lie in 2..={MAX_POINTS}"));
    }
    let spec = MapSpec {
        ell1: l1.into(),
        ell2: l2.into(),
        u_left: u_left.into(),
        u_length: u_length.into(),
        cf: rho.parse().map_err(|e| format!("{e}"))?,
    };
    let prec = 128;
    let tuned = tune_spec(&spec, depth, prec, None).map_err(|e| e.to_string())?;
    let m = &tuned.map;
    let returns =
        check_closest_returns(&tuned, depth.min(tuned.depth)).map_err(|e| e.to_string())?;
    let mut xs = Vec::with_capacity(samples);
    let mut ys = Vec::with_capacity(samples);
    for i in 0..samples {
        let x = i as f64 / samples as f64;
        let p = mod1(&BigReal::from_f64(x, prec)).map_err(|e| e.to_string())?;
        xs.push(x);
        ys.push(m.eval(&p).rep().to_f64());
    }
    Ok(Graph {
        c: m.c().rep().to_f64(),
        flat: [m.flat().left().rep().to_f64(), m.flat().length().to_f64()],
        xs,
        ys,
        returns,
    })
}

fn js<T: Serialize>(r: Result<T, String>) -> Result<String, JsValue> {
    r.map(|v| json(&v)).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = lambdaField)]
#[allow(clippy::too_many_arguments)]
pub fn lambda_field_js(
    a: u32,
    b: u32,
    l1_lo: f64,
    l1_hi: f64,
    l2_lo: f64,
    l2_hi: f64,
    nx: u32,
    ny: u32,
) -> Result<String, JsValue> {
    js(lambda_field(
        a.into(),
        b.into(),
        [l1_lo, l1_hi],
        [l2_lo, l2_hi],
        nx as usize,
        ny as usize,
    ))
}

#[wasm_bindgen(js_name = verdict)]
pub fn verdict_js(rho: &str, l1: &str, l2: &str) -> Result<String, JsValue> {
    verdict(rho, l1, l2).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = transitionCurve)]
pub fn transition_curve_js(
    a: u32,
    b: u32,
    start: f64,
    stop: f64,
    steps: u32,
) -> Result<String, JsValue> {
    js(transition_curve(
        a.into(),
        b.into(),
        start,
        stop,
        steps as usize,
    ))
}

#[wasm_bindgen(js_name = mapGraph)]
#[allow(clippy::too_many_arguments)]
pub fn map_graph_js(
    l1: &str,
    l2: &str,
    u_left: &str,
    u_length: &str,
    rho: &str,
    depth: u32,
    samples: u32,
) -> Result<String, JsValue> {
    js(map_graph(
        l1,
        l2,
        u_left,
        u_length,
        rho,
        depth as usize,
        samples as usize,
    ))
}
