//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export takes and returns JSON text so the page needs no glue
//! beyond `JSON.parse`. The plain functions in [`api`] do the work and are
//! tested natively.

use wasm_bindgen::prelude::*;

pub mod api {
    use conebound::certificate::find_certificate_s;
    use conebound::lab::{linspace, scan_phase_diagram, Axis, ScanOperator, ScanPoint};
    use conebound::{ConeDescriptor, VerdictStatus};
    use serde::Serialize;

    fn cone(s: &str) -> Result<ConeDescriptor, String> {
        s.parse().map_err(|e: conebound::Error| e.to_string())
    }

    fn point(json: &str) -> Result<ScanPoint, String> {
        serde_json::from_str(json).map_err(|e| format!("bad parameters: {e}"))
    }

    fn to_json<T: Serialize>(v: &T) -> Result<String, String> {
        serde_json::to_string(v).map_err(|e| e.to_string())
    }

    /// Verdict JSON for `op` at the parameter point.
    pub fn decide(cone_str: &str, op: &str, params: &str) -> Result<String, String> {
        let c = cone(cone_str)?;
        let op: ScanOperator = op.parse().map_err(|e: conebound::Error| e.to_string())?;
        to_json(&point(params)?.decide(&c, op))
    }

    /// Certificate JSON for `S`, searched for without numeric verification.
    pub fn certify(cone_str: &str, params: &str) -> Result<String, String> {
        let c = cone(cone_str)?;
        let prm = point(params)?.s_params();
        find_certificate_s(&c, &prm).map_err(|e| e.to_string()).and_then(|cert| to_json(&cert))
    }

    #[derive(Serialize)]
    struct Grid {
        grid1: Vec<f64>,
        grid2: Vec<f64>,
        /// Row-major over `grid1`, one status code per cell.
        codes: Vec<u8>,
    }

    fn code(s: VerdictStatus) -> u8 {
        match s {
            VerdictStatus::Bounded => 0,
            VerdictStatus::Unbounded => 1,
            VerdictStatus::SufficientOnlyBounded => 2,
            VerdictStatus::Inconclusive => 3,
            VerdictStatus::ScopeError => 4,
        }
    }

    /// Phase diagram over two axes; the page paints `codes` onto a canvas.
    #[allow(clippy::too_many_arguments)]
    pub fn scan(
        cone_str: &str,
        op: &str,
        params: &str,
        axes: &str,
        n: usize,
        lo1: f64,
        hi1: f64,
        lo2: f64,
        hi2: f64,
    ) -> Result<String, String> {
        let c = cone(cone_str)?;
        let op: ScanOperator = op.parse().map_err(|e: conebound::Error| e.to_string())?;
        let (a, b) = axes.split_once(',').ok_or("axes must look like \"gamma,mu\"")?;
        let axis = |x: &str| x.trim().parse::<Axis>().map_err(|e| e.to_string());
        let (g1, g2) = (linspace(lo1, hi1, n), linspace(lo2, hi2, n));
        let r = scan_phase_diagram(&c, op, &point(params)?, [axis(a)?, axis(b)?], &g1, &g2, None).map_err(|e| e.to_string())?;
        let codes = r.statuses.iter().flatten().map(|s| code(*s)).collect();
        to_json(&Grid { grid1: r.grid1, grid2: r.grid2, codes })
    }
}

#[wasm_bindgen]
pub fn decide(cone: &str, op: &str, params: &str) -> Result<String, JsValue> {
    api::decide(cone, op, params).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn certify(cone: &str, params: &str) -> Result<String, JsValue> {
    api::certify(cone, params).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn scan(cone: &str, op: &str, params: &str, axes: &str, n: usize, lo1: f64, hi1: f64, lo2: f64, hi2: f64) -> Result<String, JsValue> {
    api::scan(cone, op, params, axes, n, lo1, hi1, lo2, hi2).map_err(|e| JsValue::from_str(&e))
}
