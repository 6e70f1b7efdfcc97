//! Browser bindings. Each export takes and returns JSON text; the `*_json`
//! functions are the same operations without the wasm boundary.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use ucycle::complex::ChainComplex;
use ucycle::ring::CoeffRing;
use ucycle::specfile::SpecFile;
use ucycle::umodule::{cokernel_module, homology, is_u_cyclic, sigma_class, Part, Variable};
use ucycle::verify::{run_named, CheckParams};

fn part(name: &str) -> Result<Part, String> {
    match name {
        "even" => Ok(Part::Even),
        "odd" => Ok(Part::Odd),
        "total" => Ok(Part::Total),
        other => Err(format!("unknown parity `{other}`")),
    }
}

/// Homology invariants of a spec file.
pub fn homology_json(spec: &str, parity: &str) -> Result<String, String> {
    let s = SpecFile::parse(spec).and_then(|f| f.to_spec()).map_err(|e| e.to_string())?;
    let cx = ChainComplex::build(&s).map_err(|e| e.to_string())?;
    let h = homology(&cx, part(parity)?).map_err(|e| e.to_string())?;
    let limit = s.b1 as u32 + 2;
    let out = json!({
        "N": s.n_value(),
        "ring": s.ring.to_string(),
        "group": h.group_type().to_string(),
        "invariants": h.invariants(limit),
        "t_nilpotency": h.nilpotency(Variable::T, limit),
        "generators": h.generators().iter().map(|g| g.to_string()).collect::<Vec<_>>(),
    });
    Ok(out.to_string())
}

/// Cyclicity of `sigma_i = T^i e_1` in the cokernel of the 4x4 matrix over Z.
pub fn sigma_json(n: u32, m: i32, i: i32) -> Result<String, String> {
    let module = cokernel_module(n as u64, m as i64, CoeffRing::Integers).map_err(|e| e.to_string())?;
    let s = sigma_class(&module, i as i64).map_err(|e| e.to_string())?;
    let r = is_u_cyclic(&module, &s).map_err(|e| e.to_string())?;
    Ok(json!({ "class": s.to_string(), "report": r }).to_string())
}

/// Runs a named check; `params` is an object with optional keys `b1`, `N`,
/// `m`, `ring`, `trials`, `seed`, `d`, `g`.
pub fn verify_json(check: &str, params: &str) -> Result<String, String> {
    let v: Value = serde_json::from_str(params).map_err(|e| e.to_string())?;
    let int = |k: &str| v.get(k).and_then(Value::as_i64);
    let mut p = CheckParams {
        b1: int("b1").map(|x| x as usize),
        n: int("N").map(|x| x as u64),
        m: int("m"),
        d: int("d"),
        g: int("g"),
        ..CheckParams::default()
    };
    if let Some(r) = v.get("ring").and_then(Value::as_str) {
        p.ring = r.parse().map_err(|e: ucycle::Error| e.to_string())?;
    }
    if let Some(t) = int("trials") {
        p.trials = t as usize;
    }
    if let Some(s) = int("seed") {
        p.seed = s as u64;
    }
    let r = run_named(check, &p).map_err(|e| e.to_string())?;
    serde_json::to_string(&r).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn compute_homology(spec: &str, parity: &str) -> Result<String, JsError> {
    homology_json(spec, parity).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn sigma_cyclicity(n: u32, m: i32, i: i32) -> Result<String, JsError> {
    sigma_json(n, m, i).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn run_check(check: &str, params: &str) -> Result<String, JsError> {
    verify_json(check, params).map_err(|e| JsError::new(&e))
}
