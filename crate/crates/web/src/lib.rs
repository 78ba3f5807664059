//! WebAssembly bindings for the browser demo. Every call takes and returns JSON text.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use syncmdp::decision::Mode;
use syncmdp::dist::{parse_rational, to_f64};
use syncmdp::fixtures;
use syncmdp::format::{parse_model, write_model_with, ModelFile};
use syncmdp::play::witness_strategy;
use syncmdp::query::{run_query, Query};
use syncmdp::validation::{check_sync, run_trace, verify_witness, SyncKind, VerifyOptions};

const MAX_HORIZON: usize = 2000;

/// `[{name, model}]` for every built-in example, with init and target directives.
pub fn fixtures_json() -> String {
    let list: Vec<Value> = fixtures::all()
        .into_iter()
        .map(|f| {
            let target: Vec<String> = f.target.iter().map(|s| s.to_string()).collect();
            json!({ "name": f.name, "model": write_model_with(&f.mdp, Some(f.init), Some(&target)) })
        })
        .collect();
    Value::Array(list).to_string()
}

fn field<T: serde::de::DeserializeOwned>(q: &Value, key: &str, default: Option<&str>) -> Result<T, String> {
    let v = match q.get(key) {
        Some(v) if !v.is_null() => v.clone(),
        _ => Value::String(default.ok_or_else(|| format!("missing `{key}`"))?.to_string()),
    };
    serde_json::from_value(v).map_err(|e| format!("bad `{key}`: {e}"))
}

/// Reads `{objective, mode, function?, target?, init?}`; target and init
/// fall back to the model's directives.
fn resolve(file: &ModelFile, query_json: &str) -> Result<Query, String> {
    let q: Value = serde_json::from_str(query_json).map_err(|e| e.to_string())?;
    let target = match q.get("target").and_then(Value::as_str).filter(|s| !s.trim().is_empty()) {
        Some(s) => s.split(',').map(|x| x.trim().to_string()).collect(),
        None => file.target.clone().ok_or("no target given and the model has none")?,
    };
    let init = match q.get("init").and_then(Value::as_str).filter(|s| !s.trim().is_empty()) {
        Some(s) => s.trim().to_string(),
        None => file.init.clone().ok_or("no init given and the model has none")?,
    };
    Ok(Query {
        objective: field(&q, "objective", None)?,
        mode: field(&q, "mode", None)?,
        function: field(&q, "function", Some("sum"))?,
        target,
        init,
        max_period: None,
    })
}

/// The verdict JSON for a query, with a `verification` report on yes-verdicts.
pub fn check_json(model: &str, query_json: &str) -> Result<String, String> {
    let file = parse_model(model).map_err(|e| e.to_string())?;
    let q = resolve(&file, query_json)?;
    let v = run_query(&file.mdp, &q).map_err(|e| e.to_string())?;
    let mut out = serde_json::to_value(&v).map_err(|e| e.to_string())?;
    if v.witness.is_some() {
        let opts = VerifyOptions {
            horizon: 0,
            ..VerifyOptions::default()
        };
        if let Ok(r) = verify_witness(&file.mdp, &v, &opts) {
            out["verification"] = serde_json::to_value(r).map_err(|e| e.to_string())?;
        }
    }
    Ok(out.to_string())
}

/// Simulates the witness strategy: `{states, sum, max, dists, report}` with
/// floating-point series for plotting.
pub fn trace_json(model: &str, query_json: &str, horizon: usize) -> Result<String, String> {
    let file = parse_model(model).map_err(|e| e.to_string())?;
    let m = &file.mdp;
    let q = resolve(&file, query_json)?;
    let v = run_query(m, &q).map_err(|e| e.to_string())?;
    let (mut s, d0) = witness_strategy(m, &v).map_err(|e| e.to_string())?;
    let tr = run_trace(m, &mut s, &d0, horizon.min(MAX_HORIZON)).map_err(|e| e.to_string())?;
    let t = q.target_set(m).map_err(|e| e.to_string())?;
    let floats = |xs: Vec<_>| xs.iter().map(to_f64).collect::<Vec<f64>>();
    let dists: Vec<Vec<f64>> = tr
        .dists
        .iter()
        .map(|d| (0..m.num_states()).map(|i| to_f64(&d.prob(i))).collect())
        .collect();
    let p = parse_rational(if q.mode == Mode::Sure { "1" } else { "0.99" }).expect("literal");
    let kind = match q.objective {
        syncmdp::Objective::Event => SyncKind::Event,
        syncmdp::Objective::Weak => SyncKind::Weak,
        syncmdp::Objective::Strong => SyncKind::Strong,
    };
    let report = check_sync(&tr, &t, q.function, kind, &p);
    Ok(json!({
        "verdict": v.verdict,
        "states": m.state_names(),
        "sum": floats(tr.sum(&t)),
        "max": floats(tr.max(&t)),
        "dists": dists,
        "report": report,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn fixtures() -> String {
    fixtures_json()
}

#[wasm_bindgen]
pub fn check(model: &str, query_json: &str) -> Result<String, JsError> {
    check_json(model, query_json).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn trace(model: &str, query_json: &str, horizon: usize) -> Result<String, JsError> {
    trace_json(model, query_json, horizon).map_err(|e| JsError::new(&e))
}
