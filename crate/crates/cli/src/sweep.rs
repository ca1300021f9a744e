use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use gaussopt::harness::{self, VerificationReport, VerifyParams};
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{Map, Value};

use crate::config::{Resolved, UsageError};

/// `grid` keys are `VerifyParams` field names; optimizer fields use `optimizer.<field>`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub theorem: String,
    #[serde(default)]
    pub params: Map<String, Value>,
    #[serde(default)]
    pub grid: BTreeMap<String, Vec<Value>>,
}

pub fn run(spec_path: &Path, output: Option<PathBuf>, run: &Resolved) -> Result<ExitCode, UsageError> {
    let text = std::fs::read_to_string(spec_path).map_err(|e| UsageError(format!("{}: {e}", spec_path.display())))?;
    let spec: SweepSpec =
        serde_json::from_str(&text).map_err(|e| UsageError(format!("{}: {e}", spec_path.display())))?;
    if !harness::verifier_ids().contains(&spec.theorem.as_str()) {
        return Err(UsageError(format!(
            "unknown verifier '{}'; known IDs: {}",
            spec.theorem,
            harness::verifier_ids().join(", ")
        )));
    }
    let mut base = serde_json::to_value(&run.params)?;
    for (key, value) in &spec.params {
        set_path(&mut base, key, value.clone())?;
    }
    for key in spec.grid.keys() {
        set_path(&mut base.clone(), key, Value::Null)?;
    }
    let points = grid_points(&spec.grid);
    let seed = run.seed();
    let global = run.global;
    let rows: Vec<VerificationReport> = points
        .par_iter()
        .map(|point| {
            let mut v = base.clone();
            for (key, value) in point {
                set_path(&mut v, key, value.clone())?;
            }
            let mut params: VerifyParams =
                serde_json::from_value(v).map_err(|e| UsageError(format!("grid point {}: {e}", show(point))))?;
            params.seed = seed;
            harness::run(&spec.theorem, &params, &global)
                .map_err(|e| UsageError(format!("grid point {}: {e}", show(point))))
        })
        .collect::<Result<_, _>>()?;

    let detail_keys: BTreeSet<&String> = rows
        .iter()
        .flat_map(|r| r.details.iter().filter(|(_, v)| is_scalar(v)).map(|(k, _)| k))
        .collect();
    let mut out: Box<dyn std::io::Write> = match &output {
        Some(p) => Box::new(std::fs::File::create(p).map_err(|e| UsageError(format!("{}: {e}", p.display())))?),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(&mut out);
    let mut header: Vec<String> = spec.grid.keys().cloned().collect();
    header.extend(["gap", "leakage", "status", "trials"].map(String::from));
    header.extend(detail_keys.iter().map(|k| k.to_string()));
    w.write_record(&header)?;
    for (point, report) in points.iter().zip(&rows) {
        let mut record: Vec<String> = point.iter().map(|(_, v)| cell(v)).collect();
        record.push(cell(&serde_json::to_value(report)?["gap"]));
        record.push(cell(&serde_json::json!(report.leakage)));
        record.push(cell(&serde_json::to_value(report.status)?));
        record.push(report.trials.to_string());
        record.extend(detail_keys.iter().map(|k| report.details.get(*k).map(cell).unwrap_or_default()));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(crate::exit_for(&rows.iter().map(|r| r.status).collect::<Vec<_>>()))
}

/// Cartesian product in sorted key order; any empty axis (or no axes) gives no points.
pub fn grid_points(grid: &BTreeMap<String, Vec<Value>>) -> Vec<Vec<(String, Value)>> {
    if grid.is_empty() || grid.values().any(Vec::is_empty) {
        return Vec::new();
    }
    let mut points = vec![Vec::new()];
    for (key, values) in grid {
        points = points
            .into_iter()
            .flat_map(|p: Vec<(String, Value)>| {
                values.iter().map(move |v| {
                    let mut next = p.clone();
                    next.push((key.clone(), v.clone()));
                    next
                })
            })
            .collect();
    }
    points
}

fn set_path(root: &mut Value, key: &str, value: Value) -> Result<(), UsageError> {
    let mut slot = root;
    for part in key.split('.') {
        slot = slot
            .as_object_mut()
            .and_then(|m| m.get_mut(part))
            .ok_or_else(|| UsageError(format!("unknown parameter '{key}'")))?;
    }
    *slot = value;
    Ok(())
}

fn is_scalar(v: &Value) -> bool {
    matches!(v, Value::Number(_) | Value::String(_) | Value::Bool(_))
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn show(point: &[(String, Value)]) -> String {
    point.iter().map(|(k, v)| format!("{k}={}", cell(v))).collect::<Vec<_>>().join(",")
}
