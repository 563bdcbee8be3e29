//! Config files: shorthand normalization and validation.
//!
//! A file holds either one experiment at the top level or a list under
//! `experiments`. Shorthands accepted on top of the canonical form:
//! `T`, `reps` and `seed` for `horizons`, `replications` and `master_seed`;
//! `env` and `algo` as bare names with their parameters as siblings;
//! `feedback` defaulting to what the learner requires. A relative
//! `output_dir` is taken from the working directory.

use std::path::{Path, PathBuf};

use serde_json::{Map, Value};
use trade_lab::harness::{AlgoSpec, ExperimentConfig};

pub const SCHEMA_VERSION: u64 = 1;

const ENV_PARAMS: &[&str] = &["eps", "lambda", "x", "probe_budget"];
const ALGO_PARAMS: &[&str] = &["T0", "K", "bandit", "known_m", "naive_index", "price"];
const ALIASES: &[(&str, &str)] = &[("T", "horizons"), ("reps", "replications"), ("seed", "master_seed")];

#[derive(Debug)]
pub struct ConfigFile {
    pub output_dir: PathBuf,
    pub experiments: Vec<ExperimentConfig>,
}

pub fn load(path: &Path) -> Result<ConfigFile, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    parse(value, Path::new("."))
}

/// Parses a config document; a relative `output_dir` is joined onto `base`.
pub fn parse(value: Value, base: &Path) -> Result<ConfigFile, String> {
    let Value::Object(mut top) = value else {
        return Err("config must be a JSON object".into());
    };
    match top.remove("schema_version") {
        None => {}
        Some(Value::Number(n)) if n.as_u64() == Some(SCHEMA_VERSION) => {}
        Some(v) => return Err(format!("schema_version: unsupported value {v}, expected {SCHEMA_VERSION}")),
    }
    let output_dir = match top.remove("output_dir") {
        None => base.join("out"),
        Some(Value::String(s)) => base.join(s),
        Some(v) => return Err(format!("output_dir: expected a string, got {v}")),
    };
    let raw: Vec<Value> = match top.remove("experiments") {
        Some(Value::Array(list)) => {
            if let Some(k) = top.keys().next() {
                return Err(format!("unknown top-level field `{k}` alongside `experiments`"));
            }
            list
        }
        Some(v) => return Err(format!("experiments: expected a list, got {v}")),
        None => vec![Value::Object(top)],
    };
    if raw.is_empty() {
        return Err("experiments: list is empty".into());
    }
    let mut experiments = Vec::with_capacity(raw.len());
    for (i, v) in raw.into_iter().enumerate() {
        let cfg = experiment(v).map_err(|e| format!("experiment {i}: {e}"))?;
        if experiments.iter().any(|c: &ExperimentConfig| c.name == cfg.name) {
            return Err(format!("experiment {i}: duplicate name `{}`", cfg.name));
        }
        experiments.push(cfg);
    }
    Ok(ConfigFile { output_dir, experiments })
}

fn experiment(value: Value) -> Result<ExperimentConfig, String> {
    let Value::Object(mut obj) = value else {
        return Err("expected a JSON object".into());
    };
    for &(short, long) in ALIASES {
        if let Some(v) = obj.remove(short) {
            if obj.contains_key(long) {
                return Err(format!("both `{short}` and `{long}` given"));
            }
            obj.insert(long.into(), v);
        }
    }
    nest(&mut obj, "env", "family", ENV_PARAMS)?;
    nest(&mut obj, "algo", "algo", ALGO_PARAMS)?;

    // A bare horizon is a one-element list.
    if let Some(v @ Value::Number(_)) = obj.get("horizons") {
        let v = v.clone();
        obj.insert("horizons".into(), Value::Array(vec![v]));
    }
    if !obj.contains_key("feedback") {
        let algo: AlgoSpec = serde_json::from_value(obj.get("algo").cloned().unwrap_or(Value::Null))
            .map_err(|e| format!("algo: {e}"))?;
        obj.insert("feedback".into(), serde_json::to_value(algo.required_feedback()).expect("serializable"));
    }
    if !obj.contains_key("name") {
        let env = obj.get("env").and_then(|e| e.get("family")).and_then(Value::as_str).unwrap_or("env");
        let algo = obj.get("algo").and_then(|a| a.get("algo")).and_then(Value::as_str).unwrap_or("algo");
        obj.insert("name".into(), Value::String(format!("{env}_{algo}")));
    }
    let cfg: ExperimentConfig = serde_json::from_value(Value::Object(obj)).map_err(|e| e.to_string())?;
    if cfg.name.is_empty() || !cfg.name.chars().all(|c| c.is_ascii_alphanumeric() || "_-.".contains(c)) {
        return Err(format!("name: `{}` must be non-empty and use only [A-Za-z0-9_.-]", cfg.name));
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

/// Turns `"key": "name"` plus sibling parameters into `"key": {tag: name, ..}`.
fn nest(obj: &mut Map<String, Value>, key: &str, tag: &str, params: &[&str]) -> Result<(), String> {
    let Some(Value::String(name)) = obj.get(key).cloned() else {
        return Ok(());
    };
    let mut inner = Map::new();
    inner.insert(tag.into(), Value::String(name));
    for &p in params {
        if let Some(v) = obj.remove(p) {
            inner.insert(p.into(), v);
        }
    }
    obj.insert(key.into(), Value::Object(inner));
    Ok(())
}
