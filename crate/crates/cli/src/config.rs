//! Job configs: loading, builtin fixtures, `--set` overrides.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_json::{json, Map, Value};

use pinlock::fixtures;

use crate::Command;

pub const SCHEMA: &str = "pinlock/v1";

/// Reads `path`, or a builtin job when `path` is `builtin:NAME`.
pub fn load(command: Command, path: &str) -> Result<Value> {
    match path.strip_prefix("builtin:") {
        Some(name) => builtin_job(command, name),
        None => {
            let text = std::fs::read_to_string(Path::new(path)).with_context(|| format!("reading {path}"))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {path}"))
        }
    }
}

/// Applies `key=value` overrides. Keys are dotted paths (`dynamics.c`,
/// `beta.3`); values are parsed as JSON, falling back to a plain string.
pub fn apply_overrides(config: &mut Value, overrides: &[String]) -> Result<()> {
    for item in overrides {
        let (key, raw) = item.split_once('=').with_context(|| format!("override `{item}` is not key=value"))?;
        let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        let mut slot = &mut *config;
        for part in key.split('.') {
            slot = match slot {
                Value::Object(map) => map.entry(part.to_string()).or_insert(Value::Null),
                Value::Array(items) => {
                    let idx: usize = part.parse().with_context(|| format!("`{part}` in `{key}` is not an index"))?;
                    let len = items.len();
                    items.get_mut(idx).with_context(|| format!("index {idx} in `{key}` out of range (len {len})"))?
                }
                Value::Null => {
                    *slot = Value::Object(Map::new());
                    match slot {
                        Value::Object(map) => map.entry(part.to_string()).or_insert(Value::Null),
                        _ => unreachable!(),
                    }
                }
                _ => bail!("cannot descend into `{part}` of `{key}`"),
            };
        }
        *slot = value;
    }
    Ok(())
}

/// Replaces named `topology` / `dynamics` references with their inline form
/// and checks the schema tag.
pub fn resolve(config: &mut Value) -> Result<()> {
    let Value::Object(map) = config else {
        bail!("config must be a JSON object");
    };
    match map.get("schema") {
        None => {
            map.insert("schema".into(), Value::String(SCHEMA.into()));
        }
        Some(Value::String(s)) if s == SCHEMA => {}
        Some(other) => bail!("unsupported schema {other}; expected \"{SCHEMA}\""),
    }
    if let Some(Value::String(name)) = map.get("topology") {
        let inline = builtin_topology(name)?;
        map.insert("topology".into(), inline);
    }
    if let Some(Value::String(name)) = map.get("dynamics") {
        let inline = builtin_dynamics(name)?;
        map.insert("dynamics".into(), inline);
    }
    Ok(())
}

fn builtin_topology(name: &str) -> Result<Value> {
    match name {
        "paper-fig2" => Ok(serde_json::to_value(fixtures::paper_fig2())?),
        other => bail!("unknown builtin topology `{other}` (known: paper-fig2)"),
    }
}

fn builtin_dynamics(name: &str) -> Result<Value> {
    match name {
        "chen" => Ok(serde_json::to_value(fixtures::chen_dynamics())?),
        other => bail!("unknown builtin dynamics `{other}` (known: chen)"),
    }
}

/// The nine-node Chen benchmark set up for each command.
fn builtin_job(command: Command, name: &str) -> Result<Value> {
    let job = match (command, name) {
        (Command::Analyze, "paper-fig2") => json!({
            "topology": "paper-fig2",
            "dynamics": "chen",
            "beta": fixtures::BETA_1,
        }),
        (Command::Analyze, "paper-game") => json!({
            "topology": "paper-fig2",
            "dynamics": "chen",
            "beta": fixtures::game_beta_pin(),
        }),
        (Command::Design, "paper-fig2") => json!({
            "topology": "paper-fig2",
            "dynamics": "chen",
            "v": fixtures::benchmark_costs(),
            "selectable": [4, 6],
            "mode": "free",
        }),
        (Command::Game, "paper-game") => json!({
            "topology": "paper-fig2",
            "dynamics": "chen",
            "beta_pin": fixtures::game_beta_pin(),
            "kappa": fixtures::KAPPA,
            "eta": fixtures::GAME_ETA,
            "gain_ratio": 1.0,
            "mode": "stackelberg",
        }),
        (Command::Simulate, "paper-fig2") => json!({
            "topology": "paper-fig2",
            "field": {"kind": "chen"},
            "c": fixtures::COUPLING,
            "beta": fixtures::BETA_1,
        }),
        (Command::Simulate, "paper-game") => json!({
            "topology": "paper-fig2",
            "field": {"kind": "chen"},
            "c": fixtures::COUPLING,
            "beta": fixtures::game_beta_pin(),
            "attack": [0, 0, 0, 0, 0, 0, 1, 0, 0],
        }),
        (command, name) => bail!("no builtin `{name}` for the {command:?} command"),
    };
    Ok(job)
}
