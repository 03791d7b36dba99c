//! Parameter resolution and run manifests.
//!
//! Every subcommand resolves its parameters in the order flag, then JSON
//! config, then built-in default, and records the result in a manifest.
//! A manifest can be passed back as `--config` to repeat the run.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;
pub const SEED_ENV: &str = "POLARFORGE_SEED";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub subcommand: String,
    pub parameters: Value,
    pub tool_version: String,
    pub seed: Option<u64>,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(
        subcommand: &str,
        parameters: &impl Serialize,
        seed: Option<u64>,
    ) -> CliResult<Self> {
        Ok(RunManifest {
            schema_version: SCHEMA_VERSION,
            subcommand: subcommand.to_string(),
            parameters: serde_json::to_value(parameters)
                .map_err(|e| CliError::Invariant(format!("parameters do not serialize: {e}")))?,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            timestamp: chrono::Utc::now().to_rfc3339(),
        })
    }
}

pub fn read_json(path: &Path) -> CliResult<Value> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Invariant(format!("output does not serialize: {e}")))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path.display().to_string(), e))
}

/// Loads the parameter object from a config file, which is either a plain
/// parameter object or a manifest of the same subcommand.
pub fn load_config(path: &Path, subcommand: &str) -> CliResult<Map<String, Value>> {
    let value = read_json(path)?;
    let Value::Object(mut obj) = value else {
        return Err(CliError::Usage(format!(
            "config {} is not a JSON object",
            path.display()
        )));
    };
    if obj.contains_key("schema_version") && obj.contains_key("parameters") {
        let manifest: RunManifest = serde_json::from_value(Value::Object(obj))
            .map_err(|e| CliError::Usage(format!("manifest {}: {e}", path.display())))?;
        if manifest.subcommand != subcommand {
            return Err(CliError::Usage(format!(
                "manifest is for `{}`, not `{subcommand}`",
                manifest.subcommand
            )));
        }
        let Value::Object(params) = manifest.parameters else {
            return Err(CliError::Usage(
                "manifest parameters are not an object".into(),
            ));
        };
        return Ok(params);
    }
    obj.remove("schema_version");
    Ok(obj)
}

/// Overlays the non-null fields of `flags` on `config` and deserializes the
/// result. Unknown keys are rejected by the target type.
pub fn resolve<F: Serialize, P: DeserializeOwned>(
    flags: &F,
    config: Map<String, Value>,
) -> CliResult<P> {
    let mut merged = config;
    let Value::Object(given) = serde_json::to_value(flags)
        .map_err(|e| CliError::Invariant(format!("flags do not serialize: {e}")))?
    else {
        return Err(CliError::Invariant("flags are not an object".into()));
    };
    for (key, value) in given {
        if !value.is_null() {
            merged.insert(key, value);
        }
    }
    serde_json::from_value(Value::Object(merged))
        .map_err(|e| CliError::Usage(format!("parameters: {e}")))
}

/// Seed precedence: flag, then environment, then config, then zero.
pub fn resolve_seed(flag: Option<u64>, config: Option<u64>) -> CliResult<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Ok(text) = std::env::var(SEED_ENV) {
        return text.trim().parse().map_err(|_| {
            CliError::Usage(format!("{SEED_ENV}={text:?} is not an unsigned integer"))
        });
    }
    Ok(config.unwrap_or(0))
}
