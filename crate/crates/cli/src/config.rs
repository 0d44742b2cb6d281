//! Expansion of `--config FILE` into command-line flags.

use std::ffi::OsString;
use std::fs;

use anyhow::{bail, Context, Result};
use serde_json::Value;

/// Appends a `--key value` pair for every config key that is not already given
/// on the command line, so explicit flags win.
pub fn expand(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let strings: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let Some(path) = find_config(&strings) else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path).with_context(|| format!("reading config file {path}"))?;
    let doc: Value = serde_json::from_str(&text).with_context(|| format!("parsing config file {path}"))?;
    let Value::Object(map) = doc else {
        bail!("config file {path} must contain a JSON object");
    };
    let mut out = args;
    for (key, value) in map {
        let flag = format!("--{}", key.replace('_', "-"));
        if strings.iter().any(|a| a == &flag || a.starts_with(&format!("{flag}="))) {
            continue;
        }
        match value {
            Value::Bool(true) => out.push(flag.into()),
            Value::Bool(false) | Value::Null => {}
            Value::Array(items) => {
                let joined = items.iter().map(scalar).collect::<Result<Vec<_>>>()?.join(",");
                out.push(format!("{flag}={joined}").into());
            }
            other => out.push(format!("{flag}={}", scalar(&other)?).into()),
        }
    }
    Ok(out)
}

fn find_config(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(rest) = a.strip_prefix("--config=") {
            return Some(rest.to_string());
        }
    }
    None
}

fn scalar(v: &Value) -> Result<String> {
    Ok(match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        Value::Bool(b) => b.to_string(),
        other => bail!("unsupported config value {other}"),
    })
}
