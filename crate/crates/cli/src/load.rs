use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde_json::Value;

use cptrace_core::corpus;
use cptrace_core::dynamics::Action;
use cptrace_core::io::{self, ZSystemSpec};
use cptrace_core::zsystems::ZSystem;

use crate::{CliError, Opts};

pub enum System {
    Finite(Arc<Action>),
    Z(Arc<ZSystem>),
}

/// The contents of a required input file.
pub fn read(path: Option<&Path>, flag: &str) -> Result<(String, String), CliError> {
    let path = path.ok_or_else(|| CliError::input(format!("missing required input {flag}")))?;
    let name = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|e| CliError::input(format!("{name}: cannot read: {e}")))?;
    Ok((name, text))
}

/// Parses `text` as `T`; a report produced by an earlier command is also
/// accepted, in which case `T` is read from its `key` field.
pub fn parse_or_extract<T: DeserializeOwned>(name: &str, text: &str, key: &str) -> Result<T, CliError> {
    let v: Value = io::parse(text, key).map_err(|e| CliError::from_core(e, Some(name)))?;
    if v.get("command").is_some() {
        if let Some(inner) = v.get(key) {
            return serde_json::from_value(inner.clone()).map_err(|e| CliError::input(format!("{name}: {key}: {e}")));
        }
    }
    io::parse(text, key).map_err(|e| CliError::from_core(e, Some(name)))
}

pub fn system(opts: &Opts) -> Result<System, CliError> {
    let (name, text) = read(opts.system.as_deref(), "--system")?;
    let v: Value = io::parse(&text, "system").map_err(|e| CliError::from_core(e, Some(&name)))?;
    let v = if v.get("command").is_some() { v.get("system").cloned().unwrap_or(v) } else { v };
    let wrap = |e| CliError::from_core(e, Some(&name));
    if v.get("T").is_some() {
        let spec: ZSystemSpec = if v.get("command").is_some() {
            serde_json::from_value(v).map_err(|e| CliError::input(format!("{name}: system: {e}")))?
        } else {
            io::parse(&text, "system").map_err(wrap)?
        };
        return Ok(System::Z(spec.build(opts.window).map_err(wrap)?));
    }
    if let Some(cname) = v.get("corpus").and_then(Value::as_str) {
        if let Some(zs) = corpus::z_systems().into_iter().find(|s| s.name == cname) {
            return Ok(System::Z(match opts.window {
                Some(w) => Arc::new(ZSystem::new(zs.system.permutation().to_vec(), w).map_err(wrap)?),
                None => zs.system,
            }));
        }
    }
    let body = if v.get("command").is_some() { v.to_string() } else { text };
    Ok(System::Finite(io::load_system(&body).map_err(wrap)?))
}

pub fn finite(opts: &Opts) -> Result<Arc<Action>, CliError> {
    match system(opts)? {
        System::Finite(a) => Ok(a),
        System::Z(_) => Err(CliError::input("this command needs a finite system, got a ℤ system (use zbuild/zdecompose)")),
    }
}

pub fn z(opts: &Opts) -> Result<Arc<ZSystem>, CliError> {
    match system(opts)? {
        System::Z(z) => Ok(z),
        System::Finite(_) => Err(CliError::input("this command needs a ℤ system (a file with a permutation \"T\")")),
    }
}
