//! Configuration parsing: inline distribution/distortion specs and the
//! TOML experiment-definition file.
//!
//! Inline specs accept two forms:
//!
//! * JSON-ish objects, with bare keys allowed:
//!   `{family: "trunc_pareto", beta: 10, gamma: 3, M: 10}`
//! * a compact form: `trunc_pareto:beta=10,gamma=3,M=10`
//!
//! Config files are flat TOML (`key = value` with nested tables); CLI
//! flags override file values.

use crate::dist::{DistributionRegistry, DynDist};
use crate::distortion::{DistortionPricing, DistortionRegistry};
use crate::error::{Error, Result};
use serde_json::{Map, Value};
use std::path::Path;

/// A distribution described by family name plus parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct DistSpec {
    pub family: String,
    pub params: Map<String, Value>,
}

impl DistSpec {
    /// Parse an inline spec (JSON-ish or compact form).
    pub fn parse(s: &str) -> Result<Self> {
        let (family, params) = parse_spec_string(s)?;
        Ok(Self { family, params })
    }

    /// Read a spec out of a TOML table (`family = "..."` plus parameters).
    pub fn from_toml(v: &toml::Value) -> Result<Self> {
        let (family, params) = spec_from_json(toml_to_json(v))?;
        Ok(Self { family, params })
    }

    pub fn build(&self) -> Result<DynDist> {
        self.build_with(&DistributionRegistry::builtin())
    }

    pub fn build_with(&self, registry: &DistributionRegistry) -> Result<DynDist> {
        registry.build(&self.family, &self.params)
    }

    /// Echo form used in JSON reports.
    pub fn echo(&self) -> Value {
        let mut map = self.params.clone();
        map.insert("family".into(), Value::String(self.family.clone()));
        Value::Object(map)
    }
}

/// A distortion-pricing rule: distortion family, its parameters, and the
/// safety loading.
#[derive(Debug, Clone, PartialEq)]
pub struct DistortionSpec {
    pub family: String,
    pub params: Map<String, Value>,
    pub loading: f64,
}

impl DistortionSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let (family, params) = parse_spec_string(s)?;
        Self::assemble(family, params)
    }

    pub fn from_toml(v: &toml::Value) -> Result<Self> {
        let (family, params) = spec_from_json(toml_to_json(v))?;
        Self::assemble(family, params)
    }

    fn assemble(family: String, mut params: Map<String, Value>) -> Result<Self> {
        let loading = match params.remove("loading") {
            Some(v) => v
                .as_f64()
                .ok_or_else(|| Error::Config(format!("`loading` must be a number, got {v}")))?,
            None => {
                return Err(Error::Config(
                    "distortion spec needs a `loading` entry".into(),
                ))
            }
        };
        Ok(Self {
            family,
            params,
            loading,
        })
    }

    pub fn build(&self) -> Result<DistortionPricing> {
        let g = DistortionRegistry::builtin().build(&self.family, &self.params)?;
        DistortionPricing::new(g, self.loading)
    }

    pub fn echo(&self) -> Value {
        let mut map = self.params.clone();
        map.insert("family".into(), Value::String(self.family.clone()));
        map.insert(
            "loading".into(),
            serde_json::Number::from_f64(self.loading)
                .map(Value::Number)
                .unwrap_or(Value::Null),
        );
        Value::Object(map)
    }
}

fn parse_spec_string(s: &str) -> Result<(String, Map<String, Value>)> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Config("empty spec string".into()));
    }
    if s.starts_with('{') {
        let json: Value = serde_json::from_str(&quote_bare_keys(s))
            .map_err(|e| Error::Config(format!("malformed spec `{s}`: {e}")))?;
        return spec_from_json(json);
    }
    // Compact form: family[:key=val,key=val,...]
    let (family, rest) = match s.split_once(':') {
        Some((f, r)) => (f.trim(), r.trim()),
        None => (s, ""),
    };
    let mut params = Map::new();
    if !rest.is_empty() {
        for pair in rest.split(',') {
            let (key, val) = pair.split_once('=').ok_or_else(|| {
                Error::Config(format!("expected key=value in spec segment `{pair}`"))
            })?;
            let num: f64 = val.trim().parse().map_err(|_| {
                Error::Config(format!("non-numeric value `{val}` for key `{key}`"))
            })?;
            params.insert(
                key.trim().to_string(),
                serde_json::Number::from_f64(num)
                    .map(Value::Number)
                    .unwrap_or(Value::Null),
            );
        }
    }
    Ok((family.to_string(), params))
}

fn spec_from_json(json: Value) -> Result<(String, Map<String, Value>)> {
    let mut map = match json {
        Value::Object(m) => m,
        other => return Err(Error::Config(format!("spec must be an object, got {other}"))),
    };
    let family = match map.remove("family") {
        Some(Value::String(f)) => f,
        Some(other) => {
            return Err(Error::Config(format!(
                "`family` must be a string, got {other}"
            )))
        }
        None => return Err(Error::Config("spec needs a `family` entry".into())),
    };
    Ok((family, map))
}

/// Quote bare identifiers in object-key position so `{family: "x", M: 10}`
/// parses as JSON. String contents are left untouched.
fn quote_bare_keys(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 16);
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    let mut in_string = false;
    while i < chars.len() {
        let c = chars[i];
        if in_string {
            out.push(c);
            if c == '\\' && i + 1 < chars.len() {
                out.push(chars[i + 1]);
                i += 2;
                continue;
            }
            if c == '"' {
                in_string = false;
            }
            i += 1;
            continue;
        }
        match c {
            '"' => {
                in_string = true;
                out.push(c);
                i += 1;
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                let mut j = i;
                while j < chars.len() && chars[j].is_whitespace() {
                    j += 1;
                }
                let is_key = j < chars.len() && chars[j] == ':';
                if is_key {
                    out.push('"');
                    out.push_str(&word);
                    out.push('"');
                } else {
                    out.push_str(&word);
                }
            }
            _ => {
                out.push(c);
                i += 1;
            }
        }
    }
    out
}

fn toml_to_json(v: &toml::Value) -> Value {
    match v {
        toml::Value::String(s) => Value::String(s.clone()),
        toml::Value::Integer(i) => Value::Number((*i).into()),
        toml::Value::Float(f) => serde_json::Number::from_f64(*f)
            .map(Value::Number)
            .unwrap_or(Value::Null),
        toml::Value::Boolean(b) => Value::Bool(*b),
        toml::Value::Datetime(d) => Value::String(d.to_string()),
        toml::Value::Array(a) => Value::Array(a.iter().map(toml_to_json).collect()),
        toml::Value::Table(t) => {
            Value::Object(t.iter().map(|(k, v)| (k.clone(), toml_to_json(v))).collect())
        }
    }
}

/// A loaded TOML config file with dotted-path lookups.
#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    root: Option<toml::Value>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let root: toml::Value = text
            .parse()
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Ok(Self { root: Some(root) })
    }

    pub fn empty() -> Self {
        Self { root: None }
    }

    fn lookup(&self, path: &[&str]) -> Option<&toml::Value> {
        let mut cur = self.root.as_ref()?;
        for key in path {
            cur = cur.as_table()?.get(*key)?;
        }
        Some(cur)
    }

    pub fn f64(&self, path: &[&str]) -> Result<Option<f64>> {
        match self.lookup(path) {
            None => Ok(None),
            Some(toml::Value::Float(f)) => Ok(Some(*f)),
            Some(toml::Value::Integer(i)) => Ok(Some(*i as f64)),
            Some(other) => Err(Error::Config(format!(
                "{} must be a number, got {other}",
                path.join(".")
            ))),
        }
    }

    pub fn usize(&self, path: &[&str]) -> Result<Option<usize>> {
        match self.lookup(path) {
            None => Ok(None),
            Some(toml::Value::Integer(i)) if *i > 0 => Ok(Some(*i as usize)),
            Some(other) => Err(Error::Config(format!(
                "{} must be a positive integer, got {other}",
                path.join(".")
            ))),
        }
    }

    pub fn string(&self, path: &[&str]) -> Result<Option<String>> {
        match self.lookup(path) {
            None => Ok(None),
            Some(toml::Value::String(s)) => Ok(Some(s.clone())),
            Some(other) => Err(Error::Config(format!(
                "{} must be a string, got {other}",
                path.join(".")
            ))),
        }
    }

    pub fn dist(&self, path: &[&str]) -> Result<Option<DistSpec>> {
        match self.lookup(path) {
            None => Ok(None),
            Some(v) => DistSpec::from_toml(v).map(Some),
        }
    }

    pub fn distortion(&self, path: &[&str]) -> Result<Option<DistortionSpec>> {
        match self.lookup(path) {
            None => Ok(None),
            Some(v) => DistortionSpec::from_toml(v).map(Some),
        }
    }
}
