//! The line-oriented metric file format.
//!
//! ```text
//! dim = 2
//! note = "unit ball"          # optional
//!
//! [params]
//! k = 0.5
//!
//! [alpha]
//! a11 = "1 + k*x2^2"
//! a22 = "1"
//!
//! [beta]
//! b1 = "0.1*x1"
//! ```
//!
//! The syntax is a subset of TOML. Missing `a<i><j>` with `i < j` and missing
//! `b<i>` are zero; every diagonal entry must be present.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use randers_core::exprlang::parse_expression;
use randers_core::{Expr, MetricDefinition};
use toml::{Table, Value};

use crate::error::{LabError, Result};

fn bad(msg: impl Into<String>) -> LabError {
    LabError::MetricFile(msg.into())
}

fn number(key: &str, v: &Value) -> Result<f64> {
    match v {
        Value::Float(f) => Ok(*f),
        Value::Integer(i) => Ok(*i as f64),
        _ => Err(bad(format!("`{key}` must be a number"))),
    }
}

fn section<'a>(doc: &'a Table, name: &str) -> Result<Option<&'a Table>> {
    match doc.get(name) {
        None => Ok(None),
        Some(Value::Table(t)) => Ok(Some(t)),
        Some(_) => Err(bad(format!("`{name}` must be a section"))),
    }
}

/// `a12` -> `(0, 1)`, `b3` -> `2`; indices are single digits, one-based.
fn indices(key: &str, prefix: char, count: usize, n: usize) -> Result<Vec<usize>> {
    let digits = key
        .strip_prefix(prefix)
        .filter(|d| d.len() == count && d.bytes().all(|b| b.is_ascii_digit()))
        .ok_or_else(|| bad(format!("unexpected key `{key}`")))?;
    digits
        .bytes()
        .map(|b| (b - b'0') as usize)
        .map(|i| {
            if (1..=n).contains(&i) {
                Ok(i - 1)
            } else {
                Err(bad(format!("index in `{key}` out of range for dim = {n}")))
            }
        })
        .collect()
}

/// Parses a metric file. `overrides` replace values from `[params]`; naming
/// a parameter the file does not declare is an error.
pub fn parse_metric_file(text: &str, overrides: &BTreeMap<String, f64>) -> Result<MetricDefinition> {
    let doc: Table = text.parse().map_err(|e: toml::de::Error| bad(e.message().to_string()))?;
    for key in doc.keys() {
        if !matches!(key.as_str(), "dim" | "note" | "params" | "alpha" | "beta") {
            return Err(bad(format!("unexpected key `{key}`")));
        }
    }
    let n = match doc.get("dim") {
        Some(Value::Integer(d)) if (2..=9).contains(d) => *d as usize,
        Some(_) => return Err(bad("`dim` must be an integer in 2..=9")),
        None => return Err(bad("missing `dim`")),
    };
    let note = match doc.get("note") {
        Some(Value::String(s)) => s.clone(),
        Some(_) => return Err(bad("`note` must be a string")),
        None => String::new(),
    };

    let mut params = BTreeMap::new();
    if let Some(t) = section(&doc, "params")? {
        for (k, v) in t {
            params.insert(k.clone(), number(k, v)?);
        }
    }
    for (k, v) in overrides {
        match params.get_mut(k) {
            Some(slot) => *slot = *v,
            None => return Err(LabError::Usage(format!("metric file declares no parameter `{k}`"))),
        }
    }
    let names: Vec<&str> = params.keys().map(String::as_str).collect();
    let expr = |key: &str, v: &Value| -> Result<Expr> {
        let Value::String(s) = v else {
            return Err(bad(format!("`{key}` must be a quoted expression")));
        };
        parse_expression(s, n, names.iter().copied()).map_err(|e| bad(format!("`{key}`: {e}")))
    };

    let mut alpha: Vec<Option<Expr>> = vec![None; n * n];
    if let Some(t) = section(&doc, "alpha")? {
        for (k, v) in t {
            let ij = indices(k, 'a', 2, n)?;
            if ij[0] > ij[1] {
                return Err(bad(format!("`{k}`: give the upper triangle only (i <= j)")));
            }
            alpha[ij[0] * n + ij[1]] = Some(expr(k, v)?);
        }
    }
    let mut upper = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            match alpha[i * n + j].take() {
                Some(e) => upper.push(e),
                None if i == j => return Err(bad(format!("missing diagonal entry a{}{}", i + 1, i + 1))),
                None => upper.push(Expr::constant(0.0)),
            }
        }
    }
    let mut beta = vec![Expr::constant(0.0); n];
    if let Some(t) = section(&doc, "beta")? {
        for (k, v) in t {
            let i = indices(k, 'b', 1, n)?;
            beta[i[0]] = expr(k, v)?;
        }
    }
    Ok(MetricDefinition::new(n, upper, beta, params, note)?)
}

pub fn load_metric_file(path: &Path, overrides: &BTreeMap<String, f64>) -> Result<MetricDefinition> {
    let text = std::fs::read_to_string(path).map_err(|source| LabError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_metric_file(&text, overrides)
}

/// Renders `metric` in the file format; [`parse_metric_file`] reads it back.
pub fn write_metric_file(metric: &MetricDefinition) -> String {
    let n = metric.dim();
    let mut out = String::new();
    let _ = writeln!(out, "dim = {n}");
    if !metric.note().is_empty() {
        let _ = writeln!(out, "note = {}", Value::String(metric.note().to_string()));
    }
    if !metric.params().is_empty() {
        out.push_str("\n[params]\n");
        for (k, v) in metric.params() {
            let _ = writeln!(out, "{k} = {v:?}");
        }
    }
    out.push_str("\n[alpha]\n");
    for i in 0..n {
        for j in i..n {
            let e = metric.alpha_entry(i, j);
            if i == j || !e.is_zero() {
                let _ = writeln!(out, "a{}{} = \"{}\"", i + 1, j + 1, e);
            }
        }
    }
    out.push_str("\n[beta]\n");
    for i in 0..n {
        let e = metric.beta_entry(i);
        if !e.is_zero() {
            let _ = writeln!(out, "b{} = \"{}\"", i + 1, e);
        }
    }
    out
}
