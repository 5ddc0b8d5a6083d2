//! Metric selection, `--param`, point and grid syntax.

use std::collections::BTreeMap;
use std::path::PathBuf;

use randers_core::metric::{builtin_metric, BuiltinParams, BUILTIN_NAMES};
use randers_core::MetricDefinition;
use serde::Serialize;

use crate::error::{usage, Result};
use crate::metric_file::load_metric_file;

/// Where the metric came from, as recorded in documents.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MetricSource {
    File { path: String, params: BTreeMap<String, String> },
    Builtin { name: String, params: BTreeMap<String, String> },
}

fn split_param(raw: &str) -> Result<(String, String)> {
    let (k, v) = raw
        .split_once('=')
        .ok_or_else(|| usage(format!("--param expects k=v, got `{raw}`")))?;
    let k = k.trim();
    if k.is_empty() {
        return Err(usage(format!("--param expects k=v, got `{raw}`")));
    }
    Ok((k.to_string(), v.trim().to_string()))
}

pub fn parse_params(raw: &[String]) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for r in raw {
        let (k, v) = split_param(r)?;
        if out.insert(k.clone(), v).is_some() {
            return Err(usage(format!("--param {k} given twice")));
        }
    }
    Ok(out)
}

pub fn parse_csv(text: &str, what: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| usage(format!("{what}: `{t}` is not a number")))
        })
        .collect()
}

fn builtin_params(name: &str, raw: &BTreeMap<String, String>) -> Result<BuiltinParams> {
    let mut p = BuiltinParams::default();
    let mut dim = None;
    for (k, v) in raw {
        match k.as_str() {
            "n" | "dim" => dim = Some(v.parse::<usize>().map_err(|_| usage(format!("--param {k}: `{v}` is not a dimension")))?),
            "a" => p.a = Some(parse_csv(v, "--param a")?),
            "b" => p.b = Some(parse_csv(v, "--param b")?),
            "sigma" => p.sigma = Some(v.clone()),
            _ => return Err(usage(format!("builtin `{name}` takes n, a, b, sigma; got `{k}`"))),
        }
    }
    p.dim = dim
        .or(p.a.as_ref().map(Vec::len))
        .or(p.b.as_ref().map(Vec::len))
        .unwrap_or(2);
    Ok(p)
}

/// Resolves `--metric FILE` or `--builtin NAME` with the `--param` list.
pub fn load_metric(file: Option<&PathBuf>, builtin: Option<&str>, raw_params: &[String]) -> Result<(MetricDefinition, MetricSource)> {
    let params = parse_params(raw_params)?;
    match (file, builtin) {
        (Some(path), None) => {
            let mut overrides = BTreeMap::new();
            for (k, v) in &params {
                let x = v
                    .parse::<f64>()
                    .map_err(|_| usage(format!("--param {k}: `{v}` is not a number")))?;
                overrides.insert(k.clone(), x);
            }
            let metric = load_metric_file(path, &overrides)?;
            let source = MetricSource::File {
                path: path.display().to_string(),
                params,
            };
            Ok((metric, source))
        }
        (None, Some(name)) => {
            if !BUILTIN_NAMES.contains(&name) {
                return Err(usage(format!("unknown builtin `{name}`; known: {}", BUILTIN_NAMES.join(", "))));
            }
            let metric = builtin_metric(name, &builtin_params(name, &params)?)?;
            let source = MetricSource::Builtin {
                name: name.to_string(),
                params,
            };
            Ok((metric, source))
        }
        _ => Err(usage("give exactly one of --metric FILE or --builtin NAME")),
    }
}

/// `x=<csv>;y=<csv>`; either part may be omitted.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Point {
    pub x: Option<Vec<f64>>,
    pub y: Option<Vec<f64>>,
}

pub fn parse_point(text: &str, n: usize) -> Result<Point> {
    let mut p = Point::default();
    for part in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| usage(format!("--at: expected x=..;y=.., got `{part}`")))?;
        let vals = parse_csv(v, "--at")?;
        if vals.len() != n {
            return Err(usage(format!("--at: {} has {} components, metric has dimension {n}", k.trim(), vals.len())));
        }
        let slot = match k.trim() {
            "x" => &mut p.x,
            "y" => &mut p.y,
            other => return Err(usage(format!("--at: unknown part `{other}`"))),
        };
        if slot.replace(vals).is_some() {
            return Err(usage(format!("--at: {} given twice", k.trim())));
        }
    }
    Ok(p)
}

/// `x1=lo:hi:steps,x2=...`. Unlisted coordinates are held at zero; points
/// run with the last listed coordinate fastest.
pub fn parse_grid(text: &str, n: usize) -> Result<Vec<Vec<f64>>> {
    let mut axes: Vec<Vec<f64>> = vec![vec![0.0]; n];
    let mut seen = vec![false; n];
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let err = || usage(format!("--grid: expected x<i>=lo:hi:steps, got `{part}`"));
        let (k, v) = part.split_once('=').ok_or_else(err)?;
        let i: usize = k.trim().strip_prefix('x').and_then(|d| d.parse().ok()).ok_or_else(err)?;
        if !(1..=n).contains(&i) || seen[i - 1] {
            return Err(usage(format!("--grid: bad or repeated coordinate `{}`", k.trim())));
        }
        seen[i - 1] = true;
        let f: Vec<&str> = v.split(':').collect();
        if f.len() != 3 {
            return Err(err());
        }
        let lo: f64 = f[0].trim().parse().map_err(|_| err())?;
        let hi: f64 = f[1].trim().parse().map_err(|_| err())?;
        let steps: usize = f[2].trim().parse().map_err(|_| err())?;
        if steps == 0 || !lo.is_finite() || !hi.is_finite() {
            return Err(err());
        }
        axes[i - 1] = if steps == 1 {
            vec![lo]
        } else {
            (0..steps).map(|k| lo + (hi - lo) * k as f64 / (steps - 1) as f64).collect()
        };
    }
    let mut points = vec![Vec::with_capacity(n)];
    for axis in &axes {
        points = points
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push(*v);
                    q
                })
            })
            .collect();
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points() {
        let p = parse_point("x=0.3,0.4;y=1,0.5", 2).unwrap();
        assert_eq!(p.x, Some(vec![0.3, 0.4]));
        assert_eq!(p.y, Some(vec![1.0, 0.5]));
        assert_eq!(parse_point("x=1,2", 2).unwrap().y, None);
        for bad in ["x=1", "x=1,2;x=1,2", "z=1,2", "x=1,a", "x"] {
            assert!(parse_point(bad, 2).is_err(), "{bad}");
        }
    }

    #[test]
    fn grids() {
        let g = parse_grid("x1=-0.5:0.5:3,x2=0:1:2", 3).unwrap();
        assert_eq!(g.len(), 6);
        assert_eq!(g[0], vec![-0.5, 0.0, 0.0]);
        assert_eq!(g[1], vec![-0.5, 1.0, 0.0]);
        assert_eq!(g[5], vec![0.5, 1.0, 0.0]);
        for bad in ["x3=0:1:2", "x1=0:1", "x1=0:1:0", "y1=0:1:2", "x1=0:1:2,x1=0:1:2"] {
            assert!(parse_grid(bad, 2).is_err(), "{bad}");
        }
    }

    #[test]
    fn builtin_resolution() {
        let (m, src) = load_metric(None, Some("example_1_1"), &["a=1,0,0".into()]).unwrap();
        assert_eq!(m.dim(), 3);
        assert!(matches!(src, MetricSource::Builtin { .. }));
        assert!(load_metric(None, Some("nope"), &[]).is_err());
        assert!(load_metric(None, Some("funk"), &["colour=red".into()]).is_err());
        assert!(load_metric(None, None, &[]).is_err());
    }
}
