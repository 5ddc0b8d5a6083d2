//! Serializable report documents. Field order is the output order.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use randers_core::classify::{ClassKind, ClassificationResult};
use randers_core::linalg::Mat;
use serde::Serialize;

use crate::input::MetricSource;

pub const TOOL: &str = "randers-lab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Outside tolerance, but accounted for by the recorded table
    /// corrections.
    Explained,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub detail: String,
    pub max_error: f64,
    pub tol: f64,
    pub samples: usize,
    pub status: Status,
}

impl Check {
    pub fn new(name: &str, detail: &str, errors: impl IntoIterator<Item = f64>, tol: f64) -> Self {
        let mut max_error = 0.0f64;
        let mut samples = 0;
        let mut nan = false;
        for e in errors {
            samples += 1;
            nan |= e.is_nan();
            max_error = max_error.max(e);
        }
        if nan {
            max_error = f64::NAN;
        }
        Check {
            name: name.to_string(),
            detail: detail.to_string(),
            max_error,
            tol,
            samples,
            status: if max_error < tol { Status::Pass } else { Status::Fail },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Settings {
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct XiRow {
    pub a: f64,
    pub b: f64,
    pub d1: f64,
    pub d: f64,
    pub xi1: f64,
    pub xi2: f64,
    pub xi3: f64,
    pub xi: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointReport {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub f: f64,
    pub alpha: f64,
    pub beta: f64,
    pub b2: f64,
    pub g: Vec<Vec<f64>>,
    pub g_inv: Vec<Vec<f64>>,
    pub ricci: f64,
    pub ricci_def: Option<f64>,
    pub ricci_tensor: Vec<Vec<f64>>,
    pub r_alpha: f64,
    pub r_closed: f64,
    pub r_closed_printed: f64,
    pub r_semi: f64,
    pub r_def: Option<f64>,
    pub s_curvature: f64,
    pub s_over_f: f64,
    /// `c` with `S = (n+1)cF` when `e_ij = 2c(a_ij − b_i b_j)` holds.
    pub isotropic_c: f64,
    /// The same `c` under `S = (n−1)cF`.
    pub isotropic_c_alternate: f64,
    pub isotropic_s: String,
    pub distortion: f64,
    pub sigma_bh: f64,
    pub mean_cartan: Vec<f64>,
    pub xi: XiRow,
    pub sigma1: f64,
    pub sigma2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleRow {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub ricci_closed: f64,
    pub ricci_def: f64,
    pub r_def: f64,
    pub r_semi: f64,
    pub r_closed: f64,
    pub r_closed_printed: f64,
    pub s_closed: f64,
    pub s_def: f64,
    pub gamma_identity_error: f64,
    pub inverse_metric_error: f64,
    pub conformal_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VolumeRow {
    pub x: Vec<f64>,
    pub method: String,
    pub nodes: usize,
    pub sigma_bh_closed: f64,
    pub sigma_bh_quadrature: f64,
    pub relative_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivisibilityRow {
    pub x: Vec<f64>,
    pub relative_residual: f64,
    pub scale: f64,
    pub condition: f64,
    pub divisible: bool,
    /// The same test with the published remainder coefficient and tables.
    pub published_relative_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassRow {
    pub verdict: String,
    pub holds: bool,
    pub residual: f64,
    pub tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_alternate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

impl From<&ClassificationResult> for ClassRow {
    fn from(r: &ClassificationResult) -> Self {
        let (c, c_alternate, theta, xi, mu, samples) = match r.kind {
            ClassKind::IsotropicS => (Some(r.scalar), Some(r.c_alternate()), None, None, None, None),
            ClassKind::WeaklyIsotropicR => (None, None, Some(r.one_form.clone()), None, Some(r.scalar), Some(r.samples)),
            ClassKind::WeakEinstein => (None, None, None, Some(r.one_form.clone()), Some(r.scalar), Some(r.samples)),
        };
        ClassRow {
            verdict: r.verdict.name().to_string(),
            holds: r.holds,
            residual: r.residual,
            tol: r.tol,
            c,
            c_alternate,
            theta,
            xi,
            mu,
            samples,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThetaXiRow {
    pub expected_theta: Vec<f64>,
    pub max_diff: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointClassification {
    pub x: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub isotropic_s: Option<ClassRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weakly_isotropic_r: Option<ClassRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weak_einstein: Option<ClassRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_xi: Option<ThetaXiRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub implication: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ImplicationSummary {
    pub points: usize,
    pub evaluated: usize,
    pub isotropic_s_holds: usize,
    pub weakly_isotropic_r_holds: usize,
    pub weak_einstein_holds: usize,
    pub confirmed: usize,
    pub antecedent_false: usize,
    pub inconclusive: usize,
    pub violated: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Timings {
    pub total_ms: f64,
    pub phases_ms: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Document {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub metric: MetricSource,
    pub dim: usize,
    pub settings: Settings,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub reports: Vec<PointReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub samples: Vec<SampleRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub volume: Vec<VolumeRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub divisibility: Vec<DivisibilityRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub classification: Vec<PointClassification>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub implication: Option<ImplicationSummary>,
    pub checks: Vec<Check>,
    pub passed: bool,
    pub timings: Timings,
}

impl Document {
    pub fn new(command: &'static str, metric: MetricSource, dim: usize, settings: Settings) -> Self {
        Document {
            tool: TOOL,
            version: VERSION,
            command,
            metric,
            dim,
            settings,
            reports: Vec::new(),
            samples: Vec::new(),
            volume: Vec::new(),
            divisibility: Vec::new(),
            classification: Vec::new(),
            implication: None,
            checks: Vec::new(),
            passed: true,
            timings: Timings::default(),
        }
    }

    pub fn finish(&mut self) {
        self.passed = self.checks.iter().all(|c| c.status != Status::Fail);
    }

    /// Plain-text rendering of the same content.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {} {} (n = {})", self.tool, self.version, self.command, self.dim);
        for r in &self.reports {
            let _ = writeln!(out, "  x = {:?}  y = {:?}", r.x, r.y);
            let _ = writeln!(out, "  F = {:.12}  b^2 = {:.12}", r.f, r.b2);
            let _ = writeln!(out, "  Ric = {:.12}  r = {:.12} (semi {:.12})", r.ricci, r.r_closed, r.r_semi);
            if let (Some(rd), Some(rr)) = (r.ricci_def, r.r_def) {
                let _ = writeln!(out, "  definitional: Ric = {rd:.12}  r = {rr:.12}");
            }
            let _ = writeln!(
                out,
                "  S = {:.12}  S/F = {:.12}  isotropic S {} (c = {:.12})",
                r.s_curvature, r.s_over_f, r.isotropic_s, r.isotropic_c
            );
            let _ = writeln!(out, "  tau = {:.12}  sigma_BH = {:.12}", r.distortion, r.sigma_bh);
        }
        for c in &self.classification {
            match &c.error {
                Some(e) => {
                    let _ = writeln!(out, "  x = {:?}: skipped ({e})", c.x);
                }
                None => {
                    let mut parts = Vec::new();
                    if let Some(r) = &c.isotropic_s {
                        parts.push(format!("isotropic S {} (c = {:.9})", r.verdict, r.c.unwrap_or(f64::NAN)));
                    }
                    if let Some(r) = &c.weakly_isotropic_r {
                        parts.push(format!("weakly isotropic r {} (mu = {:.9})", r.verdict, r.mu.unwrap_or(f64::NAN)));
                    }
                    if let Some(r) = &c.weak_einstein {
                        parts.push(format!("weak Einstein {} (xi = {:.9?}, mu = {:.9})", r.verdict, r.xi.as_deref().unwrap_or(&[]), r.mu.unwrap_or(f64::NAN)));
                    }
                    if let Some(i) = &c.implication {
                        parts.push(format!("implication {i}"));
                    }
                    let _ = writeln!(out, "  x = {:?}: {}", c.x, parts.join("; "));
                }
            }
        }
        if let Some(s) = &self.implication {
            let _ = writeln!(
                out,
                "  implication over {} points: {} confirmed, {} antecedent false, {} inconclusive, {} violated",
                s.evaluated, s.confirmed, s.antecedent_false, s.inconclusive, s.violated
            );
        }
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Explained => "EXPL",
            };
            let _ = writeln!(out, "  [{tag}] {:<22} max {:.3e} (tol {:.0e}, {} samples)", c.name, c.max_error, c.tol, c.samples);
        }
        let _ = writeln!(out, "{}", if self.passed { "all checks passed" } else { "CHECKS FAILED" });
        out
    }
}

pub fn rows(m: &Mat<f64>) -> Vec<Vec<f64>> {
    (0..m.dim()).map(|i| (0..m.dim()).map(|j| m[(i, j)]).collect()).collect()
}
