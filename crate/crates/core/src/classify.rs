//! Pointwise membership tests for metric classes: isotropic S-curvature,
//! weakly isotropic scalar curvature, weak Einstein, plus conformal scaling
//! and the implication harness relating the first two.
//!
//! Every fit returns a three-state [`Verdict`]: residuals below the requested
//! tolerance hold, residuals above [`FAILS_TOL`] fail, the band in between is
//! inconclusive.

use alloc::format;
use alloc::vec::Vec;

use crate::exprlang::{parse_expression, Expr};
use crate::jets::{Jet, JetTable};
use crate::linalg::{self, least_squares, Mat};
use crate::metric::MetricDefinition;
use crate::randers::{inverse_metric, mean_cartan, ricci_closed, s_curvature, s_curvature_closed, scalar_curvature_semi};
use crate::riemann::{contract_at, geometry_at};
use crate::sampling::sphere_directions;
use crate::{Error, Result};

/// Default tolerance for "holds".
pub const HOLDS_TOL: f64 = 1e-6;
/// Residuals above this are reported as a failure.
pub const FAILS_TOL: f64 = 1e-3;
/// Floor on the denominator of relative residuals.
pub const RESIDUAL_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Inconclusive,
    Fails,
}

impl Verdict {
    pub fn from_residual(residual: f64, tol: f64) -> Self {
        if residual < tol {
            Verdict::Holds
        } else if residual > FAILS_TOL.max(tol) || residual.is_nan() {
            Verdict::Fails
        } else {
            Verdict::Inconclusive
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Inconclusive => "inconclusive",
            Verdict::Fails => "fails",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassKind {
    IsotropicS,
    WeaklyIsotropicR,
    WeakEinstein,
}

impl ClassKind {
    pub fn name(self) -> &'static str {
        match self {
            ClassKind::IsotropicS => "isotropic_s",
            ClassKind::WeaklyIsotropicR => "weakly_isotropic_r",
            ClassKind::WeakEinstein => "weak_einstein",
        }
    }
}

/// Outcome of one class test at one point.
///
/// For [`ClassKind::IsotropicS`] `scalar` is `c` in `S = (n+1)cF` and
/// `one_form` is empty. For the two fits `one_form` is `θ_i` or `ξ_i` and
/// `scalar` is `μ`. Parameters are filled in whatever the verdict.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassificationResult {
    pub kind: ClassKind,
    pub holds: bool,
    pub verdict: Verdict,
    pub one_form: Vec<f64>,
    pub scalar: f64,
    pub residual: f64,
    pub samples: usize,
    pub tol: f64,
    pub dim: usize,
}

impl ClassificationResult {
    fn new(kind: ClassKind, one_form: Vec<f64>, scalar: f64, residual: f64, samples: usize, tol: f64, dim: usize) -> Self {
        let verdict = Verdict::from_residual(residual, tol);
        ClassificationResult {
            kind,
            holds: verdict == Verdict::Holds,
            verdict,
            one_form,
            scalar,
            residual,
            samples,
            tol,
            dim,
        }
    }

    /// `c` rescaled to the `S = (n−1)cF` normalization.
    pub fn c_alternate(&self) -> f64 {
        let n = self.dim as f64;
        self.scalar * (n + 1.0) / (n - 1.0)
    }
}

/// `e_ij = 2c(a_ij − b_i b_j)`, tested on the tensors directly.
///
/// The residual is `max|e − 2ch| / max|h|`; with `c = tr(h⁻¹e)/(2n)`.
pub fn test_isotropic_s(metric: &MetricDefinition, x: &[f64], tol: f64) -> Result<ClassificationResult> {
    let (_, beta) = geometry_at(metric, x)?;
    let n = metric.dim();
    let a = metric.alpha_matrix(x)?;
    let h = Mat::from_fn(n, |i, j| a[(i, j)] - beta.b[i] * beta.b[j]);
    let h_inv = linalg::inverse(&h)?;
    let trace = h_inv.mul(&beta.e);
    let c = (0..n).map(|i| trace[(i, i)]).sum::<f64>() / (2.0 * n as f64);
    let model = Mat::from_fn(n, |i, j| 2.0 * c * h[(i, j)]);
    let residual = beta.e.max_abs_diff(&model) / h.max_abs();
    Ok(ClassificationResult::new(ClassKind::IsotropicS, Vec::new(), c, residual, 0, tol, n))
}

fn check_samples(n: usize, m: usize) -> Result<()> {
    if m < 3 * (n + 1) {
        return Err(Error::InvalidParams("need at least 3(n+1) sample directions"));
    }
    Ok(())
}

/// Fits `data_k ≈ Σ_i w_i y_k^i / F_k + μ` and returns `(w, μ, residual)`.
fn fit_one_form(n: usize, dirs: &[Vec<f64>], f: &[f64], data: &[f64]) -> Result<(Vec<f64>, f64, f64)> {
    let m = dirs.len();
    let cols = n + 1;
    let mut a = Vec::with_capacity(m * cols);
    for (y, fk) in dirs.iter().zip(f) {
        a.extend(y.iter().map(|yi| yi / fk));
        a.push(1.0);
    }
    let ls = least_squares(m, cols, &a, data)?;
    if ls.rank < cols {
        return Err(Error::RankDeficient { rank: ls.rank, cols });
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for k in 0..m {
        let model: f64 = (0..cols).map(|c| a[k * cols + c] * ls.solution[c]).sum();
        num += (model - data[k]) * (model - data[k]);
        den += data[k] * data[k];
    }
    let residual = libm::sqrt(num) / libm::sqrt(den).max(RESIDUAL_FLOOR);
    let mu = ls.solution[n];
    let mut w = ls.solution;
    w.truncate(n);
    Ok((w, mu, residual))
}

/// `r = n(n−1)(θ_i y^i/F + μ)` fitted over the given directions, with `r`
/// from [`scalar_curvature_semi`].
pub fn fit_weakly_isotropic_r_on(metric: &MetricDefinition, x: &[f64], dirs: &[Vec<f64>], tol: f64) -> Result<ClassificationResult> {
    let n = metric.dim();
    check_samples(n, dirs.len())?;
    let (alpha, beta) = geometry_at(metric, x)?;
    let scale = (n * (n - 1)) as f64;
    let mut f = Vec::with_capacity(dirs.len());
    let mut data = Vec::with_capacity(dirs.len());
    for y in dirs {
        let ctx = contract_at(&alpha, &beta, y)?;
        f.push(ctx.f);
        data.push(scalar_curvature_semi(&alpha, &beta, y)?.r / scale);
    }
    let (theta, mu, residual) = fit_one_form(n, dirs, &f, &data)?;
    Ok(ClassificationResult::new(ClassKind::WeaklyIsotropicR, theta, mu, residual, dirs.len(), tol, n))
}

pub fn fit_weakly_isotropic_r(metric: &MetricDefinition, x: &[f64], tol: f64, m: usize, seed: u64) -> Result<ClassificationResult> {
    check_samples(metric.dim(), m)?;
    fit_weakly_isotropic_r_on(metric, x, &sphere_directions(metric.dim(), m, seed), tol)
}

/// `Ric = (n−1)(3ξ_i y^i/F + μ)F²` fitted over the given directions.
pub fn fit_weak_einstein_on(metric: &MetricDefinition, x: &[f64], dirs: &[Vec<f64>], tol: f64) -> Result<ClassificationResult> {
    let n = metric.dim();
    check_samples(n, dirs.len())?;
    let (alpha, beta) = geometry_at(metric, x)?;
    let mut f = Vec::with_capacity(dirs.len());
    let mut data = Vec::with_capacity(dirs.len());
    for y in dirs {
        let ctx = contract_at(&alpha, &beta, y)?;
        data.push(ricci_closed(&beta, &ctx) / ((n as f64 - 1.0) * ctx.f * ctx.f));
        f.push(ctx.f);
    }
    let (w, mu, residual) = fit_one_form(n, dirs, &f, &data)?;
    let xi = w.into_iter().map(|v| v / 3.0).collect();
    Ok(ClassificationResult::new(ClassKind::WeakEinstein, xi, mu, residual, dirs.len(), tol, n))
}

pub fn fit_weak_einstein(metric: &MetricDefinition, x: &[f64], tol: f64, m: usize, seed: u64) -> Result<ClassificationResult> {
    check_samples(metric.dim(), m)?;
    fit_weak_einstein_on(metric, x, &sphere_directions(metric.dim(), m, seed), tol)
}

/// Comparison of the fitted `θ` with `3(n+1)/(2n) ξ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaXiReport {
    pub weakly_isotropic_r: ClassificationResult,
    pub weak_einstein: ClassificationResult,
    /// `3(n+1)/(2n) ξ_i`.
    pub expected_theta: Vec<f64>,
    pub max_diff: f64,
    pub holds: bool,
}

pub fn check_theta_xi(metric: &MetricDefinition, x: &[f64], tol: f64, m: usize, seed: u64) -> Result<ThetaXiReport> {
    let n = metric.dim() as f64;
    let r = fit_weakly_isotropic_r(metric, x, tol, m, seed)?;
    let e = fit_weak_einstein(metric, x, tol, m, seed)?;
    let k = 3.0 * (n + 1.0) / (2.0 * n);
    let expected_theta: Vec<f64> = e.one_form.iter().map(|v| k * v).collect();
    let max_diff = r
        .one_form
        .iter()
        .zip(&expected_theta)
        .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
    Ok(ThetaXiReport {
        holds: e.holds && max_diff < tol,
        weakly_isotropic_r: r,
        weak_einstein: e,
        expected_theta,
        max_diff,
    })
}

/// A metric and its conformal rescaling `ā = e^{2σ}a`, `b̄ = e^{σ}b`, so that
/// `F̄ = e^{σ}F`.
#[derive(Clone, Debug)]
pub struct ConformalSpec {
    pub base: MetricDefinition,
    pub sigma: Expr,
    pub scaled: MetricDefinition,
}

impl ConformalSpec {
    /// `∂σ/∂x^m`.
    pub fn sigma_gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        let n = self.base.dim();
        let table = JetTable::new(n, 1)?;
        let xj: Vec<Jet> = (0..n).map(|i| table.variable(x[i], i)).collect();
        let s = self.sigma.eval(&xj, self.base.params())?;
        Ok((0..n).map(|k| s.d1(k)).collect())
    }
}

pub fn conformal_scale(metric: &MetricDefinition, sigma: &str) -> Result<ConformalSpec> {
    let sigma = parse_expression(sigma, metric.dim(), metric.params().keys().map(|k| k.as_str()))?;
    let two_sigma = (Expr::constant(2.0) * sigma.clone()).exp();
    let alpha = metric
        .alpha_upper()
        .iter()
        .map(|e| two_sigma.clone() * e.clone())
        .collect();
    let beta = metric
        .beta_entries()
        .iter()
        .map(|e| sigma.clone().exp() * e.clone())
        .collect();
    let scaled = metric.with_coefficients(alpha, beta, format!("conformal rescaling by e^({sigma})"))?;
    Ok(ConformalSpec {
        base: metric.clone(),
        sigma,
        scaled,
    })
}

/// `S̄` against `S + F²σ^r I_r`, with `σ^r = g^{rm}σ_m` and everything on the
/// right taken from the base metric.
#[derive(Clone, Debug, PartialEq)]
pub struct ConformalSReport {
    pub s_scaled: f64,
    pub s_base: f64,
    /// `F²σ^r I_r`.
    pub correction: f64,
    /// `|S̄ − (S + F²σ^rI_r)| / (1 + F)`.
    pub residual: f64,
    pub holds: bool,
}

pub fn check_conformal_s(spec: &ConformalSpec, x: &[f64], y: &[f64], tol: f64) -> Result<ConformalSReport> {
    spec.scaled.validate_at(x)?;
    let (alpha, beta) = geometry_at(&spec.base, x)?;
    let ctx = contract_at(&alpha, &beta, y)?;
    let g_inv = inverse_metric(&alpha, &beta, &ctx);
    let grad = spec.sigma_gradient(x)?;
    let cartan = mean_cartan(&beta, &ctx);
    let n = alpha.dim;
    let mut correction = 0.0;
    for r in 0..n {
        let sigma_up: f64 = (0..n).map(|m| g_inv[(r, m)] * grad[m]).sum();
        correction += sigma_up * cartan[r];
    }
    correction *= ctx.f * ctx.f;
    let s_base = s_curvature_closed(&spec.base, x, y)?;
    let s_scaled = s_curvature(&spec.scaled, x, y)?;
    let residual = (s_scaled - s_base - correction).abs() / (1.0 + ctx.f);
    Ok(ConformalSReport {
        s_scaled,
        s_base,
        correction,
        residual,
        holds: residual < tol,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Implication {
    /// Antecedent and consequent both hold.
    Confirmed,
    /// The weakly isotropic fit does not hold.
    AntecedentFalse,
    /// Antecedent holds, consequent is in the inconclusive band.
    Inconclusive,
    /// Antecedent holds and isotropic S fails.
    Violated,
}

impl Implication {
    pub fn name(self) -> &'static str {
        match self {
            Implication::Confirmed => "confirmed",
            Implication::AntecedentFalse => "antecedent false",
            Implication::Inconclusive => "inconclusive",
            Implication::Violated => "violated",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ImplicationReport {
    pub weakly_isotropic_r: ClassificationResult,
    pub isotropic_s: ClassificationResult,
    pub outcome: Implication,
}

/// Weakly isotropic scalar curvature at `x` should force isotropic
/// S-curvature at `x`.
pub fn isotropic_s_implication(metric: &MetricDefinition, x: &[f64], tol: f64, m: usize, seed: u64) -> Result<ImplicationReport> {
    let r = fit_weakly_isotropic_r(metric, x, tol, m, seed)?;
    let s = test_isotropic_s(metric, x, tol)?;
    let outcome = match (r.verdict, s.verdict) {
        (Verdict::Holds, Verdict::Holds) => Implication::Confirmed,
        (Verdict::Holds, Verdict::Fails) => Implication::Violated,
        (Verdict::Holds, Verdict::Inconclusive) => Implication::Inconclusive,
        _ => Implication::AntecedentFalse,
    };
    Ok(ImplicationReport {
        weakly_isotropic_r: r,
        isotropic_s: s,
        outcome,
    })
}
