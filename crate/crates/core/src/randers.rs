//! Closed-form Randers quantities: inverse fundamental tensor, Ricci
//! curvature, scalar curvature, volume data and S-curvature.

use alloc::vec::Vec;

use crate::jets::{seed, Jet, JetTable, Scalar};
use crate::linalg::{self, Mat};
use crate::metric::{finsler_from, MetricDefinition, RANDERS_MARGIN};
use crate::oracle;
use crate::riemann::{contract_at, geometry_at, AlphaData, BetaInvariants, EvalContext};
use crate::terms::{self, DiffSample, Symbols, Table, Variant};
use crate::{Error, Result};

/// `g^{ij} = (α/F)a^{ij} − (α/F²)(b^i y^j + b^j y^i) + ((b²α+β)/F³) y^i y^j`.
pub fn inverse_metric<S: Scalar>(alpha: &AlphaData, beta: &BetaInvariants, ctx: &EvalContext<S>) -> Mat<S> {
    let n = alpha.dim;
    let f = &ctx.f;
    let c1 = ctx.alpha.clone() / f.clone();
    let c2 = ctx.alpha.clone() / (f.clone() * f.clone());
    let c3 = (ctx.alpha.clone() * beta.b2 + ctx.beta.clone()) / (f.clone() * f.clone() * f.clone());
    Mat::from_fn(n, |i, j| {
        c1.clone() * alpha.a_inv[(i, j)]
            - c2.clone() * (ctx.y[j].clone() * beta.b_up[i] + ctx.y[i].clone() * beta.b_up[j])
            + c3.clone() * ctx.y[i].clone() * ctx.y[j].clone()
    })
}

/// `g_ij = ½[F²]_{y^i y^j}` from a y-jet of the pointwise Finsler function.
pub fn fundamental_tensor(alpha: &AlphaData, beta: &BetaInvariants, y: &[f64]) -> Result<Mat<f64>> {
    let n = alpha.dim;
    let yj = seed(y, &(0..n).collect::<Vec<_>>(), 2)?;
    let f = finsler_from(&alpha.a, &beta.b, &yj);
    let f2 = f.clone() * f;
    Ok(Mat::from_fn(n, |i, j| 0.5 * f2.d2(i, j)))
}

/// The three pieces of `Ξ` and the pieces they are built from.
#[derive(Clone, Debug, PartialEq)]
pub struct XiDecomposition<S> {
    /// `A = r_00 − 2αs_0`.
    pub a: S,
    /// `B = r_{00;0} − 2αs_{0;0}`.
    pub b: S,
    /// `D₁ = q_00 − αt_0`.
    pub d1: S,
    /// `D = αD₁`.
    pub d: S,
    /// `2D/F`.
    pub xi1: S,
    /// `3A²/(4F²)`.
    pub xi2: S,
    /// `−B/(2F)`.
    pub xi3: S,
    pub xi: S,
}

pub fn xi_decomposition<S: Scalar>(ctx: &EvalContext<S>) -> XiDecomposition<S> {
    let al = ctx.alpha.clone();
    let f = ctx.f.clone();
    let a = ctx.r00.clone() - al.clone() * ctx.s0.clone() * 2.0;
    let b = ctx.r000.clone() - al.clone() * ctx.s00.clone() * 2.0;
    let d1 = ctx.q00.clone() - al.clone() * ctx.t0.clone();
    let d = al * d1.clone();
    let xi1 = d.clone() * 2.0 / f.clone();
    let xi2 = a.clone() * a.clone() * 0.75 / (f.clone() * f.clone());
    let xi3 = -(b.clone() / f) * 0.5;
    let xi = xi1.clone() + xi2.clone() + xi3.clone();
    XiDecomposition {
        a,
        b,
        d1,
        d,
        xi1,
        xi2,
        xi3,
        xi,
    }
}

/// `Ξ` written out in one expression.
pub fn xi_direct<S: Scalar>(ctx: &EvalContext<S>) -> S {
    let al = ctx.alpha.clone();
    let f = ctx.f.clone();
    let a = ctx.r00.clone() - al.clone() * ctx.s0.clone() * 2.0;
    (al.clone() * 2.0 / f.clone()) * (ctx.q00.clone() - al.clone() * ctx.t0.clone())
        + a.clone() * a * 0.75 / (f.clone() * f.clone())
        - (ctx.r000.clone() - al * ctx.s00.clone() * 2.0) / (f * 2.0)
}

/// `Ric = ^αRic + 2αs^m_{0;m} − 2t_00 − α²t^m_m + (n−1)Ξ`.
pub fn ricci_closed<S: Scalar>(beta: &BetaInvariants, ctx: &EvalContext<S>) -> S {
    let n = ctx.dim as f64;
    let al = ctx.alpha.clone();
    ctx.ric_alpha.clone() + al.clone() * ctx.s0m.clone() * 2.0 - ctx.t00.clone() * 2.0 - al.clone() * al * beta.t_trace
        + xi_decomposition(ctx).xi * (n - 1.0)
}

/// Closed scalar curvature with its two polynomial parts.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedScalar {
    pub r: f64,
    pub sigma1: f64,
    pub sigma2: f64,
}

/// `r = (α/F) r_α + (Σ₁ + αΣ₂)/(4F⁵)`.
pub fn scalar_curvature_closed(alpha: &AlphaData, beta: &BetaInvariants, ctx: &EvalContext<f64>, variant: Variant) -> ClosedScalar {
    let s = Symbols::new(alpha, beta, ctx);
    let sigma1 = terms::eval_table(Table::Sigma1, variant, &s);
    let sigma2 = terms::eval_table(Table::Sigma2, variant, &s);
    let f = ctx.f;
    ClosedScalar {
        r: ctx.alpha / f * alpha.scalar + (sigma1 + ctx.alpha * sigma2) / (4.0 * libm::pow(f, 5.0)),
        sigma1,
        sigma2,
    }
}

/// Scalar curvature via the y-Hessian of [`ricci_closed`] and the closed
/// inverse metric.
#[derive(Clone, Debug, PartialEq)]
pub struct SemiScalar {
    pub ricci: f64,
    /// `Ric_ij`.
    pub tensor: Mat<f64>,
    pub g_inv: Mat<f64>,
    pub r: f64,
}

pub fn scalar_curvature_semi(alpha: &AlphaData, beta: &BetaInvariants, y: &[f64]) -> Result<SemiScalar> {
    let n = alpha.dim;
    let yj = seed(y, &(0..n).collect::<Vec<_>>(), 2)?;
    let cj = contract_at(alpha, beta, &yj)?;
    let ric = ricci_closed(beta, &cj);
    let tensor = Mat::from_fn(n, |i, j| 0.5 * ric.d2(i, j));
    let ctx = contract_at(alpha, beta, y)?;
    let g_inv = inverse_metric(alpha, beta, &ctx);
    let mut r = 0.0;
    for i in 0..n {
        for j in 0..n {
            r += g_inv[(i, j)] * tensor[(i, j)];
        }
    }
    Ok(SemiScalar {
        ricci: ric.value(),
        tensor,
        g_inv,
        r,
    })
}

/// `(Γ₁, Γ₂)`.
pub fn gamma_decomposition(alpha: &AlphaData, beta: &BetaInvariants, ctx: &EvalContext<f64>, variant: Variant) -> (f64, f64) {
    let s = Symbols::new(alpha, beta, ctx);
    (
        terms::eval_table(Table::Gamma1, variant, &s),
        terms::eval_table(Table::Gamma2, variant, &s),
    )
}

/// Busemann-Hausdorff coefficient `(1 − b²)^{(n+1)/2} sqrt(det a)`.
pub fn sigma_bh(alpha: &AlphaData, beta: &BetaInvariants) -> Result<f64> {
    if !(beta.b2 < 1.0 - RANDERS_MARGIN) {
        return Err(Error::RandersViolation { b2: beta.b2 });
    }
    Ok(libm::pow(1.0 - beta.b2, (alpha.dim as f64 + 1.0) / 2.0) * alpha.volume)
}

/// x-gradients of `ln σ_BH` and of `ρ = ln sqrt(1 − b²)`.
#[derive(Clone, Debug, PartialEq)]
pub struct VolumeGradients {
    pub log_sigma_bh: Vec<f64>,
    pub rho: Vec<f64>,
}

pub fn volume_gradients(metric: &MetricDefinition, x: &[f64]) -> Result<VolumeGradients> {
    let n = metric.dim();
    let table = JetTable::new(n, 1)?;
    let xj: Vec<Jet> = (0..n).map(|i| table.variable(x[i], i)).collect();
    let a = metric.alpha_matrix(&xj)?;
    let b = metric.beta_vector(&xj)?;
    let a_inv = linalg::inverse(&a)?;
    let mut b2 = table.constant(0.0);
    for i in 0..n {
        for j in 0..n {
            b2 = b2 + a_inv[(i, j)].clone() * b[i].clone() * b[j].clone();
        }
    }
    if !(b2.value() < 1.0 - RANDERS_MARGIN) {
        return Err(Error::RandersViolation { b2: b2.value() });
    }
    let rho = (-b2 + 1.0).ln() * 0.5;
    let log_sigma = rho.clone() * (n as f64 + 1.0) + linalg::det(&a)?.ln() * 0.5;
    Ok(VolumeGradients {
        log_sigma_bh: (0..n).map(|k| log_sigma.d1(k)).collect(),
        rho: (0..n).map(|k| rho.d1(k)).collect(),
    })
}

/// `S = ∂G^m/∂y^m − y^m ∂_m ln σ_BH` with the spray from the definitional
/// route.
pub fn s_curvature(metric: &MetricDefinition, x: &[f64], y: &[f64]) -> Result<f64> {
    let sd = oracle::spray(metric, x, y)?;
    let grad = volume_gradients(metric, x)?;
    Ok(sd.divergence() - dot(y, &grad.log_sigma_bh))
}

/// `S = (n+1)(e_00/(2F) − s_0 − ρ_0)`, the standard Randers expression.
pub fn s_curvature_closed(metric: &MetricDefinition, x: &[f64], y: &[f64]) -> Result<f64> {
    let (alpha, beta) = geometry_at(metric, x)?;
    let ctx = contract_at(&alpha, &beta, y)?;
    let grad = volume_gradients(metric, x)?;
    let n = alpha.dim as f64;
    Ok((n + 1.0) * (ctx.e00 / (2.0 * ctx.f) - ctx.s0 - dot(y, &grad.rho)))
}

/// `I_i = ((n+1)/(2F))(b_i − β y_i/α²)`.
pub fn mean_cartan(beta: &BetaInvariants, ctx: &EvalContext<f64>) -> Vec<f64> {
    let n = ctx.dim as f64;
    let k = (n + 1.0) / (2.0 * ctx.f);
    let a2 = ctx.alpha * ctx.alpha;
    (0..ctx.dim)
        .map(|i| k * (beta.b[i] - ctx.beta * ctx.y_low[i] / a2))
        .collect()
}

/// `τ = ln(sqrt(det g)/σ_BH)`.
pub fn distortion(g: &Mat<f64>, sigma_bh: f64) -> Result<f64> {
    let d = linalg::det(g)?;
    if !(d > 0.0) {
        return Err(Error::NotPositiveDefinite { eigenvalue: d });
    }
    Ok(libm::log(libm::sqrt(d) / sigma_bh))
}

fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// Reference sample for locating mismatches in `Σ₁ + αΣ₂`: the target is
/// `4F⁵(r − (α/F) r_α)`.
pub fn sigma_diff_sample(alpha: &AlphaData, beta: &BetaInvariants, ctx: &EvalContext<f64>, r_reference: f64) -> DiffSample {
    let f5 = 4.0 * libm::pow(ctx.f, 5.0);
    DiffSample {
        symbols: Symbols::new(alpha, beta, ctx),
        target: f5 * (r_reference - ctx.alpha / ctx.f * alpha.scalar),
        weights: alloc::vec![(Table::Sigma1, 1.0), (Table::Sigma2, ctx.alpha)],
    }
}

/// Reference sample for `Γ₁ + αΓ₂ = 4F⁵ r`.
pub fn gamma_diff_sample(alpha: &AlphaData, beta: &BetaInvariants, ctx: &EvalContext<f64>, r_reference: f64) -> DiffSample {
    DiffSample {
        symbols: Symbols::new(alpha, beta, ctx),
        target: 4.0 * libm::pow(ctx.f, 5.0) * r_reference,
        weights: alloc::vec![(Table::Gamma1, 1.0), (Table::Gamma2, ctx.alpha)],
    }
}

/// Everything pointwise at `(x, y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureReport {
    pub dim: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub f: f64,
    pub alpha: f64,
    pub beta: f64,
    pub b2: f64,
    pub g: Mat<f64>,
    pub g_inv: Mat<f64>,
    pub ricci: f64,
    pub ricci_tensor: Mat<f64>,
    pub r_alpha: f64,
    pub r_closed: f64,
    pub r_semi: f64,
    /// Present when the definitional route was requested.
    pub ricci_def: Option<f64>,
    pub r_def: Option<f64>,
    pub s_curvature: f64,
    pub distortion: f64,
    pub sigma_bh: f64,
    pub mean_cartan: Vec<f64>,
    pub xi: XiDecomposition<f64>,
    pub sigma1: f64,
    pub sigma2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
}

pub fn curvature_report(metric: &MetricDefinition, x: &[f64], y: &[f64], definitional: bool) -> Result<CurvatureReport> {
    let (alpha, beta) = geometry_at(metric, x)?;
    let ctx = contract_at(&alpha, &beta, y)?;
    let closed = scalar_curvature_closed(&alpha, &beta, &ctx, Variant::Corrected);
    let semi = scalar_curvature_semi(&alpha, &beta, y)?;
    let (gamma1, gamma2) = gamma_decomposition(&alpha, &beta, &ctx, Variant::Corrected);
    let g = fundamental_tensor(&alpha, &beta, y)?;
    let sigma = sigma_bh(&alpha, &beta)?;
    let (ricci_def, r_def) = if definitional {
        let d = oracle::ricci_tensor_def(metric, x, y)?;
        (Some(d.ricci), Some(d.scalar))
    } else {
        (None, None)
    };
    Ok(CurvatureReport {
        dim: alpha.dim,
        x: x.to_vec(),
        y: y.to_vec(),
        f: ctx.f,
        alpha: ctx.alpha,
        beta: ctx.beta,
        b2: beta.b2,
        distortion: distortion(&g, sigma)?,
        g,
        g_inv: semi.g_inv.clone(),
        ricci: ricci_closed(&beta, &ctx),
        ricci_tensor: semi.tensor,
        r_alpha: alpha.scalar,
        r_closed: closed.r,
        r_semi: semi.r,
        ricci_def,
        r_def,
        s_curvature: s_curvature(metric, x, y)?,
        sigma_bh: sigma,
        mean_cartan: mean_cartan(&beta, &ctx),
        xi: xi_decomposition(&ctx),
        sigma1: closed.sigma1,
        sigma2: closed.sigma2,
        gamma1,
        gamma2,
    })
}
