//! Randers metric definitions `F = α + β` with expression-valued `a_ij(x)` and
//! `b_i(x)`, and the builtin families.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::exprlang::{parse_expression, Expr};
use crate::jets::Scalar;
use crate::linalg::{self, Mat};
use crate::sampling::SplitMix64;
use crate::{Error, Result};

/// Smallest admissible `1 - ||β||²_α`.
pub const RANDERS_MARGIN: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct MetricDefinition {
    dim: usize,
    /// Upper triangle of `a`, row-major: (0,0), (0,1), …, (1,1), …
    alpha: Vec<Expr>,
    beta: Vec<Expr>,
    params: BTreeMap<String, f64>,
    note: String,
}

/// Pointwise admissibility data.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCheck {
    pub min_eigenvalue: f64,
    pub b2: f64,
}

fn tri_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + j
}

impl MetricDefinition {
    /// `alpha` holds the `n(n+1)/2` upper-triangular entries row by row.
    pub fn new(
        dim: usize,
        alpha: Vec<Expr>,
        beta: Vec<Expr>,
        params: BTreeMap<String, f64>,
        note: impl Into<String>,
    ) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParams("dimension must be at least 2"));
        }
        if alpha.len() != dim * (dim + 1) / 2 {
            return Err(Error::Dimension {
                expected: dim * (dim + 1) / 2,
                got: alpha.len(),
            });
        }
        if beta.len() != dim {
            return Err(Error::Dimension {
                expected: dim,
                got: beta.len(),
            });
        }
        for e in alpha.iter().chain(&beta) {
            if let Some(k) = e.max_coord() {
                if k >= dim {
                    return Err(Error::Dimension {
                        expected: dim,
                        got: k + 1,
                    });
                }
            }
            let mut used = Vec::new();
            e.params_used(&mut used);
            if let Some(p) = used.iter().find(|p| !params.contains_key(**p)) {
                return Err(Error::UnboundParameter(p.to_string()));
            }
        }
        Ok(MetricDefinition {
            dim,
            alpha,
            beta,
            params,
            note: note.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alpha_entry(&self, i: usize, j: usize) -> &Expr {
        &self.alpha[tri_index(self.dim, i, j)]
    }

    pub fn beta_entry(&self, i: usize) -> &Expr {
        &self.beta[i]
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn note(&self) -> &str {
        &self.note
    }

    fn check_point_len(&self, len: usize) -> Result<()> {
        if len != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: len,
            });
        }
        Ok(())
    }

    /// `a_ij(x)`, symmetric by construction.
    pub fn alpha_matrix<S: Scalar>(&self, x: &[S]) -> Result<Mat<S>> {
        self.check_point_len(x.len())?;
        let n = self.dim;
        let upper: Vec<S> = self
            .alpha
            .iter()
            .map(|e| e.eval(x, &self.params))
            .collect::<Result<_>>()?;
        Ok(Mat::from_fn(n, |i, j| upper[tri_index(n, i, j)].clone()))
    }

    pub fn beta_vector<S: Scalar>(&self, x: &[S]) -> Result<Vec<S>> {
        self.check_point_len(x.len())?;
        self.beta.iter().map(|e| e.eval(x, &self.params)).collect()
    }

    /// Checks positive definiteness of `a(x)` and the Randers condition.
    pub fn validate_at(&self, x: &[f64]) -> Result<PointCheck> {
        let a = self.alpha_matrix(x)?;
        let ev = a.symmetric_eigenvalues();
        let min_eigenvalue = ev[0];
        if !(min_eigenvalue > 0.0) {
            return Err(Error::NotPositiveDefinite {
                eigenvalue: min_eigenvalue,
            });
        }
        let b = self.beta_vector(x)?;
        let a_inv = linalg::inverse(&a)?;
        let b2 = norm2_with(&a_inv, &b);
        if !(b2 < 1.0 - RANDERS_MARGIN) {
            return Err(Error::RandersViolation { b2 });
        }
        Ok(PointCheck { min_eigenvalue, b2 })
    }

    /// `F(x, y) = sqrt(a_ij y^i y^j) + b_i y^i`.
    pub fn finsler<S: Scalar>(&self, x: &[S], y: &[S]) -> Result<S> {
        self.check_point_len(y.len())?;
        let a = self.alpha_matrix(x)?;
        let b = self.beta_vector(x)?;
        Ok(finsler_from(&a, &b, y))
    }

    /// Rebuilds the metric with new coefficient expressions, keeping parameters.
    pub fn with_coefficients(&self, alpha: Vec<Expr>, beta: Vec<Expr>, note: impl Into<String>) -> Result<Self> {
        MetricDefinition::new(self.dim, alpha, beta, self.params.clone(), note)
    }

    pub fn alpha_upper(&self) -> &[Expr] {
        &self.alpha
    }

    pub fn beta_entries(&self) -> &[Expr] {
        &self.beta
    }
}

/// `α + β` from pointwise coefficients.
pub fn finsler_from<S: Scalar, T: Scalar>(a: &Mat<T>, b: &[T], y: &[S]) -> S
where
    S: core::ops::Mul<T, Output = S> + core::ops::Add<T, Output = S>,
{
    let n = y.len();
    let mut q = y[0].lift(0.0);
    let mut l = y[0].lift(0.0);
    for i in 0..n {
        for j in 0..n {
            q = q + y[i].clone() * y[j].clone() * a[(i, j)].clone();
        }
        l = l + y[i].clone() * b[i].clone();
    }
    q.sqrt() + l
}

fn norm2_with(a_inv: &Mat<f64>, b: &[f64]) -> f64 {
    let n = b.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += a_inv[(i, j)] * b[i] * b[j];
        }
    }
    s
}

/// Parameters for [`builtin_metric`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BuiltinParams {
    pub dim: usize,
    /// Constant vector `a` of `example_1_1`.
    pub a: Option<Vec<f64>>,
    /// Constant 1-form for `minkowski_randers` and `conformal_minkowski`.
    pub b: Option<Vec<f64>>,
    /// Conformal exponent for `conformal_minkowski`.
    pub sigma: Option<String>,
}

pub const BUILTIN_NAMES: [&str; 5] = [
    "minkowski_randers",
    "example_1_1",
    "funk",
    "sphere_alpha",
    "conformal_minkowski",
];

fn sum(terms: impl IntoIterator<Item = Expr>) -> Expr {
    terms
        .into_iter()
        .reduce(|a, b| a + b)
        .unwrap_or(Expr::constant(0.0))
}

fn norm2_x(n: usize) -> Expr {
    sum((0..n).map(|i| Expr::coord(i).pow(2)))
}

fn vector_params(prefix: &str, v: &[f64], params: &mut BTreeMap<String, f64>) -> Vec<Expr> {
    v.iter()
        .enumerate()
        .map(|(i, &c)| {
            let name = format!("{prefix}{}", i + 1);
            params.insert(name.clone(), c);
            Expr::Param(name)
        })
        .collect()
}

fn upper_from(n: usize, mut f: impl FnMut(usize, usize) -> Expr) -> Vec<Expr> {
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            out.push(f(i, j));
        }
    }
    out
}

fn constant_one_form(params: &BuiltinParams, n: usize) -> Result<Vec<f64>> {
    let b = params.b.clone().unwrap_or_else(|| alloc::vec![0.0; n]);
    if b.len() != n {
        return Err(Error::InvalidParams("b must have n components"));
    }
    if b.iter().map(|v| v * v).sum::<f64>() >= 1.0 {
        return Err(Error::InvalidParams("|b| must be below 1"));
    }
    Ok(b)
}

/// Builds one of the [`BUILTIN_NAMES`] families.
pub fn builtin_metric(name: &str, params: &BuiltinParams) -> Result<MetricDefinition> {
    let n = params.dim;
    if n < 2 {
        return Err(Error::InvalidParams("dimension must be at least 2"));
    }
    let mut bound = BTreeMap::new();
    let (alpha, beta, note) = match name {
        "minkowski_randers" => {
            let b = constant_one_form(params, n)?;
            let beta = vector_params("b", &b, &mut bound);
            let alpha = upper_from(n, |i, j| Expr::constant(if i == j { 1.0 } else { 0.0 }));
            (alpha, beta, "Minkowski: Euclidean alpha, constant beta")
        }
        "example_1_1" => {
            let a = params
                .a
                .clone()
                .ok_or(Error::InvalidParams("example_1_1 needs the vector a"))?;
            if a.len() != n {
                return Err(Error::InvalidParams("a must have n components"));
            }
            let av = vector_params("a", &a, &mut bound);
            let x2 = norm2_x(n);
            let a2 = sum(av.iter().map(|e| e.clone().pow(2)));
            let ax = sum(av.iter().enumerate().map(|(i, e)| e.clone() * Expr::coord(i)));
            let lambda = Expr::constant(1.0) - a2 * x2.clone().pow(2);
            let w: Vec<Expr> = (0..n)
                .map(|i| x2.clone() * av[i].clone() - Expr::constant(2.0) * ax.clone() * Expr::coord(i))
                .collect();
            let alpha = upper_from(n, |i, j| {
                let num = if i == j {
                    lambda.clone() + w[i].clone() * w[j].clone()
                } else {
                    w[i].clone() * w[j].clone()
                };
                num / lambda.clone().pow(2)
            });
            let beta = w.iter().map(|wi| -(wi.clone() / lambda.clone())).collect();
            (alpha, beta, "requires |a| |x|^2 < 1")
        }
        "funk" => {
            let lambda = Expr::constant(1.0) - norm2_x(n);
            let alpha = upper_from(n, |i, j| {
                let xx = Expr::coord(i) * Expr::coord(j);
                let num = if i == j { lambda.clone() + xx } else { xx };
                num / lambda.clone().pow(2)
            });
            let beta = (0..n).map(|i| Expr::coord(i) / lambda.clone()).collect();
            (alpha, beta, "unit ball |x| < 1")
        }
        "sphere_alpha" => {
            let conf = Expr::constant(1.0) + norm2_x(n) / Expr::constant(4.0);
            let alpha = upper_from(n, |i, j| {
                if i == j {
                    Expr::constant(1.0) / conf.clone().pow(2)
                } else {
                    Expr::constant(0.0)
                }
            });
            let beta = (0..n).map(|_| Expr::constant(0.0)).collect();
            (alpha, beta, "round unit sphere, stereographic chart, beta = 0")
        }
        "conformal_minkowski" => {
            let b = constant_one_form(params, n)?;
            let bv = vector_params("b", &b, &mut bound);
            let text = params.sigma.as_deref().unwrap_or("0");
            let sigma = parse_expression(text, n, bound.keys().map(String::as_str))?;
            let alpha = upper_from(n, |i, j| {
                if i == j {
                    (Expr::constant(2.0) * sigma.clone()).exp()
                } else {
                    Expr::constant(0.0)
                }
            });
            let beta = bv.into_iter().map(|bi| sigma.clone().exp() * bi).collect();
            (alpha, beta, "e^sigma times a Minkowski Randers norm")
        }
        other => return Err(Error::UnknownBuiltin(other.to_string())),
    };
    MetricDefinition::new(n, alpha, beta, bound, note)
}

/// Bound on `||β||_α` at points drawn by [`random_admissible_point`].
pub const RANDOM_BETA_BOUND: f64 = 0.8;

/// A metric whose `a_ij` and `b_i` are random polynomials of degree at most 2:
/// `a = δ + 0.2 (linear + quadratic)`, `b = 0.3 (constant + linear) + 0.2
/// quadratic`, coefficients uniform and rounded to three decimals so the
/// metric survives a round trip through text.
pub fn random_polynomial_metric(n: usize, rng: &mut SplitMix64) -> Result<MetricDefinition> {
    let mut u = |scale: f64| libm::round(scale * (2.0 * rng.next_f64() - 1.0) * 1000.0) / 1000.0;
    let mut poly = |c0: f64, s0: f64, s1: f64, s2: f64| {
        let mut e = Expr::constant(c0 + u(s0));
        for k in 0..n {
            e = e + Expr::constant(u(s1)) * Expr::coord(k);
        }
        for k in 0..n {
            for l in k..n {
                e = e + Expr::constant(u(s2)) * Expr::coord(k) * Expr::coord(l);
            }
        }
        e
    };
    let alpha = upper_from(n, |i, j| poly(if i == j { 1.0 } else { 0.0 }, 0.0, 0.2, 0.2));
    let beta = (0..n).map(|_| poly(0.0, 0.3, 0.3, 0.2)).collect();
    MetricDefinition::new(n, alpha, beta, BTreeMap::new(), "random polynomial; sample |x| <= 0.4")
}

/// A point in the cube `[-radius, radius]^n` where `a(x)` is positive
/// definite and `||β||_α <` [`RANDOM_BETA_BOUND`], or `None` after `tries`.
pub fn random_admissible_point(metric: &MetricDefinition, rng: &mut SplitMix64, radius: f64, tries: usize) -> Option<Vec<f64>> {
    for _ in 0..tries {
        let x: Vec<f64> = (0..metric.dim()).map(|_| radius * (2.0 * rng.next_f64() - 1.0)).collect();
        if let Ok(check) = metric.validate_at(&x) {
            if check.b2 < RANDOM_BETA_BOUND * RANDOM_BETA_BOUND {
                return Some(x);
            }
        }
    }
    None
}
