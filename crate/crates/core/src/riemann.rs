//! Geometry of the Riemannian part `α` and covariant derivatives of `β`.
//!
//! All x-derivatives come from order-2 jets of the coefficient expressions.
//! Christoffel symbols and first covariant derivatives are kept as jets valid
//! to order 1, so second covariant derivatives are read off exactly instead of
//! being differenced.
//!
//! Index conventions:
//! * `b_{i;j} = ∂_j b_i − Γ^k_{ij} b_k`, `b_{i;j;k}` differentiates in `k` last.
//! * `R^m_{ijk} = ∂_k Γ^m_{ij} − ∂_j Γ^m_{ik} + Γ^p_{ij} Γ^m_{pk} − Γ^p_{ik} Γ^m_{pj}`,
//!   so that `b_{i;j;k} − b_{i;k;j} = −b_m R^m_{ijk}`.
//! * `Ric_{ik} = R^m_{ikm}`; the unit sphere has `r_α = n(n−1)`.

use alloc::vec::Vec;

use crate::jets::{Jet, JetTable, Scalar};
use crate::linalg::{self, Mat};
use crate::metric::{MetricDefinition, RANDERS_MARGIN};
use crate::{Error, Result};

/// α-geometry at a point.
#[derive(Clone, Debug)]
pub struct AlphaData {
    pub dim: usize,
    pub x: Vec<f64>,
    pub a: Mat<f64>,
    pub a_inv: Mat<f64>,
    /// `∂_k a_ij` at `[(i n + j) n + k]`.
    pub da: Vec<f64>,
    /// `∂_k ∂_l a_ij` at `[((i n + j) n + k) n + l]`.
    pub dda: Vec<f64>,
    /// `Γ^k_ij` at `[(k n + i) n + j]`.
    pub gamma: Vec<f64>,
    /// `∂_l Γ^k_ij` at `[((k n + i) n + j) n + l]`.
    pub dgamma: Vec<f64>,
    /// `^αRic_ij`.
    pub ricci: Mat<f64>,
    /// `r_α = a^{ij} ^αRic_ij`.
    pub scalar: f64,
    /// `σ_α = sqrt(det a)`.
    pub volume: f64,
}

impl AlphaData {
    pub fn gamma(&self, k: usize, i: usize, j: usize) -> f64 {
        let n = self.dim;
        self.gamma[(k * n + i) * n + j]
    }

    pub fn dgamma(&self, k: usize, i: usize, j: usize, l: usize) -> f64 {
        let n = self.dim;
        self.dgamma[((k * n + i) * n + j) * n + l]
    }

    /// `R^m_{ijk}` in the convention of the module docs.
    pub fn riemann(&self, m: usize, i: usize, j: usize, k: usize) -> f64 {
        let n = self.dim;
        let mut r = self.dgamma(m, i, j, k) - self.dgamma(m, i, k, j);
        for p in 0..n {
            r += self.gamma(p, i, j) * self.gamma(m, p, k) - self.gamma(p, i, k) * self.gamma(m, p, j);
        }
        r
    }
}

/// Rank-3 array with `[(i n + j) n + k]` layout.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor3 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    data.push(f(i, j, k));
                }
            }
        }
        Tensor3 { n, data }
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.n + j) * self.n + k]
    }
}

/// The β-invariant zoo at a point.
///
/// Mixed tensors `X^i_j = a^{im} X_{mj}`; contractions with `b^i` carry the
/// free index last (`r_i = b^m r_{mi}`).
#[derive(Clone, Debug)]
pub struct BetaInvariants {
    pub dim: usize,
    pub b: Vec<f64>,
    pub b_up: Vec<f64>,
    /// `‖β‖²_α = a^{ij} b_i b_j`.
    pub b2: f64,
    /// `b_{i;j}`.
    pub bij: Mat<f64>,
    /// `b_{i;j;k}`.
    pub bijk: Tensor3,
    pub r: Mat<f64>,
    pub s: Mat<f64>,
    pub e: Mat<f64>,
    pub w: Mat<f64>,
    pub t: Mat<f64>,
    pub q: Mat<f64>,
    pub r_mixed: Mat<f64>,
    pub s_mixed: Mat<f64>,
    pub t_mixed: Mat<f64>,
    pub q_mixed: Mat<f64>,
    pub r_i: Vec<f64>,
    pub s_i: Vec<f64>,
    pub t_i: Vec<f64>,
    pub q_i: Vec<f64>,
    pub p_i: Vec<f64>,
    /// `s^i = a^{im} s_m`.
    pub s_up: Vec<f64>,
    /// `r = b^i b^j r_ij`.
    pub r_scalar: f64,
    /// `t = b^i t_i`.
    pub t_scalar: f64,
    pub r_trace: f64,
    pub t_trace: f64,
    pub q_trace: f64,
    /// `r_{ij;k}`.
    pub r_cov: Tensor3,
    /// `s_{ij;k}`.
    pub s_cov: Tensor3,
    /// `e_{ij;k}`.
    pub e_cov: Tensor3,
    /// `s_{i;j}`.
    pub s_i_cov: Mat<f64>,
    /// `r^m_{m;k}`.
    pub r_trace_cov: Vec<f64>,
    /// `r^m_{k;m}`.
    pub r_div: Vec<f64>,
    /// `s^m_{k;m}`.
    pub s_div: Vec<f64>,
    /// `s^m_{;m} = a^{mk} s_{k;m}`.
    pub s_i_div: f64,
    /// `b^i s^m_{i;m}`.
    pub b_s_div: f64,
}

fn d3(n: usize) -> usize {
    n * n * n
}

/// α-geometry and β-invariants at `x`, sharing one jet pass.
pub fn geometry_at(metric: &MetricDefinition, x: &[f64]) -> Result<(AlphaData, BetaInvariants)> {
    let n = metric.dim();
    if x.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: x.len(),
        });
    }
    let table = JetTable::new(n, 2)?;
    let xj: Vec<Jet> = (0..n).map(|i| table.variable(x[i], i)).collect();
    let a = metric.alpha_matrix(&xj)?;
    let a_val = a.map(|j| j.value());
    let min_ev = a_val.symmetric_eigenvalues()[0];
    if !(min_ev > 0.0) {
        return Err(Error::NotPositiveDefinite { eigenvalue: min_ev });
    }
    let a_inv = linalg::inverse(&a)?;

    let mut da_j: Vec<Jet> = Vec::with_capacity(d3(n));
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                da_j.push(a[(i, j)].diff(k));
            }
        }
    }
    let da_at = |i: usize, j: usize, k: usize| &da_j[(i * n + j) * n + k];

    let mut gamma_j: Vec<Jet> = Vec::with_capacity(d3(n));
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut g = table.constant(0.0);
                for l in 0..n {
                    let bracket = da_at(j, l, i).clone() + da_at(i, l, j).clone() - da_at(i, j, l).clone();
                    g = g + a_inv[(k, l)].clone() * bracket;
                }
                gamma_j.push(g * 0.5);
            }
        }
    }
    let gj = |k: usize, i: usize, j: usize| &gamma_j[(k * n + i) * n + j];

    let mut da = Vec::with_capacity(d3(n));
    let mut dda = Vec::with_capacity(d3(n) * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                da.push(a[(i, j)].d1(k));
                for l in 0..n {
                    dda.push(a[(i, j)].d2(k, l));
                }
            }
        }
    }
    let gamma: Vec<f64> = gamma_j.iter().map(|g| g.value()).collect();
    let mut dgamma = Vec::with_capacity(d3(n) * n);
    for g in &gamma_j {
        for l in 0..n {
            dgamma.push(g.d1(l));
        }
    }

    let mut alpha = AlphaData {
        dim: n,
        x: x.to_vec(),
        a: a_val,
        a_inv: a_inv.map(|j| j.value()),
        da,
        dda,
        gamma,
        dgamma,
        ricci: Mat::identity(n),
        scalar: 0.0,
        volume: 0.0,
    };
    alpha.ricci = Mat::from_fn(n, |i, k| (0..n).map(|m| alpha.riemann(m, i, k, m)).sum());
    alpha.scalar = contract2(&alpha.a_inv, &alpha.ricci);
    alpha.volume = libm::sqrt(linalg::det(&alpha.a)?);

    // β side, as order-1-valid jets where a further derivative is needed.
    let bj = metric.beta_vector(&xj)?;
    let b_up_j: Vec<Jet> = (0..n)
        .map(|i| sum_jets(&table, (0..n).map(|m| a_inv[(i, m)].clone() * bj[m].clone())))
        .collect();
    let b2 = (0..n).map(|i| bj[i].value() * b_up_j[i].value()).sum::<f64>();
    if !(b2 < 1.0 - RANDERS_MARGIN) {
        return Err(Error::RandersViolation { b2 });
    }
    let cov1 = |v: &[Jet], i: usize, j: usize| -> Jet {
        let mut out = v[i].diff(j);
        for k in 0..n {
            out = out - gj(k, i, j).clone() * v[k].clone();
        }
        out
    };
    let bij_j: Vec<Jet> = (0..n * n).map(|ij| cov1(&bj, ij / n, ij % n)).collect();
    let rj: Vec<Jet> = (0..n * n)
        .map(|ij| {
            let (i, j) = (ij / n, ij % n);
            (bij_j[i * n + j].clone() + bij_j[j * n + i].clone()) * 0.5
        })
        .collect();
    let sj: Vec<Jet> = (0..n * n)
        .map(|ij| {
            let (i, j) = (ij / n, ij % n);
            (bij_j[i * n + j].clone() - bij_j[j * n + i].clone()) * 0.5
        })
        .collect();
    let s_i_j: Vec<Jet> = (0..n)
        .map(|i| sum_jets(&table, (0..n).map(|m| b_up_j[m].clone() * sj[m * n + i].clone())))
        .collect();
    let ej: Vec<Jet> = (0..n * n)
        .map(|ij| {
            let (i, j) = (ij / n, ij % n);
            rj[ij].clone() + s_i_j[i].clone() * bj[j].clone() + s_i_j[j].clone() * bj[i].clone()
        })
        .collect();

    let cov2 = |t: &[Jet]| -> Tensor3 {
        Tensor3::from_fn(n, |i, j, k| {
            let mut v = t[i * n + j].d1(k);
            for m in 0..n {
                v -= alpha.gamma(m, i, k) * t[m * n + j].value() + alpha.gamma(m, j, k) * t[i * n + m].value();
            }
            v
        })
    };
    let bijk = cov2(&bij_j);
    let r_cov = cov2(&rj);
    let s_cov = cov2(&sj);
    let e_cov = cov2(&ej);
    let s_i_cov = Mat::from_fn(n, |i, j| {
        let mut v = s_i_j[i].d1(j);
        for m in 0..n {
            v -= alpha.gamma(m, i, j) * s_i_j[m].value();
        }
        v
    });

    let val = |v: &[Jet]| Mat::from_fn(n, |i, j| v[i * n + j].value());
    let ai = &alpha.a_inv;
    let b: Vec<f64> = bj.iter().map(|j| j.value()).collect();
    let b_up: Vec<f64> = b_up_j.iter().map(|j| j.value()).collect();
    let r = val(&rj);
    let s = val(&sj);
    let e = val(&ej);
    let raise = |m: &Mat<f64>| Mat::from_fn(n, |i, j| (0..n).map(|k| ai[(i, k)] * m[(k, j)]).sum());
    let r_mixed = raise(&r);
    let s_mixed = raise(&s);
    let lower_prod = |x: &Mat<f64>, mixed: &Mat<f64>| {
        Mat::from_fn(n, |i, j| (0..n).map(|m| x[(i, m)] * mixed[(m, j)]).sum())
    };
    let w = lower_prod(&r, &r_mixed);
    let t = lower_prod(&s, &s_mixed);
    let q = lower_prod(&r, &s_mixed);
    let t_mixed = raise(&t);
    let q_mixed = raise(&q);
    let with_b = |m: &Mat<f64>| -> Vec<f64> { (0..n).map(|i| (0..n).map(|k| b_up[k] * m[(k, i)]).sum()).collect() };
    let r_i = with_b(&r);
    let s_i = with_b(&s);
    let t_i = with_b(&t);
    let q_i = with_b(&q);
    let s_up: Vec<f64> = (0..n).map(|i| (0..n).map(|m| ai[(i, m)] * s_i[m]).sum()).collect();
    let p_i: Vec<f64> = (0..n).map(|i| (0..n).map(|m| r[(i, m)] * s_up[m]).sum()).collect();
    let r_scalar = dot(&b_up, &r_i);
    let t_scalar = dot(&b_up, &t_i);
    let trace = |m: &Mat<f64>| (0..n).map(|i| m[(i, i)]).sum::<f64>();
    let r_trace_cov: Vec<f64> = (0..n)
        .map(|k| {
            let mut v = 0.0;
            for i in 0..n {
                for j in 0..n {
                    v += ai[(i, j)] * r_cov.get(i, j, k);
                }
            }
            v
        })
        .collect();
    let div = |tc: &Tensor3| -> Vec<f64> {
        (0..n)
            .map(|k| {
                let mut v = 0.0;
                for m in 0..n {
                    for i in 0..n {
                        v += ai[(m, i)] * tc.get(i, k, m);
                    }
                }
                v
            })
            .collect()
    };
    let r_div = div(&r_cov);
    let s_div = div(&s_cov);
    let s_i_div = contract2(ai, &s_i_cov);
    let b_s_div = dot(&b_up, &s_div);

    let beta = BetaInvariants {
        dim: n,
        b,
        b_up,
        b2,
        bij: val(&bij_j),
        bijk,
        r_trace: trace(&r_mixed),
        t_trace: trace(&t_mixed),
        q_trace: trace(&q_mixed),
        r,
        s,
        e,
        w,
        t,
        q,
        r_mixed,
        s_mixed,
        t_mixed,
        q_mixed,
        r_i,
        s_i,
        t_i,
        q_i,
        p_i,
        s_up,
        r_scalar,
        t_scalar,
        r_cov,
        s_cov,
        e_cov,
        s_i_cov,
        r_trace_cov,
        r_div,
        s_div,
        s_i_div,
        b_s_div,
    };
    Ok((alpha, beta))
}

pub fn alpha_at(metric: &MetricDefinition, x: &[f64]) -> Result<AlphaData> {
    geometry_at(metric, x).map(|(a, _)| a)
}

pub fn beta_invariants(metric: &MetricDefinition, x: &[f64]) -> Result<BetaInvariants> {
    geometry_at(metric, x).map(|(_, b)| b)
}

fn sum_jets(table: &alloc::sync::Arc<JetTable>, it: impl Iterator<Item = Jet>) -> Jet {
    it.fold(table.constant(0.0), |acc, j| acc + j)
}

fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// `Σ_ij A_ij B_ij`.
fn contract2(a: &Mat<f64>, b: &Mat<f64>) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += a[(i, j)] * b[(i, j)];
        }
    }
    s
}

/// All y-contractions needed by the closed-form curvature formulas.
///
/// Generic in the scalar so that the same contraction feeds plain evaluation
/// and y-jets (for Hessians in `y`).
#[derive(Clone, Debug)]
pub struct EvalContext<S> {
    pub dim: usize,
    pub alpha: S,
    pub beta: S,
    pub f: S,
    /// `s := β/α`.
    pub ratio: S,
    pub y: Vec<S>,
    /// `y_i = a_ij y^j`.
    pub y_low: Vec<S>,
    pub b2: f64,
    pub r00: S,
    pub e00: S,
    pub q00: S,
    pub t00: S,
    pub w00: S,
    pub s0: S,
    pub r0: S,
    pub t0: S,
    pub p0: S,
    /// `r_{00;0}`.
    pub r000: S,
    /// `e_{00;0}`.
    pub e000: S,
    /// `s_{0;0}`.
    pub s00: S,
    /// `s^m_{0;m}`.
    pub s0m: S,
    /// `r^m_{m;0}`.
    pub rm0: S,
    /// `r^m_{0;m}`.
    pub r0m: S,
    /// `^αRic = ^αRic_ij y^i y^j`.
    pub ric_alpha: S,
    /// `^αRic_ij b^i y^j`.
    pub ric_alpha_by: S,
    /// `q_{00·i} b^i`.
    pub q00_b: S,
    /// `r_{00;0·i} b^i`.
    pub r000_b: S,
    /// `s_{0;0·i} b^i`.
    pub s00_b: S,
}

fn lin<S: Scalar>(v: &[f64], y: &[S]) -> S {
    let mut acc = y[0].lift(0.0);
    for (vi, yi) in v.iter().zip(y) {
        if *vi != 0.0 {
            acc = acc + yi.clone() * *vi;
        }
    }
    acc
}

fn quad<S: Scalar>(m: &Mat<f64>, y: &[S]) -> S {
    let n = y.len();
    let mut acc = y[0].lift(0.0);
    for i in 0..n {
        let row: Vec<f64> = (0..n).map(|j| m[(i, j)]).collect();
        let inner = lin(&row, y);
        acc = acc + inner * y[i].clone();
    }
    acc
}

fn cubic<S: Scalar>(t: &Tensor3, y: &[S]) -> S {
    let n = y.len();
    let mut acc = y[0].lift(0.0);
    for i in 0..n {
        let m = Mat::from_fn(n, |j, k| t.get(i, j, k));
        acc = acc + quad(&m, y) * y[i].clone();
    }
    acc
}

/// Contracts the point data with a direction `y`.
pub fn contract_at<S: Scalar>(alpha: &AlphaData, beta: &BetaInvariants, y: &[S]) -> Result<EvalContext<S>> {
    let n = alpha.dim;
    if y.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: y.len(),
        });
    }
    let alpha2 = quad(&alpha.a, y);
    let ynorm = libm::sqrt(y.iter().map(|v| v.value() * v.value()).sum::<f64>());
    if !(alpha2.value() > 0.0) || libm::sqrt(alpha2.value()) < 1e-12 * ynorm || ynorm == 0.0 {
        return Err(Error::DegenerateDirection);
    }
    let al = alpha2.sqrt();
    let be = lin(&beta.b, y);
    let f = al.clone() + be.clone();
    let ratio = be.clone() / al.clone();
    let y_low: Vec<S> = (0..n)
        .map(|i| lin(&(0..n).map(|j| alpha.a[(i, j)]).collect::<Vec<_>>(), y))
        .collect();

    let s00_sym = Mat::from_fn(n, |i, j| beta.s_i_cov[(i, j)]);
    let q00_b_vec: Vec<f64> = (0..n)
        .map(|j| (0..n).map(|i| (beta.q[(i, j)] + beta.q[(j, i)]) * beta.b_up[i]).sum())
        .collect();
    let s00_b_vec: Vec<f64> = (0..n)
        .map(|k| (0..n).map(|i| (beta.s_i_cov[(i, k)] + beta.s_i_cov[(k, i)]) * beta.b_up[i]).sum())
        .collect();
    let r000_b_mat = Mat::from_fn(n, |k, l| {
        (0..n)
            .map(|i| {
                beta.b_up[i] * (beta.r_cov.get(i, k, l) + beta.r_cov.get(k, i, l) + beta.r_cov.get(k, l, i))
            })
            .sum()
    });
    let ric_by_vec: Vec<f64> = (0..n)
        .map(|j| (0..n).map(|i| alpha.ricci[(i, j)] * beta.b_up[i]).sum())
        .collect();

    Ok(EvalContext {
        dim: n,
        b2: beta.b2,
        r00: quad(&beta.r, y),
        e00: quad(&beta.e, y),
        q00: quad(&beta.q, y),
        t00: quad(&beta.t, y),
        w00: quad(&beta.w, y),
        s0: lin(&beta.s_i, y),
        r0: lin(&beta.r_i, y),
        t0: lin(&beta.t_i, y),
        p0: lin(&beta.p_i, y),
        r000: cubic(&beta.r_cov, y),
        e000: cubic(&beta.e_cov, y),
        s00: quad(&s00_sym, y),
        s0m: lin(&beta.s_div, y),
        rm0: lin(&beta.r_trace_cov, y),
        r0m: lin(&beta.r_div, y),
        ric_alpha: quad(&alpha.ricci, y),
        ric_alpha_by: lin(&ric_by_vec, y),
        q00_b: lin(&q00_b_vec, y),
        r000_b: quad(&r000_b_mat, y),
        s00_b: lin(&s00_b_vec, y),
        alpha: al,
        beta: be,
        f,
        ratio,
        y: y.to_vec(),
        y_low,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{builtin_metric, BuiltinParams};
    use crate::testutil::Lcg;
    use crate::testutil::rel_err;
    use alloc::string::ToString;
    use alloc::vec;
    use approx::assert_relative_eq;

    fn sphere(n: usize) -> MetricDefinition {
        builtin_metric("sphere_alpha", &BuiltinParams { dim: n, ..Default::default() }).unwrap()
    }

    fn example(n: usize) -> MetricDefinition {
        let mut a = vec![0.0; n];
        a[0] = 1.0;
        builtin_metric(
            "example_1_1",
            &BuiltinParams {
                dim: n,
                a: Some(a),
                ..Default::default()
            },
        )
        .unwrap()
    }

    pub(crate) fn wavy(n: usize) -> MetricDefinition {
        use crate::exprlang::parse_expression;
        let texts_a2 = ["1 + 0.3*x1^2 + 0.1*sin(x2)", "0.2*x1*x2", "1.2 + 0.2*cos(x1) - 0.1*x2"];
        let texts_b2 = ["0.2 + 0.3*x2^2 - 0.1*x1", "0.1*exp(x1)*x2"];
        let texts_a3 = [
            "1 + 0.3*x1^2 + 0.1*sin(x2)",
            "0.2*x1*x2",
            "0.05*x3",
            "1.2 + 0.2*cos(x1) - 0.1*x2",
            "0.1*x1*x3",
            "1 + 0.2*x3^2 + 0.1*x1",
        ];
        let texts_b3 = ["0.2 + 0.3*x2^2 - 0.1*x3", "0.1*exp(x1)*x2", "0.15*x1 - 0.1*x2*x3"];
        let (ta, tb): (&[&str], &[&str]) = if n == 2 { (&texts_a2, &texts_b2) } else { (&texts_a3, &texts_b3) };
        let alpha = ta.iter().map(|t| parse_expression(t, n, []).unwrap()).collect();
        let beta = tb.iter().map(|t| parse_expression(t, n, []).unwrap()).collect();
        MetricDefinition::new(n, alpha, beta, Default::default(), "test").unwrap()
    }

    /// Christoffels from central differences of `a(x)`.
    fn fd_gamma(m: &MetricDefinition, x: &[f64], h: f64) -> Vec<f64> {
        let n = m.dim();
        let a = m.alpha_matrix(x).unwrap();
        let a_inv = linalg::inverse(&a).unwrap();
        let mut da = vec![0.0; n * n * n];
        for k in 0..n {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[k] += h;
            xm[k] -= h;
            let (ap, am) = (m.alpha_matrix(&xp).unwrap(), m.alpha_matrix(&xm).unwrap());
            for i in 0..n {
                for j in 0..n {
                    da[(i * n + j) * n + k] = (ap[(i, j)] - am[(i, j)]) / (2.0 * h);
                }
            }
        }
        let mut g = vec![0.0; n * n * n];
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut v = 0.0;
                    for l in 0..n {
                        v += a_inv[(k, l)]
                            * (da[(j * n + l) * n + i] + da[(i * n + l) * n + j] - da[(i * n + j) * n + l]);
                    }
                    g[(k * n + i) * n + j] = 0.5 * v;
                }
            }
        }
        g
    }

    /// Scalar curvature from finite-difference Christoffels and their
    /// finite-difference derivatives.
    fn fd_scalar_curvature(m: &MetricDefinition, x: &[f64]) -> f64 {
        let n = m.dim();
        let h = 1e-4;
        let g = fd_gamma(m, x, 1e-6);
        let mut dg = vec![0.0; n * n * n * n];
        for l in 0..n {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[l] += h;
            xm[l] -= h;
            let (gp, gm) = (fd_gamma(m, &xp, 1e-6), fd_gamma(m, &xm, 1e-6));
            for idx in 0..n * n * n {
                dg[idx * n + l] = (gp[idx] - gm[idx]) / (2.0 * h);
            }
        }
        let gam = |k: usize, i: usize, j: usize| g[(k * n + i) * n + j];
        let dgam = |k: usize, i: usize, j: usize, l: usize| dg[((k * n + i) * n + j) * n + l];
        let a_inv = linalg::inverse(&m.alpha_matrix(x).unwrap()).unwrap();
        let mut r = 0.0;
        for i in 0..n {
            for k in 0..n {
                let mut ric = 0.0;
                for mm in 0..n {
                    ric += dgam(mm, i, k, mm) - dgam(mm, i, mm, k);
                    for p in 0..n {
                        ric += gam(p, i, k) * gam(mm, p, mm) - gam(p, i, mm) * gam(mm, p, k);
                    }
                }
                r += a_inv[(i, k)] * ric;
            }
        }
        r
    }

    #[test]
    fn euclidean_is_flat() {
        let m = builtin_metric(
            "minkowski_randers",
            &BuiltinParams {
                dim: 3,
                b: Some(vec![0.2, 0.1, 0.0]),
                ..Default::default()
            },
        )
        .unwrap();
        let (a, b) = geometry_at(&m, &[0.3, -0.2, 0.9]).unwrap();
        assert!(a.gamma.iter().all(|&g| g == 0.0));
        assert_eq!(a.scalar, 0.0);
        assert!(b.bij.max_abs() == 0.0 && b.e.max_abs() == 0.0 && b.bijk.data.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn sphere_scalar_curvature() {
        let a = alpha_at(&sphere(2), &[0.1, -0.2]).unwrap();
        assert_relative_eq!(a.scalar, 2.0, epsilon = 1e-12);
        assert!((fd_scalar_curvature(&sphere(2), &[0.1, -0.2]) - 2.0).abs() < 1e-5);
        let mut rng = Lcg::new(1);
        for _ in 0..5 {
            let x = rng.ball(3, 1.5);
            let a = alpha_at(&sphere(3), &x).unwrap();
            assert!((a.scalar - 6.0).abs() < 1e-8, "{}", a.scalar);
        }
    }

    #[test]
    fn christoffels_match_finite_differences() {
        let m = wavy(3);
        let x = [0.2, -0.3, 0.1];
        let a = alpha_at(&m, &x).unwrap();
        let g = fd_gamma(&m, &x, 1e-6);
        for (got, want) in a.gamma.iter().zip(&g) {
            assert!((got - want).abs() < 1e-8);
        }
        let r_fd = fd_scalar_curvature(&m, &x);
        assert!((a.scalar - r_fd).abs() < 1e-5 * (1.0 + a.scalar.abs()));
    }

    #[test]
    fn alpha_invariants() {
        let m = wavy(3);
        let a = alpha_at(&m, &[0.4, 0.1, -0.2]).unwrap();
        let n = 3;
        assert!(a.a.mul(&a.a_inv).max_abs_diff(&Mat::identity(3)) < 1e-12);
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    assert!((a.gamma(k, i, j) - a.gamma(k, j, i)).abs() < 1e-15);
                    assert!((a.ricci[(i, j)] - a.ricci[(j, i)]).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn ricci_identity() {
        let mut rng = Lcg::new(2);
        for n in [2, 3] {
            let m = wavy(n);
            for _ in 0..3 {
                let x = rng.ball(n, 0.5);
                let (a, b) = geometry_at(&m, &x).unwrap();
                for i in 0..n {
                    for j in 0..n {
                        for k in 0..n {
                            let lhs = b.bijk.get(i, j, k) - b.bijk.get(i, k, j);
                            let rhs: f64 = -(0..n).map(|mm| b.b[mm] * a.riemann(mm, i, j, k)).sum::<f64>();
                            assert!((lhs - rhs).abs() < 1e-8, "{lhs} vs {rhs}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn zoo_identities() {
        let mut rng = Lcg::new(4);
        for n in [2, 3] {
            let m = wavy(n);
            let x = rng.ball(n, 0.5);
            let b = beta_invariants(&m, &x).unwrap();
            for i in 0..n {
                for j in 0..n {
                    assert!((b.bij[(i, j)] - (b.r[(i, j)] + b.s[(i, j)])).abs() < 1e-15);
                    assert_eq!(b.r[(i, j)], b.r[(j, i)]);
                    assert_eq!(b.s[(i, j)], -b.s[(j, i)]);
                    assert!((b.t[(i, j)] - b.t[(j, i)]).abs() < 1e-14);
                    let e = b.r[(i, j)] + b.s_i[i] * b.b[j] + b.s_i[j] * b.b[i];
                    assert!((b.e[(i, j)] - e).abs() < 1e-14);
                }
            }
            // independent re-contractions
            let mut r = 0.0;
            let mut t = 0.0;
            for i in 0..n {
                for j in 0..n {
                    r += b.b_up[i] * b.b_up[j] * b.r[(i, j)];
                    t += b.b_up[i] * b.b_up[j] * b.t[(i, j)];
                }
            }
            assert!((b.r_scalar - r).abs() < 1e-12);
            assert!((b.t_scalar - t).abs() < 1e-12);
            // s_i b^i = 0
            let sb: f64 = (0..n).map(|i| b.s_i[i] * b.b_up[i]).sum();
            assert!(sb.abs() < 1e-14);
        }
    }

    #[test]
    fn example_e_is_conformal_to_h() {
        for n in [2, 3] {
            let m = example(n);
            let mut rng = Lcg::new(n as u64);
            for _ in 0..5 {
                let x = rng.ball(n, 0.8);
                let b = beta_invariants(&m, &x).unwrap();
                let c = x[0];
                let a = m.alpha_matrix(&x).unwrap();
                for i in 0..n {
                    for j in 0..n {
                        let want = 2.0 * c * (a[(i, j)] - b.b[i] * b.b[j]);
                        assert!((b.e[(i, j)] - want).abs() < 1e-9, "{} vs {}", b.e[(i, j)], want);
                    }
                }
            }
        }
        let b = beta_invariants(&example(2), &[0.1, 0.2]).unwrap();
        assert_eq!(b.r[(0, 1)] - b.r[(1, 0)], 0.0);
        assert!(b.s[(0, 1)].abs() > 1e-3);
    }

    /// Covariant derivatives of β from central differences of b and a.
    #[test]
    fn covariant_derivative_matches_finite_differences() {
        let m = example(2);
        let x = [0.1, 0.2];
        let (a, b) = geometry_at(&m, &x).unwrap();
        let h = 1e-6;
        let n = 2;
        for i in 0..n {
            for j in 0..n {
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[j] += h;
                xm[j] -= h;
                let db = (m.beta_vector(&xp).unwrap()[i] - m.beta_vector(&xm).unwrap()[i]) / (2.0 * h);
                let want = db - (0..n).map(|k| a.gamma(k, i, j) * b.b[k]).sum::<f64>();
                assert!((b.bij[(i, j)] - want).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn contractions() {
        let m = example(2);
        let (a, b) = geometry_at(&m, &[0.3, -0.1]).unwrap();
        let y = [0.7, -0.4];
        let c = contract_at(&a, &b, &y).unwrap();
        assert!(rel_err(c.f, m.finsler(&[0.3, -0.1], &y).unwrap()) < 1e-14);
        // r_00 = e_00 - 2 β s_0
        assert!((c.r00 - (c.e00 - 2.0 * c.beta * c.s0)).abs() < 1e-12);
        // r_{00;0} = e_{00;0} - 2(β s_{0;0} + s_0 e_00 - 2 β s_0²)
        let rhs = c.e000 - 2.0 * (c.beta * c.s00 + c.s0 * c.e00 - 2.0 * c.beta * c.s0 * c.s0);
        assert!((c.r000 - rhs).abs() < 1e-10, "{} vs {}", c.r000, rhs);

        let y2 = [1.4, -0.8];
        let c2 = contract_at(&a, &b, &y2).unwrap();
        assert!(rel_err(c2.r00, 4.0 * c.r00) < 1e-12);
        assert!(rel_err(c2.r000, 8.0 * c.r000) < 1e-12);
        assert!(rel_err(c2.q00_b, 2.0 * c.q00_b) < 1e-12);
        assert!(rel_err(c2.r000_b, 4.0 * c.r000_b) < 1e-12);

        assert_eq!(contract_at(&a, &b, &[0.0, 0.0]).unwrap_err(), Error::DegenerateDirection);
    }

    #[test]
    fn contractions_vanish_without_beta() {
        let (a, b) = geometry_at(&sphere(2), &[0.2, 0.5]).unwrap();
        let c = contract_at(&a, &b, &[1.0, 2.0]).unwrap();
        assert_eq!((c.s0, c.r00, c.e00), (0.0, 0.0, 0.0));
        assert_eq!(c.f, c.alpha);
    }

    #[test]
    fn y_derivative_contractions_match_jets() {
        use crate::jets::seed;
        let m = wavy(3);
        let (a, b) = geometry_at(&m, &[0.1, 0.2, -0.1]).unwrap();
        let y = [0.3, -0.5, 0.8];
        let yj = seed(&y, &[0, 1, 2], 1).unwrap();
        let cj = contract_at(&a, &b, &yj).unwrap();
        let c = contract_at(&a, &b, &y).unwrap();
        let along_b = |j: &Jet| (0..3).map(|i| b.b_up[i] * j.d1(i)).sum::<f64>();
        assert!((along_b(&cj.q00) - c.q00_b).abs() < 1e-13);
        assert!((along_b(&cj.r000) - c.r000_b).abs() < 1e-13);
        assert!((along_b(&cj.s00) - c.s00_b).abs() < 1e-13);
        let _ = "keep".to_string();
    }
}
