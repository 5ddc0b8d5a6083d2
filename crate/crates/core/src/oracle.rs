//! Curvature straight from the definitions, with `F²` expanded as a jet in
//! the `2n` variables `(x, y)`.
//!
//! Variables `0..n` of every table here are the `x^i`, variables `n..2n` the
//! `y^i`. The spray needs `F²` to order 4; the Ricci tensor needs order 6 but
//! only x-degree 2, so it can run on a capped table as well.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::jets::{Jet, JetTable, Scalar};
use crate::linalg::{self, Mat};
use crate::metric::{finsler_from, MetricDefinition, RANDERS_MARGIN};
use crate::sampling::SplitMix64;
use crate::{Error, Result};

/// Spray coefficients and the derivatives the Riemann curvature consumes.
#[derive(Clone, Debug)]
pub struct SprayData {
    pub dim: usize,
    pub y: Vec<f64>,
    pub g: Mat<f64>,
    pub g_inv: Mat<f64>,
    pub spray: Vec<f64>,
    /// `∂G^i/∂x^k` at `(i, k)`.
    pub dx: Mat<f64>,
    /// `∂G^i/∂y^k` at `(i, k)`.
    pub dy: Mat<f64>,
    /// `∂²G^i/∂x^j∂y^k` at `[(i n + j) n + k]`.
    pub dxdy: Vec<f64>,
    /// `∂²G^i/∂y^j∂y^k` at `[(i n + j) n + k]`.
    pub dydy: Vec<f64>,
}

impl SprayData {
    pub fn dxdy(&self, i: usize, j: usize, k: usize) -> f64 {
        self.dxdy[(i * self.dim + j) * self.dim + k]
    }

    pub fn dydy(&self, i: usize, j: usize, k: usize) -> f64 {
        self.dydy[(i * self.dim + j) * self.dim + k]
    }

    /// `∂G^m/∂y^m`.
    pub fn divergence(&self) -> f64 {
        (0..self.dim).map(|m| self.dy[(m, m)]).sum()
    }
}

/// Table used for the order-6 Ricci tensor pass.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JetPath {
    /// Every monomial of total degree `<= 6`.
    Full,
    /// Total degree `<= 6` with x-degree `<= 2`.
    Capped,
    /// `Full` while its table has at most this many coefficients, else `Capped`.
    Budget(usize),
}

/// Coefficient budget for the one-pass table: `n = 2` runs in full (210
/// coefficients), `n = 3` falls back to the capped table.
pub const DEFAULT_BUDGET: usize = 600;

impl Default for JetPath {
    fn default() -> Self {
        JetPath::Budget(DEFAULT_BUDGET)
    }
}

struct SprayJets {
    g: Mat<Jet>,
    spray: Vec<Jet>,
    y: Vec<Jet>,
}

fn check_point(metric: &MetricDefinition, x: &[f64], y: &[f64]) -> Result<()> {
    let n = metric.dim();
    for v in [x, y] {
        if v.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: v.len(),
            });
        }
    }
    let check = metric.validate_at(x)?;
    if !(check.b2 < 1.0 - RANDERS_MARGIN) {
        return Err(Error::RandersViolation { b2: check.b2 });
    }
    let a = metric.alpha_matrix(x)?;
    let mut a2 = 0.0;
    for i in 0..n {
        for j in 0..n {
            a2 += a[(i, j)] * y[i] * y[j];
        }
    }
    let ynorm = libm::sqrt(y.iter().map(|v| v * v).sum::<f64>());
    if ynorm == 0.0 || libm::sqrt(a2.max(0.0)) < 1e-12 * ynorm {
        return Err(Error::DegenerateDirection);
    }
    Ok(())
}

fn spray_jets(metric: &MetricDefinition, x: &[f64], y: &[f64], table: &Arc<JetTable>) -> Result<SprayJets> {
    let n = metric.dim();
    let xj: Vec<Jet> = (0..n).map(|i| table.variable(x[i], i)).collect();
    let yj: Vec<Jet> = (0..n).map(|i| table.variable(y[i], n + i)).collect();
    let a = metric.alpha_matrix(&xj)?;
    let b = metric.beta_vector(&xj)?;
    let f = finsler_from(&a, &b, &yj);
    let f2 = f.clone() * f;
    let f2_y: Vec<Jet> = (0..n).map(|l| f2.diff(n + l)).collect();
    let g = Mat::from_fn(n, |i, j| f2_y[i].diff(n + j) * 0.5);
    let g_inv = linalg::inverse(&g)?;
    let spray = (0..n)
        .map(|k| {
            let mut acc = table.constant(0.0);
            for l in 0..n {
                let mut inner = -f2.diff(l);
                for m in 0..n {
                    inner = inner + f2_y[l].diff(m) * yj[m].clone();
                }
                acc = acc + g_inv[(k, l)].clone() * inner;
            }
            acc * 0.25
        })
        .collect();
    Ok(SprayJets { g, spray, y: yj })
}

/// The spray `G^k = ¼ g^{kl}{[F²]_{x^m y^l} y^m − [F²]_{x^l}}` with first and
/// second derivatives.
pub fn spray(metric: &MetricDefinition, x: &[f64], y: &[f64]) -> Result<SprayData> {
    check_point(metric, x, y)?;
    let n = metric.dim();
    let table = JetTable::new(2 * n, 4)?;
    let sj = spray_jets(metric, x, y, &table)?;
    let g = sj.g.map(|j| j.value());
    let g_inv = linalg::inverse(&g)?;
    let mut dxdy = Vec::with_capacity(n * n * n);
    let mut dydy = Vec::with_capacity(n * n * n);
    for gi in &sj.spray {
        for j in 0..n {
            for k in 0..n {
                dxdy.push(gi.d2(j, n + k));
                dydy.push(gi.d2(n + j, n + k));
            }
        }
    }
    Ok(SprayData {
        dim: n,
        y: y.to_vec(),
        g,
        g_inv,
        spray: sj.spray.iter().map(|j| j.value()).collect(),
        dx: Mat::from_fn(n, |i, k| sj.spray[i].d1(k)),
        dy: Mat::from_fn(n, |i, k| sj.spray[i].d1(n + k)),
        dxdy,
        dydy,
    })
}

/// Spray coefficients alone, from an order-2 pass.
pub fn geodesic_coefficients(metric: &MetricDefinition, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    check_point(metric, x, y)?;
    let n = metric.dim();
    let table = JetTable::new(2 * n, 2)?;
    let sj = spray_jets(metric, x, y, &table)?;
    Ok(sj.spray.iter().map(|j| j.value()).collect())
}

/// `R^i_k = 2G^i_{x^k} − G^i_{x^j y^k} y^j + 2G^j G^i_{y^j y^k} − G^i_{y^j} G^j_{y^k}`.
pub fn riemann_curvature(sd: &SprayData) -> Mat<f64> {
    let n = sd.dim;
    Mat::from_fn(n, |i, k| {
        let mut r = 2.0 * sd.dx[(i, k)];
        for j in 0..n {
            r -= sd.dxdy(i, j, k) * sd.y[j];
            r += 2.0 * sd.spray[j] * sd.dydy(i, j, k);
            r -= sd.dy[(i, j)] * sd.dy[(j, k)];
        }
        r
    })
}

/// `Ric = R^m_m`.
pub fn ricci_def(sd: &SprayData) -> f64 {
    let r = riemann_curvature(sd);
    (0..sd.dim).map(|m| r[(m, m)]).sum()
}

/// Output of the order-6 pass.
#[derive(Clone, Debug)]
pub struct RicciTensorDef {
    pub ricci: f64,
    /// `Ric_ij = ½ ∂²Ric/∂y^i∂y^j`.
    pub tensor: Mat<f64>,
    pub g: Mat<f64>,
    /// Numeric inverse of `g`.
    pub g_inv: Mat<f64>,
    /// `g^{ij} Ric_ij`.
    pub scalar: f64,
    /// Table actually used.
    pub path: JetPath,
}

fn resolve(path: JetPath, n: usize) -> Result<JetPath> {
    Ok(match path {
        JetPath::Budget(limit) => {
            if JetTable::new(2 * n, 6)?.len() <= limit {
                JetPath::Full
            } else {
                JetPath::Capped
            }
        }
        p => p,
    })
}

pub fn ricci_tensor_def(metric: &MetricDefinition, x: &[f64], y: &[f64]) -> Result<RicciTensorDef> {
    ricci_tensor_def_with(metric, x, y, JetPath::default())
}

pub fn ricci_tensor_def_with(metric: &MetricDefinition, x: &[f64], y: &[f64], path: JetPath) -> Result<RicciTensorDef> {
    check_point(metric, x, y)?;
    let n = metric.dim();
    let path = resolve(path, n)?;
    let table = match path {
        JetPath::Capped => JetTable::with_cap(2 * n, 6, &(0..n).collect::<Vec<_>>(), 2)?,
        _ => JetTable::new(2 * n, 6)?,
    };
    let sj = spray_jets(metric, x, y, &table)?;
    let gs = &sj.spray;
    let gy: Vec<Vec<Jet>> = gs.iter().map(|g| (0..n).map(|j| g.diff(n + j)).collect()).collect();
    let mut ric = table.constant(0.0);
    for m in 0..n {
        ric = ric + gs[m].diff(m) * 2.0;
        for j in 0..n {
            ric = ric - gs[m].diff(j).diff(n + m) * sj.y[j].clone();
            ric = ric + gs[j].clone() * gy[m][j].diff(n + m) * 2.0;
            ric = ric - gy[m][j].clone() * gy[j][m].clone();
        }
    }
    let tensor = Mat::from_fn(n, |i, j| 0.5 * ric.d2(n + i, n + j));
    let g = sj.g.map(|j| j.value());
    let g_inv = linalg::inverse(&g)?;
    let mut scalar = 0.0;
    for i in 0..n {
        for j in 0..n {
            scalar += g_inv[(i, j)] * tensor[(i, j)];
        }
    }
    Ok(RicciTensorDef {
        ricci: ric.value(),
        tensor,
        g,
        g_inv,
        scalar,
        path,
    })
}

/// `r = g^{ij} Ric_ij` from the definitions alone.
pub fn scalar_curvature_def(metric: &MetricDefinition, x: &[f64], y: &[f64]) -> Result<f64> {
    ricci_tensor_def(metric, x, y).map(|r| r.scalar)
}

/// Volume of the Euclidean unit ball in `R^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    let h = n as f64 / 2.0;
    libm::pow(core::f64::consts::PI, h) / libm::tgamma(h + 1.0)
}

fn indicatrix_point(metric: &MetricDefinition, x: &[f64]) -> Result<(Mat<f64>, Vec<f64>)> {
    metric.validate_at(x)?;
    Ok((metric.alpha_matrix(x)?, metric.beta_vector(x)?))
}

/// `Vol{F(x,·) < 1} = (1/n)∮ F^{−n}` on the circle, by the trapezoid rule
/// with `nodes` equispaced angles. Only for `n = 2`.
pub fn indicatrix_volume_circle(metric: &MetricDefinition, x: &[f64], nodes: usize) -> Result<f64> {
    if metric.dim() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            got: metric.dim(),
        });
    }
    let (a, b) = indicatrix_point(metric, x)?;
    let h = 2.0 * core::f64::consts::PI / nodes as f64;
    let mut acc = 0.0;
    for k in 0..nodes {
        let t = h * k as f64;
        let f: f64 = finsler_from(&a, &b, &[libm::cos(t), libm::sin(t)]);
        acc += 1.0 / (f * f);
    }
    Ok(0.5 * acc * h)
}

/// Monte Carlo estimate of `Vol{F(x,·) < 1}` from about `samples` random
/// directions on the unit sphere.
///
/// For `n = 3` the sphere is stratified through the area-preserving cylinder
/// map into a `k × k` grid with one uniform point per cell (`k² ≥ samples`);
/// other dimensions use Gaussian directions in antithetic pairs `±u`.
pub fn indicatrix_volume_monte_carlo(metric: &MetricDefinition, x: &[f64], samples: usize, seed: u64) -> Result<f64> {
    let n = metric.dim();
    let (a, b) = indicatrix_point(metric, x)?;
    let mut rng = SplitMix64::new(seed);
    let pow = -(n as f64);
    let sphere_area = n as f64 * unit_ball_volume(n);
    if n == 3 {
        let k = libm::ceil(libm::sqrt(samples.max(1) as f64)) as usize;
        let mut acc = 0.0;
        for i in 0..k {
            for j in 0..k {
                let z = -1.0 + 2.0 * (i as f64 + rng.next_f64()) / k as f64;
                let phi = 2.0 * core::f64::consts::PI * (j as f64 + rng.next_f64()) / k as f64;
                let r = libm::sqrt((1.0 - z * z).max(0.0));
                let f: f64 = finsler_from(&a, &b, &[r * libm::cos(phi), r * libm::sin(phi), z]);
                acc += libm::pow(f, pow);
            }
        }
        return Ok(sphere_area * acc / (k * k) as f64 / n as f64);
    }
    let mut gauss = Vec::with_capacity(n + 1);
    let pairs = samples.div_ceil(2).max(1);
    let mut acc = 0.0;
    let mut u = alloc::vec![0.0; n];
    for _ in 0..pairs {
        gauss.clear();
        while gauss.len() < n {
            let r = libm::sqrt(-2.0 * libm::log(1.0 - rng.next_f64()));
            let t = 2.0 * core::f64::consts::PI * rng.next_f64();
            gauss.push(r * libm::cos(t));
            gauss.push(r * libm::sin(t));
        }
        let norm = libm::sqrt(gauss[..n].iter().map(|g| g * g).sum::<f64>());
        for i in 0..n {
            u[i] = gauss[i] / norm;
        }
        let fp: f64 = finsler_from(&a, &b, &u);
        for ui in u.iter_mut() {
            *ui = -*ui;
        }
        let fm: f64 = finsler_from(&a, &b, &u);
        acc += 0.5 * (libm::pow(fp, pow) + libm::pow(fm, pow));
    }
    Ok(sphere_area * acc / pairs as f64 / n as f64)
}

/// `σ_BH = Vol(Bⁿ) / Vol{F < 1}` given a quadrature volume.
pub fn sigma_bh_from_volume(n: usize, volume: f64) -> f64 {
    unit_ball_volume(n) / volume
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{builtin_metric, BuiltinParams};
    use crate::riemann::alpha_at;
    use crate::testutil::{rel_err, Lcg};
    use alloc::vec;

    fn builtin(name: &str, n: usize) -> MetricDefinition {
        builtin_metric(name, &BuiltinParams { dim: n, ..Default::default() }).unwrap()
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

    fn dot(u: &[f64], v: &[f64]) -> f64 {
        u.iter().zip(v).map(|(a, b)| a * b).sum()
    }

    #[test]
    fn minkowski_is_flat() {
        let m = builtin_metric(
            "minkowski_randers",
            &BuiltinParams {
                dim: 2,
                b: Some(vec![0.3, -0.1]),
                ..Default::default()
            },
        )
        .unwrap();
        let sd = spray(&m, &[0.2, 0.1], &[1.0, 0.5]).unwrap();
        assert!(sd.spray.iter().all(|g| g.abs() < 1e-15));
        assert!(sd.dx.max_abs() < 1e-15 && sd.dy.max_abs() < 1e-15);
        assert!(riemann_curvature(&sd).max_abs() < 1e-15);
        let rt = ricci_tensor_def(&m, &[0.2, 0.1], &[1.0, 0.5]).unwrap();
        assert!(rt.ricci.abs() < 1e-14 && rt.scalar.abs() < 1e-13);
    }

    #[test]
    fn riemannian_spray_is_christoffel_contraction() {
        let m = builtin("sphere_alpha", 3);
        let x = [0.3, -0.2, 0.5];
        let y = [0.4, 1.0, -0.7];
        let sd = spray(&m, &x, &y).unwrap();
        let a = alpha_at(&m, &x).unwrap();
        for i in 0..3 {
            let mut want = 0.0;
            for j in 0..3 {
                for k in 0..3 {
                    want += 0.5 * a.gamma(i, j, k) * y[j] * y[k];
                }
            }
            assert!((sd.spray[i] - want).abs() < 1e-10);
        }
        assert_eq!(geodesic_coefficients(&m, &x, &y).unwrap().len(), 3);
        let g2 = geodesic_coefficients(&m, &x, &y).unwrap();
        for i in 0..3 {
            assert!((g2[i] - sd.spray[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn homogeneity() {
        let m = example(2);
        let x = [0.3, 0.2];
        let y = [0.6, -0.8];
        let y2 = [1.2, -1.6];
        let (s1, s2) = (spray(&m, &x, &y).unwrap(), spray(&m, &x, &y2).unwrap());
        for i in 0..2 {
            assert!((s2.spray[i] - 4.0 * s1.spray[i]).abs() < 1e-10 * (1.0 + s1.spray[i].abs()));
        }
        let (r1, r2) = (riemann_curvature(&s1), riemann_curvature(&s2));
        for i in 0..2 {
            for k in 0..2 {
                assert!((r2[(i, k)] - 4.0 * r1[(i, k)]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn sphere_ricci() {
        for n in [2, 3] {
            let m = builtin("sphere_alpha", n);
            let mut rng = Lcg::new(n as u64);
            let x = rng.ball(n, 1.0);
            let y = rng.vec(n, -1.0, 1.0);
            let sd = spray(&m, &x, &y).unwrap();
            let alpha2 = m.finsler(&x, &y).unwrap().powi(2);
            assert!(rel_err(ricci_def(&sd), (n - 1) as f64 * alpha2) < 1e-10);
            let r = scalar_curvature_def(&m, &x, &y).unwrap();
            let ra = alpha_at(&m, &x).unwrap().scalar;
            assert!((r - ra).abs() < 1e-7, "{r} vs {ra}");
        }
    }

    #[test]
    fn funk_constant_curvature() {
        for n in [2, 3] {
            let m = builtin("funk", n);
            let mut rng = Lcg::new(10 + n as u64);
            for _ in 0..2 {
                let x = rng.ball(n, 0.6);
                let y = rng.vec(n, -1.0, 1.0);
                let rt = ricci_tensor_def(&m, &x, &y).unwrap();
                let f = m.finsler(&x, &y).unwrap();
                let nn = n as f64;
                assert!(rel_err(rt.ricci, -(nn - 1.0) * f * f / 4.0) < 1e-6);
                assert!(rel_err(rt.scalar, -nn * (nn - 1.0) / 4.0) < 1e-6, "{}", rt.scalar);
            }
        }
    }

    #[test]
    fn example_scalar_curvature() {
        for n in [2, 3] {
            let m = example(n);
            let mut rng = Lcg::new(20 + n as u64);
            let mut a = vec![0.0; n];
            a[0] = 1.0;
            let x = rng.ball(n, 0.7);
            let y = rng.vec(n, -1.0, 1.0);
            let nn = n as f64;
            let f = m.finsler(&x, &y).unwrap();
            let theta = 3.0 * (nn + 1.0) * dot(&a, &y) / (2.0 * nn);
            let mu = 3.0 * dot(&a, &x).powi(2) - 2.0 * dot(&a, &a) * dot(&x, &x);
            let want = nn * (nn - 1.0) * (theta / f + mu);
            let rt = ricci_tensor_def(&m, &x, &y).unwrap();
            assert!(rel_err(rt.scalar, want) < 1e-6, "n={n}: {} vs {want}", rt.scalar);
            let ric = (nn - 1.0) * (3.0 * dot(&a, &y) / f + mu) * f * f;
            assert!(rel_err(rt.ricci, ric) < 1e-6);
        }
    }

    #[test]
    fn ricci_tensor_is_consistent() {
        let m = example(3);
        let x = [0.2, -0.3, 0.1];
        let y = [0.5, 0.9, -0.4];
        let rt = ricci_tensor_def(&m, &x, &y).unwrap();
        assert_eq!(rt.path, JetPath::Capped);
        let mut q = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                q += rt.tensor[(i, j)] * y[i] * y[j];
            }
        }
        assert!(rel_err(q, rt.ricci) < 1e-8);
        assert!(rt.g.mul(&rt.g_inv).max_abs_diff(&Mat::identity(3)) < 1e-12);
        let sd = spray(&m, &x, &y).unwrap();
        assert!(rel_err(ricci_def(&sd), rt.ricci) < 1e-10);
    }

    #[test]
    fn full_and_capped_tables_agree() {
        let mut rng = Lcg::new(5);
        for m in [example(2), builtin("funk", 2)] {
            let x = rng.ball(2, 0.5);
            let y = rng.vec(2, -1.0, 1.0);
            let full = ricci_tensor_def_with(&m, &x, &y, JetPath::Full).unwrap();
            let capped = ricci_tensor_def_with(&m, &x, &y, JetPath::Capped).unwrap();
            assert_eq!(full.path, JetPath::Full);
            assert!(full.tensor.max_abs_diff(&capped.tensor) < 1e-8);
            assert!((full.scalar - capped.scalar).abs() < 1e-8);
        }
    }

    #[test]
    fn rejects_bad_points() {
        let m = builtin("funk", 2);
        assert_eq!(spray(&m, &[0.1, 0.1], &[0.0, 0.0]).unwrap_err(), Error::DegenerateDirection);
        assert!(spray(&m, &[0.99, 0.2], &[1.0, 0.0]).is_err());
        assert!(matches!(spray(&m, &[0.1], &[1.0, 0.0]), Err(Error::Dimension { .. })));
    }

    #[test]
    fn quadrature_volume_matches_closed_sigma() {
        use crate::randers::sigma_bh;
        use crate::riemann::geometry_at;
        let m = builtin_metric(
            "minkowski_randers",
            &BuiltinParams {
                dim: 2,
                b: Some(vec![0.3, 0.0]),
                ..Default::default()
            },
        )
        .unwrap();
        let v = indicatrix_volume_circle(&m, &[0.0, 0.0], 2048).unwrap();
        assert!(rel_err(sigma_bh_from_volume(2, v), libm::pow(0.91, 1.5)) < 1e-12);

        let m = example(2);
        let x = [0.3, -0.4];
        let (al, be) = geometry_at(&m, &x).unwrap();
        let v = indicatrix_volume_circle(&m, &x, 2048).unwrap();
        assert!(rel_err(sigma_bh_from_volume(2, v), sigma_bh(&al, &be).unwrap()) < 1e-10);

        let m = example(3);
        let x = [0.3, -0.4, 0.2];
        let (al, be) = geometry_at(&m, &x).unwrap();
        let v = indicatrix_volume_monte_carlo(&m, &x, 200_000, 1).unwrap();
        assert!(rel_err(sigma_bh_from_volume(3, v), sigma_bh(&al, &be).unwrap()) < 1e-4);
        assert_ne!(v, indicatrix_volume_monte_carlo(&m, &x, 200_000, 2).unwrap());

        let m = builtin("funk", 4);
        let x = [0.1, -0.2, 0.3, 0.0];
        let (al, be) = geometry_at(&m, &x).unwrap();
        let v = indicatrix_volume_monte_carlo(&m, &x, 200_000, 1).unwrap();
        assert!(rel_err(sigma_bh_from_volume(4, v), sigma_bh(&al, &be).unwrap()) < 1e-2);
    }
}
