//! Homogeneous polynomials in `y`: coefficient extraction from black-box
//! evaluators, products, and division by a quadratic form.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg;
use crate::metric::MetricDefinition;
use crate::riemann::{contract_at, geometry_at, AlphaData, BetaInvariants};
use crate::terms::{eval_table, terms, eval_terms, Symbols, Table, Variant};
use crate::{Error, Result};

/// All exponent vectors of total degree `d` in `n` variables, descending
/// lexicographic (`y1^d` first).
pub fn monomials(n: usize, d: u32) -> Vec<Vec<u8>> {
    fn rec(n: usize, left: u32, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if cur.len() + 1 == n {
            cur.push(left as u8);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for e in (0..=left).rev() {
            cur.push(e as u8);
            rec(n, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(n, d, &mut Vec::with_capacity(n), &mut out);
    }
    out
}

fn monomial_value(e: &[u8], y: &[f64]) -> f64 {
    e.iter().zip(y).map(|(&k, &v)| libm::pow(v, k as f64)).product()
}

/// Homogeneous polynomial of degree `d` in `n` variables, stored densely in
/// the order of [`monomials`].
#[derive(Clone, Debug, PartialEq)]
pub struct HomPoly {
    n: usize,
    d: u32,
    exps: Vec<Vec<u8>>,
    coeffs: Vec<f64>,
}

impl HomPoly {
    pub fn zero(n: usize, d: u32) -> Self {
        let exps = monomials(n, d);
        let coeffs = vec![0.0; exps.len()];
        HomPoly { n, d, exps, coeffs }
    }

    /// Builds from `(exponents, coefficient)` pairs; repeated exponents add up.
    pub fn from_terms<'a>(n: usize, d: u32, terms: impl IntoIterator<Item = (&'a [u8], f64)>) -> Result<Self> {
        let mut p = HomPoly::zero(n, d);
        for (e, c) in terms {
            let i = p.index_of(e).ok_or(Error::NotHomogeneous("term"))?;
            p.coeffs[i] += c;
        }
        Ok(p)
    }

    /// Quadratic form `y^T m y` from a row-major symmetric matrix.
    pub fn quadratic(n: usize, m: impl Fn(usize, usize) -> f64) -> Self {
        let mut p = HomPoly::zero(n, 2);
        for i in 0..n {
            for j in 0..n {
                let mut e = vec![0u8; n];
                e[i] += 1;
                e[j] += 1;
                let k = p.index_of(&e).unwrap();
                p.coeffs[k] += m(i, j);
            }
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn exponents(&self) -> &[Vec<u8>] {
        &self.exps
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn index_of(&self, e: &[u8]) -> Option<usize> {
        if e.len() != self.n || e.iter().map(|&k| k as u32).sum::<u32>() != self.d {
            return None;
        }
        self.exps.iter().position(|x| x == e)
    }

    pub fn coeff(&self, e: &[u8]) -> f64 {
        self.index_of(e).map_or(0.0, |i| self.coeffs[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[u8], f64)> {
        self.exps.iter().map(|e| e.as_slice()).zip(self.coeffs.iter().copied())
    }

    pub fn eval(&self, y: &[f64]) -> f64 {
        self.iter().map(|(e, c)| c * monomial_value(e, y)).sum()
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn mul(&self, other: &HomPoly) -> HomPoly {
        assert_eq!(self.n, other.n);
        let mut out = HomPoly::zero(self.n, self.d + other.d);
        for (e1, c1) in self.iter() {
            if c1 == 0.0 {
                continue;
            }
            for (e2, c2) in other.iter() {
                let e: Vec<u8> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                let k = out.index_of(&e).unwrap();
                out.coeffs[k] += c1 * c2;
            }
        }
        out
    }

    pub fn sub(&self, other: &HomPoly) -> HomPoly {
        assert_eq!((self.n, self.d), (other.n, other.d));
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a -= b;
        }
        out
    }
}

/// A polynomial recovered by [`extract`].
#[derive(Clone, Debug, PartialEq)]
pub struct Extraction {
    pub poly: HomPoly,
    /// Condition number of the (row-normalized) monomial system.
    pub condition: f64,
    /// Grid points used; more than the monomial count when the fallback
    /// least-squares grid was needed.
    pub points: usize,
}

/// Above this the square grid system is abandoned for the full grid.
pub const EXTRACT_CONDITION_LIMIT: f64 = 1e4;

/// Integer points of `{-d, …, d}^n` in lexicographic order, skipping 0.
fn grid(n: usize, d: u32) -> Vec<Vec<f64>> {
    let side = 2 * d as usize + 1;
    let total = side.pow(n as u32);
    let mut out = Vec::with_capacity(total);
    for mut k in 0..total {
        let mut p = vec![0.0; n];
        for slot in p.iter_mut().rev() {
            *slot = (k % side) as f64 - d as f64;
            k /= side;
        }
        if p.iter().any(|v| *v != 0.0) {
            out.push(p);
        }
    }
    out
}

fn normalized_row(exps: &[Vec<u8>], y: &[f64], d: u32) -> (Vec<f64>, f64) {
    let scale = libm::pow(libm::sqrt(y.iter().map(|v| v * v).sum()), d as f64);
    (exps.iter().map(|e| monomial_value(e, y) / scale).collect(), scale)
}

/// Recovers the coefficients of a homogeneous polynomial of degree `d` from
/// point evaluations.
///
/// Rows come from the integer grid, taken greedily in lexicographic order
/// whenever they raise the rank, and are normalized by `|y|^d`. If the
/// resulting square system has condition above [`EXTRACT_CONDITION_LIMIT`],
/// the whole grid is used in a least-squares fit instead.
pub fn extract<E>(mut f: E, n: usize, d: u32) -> Result<Extraction>
where
    E: FnMut(&[f64]) -> Result<f64>,
{
    let exps = monomials(n, d);
    let m = exps.len();
    let pts = grid(n, d.max(1));

    // homogeneity at λ = 2 on a few grid points
    let probes: Vec<&Vec<f64>> = pts.iter().step_by((pts.len() / 5).max(1)).take(5).collect();
    for y in &probes {
        let v1 = f(y)?;
        let y2: Vec<f64> = y.iter().map(|v| 2.0 * v).collect();
        let v2 = f(&y2)?;
        let expect = libm::pow(2.0, d as f64) * v1;
        if (v2 - expect).abs() > 1e-9 * (v2.abs() + expect.abs()).max(1e-300) && (v2 - expect).abs() > 1e-300 {
            return Err(Error::NotHomogeneous("evaluator"));
        }
    }

    // greedy rank-increasing selection with modified Gram-Schmidt
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut rows: Vec<(Vec<f64>, Vec<f64>)> = Vec::with_capacity(m);
    for y in &pts {
        if rows.len() == m {
            break;
        }
        let (row, _) = normalized_row(&exps, y, d);
        let mut v = row.clone();
        for q in &basis {
            let dot: f64 = v.iter().zip(q).map(|(a, b)| a * b).sum();
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= dot * qi;
            }
        }
        let nv = libm::sqrt(v.iter().map(|t| t * t).sum());
        let nr = libm::sqrt(row.iter().map(|t| t * t).sum());
        if nv > 1e-2 * nr {
            basis.push(v.iter().map(|t| t / nv).collect());
            rows.push((row, y.clone()));
        }
    }
    if rows.len() < m {
        return Err(Error::RankDeficient { rank: rows.len(), cols: m });
    }
    let solve = |sel: &[(Vec<f64>, Vec<f64>)], f: &mut E| -> Result<linalg::LeastSquares> {
        let mut a = Vec::with_capacity(sel.len() * m);
        let mut b = Vec::with_capacity(sel.len());
        for (row, y) in sel {
            let (_, scale) = normalized_row(&exps, y, d);
            a.extend_from_slice(row);
            b.push(f(y)? / scale);
        }
        linalg::least_squares(sel.len(), m, &a, &b)
    };
    let mut ls = solve(&rows, &mut f)?;
    let mut used = rows.len();
    if ls.condition > EXTRACT_CONDITION_LIMIT {
        let all: Vec<(Vec<f64>, Vec<f64>)> = pts.iter().map(|y| (normalized_row(&exps, y, d).0, y.clone())).collect();
        ls = solve(&all, &mut f)?;
        used = all.len();
        if ls.condition > EXTRACT_CONDITION_LIMIT {
            return Err(Error::IllConditioned(ls.condition));
        }
    }
    Ok(Extraction {
        poly: HomPoly { n, d, exps, coeffs: ls.solution },
        condition: ls.condition,
        points: used,
    })
}

/// Outcome of [`divide_by_quadratic`].
#[derive(Clone, Debug, PartialEq)]
pub struct DivisionResult {
    pub quotient: HomPoly,
    /// Max-abs coefficient of `P − Q·R`.
    pub residual: f64,
    /// Max-abs coefficient of `P`.
    pub scale: f64,
    pub tol: f64,
    pub divisible: bool,
}

impl DivisionResult {
    pub fn relative_residual(&self) -> f64 {
        self.residual / self.scale.max(1e-300)
    }
}

pub const DIVISION_TOL: f64 = 1e-8;

/// Best quotient `R` of `P` by the quadratic `Q` in the least-squares sense
/// over the coefficients of `P − Q·R`; divisible when the max-abs residual is
/// below `tol · max|P|`.
pub fn divide_by_quadratic(p: &HomPoly, q: &HomPoly, tol: f64) -> Result<DivisionResult> {
    if q.degree() != 2 || q.nvars() != p.nvars() {
        return Err(Error::Dimension {
            expected: 2,
            got: q.degree() as usize,
        });
    }
    if p.degree() < 2 {
        return Err(Error::NotHomogeneous("dividend of degree below 2"));
    }
    let n = p.nvars();
    let qd = p.degree() - 2;
    let basis = monomials(n, qd);
    let (rows, cols) = (p.coeffs.len(), basis.len());
    let mut a = vec![0.0; rows * cols];
    for (c, e) in basis.iter().enumerate() {
        let mono = HomPoly::from_terms(n, qd, [(e.as_slice(), 1.0)])?;
        let prod = q.mul(&mono);
        for r in 0..rows {
            a[r * cols + c] = prod.coeffs[r];
        }
    }
    let ls = linalg::least_squares(rows, cols, &a, &p.coeffs)?;
    let quotient = HomPoly {
        n,
        d: qd,
        exps: basis,
        coeffs: ls.solution,
    };
    let residual = p.sub(&q.mul(&quotient)).max_abs();
    let scale = p.max_abs();
    Ok(DivisionResult {
        quotient,
        residual,
        scale,
        tol,
        divisible: residual < tol * scale,
    })
}

/// `α² − β²` at the point: the quadratic form of `a_ij − b_i b_j`.
pub fn alpha2_minus_beta2(alpha: &AlphaData, beta: &BetaInvariants) -> HomPoly {
    HomPoly::quadratic(alpha.dim, |i, j| alpha.a[(i, j)] - beta.b[i] * beta.b[j])
}

/// `Γ₁` (degree 5) and `Γ₂` (degree 4) at `x` as polynomials in `y`.
pub fn gamma_polys(metric: &MetricDefinition, x: &[f64], variant: Variant) -> Result<(Extraction, Extraction)> {
    let (alpha, beta) = geometry_at(metric, x)?;
    let n = alpha.dim;
    let table = |t: Table| {
        let (alpha, beta) = (&alpha, &beta);
        move |y: &[f64]| -> Result<f64> {
            let ctx = contract_at(alpha, beta, y)?;
            Ok(eval_table(t, variant, &Symbols::new(alpha, beta, &ctx)))
        }
    };
    Ok((extract(table(Table::Gamma1), n, 5)?, extract(table(Table::Gamma2), n, 4)?))
}

/// Coefficient `k` of the remainder `−k β e_00²` of `Γ₂β − Γ₁` modulo
/// `α² − β²`. The published value `18(1 − b²)` is missing the factor
/// `n − 1`; the two agree at `n = 2` only.
pub fn remainder_coefficient(n: usize, b2: f64, variant: Variant) -> f64 {
    match variant {
        Variant::Printed => 18.0 * (1.0 - b2),
        Variant::Corrected => 18.0 * (n as f64 - 1.0) * (1.0 - b2),
    }
}

/// Divisibility of `Γ₂β − Γ₁ + k β e_00²` by `α² − β²`.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaDivisibility {
    pub division: DivisionResult,
    /// Condition of the coefficient extraction.
    pub condition: f64,
}

/// Extracts `P = Γ₂β − Γ₁ + k β e_00²` as a degree-5 polynomial in `y` and
/// divides it by `α² − β²`. The quotient is the numerical `K_000`. Tables
/// and `k` (see [`remainder_coefficient`]) follow `variant`.
///
/// `mutate` scales one `Γ₁` term by the given factor before extraction.
pub fn check_gamma_divisibility(
    metric: &MetricDefinition,
    x: &[f64],
    variant: Variant,
    mutate: Option<(usize, f64)>,
) -> Result<GammaDivisibility> {
    let (ex, q) = gamma_dividend(metric, x, variant, mutate)?;
    Ok(GammaDivisibility {
        division: divide_by_quadratic(&ex.poly, &q, DIVISION_TOL)?,
        condition: ex.condition,
    })
}

fn gamma_dividend(
    metric: &MetricDefinition,
    x: &[f64],
    variant: Variant,
    mutate: Option<(usize, f64)>,
) -> Result<(Extraction, HomPoly)> {
    let (alpha, beta) = geometry_at(metric, x)?;
    let n = alpha.dim;
    let g1 = terms(Table::Gamma1, variant);
    let g2 = terms(Table::Gamma2, variant);
    let factor = mutate.map(|(i, s)| (i.min(g1.len() - 1), s));
    let k = remainder_coefficient(n, beta.b2, variant);
    let evaluator = |y: &[f64]| -> Result<f64> {
        let ctx = contract_at(&alpha, &beta, y)?;
        let s = Symbols::new(&alpha, &beta, &ctx);
        let mut v1 = eval_terms(&g1, &s);
        if let Some((i, f)) = factor {
            v1 += (f - 1.0) * g1[i].eval(&s);
        }
        let v2 = eval_terms(&g2, &s);
        Ok(v2 * ctx.beta - v1 + k * ctx.beta * ctx.e00 * ctx.e00)
    };
    Ok((extract(evaluator, n, 5)?, alpha2_minus_beta2(&alpha, &beta)))
}

/// Divisibility after scaling the largest monomial coefficient of the
/// extracted `Γ₁` polynomial by `factor`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientMutation {
    pub exponent: Vec<u8>,
    pub coefficient: f64,
    pub division: DivisionResult,
}

pub fn mutate_gamma1_coefficient(
    metric: &MetricDefinition,
    x: &[f64],
    variant: Variant,
    factor: f64,
) -> Result<CoefficientMutation> {
    let (ex, q) = gamma_dividend(metric, x, variant, None)?;
    let (g1, _) = gamma_polys(metric, x, variant)?;
    let (i, c) = g1
        .poly
        .coefficients()
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0f64), |best, (i, c)| if c.abs() > best.1.abs() { (i, c) } else { best });
    let exponent = g1.poly.exponents()[i].clone();
    // `P` carries `−Γ₁`.
    let mut p = ex.poly;
    p.coeffs[i] -= (factor - 1.0) * c;
    Ok(CoefficientMutation {
        exponent,
        coefficient: c,
        division: divide_by_quadratic(&p, &q, DIVISION_TOL)?,
    })
}

/// Index of the `Γ₁` term whose own polynomial in `y` leaves the largest
/// remainder on division by `α² − β²` at `x`; scaling that term is the
/// sharpest single-coefficient mutation of the divisibility check.
pub fn least_divisible_gamma1_term(metric: &MetricDefinition, x: &[f64], variant: Variant) -> Result<usize> {
    let (alpha, beta) = geometry_at(metric, x)?;
    let q = alpha2_minus_beta2(&alpha, &beta);
    let g1 = terms(Table::Gamma1, variant);
    let mut best = (0, -1.0);
    for (i, t) in g1.iter().enumerate() {
        let ex = extract(
            |y| {
                let ctx = contract_at(&alpha, &beta, y)?;
                Ok(t.eval(&Symbols::new(&alpha, &beta, &ctx)))
            },
            alpha.dim,
            5,
        )?;
        let r = divide_by_quadratic(&ex.poly, &q, DIVISION_TOL)?.residual;
        if r > best.1 {
            best = (i, r);
        }
    }
    Ok(best.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{builtin_metric, BuiltinParams};
    use crate::testutil::Lcg;

    fn poly(n: usize, d: u32, mut f: impl FnMut(&[u8]) -> f64) -> HomPoly {
        let exps = monomials(n, d);
        HomPoly::from_terms(n, d, exps.iter().map(|e| (e.as_slice(), f(e)))).unwrap()
    }

    #[test]
    fn monomial_counts_and_order() {
        assert_eq!(monomials(2, 3), vec![vec![3, 0], vec![2, 1], vec![1, 2], vec![0, 3]]);
        assert_eq!(monomials(3, 5).len(), 21);
        assert_eq!(monomials(3, 6).len(), 28);
    }

    #[test]
    fn extract_simple_cases() {
        let ex = extract(|y| Ok(y[0] * y[0] * y[1]), 2, 3).unwrap();
        let want = HomPoly::from_terms(2, 3, [(&[2u8, 1][..], 1.0)]).unwrap();
        assert!(ex.poly.sub(&want).max_abs() < 1e-13);
        let ex = extract(|y| Ok((y[0] + y[1]) * (y[0] + y[1])), 2, 2).unwrap();
        assert!((ex.poly.coeff(&[2, 0]) - 1.0).abs() < 1e-13);
        assert!((ex.poly.coeff(&[1, 1]) - 2.0).abs() < 1e-13);
        assert!((ex.poly.coeff(&[0, 2]) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn extract_rejects_wrong_degree() {
        let e = extract(|y| Ok(y[0] * y[0] * y[0]), 2, 2).unwrap_err();
        assert_eq!(e, Error::NotHomogeneous("evaluator"));
    }

    #[test]
    fn extract_inverts_evaluation() {
        let mut rng = Lcg::new(17);
        for _ in 0..100 {
            let n = 1 + (rng.uniform(0.0, 3.0) as usize).min(2);
            let d = (rng.uniform(0.0, 7.0) as u32).min(6);
            let p = poly(n, d, |_| rng.uniform(-1.0, 1.0));
            let ex = extract(|y| Ok(p.eval(y)), n, d).unwrap();
            assert!(ex.poly.sub(&p).max_abs() < 1e-10, "n={n} d={d} cond {:e}", ex.condition);
        }
    }

    #[test]
    fn division_examples() {
        let q = HomPoly::quadratic(2, |i, j| if i == j { 1.0 } else { 0.0 });
        let r = HomPoly::from_terms(2, 3, [(&[3u8, 0][..], 1.0), (&[1u8, 2][..], -2.0)]).unwrap();
        let res = divide_by_quadratic(&q.mul(&r), &q, DIVISION_TOL).unwrap();
        assert!(res.divisible);
        assert!(res.quotient.sub(&r).max_abs() < 1e-13);

        let y15 = HomPoly::from_terms(2, 5, [(&[5u8, 0][..], 1.0)]).unwrap();
        let res = divide_by_quadratic(&y15, &q, DIVISION_TOL).unwrap();
        assert!(!res.divisible);
        assert!(res.relative_residual() > 1e-2);
    }

    #[test]
    fn division_recovers_random_quotients() {
        let mut rng = Lcg::new(23);
        let m = builtin_metric("example_1_1", &BuiltinParams { dim: 3, a: Some(vec![0.5, -0.3, 0.2]), ..Default::default() }).unwrap();
        let (alpha, beta) = geometry_at(&m, &[0.3, 0.1, -0.4]).unwrap();
        let q = alpha2_minus_beta2(&alpha, &beta);
        for d in 0..5 {
            let p = poly(3, d, |_| rng.uniform(-1.0, 1.0));
            let pq = p.mul(&q);
            let res = divide_by_quadratic(&pq, &q, DIVISION_TOL).unwrap();
            assert!(q.mul(&res.quotient).sub(&pq).max_abs() < 1e-10);
            assert!(res.divisible);
        }
    }

    #[test]
    fn alpha2_minus_beta2_is_positive_definite() {
        let m = builtin_metric("funk", &BuiltinParams { dim: 3, ..Default::default() }).unwrap();
        let (alpha, beta) = geometry_at(&m, &[0.5, -0.2, 0.3]).unwrap();
        let h = crate::linalg::Mat::from_fn(3, |i, j| alpha.a[(i, j)] - beta.b[i] * beta.b[j]);
        assert!(h.symmetric_eigenvalues()[0] > 0.0);
        let q = alpha2_minus_beta2(&alpha, &beta);
        let y = [0.3, -1.0, 0.7];
        let ctx = contract_at::<f64>(&alpha, &beta, &y).unwrap();
        assert!((q.eval(&y) - (ctx.alpha * ctx.alpha - ctx.beta * ctx.beta)).abs() < 1e-13);
    }

    #[test]
    fn gamma_polys_reproduce_tables() {
        let m = builtin_metric("example_1_1", &BuiltinParams { dim: 2, a: Some(vec![1.0, 0.0]), ..Default::default() }).unwrap();
        let x = [0.3, 0.4];
        let (g1, g2) = gamma_polys(&m, &x, Variant::Corrected).unwrap();
        let (alpha, beta) = geometry_at(&m, &x).unwrap();
        let mut rng = Lcg::new(4);
        for _ in 0..20 {
            let y = rng.vec(2, -1.0, 1.0);
            let ctx = contract_at(&alpha, &beta, &y).unwrap();
            let s = Symbols::new(&alpha, &beta, &ctx);
            let want1 = eval_table(Table::Gamma1, Variant::Corrected, &s);
            let want2 = eval_table(Table::Gamma2, Variant::Corrected, &s);
            assert!((g1.poly.eval(&y) - want1).abs() <= 1e-9 * want1.abs().max(1.0));
            assert!((g2.poly.eval(&y) - want2).abs() <= 1e-9 * want2.abs().max(1.0));
        }
    }

    #[test]
    fn example_gamma_combination_is_divisible() {
        let m = builtin_metric("example_1_1", &BuiltinParams { dim: 2, a: Some(vec![1.0, 0.0]), ..Default::default() }).unwrap();
        let r = check_gamma_divisibility(&m, &[0.3, -0.2], Variant::Corrected, None).unwrap();
        assert!(r.division.divisible, "{:e}", r.division.relative_residual());
    }

    #[test]
    fn random_gamma_combination_is_divisible_and_mutation_breaks_it() {
        let mut rng = crate::sampling::SplitMix64::new(12);
        let m = crate::metric::random_polynomial_metric(3, &mut rng).unwrap();
        let x = crate::metric::random_admissible_point(&m, &mut rng, 0.4, 50).unwrap();
        let r = check_gamma_divisibility(&m, &x, Variant::Corrected, None).unwrap();
        assert!(r.division.divisible, "{:e}", r.division.relative_residual());
        let i = least_divisible_gamma1_term(&m, &x, Variant::Corrected).unwrap();
        let bad = check_gamma_divisibility(&m, &x, Variant::Corrected, Some((i, 1.01))).unwrap();
        assert!(bad.division.relative_residual() > 1e-4, "{:e}", bad.division.relative_residual());
    }

    #[test]
    fn coefficient_mutation_breaks_divisibility() {
        let mut rng = crate::sampling::SplitMix64::new(5);
        for n in [2, 3] {
            let m = crate::metric::random_polynomial_metric(n, &mut rng).unwrap();
            let x = crate::metric::random_admissible_point(&m, &mut rng, 0.4, 50).unwrap();
            let same = mutate_gamma1_coefficient(&m, &x, Variant::Corrected, 1.0).unwrap();
            assert!(same.division.divisible);
            let bad = mutate_gamma1_coefficient(&m, &x, Variant::Corrected, 1.01).unwrap();
            assert_eq!(bad.exponent.iter().map(|&e| e as u32).sum::<u32>(), 5);
            assert!(bad.division.relative_residual() > 1e-4, "{:e}", bad.division.relative_residual());
        }
    }

    #[test]
    fn published_remainder_fails_beyond_two_dimensions() {
        let mut rng = crate::sampling::SplitMix64::new(12);
        let m = crate::metric::random_polynomial_metric(3, &mut rng).unwrap();
        let x = crate::metric::random_admissible_point(&m, &mut rng, 0.4, 50).unwrap();
        let r = check_gamma_divisibility(&m, &x, Variant::Printed, None).unwrap();
        assert!(r.division.relative_residual() > 1e-3);
    }
}
