//! Truncated multivariate Taylor jets.
//!
//! A [`Jet`] stores the Taylor coefficients `f^(α)(p) / α!` of a scalar
//! function for every multi-index `α` in a downward-closed index set described
//! by a [`JetTable`]: all `α` with `|α| <= order`, optionally with the total
//! degree in a marked group of variables bounded by a smaller cap. Products are
//! convolutions truncated to that set, so arithmetic on jets is exact
//! truncated-Taylor arithmetic.
//!
//! Differentiating a jet (see [`Jet::diff`]) loses the top layer of
//! coefficients. Each jet therefore carries a [`Validity`] describing which
//! coefficients are still exact; reads outside it return `None`.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use crate::{Error, Result};

/// Highest supported truncation order.
pub const MAX_ORDER: u8 = 6;

const NONE: u32 = u32::MAX;

/// Scalar arithmetic shared by plain reals and jets.
///
/// Expression evaluation and every curvature formula are written once against
/// this trait.
pub trait Scalar:
    Clone
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    /// The order-0 value.
    fn value(&self) -> f64;
    /// A constant living in the same space as `self`.
    fn lift(&self, c: f64) -> Self;
    fn recip(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;

    fn zero_like(&self) -> Self {
        self.lift(0.0)
    }

    fn powi(&self, k: u32) -> Self {
        let mut acc = self.lift(1.0);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
}

impl Scalar for f64 {
    fn value(&self) -> f64 {
        *self
    }
    fn lift(&self, c: f64) -> Self {
        c
    }
    fn recip(&self) -> Self {
        1.0 / *self
    }
    fn sqrt(&self) -> Self {
        libm::sqrt(*self)
    }
    fn exp(&self) -> Self {
        libm::exp(*self)
    }
    fn ln(&self) -> Self {
        libm::log(*self)
    }
    fn sin(&self) -> Self {
        libm::sin(*self)
    }
    fn cos(&self) -> Self {
        libm::cos(*self)
    }
}

/// Index set and multiplication tables for a family of jets.
#[derive(Debug)]
pub struct JetTable {
    nvars: usize,
    order: u8,
    capped: Vec<bool>,
    cap: u8,
    /// Flattened multi-indices, `nvars` entries per monomial, graded order.
    monomials: Vec<u8>,
    degrees: Vec<u8>,
    capped_degrees: Vec<u8>,
    factorials: Vec<f64>,
    lookup: BTreeMap<u64, u32>,
    prod_start: Vec<u32>,
    prod: Vec<(u32, u32)>,
    raise: Vec<u32>,
}

fn key_of(alpha: &[u8]) -> u64 {
    alpha
        .iter()
        .enumerate()
        .fold(0u64, |k, (v, &a)| k | ((a as u64) << (3 * v)))
}

fn factorial(k: u8) -> f64 {
    (1..=k as u32).fold(1.0, |acc, i| acc * i as f64)
}

impl JetTable {
    /// All multi-indices of total order `<= order` in `nvars` variables.
    pub fn new(nvars: usize, order: u8) -> Result<Arc<Self>> {
        Self::with_cap(nvars, order, &[], order)
    }

    /// Like [`JetTable::new`], additionally bounding the total degree in the
    /// variables listed in `capped_vars` by `cap`.
    pub fn with_cap(nvars: usize, order: u8, capped_vars: &[usize], cap: u8) -> Result<Arc<Self>> {
        if order > MAX_ORDER {
            return Err(Error::JetOrder(order));
        }
        if nvars == 0 || nvars > 21 {
            return Err(Error::InvalidParams("jet variable count must be in 1..=21"));
        }
        let mut capped = vec![false; nvars];
        for &v in capped_vars {
            if v >= nvars {
                return Err(Error::InvalidParams("capped variable out of range"));
            }
            capped[v] = true;
        }
        let cap = cap.min(order);

        let mut monomials = Vec::new();
        let mut degrees = Vec::new();
        let mut capped_degrees = Vec::new();
        let mut current = vec![0u8; nvars];
        for d in 0..=order {
            enumerate_degree(&mut current, 0, d, &mut |alpha| {
                let cd: u8 = alpha
                    .iter()
                    .zip(&capped)
                    .filter(|(_, &c)| c)
                    .map(|(&a, _)| a)
                    .sum();
                if cd <= cap {
                    monomials.extend_from_slice(alpha);
                    degrees.push(d);
                    capped_degrees.push(cd);
                }
            });
        }
        let len = degrees.len();
        let mut lookup = BTreeMap::new();
        let mut factorials = Vec::with_capacity(len);
        for i in 0..len {
            let alpha = &monomials[i * nvars..(i + 1) * nvars];
            lookup.insert(key_of(alpha), i as u32);
            factorials.push(alpha.iter().map(|&a| factorial(a)).product());
        }

        // Monomials are sorted by degree, so partners of degree <= order - d
        // form a prefix.
        let mut prefix_end = vec![0usize; order as usize + 1];
        for (d, end) in prefix_end.iter_mut().enumerate() {
            *end = degrees.iter().take_while(|&&g| g as usize <= d).count();
        }
        let mut prod_start = Vec::with_capacity(len + 1);
        let mut prod = Vec::new();
        let mut sum = vec![0u8; nvars];
        for i in 0..len {
            prod_start.push(prod.len() as u32);
            let ai = &monomials[i * nvars..(i + 1) * nvars];
            let room = (order - degrees[i]) as usize;
            for j in 0..prefix_end[room] {
                if capped_degrees[i] + capped_degrees[j] > cap {
                    continue;
                }
                let aj = &monomials[j * nvars..(j + 1) * nvars];
                for v in 0..nvars {
                    sum[v] = ai[v] + aj[v];
                }
                if let Some(&k) = lookup.get(&key_of(&sum)) {
                    prod.push((j as u32, k));
                }
            }
        }
        prod_start.push(prod.len() as u32);

        let mut raise = vec![NONE; len * nvars];
        for i in 0..len {
            let alpha = &monomials[i * nvars..(i + 1) * nvars];
            sum.copy_from_slice(alpha);
            for v in 0..nvars {
                sum[v] += 1;
                if let Some(&k) = lookup.get(&key_of(&sum)) {
                    raise[i * nvars + v] = k;
                }
                sum[v] -= 1;
            }
        }

        Ok(Arc::new(JetTable {
            nvars,
            order,
            capped,
            cap,
            monomials,
            degrees,
            capped_degrees,
            factorials,
            lookup,
            prod_start,
            prod,
            raise,
        }))
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> u8 {
        self.order
    }

    /// Number of stored coefficients per jet.
    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    pub fn multi_index(&self, i: usize) -> &[u8] {
        &self.monomials[i * self.nvars..(i + 1) * self.nvars]
    }

    pub fn index_of(&self, alpha: &[u8]) -> Option<usize> {
        if alpha.len() != self.nvars || alpha.iter().any(|&a| a > MAX_ORDER) {
            return None;
        }
        self.lookup.get(&key_of(alpha)).map(|&k| k as usize)
    }

    fn full_validity(&self) -> Validity {
        Validity {
            total: self.order as i8,
            capped: self.cap as i8,
        }
    }

    fn covers(&self, valid: Validity, i: usize) -> bool {
        (self.degrees[i] as i8) <= valid.total && (self.capped_degrees[i] as i8) <= valid.capped
    }

    pub fn constant(self: &Arc<Self>, c: f64) -> Jet {
        let mut coeffs = vec![0.0; self.len()];
        coeffs[0] = c;
        Jet {
            table: self.clone(),
            coeffs,
            valid: self.full_validity(),
        }
    }

    /// The coordinate function `u_var` expanded at `value`.
    pub fn variable(self: &Arc<Self>, value: f64, var: usize) -> Jet {
        let mut jet = self.constant(value);
        if self.order > 0 && (!self.capped[var] || self.cap > 0) {
            let mut e = vec![0u8; self.nvars];
            e[var] = 1;
            if let Some(k) = self.index_of(&e) {
                jet.coeffs[k] = 1.0;
            }
        }
        jet
    }
}

fn enumerate_degree(current: &mut [u8], pos: usize, remaining: u8, f: &mut dyn FnMut(&[u8])) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        f(current);
        current[pos] = 0;
        return;
    }
    for a in (0..=remaining).rev() {
        current[pos] = a;
        enumerate_degree(current, pos + 1, remaining - a, f);
    }
    current[pos] = 0;
}

/// Seeds jets for `point`: coordinate `i` is a variable when listed in
/// `active`, a constant otherwise.
pub fn seed(point: &[f64], active: &[usize], order: u8) -> Result<Vec<Jet>> {
    let table = JetTable::new(active.len().max(1), order)?;
    Ok(point
        .iter()
        .enumerate()
        .map(|(i, &p)| match active.iter().position(|&a| a == i) {
            Some(slot) => table.variable(p, slot),
            None => table.constant(p),
        })
        .collect())
}

/// The mixed partial `∂^α f(point)` with all coordinates active.
pub fn partial<E>(
    f: impl FnOnce(&[Jet]) -> core::result::Result<Jet, E>,
    point: &[f64],
    alpha: &[u8],
) -> core::result::Result<f64, E>
where
    E: From<Error>,
{
    let order: u8 = alpha.iter().sum();
    if alpha.len() != point.len() {
        return Err(Error::InvalidParams("multi-index length differs from point dimension").into());
    }
    let active: Vec<usize> = (0..point.len()).collect();
    let jets = seed(point, &active, order)?;
    let out = f(&jets)?;
    out.derivative(alpha)
        .ok_or_else(|| Error::InvalidParams("derivative outside the jet's valid range").into())
}

/// Which coefficients of a jet are exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Validity {
    pub total: i8,
    pub capped: i8,
}

impl Validity {
    fn meet(self, other: Validity) -> Validity {
        Validity {
            total: self.total.min(other.total),
            capped: self.capped.min(other.capped),
        }
    }
}

#[derive(Clone)]
pub struct Jet {
    table: Arc<JetTable>,
    coeffs: Vec<f64>,
    valid: Validity,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("nvars", &self.table.nvars)
            .field("order", &self.table.order)
            .field("valid", &self.valid)
            .field("value", &self.coeffs[0])
            .finish()
    }
}

impl Jet {
    pub fn table(&self) -> &Arc<JetTable> {
        &self.table
    }

    pub fn validity(&self) -> Validity {
        self.valid
    }

    /// Raw Taylor coefficients in table order.
    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// Builds a jet from Taylor coefficients in table order.
    pub fn from_coefficients(table: &Arc<JetTable>, coeffs: Vec<f64>, valid: Validity) -> Jet {
        assert_eq!(coeffs.len(), table.len());
        Jet {
            table: table.clone(),
            coeffs,
            valid: valid.meet(table.full_validity()),
        }
    }

    /// Taylor coefficient at `alpha`, if stored and exact.
    pub fn coeff(&self, alpha: &[u8]) -> Option<f64> {
        let i = self.table.index_of(alpha)?;
        self.table.covers(self.valid, i).then(|| self.coeffs[i])
    }

    /// The partial derivative `∂^α f` at the expansion point.
    pub fn derivative(&self, alpha: &[u8]) -> Option<f64> {
        let i = self.table.index_of(alpha)?;
        self.table
            .covers(self.valid, i)
            .then(|| self.coeffs[i] * self.table.factorials[i])
    }

    /// First partial `∂f/∂u_var`.
    pub fn d1(&self, var: usize) -> f64 {
        let mut alpha = vec![0u8; self.table.nvars];
        alpha[var] = 1;
        self.derivative(&alpha).expect("first derivative outside valid range")
    }

    /// Second partial `∂²f/∂u_i∂u_j`.
    pub fn d2(&self, i: usize, j: usize) -> f64 {
        let mut alpha = vec![0u8; self.table.nvars];
        alpha[i] += 1;
        alpha[j] += 1;
        self.derivative(&alpha).expect("second derivative outside valid range")
    }

    /// The jet of `∂f/∂u_var`, valid one order lower.
    pub fn diff(&self, var: usize) -> Jet {
        let t = &self.table;
        let n = t.nvars;
        let mut out = vec![0.0; t.len()];
        for (i, o) in out.iter_mut().enumerate() {
            let up = t.raise[i * n + var];
            if up != NONE {
                let alpha_v = t.monomials[i * n + var] as f64;
                *o = (alpha_v + 1.0) * self.coeffs[up as usize];
            }
        }
        let mut valid = self.valid;
        valid.total -= 1;
        if t.capped[var] {
            valid.capped -= 1;
        }
        Jet {
            table: t.clone(),
            coeffs: out,
            valid,
        }
    }

    /// Applies a univariate function given its scaled derivatives
    /// `taylor[j] = φ^(j)(c) / j!` at `c = self.value()`.
    fn compose(&self, taylor: &[f64]) -> Jet {
        let mut h = self.clone();
        h.coeffs[0] = 0.0;
        let top = taylor.len() - 1;
        let mut acc = self.table.constant(taylor[top]);
        acc.valid = self.valid;
        for j in (0..top).rev() {
            acc = acc.mul_ref(&h);
            acc.coeffs[0] += taylor[j];
        }
        acc
    }

    fn taylor_len(&self) -> usize {
        self.table.order as usize + 1
    }

    fn check_same(&self, other: &Jet) {
        assert!(
            Arc::ptr_eq(&self.table, &other.table),
            "jets from different tables combined"
        );
    }

    fn mul_ref(&self, other: &Jet) -> Jet {
        self.check_same(other);
        let t = &self.table;
        let mut out = vec![0.0; t.len()];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let lo = t.prod_start[i] as usize;
            let hi = t.prod_start[i + 1] as usize;
            for &(j, k) in &t.prod[lo..hi] {
                out[k as usize] += a * other.coeffs[j as usize];
            }
        }
        Jet {
            table: t.clone(),
            coeffs: out,
            valid: self.valid.meet(other.valid),
        }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, rhs: Jet) -> Jet {
        self.check_same(&rhs);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
        self.valid = self.valid.meet(rhs.valid);
        self
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: Jet) -> Jet {
        self.check_same(&rhs);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
        self.valid = self.valid.meet(rhs.valid);
        self
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        self.mul_ref(&rhs)
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Jet) -> Jet {
        self.mul_ref(&rhs.recip())
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(mut self) -> Jet {
        for a in &mut self.coeffs {
            *a = -*a;
        }
        self
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.coeffs[0] += rhs;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: f64) -> Jet {
        self.coeffs[0] -= rhs;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(mut self, rhs: f64) -> Jet {
        for a in &mut self.coeffs {
            *a *= rhs;
        }
        self
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, rhs: f64) -> Jet {
        self * (1.0 / rhs)
    }
}

impl Scalar for Jet {
    fn value(&self) -> f64 {
        self.coeffs[0]
    }

    fn lift(&self, c: f64) -> Self {
        self.table.constant(c)
    }

    fn recip(&self) -> Self {
        let c = self.coeffs[0];
        let inv = 1.0 / c;
        let mut t = Vec::with_capacity(self.taylor_len());
        let mut term = inv;
        for _ in 0..self.taylor_len() {
            t.push(term);
            term *= -inv;
        }
        self.compose(&t)
    }

    fn sqrt(&self) -> Self {
        let c = self.coeffs[0];
        let root = libm::sqrt(c);
        // binom(1/2, j) c^(1/2 - j)
        let mut t = Vec::with_capacity(self.taylor_len());
        let mut binom = 1.0;
        let mut power = root;
        for j in 0..self.taylor_len() {
            t.push(binom * power);
            binom *= (0.5 - j as f64) / (j as f64 + 1.0);
            power /= c;
        }
        self.compose(&t)
    }

    fn exp(&self) -> Self {
        let e = libm::exp(self.coeffs[0]);
        let mut t = Vec::with_capacity(self.taylor_len());
        let mut fact = 1.0;
        for j in 0..self.taylor_len() {
            if j > 0 {
                fact *= j as f64;
            }
            t.push(e / fact);
        }
        self.compose(&t)
    }

    fn ln(&self) -> Self {
        let c = self.coeffs[0];
        let mut t = Vec::with_capacity(self.taylor_len());
        t.push(libm::log(c));
        let mut power = 1.0;
        for j in 1..self.taylor_len() {
            power /= c;
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            t.push(sign * power / j as f64);
        }
        self.compose(&t)
    }

    fn sin(&self) -> Self {
        let (s, c) = (libm::sin(self.coeffs[0]), libm::cos(self.coeffs[0]));
        self.compose(&trig_taylor([s, c, -s, -c], self.taylor_len()))
    }

    fn cos(&self) -> Self {
        let (s, c) = (libm::sin(self.coeffs[0]), libm::cos(self.coeffs[0]));
        self.compose(&trig_taylor([c, -s, -c, s], self.taylor_len()))
    }
}

fn trig_taylor(cycle: [f64; 4], len: usize) -> Vec<f64> {
    let mut fact = 1.0;
    (0..len)
        .map(|j| {
            if j > 0 {
                fact *= j as f64;
            }
            cycle[j % 4] / fact
        })
        .collect()
}
