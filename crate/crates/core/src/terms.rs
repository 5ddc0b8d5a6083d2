//! Coefficient/monomial tables for the degree-5 and degree-4 polynomials in
//! the closed scalar-curvature formula and in its `e`-substituted form.
//!
//! Every table is a flat list of terms `c(n, b²) · Π factors`, so that a
//! disagreement with a reference value can be localized by re-fitting single
//! coefficients. The tables reproduce the published formulas literally; the
//! patches that were found necessary live in [`CORRECTIONS`].

use alloc::vec::Vec;

use crate::linalg;
use crate::riemann::{AlphaData, BetaInvariants, EvalContext};
use crate::Result;

/// Zoo quantities a term can be built from. `y`-contractions are written with
/// a `0` index as usual.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum Sym {
    Alpha,
    Beta,
    /// `r_α`.
    RAlpha,
    /// `^αRic(y)`.
    RicA,
    /// `^αRic_ij b^i y^j`.
    RicAby,
    /// `t^m_m`.
    TMM,
    /// `q^m_m`.
    QMM,
    /// `r^m_m`.
    RMM,
    /// `s^m_m`, identically zero; only present because the published text
    /// uses it.
    SMM,
    /// `s^m_{;m}`.
    SDiv,
    /// `b^i s^m_{i;m}`.
    BSDiv,
    /// `t`.
    TScal,
    /// `s^m_{0;m}`.
    S0M,
    /// `r^m_{m;0}`.
    RM0,
    /// `r^m_{0;m}`.
    R0M,
    T0,
    S0,
    R0,
    P0,
    /// `q_{00·i} b^i`.
    Q00B,
    /// `s_{0;0·i} b^i`.
    S00B,
    /// `r_{00;0·i} b^i`.
    R000B,
    T00,
    Q00,
    W00,
    /// `s_{0;0}`.
    S00,
    R00,
    /// `r_{00;0}`.
    R000,
    E00,
    /// `e_{00;0}`.
    E000,
}

pub const SYM_COUNT: usize = Sym::E000 as usize + 1;

impl Sym {
    pub const ALL: [Sym; SYM_COUNT] = [
        Sym::Alpha,
        Sym::Beta,
        Sym::RAlpha,
        Sym::RicA,
        Sym::RicAby,
        Sym::TMM,
        Sym::QMM,
        Sym::RMM,
        Sym::SMM,
        Sym::SDiv,
        Sym::BSDiv,
        Sym::TScal,
        Sym::S0M,
        Sym::RM0,
        Sym::R0M,
        Sym::T0,
        Sym::S0,
        Sym::R0,
        Sym::P0,
        Sym::Q00B,
        Sym::S00B,
        Sym::R000B,
        Sym::T00,
        Sym::Q00,
        Sym::W00,
        Sym::S00,
        Sym::R00,
        Sym::R000,
        Sym::E00,
        Sym::E000,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Sym::Alpha => "α",
            Sym::Beta => "β",
            Sym::RAlpha => "r_α",
            Sym::RicA => "αRic",
            Sym::RicAby => "αRic_ij b^i y^j",
            Sym::TMM => "t^m_m",
            Sym::QMM => "q^m_m",
            Sym::RMM => "r^m_m",
            Sym::SMM => "s^m_m",
            Sym::SDiv => "s^m_;m",
            Sym::BSDiv => "b^i s^m_i;m",
            Sym::TScal => "t",
            Sym::S0M => "s^m_0;m",
            Sym::RM0 => "r^m_m;0",
            Sym::R0M => "r^m_0;m",
            Sym::T0 => "t_0",
            Sym::S0 => "s_0",
            Sym::R0 => "r_0",
            Sym::P0 => "p_0",
            Sym::Q00B => "q_00·i b^i",
            Sym::S00B => "s_0;0·i b^i",
            Sym::R000B => "r_00;0·i b^i",
            Sym::T00 => "t_00",
            Sym::Q00 => "q_00",
            Sym::W00 => "w_00",
            Sym::S00 => "s_0;0",
            Sym::R00 => "r_00",
            Sym::R000 => "r_00;0",
            Sym::E00 => "e_00",
            Sym::E000 => "e_00;0",
        }
    }

    /// Degree in `y`.
    pub fn degree(self) -> u32 {
        match self {
            Sym::RAlpha | Sym::TMM | Sym::QMM | Sym::RMM | Sym::SMM | Sym::SDiv | Sym::BSDiv | Sym::TScal => 0,
            Sym::Alpha
            | Sym::Beta
            | Sym::RicAby
            | Sym::S0M
            | Sym::RM0
            | Sym::R0M
            | Sym::T0
            | Sym::S0
            | Sym::R0
            | Sym::P0
            | Sym::Q00B
            | Sym::S00B => 1,
            Sym::RicA | Sym::R000B | Sym::T00 | Sym::Q00 | Sym::W00 | Sym::S00 | Sym::R00 | Sym::E00 => 2,
            Sym::R000 | Sym::E000 => 3,
        }
    }
}

/// Numeric values of every [`Sym`] at one `(x, y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Symbols {
    pub n: f64,
    pub b2: f64,
    values: [f64; SYM_COUNT],
}

impl Symbols {
    pub fn new(alpha: &AlphaData, beta: &BetaInvariants, ctx: &EvalContext<f64>) -> Symbols {
        let mut v = [0.0; SYM_COUNT];
        let mut set = |s: Sym, x: f64| v[s as usize] = x;
        let s_trace: f64 = (0..alpha.dim).map(|m| beta.s_mixed[(m, m)]).sum();
        set(Sym::Alpha, ctx.alpha);
        set(Sym::Beta, ctx.beta);
        set(Sym::RAlpha, alpha.scalar);
        set(Sym::RicA, ctx.ric_alpha);
        set(Sym::RicAby, ctx.ric_alpha_by);
        set(Sym::TMM, beta.t_trace);
        set(Sym::QMM, beta.q_trace);
        set(Sym::RMM, beta.r_trace);
        set(Sym::SMM, s_trace);
        set(Sym::SDiv, beta.s_i_div);
        set(Sym::BSDiv, beta.b_s_div);
        set(Sym::TScal, beta.t_scalar);
        set(Sym::S0M, ctx.s0m);
        set(Sym::RM0, ctx.rm0);
        set(Sym::R0M, ctx.r0m);
        set(Sym::T0, ctx.t0);
        set(Sym::S0, ctx.s0);
        set(Sym::R0, ctx.r0);
        set(Sym::P0, ctx.p0);
        set(Sym::Q00B, ctx.q00_b);
        set(Sym::S00B, ctx.s00_b);
        set(Sym::R000B, ctx.r000_b);
        set(Sym::T00, ctx.t00);
        set(Sym::Q00, ctx.q00);
        set(Sym::W00, ctx.w00);
        set(Sym::S00, ctx.s00);
        set(Sym::R00, ctx.r00);
        set(Sym::R000, ctx.r000);
        set(Sym::E00, ctx.e00);
        set(Sym::E000, ctx.e000);
        Symbols {
            n: alpha.dim as f64,
            b2: beta.b2,
            values: v,
        }
    }

    pub fn get(&self, s: Sym) -> f64 {
        self.values[s as usize]
    }
}

/// One `coefficient · monomial` entry.
#[derive(Clone, Copy, Debug)]
pub struct Term {
    pub coef: fn(f64, f64) -> f64,
    /// Source text of the coefficient in `n` and `b2`.
    pub coef_text: &'static str,
    pub factors: &'static [Sym],
}

impl Term {
    /// The monomial with unit coefficient.
    pub fn monomial(&self, s: &Symbols) -> f64 {
        self.factors.iter().map(|&f| s.get(f)).product()
    }

    pub fn eval(&self, s: &Symbols) -> f64 {
        (self.coef)(s.n, s.b2) * self.monomial(s)
    }

    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|f| f.degree()).sum()
    }

    pub fn label(&self) -> alloc::string::String {
        use alloc::string::String;
        let mut out = String::from("(");
        out.push_str(self.coef_text);
        out.push(')');
        for f in self.factors {
            out.push(' ');
            out.push_str(f.name());
        }
        out
    }
}

macro_rules! term {
    (|$n:ident, $b2:ident| $c:expr; $($f:ident),+) => {
        Term {
            coef: |$n: f64, $b2: f64| {
                let _ = ($n, $b2);
                $c
            },
            coef_text: stringify!($c),
            factors: &[$(Sym::$f),+],
        }
    };
}

/// `Σ₁`, degree 5.
pub static SIGMA1: &[Term] = &[
    term!(|n, b2| -4.0 * (2.0 * b2 + 4.0 * n + 7.0); TMM, Beta, Alpha, Alpha, Alpha, Alpha),
    term!(|n, b2| -24.0; BSDiv, Beta, Alpha, Alpha, Alpha, Alpha),
    term!(|n, b2| 24.0 * (n - 1.0); QMM, Beta, Alpha, Alpha, Alpha, Alpha),
    term!(|n, b2| 12.0 * (n - 1.0); SDiv, Beta, Alpha, Alpha, Alpha, Alpha),
    term!(|n, b2| 8.0 * (n - 1.0); TScal, Beta, Alpha, Alpha, Alpha, Alpha),
    term!(|n, b2| -8.0; RicAby, Alpha, Alpha, Alpha, Alpha),
    term!(|n, b2| 4.0 * (2.0 * b2 + n + 1.0); S0M, Alpha, Alpha, Alpha, Alpha),
    term!(|n, b2| -4.0 * (6.0 * b2 * n - 6.0 * b2 + n * n - 5.0); T0, Alpha, Alpha, Alpha, Alpha),
    term!(|n, b2| -12.0 * (n - 1.0); RMM, S0, Alpha, Alpha, Alpha, Alpha),
    term!(|n, b2| -16.0 * (n - 1.0); Q00B, Alpha, Alpha, Alpha, Alpha),
    term!(|n, b2| -2.0 * (n - 1.0); RM0, Alpha, Alpha, Alpha, Alpha),
    term!(|n, b2| -4.0 * (n - 1.0); R0M, Alpha, Alpha, Alpha, Alpha),
    term!(|n, b2| -8.0 * (n - 1.0); S00B, Alpha, Alpha, Alpha, Alpha),
    term!(|n, b2| -24.0 * (n - 1.0); P0, Alpha, Alpha, Alpha, Alpha),
    term!(|n, b2| -4.0 * (3.0 + 4.0 * n); TMM, Beta, Beta, Beta, Alpha, Alpha),
    term!(|n, b2| -8.0; BSDiv, Beta, Beta, Beta, Alpha, Alpha),
    term!(|n, b2| 8.0 * (n - 1.0); QMM, Beta, Beta, Beta, Alpha, Alpha),
    term!(|n, b2| 4.0 * (n - 1.0); SDiv, Beta, Beta, Beta, Alpha, Alpha),
    term!(|n, b2| -24.0; RicAby, Beta, Beta, Alpha, Alpha),
    term!(|n, b2| 8.0 * (b2 + 3.0 * n + 2.0); S0M, Beta, Beta, Alpha, Alpha),
    term!(|n, b2| -4.0 * (n + 1.0) * (5.0 * n - 11.0); T0, Beta, Beta, Alpha, Alpha),
    term!(|n, b2| -12.0 * (n - 1.0); RMM, S0, Beta, Beta, Alpha, Alpha),
    term!(|n, b2| -16.0 * (n - 1.0); Q00B, Beta, Beta, Alpha, Alpha),
    term!(|n, b2| -6.0 * (n - 1.0); RM0, Beta, Beta, Alpha, Alpha),
    term!(|n, b2| -12.0 * (n - 1.0); R0M, Beta, Beta, Alpha, Alpha),
    term!(|n, b2| -8.0 * (n - 1.0); S00B, Beta, Beta, Alpha, Alpha),
    term!(|n, b2| -24.0 * (n - 1.0); P0, Beta, Beta, Alpha, Alpha),
    term!(|n, b2| 4.0 * (2.0 * b2 + 1.0); RicA, Beta, Alpha, Alpha),
    term!(|n, b2| -8.0 * (2.0 * b2 + 1.0); T00, Beta, Alpha, Alpha),
    term!(|n, b2| 4.0 * (n - 1.0) * (6.0 * b2 + n + 5.0); Q00, Beta, Alpha, Alpha),
    term!(|n, b2| 12.0 * (n - 1.0) * (3.0 * n - 4.0); S0, S0, Beta, Alpha, Alpha),
    term!(|n, b2| 2.0 * (n - 1.0) * (6.0 * b2 + n + 5.0); S00, Beta, Alpha, Alpha),
    term!(|n, b2| 12.0 * (n - 1.0); RMM, R00, Beta, Alpha, Alpha),
    term!(|n, b2| 72.0 * (n - 1.0); R0, S0, Beta, Alpha, Alpha),
    term!(|n, b2| 8.0 * (n - 1.0); R000B, Beta, Alpha, Alpha),
    term!(|n, b2| 24.0 * (n - 1.0); W00, Beta, Alpha, Alpha),
    term!(|n, b2| -6.0 * (n - 1.0) * (12.0 * b2 + 3.0 * n - 19.0); S0, R00, Alpha, Alpha),
    term!(|n, b2| -36.0 * (n - 1.0); R0, R00, Alpha, Alpha),
    term!(|n, b2| -(n - 1.0) * (6.0 * b2 - n - 3.0); R000, Alpha, Alpha),
    term!(|n, b2| 4.0 * (n - 1.0); S0M, Beta, Beta, Beta, Beta),
    term!(|n, b2| 4.0; RicA, Beta, Beta, Beta),
    term!(|n, b2| -8.0; T00, Beta, Beta, Beta),
    term!(|n, b2| 4.0 * (n - 1.0) * (n - 1.0); Q00, Beta, Beta, Beta),
    term!(|n, b2| 2.0 * (n - 1.0) * (n - 1.0); S00, Beta, Beta, Beta),
    term!(|n, b2| -6.0 * (n - 1.0) * (n - 1.0); S0, R00, Beta, Beta),
    term!(|n, b2| (n - 1.0) * (n - 3.0); R000, Beta, Beta),
    term!(|n, b2| 3.0 * (n - 1.0) * (n - 6.0); R00, R00, Beta),
];

/// `Σ₂`, degree 4.
pub static SIGMA2: &[Term] = &[
    term!(|n, b2| -4.0 * (b2 + n + 2.0); TMM, Alpha, Alpha, Alpha, Alpha),
    term!(|n, b2| -8.0; BSDiv, Alpha, Alpha, Alpha, Alpha),
    term!(|n, b2| 8.0 * (n - 1.0); QMM, Alpha, Alpha, Alpha, Alpha),
    term!(|n, b2| 4.0 * (n - 1.0); SDiv, Alpha, Alpha, Alpha, Alpha),
    term!(|n, b2| 4.0 * (n - 1.0); TScal, Alpha, Alpha, Alpha, Alpha),
    term!(|n, b2| -4.0 * (b2 + 6.0 * n + 8.0); TMM, Beta, Beta, Alpha, Alpha),
    term!(|n, b2| -24.0; BSDiv, Beta, Beta, Alpha, Alpha),
    term!(|n, b2| 24.0 * (n - 1.0); QMM, Beta, Beta, Alpha, Alpha),
    term!(|n, b2| 12.0 * (n - 1.0); SDiv, Beta, Beta, Alpha, Alpha),
    term!(|n, b2| 4.0 * (n - 1.0); TScal, Beta, Beta, Alpha, Alpha),
    term!(|n, b2| -24.0; RicAby, Beta, Alpha, Alpha),
    term!(|n, b2| 16.0 * (b2 + n + 1.0); S0M, Beta, Alpha, Alpha),
    term!(|n, b2| -24.0 * (n - 1.0); RMM, S0, Beta, Alpha, Alpha),
    term!(|n, b2| -48.0 * (n - 1.0); P0, Beta, Alpha, Alpha),
    term!(|n, b2| -32.0 * (n - 1.0); Q00B, Beta, Alpha, Alpha),
    term!(|n, b2| -6.0 * (n - 1.0); RM0, Beta, Alpha, Alpha),
    term!(|n, b2| -12.0 * (n - 1.0); R0M, Beta, Alpha, Alpha),
    term!(|n, b2| -16.0 * (n - 1.0); S00B, Beta, Alpha, Alpha),
    term!(|n, b2| -8.0 * (3.0 * b2 * n - 3.0 * b2 + 2.0 * n * n - 8.0); T0, Beta, Alpha, Alpha),
    term!(|n, b2| 4.0 * b2; RicA, Alpha, Alpha),
    term!(|n, b2| -8.0 * b2; T00, Alpha, Alpha),
    term!(|n, b2| 24.0 * (n - 1.0) * (3.0 * b2 + n - 4.0); S0, S0, Alpha, Alpha),
    term!(|n, b2| 72.0 * (n - 1.0); S0, R0, Alpha, Alpha),
    term!(|n, b2| 12.0 * (n - 1.0) * b2; S00, Alpha, Alpha),
    term!(|n, b2| 24.0 * (n - 1.0) * b2; Q00, Alpha, Alpha),
    term!(|n, b2| 6.0 * (n - 1.0); RMM, R00, Alpha, Alpha),
    term!(|n, b2| 4.0 * (n - 1.0); R000B, Alpha, Alpha),
    term!(|n, b2| 12.0 * (n - 1.0); W00, Alpha, Alpha),
    term!(|n, b2| -4.0 * n; TMM, Beta, Beta, Beta, Beta),
    term!(|n, b2| 16.0 * n; S0M, Beta, Beta, Beta),
    term!(|n, b2| 4.0 * (n - 1.0); R0M, Beta, Beta, Beta),
    term!(|n, b2| 2.0 * (n - 1.0); RM0, Beta, Beta, Beta),
    term!(|n, b2| -8.0; RicAby, Beta, Beta, Beta),
    term!(|n, b2| -8.0 * n * (n - 3.0); T0, Beta, Beta, Beta),
    term!(|n, b2| 4.0 * (b2 + 2.0); RicA, Beta, Beta),
    term!(|n, b2| -8.0 * (b2 + 2.0); T00, Beta, Beta),
    term!(|n, b2| 12.0 * (n - 1.0) * (n - 2.0); S0, S0, Beta, Beta),
    term!(|n, b2| 4.0 * (n - 1.0) * (n + 2.0); S00, Beta, Beta),
    term!(|n, b2| 12.0 * (n - 1.0); W00, Beta, Beta),
    term!(|n, b2| 6.0 * (n - 1.0); RMM, R00, Beta, Beta),
    term!(|n, b2| 8.0 * (n - 1.0) * (n + 4.0); Q00, Beta, Beta),
    term!(|n, b2| 4.0 * (n - 1.0); R000B, Beta, Beta),
    term!(|n, b2| -2.0 * (n - 1.0) * (3.0 * b2 - n); R000, Beta),
    term!(|n, b2| -24.0 * (n - 1.0) * (n - 2.0); S0, R00, Beta),
    term!(|n, b2| 36.0 * (n - 1.0); R0, R00, Beta),
    term!(|n, b2| 3.0 * (n - 1.0) * (6.0 * b2 + n - 12.0); R00, R00),
];

/// `Γ₁`, degree 5.
pub static GAMMA1: &[Term] = &[
    term!(|n, b2| 16.0; RAlpha, Beta, Alpha, Alpha, Alpha, Alpha),
    term!(|n, b2| -4.0 * (2.0 * b2 + 4.0 * n + 7.0); TMM, Beta, Alpha, Alpha, Alpha, Alpha),
    term!(|n, b2| -24.0; BSDiv, Beta, Alpha, Alpha, Alpha, Alpha),
    term!(|n, b2| 24.0 * (n - 1.0); QMM, Beta, Alpha, Alpha, Alpha, Alpha),
    term!(|n, b2| 12.0 * (n - 1.0); SMM, Beta, Alpha, Alpha, Alpha, Alpha),
    term!(|n, b2| 8.0 * (n - 1.0); TScal, Beta, Alpha, Alpha, Alpha, Alpha),
    term!(|n, b2| -8.0; RicAby, Alpha, Alpha, Alpha, Alpha),
    term!(|n, b2| 4.0 * (2.0 * b2 + n + 1.0); S0M, Alpha, Alpha, Alpha, Alpha),
    term!(|n, b2| -12.0 * (n - 1.0); RMM, S0, Alpha, Alpha, Alpha, Alpha),
    term!(|n, b2| -16.0 * (n - 1.0); Q00B, Alpha, Alpha, Alpha, Alpha),
    term!(|n, b2| -2.0 * (n - 1.0); RM0, Alpha, Alpha, Alpha, Alpha),
    term!(|n, b2| -4.0 * (n - 1.0); R0M, Alpha, Alpha, Alpha, Alpha),
    term!(|n, b2| -8.0 * (n - 1.0); S00B, Alpha, Alpha, Alpha, Alpha),
    term!(|n, b2| -24.0 * (n - 1.0); P0, Alpha, Alpha, Alpha, Alpha),
    term!(|n, b2| -4.0 * (6.0 * b2 * n - 6.0 * b2 + n * n - 5.0); T0, Alpha, Alpha, Alpha, Alpha),
    term!(|n, b2| 16.0; RAlpha, Beta, Beta, Beta, Alpha, Alpha),
    term!(|n, b2| -4.0 * (4.0 * n + 3.0); TMM, Beta, Beta, Beta, Alpha, Alpha),
    term!(|n, b2| -8.0; BSDiv, Beta, Beta, Beta, Alpha, Alpha),
    term!(|n, b2| 8.0 * (n - 1.0); QMM, Beta, Beta, Beta, Alpha, Alpha),
    term!(|n, b2| 4.0 * (n - 1.0); SMM, Beta, Beta, Beta, Alpha, Alpha),
    term!(|n, b2| -36.0 * (n - 1.0); RMM, S0, Beta, Beta, Alpha, Alpha),
    term!(|n, b2| -16.0 * (n - 1.0); Q00B, Beta, Beta, Alpha, Alpha),
    term!(|n, b2| -6.0 * (n - 1.0); RM0, Beta, Beta, Alpha, Alpha),
    term!(|n, b2| -12.0 * (n - 1.0); R0M, Beta, Beta, Alpha, Alpha),
    term!(|n, b2| -8.0 * (n - 1.0); S00B, Beta, Beta, Alpha, Alpha),
    term!(|n, b2| -24.0 * (n - 1.0); P0, Beta, Beta, Alpha, Alpha),
    term!(|n, b2| -24.0; RicAby, Beta, Beta, Alpha, Alpha),
    term!(|n, b2| 8.0 * (b2 + 3.0 * n + 2.0); S0M, Beta, Beta, Alpha, Alpha),
    term!(|n, b2| -4.0 * (n + 1.0) * (5.0 * n - 11.0); T0, Beta, Beta, Alpha, Alpha),
    term!(|n, b2| 4.0 * (2.0 * b2 + 1.0); RicA, Beta, Alpha, Alpha),
    term!(|n, b2| -8.0 * (2.0 * b2 + 1.0); T00, Beta, Alpha, Alpha),
    term!(|n, b2| 4.0 * (n - 1.0) * (6.0 * b2 + n + 5.0); Q00, Beta, Alpha, Alpha),
    term!(|n, b2| 8.0 * (n - 1.0); R000B, Beta, Alpha, Alpha),
    term!(|n, b2| 4.0 * (n - 1.0) * (6.0 * b2 + 1.0); S00, Beta, Alpha, Alpha),
    term!(|n, b2| 12.0 * (n - 1.0); RMM, E00, Beta, Alpha, Alpha),
    term!(|n, b2| 144.0 * (n - 1.0); S0, R0, Beta, Alpha, Alpha),
    term!(|n, b2| 4.0 * (n - 1.0) * (30.0 * b2 + 19.0 * n - 66.0); S0, S0, Beta, Alpha, Alpha),
    term!(|n, b2| 24.0 * (n - 1.0); W00, Beta, Alpha, Alpha),
    term!(|n, b2| -(n - 1.0) * (6.0 * b2 - n - 3.0); E000, Alpha, Alpha),
    term!(|n, b2| -36.0 * (n - 1.0); R0, E00, Alpha, Alpha),
    term!(|n, b2| -4.0 * (n - 1.0) * (15.0 * b2 + 5.0 * n - 27.0); S0, E00, Alpha, Alpha),
    term!(|n, b2| 4.0 * (n - 1.0); S0M, Beta, Beta, Beta, Beta),
    term!(|n, b2| 4.0; RicA, Beta, Beta, Beta),
    term!(|n, b2| -8.0; T00, Beta, Beta, Beta),
    term!(|n, b2| 4.0 * (n - 1.0) * (n - 1.0); Q00, Beta, Beta, Beta),
    term!(|n, b2| 4.0 * (n - 1.0); S00, Beta, Beta, Beta),
    term!(|n, b2| 4.0 * (n - 1.0) * (7.0 * n - 24.0); S0, S0, Beta, Beta, Beta),
    term!(|n, b2| (n - 1.0) * (n - 3.0); E000, Beta, Beta),
    term!(|n, b2| -4.0 * (n - 1.0) * (5.0 * n - 21.0); S0, E00, Beta, Beta),
    term!(|n, b2| 3.0 * (n - 1.0) * (n - 6.0); E00, E00, Beta),
];

/// `Γ₂`, degree 4.
pub static GAMMA2: &[Term] = &[
    term!(|n, b2| 4.0; RAlpha, Alpha, Alpha, Alpha, Alpha),
    term!(|n, b2| -4.0 * (b2 + n + 2.0); TMM, Alpha, Alpha, Alpha, Alpha),
    term!(|n, b2| -8.0; BSDiv, Alpha, Alpha, Alpha, Alpha),
    term!(|n, b2| 8.0 * (n - 1.0); QMM, Alpha, Alpha, Alpha, Alpha),
    term!(|n, b2| 4.0 * (n - 1.0); SMM, Alpha, Alpha, Alpha, Alpha),
    term!(|n, b2| 4.0 * (n - 1.0); TScal, Alpha, Alpha, Alpha, Alpha),
    term!(|n, b2| 24.0; RAlpha, Beta, Beta, Alpha, Alpha),
    term!(|n, b2| -4.0 * (b2 + 6.0 * n + 8.0); TMM, Beta, Beta, Alpha, Alpha),
    term!(|n, b2| -24.0; BSDiv, Beta, Beta, Alpha, Alpha),
    term!(|n, b2| 24.0 * (n - 1.0); QMM, Beta, Beta, Alpha, Alpha),
    term!(|n, b2| 4.0 * (n - 1.0); TScal, Beta, Beta, Alpha, Alpha),
    term!(|n, b2| 12.0 * (n - 1.0); SMM, Beta, Beta, Alpha, Alpha),
    term!(|n, b2| -24.0; RicAby, Beta, Alpha, Alpha),
    term!(|n, b2| 16.0 * (b2 + n + 1.0); S0M, Beta, Alpha, Alpha),
    term!(|n, b2| -36.0 * (n - 1.0); RMM, S0, Beta, Alpha, Alpha),
    term!(|n, b2| -32.0 * (n - 1.0); Q00B, Beta, Alpha, Alpha),
    term!(|n, b2| -6.0 * (n - 1.0); RM0, Beta, Alpha, Alpha),
    term!(|n, b2| -12.0 * (n - 1.0); R0M, Beta, Alpha, Alpha),
    term!(|n, b2| -16.0 * (n - 1.0); S00B, Beta, Alpha, Alpha),
    term!(|n, b2| -48.0 * (n - 1.0); P0, Beta, Alpha, Alpha),
    term!(|n, b2| -8.0 * (3.0 * b2 * n - 3.0 * b2 + 2.0 * n * n - 8.0); T0, Beta, Alpha, Alpha),
    term!(|n, b2| 4.0 * b2; RicA, Alpha, Alpha),
    term!(|n, b2| -8.0 * b2; T00, Alpha, Alpha),
    term!(|n, b2| 24.0 * (n - 1.0) * b2; Q00, Alpha, Alpha),
    term!(|n, b2| 4.0 * (n - 1.0); R000B, Alpha, Alpha),
    term!(|n, b2| 12.0 * (n - 1.0) * b2; S00, Alpha, Alpha),
    term!(|n, b2| 6.0 * (n - 1.0); RMM, E00, Alpha, Alpha),
    term!(|n, b2| 72.0 * (n - 1.0); S0, R0, Alpha, Alpha),
    term!(|n, b2| 24.0 * (n - 1.0) * (3.0 * b2 + n - 4.0); S0, S0, Alpha, Alpha),
    term!(|n, b2| 12.0 * (n - 1.0); W00, Alpha, Alpha),
    term!(|n, b2| -4.0 * n; TMM, Beta, Beta, Beta, Beta),
    term!(|n, b2| 4.0; RAlpha, Beta, Beta, Beta, Beta),
    term!(|n, b2| -12.0 * (n - 1.0); RMM, S0, Beta, Beta, Beta),
    term!(|n, b2| -2.0 * (n - 1.0); RM0, Beta, Beta, Beta),
    term!(|n, b2| -4.0 * (n - 1.0); R0M, Beta, Beta, Beta),
    term!(|n, b2| -8.0; RicAby, Beta, Beta, Beta),
    term!(|n, b2| 16.0 * n; S0M, Beta, Beta, Beta),
    term!(|n, b2| -8.0 * n * (n - 3.0); T0, Beta, Beta, Beta),
    term!(|n, b2| 4.0 * (b2 + 2.0); RicA, Beta, Beta),
    term!(|n, b2| -8.0 * (b2 + 2.0); T00, Beta, Beta),
    term!(|n, b2| 8.0 * (n - 1.0) * (n + 2.0); Q00, Beta, Beta),
    term!(|n, b2| 4.0 * (n - 1.0); R000B, Beta, Beta),
    term!(|n, b2| 4.0 * (n - 1.0) * (3.0 * b2 + 2.0); S00, Beta, Beta),
    term!(|n, b2| 6.0 * (n - 1.0); RMM, E00, Beta, Beta),
    term!(|n, b2| 6.0 * (n - 1.0); S0, R0, Beta, Beta),
    term!(|n, b2| 8.0 * (n - 1.0) * (6.0 * b2 + 10.0 * n - 33.0); S0, S0, Beta, Beta),
    term!(|n, b2| 12.0 * (n - 1.0); W00, Beta, Beta),
    term!(|n, b2| -2.0 * (n - 1.0) * (3.0 * b2 - n); E000, Beta),
    term!(|n, b2| -36.0 * (n - 1.0); R0, E00, Beta),
    term!(|n, b2| -4.0 * (n - 1.0) * (15.0 * b2 + 10.0 * n - 48.0); S0, E00, Beta),
    term!(|n, b2| 3.0 * (n - 1.0) * (6.0 * b2 + n - 12.0); E00, E00),
];

/// Which of the four published tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Table {
    Sigma1,
    Sigma2,
    Gamma1,
    Gamma2,
}

impl Table {
    pub const ALL: [Table; 4] = [Table::Sigma1, Table::Sigma2, Table::Gamma1, Table::Gamma2];

    pub fn printed(self) -> &'static [Term] {
        match self {
            Table::Sigma1 => SIGMA1,
            Table::Sigma2 => SIGMA2,
            Table::Gamma1 => GAMMA1,
            Table::Gamma2 => GAMMA2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Table::Sigma1 => "Sigma1",
            Table::Sigma2 => "Sigma2",
            Table::Gamma1 => "Gamma1",
            Table::Gamma2 => "Gamma2",
        }
    }

    pub fn degree(self) -> u32 {
        match self {
            Table::Sigma1 | Table::Gamma1 => 5,
            Table::Sigma2 | Table::Gamma2 => 4,
        }
    }
}

/// A replacement for one published term.
#[derive(Clone, Copy, Debug)]
pub struct Correction {
    pub table: Table,
    /// Index into the published table.
    pub index: usize,
    pub replacement: Term,
    pub note: &'static str,
}

macro_rules! fix {
    ($table:ident[$i:expr] = |$n:ident, $b2:ident| $c:expr; $($f:ident),+; $note:expr) => {
        Correction {
            table: Table::$table,
            index: $i,
            replacement: term!(|$n, $b2| $c; $($f),+),
            note: $note,
        }
    };
}

/// Patches that make the tables agree with the definitional curvature. Each
/// one was located with [`term_diff`] and is re-verified by the test suite.
///
/// The `s_0`/`r_00` group shifts by multiples of `(n-1)(4-n)`, which is the
/// expansion of `(n-1)(4-n) F (r_00 - 2 alpha s_0)^2` into both tables, so
/// the published values are right for `n = 4` only.
pub static CORRECTIONS: &[Correction] = &[
    fix!(Sigma1[30] = |n, b2| 12.0 * (n - 1.0) * (n + 4.0); S0, S0, Beta, Alpha, Alpha; "s_0 s_0 group"),
    fix!(Sigma1[36] = |n, b2| -6.0 * (n - 1.0) * (12.0 * b2 - n - 3.0); S0, R00, Alpha, Alpha; "s_0 r_00 group"),
    fix!(Sigma1[46] = |n, b2| -3.0 * (n - 1.0) * (n - 2.0); R00, R00, Beta; "r_00 r_00 group"),
    fix!(Sigma2[21] = |n, b2| 72.0 * (n - 1.0) * b2; S0, S0, Alpha, Alpha; "s_0 s_0 group"),
    fix!(Sigma2[30] = |n, b2| -4.0 * (n - 1.0); R0M, Beta, Beta, Beta; "sign, as in Gamma2"),
    fix!(Sigma2[31] = |n, b2| -2.0 * (n - 1.0); RM0, Beta, Beta, Beta; "sign, as in Gamma2"),
    fix!(Sigma2[40] = |n, b2| 8.0 * (n - 1.0) * (n + 2.0); Q00, Beta, Beta; "n + 4 -> n + 2, as in Gamma2"),
    fix!(Sigma2[43] = |n, b2| -48.0 * (n - 1.0); S0, R00, Beta; "s_0 r_00 group"),
    fix!(Sigma2[44] = |n, b2| -36.0 * (n - 1.0); R0, R00, Beta; "sign, as in Gamma2"),
    fix!(Sigma2[45] = |n, b2| 3.0 * (n - 1.0) * (6.0 * b2 - n - 4.0); R00, R00; "r_00 r_00 group"),
    fix!(Gamma1[4] = |n, b2| 12.0 * (n - 1.0); SDiv, Beta, Alpha, Alpha, Alpha, Alpha; "s^m_m read as s^m_;m"),
    fix!(Gamma1[19] = |n, b2| 4.0 * (n - 1.0); SDiv, Beta, Beta, Beta, Alpha, Alpha; "s^m_m read as s^m_;m"),
    fix!(Gamma1[36] = |n, b2| 4.0 * (n - 1.0) * (30.0 * b2 + n + 6.0); S0, S0, Beta, Alpha, Alpha; "s_0 s_0 group"),
    fix!(Gamma1[40] = |n, b2| -4.0 * (n - 1.0) * (15.0 * b2 - n - 3.0); S0, E00, Alpha, Alpha; "s_0 e_00 group"),
    fix!(Gamma1[46] = |n, b2| 4.0 * n * (n - 1.0); S0, S0, Beta, Beta, Beta; "s_0 s_0 group"),
    fix!(Gamma1[48] = |n, b2| 4.0 * (n - 1.0) * (n - 3.0); S0, E00, Beta, Beta; "s_0 e_00 group"),
    fix!(Gamma1[49] = |n, b2| -3.0 * (n - 1.0) * (n - 2.0); E00, E00, Beta; "e_00 e_00 group"),
    fix!(Gamma2[4] = |n, b2| 4.0 * (n - 1.0); SDiv, Alpha, Alpha, Alpha, Alpha; "s^m_m read as s^m_;m"),
    fix!(Gamma2[11] = |n, b2| 12.0 * (n - 1.0); SDiv, Beta, Beta, Alpha, Alpha; "s^m_m read as s^m_;m"),
    fix!(Gamma2[28] = |n, b2| 72.0 * (n - 1.0) * b2; S0, S0, Alpha, Alpha; "s_0 s_0 group"),
    fix!(Gamma2[44] = |n, b2| 72.0 * (n - 1.0); S0, R0, Beta, Beta; "s_0 r_0 coefficient"),
    fix!(Gamma2[45] = |n, b2| 8.0 * (n - 1.0) * (6.0 * b2 + n + 3.0); S0, S0, Beta, Beta; "s_0 s_0 group"),
    fix!(Gamma2[49] = |n, b2| -4.0 * (n - 1.0) * (15.0 * b2 - 2.0 * n); S0, E00, Beta; "s_0 e_00 group"),
    fix!(Gamma2[50] = |n, b2| 3.0 * (n - 1.0) * (6.0 * b2 - n - 4.0); E00, E00; "e_00 e_00 group"),
];

/// Published table or the table with [`CORRECTIONS`] applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Variant {
    Printed,
    #[default]
    Corrected,
}

/// Terms of `table` in the requested variant.
pub fn terms(table: Table, variant: Variant) -> Vec<Term> {
    let mut out = table.printed().to_vec();
    if variant == Variant::Corrected {
        for c in CORRECTIONS.iter().filter(|c| c.table == table) {
            out[c.index] = c.replacement;
        }
    }
    out
}

pub fn eval_terms(terms: &[Term], s: &Symbols) -> f64 {
    terms.iter().map(|t| t.eval(s)).sum()
}

pub fn eval_table(table: Table, variant: Variant, s: &Symbols) -> f64 {
    eval_terms(&terms(table, variant), s)
}

/// One candidate explanation of a mismatch: rescaling a single term.
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub table: Table,
    pub index: usize,
    pub label: alloc::string::String,
    /// Fitted change of the coefficient; `[constant, b²-slope]`.
    pub delta: [f64; 2],
    /// Relative residual after the change.
    pub residual: f64,
}

/// Result of fitting a mismatch against single-term coefficient changes.
#[derive(Clone, Debug, PartialEq)]
pub struct TermDiff {
    /// Relative residual `‖target − model‖₂/‖target‖₂` before any change.
    pub baseline: f64,
    pub samples: usize,
    /// Best candidates first.
    pub candidates: Vec<Candidate>,
}

/// Sample for [`term_diff`]: symbol values, the reference value of the
/// combination being tested, and the per-table multiplier (e.g. `α` for the
/// second table of `Σ₁ + αΣ₂`).
#[derive(Clone, Debug)]
pub struct DiffSample {
    pub symbols: Symbols,
    pub target: f64,
    pub weights: Vec<(Table, f64)>,
}

/// Fits `target − Σ_tables weight·table` with a change `(δ₀ + δ₁ b²)` of the
/// coefficient of each single term in turn, reporting the `keep` best. The
/// b²-slope is left at zero when all samples share one value of `b²`.
pub fn term_diff(samples: &[DiffSample], variant: Variant, keep: usize) -> Result<TermDiff> {
    let tables: Vec<(Table, Vec<Term>)> = {
        let mut seen: Vec<Table> = Vec::new();
        for s in samples {
            for (t, _) in &s.weights {
                if !seen.contains(t) {
                    seen.push(*t);
                }
            }
        }
        seen.into_iter().map(|t| (t, terms(t, variant))).collect()
    };
    let model = |s: &DiffSample| -> f64 {
        s.weights
            .iter()
            .map(|(t, w)| w * eval_terms(&tables.iter().find(|(tt, _)| tt == t).unwrap().1, &s.symbols))
            .sum()
    };
    let resid: Vec<f64> = samples.iter().map(|s| s.target - model(s)).collect();
    let target_norm = norm(samples.iter().map(|s| s.target)).max(1e-300);
    let baseline = norm(resid.iter().copied()) / target_norm;
    let b2_spread = samples
        .iter()
        .map(|s| s.symbols.b2)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), b| (lo.min(b), hi.max(b)));
    let use_slope = b2_spread.1 - b2_spread.0 > 1e-6;

    let mut candidates = Vec::new();
    for (table, ts) in &tables {
        for (index, term) in ts.iter().enumerate() {
            let cols = if use_slope { 2 } else { 1 };
            let mut a = Vec::with_capacity(samples.len() * cols);
            for s in samples {
                let w = s.weights.iter().find(|(t, _)| t == table).map_or(0.0, |(_, w)| *w);
                let v = w * term.monomial(&s.symbols);
                a.push(v);
                if use_slope {
                    a.push(v * s.symbols.b2);
                }
            }
            if a.iter().all(|v| *v == 0.0) {
                continue;
            }
            let ls = linalg::least_squares(samples.len(), cols, &a, &resid)?;
            let mut after = 0.0;
            for (k, r) in resid.iter().enumerate() {
                let fit: f64 = (0..cols).map(|c| a[k * cols + c] * ls.solution[c]).sum();
                after += (r - fit) * (r - fit);
            }
            candidates.push(Candidate {
                table: *table,
                index,
                label: term.label(),
                delta: [ls.solution[0], if use_slope { ls.solution[1] } else { 0.0 }],
                residual: libm::sqrt(after) / target_norm,
            });
        }
    }
    candidates.sort_by(|a, b| a.residual.total_cmp(&b.residual));
    candidates.truncate(keep);
    Ok(TermDiff {
        baseline,
        samples: samples.len(),
        candidates,
    })
}

/// One coefficient change in a [`SparseCorrection`].
#[derive(Clone, Debug, PartialEq)]
pub struct TermDelta {
    pub table: Table,
    pub index: usize,
    pub label: alloc::string::String,
    /// `[constant, b²-slope]`; for an `s^m_m` slot the change applies to
    /// `s^m_;m` in that position.
    pub delta: [f64; 2],
}

/// Joint fit of a mismatch against changes of all coefficients at once.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseCorrection {
    pub baseline: f64,
    /// Relative residual with all `deltas` applied.
    pub residual: f64,
    pub samples: usize,
    /// Numerical rank of the design; below the column count because the
    /// symbols satisfy identities, so the fit is not unique.
    pub rank: usize,
    pub columns: usize,
    pub deltas: Vec<TermDelta>,
}

/// Column value of a term: `s^m_m` vanishes identically, so its slot is read
/// as `s^m_;m`, the symbol the `Σ` tables print in the same place.
fn fit_monomial(term: &Term, s: &Symbols) -> f64 {
    term.factors
        .iter()
        .map(|f| s.get(if *f == Sym::SMM { Sym::SDiv } else { *f }))
        .product()
}

/// Fits the mismatch with simultaneous changes `(δ₀ + δ₁ b²)` of every
/// coefficient of the tables in the samples, then drives the solution to
/// few nonzero changes by iteratively reweighted least squares. All samples
/// must share the dimension. Changes below `drop` in magnitude are omitted.
pub fn sparse_correction(samples: &[DiffSample], variant: Variant, drop: f64) -> Result<SparseCorrection> {
    let mut tables: Vec<(Table, Vec<Term>)> = Vec::new();
    for s in samples {
        for (t, _) in &s.weights {
            if !tables.iter().any(|(tt, _)| tt == t) {
                tables.push((*t, terms(*t, variant)));
            }
        }
    }
    let slots: Vec<(usize, usize, usize)> = tables
        .iter()
        .enumerate()
        .flat_map(|(ti, (_, ts))| (0..ts.len()).flat_map(move |i| [(ti, i, 0), (ti, i, 1)]))
        .collect();
    let (rows, cols) = (samples.len(), slots.len());
    let mut a = Vec::with_capacity(rows * cols);
    let mut resid = Vec::with_capacity(rows);
    for s in samples {
        let mut model = 0.0;
        let weight = |t: Table| s.weights.iter().find(|(tt, _)| *tt == t).map_or(0.0, |(_, w)| *w);
        for (t, ts) in &tables {
            model += weight(*t) * eval_terms(ts, &s.symbols);
        }
        resid.push(s.target - model);
        for &(ti, i, k) in &slots {
            let (t, ts) = &tables[ti];
            let v = weight(*t) * fit_monomial(&ts[i], &s.symbols);
            a.push(if k == 0 { v } else { v * s.symbols.b2 });
        }
    }
    let target_norm = norm(samples.iter().map(|s| s.target)).max(1e-300);
    let baseline = norm(resid.iter().copied()) / target_norm;

    let first = linalg::least_squares(rows, cols, &a, &resid)?;
    let rank = first.rank;
    let mut x = first.solution;
    let mut scaled = alloc::vec![0.0; rows * cols];
    for it in 0..60 {
        let eps = (0.1 * libm::pow(0.7, it as f64)).max(1e-9);
        let d: Vec<f64> = x.iter().map(|v| libm::sqrt(v.abs() + eps)).collect();
        for r in 0..rows {
            for c in 0..cols {
                scaled[r * cols + c] = a[r * cols + c] * d[c];
            }
        }
        let z = linalg::least_squares(rows, cols, &scaled, &resid)?.solution;
        for c in 0..cols {
            x[c] = z[c] * d[c];
        }
    }
    let after = norm((0..rows).map(|r| resid[r] - (0..cols).map(|c| a[r * cols + c] * x[c]).sum::<f64>()));

    let mut deltas: Vec<TermDelta> = Vec::new();
    for (c, &(ti, i, k)) in slots.iter().enumerate() {
        if x[c].abs() <= drop {
            continue;
        }
        let (table, ts) = &tables[ti];
        match deltas.iter_mut().find(|d| d.table == *table && d.index == i) {
            Some(d) => d.delta[k] = x[c],
            None => {
                let mut delta = [0.0; 2];
                delta[k] = x[c];
                deltas.push(TermDelta {
                    table: *table,
                    index: i,
                    label: ts[i].label(),
                    delta,
                });
            }
        }
    }
    Ok(SparseCorrection {
        baseline,
        residual: after / target_norm,
        samples: rows,
        rank,
        columns: cols,
        deltas,
    })
}

fn norm(it: impl Iterator<Item = f64>) -> f64 {
    libm::sqrt(it.map(|v| v * v).sum::<f64>())
}
