//! The term-diff report: where the published `Σ`/`Γ` tables disagree with
//! the definitional scalar curvature, and which coefficient changes repair
//! them.

use rayon::prelude::*;
use randers_core::metric::{random_admissible_point, random_polynomial_metric};
use randers_core::oracle;
use randers_core::randers::{gamma_diff_sample, sigma_diff_sample};
use randers_core::riemann::{contract_at, geometry_at};
use randers_core::sampling::SplitMix64;
use randers_core::terms::{self, DiffSample, Variant, CORRECTIONS};
use serde::Serialize;

use crate::commands::SAMPLE_RADIUS;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CandidateRow {
    pub table: &'static str,
    pub index: usize,
    pub term: String,
    /// Coefficient change `[constant, b²-slope]`.
    pub delta: [f64; 2],
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeltaRow {
    pub table: &'static str,
    pub index: usize,
    pub term: String,
    pub delta: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SparseRow {
    pub residual: f64,
    pub rank: usize,
    pub columns: usize,
    pub deltas: Vec<DeltaRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableFit {
    /// Relative residual of the published tables.
    pub published_residual: f64,
    /// Relative residual with [`CORRECTIONS`] applied.
    pub corrected_residual: f64,
    /// Best single-term rescalings of the published tables.
    pub single_term: Vec<CandidateRow>,
    /// Joint minimal-support fit over all coefficients.
    pub sparse: SparseRow,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimReport {
    pub n: usize,
    pub samples: usize,
    pub sigma: TableFit,
    pub gamma: TableFit,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrectionRow {
    pub table: &'static str,
    pub index: usize,
    pub published: String,
    pub corrected: String,
    pub note: &'static str,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TermDiffReport {
    pub reference: &'static str,
    pub seed: u64,
    pub dims: Vec<DimReport>,
    pub corrections: Vec<CorrectionRow>,
}

fn samples(n: usize, count: usize, seed: u64) -> randers_core::Result<(Vec<DiffSample>, Vec<DiffSample>)> {
    let mut rng = SplitMix64::new(seed);
    let mut points = Vec::with_capacity(count);
    while points.len() < count {
        let metric = random_polynomial_metric(n, &mut rng)?;
        let Some(x) = random_admissible_point(&metric, &mut rng, SAMPLE_RADIUS, 50) else {
            continue;
        };
        let y: Vec<f64> = (0..n).map(|_| 2.0 * rng.next_f64() - 1.0).collect();
        points.push((metric, x, y));
    }
    let pairs: Vec<(DiffSample, DiffSample)> = points
        .par_iter()
        .map(|(metric, x, y)| {
            let (a, b) = geometry_at(metric, x)?;
            let c = contract_at(&a, &b, y)?;
            let r = oracle::scalar_curvature_def(metric, x, y)?;
            Ok((sigma_diff_sample(&a, &b, &c, r), gamma_diff_sample(&a, &b, &c, r)))
        })
        .collect::<randers_core::Result<_>>()?;
    Ok(pairs.into_iter().unzip())
}

fn fit(samples: &[DiffSample]) -> randers_core::Result<TableFit> {
    let published = terms::term_diff(samples, Variant::Printed, 5)?;
    let corrected = terms::term_diff(samples, Variant::Corrected, 0)?;
    let sparse = terms::sparse_correction(samples, Variant::Printed, 1e-6)?;
    Ok(TableFit {
        published_residual: published.baseline,
        corrected_residual: corrected.baseline,
        single_term: published
            .candidates
            .into_iter()
            .map(|c| CandidateRow {
                table: c.table.name(),
                index: c.index,
                term: c.label,
                delta: c.delta,
                residual: c.residual,
            })
            .collect(),
        sparse: SparseRow {
            residual: sparse.residual,
            rank: sparse.rank,
            columns: sparse.columns,
            deltas: sparse
                .deltas
                .into_iter()
                .map(|d| DeltaRow {
                    table: d.table.name(),
                    index: d.index,
                    term: d.label,
                    delta: d.delta,
                })
                .collect(),
        },
    })
}

pub fn corrections() -> Vec<CorrectionRow> {
    CORRECTIONS
        .iter()
        .map(|c| CorrectionRow {
            table: c.table.name(),
            index: c.index,
            published: c.table.printed()[c.index].label(),
            corrected: c.replacement.label(),
            note: c.note,
        })
        .collect()
}

/// Runs the protocol on `count` random metrics per dimension.
pub fn term_diff_report(dims: &[usize], count: usize, seed: u64) -> randers_core::Result<TermDiffReport> {
    let mut out = Vec::with_capacity(dims.len());
    for &n in dims {
        let (sig, gam) = samples(n, count, seed.wrapping_add(n as u64))?;
        out.push(DimReport {
            n,
            samples: count,
            sigma: fit(&sig)?,
            gamma: fit(&gam)?,
        });
    }
    Ok(TermDiffReport {
        reference: "definitional scalar curvature",
        seed,
        dims: out,
        corrections: corrections(),
    })
}

