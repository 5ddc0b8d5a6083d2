//! The `report`, `verify` and `classify` computations, independent of the
//! command line.

use std::time::Instant;

use rayon::prelude::*;
use randers_core::classify::{self, Implication};
use randers_core::linalg::Mat;
use randers_core::metric::random_admissible_point;
use randers_core::oracle;
use randers_core::polyalg::check_gamma_divisibility;
use randers_core::randers::{self, curvature_report, gamma_decomposition, scalar_curvature_closed};
use randers_core::riemann::{contract_at, geometry_at};
use randers_core::sampling::SplitMix64;
use randers_core::terms::Variant;
use randers_core::MetricDefinition;

use crate::document::*;
use crate::error::{usage, Result};
use crate::input::{MetricSource, Point};

/// Cube half-width for random evaluation points.
pub const SAMPLE_RADIUS: f64 = 0.4;
/// Points per x-level check (volume, divisibility, Einstein fit).
pub const POINT_CHECKS: usize = 5;
/// Conformal exponent used by `verify`.
pub const VERIFY_SIGMA: &str = "0.1*sin(x1)";
pub const GAMMA_TOL: f64 = 1e-9;
pub const INVERSE_TOL: f64 = 1e-10;
pub const HOMOGENEITY_TOL: f64 = 1e-8;
pub const CIRCLE_NODES: usize = 2048;
pub const MONTE_CARLO_SAMPLES: usize = 1_000_000;

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn inverse_error(g_inv: &Mat<f64>, g: &Mat<f64>) -> f64 {
    g_inv.mul(g).max_abs_diff(&Mat::identity(g.dim()))
}

fn gamma_error(g1: f64, g2: f64, alpha: f64, f: f64, r: f64) -> f64 {
    let lhs = 4.0 * f.powi(5) * r;
    (g1 + alpha * g2 - lhs).abs() / (4.0 * f.powi(5) * (1.0 + r.abs()))
}

/// Full pointwise report at `(x, y)`, including the definitional routes.
pub fn report(metric: &MetricDefinition, source: MetricSource, point: &Point, settings: Settings) -> Result<Document> {
    let start = Instant::now();
    let x = point.x.clone().ok_or_else(|| usage("report needs --at \"x=..;y=..\""))?;
    let y = point.y.clone().ok_or_else(|| usage("report needs a direction: --at \"x=..;y=..\""))?;
    metric.validate_at(&x)?;
    let rep = curvature_report(metric, &x, &y, true)?;
    let (alpha, beta) = geometry_at(metric, &x)?;
    let ctx = contract_at(&alpha, &beta, &y)?;
    let printed = scalar_curvature_closed(&alpha, &beta, &ctx, Variant::Printed).r;
    let iso = classify::test_isotropic_s(metric, &x, settings.tol)?;
    let mut doc = Document::new("report", source, metric.dim(), settings);

    let n = rep.dim;
    let mut hom = 0.0;
    for i in 0..n {
        for j in 0..n {
            hom += rep.ricci_tensor[(i, j)] * y[i] * y[j];
        }
    }
    let r_def = rep.r_def.unwrap_or(f64::NAN);
    let ricci_def = rep.ricci_def.unwrap_or(f64::NAN);
    doc.checks = vec![
        Check::new("inverse_metric", "closed g^ij times jet g_jk minus identity", [inverse_error(&rep.g_inv, &rep.g)], INVERSE_TOL),
        Check::new("ricci_homogeneity", "|Ric - Ric_ij y^i y^j| / (1 + |Ric|)", [(hom - rep.ricci).abs() / (1.0 + rep.ricci.abs())], HOMOGENEITY_TOL),
        Check::new("gamma_identity", "|G1 + alpha G2 - 4F^5 r| / (4F^5 (1 + |r|))", [gamma_error(rep.gamma1, rep.gamma2, rep.alpha, rep.f, rep.r_closed)], GAMMA_TOL),
        Check::new("ricci_routes", "closed vs definitional Ric", [(rep.ricci - ricci_def).abs() / (1.0 + ricci_def.abs())], doc.settings.tol),
        Check::new("scalar_routes", "closed vs definitional r", [(rep.r_closed - r_def).abs() / (1.0 + r_def.abs())], doc.settings.tol),
    ];
    doc.reports.push(PointReport {
        x: rep.x.clone(),
        y: rep.y.clone(),
        f: rep.f,
        alpha: rep.alpha,
        beta: rep.beta,
        b2: rep.b2,
        g: rows(&rep.g),
        g_inv: rows(&rep.g_inv),
        ricci: rep.ricci,
        ricci_def: rep.ricci_def,
        ricci_tensor: rows(&rep.ricci_tensor),
        r_alpha: rep.r_alpha,
        r_closed: rep.r_closed,
        r_closed_printed: printed,
        r_semi: rep.r_semi,
        r_def: rep.r_def,
        s_curvature: rep.s_curvature,
        s_over_f: rep.s_curvature / rep.f,
        isotropic_c: iso.scalar,
        isotropic_c_alternate: iso.c_alternate(),
        isotropic_s: iso.verdict.name().to_string(),
        distortion: rep.distortion,
        sigma_bh: rep.sigma_bh,
        mean_cartan: rep.mean_cartan.clone(),
        xi: XiRow {
            a: rep.xi.a,
            b: rep.xi.b,
            d1: rep.xi.d1,
            d: rep.xi.d,
            xi1: rep.xi.xi1,
            xi2: rep.xi.xi2,
            xi3: rep.xi.xi3,
            xi: rep.xi.xi,
        },
        sigma1: rep.sigma1,
        sigma2: rep.sigma2,
        gamma1: rep.gamma1,
        gamma2: rep.gamma2,
    });
    doc.finish();
    doc.timings.total_ms = ms(start);
    Ok(doc)
}

/// Seeded `(x, y)` pairs: admissible `x` in the sample cube, `y` uniform in
/// `[-1, 1]^n` away from zero.
pub fn sample_points(metric: &MetricDefinition, count: usize, seed: u64) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
    let mut rng = SplitMix64::new(seed);
    let n = metric.dim();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let x = random_admissible_point(metric, &mut rng, SAMPLE_RADIUS, 1000)
            .ok_or_else(|| usage(format!("no admissible point found in [-{SAMPLE_RADIUS}, {SAMPLE_RADIUS}]^{n}")))?;
        let y = loop {
            let y: Vec<f64> = (0..n).map(|_| 2.0 * rng.next_f64() - 1.0).collect();
            if y.iter().map(|v| v * v).sum::<f64>() > 0.01 {
                break y;
            }
        };
        out.push((x, y));
    }
    Ok(out)
}

fn sample_row(metric: &MetricDefinition, conformal: &classify::ConformalSpec, x: &[f64], y: &[f64]) -> randers_core::Result<SampleRow> {
    let (alpha, beta) = geometry_at(metric, x)?;
    let ctx = contract_at(&alpha, &beta, y)?;
    let closed = scalar_curvature_closed(&alpha, &beta, &ctx, Variant::Corrected).r;
    let printed = scalar_curvature_closed(&alpha, &beta, &ctx, Variant::Printed).r;
    let semi = randers::scalar_curvature_semi(&alpha, &beta, y)?;
    let def = oracle::ricci_tensor_def(metric, x, y)?;
    let (g1, g2) = gamma_decomposition(&alpha, &beta, &ctx, Variant::Corrected);
    let g = randers::fundamental_tensor(&alpha, &beta, y)?;
    let conf = classify::check_conformal_s(conformal, x, y, 0.0)?;
    Ok(SampleRow {
        x: x.to_vec(),
        y: y.to_vec(),
        ricci_closed: randers::ricci_closed(&beta, &ctx),
        ricci_def: def.ricci,
        r_def: def.scalar,
        r_semi: semi.r,
        r_closed: closed,
        r_closed_printed: printed,
        s_closed: randers::s_curvature_closed(metric, x, y)?,
        s_def: randers::s_curvature(metric, x, y)?,
        gamma_identity_error: gamma_error(g1, g2, ctx.alpha, ctx.f, closed),
        inverse_metric_error: inverse_error(&semi.g_inv, &g),
        conformal_error: conf.residual,
    })
}

pub fn volume_row(metric: &MetricDefinition, x: &[f64], seed: u64) -> randers_core::Result<VolumeRow> {
    let (alpha, beta) = geometry_at(metric, x)?;
    let closed = randers::sigma_bh(&alpha, &beta)?;
    let n = metric.dim();
    let (method, nodes, vol) = if n == 2 {
        ("trapezoid", CIRCLE_NODES, oracle::indicatrix_volume_circle(metric, x, CIRCLE_NODES)?)
    } else {
        ("monte_carlo", MONTE_CARLO_SAMPLES, oracle::indicatrix_volume_monte_carlo(metric, x, MONTE_CARLO_SAMPLES, seed)?)
    };
    let quad = oracle::sigma_bh_from_volume(n, vol);
    Ok(VolumeRow {
        x: x.to_vec(),
        method: method.to_string(),
        nodes,
        sigma_bh_closed: closed,
        sigma_bh_quadrature: quad,
        relative_error: (quad - closed).abs() / closed,
    })
}

pub fn volume_tol(n: usize) -> f64 {
    if n == 2 {
        1e-6
    } else {
        1e-3
    }
}

pub fn divisibility_row(metric: &MetricDefinition, x: &[f64]) -> randers_core::Result<DivisibilityRow> {
    let d = check_gamma_divisibility(metric, x, Variant::Corrected, None)?;
    let p = check_gamma_divisibility(metric, x, Variant::Printed, None)?;
    Ok(DivisibilityRow {
        x: x.to_vec(),
        relative_residual: d.division.relative_residual(),
        scale: d.division.scale,
        condition: d.condition,
        divisible: d.division.divisible,
        published_relative_residual: p.division.relative_residual(),
    })
}

/// Route agreement, identities, volume, divisibility and the conformal
/// relation on `settings.samples` seeded points.
pub fn verify(metric: &MetricDefinition, source: MetricSource, settings: Settings) -> Result<Document> {
    let start = Instant::now();
    let tol = settings.tol;
    let points = sample_points(metric, settings.samples, settings.seed)?;
    let conformal = classify::conformal_scale(metric, VERIFY_SIGMA)?;
    let mut doc = Document::new("verify", source, metric.dim(), settings);

    let t = Instant::now();
    let rows: Vec<SampleRow> = points
        .par_iter()
        .map(|(x, y)| sample_row(metric, &conformal, x, y))
        .collect::<randers_core::Result<_>>()?;
    doc.timings.phases_ms.insert("samples".into(), ms(t));

    let t = Instant::now();
    let xs: Vec<&Vec<f64>> = points.iter().map(|(x, _)| x).take(POINT_CHECKS).collect();
    let seed = doc.settings.seed;
    doc.volume = xs
        .par_iter()
        .enumerate()
        .map(|(k, x)| volume_row(metric, x, seed.wrapping_add(k as u64)))
        .collect::<randers_core::Result<_>>()?;
    doc.divisibility = xs
        .par_iter()
        .map(|x| divisibility_row(metric, x))
        .collect::<randers_core::Result<_>>()?;
    let m = (3 * (metric.dim() + 1)).max(doc.settings.samples.min(64));
    let einstein: Vec<PointClassification> = xs
        .par_iter()
        .map(|x| {
            let e = classify::fit_weak_einstein(metric, x, tol, m, seed)?;
            Ok(PointClassification {
                x: x.to_vec(),
                error: None,
                isotropic_s: None,
                weakly_isotropic_r: None,
                weak_einstein: Some(ClassRow::from(&e)),
                theta_xi: None,
                implication: None,
            })
        })
        .collect::<randers_core::Result<_>>()?;
    doc.classification = einstein;
    doc.timings.phases_ms.insert("point_checks".into(), ms(t));

    let rel = |a: f64, b: f64| (a - b).abs() / (1.0 + b.abs());
    let mut checks = vec![
        Check::new("ricci_routes", "closed vs definitional Ric, / (1 + |Ric|)", rows.iter().map(|r| rel(r.ricci_closed, r.ricci_def)), tol),
        Check::new("scalar_semi", "semi-closed vs definitional r, / (1 + |r|)", rows.iter().map(|r| rel(r.r_semi, r.r_def)), tol),
        Check::new("scalar_closed", "closed r (corrected tables) vs definitional", rows.iter().map(|r| rel(r.r_closed, r.r_def)), tol),
        Check::new("scalar_published", "closed r (published tables) vs definitional", rows.iter().map(|r| rel(r.r_closed_printed, r.r_def)), tol),
        Check::new("gamma_identity", "|G1 + alpha G2 - 4F^5 r| / (4F^5 (1 + |r|))", rows.iter().map(|r| r.gamma_identity_error), GAMMA_TOL),
        Check::new("inverse_metric", "closed g^ij against jet g_ij", rows.iter().map(|r| r.inverse_metric_error), INVERSE_TOL),
        Check::new("s_curvature", "closed vs definitional S, / (1 + |S|)", rows.iter().map(|r| rel(r.s_closed, r.s_def)), tol),
        Check::new("volume", "closed sigma_BH vs indicatrix quadrature", doc.volume.iter().map(|v| v.relative_error), volume_tol(metric.dim())),
        Check::new(
            "divisibility",
            "G2 beta - G1 + 18(n-1)(1-b^2) beta e00^2 modulo alpha^2 - beta^2",
            doc.divisibility.iter().map(|d| if d.divisible { 0.0 } else { d.relative_residual }),
            randers_core::polyalg::DIVISION_TOL,
        ),
        Check::new("conformal_s", "S of e^sigma F against S + F^2 sigma^r I_r", rows.iter().map(|r| r.conformal_error), tol),
    ];
    let corrected_ok = checks[2].status == Status::Pass;
    if checks[3].status == Status::Fail && corrected_ok {
        checks[3].status = Status::Explained;
    }
    doc.checks = checks;
    doc.samples = rows;
    doc.finish();
    doc.timings.total_ms = ms(start);
    Ok(doc)
}

fn classify_point(metric: &MetricDefinition, x: &[f64], settings: &Settings) -> PointClassification {
    let run = || -> randers_core::Result<PointClassification> {
        metric.validate_at(x)?;
        let imp = classify::isotropic_s_implication(metric, x, settings.tol, settings.samples, settings.seed)?;
        let tx = classify::check_theta_xi(metric, x, settings.tol, settings.samples, settings.seed)?;
        Ok(PointClassification {
            x: x.to_vec(),
            error: None,
            isotropic_s: Some(ClassRow::from(&imp.isotropic_s)),
            weakly_isotropic_r: Some(ClassRow::from(&imp.weakly_isotropic_r)),
            weak_einstein: Some(ClassRow::from(&tx.weak_einstein)),
            theta_xi: Some(ThetaXiRow {
                expected_theta: tx.expected_theta,
                max_diff: tx.max_diff,
                holds: tx.holds,
            }),
            implication: Some(imp.outcome.name().to_string()),
        })
    };
    run().unwrap_or_else(|e| PointClassification {
        x: x.to_vec(),
        error: Some(e.to_string()),
        isotropic_s: None,
        weakly_isotropic_r: None,
        weak_einstein: None,
        theta_xi: None,
        implication: None,
    })
}

/// Class tests at every grid point plus the implication summary.
pub fn classify(metric: &MetricDefinition, source: MetricSource, grid: &[Vec<f64>], settings: Settings) -> Result<Document> {
    let start = Instant::now();
    let n = metric.dim();
    if settings.samples < 3 * (n + 1) {
        return Err(usage(format!("classify needs --samples >= {}", 3 * (n + 1))));
    }
    let results: Vec<PointClassification> = grid.par_iter().map(|x| classify_point(metric, x, &settings)).collect();
    let mut s = ImplicationSummary {
        points: results.len(),
        ..Default::default()
    };
    for r in &results {
        if r.error.is_some() {
            continue;
        }
        s.evaluated += 1;
        let holds = |c: &Option<ClassRow>| c.as_ref().is_some_and(|c| c.holds) as usize;
        s.isotropic_s_holds += holds(&r.isotropic_s);
        s.weakly_isotropic_r_holds += holds(&r.weakly_isotropic_r);
        s.weak_einstein_holds += holds(&r.weak_einstein);
        match r.implication.as_deref() {
            Some(v) if v == Implication::Confirmed.name() => s.confirmed += 1,
            Some(v) if v == Implication::Violated.name() => s.violated += 1,
            Some(v) if v == Implication::Inconclusive.name() => s.inconclusive += 1,
            _ => s.antecedent_false += 1,
        }
    }
    if s.evaluated == 0 {
        let why = results.first().and_then(|r| r.error.clone()).unwrap_or_default();
        return Err(usage(format!("no grid point is admissible ({why})")));
    }
    let mut doc = Document::new("classify", source, n, settings);
    doc.checks.push(Check::new(
        "implication",
        "points where weakly isotropic r holds but isotropic S fails",
        [s.violated as f64],
        1.0,
    ));
    doc.implication = Some(s);
    doc.classification = results;
    doc.finish();
    doc.timings.total_ms = ms(start);
    Ok(doc)
}

