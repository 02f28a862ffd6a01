//! The invariant suite behind `cw verify`.
//!
//! Every check is deterministic: fixed seeds, fixed grids, and order-fixed
//! reductions, so the serialized report is byte-identical across runs.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::audit;
use crate::bessel::j0_first_zero;
use crate::embedding::{
    exponent_bounds, poincare_constant_disc, q_from_ps, weighted_constant_check, DEFAULT_ALPHA0,
};
use crate::field::{bump_family, composition_inequality_check, isometry_check, PolarGrid};
use crate::maps::{ConformalMap, DomainFamily, MoebiusAutomorphism};
use crate::poisson::{order_of, solve, weak_residual, DirichletProblem, Rhs};
use crate::quadrature::{
    brennan_direct, integrate_disc, inverse_brennan, kpq_norm, DiscGridSpec, Verdict,
    DEFAULT_MAX_LEVELS, DEFAULT_TOL,
};
use crate::weight::{
    equivalence_bounds, weight_class_check, weight_equivalence_check, Rect, WeightField,
};
use crate::Result;

/// Pinned thresholds of the suite.
pub mod tol {
    pub const ROUND_TRIP: f64 = 1e-12;
    pub const ANALYTIC: f64 = 1e-7;
    pub const JACOBIAN: f64 = 1e-6;
    pub const BOUNDARY: f64 = 1e-2;
    pub const TABULATED: f64 = 1e-12;
    pub const MASS: f64 = 1e-4;
    pub const MASS_LEVELS: usize = 6;
    pub const ISOMETRY: f64 = 1e-6;
    pub const ISOMETRY_IDENTITY: f64 = 1e-12;
    pub const KPQ: f64 = 1e-4;
    pub const POINCARE: f64 = 0.01;
    pub const TRANSFER: f64 = 1e-6;
    pub const CONSTANT_SLACK: f64 = 1e-4;
    pub const SOLVER_ERROR: f64 = 1e-3;
    pub const ORDER: f64 = 1.9;
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
}

fn check(name: &'static str, passed: bool, detail: Value) -> Check {
    Check {
        name,
        passed,
        detail,
    }
}

/// Koebe-type quarter-theorem step for finite differences at `z`.
fn fd_step(m: &ConformalMap, z: Complex64) -> Result<f64> {
    let d = m.derivative(z)?;
    Ok(1e-4 * (1.0 - m.eval(z)?.norm_sqr()) / (4.0 * d.norm()))
}

fn map_checks(out: &mut Vec<Check>) -> Result<()> {
    let i = Complex64::new(0.0, 1.0);
    let (mut trip, mut analytic, mut jac, mut boundary) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for family in DomainFamily::ALL {
        let m = ConformalMap::to_disc(family);
        for z in family.interior_samples(200, 0xA11) {
            let back = m.invert().eval(m.eval(z)?)?;
            trip = trip.max((back - z).norm() / z.norm().max(1.0));
            let h = fd_step(&m, z)?;
            let d = m.derivative(z)?;
            let fx = (m.eval(z + h)? - m.eval(z - h)?) / (2.0 * h);
            let fy = (m.eval(z + i * h)? - m.eval(z - i * h)?) / (2.0 * h);
            analytic = analytic
                .max((fx - d).norm() / d.norm())
                .max((fy - i * d).norm() / d.norm());
            let det = fx.re * fy.im - fy.re * fx.im;
            jac = jac.max((det - d.norm_sqr()).abs() / d.norm_sqr());
        }
        boundary = boundary.max(m.boundary_image_check(64)?);
    }
    out.push(check(
        "maps.round_trip",
        trip <= tol::ROUND_TRIP,
        json!({ "max_rel": trip }),
    ));
    out.push(check(
        "maps.analyticity",
        analytic <= tol::ANALYTIC,
        json!({ "max_rel": analytic }),
    ));
    out.push(check(
        "maps.jacobian_identity",
        jac <= tol::JACOBIAN,
        json!({ "max_rel": jac }),
    ));
    out.push(check(
        "maps.boundary_image",
        boundary < tol::BOUNDARY,
        json!({ "max_deviation": boundary }),
    ));
    Ok(())
}

fn weight_checks(out: &mut Vec<Check>) -> Result<()> {
    let mut gaps = Vec::new();
    for family in [DomainFamily::ExteriorOfDisc, DomainFamily::UpperHalfPlane] {
        if let Some(a) = audit::audit_weight(family, 100, 0xB0, Complex64::new(0.5, 2.0)) {
            gaps.push((family, a.max_abs_gap));
        }
    }
    let worst = gaps.iter().map(|g| g.1).fold(0.0, f64::max);
    out.push(check(
        "weight.tabulated_formulas",
        gaps.len() == 2 && worst <= tol::TABULATED,
        json!({ "max_abs_gap": worst }),
    ));

    let strip = audit::audit_weight(DomainFamily::Strip, 100, 0xB0, Complex64::new(0.5, 0.0));
    let strip_ok = strip.as_ref().is_some_and(|a| {
        (a.probe.2 - 1.0 / 0.5f64.cos().powi(4)).abs() < 1e-12
            && (a.probe.2 - a.probe.3).abs() > 0.1
    });
    out.push(check(
        "weight.strip_tabulated_mismatch",
        strip_ok,
        json!({
            "z": [0.5, 0.0],
            "computed": strip.as_ref().map(|a| a.probe.2),
            "tabulated": strip.as_ref().map(|a| a.probe.3),
        }),
    ));

    let card = audit::audit_cardioid(0.0625, 64);
    let card_ok = (card.tabulated_map_jacobian - 4.0).abs() < 1e-12
        && (card.tabulated_weight - 2.0).abs() < 1e-12
        && card.corrected_boundary_deviation < tol::BOUNDARY
        && card.tabulated_boundary_deviation > 0.4;
    out.push(check(
        "weight.cardioid_tabulated_mismatch",
        card_ok,
        serde_json::to_value(&card).unwrap_or(Value::Null),
    ));

    let mut min_h = f64::INFINITY;
    for family in DomainFamily::ALL {
        let w = WeightField::for_family(family);
        for z in family.interior_samples(10_000, 0xB1) {
            min_h = min_h.min(w.eval(z)?);
        }
    }
    out.push(check(
        "weight.positivity",
        min_h > 0.0,
        json!({ "min_h": min_h }),
    ));

    let mut eq_ok = true;
    let mut ranges = Vec::new();
    for family in [DomainFamily::UpperHalfPlane, DomainFamily::Cardioid] {
        let m = ConformalMap::to_disc(family);
        let w1 = WeightField::new(m)?;
        for a in [0.0, 0.5, 0.9] {
            let eta = MoebiusAutomorphism::new(Complex64::from_polar(a, 0.4), 0.3)?;
            let w2 = WeightField::new(m.compose_with_automorphism(&eta)?)?;
            let (lo, hi) = weight_equivalence_check(&w1, &w2, 500)?;
            let (blo, bhi) = equivalence_bounds(a);
            eq_ok &= lo >= blo * (1.0 - 1e-12) && hi <= bhi * (1.0 + 1e-12);
            ranges.push(json!({ "domain": family, "a": a, "min": lo, "max": hi }));
        }
    }
    out.push(check(
        "weight.equivalence_bounds",
        eq_ok,
        Value::Array(ranges),
    ));

    let hp = WeightField::for_family(DomainFamily::UpperHalfPlane);
    let ext = WeightField::for_family(DomainFamily::ExteriorOfDisc);
    let reports = [
        weight_class_check(&hp, 2.0, Rect::new(-1.0, 1.0, 1.0, 2.0)?)?,
        weight_class_check(&ext, 3.0, Rect::new(2.0, 3.0, 2.0, 3.0)?)?,
        weight_class_check(&hp, 1.0, Rect::new(-1.0, 1.0, 1.0, 2.0)?)?,
    ];
    out.push(check(
        "weight.local_class",
        reports.iter().all(|r| r.in_class),
        serde_json::to_value(&reports).unwrap_or(Value::Null),
    ));
    Ok(())
}

fn quadrature_checks(out: &mut Vec<Check>) -> Result<()> {
    let spec = DiscGridSpec::default();
    let mut worst = 0.0f64;
    for family in DomainFamily::ALL {
        let w = WeightField::for_family(family);
        let res = integrate_disc(
            |x| w.pulled_back_density(x),
            spec,
            tol::MASS_LEVELS,
            DEFAULT_TOL,
        )?;
        worst = worst.max((res.value - PI).abs() / PI);
    }
    out.push(check(
        "quadrature.mass_identity",
        worst <= tol::MASS,
        json!({ "max_rel": worst }),
    ));

    let slit = ConformalMap::to_disc(DomainFamily::SlitPlane);
    let mut rows = Vec::new();
    let mut ok = true;
    for (s, expect) in [
        (1.3, Verdict::Divergent),
        (1.5, Verdict::Converged),
        (2.0, Verdict::Converged),
        (3.0, Verdict::Converged),
        (3.9, Verdict::Converged),
        (4.1, Verdict::Divergent),
    ] {
        let r = brennan_direct(&slit, s, spec, DEFAULT_MAX_LEVELS, DEFAULT_TOL)?;
        ok &= r.verdict == expect;
        rows.push(
            json!({ "s": s, "verdict": r.verdict, "value": r.value, "levels": r.levels_used }),
        );
    }
    out.push(check(
        "quadrature.brennan_slitplane",
        ok,
        Value::Array(rows),
    ));

    let mut rows = Vec::new();
    let mut ok = true;
    for (alpha, expect) in [
        (-1.9, Verdict::Converged),
        (0.0, Verdict::Converged),
        (0.7, Verdict::Divergent),
    ] {
        let r = inverse_brennan(&slit, alpha, spec, DEFAULT_MAX_LEVELS, DEFAULT_TOL)?;
        ok &= r.verdict == expect;
        if alpha == 0.0 {
            ok &= (r.value - PI).abs() <= 1e-6 * PI;
        }
        rows.push(json!({ "alpha": alpha, "verdict": r.verdict, "value": r.value }));
    }
    out.push(check(
        "quadrature.inverse_brennan_slitplane",
        ok,
        Value::Array(rows),
    ));

    let card = ConformalMap::to_disc(DomainFamily::Cardioid);
    let k = kpq_norm(&card, 2.0, 1.0, spec, DEFAULT_MAX_LEVELS, DEFAULT_TOL)?;
    let exact = (3.0 * PI / 8.0).sqrt();
    let ext = kpq_norm(
        &ConformalMap::to_disc(DomainFamily::ExteriorOfDisc),
        2.0,
        1.0,
        spec,
        DEFAULT_MAX_LEVELS,
        DEFAULT_TOL,
    )?;
    out.push(check(
        "quadrature.kpq",
        k.is_converged()
            && (k.value - exact).abs() <= tol::KPQ * exact
            && ext.verdict == Verdict::Divergent,
        json!({ "cardioid_k": k.value, "exact": exact, "exterior_verdict": ext.verdict }),
    ));
    Ok(())
}

fn field_checks(out: &mut Vec<Check>, seed: u64) -> Result<()> {
    let bumps = bump_family(5, seed);
    let mut rows = Vec::new();
    let mut ok = true;
    for family in DomainFamily::ALL {
        let dev = isometry_check(&ConformalMap::to_disc(family), &bumps)?;
        let limit = if family == DomainFamily::DiscIdentity {
            tol::ISOMETRY_IDENTITY
        } else {
            tol::ISOMETRY
        };
        ok &= dev <= limit;
        rows.push(json!({ "domain": family, "max_rel": dev }));
    }
    out.push(check("field.isometry", ok, Value::Array(rows)));

    let card = ConformalMap::to_disc(DomainFamily::Cardioid);
    let reports = composition_inequality_check(&card, 2.0, 1.5, &bump_family(20, seed))?;
    let worst = reports
        .iter()
        .map(|r| {
            if r.source_norm > 0.0 {
                r.composed_norm / (r.k * r.source_norm)
            } else {
                0.0
            }
        })
        .fold(0.0, f64::max);
    out.push(check(
        "field.composition_inequality",
        reports.iter().all(|r| r.passes),
        json!({ "bumps": reports.len(), "max_ratio_to_bound": worst }),
    ));
    Ok(())
}

fn embedding_checks(out: &mut Vec<Check>, seed: u64) -> Result<()> {
    let j = j0_first_zero();
    let est = poincare_constant_disc(2.0, PolarGrid::new(256, 256)?, seed)?;
    let oracle = 1.0 / j;
    let rel = (est.value - oracle).abs() / oracle;
    out.push(check(
        "embedding.poincare_disc",
        rel <= tol::POINCARE,
        json!({ "estimate": est.value, "oracle": oracle, "rel": rel, "iterations": est.iterations }),
    ));

    let bumps = bump_family(5, seed);
    let mut mismatch = 0.0f64;
    let mut ratio = 0.0f64;
    for family in DomainFamily::ALL {
        let m = ConformalMap::to_disc(family);
        mismatch = mismatch.max(weighted_constant_check(&m, 3.0, &bumps)?.max_mismatch);
        let two = weighted_constant_check(&m, 2.0, &bumps)?;
        mismatch = mismatch.max(two.max_mismatch);
        ratio = ratio.max(two.max_ratio);
    }
    out.push(check(
        "embedding.weighted_transfer",
        mismatch <= tol::TRANSFER && ratio <= est.value * (1.0 + tol::CONSTANT_SLACK),
        json!({ "max_mismatch": mismatch, "max_ratio_r2": ratio, "disc_constant": est.value }),
    ));

    let mut ok = true;
    let mut count = 0;
    for a in 0..20 {
        let alpha0 = -2.0 + 1.9 * a as f64 / 19.0;
        let pm = crate::embedding::p_min(alpha0);
        for k in 0..20 {
            let p = pm + (2.0 - pm) * (k as f64 + 0.5) / 20.0;
            let b = exponent_bounds(p, alpha0)?;
            ok &= b.chain_holds();
            if alpha0 == -2.0 {
                ok &= (b.q_max - b.q_ceiling).abs() <= 4.0 * f64::EPSILON * b.q_ceiling;
            }
            count += 1;
        }
    }
    for p in [2.5, 3.0, 4.0, 10.0] {
        ok &= q_from_ps(p, 2.0)? == 2.0;
    }
    let sample = exponent_bounds(1.9, DEFAULT_ALPHA0)?;
    out.push(check(
        "embedding.exponent_chain",
        ok,
        json!({ "grid_points": count, "p1.9_default": sample }),
    ));
    Ok(())
}

fn poisson_checks(out: &mut Vec<Check>, seed: u64) -> Result<()> {
    let bumps = bump_family(5, seed);
    let mut rows = Vec::new();
    let mut ok = true;
    for family in DomainFamily::ALL {
        let p = DirichletProblem::new(ConformalMap::to_disc(family), Rhs::Constant(-4.0))?;
        let coarse = solve(&p, PolarGrid::new(128, 128)?)?;
        let fine = solve(&p, PolarGrid::new(256, 256)?)?;
        let (e1, e2) = (
            coarse.max_error(&p).unwrap_or(f64::NAN),
            fine.max_error(&p).unwrap_or(f64::NAN),
        );
        let (r1, r2) = (
            weak_residual(&coarse, &p, &bumps)?.max_residual,
            weak_residual(&fine, &p, &bumps)?.max_residual,
        );
        let (o, ro) = (order_of(e1, e2), order_of(r1, r2));
        ok &= e2 <= tol::SOLVER_ERROR && o >= tol::ORDER && ro >= tol::ORDER;
        rows.push(json!({ "domain": family, "error_256": e2, "order": o, "residual_256": r2, "residual_order": ro }));
    }
    out.push(check("poisson.constant_rhs", ok, Value::Array(rows)));

    let grid = PolarGrid::new(64, 64)?;
    let p = DirichletProblem::new(ConformalMap::to_disc(DomainFamily::Strip), Rhs::Quartic)?;
    let a = solve(&p, grid)?;
    let b = solve(&p, grid)?;
    let neg = DirichletProblem::new(
        ConformalMap::to_disc(DomainFamily::Strip),
        Rhs::Custom(std::sync::Arc::new(move |z| {
            -(16.0
                * ConformalMap::to_disc(DomainFamily::Strip)
                    .eval(z)
                    .map_or(f64::NAN, |w| w.norm_sqr())
                - 8.0)
        })),
    )?;
    let c = solve(&neg, grid)?;
    let same =
        a.v.values()
            .iter()
            .zip(b.v.values())
            .all(|(x, y)| x.to_bits() == y.to_bits());
    let linear =
        a.v.values()
            .iter()
            .zip(c.v.values())
            .all(|(x, y)| (x + y).abs() <= 1e-12);
    out.push(check(
        "poisson.determinism_linearity",
        same && linear,
        json!({ "bitwise_repeat": same, "negation": linear }),
    ));
    Ok(())
}

/// Run the full suite.
pub fn run(seed: u64) -> Result<VerifyReport> {
    let mut checks = Vec::new();
    map_checks(&mut checks)?;
    weight_checks(&mut checks)?;
    quadrature_checks(&mut checks)?;
    field_checks(&mut checks, seed)?;
    embedding_checks(&mut checks, seed)?;
    poisson_checks(&mut checks, seed)?;
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport {
        seed,
        passed,
        checks,
    })
}
