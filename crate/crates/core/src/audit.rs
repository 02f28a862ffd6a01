//! Tabulated closed-form weights checked against `|phi'|^2` computed from the
//! maps themselves.
//!
//! Two of the commonly quoted formulas do not survive this check: the strip
//! weight `1/|z^2 + 1|^2` (with its expanded form
//! `1/((x^2+y^2)^2 + x^2 - y^2 + 1)`), and the cardioid pair
//! `phi = sqrt(z) - 1`, `h = 1/(2 sqrt|z|)`. The audit reproduces both
//! mismatches instead of trusting the tables.

use num_complex::Complex64;
use serde::Serialize;

use crate::maps::{boundary_deviation, ConformalMap, DomainFamily, BOUNDARY_OFFSETS};
use crate::weight::WeightField;

/// Tabulated weight for a family, where one is quoted.
pub fn tabulated_weight(family: DomainFamily, z: Complex64) -> Option<f64> {
    let (x, y) = (z.re, z.im);
    let r2 = x * x + y * y;
    match family {
        DomainFamily::ExteriorOfDisc => Some(1.0 / (r2 * r2)),
        DomainFamily::UpperHalfPlane => {
            let d = x * x + (y + 1.0) * (y + 1.0);
            Some(4.0 / (d * d))
        }
        DomainFamily::Strip => Some(1.0 / (r2 * r2 + x * x - y * y + 1.0)),
        DomainFamily::Cardioid => Some(1.0 / (2.0 * r2.sqrt().sqrt())),
        DomainFamily::DiscIdentity | DomainFamily::SlitPlane => None,
    }
}

/// The tabulated cardioid map `sqrt(z) - 1`.
pub fn tabulated_cardioid_map(z: Complex64) -> Complex64 {
    z.sqrt() - 1.0
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightAudit {
    pub domain: DomainFamily,
    pub samples: usize,
    /// Max `|h_computed - h_tabulated|` over interior samples.
    pub max_abs_gap: f64,
    /// One representative point `(x, y, computed, tabulated)`.
    pub probe: (f64, f64, f64, f64),
}

/// Compare the tabulated weight of `family` to `|phi'|^2` at `samples`
/// interior points, plus a fixed probe point.
pub fn audit_weight(
    family: DomainFamily,
    samples: usize,
    seed: u64,
    probe: Complex64,
) -> Option<WeightAudit> {
    let w = WeightField::for_family(family);
    tabulated_weight(family, probe)?;
    let mut max_abs_gap = 0.0f64;
    let mut count = 0;
    for z in family.interior_samples(samples, seed) {
        let (Ok(h), Some(t)) = (w.eval(z), tabulated_weight(family, z)) else {
            continue;
        };
        max_abs_gap = max_abs_gap.max((h - t).abs());
        count += 1;
    }
    let h = w.eval(probe).ok()?;
    Some(WeightAudit {
        domain: family,
        samples: count,
        max_abs_gap,
        probe: (probe.re, probe.im, h, tabulated_weight(family, probe)?),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CardioidAudit {
    /// `|phi'|^2` of the tabulated map `sqrt(z) - 1` at the probe point.
    pub tabulated_map_jacobian: f64,
    /// The tabulated weight `1/(2 sqrt|z|)` at the probe point.
    pub tabulated_weight: f64,
    /// `|phi'|^2` of the corrected map `2 sqrt(z) - 1` at the probe point.
    pub corrected_weight: f64,
    pub probe: f64,
    /// Boundary-image deviation of the tabulated map.
    pub tabulated_boundary_deviation: f64,
    /// Boundary-image deviation of the corrected map.
    pub corrected_boundary_deviation: f64,
}

pub fn audit_cardioid(probe: f64, n: usize) -> CardioidAudit {
    let z = Complex64::new(probe, 0.0);
    let d_tab = 0.5 / z.sqrt();
    let corrected = ConformalMap::to_disc(DomainFamily::Cardioid);
    CardioidAudit {
        tabulated_map_jacobian: d_tab.norm_sqr(),
        tabulated_weight: tabulated_weight(DomainFamily::Cardioid, z).unwrap_or(f64::NAN),
        corrected_weight: WeightField::for_family(DomainFamily::Cardioid)
            .eval(z)
            .unwrap_or(f64::NAN),
        probe,
        tabulated_boundary_deviation: boundary_deviation(
            DomainFamily::Cardioid,
            n,
            &BOUNDARY_OFFSETS,
            tabulated_cardioid_map,
        ),
        corrected_boundary_deviation: corrected.boundary_image_check(n).unwrap_or(f64::NAN),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_formulas_agree() {
        for family in [DomainFamily::ExteriorOfDisc, DomainFamily::UpperHalfPlane] {
            let a = audit_weight(family, 100, 1, Complex64::new(0.3, 2.0)).unwrap();
            assert!(a.max_abs_gap <= 1e-12, "{family}: {}", a.max_abs_gap);
        }
    }

    #[test]
    fn strip_mismatch() {
        let a = audit_weight(DomainFamily::Strip, 100, 1, Complex64::new(0.5, 0.0)).unwrap();
        let (_, _, computed, tabulated) = a.probe;
        // sec^4(0.5) and 1/(0.0625 + 0.25 + 1)
        assert!((computed - 1.0 / 0.5f64.cos().powi(4)).abs() < 1e-12);
        assert!((computed - 1.68597).abs() < 1e-5);
        assert!((tabulated - 0.7619).abs() < 1e-4);
        assert!(a.max_abs_gap > 0.1);
    }

    #[test]
    fn cardioid_mismatch() {
        let a = audit_cardioid(0.0625, 64);
        assert!((a.tabulated_map_jacobian - 4.0).abs() < 1e-12);
        assert!((a.tabulated_weight - 2.0).abs() < 1e-12);
        assert!((a.corrected_weight - 16.0).abs() < 1e-12);
        assert!(a.corrected_boundary_deviation < 1e-2);
        assert!(a.tabulated_boundary_deviation > 0.4);
        assert!(tabulated_weight(DomainFamily::SlitPlane, Complex64::new(1.0, 0.0)).is_none());
    }
}
