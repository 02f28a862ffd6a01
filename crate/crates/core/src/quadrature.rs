//! Area integrals over the unit disc with refinement-based convergence
//! classification.
//!
//! Every integral over a domain is pulled back to the disc first, so the only
//! possible singularities of an integrand sit on the unit circle. The rule is a
//! polar midpoint rule in `(t, theta)` with `r = 1 - (1 - t)^gamma`, which
//! clusters rings toward `r = 1` and never evaluates on the circle or at the
//! origin. Each level doubles both cell counts.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::{ConformalMap, Direction};

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_LEVELS: usize = 8;

/// Ratio of successive increments at or above which refinement growth counts
/// as divergence. A convergent improper integral with local singular order
/// `delta` has increment ratio `2^-delta`; `0.97` separates `delta >= 0.05`.
pub const DIVERGENCE_RATIO: f64 = 0.97;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Converged,
    Divergent,
    Inconclusive,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Converged => "converged",
            Verdict::Divergent => "divergent",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub levels_used: usize,
    pub verdict: Verdict,
    /// Raw quadrature value at each refinement level.
    pub level_values: Vec<f64>,
}

impl QuadResult {
    pub fn is_converged(&self) -> bool {
        self.verdict == Verdict::Converged
    }
}

/// Base grid of the refinement sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscGridSpec {
    pub n_r: usize,
    pub n_theta: usize,
    pub radial_grading: f64,
}

impl Default for DiscGridSpec {
    fn default() -> Self {
        Self {
            n_r: 16,
            n_theta: 16,
            radial_grading: 3.0,
        }
    }
}

impl DiscGridSpec {
    pub fn new(n_r: usize, n_theta: usize, radial_grading: f64) -> Result<Self> {
        let spec = Self {
            n_r,
            n_theta,
            radial_grading,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, n) in [("n_r", self.n_r), ("n_theta", self.n_theta)] {
            if n < 8 || !n.is_power_of_two() {
                return Err(Error::InvalidGrid(format!(
                    "{name} must be a power of two >= 8, got {n}"
                )));
            }
        }
        if !(self.radial_grading >= 1.0 && self.radial_grading.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "radial grading must be >= 1, got {}",
                self.radial_grading
            )));
        }
        Ok(())
    }

    /// The grid used at refinement level `level` (0-based).
    pub fn at_level(&self, level: usize) -> Self {
        Self {
            n_r: self.n_r << level,
            n_theta: self.n_theta << level,
            ..*self
        }
    }
}

/// Sum in a fixed binary-tree order, independent of how the terms were
/// produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let (a, b) = xs.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// One application of the graded polar midpoint rule.
pub fn disc_rule<F>(f: &F, grid: &DiscGridSpec) -> Result<f64>
where
    F: Fn(Complex64) -> f64 + Sync,
{
    let (n_r, n_t, gamma) = (grid.n_r, grid.n_theta, grid.radial_grading);
    let dt = 1.0 / n_r as f64;
    let dtheta = 2.0 * PI / n_t as f64;
    let angles: Vec<Complex64> = (0..n_t)
        .map(|j| Complex64::from_polar(1.0, (j as f64 + 0.5) * dtheta))
        .collect();
    let rings: Vec<Result<f64>> = (0..n_r)
        .into_par_iter()
        .map(|i| {
            let t = (i as f64 + 0.5) * dt;
            let gap = 1.0 - t;
            let r = 1.0 - gap.powf(gamma);
            let jac = gamma * gap.powf(gamma - 1.0);
            let mut vals = Vec::with_capacity(n_t);
            for e in &angles {
                let w = r * e;
                let v = f(w);
                if !v.is_finite() {
                    return Err(Error::IntegrandNotFinite { re: w.re, im: w.im });
                }
                vals.push(v);
            }
            Ok(pairwise_sum(&vals) * r * jac * dt * dtheta)
        })
        .collect();
    let rings = rings.into_iter().collect::<Result<Vec<f64>>>()?;
    Ok(pairwise_sum(&rings))
}

/// Classify a refinement sequence.
pub fn classify(level_values: &[f64], tol: f64) -> (Verdict, f64, f64) {
    let n = level_values.len();
    let last = level_values[n - 1];
    if n < 2 {
        return (Verdict::Inconclusive, last, f64::INFINITY);
    }
    let inc: Vec<f64> = level_values.windows(2).map(|w| w[1] - w[0]).collect();
    let d = inc[inc.len() - 1];
    if d.abs() <= tol * last.abs().max(1.0) {
        return (Verdict::Converged, last, d.abs());
    }
    if inc.len() < 4 {
        return (Verdict::Inconclusive, last, d.abs());
    }
    let tail = &inc[inc.len() - 4..];
    let same_sign = tail.iter().all(|x| x.signum() == d.signum() && *x != 0.0);
    if !same_sign {
        return (Verdict::Inconclusive, last, d.abs());
    }
    let ratios: Vec<f64> = tail.windows(2).map(|w| w[1] / w[0]).collect();
    if ratios.iter().all(|&q| q >= DIVERGENCE_RATIO) {
        let growth = if d > 0.0 {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        };
        return (Verdict::Divergent, growth, f64::INFINITY);
    }
    if ratios.iter().all(|&q| q < DIVERGENCE_RATIO) {
        // Geometric tail: the remaining increments sum to d q / (1 - q).
        let q = ratios[ratios.len() - 1];
        let rest = d * q / (1.0 - q);
        return (Verdict::Converged, last + rest, rest.abs());
    }
    (Verdict::Inconclusive, last, d.abs())
}

/// Integrate `f` over the unit disc, doubling the grid up to `max_levels`
/// times.
pub fn integrate_disc<F>(
    f: F,
    spec: DiscGridSpec,
    max_levels: usize,
    tol: f64,
) -> Result<QuadResult>
where
    F: Fn(Complex64) -> f64 + Sync,
{
    spec.validate()?;
    if max_levels == 0 {
        return Err(Error::InvalidArgument("max_levels must be positive".into()));
    }
    let mut level_values = Vec::with_capacity(max_levels);
    for level in 0..max_levels {
        level_values.push(disc_rule(&f, &spec.at_level(level))?);
        if level >= 1 {
            let d = level_values[level] - level_values[level - 1];
            if d.abs() <= tol * level_values[level].abs().max(1.0) {
                break;
            }
        }
    }
    let (verdict, value, error_estimate) = classify(&level_values, tol);
    Ok(QuadResult {
        value,
        error_estimate,
        levels_used: level_values.len(),
        verdict,
        level_values,
    })
}

fn require_to_disc(map: &ConformalMap) -> Result<()> {
    if map.direction() == Direction::ToDisc {
        Ok(())
    } else {
        Err(Error::WrongDirection {
            expected: "to-disc",
        })
    }
}

/// `∫_Ω |phi'|^s dμ`, computed as `∫_D |psi'|^(2-s) dμ`.
pub fn brennan_direct(
    map: &ConformalMap,
    s: f64,
    spec: DiscGridSpec,
    max_levels: usize,
    tol: f64,
) -> Result<QuadResult> {
    require_to_disc(map)?;
    let exponent = 2.0 - s;
    integrate_disc(
        |w| map.inverse_unchecked(w).1.norm().powf(exponent),
        spec,
        max_levels,
        tol,
    )
}

/// `∫_D |psi'|^alpha dμ` for the inverse of a to-disc map.
pub fn inverse_brennan(
    map: &ConformalMap,
    alpha: f64,
    spec: DiscGridSpec,
    max_levels: usize,
    tol: f64,
) -> Result<QuadResult> {
    require_to_disc(map)?;
    integrate_disc(
        |w| map.inverse_unchecked(w).1.norm().powf(alpha),
        spec,
        max_levels,
        tol,
    )
}

/// Exponent `s = (p-2) q / (p-q)` of the dilatation integral.
pub fn kpq_exponent(p: f64, q: f64) -> Result<f64> {
    if !(p.is_finite() && q.is_finite()) || q < 1.0 || q >= p {
        return Err(Error::InvalidExponents(format!(
            "need 1 <= q < p < inf, got p = {p}, q = {q}"
        )));
    }
    Ok((p - 2.0) * q / (p - q))
}

/// The dilatation constant `K_(p,q)`. The returned `value` is already raised
/// to the power `(p-q)/(pq)`; `level_values` hold the raw integral.
pub fn kpq_norm(
    map: &ConformalMap,
    p: f64,
    q: f64,
    spec: DiscGridSpec,
    max_levels: usize,
    tol: f64,
) -> Result<QuadResult> {
    let s = kpq_exponent(p, q)?;
    let mut res = brennan_direct(map, s, spec, max_levels, tol)?;
    let power = (p - q) / (p * q);
    let integral = res.value;
    res.value = integral.powf(power);
    // first-order propagation of the integral's error estimate
    res.error_estimate = if res.is_converged() && integral > 0.0 {
        power * res.value * res.error_estimate / integral
    } else {
        f64::INFINITY
    };
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::DomainFamily;

    fn quick() -> DiscGridSpec {
        DiscGridSpec::default()
    }

    #[test]
    fn polynomial_integrands() {
        let one = integrate_disc(|_| 1.0, quick(), 8, 1e-10).unwrap();
        assert_eq!(one.verdict, Verdict::Converged);
        assert!((one.value - PI).abs() <= 1e-6 * PI);

        let r2 = integrate_disc(|w| w.norm_sqr(), quick(), 8, 1e-9).unwrap();
        assert_eq!(r2.verdict, Verdict::Converged);
        assert!((r2.value - PI / 2.0).abs() <= 1e-6 * PI / 2.0);
    }

    #[test]
    fn log_divergence_detected() {
        let res = integrate_disc(|w| 1.0 / (1.0 - w.norm()), quick(), 8, 1e-6).unwrap();
        assert_eq!(res.verdict, Verdict::Divergent);
        assert_eq!(res.levels_used, 8);
    }

    #[test]
    fn nan_integrand_is_an_error() {
        let err = integrate_disc(
            |w| if w.re > 0.5 { f64::NAN } else { 1.0 },
            quick(),
            3,
            1e-6,
        );
        assert!(matches!(err, Err(Error::IntegrandNotFinite { .. })));
    }

    #[test]
    fn grid_validation() {
        assert!(DiscGridSpec::new(12, 16, 3.0).is_err());
        assert!(DiscGridSpec::new(4, 16, 3.0).is_err());
        assert!(DiscGridSpec::new(16, 16, 0.5).is_err());
        assert_eq!(DiscGridSpec::default().at_level(7).n_r, 2048);
    }

    #[test]
    fn pairwise_sum_is_order_fixed() {
        let xs: Vec<f64> = (0..1000).map(|i| 1.0 / (i as f64 + 1.0)).collect();
        assert_eq!(
            pairwise_sum(&xs).to_bits(),
            pairwise_sum(&xs.clone()).to_bits()
        );
        assert!((pairwise_sum(&xs) - xs.iter().sum::<f64>()).abs() < 1e-12);
    }

    #[test]
    fn reruns_are_bit_identical() {
        let m = ConformalMap::to_disc(DomainFamily::SlitPlane);
        let a = brennan_direct(&m, 3.0, quick(), 5, 1e-6).unwrap();
        let b = brennan_direct(&m, 3.0, quick(), 5, 1e-6).unwrap();
        let bits = |r: &QuadResult| {
            r.level_values
                .iter()
                .map(|v| v.to_bits())
                .collect::<Vec<_>>()
        };
        assert_eq!(bits(&a), bits(&b));
    }

    #[test]
    fn kpq_exponent_checks() {
        assert!(kpq_exponent(2.0, 2.0).is_err());
        assert!(kpq_exponent(2.0, 0.5).is_err());
        assert_eq!(kpq_exponent(2.0, 1.0).unwrap(), 0.0);
        let ext = ConformalMap::to_disc(DomainFamily::ExteriorOfDisc);
        assert!(matches!(
            kpq_norm(&ext, 2.0, 2.0, quick(), 4, 1e-6),
            Err(Error::InvalidExponents(_))
        ));
    }
}
