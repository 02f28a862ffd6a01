//! The universal conformal weight `h = |phi'|^2` and its diagnostics.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::{ConformalMap, Direction, DomainFamily};

#[cfg(test)]
thread_local! {
    pub(crate) static EVAL_COUNT: std::cell::Cell<usize> = const { std::cell::Cell::new(0) };
}

/// Jacobian weight of a to-disc uniformizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightField {
    map: ConformalMap,
}

impl WeightField {
    pub fn new(map: ConformalMap) -> Result<Self> {
        if map.direction() != Direction::ToDisc {
            return Err(Error::WrongDirection {
                expected: "to-disc",
            });
        }
        Ok(Self { map })
    }

    pub fn for_family(family: DomainFamily) -> Self {
        Self {
            map: ConformalMap::to_disc(family),
        }
    }

    pub fn map(&self) -> &ConformalMap {
        &self.map
    }

    pub fn family(&self) -> DomainFamily {
        self.map.family()
    }

    /// `h(z) = |phi'(z)|^2`.
    pub fn eval(&self, z: Complex64) -> Result<f64> {
        #[cfg(test)]
        EVAL_COUNT.with(|c| c.set(c.get() + 1));
        Ok(self.map.derivative(z)?.norm_sqr())
    }

    /// The weight pulled back to the disc and multiplied by the Jacobian of
    /// `psi`: `h(psi(w)) |psi'(w)|^2`, which is identically one in exact
    /// arithmetic.
    pub fn pulled_back_density(&self, w: Complex64) -> f64 {
        let (z, dpsi) = self.map.inverse_unchecked(w);
        self.map.forward_unchecked(z).1.norm_sqr() * dpsi.norm_sqr()
    }
}

/// Observed range of `h2 / h1` over interior samples, where `w2` is `w1`'s
/// map followed by a disc automorphism.
pub fn weight_equivalence_check(
    w1: &WeightField,
    w2: &WeightField,
    samples: usize,
) -> Result<(f64, f64)> {
    if w1.family() != w2.family() {
        return Err(Error::DomainMismatch(
            w1.family().name(),
            w2.family().name(),
        ));
    }
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for z in w1.family().interior_samples(samples, 0xE0) {
        let ratio = w2.eval(z)? / w1.eval(z)?;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    Ok((lo, hi))
}

/// Admissible range `[((1-|a|)/(1+|a|))^2, ((1+|a|)/(1-|a|))^2]` for the weight
/// ratio under an automorphism with parameter `a`.
pub fn equivalence_bounds(a_abs: f64) -> (f64, f64) {
    let k = ((1.0 + a_abs) / (1.0 - a_abs)).powi(2);
    (1.0 / k, k)
}

/// Closed axis-aligned rectangle `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        if [x0, x1, y0, y1].iter().all(|v| v.is_finite()) && x0 < x1 && y0 < y1 {
            Ok(Self { x0, x1, y0, y1 })
        } else {
            Err(Error::InvalidArgument(format!(
                "degenerate rectangle [{x0},{x1}]x[{y0},{y1}]"
            )))
        }
    }

    fn area(&self) -> f64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }

    /// `n x n` cell midpoints.
    fn midpoints(&self, n: usize) -> impl Iterator<Item = Complex64> + '_ {
        let (dx, dy) = (
            (self.x1 - self.x0) / n as f64,
            (self.y1 - self.y0) / n as f64,
        );
        (0..n).flat_map(move |i| {
            (0..n).map(move |j| {
                Complex64::new(
                    self.x0 + (i as f64 + 0.5) * dx,
                    self.y0 + (j as f64 + 0.5) * dy,
                )
            })
        })
    }

    /// `(n+1) x (n+1)` lattice including the edges.
    fn lattice(&self, n: usize) -> impl Iterator<Item = Complex64> + '_ {
        (0..=n).flat_map(move |i| {
            (0..=n).map(move |j| {
                Complex64::new(
                    self.x0 + (self.x1 - self.x0) * i as f64 / n as f64,
                    self.y0 + (self.y1 - self.y0) * j as f64 / n as f64,
                )
            })
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightClassReport {
    pub p: f64,
    pub compact_set: Rect,
    /// `∫ h^(1/(1-p))` over the rectangle, or `max h^-1` when `p = 1`.
    pub integral_value: f64,
    pub in_class: bool,
}

const CLASS_GRID: usize = 64;

/// Local `V_p` membership of the weight on a rectangle strictly inside the
/// domain.
pub fn weight_class_check(w: &WeightField, p: f64, rect: Rect) -> Result<WeightClassReport> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidExponents(format!("need p >= 1, got {p}")));
    }
    let family = w.family();
    // membership on a lattice twice as fine as the integration grid
    if !rect.lattice(2 * CLASS_GRID).all(|z| family.contains(z)) {
        return Err(Error::RectangleNotInterior(family.name()));
    }
    let integral_value = if p == 1.0 {
        let mut worst = 0.0f64;
        for z in rect.lattice(CLASS_GRID - 1) {
            worst = worst.max(1.0 / w.eval(z)?);
        }
        worst
    } else {
        let e = 1.0 / (1.0 - p);
        let mut vals = Vec::with_capacity(CLASS_GRID * CLASS_GRID);
        for z in rect.midpoints(CLASS_GRID) {
            vals.push(w.eval(z)?.powf(e));
        }
        crate::quadrature::pairwise_sum(&vals) * rect.area() / vals.len() as f64
    };
    Ok(WeightClassReport {
        p,
        compact_set: rect,
        integral_value,
        in_class: integral_value.is_finite(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::MoebiusAutomorphism;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn point_values() {
        let ext = WeightField::for_family(DomainFamily::ExteriorOfDisc);
        assert!((ext.eval(c(2.0, 0.0)).unwrap() - 0.0625).abs() < 1e-16);
        let hp = WeightField::for_family(DomainFamily::UpperHalfPlane);
        assert!((hp.eval(c(0.0, 1.0)).unwrap() - 0.25).abs() < 1e-16);
        let strip = WeightField::for_family(DomainFamily::Strip);
        assert_eq!(strip.eval(c(0.0, 0.0)).unwrap(), 1.0);
        assert!(hp.eval(c(0.0, -1.0)).is_err());
        assert!(WeightField::new(ConformalMap::from_disc(DomainFamily::Strip)).is_err());
    }

    #[test]
    fn positivity() {
        for family in DomainFamily::ALL {
            let w = WeightField::for_family(family);
            for z in family.interior_samples(10_000, 1) {
                assert!(w.eval(z).unwrap() > 0.0, "{family} at {z}");
            }
        }
    }

    #[test]
    fn equivalence_under_automorphisms() {
        let hp = ConformalMap::to_disc(DomainFamily::UpperHalfPlane);
        let w1 = WeightField::new(hp).unwrap();

        let rot = WeightField::new(
            hp.compose_with_automorphism(&MoebiusAutomorphism::rotation_by(0.7).unwrap())
                .unwrap(),
        )
        .unwrap();
        let (lo, hi) = weight_equivalence_check(&w1, &rot, 200).unwrap();
        assert!((lo - 1.0).abs() < 1e-12 && (hi - 1.0).abs() < 1e-12);

        for a in [0.5, 0.9] {
            let eta = MoebiusAutomorphism::new(c(0.0, a), 0.2).unwrap();
            let w2 = WeightField::new(hp.compose_with_automorphism(&eta).unwrap()).unwrap();
            let (lo, hi) = weight_equivalence_check(&w1, &w2, 500).unwrap();
            let (blo, bhi) = equivalence_bounds(a);
            assert!(
                lo >= blo * (1.0 - 1e-12) && hi <= bhi * (1.0 + 1e-12),
                "a={a}: {lo} {hi}"
            );
        }
        assert_eq!(equivalence_bounds(0.5), (1.0 / 9.0, 9.0));
        assert!((equivalence_bounds(0.9).1 - 361.0).abs() < 1e-9);

        let other = WeightField::for_family(DomainFamily::Strip);
        assert!(matches!(
            weight_equivalence_check(&w1, &other, 10),
            Err(Error::DomainMismatch(..))
        ));
    }

    #[test]
    fn class_checks() {
        let hp = WeightField::for_family(DomainFamily::UpperHalfPlane);
        let rep = weight_class_check(&hp, 2.0, Rect::new(-1.0, 1.0, 1.0, 2.0).unwrap()).unwrap();
        assert!(rep.in_class && rep.integral_value > 0.0);

        let ext = WeightField::for_family(DomainFamily::ExteriorOfDisc);
        let rep = weight_class_check(&ext, 3.0, Rect::new(2.0, 3.0, 2.0, 3.0).unwrap()).unwrap();
        assert!(rep.in_class);
        // h = 1/|z|^4, so h^(-1/2) = |z|^2; exact integral over [2,3]^2 is 2 * 19/3
        assert!((rep.integral_value - 38.0 / 3.0).abs() < 1e-3);

        let rep = weight_class_check(&ext, 1.0, Rect::new(2.0, 3.0, 2.0, 3.0).unwrap()).unwrap();
        assert!(rep.in_class);
        assert!((rep.integral_value - 324.0).abs() < 1e-9); // max |z|^4 at (3,3)

        assert!(matches!(
            weight_class_check(&hp, 2.0, Rect::new(-1.0, 1.0, -0.5, 1.0).unwrap()),
            Err(Error::RectangleNotInterior("halfplane"))
        ));
        assert!(weight_class_check(&hp, 0.5, Rect::new(-1.0, 1.0, 1.0, 2.0).unwrap()).is_err());
    }

    #[test]
    fn pulled_back_density_is_one() {
        for family in DomainFamily::ALL {
            let w = WeightField::for_family(family);
            for k in 1..20 {
                let wpt = Complex64::from_polar(k as f64 / 20.0, 0.37 * k as f64);
                assert!((w.pulled_back_density(wpt) - 1.0).abs() < 1e-12, "{family}");
            }
        }
    }
}
