//! Closed-form conformal uniformizers between explicit simply connected
//! domains and the unit disc.
//!
//! Every family comes with the forward map `phi: domain -> disc`, its inverse
//! `psi: disc -> domain`, both complex derivatives, and a total membership
//! predicate. A [`ConformalMap`] selects a family and a direction and may carry
//! a disc automorphism applied after `phi`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A finite point of the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexPoint {
    re: f64,
    im: f64,
}

impl ComplexPoint {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        if re.is_finite() && im.is_finite() {
            Ok(Self { re, im })
        } else {
            Err(Error::NonFiniteCoordinate { re, im })
        }
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        Self::new(z.re, z.im)
    }

    pub fn re(&self) -> f64 {
        self.re
    }

    pub fn im(&self) -> f64 {
        self.im
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

impl From<ComplexPoint> for Complex64 {
    fn from(p: ComplexPoint) -> Self {
        p.to_complex()
    }
}

/// Parses `"re,im"`.
impl FromStr for ComplexPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(',');
        let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::InvalidArgument(format!(
                "expected a complex point as \"re,im\", got {s:?}"
            )));
        };
        let parse = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| Error::InvalidArgument(format!("bad coordinate {t:?}: {e}")))
        };
        Self::new(parse(a)?, parse(b)?)
    }
}

pub(crate) fn check_finite(z: Complex64) -> Result<()> {
    ComplexPoint::from_complex(z).map(|_| ())
}

/// The fixed domain families with closed-form uniformizers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DomainFamily {
    /// The unit disc itself, mapped by the identity.
    #[serde(rename = "disc")]
    DiscIdentity,
    /// `|z| > 1`, mapped by `1/z`.
    #[serde(rename = "exterior")]
    ExteriorOfDisc,
    /// `Im z > 0`, mapped by the Cayley transform.
    #[serde(rename = "halfplane")]
    UpperHalfPlane,
    /// `|Re z| < pi/4`, mapped by `tan z`.
    #[serde(rename = "strip")]
    Strip,
    /// Interior of the cardioid `r = (1 + cos t)/2`, mapped by `2 sqrt(z) - 1`.
    #[serde(rename = "cardioid")]
    Cardioid,
    /// The Koebe slit plane `C \ (-inf, -1/4]`.
    #[serde(rename = "slitplane")]
    SlitPlane,
}

impl DomainFamily {
    pub const ALL: [DomainFamily; 6] = [
        DomainFamily::DiscIdentity,
        DomainFamily::ExteriorOfDisc,
        DomainFamily::UpperHalfPlane,
        DomainFamily::Strip,
        DomainFamily::Cardioid,
        DomainFamily::SlitPlane,
    ];

    /// Lowercase name used on the command line.
    pub fn name(self) -> &'static str {
        match self {
            DomainFamily::DiscIdentity => "disc",
            DomainFamily::ExteriorOfDisc => "exterior",
            DomainFamily::UpperHalfPlane => "halfplane",
            DomainFamily::Strip => "strip",
            DomainFamily::Cardioid => "cardioid",
            DomainFamily::SlitPlane => "slitplane",
        }
    }

    /// Membership in the open domain.
    pub fn contains(self, z: Complex64) -> bool {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return false;
        }
        match self {
            DomainFamily::DiscIdentity => z.norm_sqr() < 1.0,
            DomainFamily::ExteriorOfDisc => z.norm_sqr() > 1.0,
            DomainFamily::UpperHalfPlane => z.im > 0.0,
            DomainFamily::Strip => z.re.abs() < FRAC_PI_4,
            DomainFamily::Cardioid => {
                let r = z.norm();
                r > 0.0 && r < 0.5 * (1.0 + z.arg().cos())
            }
            DomainFamily::SlitPlane => !(z.im == 0.0 && z.re <= -0.25),
        }
    }

    /// Forward uniformizer `phi: domain -> disc` (no membership check).
    fn phi(self, z: Complex64) -> Complex64 {
        match self {
            DomainFamily::DiscIdentity => z,
            DomainFamily::ExteriorOfDisc => z.inv(),
            DomainFamily::UpperHalfPlane => (z - I) / (z + I),
            DomainFamily::Strip => z.tan(),
            DomainFamily::Cardioid => 2.0 * z.sqrt() - 1.0,
            DomainFamily::SlitPlane => {
                let t = (1.0 + 4.0 * z).sqrt();
                (t - 1.0) / (t + 1.0)
            }
        }
    }

    fn phi_prime(self, z: Complex64) -> Complex64 {
        match self {
            DomainFamily::DiscIdentity => ONE,
            DomainFamily::ExteriorOfDisc => -(z * z).inv(),
            DomainFamily::UpperHalfPlane => {
                let d = z + I;
                2.0 * I / (d * d)
            }
            DomainFamily::Strip => {
                let t = z.tan();
                1.0 + t * t
            }
            DomainFamily::Cardioid => z.sqrt().inv(),
            DomainFamily::SlitPlane => {
                let t = (1.0 + 4.0 * z).sqrt();
                let s = t + 1.0;
                4.0 / (t * s * s)
            }
        }
    }

    /// Inverse uniformizer `psi: disc -> domain` (no membership check).
    fn psi(self, w: Complex64) -> Complex64 {
        match self {
            DomainFamily::DiscIdentity => w,
            DomainFamily::ExteriorOfDisc => w.inv(),
            DomainFamily::UpperHalfPlane => I * (1.0 + w) / (1.0 - w),
            DomainFamily::Strip => w.atan(),
            DomainFamily::Cardioid => {
                let s = 1.0 + w;
                0.25 * s * s
            }
            DomainFamily::SlitPlane => {
                let d = 1.0 - w;
                w / (d * d)
            }
        }
    }

    fn psi_prime(self, w: Complex64) -> Complex64 {
        match self {
            DomainFamily::DiscIdentity => ONE,
            DomainFamily::ExteriorOfDisc => -(w * w).inv(),
            DomainFamily::UpperHalfPlane => {
                let d = 1.0 - w;
                2.0 * I / (d * d)
            }
            DomainFamily::Strip => (1.0 + w * w).inv(),
            DomainFamily::Cardioid => 0.5 * (1.0 + w),
            DomainFamily::SlitPlane => {
                let d = 1.0 - w;
                (1.0 + w) / (d * d * d)
            }
        }
    }

    /// Boundary samples paired with unit normals pointing into the domain.
    pub fn boundary_samples(self, n: usize) -> Vec<(Complex64, Complex64)> {
        let mid = |j: usize, m: usize| (j as f64 + 0.5) / m as f64;
        // maps (0, 1) onto the real line
        let spread = |t: f64| (PI * t - FRAC_PI_2).tan();
        match self {
            DomainFamily::DiscIdentity => (0..n)
                .map(|j| {
                    let z = Complex64::from_polar(1.0, 2.0 * PI * mid(j, n));
                    (z, -z)
                })
                .collect(),
            DomainFamily::ExteriorOfDisc => (0..n)
                .map(|j| {
                    let z = Complex64::from_polar(1.0, 2.0 * PI * mid(j, n));
                    (z, z)
                })
                .collect(),
            DomainFamily::UpperHalfPlane => (0..n)
                .map(|j| (Complex64::new(spread(mid(j, n)), 0.0), I))
                .collect(),
            DomainFamily::Strip => {
                let half = n / 2;
                let rest = n - half;
                let left =
                    (0..half).map(|j| (Complex64::new(-FRAC_PI_4, spread(mid(j, half))), ONE));
                let right =
                    (0..rest).map(|j| (Complex64::new(FRAC_PI_4, spread(mid(j, rest))), -ONE));
                left.chain(right).collect()
            }
            DomainFamily::Cardioid => (0..n)
                .map(|j| {
                    let e = Complex64::from_polar(1.0, -PI + 2.0 * PI * mid(j, n));
                    let s = 1.0 + e;
                    let z = 0.25 * s * s;
                    let tangent = 0.5 * s * I * e;
                    (z, I * tangent / tangent.norm())
                })
                .collect(),
            DomainFamily::SlitPlane => {
                let half = n / 2;
                let rest = n - half;
                // distances from the tip, spread over (0, inf)
                let ray = |t: f64| (FRAC_PI_2 * t).tan();
                let upper = (0..half).map(|j| (Complex64::new(-0.25 - ray(mid(j, half)), 0.0), I));
                let lower = (0..rest).map(|j| (Complex64::new(-0.25 - ray(mid(j, rest)), 0.0), -I));
                upper.chain(lower).collect()
            }
        }
    }

    /// Deterministic interior samples `psi(w)` with `w` drawn uniformly from
    /// the annulus `0.05 <= |w| <= 0.95`.
    pub fn interior_samples(self, count: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                let rho = rng.gen_range(0.05f64..0.95).sqrt().max(0.05);
                let t = rng.gen_range(0.0..2.0 * PI);
                self.psi(Complex64::from_polar(rho, t))
            })
            .filter(|z| self.contains(*z))
            .collect()
    }
}

impl fmt::Display for DomainFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DomainFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DomainFamily::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown domain {s:?}")))
    }
}

/// Disc automorphism `eta(w) = e^{i rotation} (w - a) / (1 - conj(a) w)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoebiusAutomorphism {
    a: Complex64,
    rotation: f64,
}

impl MoebiusAutomorphism {
    pub fn new(a: Complex64, rotation: f64) -> Result<Self> {
        check_finite(a)?;
        if !rotation.is_finite() {
            return Err(Error::NonFiniteCoordinate {
                re: rotation,
                im: 0.0,
            });
        }
        let m = a.norm();
        if m >= 1.0 {
            return Err(Error::InvalidAutomorphism(m));
        }
        Ok(Self { a, rotation })
    }

    pub fn identity() -> Self {
        Self {
            a: Complex64::new(0.0, 0.0),
            rotation: 0.0,
        }
    }

    pub fn rotation_by(angle: f64) -> Result<Self> {
        Self::new(Complex64::new(0.0, 0.0), angle)
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn rotation(&self) -> f64 {
        self.rotation
    }

    fn unit(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.rotation)
    }

    pub fn eval(&self, w: Complex64) -> Complex64 {
        self.unit() * (w - self.a) / (1.0 - self.a.conj() * w)
    }

    pub fn derivative(&self, w: Complex64) -> Complex64 {
        let d = 1.0 - self.a.conj() * w;
        self.unit() * (1.0 - self.a.norm_sqr()) / (d * d)
    }

    pub fn eval_inverse(&self, w: Complex64) -> Complex64 {
        let u = self.unit().conj() * w;
        (u + self.a) / (1.0 + self.a.conj() * u)
    }

    pub fn inverse_derivative(&self, w: Complex64) -> Complex64 {
        1.0 / self.derivative(self.eval_inverse(w))
    }

    /// Bounds `[(1-|a|)/(1+|a|), (1+|a|)/(1-|a|)]` on `|eta'|` over the disc.
    pub fn derivative_bounds(&self) -> (f64, f64) {
        let m = self.a.norm();
        ((1.0 - m) / (1.0 + m), (1.0 + m) / (1.0 - m))
    }

    /// The automorphism `self ∘ inner`.
    pub fn after(&self, inner: &MoebiusAutomorphism) -> Self {
        let a = inner.eval_inverse(self.eval_inverse(Complex64::new(0.0, 0.0)));
        let slope = self.derivative(inner.eval(a)) * inner.derivative(a) * (1.0 - a.norm_sqr());
        Self {
            a,
            rotation: slope.arg(),
        }
    }
}

impl Default for MoebiusAutomorphism {
    fn default() -> Self {
        Self::identity()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    ToDisc,
    FromDisc,
}

/// A uniformizer of one family, in one direction, optionally followed by a
/// disc automorphism on the disc side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConformalMap {
    family: DomainFamily,
    direction: Direction,
    post_automorphism: Option<MoebiusAutomorphism>,
}

impl ConformalMap {
    pub fn to_disc(family: DomainFamily) -> Self {
        Self {
            family,
            direction: Direction::ToDisc,
            post_automorphism: None,
        }
    }

    pub fn from_disc(family: DomainFamily) -> Self {
        Self {
            family,
            direction: Direction::FromDisc,
            post_automorphism: None,
        }
    }

    pub fn family(&self) -> DomainFamily {
        self.family
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn post_automorphism(&self) -> Option<&MoebiusAutomorphism> {
        self.post_automorphism.as_ref()
    }

    fn require(&self, direction: Direction) -> Result<()> {
        if self.direction == direction {
            Ok(())
        } else {
            Err(Error::WrongDirection {
                expected: match direction {
                    Direction::ToDisc => "to-disc",
                    Direction::FromDisc => "from-disc",
                },
            })
        }
    }

    fn check_source(&self, z: Complex64) -> Result<()> {
        check_finite(z)?;
        let inside = match self.direction {
            Direction::ToDisc => self.family.contains(z),
            Direction::FromDisc => z.norm_sqr() < 1.0,
        };
        if inside {
            Ok(())
        } else {
            let domain = match self.direction {
                Direction::ToDisc => self.family.name(),
                Direction::FromDisc => "disc",
            };
            Err(Error::PointOutsideDomain {
                domain,
                re: z.re,
                im: z.im,
            })
        }
    }

    /// Preimage under the optional automorphism of a disc-side point.
    fn undo_automorphism(&self, w: Complex64) -> Complex64 {
        self.post_automorphism.map_or(w, |eta| eta.eval_inverse(w))
    }

    fn check_from_disc_image(&self, w: Complex64, z: Complex64) -> Result<Complex64> {
        // 1/w sends the origin to infinity, which the exterior domain excludes.
        if z.re.is_finite() && z.im.is_finite() {
            Ok(z)
        } else {
            Err(Error::PointOutsideDomain {
                domain: "disc",
                re: w.re,
                im: w.im,
            })
        }
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.check_source(z)?;
        match self.direction {
            Direction::ToDisc => {
                let w = self.family.phi(z);
                Ok(self.post_automorphism.map_or(w, |eta| eta.eval(w)))
            }
            Direction::FromDisc => {
                let image = self.family.psi(self.undo_automorphism(z));
                self.check_from_disc_image(z, image)
            }
        }
    }

    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        if self.direction == Direction::ToDisc
            && self.family == DomainFamily::SlitPlane
            && z.im == 0.0
            && z.re <= -0.25
        {
            return Err(Error::BranchCutViolation {
                domain: "slitplane",
                re: z.re,
                im: z.im,
            });
        }
        self.check_source(z)?;
        match self.direction {
            Direction::ToDisc => {
                let d = self.family.phi_prime(z);
                Ok(match self.post_automorphism {
                    Some(eta) => eta.derivative(self.family.phi(z)) * d,
                    None => d,
                })
            }
            Direction::FromDisc => {
                let u = self.undo_automorphism(z);
                let d = self.family.psi_prime(u);
                let d = match self.post_automorphism {
                    Some(eta) => d * eta.inverse_derivative(z),
                    None => d,
                };
                self.check_from_disc_image(z, d)
            }
        }
    }

    /// The inverse map: same family and automorphism, opposite direction.
    pub fn invert(&self) -> Self {
        let direction = match self.direction {
            Direction::ToDisc => Direction::FromDisc,
            Direction::FromDisc => Direction::ToDisc,
        };
        Self { direction, ..*self }
    }

    /// `eta ∘ self` for a to-disc map.
    pub fn compose_with_automorphism(&self, eta: &MoebiusAutomorphism) -> Result<Self> {
        self.require(Direction::ToDisc)?;
        let post = match self.post_automorphism {
            Some(inner) => eta.after(&inner),
            None => *eta,
        };
        Ok(Self {
            post_automorphism: Some(post),
            ..*self
        })
    }

    /// Uniformizer and its derivative for a to-disc map, skipping the
    /// membership check. Callers guarantee `z` is interior.
    pub(crate) fn forward_unchecked(&self, z: Complex64) -> (Complex64, Complex64) {
        let w = self.family.phi(z);
        let d = self.family.phi_prime(z);
        match self.post_automorphism {
            Some(eta) => (eta.eval(w), eta.derivative(w) * d),
            None => (w, d),
        }
    }

    /// Inverse uniformizer and its derivative at a disc point, regardless of
    /// this map's direction. Callers guarantee `|w| < 1`.
    pub(crate) fn inverse_unchecked(&self, w: Complex64) -> (Complex64, Complex64) {
        let u = self.undo_automorphism(w);
        let z = self.family.psi(u);
        let d = self.family.psi_prime(u);
        match self.post_automorphism {
            Some(eta) => (z, d * eta.inverse_derivative(w)),
            None => (z, d),
        }
    }

    /// Max deviation `||phi(z)| - 1|` at points offset by `offset` along the
    /// inward normal from `n` boundary samples. Samples whose offset point
    /// leaves the domain are skipped.
    pub fn boundary_deviation_at(&self, n: usize, offset: f64) -> Result<f64> {
        self.require(Direction::ToDisc)?;
        check_sample_count(n)?;
        Ok(boundary_deviation(self.family, n, &[offset], |z| {
            self.forward_unchecked(z).0
        }))
    }

    /// Max over `n` boundary samples of `||phi(z_b)| - 1|`, where the boundary
    /// value is taken at the closest interior approach among normal offsets
    /// `1e-3, 1e-4, 1e-5, 1e-6`.
    pub fn boundary_image_check(&self, n: usize) -> Result<f64> {
        self.require(Direction::ToDisc)?;
        check_sample_count(n)?;
        Ok(boundary_deviation(self.family, n, &BOUNDARY_OFFSETS, |z| {
            self.forward_unchecked(z).0
        }))
    }
}

pub const BOUNDARY_OFFSETS: [f64; 4] = [1e-3, 1e-4, 1e-5, 1e-6];

fn check_sample_count(n: usize) -> Result<()> {
    if n < 8 {
        Err(Error::InvalidArgument(format!(
            "need at least 8 boundary samples, got {n}"
        )))
    } else {
        Ok(())
    }
}

/// Boundary-image deviation of an arbitrary candidate map for `family`.
///
/// For each boundary sample the smallest offset in `offsets` whose point is
/// interior is used; samples with no interior offset are skipped.
pub fn boundary_deviation(
    family: DomainFamily,
    n: usize,
    offsets: &[f64],
    map: impl Fn(Complex64) -> Complex64,
) -> f64 {
    family
        .boundary_samples(n)
        .into_iter()
        .filter_map(|(zb, normal)| {
            offsets
                .iter()
                .rev()
                .map(|&d| zb + d * normal)
                .find(|z| family.contains(*z))
                .map(|z| (map(z).norm() - 1.0).abs())
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn point_examples() {
        let ext = ConformalMap::to_disc(DomainFamily::ExteriorOfDisc);
        assert!(close(ext.eval(c(2.0, 0.0)).unwrap(), c(0.5, 0.0), 1e-15));
        assert!(close(
            ext.derivative(c(2.0, 0.0)).unwrap(),
            c(-0.25, 0.0),
            1e-15
        ));

        let hp = ConformalMap::to_disc(DomainFamily::UpperHalfPlane);
        assert!(close(hp.eval(I).unwrap(), c(0.0, 0.0), 1e-15));
        assert!(close(hp.derivative(I).unwrap(), c(0.0, -0.5), 1e-15));
        assert!(close(hp.invert().eval(c(0.0, 0.0)).unwrap(), I, 1e-15));

        let card = ConformalMap::to_disc(DomainFamily::Cardioid);
        assert!(close(card.eval(c(0.25, 0.0)).unwrap(), c(0.0, 0.0), 1e-15));

        let disc = ConformalMap::to_disc(DomainFamily::DiscIdentity);
        assert_eq!(disc.derivative(c(0.3, -0.2)).unwrap(), ONE);

        let strip_inv = ConformalMap::from_disc(DomainFamily::Strip);
        assert!(close(
            strip_inv.eval(c(0.0, 0.0)).unwrap(),
            c(0.0, 0.0),
            1e-15
        ));
    }

    #[test]
    fn membership_and_errors() {
        let card = DomainFamily::Cardioid;
        assert!(!card.contains(c(0.0, 0.0)));
        assert!(!card.contains(c(-0.1, 0.0)));
        assert!(card.contains(c(0.9, 0.0)));
        assert!(!card.contains(c(1.0, 0.0)));

        let slit = ConformalMap::to_disc(DomainFamily::SlitPlane);
        assert!(matches!(
            slit.eval(c(-1.0, 0.0)),
            Err(Error::PointOutsideDomain { .. })
        ));
        assert!(matches!(
            slit.derivative(c(-1.0, 0.0)),
            Err(Error::BranchCutViolation { .. })
        ));
        assert!(slit.eval(c(-1.0, 1e-9)).is_ok());

        let ext_inv = ConformalMap::from_disc(DomainFamily::ExteriorOfDisc);
        assert!(ext_inv.eval(c(0.0, 0.0)).is_err());
        assert!(matches!(
            ConformalMap::to_disc(DomainFamily::Strip).eval(c(1.0, 0.0)),
            Err(Error::PointOutsideDomain {
                domain: "strip",
                ..
            })
        ));
        assert!(ComplexPoint::new(f64::NAN, 0.0).is_err());
        assert!(MoebiusAutomorphism::new(c(1.0, 0.0), 0.0).is_err());
    }

    #[test]
    fn parse_names_and_points() {
        for d in DomainFamily::ALL {
            assert_eq!(d.name().parse::<DomainFamily>().unwrap(), d);
        }
        assert!("annulus".parse::<DomainFamily>().is_err());
        let p: ComplexPoint = "0, 1".parse().unwrap();
        assert_eq!(p.to_complex(), I);
        assert!("1".parse::<ComplexPoint>().is_err());
        assert!("1,2,3".parse::<ComplexPoint>().is_err());
    }

    #[test]
    fn round_trip_and_involution() {
        for family in DomainFamily::ALL {
            let m = ConformalMap::to_disc(family);
            assert_eq!(m.invert().invert(), m);
            for z in family.interior_samples(100, 7) {
                let back = m.invert().eval(m.eval(z).unwrap()).unwrap();
                assert!(
                    (back - z).norm() <= 1e-12 * z.norm().max(1.0),
                    "{family}: {z} -> {back}"
                );
            }
        }
    }

    #[test]
    fn analyticity_against_finite_differences() {
        for family in DomainFamily::ALL {
            let m = ConformalMap::to_disc(family);
            for z in family.interior_samples(200, 11) {
                // Koebe quarter theorem: dist(z, boundary) >= (1 - |phi|^2) / (4 |phi'|)
                let d = m.derivative(z).unwrap();
                let dist = (1.0 - m.eval(z).unwrap().norm_sqr()) / (4.0 * d.norm());
                let step = 1e-4 * dist;
                let fd_re = (m.eval(z + step).unwrap() - m.eval(z - step).unwrap()) / (2.0 * step);
                let fd_im = (m.eval(z + I * step).unwrap() - m.eval(z - I * step).unwrap())
                    / (2.0 * I * step);
                assert!((fd_re - d).norm() <= 1e-7 * d.norm(), "{family} at {z}");
                assert!((fd_im - d).norm() <= 1e-7 * d.norm(), "{family} at {z}");
                // real Jacobian determinant
                let (ux, vx) = (fd_re.re, fd_re.im);
                let (uy, vy) = ((fd_im * I).re, (fd_im * I).im);
                let det = ux * vy - uy * vx;
                assert!((det - d.norm_sqr()).abs() <= 1e-6 * d.norm_sqr());
            }
        }
    }

    #[test]
    fn boundary_images() {
        for family in DomainFamily::ALL {
            let m = ConformalMap::to_disc(family);
            let dev = m.boundary_image_check(64).unwrap();
            assert!(dev < 1e-2, "{family}: {dev}");
        }
        let hp = ConformalMap::to_disc(DomainFamily::UpperHalfPlane);
        assert!(hp.boundary_deviation_at(64, 1e-3).unwrap() < 1e-2);
        assert!(hp.boundary_image_check(4).is_err());
        assert!(hp.invert().boundary_image_check(64).is_err());
    }

    #[test]
    fn moebius_properties() {
        let eta = MoebiusAutomorphism::new(c(0.3, -0.4), 1.1).unwrap();
        let (lo, hi) = eta.derivative_bounds();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let w = Complex64::from_polar(rng.gen::<f64>().sqrt() * 0.999, rng.gen::<f64>() * 7.0);
            let e = eta.eval(w);
            assert!(e.norm() < 1.0);
            let d = eta.derivative(w).norm();
            assert!(d >= lo * (1.0 - 1e-12) && d <= hi * (1.0 + 1e-12));
            assert!((eta.eval_inverse(e) - w).norm() < 1e-13);
        }
    }

    #[test]
    fn automorphism_composition() {
        let hp = ConformalMap::to_disc(DomainFamily::UpperHalfPlane);
        let same = hp
            .compose_with_automorphism(&MoebiusAutomorphism::identity())
            .unwrap();
        let rot = hp
            .compose_with_automorphism(&MoebiusAutomorphism::rotation_by(PI).unwrap())
            .unwrap();
        let e1 = MoebiusAutomorphism::new(c(0.5, 0.0), 0.3).unwrap();
        let e2 = MoebiusAutomorphism::new(c(-0.2, 0.6), -1.0).unwrap();
        let twice = hp
            .compose_with_automorphism(&e1)
            .unwrap()
            .compose_with_automorphism(&e2)
            .unwrap();
        for z in DomainFamily::UpperHalfPlane.interior_samples(100, 5) {
            assert!(close(same.eval(z).unwrap(), hp.eval(z).unwrap(), 1e-15));
            let (d0, dr) = (hp.derivative(z).unwrap(), rot.derivative(z).unwrap());
            assert!((d0.norm() - dr.norm()).abs() <= 1e-14 * d0.norm());
            let direct = e2.eval(e1.eval(hp.eval(z).unwrap()));
            assert!(close(twice.eval(z).unwrap(), direct, 1e-12));
            let chain = e2.derivative(e1.eval(hp.eval(z).unwrap()))
                * e1.derivative(hp.eval(z).unwrap())
                * d0;
            assert!((twice.derivative(z).unwrap() - chain).norm() <= 1e-10 * chain.norm());
            // inverse of a composed map
            let back = twice.invert().eval(twice.eval(z).unwrap()).unwrap();
            assert!(close(back, z, 1e-10 * z.norm().max(1.0)));
        }
        assert!(hp.invert().compose_with_automorphism(&e1).is_err());
    }
}
