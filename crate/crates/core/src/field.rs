//! Scalar fields on a polar grid of the unit disc, closed-form test
//! functions, and the Dirichlet-energy pullback checks.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::{check_finite, ConformalMap, Direction};
use crate::quadrature::{self, disc_rule, pairwise_sum, DiscGridSpec};

/// Seed of the default bump family.
pub const BUMP_SEED: u64 = 0x5EED;

/// Level of the base [`DiscGridSpec`] used for energy comparisons
/// (512 x 512 cells).
pub const ENERGY_LEVEL: usize = 5;

pub fn energy_grid() -> DiscGridSpec {
    DiscGridSpec::default().at_level(ENERGY_LEVEL)
}

/// Uniform polar grid with nodes `r_i = (i + 1/2)/n_r`, `theta_j = 2 pi j / n_theta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolarGrid {
    pub n_r: usize,
    pub n_theta: usize,
}

impl PolarGrid {
    pub fn new(n_r: usize, n_theta: usize) -> Result<Self> {
        if n_r == 0 || n_theta == 0 {
            return Err(Error::InvalidGrid(format!("empty grid {n_r}x{n_theta}")));
        }
        Ok(Self { n_r, n_theta })
    }

    pub fn dr(&self) -> f64 {
        1.0 / self.n_r as f64
    }

    pub fn dtheta(&self) -> f64 {
        2.0 * PI / self.n_theta as f64
    }

    pub fn radius(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.dr()
    }

    pub fn angle(&self, j: usize) -> f64 {
        j as f64 * self.dtheta()
    }

    pub fn node(&self, i: usize, j: usize) -> Complex64 {
        Complex64::from_polar(self.radius(i), self.angle(j))
    }

    pub fn len(&self) -> usize {
        self.n_r * self.n_theta
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All nodes, ring by ring.
    pub fn nodes(&self) -> impl Iterator<Item = Complex64> + '_ {
        (0..self.n_r).flat_map(move |i| (0..self.n_theta).map(move |j| self.node(i, j)))
    }

    /// Quadrature weight (cell area) of ring `i`.
    pub fn cell_area(&self, i: usize) -> f64 {
        self.radius(i) * self.dr() * self.dtheta()
    }
}

/// Real values on the nodes of a [`PolarGrid`], stored ring by ring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscField {
    grid: PolarGrid,
    values: Vec<f64>,
}

/// Cartesian gradient components on the nodes of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub grid: PolarGrid,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl DiscField {
    pub fn from_values(grid: PolarGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            let w = grid.node(k / grid.n_theta, k % grid.n_theta);
            return Err(Error::IntegrandNotFinite { re: w.re, im: w.im });
        }
        Ok(Self { grid, values })
    }

    pub fn sample(grid: PolarGrid, f: impl Fn(Complex64) -> f64) -> Result<Self> {
        Self::from_values(grid, grid.nodes().map(f).collect())
    }

    pub fn grid(&self) -> PolarGrid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.n_theta + j]
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    /// Second-order central differences in `(r, theta)`, converted to
    /// Cartesian components. The innermost ring differences across the
    /// origin; the outermost uses a one-sided stencil.
    pub fn gradient(&self) -> Result<VectorField> {
        let PolarGrid { n_r, n_theta } = self.grid;
        if n_r < 16 || n_theta < 16 || n_theta % 2 != 0 {
            return Err(Error::GridTooCoarse {
                min: 16,
                n_r,
                n_theta,
            });
        }
        let (dr, dt) = (self.grid.dr(), self.grid.dtheta());
        let mut x = Vec::with_capacity(self.grid.len());
        let mut y = Vec::with_capacity(self.grid.len());
        for i in 0..n_r {
            let r = self.grid.radius(i);
            for j in 0..n_theta {
                let d_r = if i == 0 {
                    (self.at(1, j) - self.at(0, (j + n_theta / 2) % n_theta)) / (2.0 * dr)
                } else if i == n_r - 1 {
                    (3.0 * self.at(i, j) - 4.0 * self.at(i - 1, j) + self.at(i - 2, j)) / (2.0 * dr)
                } else {
                    (self.at(i + 1, j) - self.at(i - 1, j)) / (2.0 * dr)
                };
                let d_t = (self.at(i, (j + 1) % n_theta) - self.at(i, (j + n_theta - 1) % n_theta))
                    / (2.0 * dt);
                let (s, c) = self.grid.angle(j).sin_cos();
                x.push(c * d_r - s * d_t / r);
                y.push(s * d_r + c * d_t / r);
            }
        }
        Ok(VectorField {
            grid: self.grid,
            x,
            y,
        })
    }

    /// `(∫_D |f|^p weight dμ)^(1/p)` by the grid's midpoint rule.
    pub fn lp_norm(&self, p: f64, weight: Option<&DiscField>) -> Result<f64> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidExponents(format!("need p >= 1, got {p}")));
        }
        if let Some(wf) = weight {
            if wf.grid != self.grid {
                return Err(Error::InvalidGrid(
                    "weight lives on a different grid".into(),
                ));
            }
        }
        let n_t = self.grid.n_theta;
        let rings: Vec<f64> = (0..self.grid.n_r)
            .map(|i| {
                let row: Vec<f64> = (0..n_t)
                    .map(|j| {
                        let k = i * n_t + j;
                        let w = weight.map_or(1.0, |wf| wf.values[k]);
                        self.values[k].abs().powf(p) * w
                    })
                    .collect();
                pairwise_sum(&row) * self.grid.cell_area(i)
            })
            .collect();
        Ok(pairwise_sum(&rings).powf(1.0 / p))
    }

    /// CSV `x,y,value`, one row per node.
    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        write_csv(
            out,
            ["x", "y", "value"],
            self.grid
                .nodes()
                .zip(&self.values)
                .map(|(w, v)| (w.re, w.im, *v)),
        )
    }
}

/// Three-column CSV with 17 significant digits per number.
pub fn write_csv<W: Write>(
    mut out: W,
    header: [&str; 3],
    rows: impl IntoIterator<Item = (f64, f64, f64)>,
) -> io::Result<()> {
    writeln!(out, "{},{},{}", header[0], header[1], header[2])?;
    for (a, b, c) in rows {
        writeln!(out, "{a:.16e},{b:.16e},{c:.16e}")?;
    }
    Ok(())
}

/// A closed-form function on the disc with an analytic gradient.
pub trait TestFunction: Sync {
    fn value(&self, w: Complex64) -> f64;
    /// Gradient `(df/dx, df/dy)` packed as `df/dx + i df/dy`.
    fn gradient(&self, w: Complex64) -> Complex64;
    /// Laplacian, used by weak-form checks.
    fn laplacian(&self, w: Complex64) -> f64;
}

/// `amplitude * exp(1 - 1/(1 - t^2))` with `t = |w - center| / radius`, zero for
/// `t >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestBump {
    center: Complex64,
    radius: f64,
    amplitude: f64,
}

impl TestBump {
    pub fn new(center: Complex64, radius: f64, amplitude: f64) -> Result<Self> {
        check_finite(center)?;
        if !(radius > 0.0 && amplitude.is_finite() && center.norm() + radius < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "bump support must lie inside the disc: center {center}, radius {radius}"
            )));
        }
        Ok(Self {
            center,
            radius,
            amplitude,
        })
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            amplitude: c * self.amplitude,
            ..*self
        }
    }
}

impl TestFunction for TestBump {
    fn value(&self, w: Complex64) -> f64 {
        let t2 = (w - self.center).norm_sqr() / (self.radius * self.radius);
        if t2 >= 1.0 {
            0.0
        } else {
            self.amplitude * (1.0 - 1.0 / (1.0 - t2)).exp()
        }
    }

    fn gradient(&self, w: Complex64) -> Complex64 {
        let d = w - self.center;
        let r2 = self.radius * self.radius;
        let t2 = d.norm_sqr() / r2;
        if t2 >= 1.0 {
            return Complex64::new(0.0, 0.0);
        }
        let g = 1.0 - t2;
        // d/dw of exp(1 - 1/g) with g = 1 - |d|^2/r^2
        let b = self.amplitude * (1.0 - 1.0 / g).exp();
        d * (-2.0 * b / (g * g * r2))
    }

    fn laplacian(&self, w: Complex64) -> f64 {
        let d = w - self.center;
        let r2 = self.radius * self.radius;
        let t2 = d.norm_sqr() / r2;
        if t2 >= 1.0 {
            return 0.0;
        }
        let g = 1.0 - t2;
        let b = self.amplitude * (1.0 - 1.0 / g).exp();
        // radial profile B(s) with s = |d|^2: lap = 4 (B' + s B'')
        let s = d.norm_sqr();
        let b1 = -b / (g * g * r2);
        let b2 = b / (g * g * g * g * r2 * r2) - 2.0 * b / (g * g * g * r2 * r2);
        4.0 * (b1 + s * b2)
    }
}

/// `f(w) = Re w`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RealPart;

impl TestFunction for RealPart {
    fn value(&self, w: Complex64) -> f64 {
        w.re
    }

    fn gradient(&self, _w: Complex64) -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    fn laplacian(&self, _w: Complex64) -> f64 {
        0.0
    }
}

/// Seeded family of bumps with support inside `|w| < 0.95`.
pub fn bump_family(count: usize, seed: u64) -> Vec<TestBump> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let rho = rng.gen_range(0.0f64..0.7);
            let center = Complex64::from_polar(rho, rng.gen_range(0.0..2.0 * PI));
            let room = 0.95 - rho;
            let radius = rng.gen_range(0.25 * room..room);
            let amplitude = rng.gen_range(0.5..2.0);
            TestBump {
                center,
                radius,
                amplitude,
            }
        })
        .collect()
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

/// `∫_Ω |∇(f∘phi)|^p dμ`, evaluated on the disc through `z = psi(w)` with the
/// chain rule `|∇(f∘phi)|(z) = |∇f|(phi(z)) |phi'(z)|` and Jacobian `|psi'(w)|^2`.
pub fn pullback_energy<F: TestFunction + ?Sized>(
    map: &ConformalMap,
    f: &F,
    p: f64,
    grid: &DiscGridSpec,
) -> Result<f64> {
    require_to_disc(map)?;
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidExponents(format!("need p >= 1, got {p}")));
    }
    disc_rule(
        &|w: Complex64| {
            let (z, dpsi) = map.inverse_unchecked(w);
            let (back, dphi) = map.forward_unchecked(z);
            (f.gradient(back).norm() * dphi.norm()).powf(p) * dpsi.norm_sqr()
        },
        grid,
    )
}

/// `∫_D |∇f|^p dμ`.
pub fn disc_energy<F: TestFunction + ?Sized>(f: &F, p: f64, grid: &DiscGridSpec) -> Result<f64> {
    disc_rule(&|w: Complex64| f.gradient(w).norm().powf(p), grid)
}

/// Max relative gap between the Dirichlet energies of `b∘phi` on the domain
/// and of `b` on the disc.
pub fn isometry_check(map: &ConformalMap, bumps: &[TestBump]) -> Result<f64> {
    if bumps.is_empty() {
        return Err(Error::InvalidArgument(
            "isometry check needs at least one bump".into(),
        ));
    }
    let grid = energy_grid();
    let mut worst = 0.0f64;
    for b in bumps {
        let on_domain = pullback_energy(map, b, 2.0, &grid)?;
        let on_disc = disc_energy(b, 2.0, &grid)?;
        let gap = (on_domain - on_disc).abs();
        worst = worst.max(if on_disc > 0.0 { gap / on_disc } else { gap });
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositionReport {
    /// `‖∇(f∘phi) | L_q(Ω)‖`.
    pub composed_norm: f64,
    /// `‖∇f | L_p(D)‖`.
    pub source_norm: f64,
    pub k: f64,
    pub passes: bool,
}

/// Slack allowed on `‖∇(f∘phi)‖_q <= K ‖∇f‖_p`.
pub const COMPOSITION_SLACK: f64 = 1e-6;

/// Check the composition inequality for each test function, with `K` the
/// dilatation constant of `map` for `(p, q)`.
pub fn composition_inequality_check(
    map: &ConformalMap,
    p: f64,
    q: f64,
    bumps: &[TestBump],
) -> Result<Vec<CompositionReport>> {
    require_to_disc(map)?;
    let kres = quadrature::kpq_norm(
        map,
        p,
        q,
        DiscGridSpec::default(),
        quadrature::DEFAULT_MAX_LEVELS,
        quadrature::DEFAULT_TOL,
    )?;
    if !kres.is_converged() {
        return Err(Error::KpqDivergent { p, q });
    }
    let k = kres.value;
    let grid = energy_grid();
    bumps
        .iter()
        .map(|b| {
            let composed_norm = pullback_energy(map, b, q, &grid)?.powf(1.0 / q);
            let source_norm = disc_energy(b, p, &grid)?.powf(1.0 / p);
            let passes = composed_norm <= k * source_norm * (1.0 + COMPOSITION_SLACK);
            Ok(CompositionReport {
                composed_norm,
                source_norm,
                k,
                passes,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::DomainFamily;

    #[test]
    fn gradient_of_simple_fields() {
        let grid = PolarGrid::new(128, 128).unwrap();
        let lin = DiscField::sample(grid, |w| w.re)
            .unwrap()
            .gradient()
            .unwrap();
        let err = lin
            .x
            .iter()
            .zip(&lin.y)
            .map(|(gx, gy)| (gx - 1.0).abs().max(gy.abs()))
            .fold(0.0, f64::max);
        assert!(err <= 1e-3, "{err}");

        let cst = DiscField::sample(grid, |_| 3.5)
            .unwrap()
            .gradient()
            .unwrap();
        assert!(cst.x.iter().chain(&cst.y).all(|v| *v == 0.0));

        // central differences are exact on |w|^2 = r^2
        let quad_err = |n: usize| {
            let g = PolarGrid::new(n, n).unwrap();
            let v = DiscField::sample(g, |w| w.norm_sqr())
                .unwrap()
                .gradient()
                .unwrap();
            g.nodes()
                .zip(v.x.iter().zip(&v.y))
                .map(|(w, (gx, gy))| (gx - 2.0 * w.re).abs().max((gy - 2.0 * w.im).abs()))
                .fold(0.0, f64::max)
        };
        assert!(quad_err(32) < 1e-10 && quad_err(64) < 1e-10);

        let small = DiscField::sample(PolarGrid::new(8, 16).unwrap(), |_| 0.0).unwrap();
        assert!(matches!(small.gradient(), Err(Error::GridTooCoarse { .. })));
    }

    #[test]
    fn norms() {
        let grid = PolarGrid::new(128, 128).unwrap();
        let one = DiscField::sample(grid, |_| 1.0).unwrap();
        assert!((one.lp_norm(2.0, None).unwrap() - PI.sqrt()).abs() < 1e-12);
        let re = DiscField::sample(grid, |w| w.re).unwrap();
        assert!((re.lp_norm(2.0, None).unwrap() - (PI / 4.0).sqrt()).abs() < 1e-4);

        let hp = crate::weight::WeightField::for_family(DomainFamily::UpperHalfPlane);
        let nu = DiscField::sample(grid, |w| hp.pulled_back_density(w)).unwrap();
        assert!((one.lp_norm(1.0, Some(&nu)).unwrap() - PI).abs() < 1e-10);
        assert!(one.lp_norm(0.5, None).is_err());
    }

    #[test]
    fn bump_derivatives_match_finite_differences() {
        let b = TestBump::new(Complex64::new(0.2, -0.1), 0.5, 1.3).unwrap();
        let h = 1e-5;
        for k in 0..40 {
            let w =
                b.center() + Complex64::from_polar(0.45 * k as f64 / 40.0 + 0.01, 0.3 * k as f64);
            let fx = (b.value(w + h) - b.value(w - h)) / (2.0 * h);
            let fy = (b.value(w + Complex64::new(0.0, h)) - b.value(w - Complex64::new(0.0, h)))
                / (2.0 * h);
            let g = b.gradient(w);
            assert!((g.re - fx).abs() < 1e-7 && (g.im - fy).abs() < 1e-7);
            let lap = (b.value(w + h)
                + b.value(w - h)
                + b.value(w + Complex64::new(0.0, h))
                + b.value(w - Complex64::new(0.0, h))
                - 4.0 * b.value(w))
                / (h * h);
            assert!(
                (b.laplacian(w) - lap).abs() < 1e-3 * (1.0 + lap.abs()),
                "{} {}",
                b.laplacian(w),
                lap
            );
        }
        assert!(TestBump::new(Complex64::new(0.6, 0.0), 0.5, 1.0).is_err());
    }

    #[test]
    fn energies() {
        let grid = energy_grid();
        let hp = ConformalMap::to_disc(DomainFamily::UpperHalfPlane);
        let e = pullback_energy(&hp, &RealPart, 2.0, &grid).unwrap();
        assert!((e - PI).abs() < 1e-4 * PI, "{e}");
        assert!((e - disc_energy(&RealPart, 2.0, &grid).unwrap()).abs() < 1e-12);
        let zero = TestBump::new(Complex64::new(0.0, 0.0), 0.5, 0.0).unwrap();
        assert_eq!(pullback_energy(&hp, &zero, 2.0, &grid).unwrap(), 0.0);

        let bumps = bump_family(5, BUMP_SEED);
        let disc = ConformalMap::to_disc(DomainFamily::DiscIdentity);
        assert!(isometry_check(&disc, &bumps).unwrap() <= 1e-12);
        for family in [DomainFamily::UpperHalfPlane, DomainFamily::Cardioid] {
            let m = ConformalMap::to_disc(family);
            assert!(isometry_check(&m, &bumps).unwrap() <= 1e-6);
        }
        assert!(isometry_check(&hp, &[]).is_err());
    }

    #[test]
    fn composition_inequality() {
        let card = ConformalMap::to_disc(DomainFamily::Cardioid);
        let mut bumps = bump_family(4, BUMP_SEED);
        bumps.push(TestBump::new(Complex64::new(0.1, 0.1), 0.3, 0.0).unwrap());
        let reports = composition_inequality_check(&card, 2.0, 1.5, &bumps).unwrap();
        assert!(reports.iter().all(|r| r.passes));
        let last = reports.last().unwrap();
        assert_eq!((last.composed_norm, last.source_norm), (0.0, 0.0));

        let ext = ConformalMap::to_disc(DomainFamily::ExteriorOfDisc);
        assert!(matches!(
            composition_inequality_check(&ext, 2.0, 1.0, &bumps),
            Err(Error::KpqDivergent { .. })
        ));
    }

    #[test]
    fn csv_format() {
        let grid = PolarGrid::new(2, 4).unwrap();
        let f = DiscField::sample(grid, |w| w.re).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x,y,value"));
        assert_eq!(
            lines.next(),
            Some("2.5000000000000000e-1,0.0000000000000000e0,2.5000000000000000e-1")
        );
        assert_eq!(text.lines().count(), 9);
    }
}
