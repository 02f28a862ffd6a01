//! The degenerate Dirichlet problem `Δu = f h` on a domain, `u = 0` on its
//! boundary, solved by conformal transfer to the disc.
//!
//! With `v = u∘psi` the weight cancels: `Δv = |psi'|^2 (f h)∘psi = f∘psi`. The
//! disc problem is solved with a Fourier transform in `theta` and, per mode, a
//! second-order finite-volume tridiagonal solve in `r`.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{write_csv, DiscField, PolarGrid, TestBump, TestFunction};
use crate::maps::{ConformalMap, Direction};
use crate::quadrature::pairwise_sum;

/// Fourier–tridiagonal solver for `Δv = g` on the unit disc with `v = 0` on
/// the circle, on a cell-centred [`PolarGrid`].
#[derive(Clone)]
pub struct PolarPoissonSolver {
    grid: PolarGrid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for PolarPoissonSolver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PolarPoissonSolver")
            .field("grid", &self.grid)
            .finish()
    }
}

impl PolarPoissonSolver {
    pub fn new(grid: PolarGrid) -> Result<Self> {
        if !grid.n_theta.is_power_of_two() || grid.n_r < 2 {
            return Err(Error::InvalidGrid(format!(
                "need n_theta a power of two and n_r >= 2, got {}x{}",
                grid.n_r, grid.n_theta
            )));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            grid,
            forward: planner.plan_fft_forward(grid.n_theta),
            inverse: planner.plan_fft_inverse(grid.n_theta),
        })
    }

    pub fn grid(&self) -> PolarGrid {
        self.grid
    }

    /// Solve for node values given the right-hand side at the nodes.
    pub fn solve_values(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let PolarGrid { n_r, n_theta } = self.grid;
        if rhs.len() != self.grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} values, got {}",
                self.grid.len(),
                rhs.len()
            )));
        }
        // spectra[i * n_theta + k]
        let mut spectra: Vec<Complex64> = rhs.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        for row in spectra.chunks_mut(n_theta) {
            self.forward.process(row);
        }

        let h = self.grid.dr();
        let face = |i: usize| i as f64 * h; // radius of the face below node i
        let mut diag = vec![0.0; n_r];
        let mut upper = vec![0.0; n_r];
        let mut work = vec![Complex64::new(0.0, 0.0); n_r];
        for k in 0..n_theta {
            let m = k.min(n_theta - k) as f64;
            // forward sweep of the Thomas algorithm, lower[i] = face(i)/(r_i h^2)
            for i in 0..n_r {
                let r = self.grid.radius(i);
                let scale = 1.0 / (r * h * h);
                let lower = face(i) * scale;
                let (up, outer) = if i + 1 < n_r {
                    (face(i + 1) * scale, face(i + 1) * scale)
                } else {
                    // Dirichlet face at r = 1, half a cell away
                    (0.0, 2.0 * face(i + 1) * scale)
                };
                let mut b = -(lower + outer) - m * m / (r * r);
                let mut rhs_i = spectra[i * n_theta + k];
                if i > 0 {
                    let factor = lower / diag[i - 1];
                    b -= factor * upper[i - 1];
                    rhs_i -= work[i - 1] * factor;
                }
                if b == 0.0 || !b.is_finite() {
                    return Err(Error::SingularTridiagonal(k));
                }
                diag[i] = b;
                upper[i] = up;
                work[i] = rhs_i;
            }
            let mut next = Complex64::new(0.0, 0.0);
            for i in (0..n_r).rev() {
                let v = (work[i] - next * upper[i]) / diag[i];
                spectra[i * n_theta + k] = v;
                next = v;
            }
        }

        let norm = 1.0 / n_theta as f64;
        for row in spectra.chunks_mut(n_theta) {
            self.inverse.process(row);
        }
        Ok(spectra.into_iter().map(|c| c.re * norm).collect())
    }
}

/// Closed-form right-hand side `f` on the domain.
#[derive(Clone)]
pub enum Rhs {
    /// `f ≡ c`; the solution is `c (|phi|^2 - 1) / 4`.
    Constant(f64),
    /// `f = 16 |phi|^2 - 8`; the solution is `(1 - |phi|^2)^2`.
    Quartic,
    /// Arbitrary `f(z)` on the domain.
    Custom(Arc<dyn Fn(Complex64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Rhs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rhs::Constant(c) => write!(f, "Constant({c})"),
            Rhs::Quartic => f.write_str("Quartic"),
            Rhs::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl fmt::Display for Rhs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rhs::Constant(c) => write!(f, "const:{c}"),
            Rhs::Quartic => f.write_str("quartic"),
            Rhs::Custom(_) => f.write_str("custom"),
        }
    }
}

/// Parses `const:<c>` or `quartic`.
impl FromStr for Rhs {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "quartic" {
            return Ok(Rhs::Quartic);
        }
        let c = s
            .strip_prefix("const:")
            .and_then(|c| c.parse::<f64>().ok())
            .filter(|c| c.is_finite())
            .ok_or_else(|| {
                Error::InvalidArgument(format!("expected const:<c> or quartic, got {s:?}"))
            })?;
        Ok(Rhs::Constant(c))
    }
}

impl Rhs {
    fn eval(&self, map: &ConformalMap, z: Complex64) -> f64 {
        match self {
            Rhs::Constant(c) => *c,
            Rhs::Quartic => 16.0 * map.forward_unchecked(z).0.norm_sqr() - 8.0,
            Rhs::Custom(f) => f(z),
        }
    }

    /// Exact solution as a function of `|phi(z)|^2`, when known.
    fn exact_from_modulus(&self, rho2: f64) -> Option<f64> {
        match self {
            Rhs::Constant(c) => Some(c * (rho2 - 1.0) / 4.0),
            Rhs::Quartic => Some((1.0 - rho2) * (1.0 - rho2)),
            Rhs::Custom(_) => None,
        }
    }
}

/// `Δu = f h` on the domain of `map`, `u = 0` on its boundary.
#[derive(Debug, Clone)]
pub struct DirichletProblem {
    map: ConformalMap,
    rhs: Rhs,
}

impl DirichletProblem {
    pub fn new(map: ConformalMap, rhs: Rhs) -> Result<Self> {
        if map.direction() != Direction::ToDisc {
            return Err(Error::WrongDirection {
                expected: "to-disc",
            });
        }
        Ok(Self { map, rhs })
    }

    pub fn map(&self) -> &ConformalMap {
        &self.map
    }

    pub fn rhs(&self) -> &Rhs {
        &self.rhs
    }

    /// `f` evaluated on the domain.
    pub fn rhs_at(&self, z: Complex64) -> f64 {
        self.rhs.eval(&self.map, z)
    }

    /// Exact solution at a domain point, for right-hand sides that have one.
    pub fn exact(&self, z: Complex64) -> Option<f64> {
        self.rhs
            .exact_from_modulus(self.map.forward_unchecked(z).0.norm_sqr())
    }

    /// The transferred right-hand side `f∘psi` on the disc nodes. Only `f` and
    /// `psi` are queried; the weight never enters.
    pub fn disc_rhs(&self, grid: PolarGrid) -> Result<DiscField> {
        let mut values = Vec::with_capacity(grid.len());
        for w in grid.nodes() {
            let z = self.map.inverse_unchecked(w).0;
            let f = self.rhs_at(z);
            if !f.is_finite() {
                return Err(Error::RhsNotFinite { re: z.re, im: z.im });
            }
            values.push(f);
        }
        DiscField::from_values(grid, values)
    }
}

/// Disc solution `v = u∘psi` together with the map that pulls it back.
#[derive(Debug, Clone)]
pub struct DiscSolution {
    pub v: DiscField,
    pub map: ConformalMap,
    pub grid: PolarGrid,
}

impl DiscSolution {
    /// `v` at an arbitrary disc point: bilinear in `(r, theta)`, zero on the
    /// circle, continued across the origin inside the first ring.
    pub fn v_at(&self, w: Complex64) -> f64 {
        let g = self.grid;
        let (r, theta) = (w.norm(), w.arg().rem_euclid(std::f64::consts::TAU));
        let x = theta / g.dtheta();
        let j0 = (x.floor() as usize) % g.n_theta;
        let j1 = (j0 + 1) % g.n_theta;
        let ft = x - x.floor();
        let ring = |i: usize| (1.0 - ft) * self.v.at(i, j0) + ft * self.v.at(i, j1);
        let s = r * g.n_r as f64 - 0.5; // fractional ring index
        if s >= (g.n_r - 1) as f64 {
            let fr = ((s - (g.n_r - 1) as f64) * 2.0).min(1.0);
            return (1.0 - fr) * ring(g.n_r - 1);
        }
        if s < 0.0 {
            let opposite = {
                let k0 = (j0 + g.n_theta / 2) % g.n_theta;
                let k1 = (j1 + g.n_theta / 2) % g.n_theta;
                (1.0 - ft) * self.v.at(0, k0) + ft * self.v.at(0, k1)
            };
            // the opposite node sits at s = -1
            let fr = s + 1.0;
            return (1.0 - fr) * opposite + fr * ring(0);
        }
        let i0 = s.floor() as usize;
        let fr = s - s.floor();
        (1.0 - fr) * ring(i0) + fr * ring(i0 + 1)
    }

    /// `u(z) = v(phi(z))`.
    pub fn u(&self, z: Complex64) -> Result<f64> {
        let w = self.map.eval(z)?;
        Ok(self.v_at(w))
    }

    /// `(x, y, u)` at the disc nodes pushed forward by `psi`.
    pub fn domain_samples(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.grid.nodes().zip(self.v.values()).map(|(w, v)| {
            let z = self.map.inverse_unchecked(w).0;
            (z.re, z.im, *v)
        })
    }

    /// `(x, y, u)` on a user lattice, keeping only points inside the domain.
    pub fn lattice_samples(&self, lattice: &Lattice) -> Vec<(f64, f64, f64)> {
        let family = self.map.family();
        lattice
            .points()
            .filter(|z| family.contains(*z))
            .filter_map(|z| self.u(z).ok().map(|u| (z.re, z.im, u)))
            .collect()
    }

    pub fn write_csv<W: Write>(&self, out: W, lattice: Option<&Lattice>) -> io::Result<()> {
        match lattice {
            Some(l) => write_csv(out, ["x", "y", "u"], self.lattice_samples(l)),
            None => write_csv(out, ["x", "y", "u"], self.domain_samples()),
        }
    }

    /// Max nodal error against the exact solution, when one is known.
    pub fn max_error(&self, problem: &DirichletProblem) -> Option<f64> {
        let mut worst = 0.0f64;
        for (w, v) in self.grid.nodes().zip(self.v.values()) {
            let z = self.map.inverse_unchecked(w).0;
            worst = worst.max((v - problem.exact(z)?).abs());
        }
        Some(worst)
    }
}

/// Rectangular sampling lattice on the domain side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lattice {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Lattice {
    fn points(&self) -> impl Iterator<Item = Complex64> + '_ {
        let step = |a: f64, b: f64, n: usize, k: usize| {
            if n <= 1 {
                a
            } else {
                a + (b - a) * k as f64 / (n - 1) as f64
            }
        };
        (0..self.ny).flat_map(move |j| {
            (0..self.nx).map(move |i| {
                Complex64::new(
                    step(self.x0, self.x1, self.nx, i),
                    step(self.y0, self.y1, self.ny, j),
                )
            })
        })
    }
}

/// Parses `x0,x1,y0,y1,nx,ny`.
impl FromStr for Lattice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let bad = || Error::InvalidArgument(format!("expected x0,x1,y0,y1,nx,ny, got {s:?}"));
        if parts.len() != 6 {
            return Err(bad());
        }
        let f = |t: &str| {
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(bad)
        };
        let n = |t: &str| t.parse::<usize>().ok().filter(|v| *v > 0).ok_or_else(bad);
        Ok(Self {
            x0: f(parts[0])?,
            x1: f(parts[1])?,
            y0: f(parts[2])?,
            y1: f(parts[3])?,
            nx: n(parts[4])?,
            ny: n(parts[5])?,
        })
    }
}

/// Solve `Δu = f h` by transfer to the disc.
pub fn solve(problem: &DirichletProblem, grid: PolarGrid) -> Result<DiscSolution> {
    let solver = PolarPoissonSolver::new(grid)?;
    let rhs = problem.disc_rhs(grid)?;
    let v = DiscField::from_values(grid, solver.solve_values(rhs.values())?)?;
    Ok(DiscSolution {
        v,
        map: problem.map,
        grid,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub residuals: Vec<f64>,
    pub max_residual: f64,
}

/// Weak-form residuals `|<∇v, ∇b>_D + ∫_D (f∘psi) b dμ|` for each test bump.
///
/// By conformal invariance of the Dirichlet pairing and the change of
/// variables for `h dμ`, these equal the domain residuals of
/// `[u, b∘phi] = -<f, b∘phi>_h`.
pub fn weak_residual(
    sol: &DiscSolution,
    problem: &DirichletProblem,
    bumps: &[TestBump],
) -> Result<ResidualReport> {
    let grid = sol.grid;
    let grad = sol.v.gradient()?;
    let rhs = problem.disc_rhs(grid)?;
    let n_t = grid.n_theta;
    let residuals = bumps
        .iter()
        .map(|b| {
            let rings: Vec<f64> = (0..grid.n_r)
                .map(|i| {
                    let terms: Vec<f64> = (0..n_t)
                        .map(|j| {
                            let k = i * n_t + j;
                            let w = grid.node(i, j);
                            let gb = b.gradient(w);
                            grad.x[k] * gb.re + grad.y[k] * gb.im + rhs.values()[k] * b.value(w)
                        })
                        .collect();
                    pairwise_sum(&terms) * grid.cell_area(i)
                })
                .collect();
            pairwise_sum(&rings).abs()
        })
        .collect::<Vec<f64>>();
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    Ok(ResidualReport {
        residuals,
        max_residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub max_error: f64,
    /// `log2(previous error / this error)`.
    pub order: Option<f64>,
}

/// Solve on `levels` grids `n x n`, `n = base_n, 2 base_n, ...`, and report the
/// max error per level, against the exact solution when known and against the
/// finest level otherwise.
pub fn convergence_study(
    problem: &DirichletProblem,
    levels: usize,
    base_n: usize,
) -> Result<Vec<ConvergenceRow>> {
    if levels < 3 {
        return Err(Error::InvalidArgument(format!(
            "need at least 3 levels, got {levels}"
        )));
    }
    let sols = (0..levels)
        .map(|l| {
            let n = base_n << l;
            solve(problem, PolarGrid::new(n, n)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let exact_known = problem.rhs.exact_from_modulus(0.0).is_some();
    let count = if exact_known { levels } else { levels - 1 };
    let finest = &sols[levels - 1];
    let errors: Vec<f64> = sols[..count]
        .iter()
        .map(|s| {
            if exact_known {
                s.max_error(problem).unwrap_or(f64::NAN)
            } else {
                max_gap_to_finer(s, finest)
            }
        })
        .collect();
    Ok(errors
        .iter()
        .enumerate()
        .map(|(l, &e)| ConvergenceRow {
            n: base_n << l,
            max_error: e,
            order: (l > 0).then(|| order_of(errors[l - 1], e)),
        })
        .collect())
}

/// `log2(coarse / fine)`; infinite when the fine error vanishes.
pub fn order_of(coarse: f64, fine: f64) -> f64 {
    if fine == 0.0 && coarse == 0.0 {
        f64::INFINITY
    } else {
        (coarse / fine).log2()
    }
}

/// Max nodal gap between a coarse solution and a finer one on a grid refined
/// by a power of two. Coarse ring `i` sits midway between two fine rings.
fn max_gap_to_finer(coarse: &DiscSolution, fine: &DiscSolution) -> f64 {
    let (cg, fg) = (coarse.grid, fine.grid);
    let ratio = fg.n_r / cg.n_r;
    let t_ratio = fg.n_theta / cg.n_theta;
    let mut worst = 0.0f64;
    for i in 0..cg.n_r {
        // fine rings bracketing r_i = (i + 1/2)/n_c
        let lo = i * ratio + ratio / 2 - 1;
        for j in 0..cg.n_theta {
            let jf = j * t_ratio;
            let fine_v = 0.5 * (fine.v.at(lo, jf) + fine.v.at(lo + 1, jf));
            worst = worst.max((coarse.v.at(i, j) - fine_v).abs());
        }
    }
    worst
}
