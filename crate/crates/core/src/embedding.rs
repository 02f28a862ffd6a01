//! Exponent algebra driven by Brennan-type integrability data, and estimates
//! of the Poincaré–Sobolev constants transferred from the disc.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{
    self, bump_family, disc_energy, pullback_energy, PolarGrid, TestBump, TestFunction,
};
use crate::maps::{ConformalMap, Direction};
use crate::poisson::PolarPoissonSolver;
use crate::quadrature::disc_rule;

/// Best proven integrability exponent `alpha_0 = 2 - 3.752`.
pub const DEFAULT_ALPHA0: f64 = -1.752;

/// Size of the bump family used when no sharp constant is available.
pub const BUMP_FAMILY_SIZE: usize = 32;

/// Relative change of successive Rayleigh quotients that ends the power
/// iteration.
pub const EIGEN_TOL: f64 = 1e-10;
pub const EIGEN_MAX_ITER: usize = 10_000;

/// The exponents `(p, q, r, s, alpha, alpha_0)` tied together by the
/// embedding theorems.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentBudget {
    pub p: f64,
    pub q: Option<f64>,
    pub r: Option<f64>,
    pub s: Option<f64>,
    pub alpha: Option<f64>,
    pub alpha0: f64,
}

impl ExponentBudget {
    pub fn new(p: f64, alpha0: f64) -> Result<Self> {
        check_alpha0(alpha0)?;
        Ok(Self {
            p,
            q: None,
            r: None,
            s: None,
            alpha: None,
            alpha0,
        })
    }

    /// Sets `s` and the dual exponent `alpha = 2 - s`.
    pub fn with_s(mut self, s: f64) -> Self {
        self.s = Some(s);
        self.alpha = Some(2.0 - s);
        self
    }

    pub fn p_min(&self) -> f64 {
        p_min(self.alpha0)
    }

    /// `alpha_0 = -2` is only admissible if Brennan's conjecture holds.
    pub fn is_conjectural(&self) -> bool {
        self.alpha0 == -2.0
    }

    /// Fills `q` and `r` with their largest admissible values.
    pub fn saturate(mut self) -> Result<Self> {
        let b = exponent_bounds(self.p, self.alpha0)?;
        self.q = Some(b.q_max);
        self.r = Some(b.r_max);
        Ok(self)
    }
}

fn check_alpha0(alpha0: f64) -> Result<()> {
    if (-2.0..0.0).contains(&alpha0) {
        Ok(())
    } else {
        Err(Error::ExponentOutOfRange(format!(
            "alpha_0 must lie in [-2, 0), got {alpha0}"
        )))
    }
}

/// `(|alpha_0| + 2) / (|alpha_0| + 1)`.
pub fn p_min(alpha0: f64) -> f64 {
    let a = alpha0.abs();
    (a + 2.0) / (a + 1.0)
}

/// `q = ps / (p + s - 2)` for `p > 2` and `s` in the Brennan range.
pub fn q_from_ps(p: f64, s: f64) -> Result<f64> {
    if !(p > 2.0 && p.is_finite()) {
        return Err(Error::ExponentOutOfRange(format!("need p > 2, got {p}")));
    }
    if !(4.0 / 3.0..=4.0).contains(&s) {
        return Err(Error::ExponentOutOfRange(format!(
            "need 4/3 <= s <= 4, got {s}"
        )));
    }
    // grouping (s - 2) first keeps q exactly 2 at s = 2
    Ok(p * s / (p + (s - 2.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentBounds {
    pub p: f64,
    pub alpha0: f64,
    pub p_min: f64,
    pub q_max: f64,
    pub r_max: f64,
    /// `2p / (4 - p)`, the value `q_max` reaches at `alpha_0 = -2`.
    pub q_ceiling: f64,
    /// `p / (2 - p)`, the value `r_max` reaches at `alpha_0 = -2`.
    pub r_ceiling: f64,
    pub conjectural: bool,
}

impl ExponentBounds {
    /// `1 <= q_max < 2p/(4-p) < p < 2` and `r_max < p/(2-p)`, with the two
    /// ceilings attained when `alpha_0 = -2`.
    pub fn chain_holds(&self) -> bool {
        let below = |x: f64, ceiling: f64| {
            if self.conjectural {
                x <= ceiling * (1.0 + 4.0 * f64::EPSILON)
            } else {
                x < ceiling
            }
        };
        1.0 <= self.q_max
            && below(self.q_max, self.q_ceiling)
            && self.q_ceiling < self.p
            && self.p < 2.0
            && below(self.r_max, self.r_ceiling)
    }
}

/// Largest `q` and `r` for the composition and embedding theorems at
/// integrability exponent `alpha_0`.
pub fn exponent_bounds(p: f64, alpha0: f64) -> Result<ExponentBounds> {
    check_alpha0(alpha0)?;
    let pm = p_min(alpha0);
    if !(p > pm && p < 2.0) {
        return Err(Error::ExponentOutOfRange(format!(
            "need {pm} < p < 2, got {p}"
        )));
    }
    let a = alpha0.abs();
    Ok(ExponentBounds {
        p,
        alpha0,
        p_min: pm,
        q_max: p * a / (2.0 + a - p),
        r_max: (2.0 * p / (2.0 - p)) * (a / (2.0 + a)),
        q_ceiling: 2.0 * p / (4.0 - p),
        r_ceiling: p / (2.0 - p),
        conjectural: alpha0 == -2.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantMethod {
    /// Sharp constant from the first Dirichlet eigenvalue.
    EigenRayleigh,
    /// Lower bound: best ratio over a finite bump family.
    BumpFamilyMax,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantEstimate {
    pub value: f64,
    pub method: ConstantMethod,
    /// Final relative change of the Rayleigh quotient (zero for bump maxima).
    pub tolerance: f64,
    pub iterations: usize,
}

impl ConstantEstimate {
    pub fn is_lower_bound(&self) -> bool {
        self.method == ConstantMethod::BumpFamilyMax
    }
}

/// First Dirichlet eigenvalue of the discrete disc Laplacian by inverse power
/// iteration, returned with the iteration count and final relative change.
pub fn dirichlet_eigenvalue(grid: PolarGrid) -> Result<(f64, usize, f64)> {
    let solver = PolarPoissonSolver::new(grid)?;
    let weights: Vec<f64> = (0..grid.n_r)
        .flat_map(|i| std::iter::repeat_n(grid.radius(i), grid.n_theta))
        .collect();
    let dot = |a: &[f64], b: &[f64]| {
        let terms: Vec<f64> = a
            .iter()
            .zip(b)
            .zip(&weights)
            .map(|((x, y), w)| x * y * w)
            .collect();
        crate::quadrature::pairwise_sum(&terms)
    };
    let mut x = vec![1.0; grid.len()];
    let mut lambda = f64::NAN;
    for it in 1..=EIGEN_MAX_ITER {
        // y = (-Δ)^{-1} x; the Rayleigh quotient of y is <x,y>/<y,y>
        let mut y = solver.solve_values(&x)?;
        y.iter_mut().for_each(|v| *v = -*v);
        let next = dot(&x, &y) / dot(&y, &y);
        let norm = dot(&y, &y).sqrt();
        x = y.into_iter().map(|v| v / norm).collect();
        let change = ((next - lambda) / next).abs();
        lambda = next;
        if change <= EIGEN_TOL {
            return Ok((lambda, it, change));
        }
    }
    Err(Error::IterationDivergence(EIGEN_MAX_ITER))
}

/// Best constant `K` of `‖g‖_{L_r(D)} <= K ‖∇g‖_{L_2(D)}` over compactly
/// supported `g`. Sharp for `r = 2`; a bump-family lower bound otherwise.
pub fn poincare_constant_disc(r: f64, grid: PolarGrid, seed: u64) -> Result<ConstantEstimate> {
    if !(r >= 1.0 && r.is_finite()) {
        return Err(Error::InvalidExponents(format!("need r >= 1, got {r}")));
    }
    if r == 2.0 {
        let (lambda, iterations, tolerance) = dirichlet_eigenvalue(grid)?;
        return Ok(ConstantEstimate {
            value: 1.0 / lambda.sqrt(),
            method: ConstantMethod::EigenRayleigh,
            tolerance,
            iterations,
        });
    }
    bump_family_constant(r, &bump_family(BUMP_FAMILY_SIZE, seed))
}

/// `max ‖b‖_{L_r} / ‖∇b‖_{L_2}` over the given bumps.
pub fn bump_family_constant(r: f64, bumps: &[TestBump]) -> Result<ConstantEstimate> {
    let grid = field::energy_grid();
    let mut best = 0.0f64;
    for b in bumps {
        let num = disc_rule(&|w| b.value(w).abs().powf(r), &grid)?.powf(1.0 / r);
        let den = disc_energy(b, 2.0, &grid)?.sqrt();
        if den > 0.0 {
            best = best.max(num / den);
        }
    }
    Ok(ConstantEstimate {
        value: best,
        method: ConstantMethod::BumpFamilyMax,
        tolerance: 0.0,
        iterations: bumps.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferCheck {
    /// Largest relative gap in `‖f‖_{L_r(Ω,h)} = ‖g‖_{L_r(D)}` and
    /// `‖∇f‖_{L_2(Ω)} = ‖∇g‖_{L_2(D)}` over all bumps.
    pub max_mismatch: f64,
    /// Largest `‖f‖_{L_r(Ω,h)} / ‖∇f‖_{L_2(Ω)}`.
    pub max_ratio: f64,
}

/// Transfers each bump `g` to `f = g∘phi` on the domain and compares the
/// weighted norm and Dirichlet norm with their disc counterparts.
pub fn weighted_constant_check(
    map: &ConformalMap,
    r: f64,
    bumps: &[TestBump],
) -> Result<TransferCheck> {
    if map.direction() != Direction::ToDisc {
        return Err(Error::WrongDirection {
            expected: "to-disc",
        });
    }
    if r.is_nan() || r < 1.0 {
        return Err(Error::InvalidExponents(format!("need r >= 1, got {r}")));
    }
    let grid = field::energy_grid();
    let rel = |a: f64, b: f64| {
        if b > 0.0 {
            (a - b).abs() / b
        } else {
            (a - b).abs()
        }
    };
    let mut out = TransferCheck {
        max_mismatch: 0.0,
        max_ratio: 0.0,
    };
    for g in bumps {
        // ∫_Ω |g(phi(z))|^r h(z) dμ(z) with z = psi(w)
        let weighted = disc_rule(
            &|w| {
                let (z, dpsi) = map.inverse_unchecked(w);
                let (back, dphi) = map.forward_unchecked(z);
                g.value(back).abs().powf(r) * dphi.norm_sqr() * dpsi.norm_sqr()
            },
            &grid,
        )?
        .powf(1.0 / r);
        let plain = disc_rule(&|w| g.value(w).abs().powf(r), &grid)?.powf(1.0 / r);
        let grad_domain = pullback_energy(map, g, 2.0, &grid)?.sqrt();
        let grad_disc = disc_energy(g, 2.0, &grid)?.sqrt();
        out.max_mismatch = out
            .max_mismatch
            .max(rel(weighted, plain))
            .max(rel(grad_domain, grad_disc));
        if grad_domain > 0.0 {
            out.max_ratio = out.max_ratio.max(weighted / grad_domain);
        }
    }
    Ok(out)
}
