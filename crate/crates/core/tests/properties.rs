use conformal_transfer::embedding::{exponent_bounds, p_min, q_from_ps};
use conformal_transfer::field::{DiscField, PolarGrid};
use conformal_transfer::maps::{ConformalMap, DomainFamily, MoebiusAutomorphism};
use conformal_transfer::poisson::PolarPoissonSolver;
use num_complex::Complex64;
use proptest::prelude::*;

fn family() -> impl Strategy<Value = DomainFamily> {
    prop::sample::select(DomainFamily::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn disc_points_round_trip(f in family(), r in 0.0f64..0.95, t in 0.0f64..std::f64::consts::TAU) {
        let w = Complex64::from_polar(r, t);
        let m = ConformalMap::to_disc(f);
        if let Ok(z) = m.invert().eval(w) {
            prop_assert!(f.contains(z));
            let back = m.eval(z).unwrap();
            prop_assert!((back - w).norm() <= 1e-12);
        }
    }

    #[test]
    fn automorphisms_preserve_the_disc(ar in 0.0f64..0.99, at in 0.0f64..std::f64::consts::TAU, theta in -3.0f64..3.0,
                                       r in 0.0f64..0.999, t in 0.0f64..std::f64::consts::TAU) {
        let eta = MoebiusAutomorphism::new(Complex64::from_polar(ar, at), theta).unwrap();
        let w = Complex64::from_polar(r, t);
        let v = eta.eval(w);
        prop_assert!(v.norm() < 1.0 + 1e-12);
        prop_assert!((eta.eval_inverse(v) - w).norm() <= 1e-9);
    }

    #[test]
    fn lp_norm_is_homogeneous(c in -5.0f64..5.0, p in 1.0f64..4.0) {
        let grid = PolarGrid::new(16, 16).unwrap();
        let f = DiscField::sample(grid, |w| 1.0 - w.norm_sqr() + 0.3 * w.re).unwrap();
        let a = f.scaled(c).lp_norm(p, None).unwrap();
        let b = c.abs() * f.lp_norm(p, None).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * b.max(1e-300));
    }

    #[test]
    fn q_from_ps_is_monotone_and_bounded(p in 2.001f64..50.0, s1 in 1.34f64..4.0, ds in 0.0f64..1.0) {
        let s2 = (s1 + ds).min(4.0);
        let (q1, q2) = (q_from_ps(p, s1).unwrap(), q_from_ps(p, s2).unwrap());
        prop_assert!(q1 <= q2 * (1.0 + 1e-15));
        prop_assert!(q1 < p);
    }

    #[test]
    fn exponent_chain_holds(a in -2.0f64..-0.01, u in 0.001f64..0.999) {
        let pm = p_min(a);
        let p = pm + (2.0 - pm) * u;
        prop_assume!(p > pm && p < 2.0);
        prop_assert!(exponent_bounds(p, a).unwrap().chain_holds());
    }

    #[test]
    fn poisson_solver_is_linear(c in -3.0f64..3.0) {
        let solver = PolarPoissonSolver::new(PolarGrid::new(16, 16).unwrap()).unwrap();
        let grid = solver.grid();
        let rhs: Vec<f64> = grid.nodes().map(|w| w.re * w.im - 0.5).collect();
        let scaled: Vec<f64> = rhs.iter().map(|v| c * v).collect();
        let a = solver.solve_values(&rhs).unwrap();
        let b = solver.solve_values(&scaled).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((c * x - y).abs() <= 1e-12 * (1.0 + x.abs()));
        }
    }
}
