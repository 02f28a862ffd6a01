//! The disc Poincare constant from inverse power iteration, against the
//! Bessel zero, and its transfer to a domain with the conformal weight.

use conformal_transfer::bessel::j0_first_zero;
use conformal_transfer::embedding::{poincare_constant_disc, weighted_constant_check};
use conformal_transfer::field::{bump_family, PolarGrid, BUMP_SEED};
use conformal_transfer::maps::{ConformalMap, DomainFamily};

fn main() -> conformal_transfer::Result<()> {
    let oracle = 1.0 / j0_first_zero();
    for n in [32, 64, 128, 256] {
        let est = poincare_constant_disc(2.0, PolarGrid::new(n, n)?, BUMP_SEED)?;
        println!(
            "{n:>4}^2  K = {:.8}  (1/j0,1 = {oracle:.8})  {} iterations",
            est.value, est.iterations
        );
    }

    let bumps = bump_family(8, BUMP_SEED);
    let t = weighted_constant_check(&ConformalMap::to_disc(DomainFamily::Cardioid), 3.0, &bumps)?;
    println!(
        "cardioid, r = 3: norm mismatch {:.2e}, best ratio {:.6}",
        t.max_mismatch, t.max_ratio
    );
    Ok(())
}
