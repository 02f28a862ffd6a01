//! The dilatation constant K_(p,q) on the cardioid and the composition
//! inequality it controls.

use conformal_transfer::field::{bump_family, composition_inequality_check, BUMP_SEED};
use conformal_transfer::maps::{ConformalMap, DomainFamily};
use conformal_transfer::quadrature::{kpq_norm, DiscGridSpec, DEFAULT_MAX_LEVELS, DEFAULT_TOL};

fn main() -> conformal_transfer::Result<()> {
    let map = ConformalMap::to_disc(DomainFamily::Cardioid);
    let k = kpq_norm(
        &map,
        2.0,
        1.0,
        DiscGridSpec::default(),
        DEFAULT_MAX_LEVELS,
        DEFAULT_TOL,
    )?;
    println!(
        "K_(2,1) = {:.8} (sqrt(3 pi / 8) = {:.8})",
        k.value,
        (3.0 * std::f64::consts::PI / 8.0).sqrt()
    );

    for r in composition_inequality_check(&map, 2.0, 1.5, &bump_family(8, BUMP_SEED))? {
        println!(
            "|grad(f o phi)|_1.5 = {:.6}  <=  K |grad f|_2 = {:.6}  {}",
            r.composed_norm,
            r.k * r.source_norm,
            if r.passes { "ok" } else { "FAIL" }
        );
    }
    Ok(())
}
