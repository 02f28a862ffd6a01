//! Sweep s across the Brennan range on the Koebe slit plane.

use conformal_transfer::maps::{ConformalMap, DomainFamily};
use conformal_transfer::quadrature::{
    brennan_direct, DiscGridSpec, DEFAULT_MAX_LEVELS, DEFAULT_TOL,
};

fn main() -> conformal_transfer::Result<()> {
    let map = ConformalMap::to_disc(DomainFamily::SlitPlane);
    for s in [1.2, 1.3, 1.4, 1.5, 2.0, 3.0, 3.5, 3.9, 4.1] {
        let r = brennan_direct(
            &map,
            s,
            DiscGridSpec::default(),
            DEFAULT_MAX_LEVELS,
            DEFAULT_TOL,
        )?;
        println!(
            "s = {s:.1}  {:<12} value = {:.6}",
            r.verdict.name(),
            r.value
        );
    }
    Ok(())
}
