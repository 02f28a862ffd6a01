//! Dirichlet energy is unchanged by composing with a conformal map.

use conformal_transfer::field::{bump_family, isometry_check, BUMP_SEED};
use conformal_transfer::maps::{ConformalMap, DomainFamily};

fn main() -> conformal_transfer::Result<()> {
    let bumps = bump_family(5, BUMP_SEED);
    for family in DomainFamily::ALL {
        let dev = isometry_check(&ConformalMap::to_disc(family), &bumps)?;
        println!("{:>10}  max relative energy gap {dev:.3e}", family.name());
    }
    Ok(())
}
