//! Conformal weights h = |phi'|^2 for every domain family, plus the
//! two tabulated formulas that disagree with the maps.

use conformal_transfer::audit::{audit_cardioid, audit_weight};
use conformal_transfer::maps::DomainFamily;
use conformal_transfer::weight::WeightField;
use num_complex::Complex64;

fn main() -> conformal_transfer::Result<()> {
    for family in DomainFamily::ALL {
        let w = WeightField::for_family(family);
        let z = family.interior_samples(1, 7)[0];
        println!(
            "{:>10}  h({:.4}{:+.4}i) = {:.6}",
            family.name(),
            z.re,
            z.im,
            w.eval(z)?
        );
    }

    if let Some(a) = audit_weight(DomainFamily::Strip, 100, 1, Complex64::new(0.5, 0.0)) {
        println!(
            "strip at 0.5: computed {:.5}, tabulated {:.4}",
            a.probe.2, a.probe.3
        );
    }
    let c = audit_cardioid(0.0625, 64);
    println!(
        "cardioid at 1/16: tabulated map Jacobian {}, tabulated weight {}, corrected map weight {}",
        c.tabulated_map_jacobian, c.tabulated_weight, c.corrected_weight
    );
    Ok(())
}
