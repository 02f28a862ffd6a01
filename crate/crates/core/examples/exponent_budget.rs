//! Admissible exponents as the integrability exponent alpha_0 moves toward -2.

use conformal_transfer::embedding::{exponent_bounds, q_from_ps};

fn main() -> conformal_transfer::Result<()> {
    let p = 1.9;
    println!(
        "{:>8} {:>8} {:>10} {:>10} {:>10}",
        "alpha_0", "p_min", "q_max", "r_max", "chain"
    );
    for alpha0 in [-1.0, -1.5, -1.752, -1.9, -2.0] {
        let b = exponent_bounds(p, alpha0)?;
        println!(
            "{alpha0:>8.3} {:>8.4} {:>10.6} {:>10.4} {:>10}",
            b.p_min,
            b.q_max,
            b.r_max,
            if b.chain_holds() { "holds" } else { "broken" }
        );
    }
    for s in [4.0 / 3.0, 2.0, 3.0, 4.0] {
        println!("p = 3, s = {s:.4}: q = {:.6}", q_from_ps(3.0, s)?);
    }
    Ok(())
}
