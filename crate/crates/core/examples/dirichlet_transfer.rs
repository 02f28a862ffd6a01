//! Solve Laplace(u) = -4 h on the strip by solving on the disc, and watch the
//! error against u = 1 - |phi|^2 fall at second order.

use conformal_transfer::maps::{ConformalMap, DomainFamily};
use conformal_transfer::poisson::{convergence_study, DirichletProblem, Rhs};

fn main() -> conformal_transfer::Result<()> {
    for family in [DomainFamily::Strip, DomainFamily::SlitPlane] {
        let problem = DirichletProblem::new(ConformalMap::to_disc(family), Rhs::Constant(-4.0))?;
        println!("{}", family.name());
        for row in convergence_study(&problem, 4, 32)? {
            println!(
                "  n = {:>4}  max error {:.3e}  order {}",
                row.n,
                row.max_error,
                row.order.map_or("-".into(), |o| format!("{o:.3}"))
            );
        }
    }
    Ok(())
}
