//! Multiplier determining system for gKdV at p = 1, 2, 3.

use jetcalc::detsys::{default_basis, solve_linear_ansatz, LinearAnsatz, Target};
use jetcalc::pde_system::PdeSystem;
use jetcalc::{JetSpace, Q};

fn main() -> jetcalc::Result<()> {
    for p in 1..=3 {
        let sp = JetSpace::new(&["t", "x"], &["u"]).with_param("p", Q::from_integer(p.into()));
        let sys = PdeSystem::from_equations("gkdv", sp, &[("u_t", "-u^p*u_x - u_xxx")])?;
        let ansatz = LinearAnsatz::scalar(&default_basis(&sys, 4));
        let set = solve_linear_ansatz(&sys, Target::Multipliers, &ansatz)?;
        println!("p = {p}: {} multipliers ({} unknowns, rank {})", set.elements.len(), set.unknowns, set.rank);
        for q in &set.elements {
            println!("  Q = {}", sys.show(&q[0]));
        }
    }
    Ok(())
}
