//! Variational symmetries and multipliers of the potential gKdV equation.

use jetcalc::detsys::{default_basis, same_span, solve_linear_ansatz, LinearAnsatz, Target};
use jetcalc::pde_system::PdeSystem;
use jetcalc::{JetSpace, Q};

fn main() -> jetcalc::Result<()> {
    for p in 1..=3 {
        let sp = JetSpace::new(&["t", "x"], &["w"]).with_param("p", Q::from_integer(p.into()));
        let sys = PdeSystem::from_equations("pgkdv", sp, &[("w_tx", "-w_x^p*w_xx - w_xxxx")])?;
        let ansatz = LinearAnsatz::scalar(&default_basis(&sys, 2));
        let q = solve_linear_ansatz(&sys, Target::Multipliers, &ansatz)?;
        let v = solve_linear_ansatz(&sys, Target::Variational, &ansatz)?;
        println!("p = {p}: {} multipliers, {} variational symmetries, same span: {}", q.elements.len(), v.elements.len(), same_span(&q.elements, &v.elements));
        for e in &v.elements {
            println!("  P = {}", sys.show(&e[0]));
        }
    }
    Ok(())
}
