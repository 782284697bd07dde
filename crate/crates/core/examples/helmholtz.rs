//! Helmholtz conditions and the Lagrangian of a variational system.

use jetcalc::pde_system::PdeSystem;
use jetcalc::varcalc::{euler, helmholtz_check, lagrangian_from_system};
use jetcalc::JetSpace;

fn main() -> jetcalc::Result<()> {
    let sp = JetSpace::new(&["t", "x"], &["u"]).with_free_param("p");
    let gkdv = PdeSystem::from_equations("gkdv", sp, &[("u_t", "-u^p*u_x - u_xxx")])?;
    let rep = helmholtz_check(&gkdv);
    println!("gKdV variational: {}", rep.variational);
    for r in rep.at_order(0) {
        println!("  k=0 residual: {}", gkdv.show(&r.residual));
    }
    let sp = JetSpace::new(&["t", "x"], &["w"]).with_free_param("p");
    let pot = PdeSystem::from_equations("pgkdv", sp, &[("w_tx", "-w_x^p*w_xx - w_xxxx")])?;
    println!("potential gKdV variational: {}", helmholtz_check(&pot).variational);
    let l = lagrangian_from_system(&pot)?;
    println!("L = {}", pot.show(&l));
    let back = euler(&l, &pot.space)[0].sub(&pot.g(0));
    println!("E_w(L) - G = {}", pot.show(&back));
    Ok(())
}
