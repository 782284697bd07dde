//! Conserved currents of gKdV (p = 3) from multipliers by the homotopy integral.

use jetcalc::current_builder::{current_from_multiplier_homotopy, multiplier_from_current, verify_characteristic};
use jetcalc::pde_system::PdeSystem;
use jetcalc::{JetSpace, Q};

fn main() -> jetcalc::Result<()> {
    let sp = JetSpace::new(&["t", "x"], &["u"]).with_param("p", Q::from_integer(3.into()));
    let sys = PdeSystem::from_equations("gkdv", sp, &[("u_t", "-u^p*u_x - u_xxx")])?;
    for q in ["1", "u", "u_xx + u^4/4"] {
        let q = vec![sys.parse(q)?];
        let c = current_from_multiplier_homotopy(&sys, &q, &[])?;
        let (t, x) = c.current.show(&sys.space);
        println!("Q = {}\n  T = {t}\n  X = {}", sys.show(&q[0]), x[0]);
        println!("  characteristic form: {:?}", verify_characteristic(&sys, &c.current, &q)?.outcome);
        println!("  recovered Q = {}", sys.show(&multiplier_from_current(&sys, &c.current)?[0]));
    }
    Ok(())
}
