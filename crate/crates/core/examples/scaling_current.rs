//! Scaling construction of conserved currents and the critical-weight case.

use jetcalc::current_builder::{current_equivalence, current_from_multiplier_homotopy, current_from_multiplier_scaling};
use jetcalc::corpus::bundled_dir;
use jetcalc::expr::show_coeff;
use jetcalc::pde_system::PdeSystem;
use jetcalc::Q;

fn main() -> jetcalc::Result<()> {
    let file = bundled_dir().join("gkdv.toml");
    for p in [3, 2] {
        let sys = PdeSystem::load(&file, &[("p".into(), Q::from_integer(p.into()))])?;
        let act = sys.scaling(None)?;
        for q in ["1", "u", "u_xx + u^(p+1)/(p+1)"] {
            let q = vec![sys.parse(q)?];
            match current_from_multiplier_scaling(&sys, &q, act) {
                Ok(c) => {
                    let h = current_from_multiplier_homotopy(&sys, &q, &[])?;
                    let eq = current_equivalence(&sys, &c.current, &h.current)?.equivalent();
                    let w = c.omega.as_ref().map(|w| show_coeff(w, &sys.space)).unwrap_or_default();
                    println!("p={p} Q={}: omega = {w}, equivalent to homotopy: {eq}", sys.show(&q[0]));
                }
                Err(e) => println!("p={p} Q={}: {e}", sys.show(&q[0])),
            }
        }
    }
    Ok(())
}
