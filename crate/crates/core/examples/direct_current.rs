//! Direct solve of the characteristic equation for a current.

use jetcalc::current_builder::{current_from_multiplier_direct, verify_characteristic, DirectBasis};
use jetcalc::pde_system::PdeSystem;
use jetcalc::{JetSpace, Q};

fn main() -> jetcalc::Result<()> {
    let sp = JetSpace::new(&["t", "x"], &["u"]).with_param("p", Q::from_integer(1.into()));
    let sys = PdeSystem::from_equations("kdv", sp, &[("u_t", "-u^p*u_x - u_xxx")])?;
    let q = vec![sys.parse("x - t*u")?];
    let basis = DirectBasis::default_for(&sys, &q, 3)?;
    let c = current_from_multiplier_direct(&sys, &q, &basis)?;
    let (t, x) = c.current.show(&sys.space);
    println!("T = {t}\nX = {}\ntrivial freedom = {:?}", x[0], c.freedom);
    println!("characteristic form: {:?}", verify_characteristic(&sys, &c.current, &q)?.outcome);
    Ok(())
}
