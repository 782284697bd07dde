//! Multipliers of currents and local equivalence of currents.

use jetcalc::current_builder::{current_equivalence, multiplier_from_current};
use jetcalc::pde_system::PdeSystem;
use jetcalc::varcalc::Current;
use jetcalc::{JetSpace, Q};

fn main() -> jetcalc::Result<()> {
    let sp = JetSpace::new(&["t", "x"], &["u"]).with_param("p", Q::from_integer(2.into()));
    let sys = PdeSystem::from_equations("mkdv", sp, &[("u_t", "-u^p*u_x - u_xxx")])?;
    let cur = |t: &str, x: &str| -> jetcalc::Result<Current> { Ok(Current { t: sys.parse(t)?, x: vec![sys.parse(x)?] }) };
    let c3 = cur(
        "u*u_xx/2 + u^4/12",
        "u^6/18 + u^3*u_xx/3 + (u_xx^2 + u_t*u_x)/2 - u*u_tx/2",
    )?;
    // subtract the trivial current (D_x theta, -D_t theta) with theta = u u_x / 2
    let shifted = cur(
        "u*u_xx/2 + u^4/12 - (u_x^2 + u*u_xx)/2",
        "u^6/18 + u^3*u_xx/3 + (u_xx^2 + u_t*u_x)/2 - u*u_tx/2 + (u_t*u_x + u*u_tx)/2",
    )?;
    println!("Q(c3) = {}", sys.show(&multiplier_from_current(&sys, &c3)?[0]));
    println!("c3 ~ c3 - trivial: {}", current_equivalence(&sys, &c3, &shifted)?.equivalent());
    let m = cur("u", "u^3/3 + u_xx")?;
    let m2 = cur("2*u", "2*u^3/3 + 2*u_xx")?;
    println!("mass ~ 2 mass: {}", current_equivalence(&sys, &m, &m2)?.equivalent());
    Ok(())
}
