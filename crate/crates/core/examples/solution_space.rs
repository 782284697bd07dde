//! Restriction to the solution space, low-order variables and the lift of
//! an expression off the solution space.

use jetcalc::pde_system::PdeSystem;
use jetcalc::JetSpace;

fn main() -> jetcalc::Result<()> {
    let sp = JetSpace::new(&["t", "x"], &["u"]).with_free_param("p");
    let sys = PdeSystem::from_equations("gkdv", sp, &[("u_t", "-u^p*u_x - u_xxx")])?;
    let e = sys.parse("u_tx*u + x*u_t")?;
    println!("restrict({}) = {}", sys.show(&e), sys.show(&sys.restrict(&e)?));
    let low: Vec<String> = sys.low_order_variables().iter().map(|v| sys.space.jet_name(v)).collect();
    println!("low-order variables: {}", low.join(", "));
    let lift = sys.lift_off_solution_space(&e)?;
    for (a, k, c) in &lift.terms {
        println!("lift term: equation {} derivative {:?} coefficient {}", a + 1, k.as_slice(), sys.show(c));
    }
    let bw = PdeSystem::from_equations(
        "breaking wave",
        JetSpace::new(&["t", "x"], &["u"]),
        &[("u_txx", "u_t + 3*u*u_x - 2*u_x*u_xx - u*u_xxx")],
    )?;
    let low: Vec<String> = bw.low_order_variables().iter().map(|v| bw.space.jet_name(v)).collect();
    println!("breaking wave low-order variables: {}", low.join(", "));
    Ok(())
}
