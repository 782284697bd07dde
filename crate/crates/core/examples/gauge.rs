//! Gauge multipliers from a differential identity, and their triviality.

use jetcalc::corpus::bundled_dir;
use jetcalc::detsys::{gauge_multiplier, triviality_check, verify_multiplier, LinearAnsatz, Triviality};
use jetcalc::pde_system::PdeSystem;
use jetcalc::Q;

fn main() -> jetcalc::Result<()> {
    let rho = [("rho".to_string(), Q::from_integer(2.into()))];
    let sys = PdeSystem::load(&bundled_dir().join("euler_fluid_2d.toml"), &rho)?;
    let chi = sys.parse("x*u2 + p")?;
    let q = gauge_multiplier(&sys, &[chi])?;
    for (eq, qa) in sys.equations.iter().zip(&q) {
        println!("Q[{}] = {}", eq.name, sys.show(qa));
    }
    println!("multiplier: {:?}", verify_multiplier(&sys, &q)?.outcome);
    let ansatz = LinearAnsatz::scalar(&["1", "p", "x*u2", "u1"].map(|s| sys.parse(s).unwrap()));
    match triviality_check(&sys, &q, Some(&ansatz))? {
        Triviality::Trivial { witness: Some(w) } => println!("trivial, chi = {}", sys.show(&w[0])),
        t => println!("triviality: {t:?}"),
    }
    Ok(())
}
