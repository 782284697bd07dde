//! Mass-scaling formula on gKdV with its coefficients promoted to constant
//! dependent variables.

use jetcalc::corpus::bundled_dir;
use jetcalc::current_builder::{verify_conservation, verify_dimensional_scaling};
use jetcalc::expr::show_coeff;
use jetcalc::pde_system::PdeSystem;
use jetcalc::Q;

fn main() -> jetcalc::Result<()> {
    let one = Q::from_integer(1.into());
    for p in [1i64, 2, 4] {
        let bind = [("p".to_string(), Q::from_integer(p.into()))];
        let aug = PdeSystem::load(&bundled_dir().join("gkdv_dimensional.toml"), &bind)?;
        let orig = PdeSystem::load(&bundled_dir().join("gkdv.toml"), &bind)?;
        let act = aug.scaling(Some("mass"))?;
        for m in &aug.multipliers {
            let vals = [("mu".to_string(), one.clone()), ("nu".to_string(), one.clone())];
            let d = verify_dimensional_scaling(&orig, &aug, &m.q, act, &vals)?;
            let (t, _) = d.raw.show(&orig.space);
            let ok = verify_conservation(&orig, &d.current.current)?.outcome;
            println!("p={p} {}: omega = {}, raw T = {t}, conserved: {ok:?}", m.name, show_coeff(&d.omega, &aug.space));
        }
    }
    Ok(())
}
