//! Frechet derivative, its adjoint, Euler and higher Euler operators.

use jetcalc::varcalc::{euler, frechet, frechet_adjoint, higher_euler};
use jetcalc::JetSpace;

fn main() -> jetcalc::Result<()> {
    let sp = JetSpace::new(&["t", "x"], &["u"]);
    let g = sp.parse("u_t + u^2*u_x + u_xxx")?;
    let v = sp.parse("u_x")?;
    println!("G'[u_x]   = {}", sp.show(&frechet(&g, &[v], &sp)));
    let w = sp.parse("u")?;
    println!("G'*[u]    = {}", sp.show(&frechet_adjoint(&g, &w, &sp)[0]));
    let l = sp.parse("u*u_x^2 + x*u_t")?;
    println!("E_u(L)    = {}", sp.show(&euler(&l, &sp)[0]));
    let div = sp.parse("u_x*u_xx + u*u_xxx")?;
    println!("E_u(D_x(u u_xx)) = {}", sp.show(&euler(&div, &sp)[0]));
    println!("E^(x)_u(L) = {}", sp.show(&higher_euler(&l, 0, &[0, 1], &sp)));
    Ok(())
}
