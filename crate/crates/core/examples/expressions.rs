//! Parse, normalize, differentiate and evaluate jet-space expressions.

use jetcalc::{JetSpace, Point, Q};

fn main() -> jetcalc::Result<()> {
    let sp = JetSpace::new(&["t", "x"], &["u"]).with_free_param("p");
    let g = sp.parse("u_t + u^p*u_x + u_xxx")?;
    println!("G        = {}", sp.show(&g));
    println!("D_x G    = {}", sp.show(&g.total_derivative(1, &sp)));
    println!("dG/du    = {}", sp.show(&g.partial(&sp.u(0), &sp)));
    let e = sp.parse("(u + u_x)^2 - u^2 - 2*u*u_x")?;
    println!("normal   = {}", sp.show(&e));
    println!("(u*u_x)_x = {}", sp.show(&sp.parse("(u*u_x)_x")?));
    let bound = JetSpace::new(&["t", "x"], &["u"]).with_param("p", Q::from_integer(2.into()));
    let g2 = bound.parse("u_t + u^p*u_x + u_xxx")?;
    let mut pt = Point::default();
    for (name, v) in [("u", 2), ("u_t", 1), ("u_x", 3), ("u_xxx", -5)] {
        pt.jets.insert(bound.jet(name)?, Q::from_integer(v.into()));
    }
    println!("G at point (p = 2) = {}", g2.eval(&pt, &bound)?);
    println!("zero test of u*u_x - u_x*u: {:?}", sp.parse("u*u_x - u_x*u")?.zero_test());
    Ok(())
}
