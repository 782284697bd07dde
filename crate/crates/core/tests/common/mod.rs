//! Random small expressions and the operator identities checked on them.
//! Shared by the property suite and the acceptance harness.

#![allow(dead_code)]

use std::collections::HashMap;

use jetcalc::pde_system::PdeSystem;
use jetcalc::varcalc::{
    adjoint_current, euler, euler_current, frechet, frechet_adjoint, higher_euler, higher_euler_indices,
};
use jetcalc::{Expr, JetSpace, Point, Q};
use num_traits::{Signed, Zero};
use proptest::prelude::*;

pub const CASES: u32 = 1000;

const FACTORS: &[&str] = &["u", "u_x", "u_t", "u_xx", "u_tx", "u_xxx", "v", "v_x", "v_t", "x", "t"];

pub fn space() -> JetSpace {
    JetSpace::new(&["t", "x"], &["u", "v"])
}

/// Coupled evolution system on the same space, for restriction checks.
pub fn evolution_system() -> PdeSystem {
    PdeSystem::from_equations("coupled", space(), &[("u_t", "-u^2*u_x - u_xxx"), ("v_t", "-(u*v)_x")]).unwrap()
}

fn term() -> impl Strategy<Value = String> {
    (
        prop_oneof![-3i64..=-1, 1i64..=3],
        prop::collection::vec((prop::sample::select(FACTORS), 1u32..=2), 1..=3),
    )
        .prop_map(|(c, fs)| {
            let body: Vec<String> = fs.iter().map(|(f, e)| if *e == 1 { f.to_string() } else { format!("{f}^{e}") }).collect();
            format!("{c}*{}", body.join("*"))
        })
}

/// Text of a polynomial with one to three terms.
pub fn expr_text() -> impl Strategy<Value = String> {
    prop::collection::vec(term(), 1..=3).prop_map(|ts| ts.join(" + "))
}

pub fn parse(sp: &JetSpace, s: &str) -> Expr {
    sp.parse(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn zero(label: &str, e: &Expr, sp: &JetSpace) -> Result<(), String> {
    if e.is_zero() {
        Ok(())
    } else {
        Err(format!("{label}: residual {}", sp.show(e)))
    }
}

/// `w f'[v] - v . f'*[w] = D . Psi(v, w; f)`.
pub fn adjoint_identity(sp: &JetSpace, f: &Expr, v: &[Expr], w: &Expr) -> Result<(), String> {
    let adj = frechet_adjoint(f, w, sp);
    let vdot: Vec<Expr> = v.iter().zip(&adj).map(|(a, b)| a.mul(b)).collect();
    let lhs = w.mul(&frechet(f, v, sp)).sub(&Expr::sum(vdot.iter()));
    let r = lhs.sub(&adjoint_current(f, v, w, sp).divergence(sp));
    zero("adjoint identity", &r, sp)
}

/// `f'[v] = v . E(f) + D . Upsilon_f(v)`.
pub fn euler_lagrange(sp: &JetSpace, f: &Expr, v: &[Expr]) -> Result<(), String> {
    let e = euler(f, sp);
    let vdot: Vec<Expr> = v.iter().zip(&e).map(|(a, b)| a.mul(b)).collect();
    let r = frechet(f, v, sp).sub(&Expr::sum(vdot.iter())).sub(&euler_current(f, v, sp).divergence(sp));
    zero("Euler-Lagrange relation", &r, sp)
}

/// `E(f g) = f'*[g] + g'*[f]`.
pub fn product_rule(sp: &JetSpace, f: &Expr, g: &Expr) -> Result<(), String> {
    let lhs = euler(&f.mul(g), sp);
    let a = frechet_adjoint(f, g, sp);
    let b = frechet_adjoint(g, f, sp);
    for i in 0..sp.n_dep() {
        zero("product rule", &lhs[i].sub(&a[i]).sub(&b[i]), sp)?;
    }
    Ok(())
}

/// `E(D_i f) = 0` for every direction.
pub fn divergence_annihilation(sp: &JetSpace, f: &Expr) -> Result<(), String> {
    for i in 0..sp.n_indep() {
        for e in euler(&f.total_derivative(i, sp), sp) {
            zero("Euler of a total derivative", &e, sp)?;
        }
    }
    Ok(())
}

/// `f'[v] = sum_L D^L (v E^{(L)}(f))`, `L` running over counting
/// multi-indices with `E^{(0)} = E`.
pub fn frechet_via_higher_euler(sp: &JetSpace, f: &Expr, v: &[Expr]) -> Result<(), String> {
    let mut sum = Expr::zero();
    for a in 0..sp.n_dep() {
        let mut ls = vec![smallvec::SmallVec::<[u8; 4]>::from_elem(0, sp.n_indep())];
        ls.extend(higher_euler_indices(f, a as u16));
        for l in ls {
            let he = higher_euler(f, a as u16, &l, sp);
            sum = sum.add(&v[a].mul(&he).total_derivative_multi(&l, sp));
        }
    }
    zero("Frechet via higher Euler", &frechet(f, v, sp).sub(&sum), sp)
}

pub fn commutation(sp: &JetSpace, f: &Expr) -> Result<(), String> {
    let a = f.total_derivative(1, sp).total_derivative(0, sp);
    let b = f.total_derivative(0, sp).total_derivative(1, sp);
    zero("D_t D_x - D_x D_t", &a.sub(&b), sp)
}

/// Restriction is idempotent and leaves no lead or lead derivative.
pub fn restrict_idempotent(sys: &PdeSystem, f: &Expr) -> Result<(), String> {
    let once = sys.restrict(f).map_err(|e| e.to_string())?;
    let twice = sys.restrict(&once).map_err(|e| e.to_string())?;
    zero("restrict twice - restrict once", &twice.sub(&once), &sys.space)?;
    if let Some(v) = once.jet_vars().into_iter().find(|v| sys.is_descendant(v)) {
        return Err(format!("lead derivative {} survives restriction", sys.space.jet_name(&v)));
    }
    Ok(())
}

fn abs_f64(x: &Q) -> f64 {
    let a = x.abs();
    let n: f64 = a.numer().to_string().parse().unwrap();
    let d: f64 = a.denom().to_string().parse().unwrap();
    n / d
}

/// Difference quotients `(f(u + eps V) - f(u)) / eps` at a rational point
/// converge to `f'[v]` at first order: the signed error is `a eps + O(eps^2)`
/// with `a = f''[V, V] / 2`. `vals` seeds the point.
pub fn finite_difference(sp: &JetSpace, f: &Expr, v: &[Expr], vals: &[i64]) -> Result<(), String> {
    let fv = frechet(f, v, sp);
    let vars = f.jet_vars();
    // values of D^K v^a at the point, for each jet variable u^a_K of f
    let dirs: Vec<Expr> = vars.iter().map(|j| v[j.dep as usize].total_derivative_multi(&j.idx, sp)).collect();
    let mut all: Vec<Expr> = vec![f.clone(), fv.clone()];
    all.extend(dirs.iter().cloned());
    let mut pt = Point::default();
    let mut k = 0;
    let mut next = || {
        let x = vals[k % vals.len()];
        k += 1;
        Q::new(x.into(), 2.into())
    };
    let mut seen = Vec::new();
    for e in &all {
        for j in e.jet_vars() {
            if !seen.contains(&j) {
                seen.push(j);
            }
        }
    }
    seen.sort();
    for j in seen {
        let x = next();
        pt.jets.insert(j, x);
    }
    pt.indep = (0..sp.n_indep()).map(|_| next()).collect();
    let ev = |e: &Expr| -> Result<Q, String> { e.eval(&pt, sp).map_err(|e| e.to_string()) };
    let mut w: Vec<Q> = dirs.iter().map(&ev).collect::<Result<_, _>>()?;
    // unit max-norm direction, so eps is a relative step
    let norm = w.iter().map(|x| x.abs()).max().unwrap_or_else(Q::zero);
    if !norm.is_zero() {
        w.iter_mut().for_each(|x| *x /= &norm);
    }
    let f0 = ev(f)?;
    let mut exact = Q::zero();
    for (j, wj) in vars.iter().zip(&w) {
        exact += ev(&f.partial(j, sp))? * wj;
    }
    let unscaled = ev(&fv)?;
    if !norm.is_zero() && unscaled != &exact * &norm {
        return Err(format!("f'[v] disagrees with the chain rule at the point: {unscaled}"));
    }
    // a = 1/2 f''[V, V] with V frozen at the point
    let mut a = Q::zero();
    for (j, wj) in vars.iter().zip(&w) {
        let dj = f.partial(j, sp);
        for (k, wk) in vars.iter().zip(&w) {
            a += ev(&dj.partial(k, sp))? * wj * wk;
        }
    }
    a /= Q::from_integer(2.into());
    // signed errors s(eps) = a eps + O(eps^2), exactly
    let mut errs = Vec::new();
    let mut rems = Vec::new();
    for n in [100i64, 1000, 10000] {
        let eps = Q::new(1.into(), n.into());
        let shifted: HashMap<_, _> =
            vars.iter().zip(&w).map(|(j, wj)| (j.clone(), Expr::jet(j.clone()).add(&Expr::rat(eps.clone() * wj)))).collect();
        let fe = ev(&f.substitute(&shifted, sp).map_err(|e| e.to_string())?)?;
        let s = (fe - &f0) / &eps - &exact;
        rems.push((&s - &a * &eps).abs());
        errs.push(abs_f64(&s));
    }
    if &rems[2] * Q::from_integer(50.into()) > rems[1] {
        return Err(format!("error minus its linear term is not second order: errors {errs:?}, a = {a}"));
    }
    Ok(())
}
