//! Total and partial derivatives.

use std::sync::Arc;

use smallvec::SmallVec;

use super::{Base, Expr, FuncApp, JetVar, Monomial};
use crate::coeff::{Coeff, Exponent};
use crate::space::JetSpace;

/// Derivative of a function application with respect to its `k`th argument,
/// using the declared rule when the node is undifferentiated.
pub(crate) fn func_partial(app: &FuncApp, k: usize, sp: &JetSpace) -> Expr {
    if let Some(decl) = sp.funcs.get(app.id as usize) {
        if app.derivs.iter().all(|&d| d == 0) {
            if let Some(Some(rule)) = decl.rules.get(k) {
                let map: Vec<(Base, Expr)> = decl.formals.iter().cloned().zip(app.args.iter().cloned()).collect();
                return rule
                    .subst_bases(&|b| map.iter().find(|(f, _)| f == b).map(|x| x.1.clone()), sp)
                    .expect("function rule substitution");
            }
        }
    }
    let mut d: SmallVec<[u8; 2]> = app.derivs.clone();
    d[k] += 1;
    let a = FuncApp { id: app.id, derivs: d, args: app.args.clone() };
    Expr::term(Coeff::one(), Monomial::single(Base::Func(Arc::new(a)), Exponent::one()))
}

impl Expr {
    /// Chain-rule derivation given the derivative of each atomic base
    /// (jet variable or independent variable).
    pub fn derive(&self, atom: &dyn Fn(&Base) -> Expr, sp: &JetSpace) -> Expr {
        let mut acc: Vec<Expr> = Vec::new();
        for (m, c) in self.terms() {
            for (k, (b, e)) in m.0.iter().enumerate() {
                let db = base_derivative(b, atom, sp);
                if db.is_zero() {
                    continue;
                }
                let rest = m.with_exponent(k, e.sub(&Exponent::one()));
                let coef = c.mul(&e.to_coeff());
                acc.push(Expr::from_monomial(coef, rest).mul(&db));
            }
        }
        Expr::sum(acc.iter())
    }

    /// Total derivative `D_i`.
    pub fn total_derivative(&self, i: usize, sp: &JetSpace) -> Expr {
        self.derive(
            &|b| match b {
                Base::Jet(v) => Expr::jet(v.raised(i)),
                Base::Indep(j) if *j as usize == i => Expr::one(),
                _ => Expr::zero(),
            },
            sp,
        )
    }

    /// Repeated total derivative `D^K` for a multi-index `K`.
    pub fn total_derivative_multi(&self, k: &[u8], sp: &JetSpace) -> Expr {
        let mut e = self.clone();
        for (i, &n) in k.iter().enumerate() {
            for _ in 0..n {
                e = e.total_derivative(i, sp);
            }
        }
        e
    }

    /// Formal partial derivative with respect to one jet coordinate.
    pub fn partial(&self, v: &JetVar, sp: &JetSpace) -> Expr {
        if !self.mentions_jet(v) {
            return Expr::zero();
        }
        self.derive(&|b| if matches!(b, Base::Jet(w) if w == v) { Expr::one() } else { Expr::zero() }, sp)
    }

    /// Formal partial derivative with respect to an independent variable.
    pub fn partial_indep(&self, i: usize, sp: &JetSpace) -> Expr {
        self.derive(&|b| if matches!(b, Base::Indep(j) if *j as usize == i) { Expr::one() } else { Expr::zero() }, sp)
    }

    /// Partial derivative with respect to any atomic base.
    pub fn partial_base(&self, b: &Base, sp: &JetSpace) -> Expr {
        self.derive(&|x| if x == b { Expr::one() } else { Expr::zero() }, sp)
    }

    pub fn mentions_jet(&self, v: &JetVar) -> bool {
        let mut found = false;
        self.visit_bases(&mut |b| {
            if matches!(b, Base::Jet(w) if w == v) {
                found = true;
            }
        });
        found
    }
}

fn base_derivative(b: &Base, atom: &dyn Fn(&Base) -> Expr, sp: &JetSpace) -> Expr {
    match b {
        Base::Jet(_) | Base::Indep(_) => atom(b),
        Base::Func(app) => {
            let mut acc = Vec::new();
            for (k, a) in app.args.iter().enumerate() {
                let da = a.derive(atom, sp);
                if !da.is_zero() {
                    acc.push(func_partial(app, k, sp).mul(&da));
                }
            }
            Expr::sum(acc.iter())
        }
        Base::Comp(inner) => inner.derive(atom, sp),
    }
}

#[cfg(test)]
mod tests {
    use crate::space::JetSpace;

    #[test]
    fn product_rule_and_explicit_dependence() {
        let sp = JetSpace::new(&["t", "x"], &["u"]).with_free_param("p");
        let d = |s: &str, i| sp.parse(s).unwrap().total_derivative(i, &sp);
        assert_eq!(d("u*u_x", 1), sp.parse("u_x^2 + u*u_xx").unwrap());
        assert_eq!(d("x*u", 0), sp.parse("x*u_t").unwrap());
        assert_eq!(d("u^(p+1)/(p+1)", 1), sp.parse("u^p*u_x").unwrap());
        let g = sp.parse("u_t + u^p*u_x + u_xxx").unwrap();
        assert_eq!(g.partial(&sp.jet("u_t").unwrap(), &sp), sp.parse("1").unwrap());
        assert_eq!(g.partial(&sp.u(0), &sp), sp.parse("p*u^(p-1)*u_x").unwrap());
        assert!(sp.parse("u_xx").unwrap().partial(&sp.jet("u_x").unwrap(), &sp).is_zero());
    }

    #[test]
    fn function_nodes() {
        let mut sp = JetSpace::new(&["t", "x"], &["u"]);
        let e = sp.parse_declaring("f(u)*u_x").unwrap();
        let d = e.total_derivative(1, &sp);
        assert_eq!(d, sp.parse("f'(u)*u_x^2 + f(u)*u_xx").unwrap());
        let c = sp.parse_declaring("c(x, u)").unwrap();
        assert_eq!(c.total_derivative(1, &sp), sp.parse("c'[1,0](x, u) + c'[0,1](x, u)*u_x").unwrap());
    }

    #[test]
    fn composite_chain_rule() {
        let sp = JetSpace::new(&["t", "x"], &["u"]);
        let e = sp.parse("(1 + u^2)^(-1)").unwrap();
        assert_eq!(e.total_derivative(1, &sp), sp.parse("-2*u*u_x*(1+u^2)^(-2)").unwrap());
    }
}
