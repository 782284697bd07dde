//! Simultaneous substitution of bases and parameters.

use std::collections::HashMap;
use std::sync::Arc;

use super::{Base, Expr, FuncApp, JetVar, Monomial};
use crate::coeff::{Coeff, Q};
use crate::error::Result;
use crate::space::JetSpace;

impl Expr {
    /// Replace atomic bases (jet and independent variables) by expressions,
    /// descending into function arguments and composites, then renormalize.
    pub fn subst_bases(&self, f: &dyn Fn(&Base) -> Option<Expr>, sp: &JetSpace) -> Result<Expr> {
        let mut acc: Vec<Expr> = Vec::with_capacity(self.len());
        for (m, c) in self.terms() {
            let mut keep = Monomial::one();
            let mut changed: Vec<Expr> = Vec::new();
            for (b, e) in m.0.iter() {
                match rebuild_base(b, f, sp)? {
                    None => keep.0.push((b.clone(), e.clone())),
                    Some(nb) => changed.push(nb.pow(e)?),
                }
            }
            if changed.is_empty() {
                acc.push(Expr::term(c.clone(), keep));
            } else {
                let mut t = Expr::from_monomial(c.clone(), keep);
                for x in changed {
                    t = t.mul(&x);
                }
                acc.push(t);
            }
        }
        Ok(Expr::sum(acc.iter()))
    }

    /// Simultaneous replacement of jet variables.
    pub fn substitute(&self, bindings: &HashMap<JetVar, Expr>, sp: &JetSpace) -> Result<Expr> {
        if bindings.is_empty() {
            return Ok(self.clone());
        }
        self.subst_bases(
            &|b| match b {
                Base::Jet(v) => bindings.get(v).cloned(),
                _ => None,
            },
            sp,
        )
    }

    /// Bind some free parameters to numbers.
    pub fn subst_params(&self, vals: &dyn Fn(u16) -> Option<Q>, sp: &JetSpace) -> Result<Expr> {
        let mut acc = Vec::with_capacity(self.len());
        for (m, c) in self.terms() {
            let c2 = c.subst(vals)?;
            let mut t = Expr::constant(c2);
            for (b, e) in m.0.iter() {
                let nb = match b {
                    Base::Func(a) => {
                        let args = a.args.iter().map(|x| x.subst_params(vals, sp)).collect::<Result<Vec<_>>>()?;
                        Expr::base(Base::Func(Arc::new(FuncApp { id: a.id, derivs: a.derivs.clone(), args })))
                    }
                    Base::Comp(x) => x.subst_params(vals, sp)?,
                    b => Expr::base(b.clone()),
                };
                t = t.mul(&nb.pow(&e.subst(vals))?);
            }
            acc.push(t);
        }
        Ok(Expr::sum(acc.iter()))
    }

    /// Bind every parameter that has a value in the space.
    pub fn bind_space_params(&self, sp: &JetSpace) -> Result<Expr> {
        if self.params().iter().all(|p| sp.param_value(*p).is_none()) {
            return Ok(self.clone());
        }
        self.subst_params(&|p| sp.param_value(p), sp)
    }

    pub fn map_coeff_params(&self, vals: &dyn Fn(u16) -> Option<Q>) -> Result<Expr> {
        self.map_coeffs(&|c: &Coeff| c.subst(vals))
    }
}

/// `Some(new)` when the base changes under the substitution.
fn rebuild_base(b: &Base, f: &dyn Fn(&Base) -> Option<Expr>, sp: &JetSpace) -> Result<Option<Expr>> {
    match b {
        Base::Jet(_) | Base::Indep(_) => Ok(f(b)),
        Base::Func(a) => {
            let mut any = false;
            let mut args = Vec::with_capacity(a.args.len());
            for x in &a.args {
                let y = x.subst_bases(f, sp)?;
                any |= &y != x;
                args.push(y);
            }
            if !any {
                return Ok(None);
            }
            Ok(Some(Expr::base(Base::Func(Arc::new(FuncApp { id: a.id, derivs: a.derivs.clone(), args })))))
        }
        Base::Comp(x) => {
            let y = x.subst_bases(f, sp)?;
            if &y == x {
                Ok(None)
            } else {
                Ok(Some(y))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use std::collections::HashMap;

    use crate::space::JetSpace;

    #[test]
    fn coordinate_exact_substitution() {
        let sp = JetSpace::new(&["t", "x"], &["u"]);
        let mut b = HashMap::new();
        b.insert(sp.jet("u_t").unwrap(), sp.parse("-u_xxx").unwrap());
        let e = sp.parse("u_t + u^2").unwrap().substitute(&b, &sp).unwrap();
        assert_eq!(e, sp.parse("u^2 - u_xxx").unwrap());
        let e = sp.parse("u_txx").unwrap();
        assert_eq!(e.substitute(&b, &sp).unwrap(), e);
    }

    #[test]
    fn eliminates_auxiliary_variable() {
        let sp = JetSpace::new(&["t", "x"], &["u", "m"]);
        let mut b = HashMap::new();
        b.insert(sp.jet("m").unwrap(), sp.parse("u - u_xx").unwrap());
        let e = sp.parse("m^2 + u*m").unwrap().substitute(&b, &sp).unwrap();
        assert_eq!(e, sp.parse("(u - u_xx)^2 + u*(u - u_xx)").unwrap());
        assert!(e.jet_vars().iter().all(|v| v.dep == 0));
    }
}
