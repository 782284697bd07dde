//! Exact evaluation at rational points and the zero test.

use std::collections::HashMap;

use num_traits::Zero;

use super::{Base, Expr, FuncApp, JetVar, Monomial};
use crate::coeff::{root_q, Coeff, Exponent, Q};
use crate::error::{Error, Result};
use crate::space::JetSpace;

/// Values for jet coordinates, independent variables and free parameters.
#[derive(Clone, Debug, Default)]
pub struct Point {
    pub jets: HashMap<JetVar, Q>,
    pub indep: Vec<Q>,
    pub params: HashMap<u16, Q>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroTest {
    Zero,
    NonZero,
    Undetermined,
}

impl Expr {
    pub fn eval(&self, pt: &Point, sp: &JetSpace) -> Result<Q> {
        let params = |p: u16| pt.params.get(&p).cloned().or_else(|| sp.param_value(p));
        let atom = |b: &Base| -> Result<Q> {
            match b {
                Base::Jet(v) => pt.jets.get(v).cloned().ok_or_else(|| Error::MissingBinding(sp.jet_name(v))),
                Base::Indep(i) => pt
                    .indep
                    .get(*i as usize)
                    .cloned()
                    .ok_or_else(|| Error::MissingBinding(sp.indep.get(*i as usize).cloned().unwrap_or_default())),
                _ => unreachable!(),
            }
        };
        self.eval_with(&atom, &params, sp)
    }

    pub(crate) fn eval_with(
        &self,
        atom: &dyn Fn(&Base) -> Result<Q>,
        params: &dyn Fn(u16) -> Option<Q>,
        sp: &JetSpace,
    ) -> Result<Q> {
        let mut s = Q::zero();
        for (m, c) in self.terms() {
            let mut t = coeff_value(c, params, sp)?;
            for (b, e) in m.0.iter() {
                if t.is_zero() {
                    break;
                }
                let x = match b {
                    Base::Jet(_) | Base::Indep(_) => atom(b)?,
                    Base::Comp(inner) => inner.eval_with(atom, params, sp)?,
                    Base::Func(app) => func_value(app, atom, params, sp)?,
                };
                let r = exponent_value(e, params, sp)?;
                t *= root_q(&x, &r)?;
            }
            s += t;
        }
        Ok(s)
    }

    /// Multiply through by every composite denominator, so that only
    /// polynomial structure remains wherever possible.
    pub fn clear_denominators(&self) -> Expr {
        let mut e = self.clone();
        for _ in 0..16 {
            let mut worst: Vec<(Expr, i64)> = Vec::new();
            for (m, _) in e.terms() {
                for (b, x) in m.0.iter() {
                    if let (Base::Comp(inner), Some(n)) = (b, x.as_integer()) {
                        if n < 0 {
                            match worst.iter_mut().find(|(i, _)| i == inner) {
                                Some(w) => w.1 = w.1.min(n),
                                None => worst.push((inner.clone(), n)),
                            }
                        }
                    }
                }
            }
            if worst.is_empty() {
                break;
            }
            for (inner, n) in worst {
                let f = Expr::term(Coeff::one(), Monomial::single(Base::Comp(inner), Exponent::int(-n)));
                e = e.mul(&f);
            }
        }
        e
    }

    /// Decide whether the expression is the zero function. Sound when it
    /// answers `Zero`; `Undetermined` when opaque content survives.
    pub fn zero_test(&self) -> ZeroTest {
        if self.is_zero() {
            return ZeroTest::Zero;
        }
        let c = self.clear_denominators();
        if c.is_zero() {
            ZeroTest::Zero
        } else if c.has_opaque() {
            ZeroTest::Undetermined
        } else {
            ZeroTest::NonZero
        }
    }
}

fn coeff_value(c: &Coeff, params: &dyn Fn(u16) -> Option<Q>, sp: &JetSpace) -> Result<Q> {
    c.eval(params).map_err(|e| name_param(e, sp))
}

fn exponent_value(e: &Exponent, params: &dyn Fn(u16) -> Option<Q>, sp: &JetSpace) -> Result<Q> {
    e.eval(params).map_err(|e| name_param(e, sp))
}

fn name_param(e: Error, sp: &JetSpace) -> Error {
    match e {
        Error::MissingBinding(s) if s.starts_with("param#") => {
            let i: usize = s[6..].parse().unwrap_or(0);
            Error::MissingBinding(sp.params.get(i).map(|p| p.name.clone()).unwrap_or(s))
        }
        e => e,
    }
}

fn func_value(
    app: &FuncApp,
    atom: &dyn Fn(&Base) -> Result<Q>,
    params: &dyn Fn(u16) -> Option<Q>,
    sp: &JetSpace,
) -> Result<Q> {
    let decl = &sp.funcs[app.id as usize];
    let sample = decl.sample.as_ref().ok_or_else(|| Error::NoSample(decl.name.clone()))?;
    let mut s = sample.clone();
    for (k, &n) in app.derivs.iter().enumerate() {
        for _ in 0..n {
            s = s.partial_base(&decl.formals[k], sp);
        }
    }
    let vals = app.args.iter().map(|a| a.eval_with(atom, params, sp)).collect::<Result<Vec<_>>>()?;
    let formal = |b: &Base| -> Result<Q> {
        decl.formals
            .iter()
            .position(|f| f == b)
            .map(|i| vals[i].clone())
            .ok_or_else(|| Error::MissingBinding(format!("sample of {}", decl.name)))
    };
    s.eval_with(&formal, params, sp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::q;

    #[test]
    fn evaluates_exactly() {
        let sp = JetSpace::new(&["t", "x"], &["u"]);
        let mut pt = Point::default();
        pt.jets.insert(sp.u(0), q(3));
        pt.jets.insert(sp.jet("u_x").unwrap(), q(2));
        assert_eq!(sp.parse("u^2*u_x").unwrap().eval(&pt, &sp).unwrap(), q(18));
        assert_eq!(Expr::zero().eval(&pt, &sp).unwrap(), q(0));
        pt.jets.insert(sp.u(0), q(4));
        assert_eq!(sp.parse("u^(3/2)").unwrap().eval(&pt, &sp).unwrap(), q(8));
        pt.jets.insert(sp.u(0), q(-4));
        assert_eq!(sp.parse("u^(1/2)").unwrap().eval(&pt, &sp), Err(Error::NegativeBase));
        assert!(matches!(sp.parse("u_xx").unwrap().eval(&pt, &sp), Err(Error::MissingBinding(_))));
    }

    #[test]
    fn zero_test_clears_denominators() {
        let sp = JetSpace::new(&["t", "x"], &["u"]);
        let e = sp.parse("u/(1+u) + 1/(1+u) - 1").unwrap();
        assert!(!e.is_zero());
        assert_eq!(e.zero_test(), ZeroTest::Zero);
        assert_eq!(sp.parse("u_x/(1+u)").unwrap().zero_test(), ZeroTest::NonZero);
        let mut sp2 = sp.clone();
        assert_eq!(sp2.parse_declaring("f(u) - u").unwrap().zero_test(), ZeroTest::Undetermined);
    }
}
