//! Canonical generalized polynomials over jet coordinates.
//!
//! An [`Expr`] is a sum of terms `coeff * prod(base^exponent)`. Bases are jet
//! variables, independent variables, opaque function applications, or
//! composite sums raised to a power that cannot be expanded (negative,
//! fractional or symbolic). Every constructor returns the normal form, so
//! structural equality is equality of normal forms.

mod deriv;
mod display;
mod eval;
mod parse;
mod subst;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;

use crate::coeff::{root_q, Coeff, Exponent, Q};
use crate::error::{Error, Result};

pub use eval::{Point, ZeroTest};
pub use display::{show_coeff, show_exponent};
pub use parse::Parser;

/// One jet coordinate: dependent variable index plus derivative counts per
/// independent variable (t first).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct JetVar {
    pub dep: u16,
    pub idx: SmallVec<[u8; 4]>,
}

impl JetVar {
    pub fn new(dep: u16, idx: &[u8]) -> JetVar {
        JetVar { dep, idx: SmallVec::from_slice(idx) }
    }

    pub fn base(dep: u16, n_indep: usize) -> JetVar {
        JetVar { dep, idx: smallvec::smallvec![0; n_indep] }
    }

    pub fn order(&self) -> u32 {
        self.idx.iter().map(|&k| k as u32).sum()
    }

    pub fn raised(&self, i: usize) -> JetVar {
        let mut v = self.clone();
        v.idx[i] += 1;
        v
    }

    pub fn lowered(&self, i: usize) -> Option<JetVar> {
        if self.idx[i] == 0 {
            return None;
        }
        let mut v = self.clone();
        v.idx[i] -= 1;
        Some(v)
    }

    /// True when `self` is `other` or one of its derivatives.
    pub fn descends_from(&self, other: &JetVar) -> bool {
        self.dep == other.dep && self.idx.iter().zip(&other.idx).all(|(a, b)| a >= b)
    }

    pub fn minus(&self, other: &JetVar) -> SmallVec<[u8; 4]> {
        self.idx.iter().zip(&other.idx).map(|(a, b)| a - b).collect()
    }

    pub fn plus(&self, k: &[u8]) -> JetVar {
        let mut v = self.clone();
        for (a, b) in v.idx.iter_mut().zip(k) {
            *a += b;
        }
        v
    }
}

impl PartialOrd for JetVar {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for JetVar {
    fn cmp(&self, o: &Self) -> Ordering {
        self.dep
            .cmp(&o.dep)
            .then_with(|| self.order().cmp(&o.order()))
            .then_with(|| self.idx.cmp(&o.idx))
    }
}

/// Application of a declared function, possibly differentiated.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FuncApp {
    pub id: u16,
    pub derivs: SmallVec<[u8; 2]>,
    pub args: Vec<Expr>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Base {
    Jet(JetVar),
    Indep(u8),
    Func(Arc<FuncApp>),
    Comp(Expr),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(pub SmallVec<[(Base, Exponent); 2]>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(SmallVec::new())
    }

    pub fn single(b: Base, e: Exponent) -> Monomial {
        Monomial(smallvec::smallvec![(b, e)])
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> impl Iterator<Item = &(Base, Exponent)> {
        self.0.iter()
    }

    pub fn exponent_of(&self, b: &Base) -> Option<&Exponent> {
        self.0.iter().find(|(x, _)| x == b).map(|x| &x.1)
    }

    fn merged(&self, o: &Monomial) -> Monomial {
        let mut out: SmallVec<[(Base, Exponent); 2]> = SmallVec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < o.0.len() {
            let ord = match (self.0.get(i), o.0.get(j)) {
                (Some(a), Some(b)) => a.0.cmp(&b.0),
                (Some(_), None) => Ordering::Less,
                _ => Ordering::Greater,
            };
            match ord {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(o.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let e = self.0[i].1.add(&o.0[j].1);
                    if !e.is_zero() {
                        out.push((self.0[i].0.clone(), e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        Monomial(out)
    }

    /// Whether a composite factor has been driven to a nonnegative integer
    /// power and must be expanded.
    fn needs_expansion(&self) -> bool {
        self.0.iter().any(|(b, e)| matches!(b, Base::Comp(_)) && e.is_nonneg_integer())
    }

    pub fn without(&self, k: usize) -> Monomial {
        let mut m = self.clone();
        m.0.remove(k);
        m
    }

    pub fn with_exponent(&self, k: usize, e: Exponent) -> Monomial {
        let mut m = self.clone();
        if e.is_zero() {
            m.0.remove(k);
        } else {
            m.0[k].1 = e;
        }
        m
    }
}

/// Canonical expression. Cheap to clone.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Expr(Arc<BTreeMap<Monomial, Coeff>>);

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", display::debug_string(self))
    }
}

fn add_into(map: &mut BTreeMap<Monomial, Coeff>, m: Monomial, c: Coeff) {
    if c.is_zero() {
        return;
    }
    match map.entry(m) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            let s = o.get().add(&c);
            if s.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = s;
            }
        }
    }
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::default()
    }

    pub fn one() -> Expr {
        Expr::constant(Coeff::one())
    }

    pub fn int(n: i64) -> Expr {
        Expr::constant(Coeff::from(n))
    }

    pub fn rat(x: Q) -> Expr {
        Expr::constant(Coeff::Num(x))
    }

    pub fn constant(c: Coeff) -> Expr {
        Expr::term(c, Monomial::one())
    }

    pub fn jet(v: JetVar) -> Expr {
        Expr::term(Coeff::one(), Monomial::single(Base::Jet(v), Exponent::one()))
    }

    pub fn indep(i: usize) -> Expr {
        Expr::term(Coeff::one(), Monomial::single(Base::Indep(i as u8), Exponent::one()))
    }

    pub fn base(b: Base) -> Expr {
        match b {
            Base::Comp(inner) => inner,
            b => Expr::term(Coeff::one(), Monomial::single(b, Exponent::one())),
        }
    }

    /// Single term from an already normalized monomial.
    pub fn term(c: Coeff, m: Monomial) -> Expr {
        let mut map = BTreeMap::new();
        if !c.is_zero() {
            map.insert(m, c);
        }
        Expr(Arc::new(map))
    }

    /// Build from an arbitrary monomial, expanding composite factors whose
    /// exponent became a nonnegative integer.
    pub fn from_monomial(c: Coeff, m: Monomial) -> Expr {
        if !m.needs_expansion() {
            return Expr::term(c, m);
        }
        let mut rest = Monomial::one();
        let mut acc = Expr::constant(c);
        let mut pending = Vec::new();
        for (b, e) in m.0 {
            match (&b, e.as_integer()) {
                (Base::Comp(inner), Some(n)) if n >= 0 => pending.push((inner.clone(), n)),
                _ => rest.0.push((b, e)),
            }
        }
        acc = acc.mul(&Expr::term(Coeff::one(), rest));
        for (inner, n) in pending {
            acc = acc.mul(&inner.pow_n(n as u32));
        }
        acc
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Structural zero (the empty sum).
    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_constant(&self) -> Option<Coeff> {
        match self.0.len() {
            0 => Some(Coeff::zero()),
            1 => self.0.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn as_single_base(&self) -> Option<&Base> {
        if self.0.len() != 1 {
            return None;
        }
        let (m, c) = self.0.iter().next()?;
        if c.is_one() && m.0.len() == 1 && m.0[0].1.is_one() {
            Some(&m.0[0].0)
        } else {
            None
        }
    }

    pub fn as_jet(&self) -> Option<&JetVar> {
        match self.as_single_base() {
            Some(Base::Jet(v)) => Some(v),
            _ => None,
        }
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Monomial, Coeff)>) -> Expr {
        let mut map = BTreeMap::new();
        let mut extra = Vec::new();
        for (m, c) in it {
            if m.needs_expansion() {
                extra.push(Expr::from_monomial(c, m));
            } else {
                add_into(&mut map, m, c);
            }
        }
        let mut e = Expr(Arc::new(map));
        for x in extra {
            e = e.add(&x);
        }
        e
    }

    pub fn add(&self, o: &Expr) -> Expr {
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return o.clone();
        }
        let (big, small) = if self.0.len() >= o.0.len() { (self, o) } else { (o, self) };
        let mut map = (*big.0).clone();
        for (m, c) in small.0.iter() {
            add_into(&mut map, m.clone(), c.clone());
        }
        Expr(Arc::new(map))
    }

    pub fn neg(&self) -> Expr {
        Expr(Arc::new(self.0.iter().map(|(m, c)| (m.clone(), c.neg())).collect()))
    }

    pub fn sub(&self, o: &Expr) -> Expr {
        self.add(&o.neg())
    }

    pub fn scale(&self, k: &Coeff) -> Expr {
        if k.is_zero() {
            return Expr::zero();
        }
        if k.is_one() {
            return self.clone();
        }
        Expr(Arc::new(self.0.iter().map(|(m, c)| (m.clone(), c.mul(k))).collect()))
    }

    pub fn scale_q(&self, k: &Q) -> Expr {
        self.scale(&Coeff::Num(k.clone()))
    }

    pub fn mul(&self, o: &Expr) -> Expr {
        if self.is_zero() || o.is_zero() {
            return Expr::zero();
        }
        if let Some(c) = o.as_constant() {
            return self.scale(&c);
        }
        if let Some(c) = self.as_constant() {
            return o.scale(&c);
        }
        let mut map = BTreeMap::new();
        let mut extra = Vec::new();
        for (m1, c1) in self.0.iter() {
            for (m2, c2) in o.0.iter() {
                let m = m1.merged(m2);
                let c = c1.mul(c2);
                if m.needs_expansion() {
                    extra.push((c, m));
                } else {
                    add_into(&mut map, m, c);
                }
            }
        }
        let mut e = Expr(Arc::new(map));
        for (c, m) in extra {
            e = e.add(&Expr::from_monomial(c, m));
        }
        e
    }

    pub fn sum<'a>(it: impl IntoIterator<Item = &'a Expr>) -> Expr {
        let mut map = BTreeMap::new();
        for e in it {
            for (m, c) in e.0.iter() {
                add_into(&mut map, m.clone(), c.clone());
            }
        }
        Expr(Arc::new(map))
    }

    pub fn sum_owned(it: impl IntoIterator<Item = Expr>) -> Expr {
        let v: Vec<Expr> = it.into_iter().collect();
        Expr::sum(v.iter())
    }

    pub fn pow_n(&self, n: u32) -> Expr {
        let mut r = Expr::one();
        let mut b = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                r = r.mul(&b);
            }
            k >>= 1;
            if k > 0 {
                b = b.mul(&b);
            }
        }
        r
    }

    pub fn pow_i(&self, n: i64) -> Result<Expr> {
        self.pow(&Exponent::int(n))
    }

    pub fn pow(&self, ex: &Exponent) -> Result<Expr> {
        if ex.is_zero() {
            return Ok(Expr::one());
        }
        if let Some(n) = ex.as_integer().filter(|n| *n >= 0) {
            return Ok(self.pow_n(n as u32));
        }
        if self.is_zero() {
            return match ex.as_rational() {
                Some(r) if r > &Q::from_integer(0.into()) => Ok(Expr::zero()),
                _ => Err(Error::DivisionByZero),
            };
        }
        if self.0.len() == 1 {
            let (m, c) = self.0.iter().next().unwrap();
            if let Some(cp) = coeff_pow(c, ex)? {
                let mut out = Monomial::one();
                for (b, e) in m.0.iter() {
                    let e2 = e.mul(ex).ok_or_else(|| Error::NonAffine(format!("({e:?})*({ex:?})")))?;
                    out.0.push((b.clone(), e2));
                }
                out.0.retain(|(_, e)| !e.is_zero());
                return Ok(Expr::from_monomial(cp, out));
            }
            return Ok(Expr::term(Coeff::one(), Monomial::single(Base::Comp(self.clone()), ex.clone())));
        }
        let lead = self.0.iter().next().unwrap().1.clone();
        let pull = if ex.as_integer().is_some() {
            Some((lead.pow_i(ex.as_integer().unwrap())?, lead))
        } else {
            match (&lead, ex.as_rational()) {
                (Coeff::Num(x), Some(r)) if x > &Q::from_integer(0.into()) => {
                    root_q(x, r).ok().map(|v| (Coeff::Num(v), lead.clone()))
                }
                _ => None,
            }
        };
        match pull {
            Some((factor, lead)) if !lead.is_one() => {
                let inner = self.scale(&lead.inv()?);
                Ok(Expr::term(factor, Monomial::single(Base::Comp(inner), ex.clone())))
            }
            _ => Ok(Expr::term(Coeff::one(), Monomial::single(Base::Comp(self.clone()), ex.clone()))),
        }
    }

    pub fn recip(&self) -> Result<Expr> {
        self.pow_i(-1)
    }

    pub fn div(&self, o: &Expr) -> Result<Expr> {
        if let Some(c) = o.as_constant() {
            return Ok(self.scale(&c.inv()?));
        }
        Ok(self.mul(&o.recip()?))
    }

    pub fn map_coeffs(&self, f: &dyn Fn(&Coeff) -> Result<Coeff>) -> Result<Expr> {
        let mut out = Vec::with_capacity(self.0.len());
        for (m, c) in self.0.iter() {
            out.push((m.clone(), f(c)?));
        }
        Ok(Expr::from_terms(out))
    }

    /// Visit every base, descending into function arguments and composites.
    pub fn visit_bases(&self, f: &mut dyn FnMut(&Base)) {
        for m in self.0.keys() {
            for (b, _) in m.0.iter() {
                f(b);
                match b {
                    Base::Func(a) => a.args.iter().for_each(|x| x.visit_bases(f)),
                    Base::Comp(x) => x.visit_bases(f),
                    _ => {}
                }
            }
        }
    }

    pub fn jet_vars(&self) -> Vec<JetVar> {
        let mut out = Vec::new();
        self.visit_bases(&mut |b| {
            if let Base::Jet(v) = b {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
        });
        out.sort();
        out
    }

    pub fn has_opaque(&self) -> bool {
        let mut found = false;
        self.visit_bases(&mut |b| {
            if matches!(b, Base::Func(_) | Base::Comp(_)) {
                found = true;
            }
        });
        found
    }

    pub fn max_order(&self) -> u32 {
        self.jet_vars().iter().map(|v| v.order()).max().unwrap_or(0)
    }

    pub fn depends_on_indep(&self) -> bool {
        let mut found = false;
        self.visit_bases(&mut |b| {
            if matches!(b, Base::Indep(_)) {
                found = true;
            }
        });
        found
    }

    /// Free parameters occurring in coefficients or exponents.
    pub fn params(&self) -> Vec<u16> {
        let mut out = Vec::new();
        fn walk(e: &Expr, out: &mut Vec<u16>) {
            for (m, c) in e.0.iter() {
                c.params(out);
                for (b, x) in m.0.iter() {
                    for (v, _) in &x.lin {
                        if !out.contains(v) {
                            out.push(*v);
                        }
                    }
                    match b {
                        Base::Func(a) => a.args.iter().for_each(|y| walk(y, out)),
                        Base::Comp(y) => walk(y, out),
                        _ => {}
                    }
                }
            }
        }
        walk(self, &mut out);
        out.sort();
        out
    }

    /// Coefficient of a given monomial.
    pub fn coeff_of(&self, m: &Monomial) -> Coeff {
        self.0.get(m).cloned().unwrap_or_default()
    }
}

fn coeff_pow(c: &Coeff, ex: &Exponent) -> Result<Option<Coeff>> {
    if c.is_one() {
        return Ok(Some(Coeff::one()));
    }
    if let Some(n) = ex.as_integer() {
        return c.pow_i(n).map(Some);
    }
    match (c, ex.as_rational()) {
        (Coeff::Num(x), Some(r)) if x > &Q::from_integer(0.into()) => Ok(root_q(x, r).ok().map(Coeff::Num)),
        _ => Ok(None),
    }
}

impl std::ops::Add for &Expr {
    type Output = Expr;
    fn add(self, o: &Expr) -> Expr {
        Expr::add(self, o)
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, o: Expr) -> Expr {
        Expr::add(&self, &o)
    }
}

impl std::ops::Sub for &Expr {
    type Output = Expr;
    fn sub(self, o: &Expr) -> Expr {
        Expr::sub(self, o)
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, o: Expr) -> Expr {
        Expr::sub(&self, &o)
    }
}

impl std::ops::Mul for &Expr {
    type Output = Expr;
    fn mul(self, o: &Expr) -> Expr {
        Expr::mul(self, o)
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, o: Expr) -> Expr {
        Expr::mul(&self, &o)
    }
}

impl std::ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(&self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::qf;

    fn u() -> Expr {
        Expr::jet(JetVar::new(0, &[0, 0]))
    }

    fn ux() -> Expr {
        Expr::jet(JetVar::new(0, &[0, 1]))
    }

    #[test]
    fn binomial_cancels() {
        let s = &u() + &ux();
        let r = s.pow_n(2) - u().pow_n(2) - (u() * ux()).scale(&Coeff::from(2)) - ux().pow_n(2);
        assert!(r.is_zero());
    }

    #[test]
    fn fractional_power_distributes() {
        let e = u().pow_n(2).pow(&Exponent::rational(qf(1, 2))).unwrap();
        assert_eq!(e, u());
        let four = Expr::int(4).mul(&u());
        assert_eq!(four.pow(&Exponent::rational(qf(1, 2))).unwrap(), u().pow(&Exponent::rational(qf(1, 2))).unwrap().scale(&Coeff::from(2)));
    }

    #[test]
    fn composite_reexpands() {
        let s = &u() + &Expr::one();
        let inv = s.recip().unwrap();
        let back = inv.pow_i(-2).unwrap();
        assert_eq!(back, s.pow_n(2));
        let sq = inv.mul(&inv).mul(&s.pow_n(0));
        assert_eq!(sq, s.pow_i(-2).unwrap());
    }

    #[test]
    fn composite_normalized_by_leading_coefficient() {
        let a = u().scale(&Coeff::from(2)) + Expr::int(2);
        let b = u() + Expr::one();
        assert_eq!(a.recip().unwrap(), b.recip().unwrap().scale(&Coeff::Num(qf(1, 2))));
    }

    #[test]
    fn jetvar_order() {
        let a = JetVar::new(0, &[1, 0]);
        let b = JetVar::new(0, &[0, 2]);
        let c = JetVar::new(0, &[0, 1]);
        assert!(c < a && a < b);
        assert!(JetVar::new(0, &[1, 2]).descends_from(&a));
        assert!(!b.descends_from(&a));
    }
}
