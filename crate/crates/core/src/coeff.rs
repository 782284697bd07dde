//! Coefficients and exponents.
//!
//! Coefficients are rational functions of the free parameters, kept as a
//! polynomial numerator over a product of monic factors. Exponents are affine
//! in the free parameters.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use smallvec::SmallVec;

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Monomial in the free parameters: sorted `(param, exponent)` pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PMono(pub SmallVec<[(u16, u32); 2]>);

impl PMono {
    fn mul(&self, o: &PMono) -> PMono {
        let mut out = SmallVec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < o.0.len() {
            if j == o.0.len() || (i < self.0.len() && self.0[i].0 < o.0[j].0) {
                out.push(self.0[i]);
                i += 1;
            } else if i == self.0.len() || o.0[j].0 < self.0[i].0 {
                out.push(o.0[j]);
                j += 1;
            } else {
                out.push((self.0[i].0, self.0[i].1 + o.0[j].1));
                i += 1;
                j += 1;
            }
        }
        PMono(out)
    }

    fn exp_of(&self, p: u16) -> u32 {
        self.0.iter().find(|(v, _)| *v == p).map_or(0, |x| x.1)
    }

    fn degree(&self) -> u32 {
        self.0.iter().map(|x| x.1).sum()
    }

    /// Lexicographic term order with lower parameter ids dominating.
    fn lex_cmp(&self, o: &PMono) -> Ordering {
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.0.get(i), o.0.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(a), Some(b)) => {
                    if a.0 != b.0 {
                        return if a.0 < b.0 { Ordering::Greater } else { Ordering::Less };
                    }
                    if a.1 != b.1 {
                        return a.1.cmp(&b.1);
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
    }

    fn divides(&self, o: &PMono) -> bool {
        self.0.iter().all(|(v, e)| o.exp_of(*v) >= *e)
    }

    fn div(&self, d: &PMono) -> PMono {
        let mut out = SmallVec::new();
        for &(v, e) in &self.0 {
            let r = e - d.exp_of(v);
            if r > 0 {
                out.push((v, r));
            }
        }
        PMono(out)
    }
}

/// Polynomial over the rationals in the free parameters.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Poly(pub BTreeMap<PMono, Q>);

impl Poly {
    pub fn zero() -> Poly {
        Poly(BTreeMap::new())
    }

    pub fn constant(c: Q) -> Poly {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert(PMono::default(), c);
        }
        Poly(m)
    }

    pub fn var(p: u16) -> Poly {
        let mut m = BTreeMap::new();
        m.insert(PMono(smallvec::smallvec![(p, 1)]), Q::one());
        Poly(m)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_constant(&self) -> Option<Q> {
        match self.0.len() {
            0 => Some(Q::zero()),
            1 => self.0.get(&PMono::default()).cloned(),
            _ => None,
        }
    }

    pub fn degree(&self) -> u32 {
        self.0.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    fn add_term(&mut self, m: PMono, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.0.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut r = self.clone();
        for (m, c) in &o.0 {
            r.add_term(m.clone(), c.clone());
        }
        r
    }

    pub fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|(m, c)| (m.clone(), -c)).collect())
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn scale(&self, k: &Q) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly(self.0.iter().map(|(m, c)| (m.clone(), c * k)).collect())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut r = Poly::zero();
        for (m1, c1) in &self.0 {
            for (m2, c2) in &o.0 {
                r.add_term(m1.mul(m2), c1 * c2);
            }
        }
        r
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut r = Poly::constant(Q::one());
        for _ in 0..n {
            r = r.mul(self);
        }
        r
    }

    fn leading(&self) -> Option<(&PMono, &Q)> {
        self.0.iter().max_by(|a, b| a.0.lex_cmp(b.0))
    }

    pub fn leading_coeff(&self) -> Q {
        self.leading().map(|x| x.1.clone()).unwrap_or_else(Q::zero)
    }

    pub fn monic(&self) -> Poly {
        let lc = self.leading_coeff();
        self.scale(&(Q::one() / lc))
    }

    /// Exact quotient by `d`, or `None` when `d` does not divide.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (dm, dc) = d.leading()?;
        let (dm, dc) = (dm.clone(), dc.clone());
        let mut r = self.clone();
        let mut quo = Poly::zero();
        while let Some((rm, rc)) = r.leading() {
            if !dm.divides(rm) {
                return None;
            }
            let tm = rm.div(&dm);
            let tc = rc / &dc;
            let t = Poly(std::iter::once((tm, tc)).collect());
            r = r.sub(&t.mul(d));
            quo = quo.add(&t);
        }
        Some(quo)
    }

    pub fn eval(&self, vals: &dyn Fn(u16) -> Option<Q>) -> Result<Q> {
        let mut s = Q::zero();
        for (m, c) in &self.0 {
            let mut t = c.clone();
            for &(v, e) in &m.0 {
                let x = vals(v).ok_or_else(|| Error::MissingBinding(format!("param#{v}")))?;
                t *= pow_q(&x, e as i64)?;
            }
            s += t;
        }
        Ok(s)
    }

    /// Substitute some parameters by numbers.
    pub fn subst(&self, vals: &dyn Fn(u16) -> Option<Q>) -> Poly {
        let mut r = Poly::zero();
        for (m, c) in &self.0 {
            let mut t = c.clone();
            let mut keep = SmallVec::new();
            for &(v, e) in &m.0 {
                match vals(v) {
                    Some(x) => t *= pow_q(&x, e as i64).unwrap_or_else(|_| Q::zero()),
                    None => keep.push((v, e)),
                }
            }
            r.add_term(PMono(keep), t);
        }
        r
    }

    pub fn params(&self, out: &mut Vec<u16>) {
        for m in self.0.keys() {
            for &(v, _) in &m.0 {
                if !out.contains(&v) {
                    out.push(v);
                }
            }
        }
    }

    /// Split into a constant and monic factors (monomial part, rational
    /// roots of univariate parts, and the remaining cofactor).
    pub fn factor(&self) -> (Q, Vec<(Poly, u32)>) {
        let mut factors: Vec<(Poly, u32)> = Vec::new();
        let mut rest = self.clone();
        let mut vars = Vec::new();
        rest.params(&mut vars);
        for &v in &vars {
            let k = rest.0.keys().map(|m| m.exp_of(v)).min().unwrap_or(0);
            if k > 0 {
                let d = PMono(smallvec::smallvec![(v, k)]);
                rest = Poly(rest.0.iter().map(|(m, c)| (m.div(&d), c.clone())).collect());
                factors.push((Poly::var(v), k));
            }
        }
        let mut vars = Vec::new();
        rest.params(&mut vars);
        if vars.len() == 1 && rest.degree() >= 2 {
            let v = vars[0];
            for r in rational_roots(&rest, v) {
                let lin = Poly::var(v).sub(&Poly::constant(r));
                let mut k = 0;
                while let Some(qt) = rest.div_exact(&lin) {
                    rest = qt;
                    k += 1;
                }
                if k > 0 {
                    factors.push((lin, k));
                }
            }
        }
        let lc = rest.leading_coeff();
        if rest.as_constant().is_none() {
            factors.push((rest.monic(), 1));
        }
        (lc, factors)
    }
}

fn rational_roots(p: &Poly, v: u16) -> Vec<Q> {
    let deg = p.degree() as usize;
    let mut coeffs = vec![Q::zero(); deg + 1];
    for (m, c) in &p.0 {
        coeffs[m.exp_of(v) as usize] = c.clone();
    }
    let mut l = BigInt::one();
    for c in &coeffs {
        l = l.lcm(c.denom());
    }
    let ints: Vec<BigInt> = coeffs.iter().map(|c| (c * Q::from_integer(l.clone())).to_integer()).collect();
    let a0 = ints.iter().find(|x| !x.is_zero()).cloned().unwrap_or_default().abs();
    let an = ints[deg].abs();
    let small = |x: &BigInt| x.to_i64().map_or(false, |y| y <= 1_000_000);
    if !small(&a0) || !small(&an) {
        return Vec::new();
    }
    let divisors = |n: i64| (1..=n).filter(|d| n % d == 0).collect::<Vec<_>>();
    let mut out = Vec::new();
    for pn in divisors(a0.to_i64().unwrap()) {
        for qd in divisors(an.to_i64().unwrap()) {
            for s in [1i64, -1] {
                let r = qf(s * pn, qd);
                let mut acc = Q::zero();
                for c in coeffs.iter().rev() {
                    acc = acc * &r + c;
                }
                if acc.is_zero() && !out.contains(&r) {
                    out.push(r);
                }
            }
        }
    }
    out
}

pub fn pow_q(x: &Q, n: i64) -> Result<Q> {
    if n >= 0 {
        Ok(num_traits::pow::pow(x.clone(), n as usize))
    } else if x.is_zero() {
        Err(Error::DivisionByZero)
    } else {
        Ok(num_traits::pow::pow(x.recip(), (-n) as usize))
    }
}

/// `x^(n/d)` when it is rational.
pub fn root_q(x: &Q, r: &Q) -> Result<Q> {
    if r.is_integer() {
        return pow_q(x, r.to_integer().to_i64().ok_or(Error::DivisionByZero)?);
    }
    if x.is_negative() {
        return Err(Error::NegativeBase);
    }
    let d = r.denom().to_u32().ok_or_else(|| Error::InexactRoot(r.to_string()))?;
    let rt = |b: &BigInt| -> Option<BigInt> {
        let c = b.nth_root(d);
        if num_traits::pow::pow(c.clone(), d as usize) == *b {
            Some(c)
        } else {
            None
        }
    };
    let (n, m) = match (rt(x.numer()), rt(x.denom())) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::InexactRoot(format!("{x}^({r})"))),
    };
    pow_q(&Q::new(n, m), r.numer().to_i64().ok_or(Error::DivisionByZero)?)
}

/// Rational function in the free parameters, `num / prod(den_i^k_i)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RatFunc {
    pub num: Poly,
    pub den: Vec<(Poly, u32)>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Coeff {
    Num(Q),
    Sym(Arc<RatFunc>),
}

impl Default for Coeff {
    fn default() -> Self {
        Coeff::Num(Q::zero())
    }
}

impl From<Q> for Coeff {
    fn from(x: Q) -> Self {
        Coeff::Num(x)
    }
}

impl From<i64> for Coeff {
    fn from(x: i64) -> Self {
        Coeff::Num(q(x))
    }
}

fn merge_den(a: &[(Poly, u32)], b: &[(Poly, u32)], add: bool) -> Vec<(Poly, u32)> {
    let mut out: Vec<(Poly, u32)> = a.to_vec();
    for (f, k) in b {
        match out.iter_mut().find(|(g, _)| g == f) {
            Some(e) => e.1 = if add { e.1 + k } else { e.1.max(*k) },
            None => out.push((f.clone(), *k)),
        }
    }
    out.sort();
    out
}

impl Coeff {
    pub fn zero() -> Coeff {
        Coeff::Num(Q::zero())
    }

    pub fn one() -> Coeff {
        Coeff::Num(Q::one())
    }

    pub fn param(p: u16) -> Coeff {
        Coeff::from_poly(Poly::var(p))
    }

    pub fn from_poly(p: Poly) -> Coeff {
        match p.as_constant() {
            Some(c) => Coeff::Num(c),
            None => Coeff::Sym(Arc::new(RatFunc { num: p, den: Vec::new() })),
        }
    }

    fn parts(&self) -> (Poly, Vec<(Poly, u32)>) {
        match self {
            Coeff::Num(x) => (Poly::constant(x.clone()), Vec::new()),
            Coeff::Sym(r) => (r.num.clone(), r.den.clone()),
        }
    }

    fn canon(mut num: Poly, den: Vec<(Poly, u32)>) -> Coeff {
        if num.is_zero() {
            return Coeff::zero();
        }
        let mut out = Vec::new();
        for (f, mut k) in den {
            while k > 0 {
                match num.div_exact(&f) {
                    Some(qt) => {
                        num = qt;
                        k -= 1;
                    }
                    None => break,
                }
            }
            if k > 0 {
                out.push((f, k));
            }
        }
        if out.is_empty() {
            return Coeff::from_poly(num);
        }
        Coeff::Sym(Arc::new(RatFunc { num, den: out }))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Coeff::Num(x) if x.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Coeff::Num(x) if x.is_one())
    }

    pub fn as_rational(&self) -> Option<&Q> {
        match self {
            Coeff::Num(x) => Some(x),
            Coeff::Sym(_) => None,
        }
    }

    pub fn add(&self, o: &Coeff) -> Coeff {
        if let (Coeff::Num(a), Coeff::Num(b)) = (self, o) {
            return Coeff::Num(a + b);
        }
        let (na, da) = self.parts();
        let (nb, db) = o.parts();
        let l = merge_den(&da, &db, false);
        let lift = |n: &Poly, d: &[(Poly, u32)]| {
            let mut r = n.clone();
            for (f, k) in &l {
                let have = d.iter().find(|(g, _)| g == f).map_or(0, |x| x.1);
                r = r.mul(&f.pow(k - have));
            }
            r
        };
        Coeff::canon(lift(&na, &da).add(&lift(&nb, &db)), l)
    }

    pub fn neg(&self) -> Coeff {
        match self {
            Coeff::Num(a) => Coeff::Num(-a),
            Coeff::Sym(r) => Coeff::Sym(Arc::new(RatFunc { num: r.num.neg(), den: r.den.clone() })),
        }
    }

    pub fn sub(&self, o: &Coeff) -> Coeff {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Coeff) -> Coeff {
        match (self, o) {
            (Coeff::Num(a), Coeff::Num(b)) => Coeff::Num(a * b),
            (Coeff::Num(a), Coeff::Sym(r)) | (Coeff::Sym(r), Coeff::Num(a)) => {
                if a.is_zero() {
                    Coeff::zero()
                } else {
                    Coeff::Sym(Arc::new(RatFunc { num: r.num.scale(a), den: r.den.clone() }))
                }
            }
            _ => {
                let (na, da) = self.parts();
                let (nb, db) = o.parts();
                Coeff::canon(na.mul(&nb), merge_den(&da, &db, true))
            }
        }
    }

    pub fn inv(&self) -> Result<Coeff> {
        match self {
            Coeff::Num(a) => {
                if a.is_zero() {
                    Err(Error::DivisionByZero)
                } else {
                    Ok(Coeff::Num(a.recip()))
                }
            }
            Coeff::Sym(r) => {
                let (c, mut fs) = r.num.factor();
                let mut num = Poly::constant(c.recip());
                for (f, k) in &r.den {
                    num = num.mul(&f.pow(*k));
                }
                fs.sort();
                Ok(Coeff::canon(num, fs))
            }
        }
    }

    pub fn div(&self, o: &Coeff) -> Result<Coeff> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow_i(&self, n: i64) -> Result<Coeff> {
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let mut r = Coeff::one();
        for _ in 0..n.unsigned_abs() {
            r = r.mul(&base);
        }
        Ok(r)
    }

    pub fn eval(&self, vals: &dyn Fn(u16) -> Option<Q>) -> Result<Q> {
        match self {
            Coeff::Num(a) => Ok(a.clone()),
            Coeff::Sym(r) => {
                let mut d = Q::one();
                for (f, k) in &r.den {
                    d *= pow_q(&f.eval(vals)?, *k as i64)?;
                }
                if d.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                Ok(r.num.eval(vals)? / d)
            }
        }
    }

    pub fn subst(&self, vals: &dyn Fn(u16) -> Option<Q>) -> Result<Coeff> {
        match self {
            Coeff::Num(_) => Ok(self.clone()),
            Coeff::Sym(r) => {
                let mut d = Coeff::one();
                for (f, k) in &r.den {
                    d = d.mul(&Coeff::from_poly(f.subst(vals)).pow_i(*k as i64)?);
                }
                Coeff::from_poly(r.num.subst(vals)).div(&d)
            }
        }
    }

    pub fn params(&self, out: &mut Vec<u16>) {
        if let Coeff::Sym(r) = self {
            r.num.params(out);
            for (f, _) in &r.den {
                f.params(out);
            }
        }
    }

    /// Sign of the leading numerator coefficient, used for display.
    pub fn is_negative(&self) -> bool {
        match self {
            Coeff::Num(a) => a.is_negative(),
            Coeff::Sym(r) => r.num.leading_coeff().is_negative(),
        }
    }

    /// Convert an affine coefficient to an exponent.
    pub fn to_exponent(&self) -> Option<Exponent> {
        match self {
            Coeff::Num(a) => Some(Exponent::rational(a.clone())),
            Coeff::Sym(r) => {
                if !r.den.is_empty() || r.num.degree() > 1 {
                    return None;
                }
                let mut e = Exponent::rational(Q::zero());
                for (m, c) in &r.num.0 {
                    match m.0.as_slice() {
                        [] => e.c = c.clone(),
                        [(v, 1)] => e.lin.push((*v, c.clone())),
                        _ => return None,
                    }
                }
                e.lin.sort_by_key(|x| x.0);
                Some(e)
            }
        }
    }
}

/// Affine exponent `c + sum a_i p_i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exponent {
    pub c: Q,
    pub lin: SmallVec<[(u16, Q); 1]>,
}

impl Exponent {
    pub fn rational(c: Q) -> Exponent {
        Exponent { c, lin: SmallVec::new() }
    }

    pub fn int(n: i64) -> Exponent {
        Exponent::rational(q(n))
    }

    pub fn one() -> Exponent {
        Exponent::int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_zero() && self.lin.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c.is_one() && self.lin.is_empty()
    }

    pub fn as_rational(&self) -> Option<&Q> {
        if self.lin.is_empty() {
            Some(&self.c)
        } else {
            None
        }
    }

    pub fn as_integer(&self) -> Option<i64> {
        self.as_rational().filter(|r| r.is_integer()).and_then(|r| r.to_integer().to_i64())
    }

    pub fn is_nonneg_integer(&self) -> bool {
        self.as_integer().map_or(false, |n| n >= 0)
    }

    pub fn add(&self, o: &Exponent) -> Exponent {
        let mut lin: SmallVec<[(u16, Q); 1]> = self.lin.clone();
        for (v, a) in &o.lin {
            match lin.iter_mut().find(|x| x.0 == *v) {
                Some(x) => x.1 += a,
                None => lin.push((*v, a.clone())),
            }
        }
        lin.retain(|x| !x.1.is_zero());
        lin.sort_by_key(|x| x.0);
        Exponent { c: &self.c + &o.c, lin }
    }

    pub fn neg(&self) -> Exponent {
        Exponent { c: -&self.c, lin: self.lin.iter().map(|(v, a)| (*v, -a)).collect() }
    }

    pub fn sub(&self, o: &Exponent) -> Exponent {
        self.add(&o.neg())
    }

    pub fn scale(&self, k: &Q) -> Exponent {
        if k.is_zero() {
            return Exponent::int(0);
        }
        Exponent { c: &self.c * k, lin: self.lin.iter().map(|(v, a)| (*v, a * k)).collect() }
    }

    /// Product, defined when at least one factor is constant.
    pub fn mul(&self, o: &Exponent) -> Option<Exponent> {
        if let Some(k) = o.as_rational() {
            Some(self.scale(k))
        } else {
            self.as_rational().map(|k| o.scale(k))
        }
    }

    pub fn to_coeff(&self) -> Coeff {
        if self.lin.is_empty() {
            return Coeff::Num(self.c.clone());
        }
        let mut p = Poly::constant(self.c.clone());
        for (v, a) in &self.lin {
            p = p.add(&Poly::var(*v).scale(a));
        }
        Coeff::from_poly(p)
    }

    pub fn eval(&self, vals: &dyn Fn(u16) -> Option<Q>) -> Result<Q> {
        let mut s = self.c.clone();
        for (v, a) in &self.lin {
            s += a * vals(*v).ok_or_else(|| Error::MissingBinding(format!("param#{v}")))?;
        }
        Ok(s)
    }

    pub fn subst(&self, vals: &dyn Fn(u16) -> Option<Q>) -> Exponent {
        let mut e = Exponent::rational(self.c.clone());
        for (v, a) in &self.lin {
            match vals(*v) {
                Some(x) => e.c += a * x,
                None => e.lin.push((*v, a.clone())),
            }
        }
        e
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Coeff {
        Coeff::param(0)
    }

    #[test]
    fn rational_function_cancels() {
        let p1 = p().add(&Coeff::one());
        let r = p1.div(&p1).unwrap();
        assert!(r.is_one());
        let a = Coeff::one().div(&p1).unwrap();
        let b = a.mul(&p1);
        assert!(b.is_one());
    }

    #[test]
    fn sum_over_common_denominator() {
        // 1/(p+1) + p/(p+1) = 1
        let p1 = p().add(&Coeff::one());
        let s = Coeff::one().div(&p1).unwrap().add(&p().div(&p1).unwrap());
        assert!(s.is_one());
        // 1/p - 1/(p+1) = 1/(p(p+1))
        let d = Coeff::one().div(&p()).unwrap().sub(&Coeff::one().div(&p1).unwrap());
        let e = Coeff::one().div(&p().mul(&p1)).unwrap();
        assert_eq!(d, e);
    }

    #[test]
    fn quadratic_denominator_factors() {
        // (p+1)/(p^2+3p+2) = 1/(p+2)
        let p2 = p().mul(&p()).add(&p().mul(&Coeff::from(3))).add(&Coeff::from(2));
        let r = p().add(&Coeff::one()).div(&p2).unwrap();
        let e = Coeff::one().div(&p().add(&Coeff::from(2))).unwrap();
        assert_eq!(r, e);
    }

    #[test]
    fn exact_roots() {
        assert_eq!(root_q(&qf(9, 4), &qf(1, 2)).unwrap(), qf(3, 2));
        assert_eq!(root_q(&q(8), &qf(-2, 3)).unwrap(), qf(1, 4));
        assert!(root_q(&q(2), &qf(1, 2)).is_err());
        assert_eq!(root_q(&q(-2), &qf(1, 2)), Err(Error::NegativeBase));
    }

    #[test]
    fn exponent_affine_arithmetic() {
        let e = Exponent::one().add(&Exponent { c: q(0), lin: smallvec::smallvec![(0, q(1))] });
        assert_eq!(e.to_coeff(), p().add(&Coeff::one()));
        assert!(e.mul(&e).is_none());
        assert_eq!(e.sub(&e), Exponent::int(0));
    }
}
