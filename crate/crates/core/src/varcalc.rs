//! Variational calculus on jet space: linearizations and their adjoints,
//! Euler and higher Euler operators, homotopy inversion, and the scaling
//! identity.

use num_integer::binomial;
use smallvec::SmallVec;

use crate::coeff::{Coeff, Exponent, Q};
use crate::error::{Error, Result};
use crate::expr::{Base, Expr, JetVar, Monomial, ZeroTest};
use crate::pde_system::{PdeSystem, ScalingAction};
use crate::space::JetSpace;

/// A current `(T, X^1..X^n)`; component 0 is the time component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Current {
    pub t: Expr,
    pub x: Vec<Expr>,
}

impl Current {
    pub fn zero(n_indep: usize) -> Current {
        Current { t: Expr::zero(), x: vec![Expr::zero(); n_indep - 1] }
    }

    pub fn from_components(mut c: Vec<Expr>) -> Current {
        let t = c.remove(0);
        Current { t, x: c }
    }

    pub fn components(&self) -> Vec<Expr> {
        let mut v = vec![self.t.clone()];
        v.extend(self.x.iter().cloned());
        v
    }

    pub fn component(&self, i: usize) -> &Expr {
        if i == 0 {
            &self.t
        } else {
            &self.x[i - 1]
        }
    }

    fn component_mut(&mut self, i: usize) -> &mut Expr {
        if i == 0 {
            &mut self.t
        } else {
            &mut self.x[i - 1]
        }
    }

    pub fn add(&self, o: &Current) -> Current {
        self.zip(o, |a, b| a.add(b))
    }

    pub fn sub(&self, o: &Current) -> Current {
        self.zip(o, |a, b| a.sub(b))
    }

    pub fn scale(&self, k: &Coeff) -> Current {
        self.map(|e| Ok(e.scale(k))).unwrap()
    }

    fn zip(&self, o: &Current, f: impl Fn(&Expr, &Expr) -> Expr) -> Current {
        Current { t: f(&self.t, &o.t), x: self.x.iter().zip(&o.x).map(|(a, b)| f(a, b)).collect() }
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Result<Expr>) -> Result<Current> {
        Ok(Current { t: f(&self.t)?, x: self.x.iter().map(&f).collect::<Result<_>>()? })
    }

    /// `D_t T + sum_i D_i X^i`.
    pub fn divergence(&self, sp: &JetSpace) -> Expr {
        let mut parts = vec![self.t.total_derivative(0, sp)];
        for (i, x) in self.x.iter().enumerate() {
            parts.push(x.total_derivative(i + 1, sp));
        }
        Expr::sum(parts.iter())
    }

    pub fn is_zero(&self) -> bool {
        self.t.is_zero() && self.x.iter().all(|e| e.is_zero())
    }

    pub fn show(&self, sp: &JetSpace) -> (String, Vec<String>) {
        (self.t.show(sp), self.x.iter().map(|e| e.show(sp)).collect())
    }
}

/// Jet variables of `f` grouped by dependent variable.
fn vars_of(f: &Expr, dep: u16) -> Vec<JetVar> {
    f.jet_vars().into_iter().filter(|v| v.dep == dep).collect()
}

/// `sum_K D^K v^a * df/du^a_K`.
pub fn frechet(f: &Expr, v: &[Expr], sp: &JetSpace) -> Expr {
    let mut parts = Vec::new();
    for j in f.jet_vars() {
        let Some(va) = v.get(j.dep as usize) else { continue };
        if va.is_zero() {
            continue;
        }
        parts.push(f.partial(&j, sp).mul(&va.total_derivative_multi(&j.idx, sp)));
    }
    Expr::sum(parts.iter())
}

/// `(-D)^K e`.
pub fn neg_total_derivative(e: &Expr, k: &[u8], sp: &JetSpace) -> Expr {
    let d = e.total_derivative_multi(k, sp);
    if k.iter().map(|&x| x as u32).sum::<u32>() % 2 == 1 {
        d.neg()
    } else {
        d
    }
}

/// Component `a`: `sum_K (-D)^K (w df/du^a_K)`.
pub fn frechet_adjoint(f: &Expr, w: &Expr, sp: &JetSpace) -> Vec<Expr> {
    (0..sp.n_dep() as u16)
        .map(|a| {
            let parts: Vec<Expr> =
                vars_of(f, a).iter().map(|j| neg_total_derivative(&w.mul(&f.partial(j, sp)), &j.idx, sp)).collect();
            Expr::sum(parts.iter())
        })
        .collect()
}

pub fn euler(f: &Expr, sp: &JetSpace) -> Vec<Expr> {
    frechet_adjoint(f, &Expr::one(), sp)
}

/// Euler operator with respect to the jet variable `v`, treated as the
/// dependent variable: `sum_K (-D)^K df/d(D^K v)`.
pub fn euler_wrt(f: &Expr, v: &JetVar, sp: &JetSpace) -> Expr {
    let parts: Vec<Expr> = f
        .jet_vars()
        .iter()
        .filter(|j| j.descends_from(v))
        .map(|j| neg_total_derivative(&f.partial(j, sp), &j.minus(v), sp))
        .collect();
    Expr::sum(parts.iter())
}

fn multi_binomial(k: &[u8], j: &[u8]) -> i64 {
    k.iter().zip(j).map(|(&a, &b)| binomial(a as i64, b as i64)).product()
}

/// Higher Euler operator `E^{(L)}_{u^a}(f) = sum_{K>=L} C(K,L) (-D)^{K-L} df/du^a_K`,
/// with `L` a counting multi-index.
pub fn higher_euler(f: &Expr, dep: u16, l: &[u8], sp: &JetSpace) -> Expr {
    let base = JetVar::new(dep, l);
    let parts: Vec<Expr> = vars_of(f, dep)
        .iter()
        .filter(|k| k.descends_from(&base))
        .map(|k| {
            let c = multi_binomial(&k.idx, l);
            neg_total_derivative(&f.partial(k, sp), &k.minus(&base), sp).scale_q(&Q::from_integer(c.into()))
        })
        .collect();
    Expr::sum(parts.iter())
}

/// All counting multi-indices `L` with `1 <= |L|` for which `higher_euler`
/// can be nonzero on `f`, sorted.
pub fn higher_euler_indices(f: &Expr, dep: u16) -> Vec<SmallVec<[u8; 4]>> {
    let mut out: Vec<JetVar> = Vec::new();
    for k in vars_of(f, dep) {
        for l in below_or_equal(&k) {
            if l.order() >= 1 && !out.contains(&l) {
                out.push(l);
            }
        }
    }
    out.sort();
    out.into_iter().map(|v| v.idx).collect()
}

fn below_or_equal(v: &JetVar) -> Vec<JetVar> {
    let mut out = vec![JetVar { dep: v.dep, idx: smallvec::smallvec![0; v.idx.len()] }];
    for i in 0..v.idx.len() {
        let mut next = Vec::new();
        for w in &out {
            for k in 0..=v.idx[i] {
                let mut x = w.clone();
                x.idx[i] = k;
                next.push(x);
            }
        }
        out = next;
    }
    out
}

/// Integration by parts of `B * D^K v`: returns the current and leaves the
/// remainder `((-D)^K B) v` implicit.
fn ibp_current(b: &Expr, v: &Expr, k: &[u8], sp: &JetSpace, out: &mut Current) {
    let mut dirs: Vec<usize> = Vec::new();
    for (i, &n) in k.iter().enumerate() {
        for _ in 0..n {
            dirs.push(i);
        }
    }
    let mut b = b.clone();
    for (s, &i) in dirs.iter().enumerate() {
        let mut rest: SmallVec<[u8; 4]> = smallvec::smallvec![0; k.len()];
        for &j in &dirs[s + 1..] {
            rest[j] += 1;
        }
        let term = b.mul(&v.total_derivative_multi(&rest, sp));
        let c = out.component_mut(i);
        *c = c.add(&term);
        b = b.total_derivative(i, sp).neg();
    }
}

/// `Psi(v, w; f)` with `w frechet(f, v) - v . frechet_adjoint(f, w) = D . Psi`.
pub fn adjoint_current(f: &Expr, v: &[Expr], w: &Expr, sp: &JetSpace) -> Current {
    let mut out = Current::zero(sp.n_indep());
    for j in f.jet_vars() {
        if j.order() == 0 {
            continue;
        }
        let Some(va) = v.get(j.dep as usize) else { continue };
        if va.is_zero() {
            continue;
        }
        let b = w.mul(&f.partial(&j, sp));
        ibp_current(&b, va, &j.idx, sp, &mut out);
    }
    out
}

/// `Upsilon_f(v) = Psi(v, 1; f)`.
pub fn euler_current(f: &Expr, v: &[Expr], sp: &JetSpace) -> Current {
    adjoint_current(f, v, &Expr::one(), sp)
}

/// Degree of a monomial under `u -> lambda u` for every dependent variable.
pub fn homotopy_degree(m: &Monomial) -> Option<Exponent> {
    let mut d = Exponent::int(0);
    for (b, e) in m.factors() {
        let bd = match b {
            Base::Jet(_) => Exponent::one(),
            Base::Indep(_) => continue,
            Base::Func(_) => {
                if Expr::base(b.clone()).jet_vars().is_empty() {
                    continue;
                }
                return None;
            }
            Base::Comp(inner) => {
                let mut it = inner.terms().map(|(mm, _)| homotopy_degree(mm));
                let first = it.next()??;
                for x in it {
                    if x? != first {
                        return None;
                    }
                }
                first
            }
        };
        d = d.add(&bd.mul(e)?);
    }
    Some(d)
}

/// `int_0^1 e[lambda u] lambda^(-1) d lambda`, term by term.
fn lambda_integral(e: &Expr, sp: &JetSpace) -> Result<Expr> {
    let mut parts = Vec::new();
    for (m, c) in e.terms() {
        let deg = homotopy_degree(m).ok_or_else(|| {
            Error::NonHomogeneousHomotopy(Expr::term(c.clone(), m.clone()).show(sp))
        })?;
        if deg.is_zero() {
            return Err(Error::SingularHomotopy(Expr::term(c.clone(), m.clone()).show(sp)));
        }
        let k = deg.to_coeff().inv()?;
        parts.push(Expr::term(c.mul(&k), m.clone()));
    }
    Ok(Expr::sum(parts.iter()))
}

/// Shift every dependent variable by a constant: `u^a -> u^a + u0^a`.
fn shift(e: &Expr, u0: &[Expr], sign: i64, sp: &JetSpace) -> Result<Expr> {
    if u0.iter().all(|x| x.is_zero()) {
        return Ok(e.clone());
    }
    e.subst_bases(
        &|b| match b {
            Base::Jet(v) if v.order() == 0 => {
                let s = u0.get(v.dep as usize)?;
                if s.is_zero() {
                    None
                } else {
                    Some(Expr::jet(v.clone()).add(&s.scale_q(&Q::from_integer(sign.into()))))
                }
            }
            _ => None,
        },
        sp,
    )
}

/// Antiderivative in `x^1` of an expression depending only on `(t, x)`.
fn x_antiderivative(e: &Expr, sp: &JetSpace) -> Result<Expr> {
    if sp.n_indep() < 2 {
        return Err(Error::NotDivergence("no spatial variable to integrate in".into()));
    }
    let x = Base::Indep(1);
    let mut parts = Vec::new();
    for (m, c) in e.terms() {
        let n = m.exponent_of(&x).cloned().unwrap_or_else(|| Exponent::int(0));
        let rest_ok = m.factors().all(|(b, _)| matches!(b, Base::Indep(_)));
        if !rest_ok || n.as_rational().map(|r| *r == Q::from_integer((-1).into())).unwrap_or(false) {
            return Err(Error::NotDivergence(format!("cannot integrate {} in {}", Expr::term(c.clone(), m.clone()).show(sp), sp.indep[1])));
        }
        let n1 = n.add(&Exponent::one());
        let t = Expr::term(c.clone(), m.clone()).mul(&Expr::base(x.clone())).mul(&Expr::constant(n1.to_coeff().inv()?));
        parts.push(t);
    }
    Ok(Expr::sum(parts.iter()))
}

/// A current `F` with `D . F = f`, for `f` annihilated by the Euler operator,
/// by the linear homotopy from the constant state `u0` (empty means zero).
pub fn divergence_antiderivative(f: &Expr, u0: &[Expr], sp: &JetSpace) -> Result<Current> {
    let e = euler(f, sp);
    for (a, c) in e.iter().enumerate() {
        if c.zero_test() == ZeroTest::NonZero {
            return Err(Error::NotDivergence(format!("Euler operator wrt {} is {}", sp.dep[a], c.show(sp))));
        }
    }
    let g = shift(f, u0, 1, sp)?;
    let ids: Vec<Expr> = (0..sp.n_dep()).map(|a| Expr::jet(sp.u(a))).collect();
    let ups = euler_current(&g, &ids, sp);
    let mut out = ups.map(|c| lambda_integral(c, sp))?;
    let base: Vec<(Monomial, Coeff)> =
        g.terms().filter(|(m, _)| homotopy_degree(m).map(|d| d.is_zero()).unwrap_or(false)).map(|(m, c)| (m.clone(), c.clone())).collect();
    let f0 = Expr::from_terms(base);
    if !f0.is_zero() {
        out.x[0] = out.x[0].add(&x_antiderivative(&f0, sp)?);
    }
    out.map(|c| shift(c, u0, -1, sp))
}

/// Helmholtz residual for one `(equation a, variable b, multi-index K)`.
#[derive(Clone, Debug)]
pub struct HelmholtzResidual {
    pub order: u32,
    pub equation: usize,
    pub variable: usize,
    pub index: SmallVec<[u8; 4]>,
    pub residual: Expr,
}

#[derive(Clone, Debug)]
pub struct HelmholtzReport {
    pub square: bool,
    pub odd_order: bool,
    pub residuals: Vec<HelmholtzResidual>,
    pub variational: bool,
}

impl HelmholtzReport {
    /// Nonzero residuals of total order `k`.
    pub fn at_order(&self, k: u32) -> Vec<&HelmholtzResidual> {
        self.residuals.iter().filter(|r| r.order == k).collect()
    }
}

/// `dG_a/du^b_K - (-1)^|K| E^{(K)}_{u^a}(G_b)` for all `a, b, K`.
pub fn helmholtz_check(sys: &PdeSystem) -> HelmholtzReport {
    let sp = &sys.space;
    let m = sys.m();
    let gs = sys.gs();
    if gs.len() != m {
        return HelmholtzReport { square: false, odd_order: false, residuals: Vec::new(), variational: false };
    }
    let n = sys.order();
    let mut residuals = Vec::new();
    for a in 0..m {
        for b in 0..m {
            let mut ks: Vec<JetVar> = Vec::new();
            for v in vars_of(&gs[a], b as u16) {
                ks.extend(below_or_equal(&JetVar { dep: 0, idx: v.idx.clone() }));
            }
            for v in vars_of(&gs[b], a as u16) {
                ks.extend(below_or_equal(&JetVar { dep: 0, idx: v.idx.clone() }));
            }
            ks.sort();
            ks.dedup();
            for k in ks {
                let lhs = gs[a].partial(&JetVar::new(b as u16, &k.idx), sp);
                let he = higher_euler(&gs[b], a as u16, &k.idx, sp);
                let r = if k.order() % 2 == 0 { lhs.sub(&he) } else { lhs.add(&he) };
                if r.zero_test() != ZeroTest::Zero {
                    residuals.push(HelmholtzResidual { order: k.order(), equation: a, variable: b, index: k.idx.clone(), residual: r });
                }
            }
        }
    }
    residuals.sort_by_key(|r| (r.order, r.equation, r.variable, r.index.clone()));
    let odd = n % 2 == 1;
    let variational = residuals.is_empty() && !odd;
    HelmholtzReport { square: true, odd_order: odd, residuals, variational }
}

/// `L = int_0^1 u . G[lambda u] d lambda`, identifying equation `a` with `u^a`.
pub fn lagrangian_from_system(sys: &PdeSystem) -> Result<Expr> {
    let sp = &sys.space;
    if sys.n_eq() != sys.m() {
        return Err(Error::Dimension("a Lagrangian needs as many equations as dependent variables".into()));
    }
    let parts: Vec<Expr> = (0..sys.m()).map(|a| Expr::jet(sp.u(a)).mul(&sys.g(a))).collect();
    lambda_integral(&Expr::sum(parts.iter()), sp)
}

/// Characteristic `P^a = c_a u^a - a t u^a_t - b_i x^i u^a_i` of a scaling.
pub fn scaling_characteristic(act: &ScalingAction, sp: &JetSpace) -> Vec<Expr> {
    (0..sp.n_dep())
        .map(|a| {
            let mut e = Expr::jet(sp.u(a)).scale(&act.dep[a]);
            for i in 0..sp.n_indep() {
                let w = &act.indep[i];
                if !w.is_zero() {
                    let d = Expr::indep(i).mul(&Expr::jet(sp.u(a).raised(i))).scale(w);
                    e = e.sub(&d);
                }
            }
            e
        })
        .collect()
}

/// Weight `s` with `frechet(f, P) + tau D_t f + xi . D_x f = s f`.
pub fn scaling_weight(f: &Expr, act: &ScalingAction, sp: &JetSpace) -> Result<Coeff> {
    let p = scaling_characteristic(act, sp);
    let mut r = frechet(f, &p, sp);
    for i in 0..sp.n_indep() {
        if !act.indep[i].is_zero() {
            r = r.add(&Expr::indep(i).mul(&f.total_derivative(i, sp)).scale(&act.indep[i]));
        }
    }
    let Some((m, c)) = f.terms().next() else { return Ok(Coeff::zero()) };
    let s = r.coeff_of(m).div(c)?;
    if r.sub(&f.scale(&s)).zero_test() != ZeroTest::Zero {
        return Err(Error::NotHomogeneous(format!("{} under scaling {}", truncate_show(f, sp), act.name)));
    }
    Ok(s)
}

fn truncate_show(e: &Expr, sp: &JetSpace) -> String {
    crate::pde_system::truncate(&e.show(sp))
}

/// `omega f = P . E(f) + D . F` with `omega = s + a + sum b_i` and
/// `F = (f tau + Upsilon^t_f(P), f xi + Upsilon^x_f(P))`.
pub fn scaling_identity(f: &Expr, act: &ScalingAction, sp: &JetSpace) -> Result<(Coeff, Current)> {
    let s = scaling_weight(f, act, sp)?;
    let mut omega = s;
    for w in &act.indep {
        omega = omega.add(w);
    }
    let p = scaling_characteristic(act, sp);
    let mut cur = euler_current(f, &p, sp);
    for i in 0..sp.n_indep() {
        if !act.indep[i].is_zero() {
            let c = cur.component_mut(i);
            *c = c.add(&f.mul(&Expr::indep(i)).scale(&act.indep[i]));
        }
    }
    Ok((omega, cur))
}

/// Helper for tests and examples: the vector `(u^1, ..., u^m)`.
pub fn identity_vector(sp: &JetSpace) -> Vec<Expr> {
    (0..sp.n_dep()).map(|a| Expr::jet(sp.u(a))).collect()
}
