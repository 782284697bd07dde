//! Conserved currents from multipliers (homotopy, scaling, direct solve),
//! multipliers from currents, and equivalence of currents.

use std::fmt;

use rayon::prelude::*;

use crate::coeff::{Coeff, Q};
use crate::detsys::{monomial_basis, solve_columns, triviality_check, verify_multiplier, Triviality};
use crate::error::{Error, Result};
use crate::expr::{Base, Expr, JetVar};
use crate::oracle::{decide, Outcome, Verdict, DEFAULT_POINTS};
use crate::pde_system::{PdeSystem, ScalingAction};
use crate::varcalc::{divergence_antiderivative, euler, euler_wrt, scaling_identity, scaling_weight, Current};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Homotopy,
    Scaling,
    Dimensional,
    Direct,
    User,
}

impl Method {
    pub fn parse(s: &str) -> Option<Method> {
        match s {
            "homotopy" => Some(Method::Homotopy),
            "scaling" => Some(Method::Scaling),
            "dimensional" => Some(Method::Dimensional),
            "direct" => Some(Method::Direct),
            "user" => Some(Method::User),
            _ => None,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Homotopy => "homotopy",
            Method::Scaling => "scaling",
            Method::Dimensional => "dimensional",
            Method::Direct => "direct",
            Method::User => "user",
        })
    }
}

#[derive(Clone, Debug)]
pub struct ConservedCurrent {
    pub current: Current,
    pub method: Method,
    pub multiplier: Option<Vec<Expr>>,
    /// Scaling factor for the scaling constructions.
    pub omega: Option<Coeff>,
    /// Dimension of the trivial-current freedom left by a direct solve.
    pub freedom: Option<usize>,
    pub notes: Vec<String>,
}

impl ConservedCurrent {
    fn new(current: Current, method: Method, q: &[Expr]) -> ConservedCurrent {
        ConservedCurrent { current, method, multiplier: Some(q.to_vec()), omega: None, freedom: None, notes: Vec::new() }
    }
}

fn check_shape(sys: &PdeSystem, c: &Current) -> Result<()> {
    if c.x.len() + 1 != sys.n_indep() {
        return Err(Error::Dimension(format!("current has {} flux component(s), expected {}", c.x.len(), sys.n_indep() - 1)));
    }
    Ok(())
}

fn g_dot_q(sys: &PdeSystem, q: &[Expr]) -> Result<Expr> {
    if q.len() != sys.n_eq() {
        return Err(Error::Dimension(format!("multiplier has {} component(s), expected {}", q.len(), sys.n_eq())));
    }
    Ok(Expr::sum_owned(sys.gs().iter().zip(q).map(|(g, a)| g.mul(a))))
}

/// `D_t T + Div X - G . Q`, identically in jet space.
pub fn verify_characteristic(sys: &PdeSystem, c: &Current, q: &[Expr]) -> Result<Verdict> {
    check_shape(sys, c)?;
    let r = c.divergence(&sys.space).sub(&g_dot_q(sys, q)?);
    Ok(decide(vec![r], &sys.space, DEFAULT_POINTS, 13))
}

/// `(D_t T + Div X)|_E`.
pub fn verify_conservation(sys: &PdeSystem, c: &Current) -> Result<Verdict> {
    check_shape(sys, c)?;
    let r = sys.restrict(&c.divergence(&sys.space))?;
    Ok(decide(vec![r], &sys.space, DEFAULT_POINTS, 17))
}

fn require_multiplier(sys: &PdeSystem, q: &[Expr]) -> Result<()> {
    let v = verify_multiplier(sys, q)?;
    if v.outcome == Outcome::Fail {
        let txt: Vec<String> = q.iter().map(|e| sys.show(e)).collect();
        return Err(Error::NotMultiplier(format!("({})", txt.join(", "))));
    }
    Ok(())
}

/// Homotopy integral of `G . Q` along `u0 + lambda (u - u0)`; `u0` are
/// constants (empty for zero).
pub fn current_from_multiplier_homotopy(sys: &PdeSystem, q: &[Expr], u0: &[Expr]) -> Result<ConservedCurrent> {
    require_multiplier(sys, q)?;
    let f = g_dot_q(sys, q)?;
    let cur = divergence_antiderivative(&f, u0, &sys.space)?;
    let mut out = ConservedCurrent::new(cur, Method::Homotopy, q);
    if u0.iter().any(|e| !e.is_zero()) {
        let txt: Vec<String> = u0.iter().map(|e| sys.show(e)).collect();
        out.notes.push(format!("base point u0 = ({})", txt.join(", ")));
    }
    Ok(out)
}

/// Scaling construction: `omega (T, X) = (f tau + Upsilon^t_f(P), f xi + Upsilon^x_f(P))`
/// with `f = G . Q`, restricted to solutions and divided by `omega`.
pub fn current_from_multiplier_scaling(sys: &PdeSystem, q: &[Expr], act: &ScalingAction) -> Result<ConservedCurrent> {
    require_multiplier(sys, q)?;
    for g in sys.gs() {
        scaling_weight(&g, act, &sys.space)?;
    }
    let f = g_dot_q(sys, q)?;
    let (omega, cur) = scaling_identity(&f, act, &sys.space)?;
    if omega.is_zero() {
        return Err(Error::CriticalWeight);
    }
    let k = omega.inv()?;
    let cur = cur.map(|e| sys.restrict(&e.scale(&k)))?;
    let mut out = ConservedCurrent::new(cur, Method::Scaling, q);
    out.omega = Some(omega);
    Ok(out)
}

/// Result of the dimensional scaling formula on an augmented system.
#[derive(Clone, Debug)]
pub struct Dimensional {
    pub omega: Coeff,
    /// Formula output before division by `omega`, on the original system.
    pub raw: Current,
    pub current: ConservedCurrent,
}

/// Scaling formula on a system whose parameters were promoted to constant
/// dependent variables. `q_aug` holds the multiplier followed by the
/// auxiliary multipliers of the constancy equations; `values` fixes each
/// promoted variable afterwards. The first `original.m()` dependent
/// variables of `aug` must be those of `original`.
pub fn verify_dimensional_scaling(
    original: &PdeSystem,
    aug: &PdeSystem,
    q_aug: &[Expr],
    act: &ScalingAction,
    values: &[(String, Q)],
) -> Result<Dimensional> {
    if aug.space.dep[..original.m()] != original.space.dep[..] {
        return Err(Error::Dimension("augmented system must extend the original dependent variables".into()));
    }
    let v = verify_multiplier(aug, q_aug)?;
    if v.outcome == Outcome::Fail {
        return Err(Error::NotMultiplier("augmented multiplier fails its determining system".into()));
    }
    let f = g_dot_q(aug, q_aug)?;
    let (omega, cur) = scaling_identity(&f, act, &aug.space)?;
    if omega.is_zero() {
        return Err(Error::CriticalWeight);
    }
    let mut fixed: Vec<(u16, Q)> = Vec::new();
    for (n, x) in values {
        let d = aug.space.dep_index(n).ok_or_else(|| Error::Undeclared(n.clone()))?;
        fixed.push((d, x.clone()));
    }
    let m = original.m() as u16;
    let set = |e: &Expr| -> Result<Expr> {
        let r = e.subst_bases(
            &|b| match b {
                Base::Jet(v) if v.dep >= m => {
                    let val = fixed.iter().find(|(d, _)| *d == v.dep)?;
                    Some(if v.order() == 0 { Expr::rat(val.1.clone()) } else { Expr::zero() })
                }
                _ => None,
            },
            &aug.space,
        )?;
        if r.jet_vars().iter().any(|v| v.dep >= m) {
            return Err(Error::MissingBinding("a promoted parameter has no value".into()));
        }
        original.restrict(&r)
    };
    let raw = cur.map(set)?;
    let k = omega.inv()?;
    let divided = raw.scale(&k);
    let q0: Vec<Expr> = q_aug[..original.n_eq()].iter().map(&set).collect::<Result<_>>()?;
    let mut cc = ConservedCurrent::new(divided, Method::Dimensional, &q0);
    cc.omega = Some(omega.clone());
    Ok(Dimensional { omega, raw, current: cc })
}

/// Candidate bases for a direct solve.
#[derive(Clone, Debug)]
pub struct DirectBasis {
    pub t: Vec<Expr>,
    pub x: Vec<Vec<Expr>>,
}

impl DirectBasis {
    /// Monomials over `t, x^i` (degree <= 1 each), the low-order variables
    /// and the leads (degree <= 1), with jet degree at most `degree`. When
    /// the system declares a scaling under which `G . Q` is homogeneous,
    /// only monomials of the matching weight are kept.
    pub fn default_for(sys: &PdeSystem, q: &[Expr], degree: u32) -> Result<DirectBasis> {
        let mut bases: Vec<(Expr, u32)> = (0..sys.n_indep()).map(|i| (Expr::indep(i), 1)).collect();
        let low = sys.low_order_variables();
        for v in &low {
            bases.push((Expr::jet(v.clone()), degree));
        }
        let mut all = monomial_basis(&bases, degree);
        let mut leads: Vec<JetVar> = sys.equations.iter().map(|e| e.lead.clone()).collect();
        leads.dedup();
        let lower = monomial_basis(&bases, degree.saturating_sub(1));
        for l in &leads {
            for b in &lower {
                all.push(b.mul(&Expr::jet(l.clone())));
            }
        }
        let mut t = all.clone();
        let mut x = vec![all; sys.n_indep() - 1];
        if let Some(act) = sys.scalings.first() {
            let f = g_dot_q(sys, q)?;
            if let Ok(s) = scaling_weight(&f, act, &sys.space) {
                let keep = |b: &Expr, w: &Coeff| scaling_weight(b, act, &sys.space).map(|x| &x == w).unwrap_or(false);
                let wt = s.add(&act.indep[0]);
                t.retain(|b| keep(b, &wt));
                for (i, xs) in x.iter_mut().enumerate() {
                    let wx = s.add(&act.indep[i + 1]);
                    xs.retain(|b| keep(b, &wx));
                }
            }
        }
        Ok(DirectBasis { t, x })
    }

    fn len(&self) -> usize {
        self.t.len() + self.x.iter().map(|v| v.len()).sum::<usize>()
    }
}

/// Solve `D_t T + Div X = G . Q` over the ansatz by splitting over
/// monomials. Free coefficients are pinned to zero.
pub fn current_from_multiplier_direct(sys: &PdeSystem, q: &[Expr], basis: &DirectBasis) -> Result<ConservedCurrent> {
    if basis.len() == 0 {
        return Err(Error::EmptyBasis);
    }
    if let Some(p) = sys.space.free_params().first() {
        return Err(Error::FreeParameter(p.to_string()));
    }
    if basis.x.len() + 1 != sys.n_indep() {
        return Err(Error::Dimension("one flux basis per spatial variable expected".into()));
    }
    let f = g_dot_q(sys, q)?;
    let mut slots: Vec<(usize, &Expr)> = basis.t.iter().map(|b| (0, b)).collect();
    for (i, xs) in basis.x.iter().enumerate() {
        slots.extend(xs.iter().map(|b| (i + 1, b)));
    }
    let cols: Vec<Vec<Expr>> = slots.par_iter().map(|(i, b)| vec![b.total_derivative(*i, &sys.space)]).collect();
    let sol = solve_columns(&cols, Some(&[f]), Some(&sys.space)).map_err(|e| match e {
        Error::Inconsistent(m) => Error::Inconsistent(format!("{m} (no current in the candidate basis; try a higher degree)")),
        e => e,
    })?;
    let c = sol.particular.expect("consistent");
    let mut cur = Current::zero(sys.n_indep());
    let mut parts: Vec<Vec<Expr>> = vec![Vec::new(); sys.n_indep()];
    for ((i, b), ci) in slots.iter().zip(&c) {
        if !num_traits::Zero::is_zero(ci) {
            parts[*i].push(b.scale_q(ci));
        }
    }
    cur.t = Expr::sum(parts[0].iter());
    for i in 1..sys.n_indep() {
        cur.x[i - 1] = Expr::sum(parts[i].iter());
    }
    let mut out = ConservedCurrent::new(cur, Method::Direct, q);
    out.freedom = Some(sol.rref.free_columns().len());
    Ok(out)
}

/// `Q_a = sum_i E_{u_(l_a - e_i)}(Phi^i)` over directions with `l_a^i > 0`,
/// after restricting the current to solutions.
pub fn multiplier_from_current(sys: &PdeSystem, c: &Current) -> Result<Vec<Expr>> {
    check_shape(sys, c)?;
    let r = c.map(|e| sys.restrict(e))?;
    let comps = r.components();
    let mut q = Vec::new();
    for eq in &sys.equations {
        let dirs: Vec<usize> = (0..sys.n_indep()).filter(|&i| eq.lead.idx[i] > 0).collect();
        if dirs.is_empty() {
            return Err(Error::NoSubleading(sys.space.jet_name(&eq.lead)));
        }
        let parts: Vec<Expr> =
            dirs.iter().map(|&i| euler_wrt(&comps[i], &eq.lead.lowered(i).unwrap(), &sys.space)).collect();
        q.push(Expr::sum(parts.iter()));
    }
    Ok(q)
}

#[derive(Clone, Debug)]
pub struct Equivalence {
    pub conserved: (Outcome, Outcome),
    pub multiplier: Vec<Expr>,
    pub triviality: Triviality,
}

impl Equivalence {
    pub fn equivalent(&self) -> bool {
        matches!(self.triviality, Triviality::Trivial { .. })
    }
}

/// Two conserved currents are equivalent when the multiplier of their
/// difference is trivial.
pub fn current_equivalence(sys: &PdeSystem, a: &Current, b: &Current) -> Result<Equivalence> {
    let ca = verify_conservation(sys, a)?.outcome;
    let cb = verify_conservation(sys, b)?.outcome;
    let q = multiplier_from_current(sys, &a.sub(b))?;
    let triviality = if ca == Outcome::Fail || cb == Outcome::Fail {
        Triviality::Undetermined
    } else {
        triviality_check(sys, &q, None)?
    };
    Ok(Equivalence { conserved: (ca, cb), multiplier: q, triviality })
}

/// `E_u(T)` check used by reports: the Euler image of a density.
pub fn density_euler(sys: &PdeSystem, t: &Expr) -> Vec<Expr> {
    euler(t, &sys.space)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gkdv(p: i64) -> PdeSystem {
        let text = format!(
            "[system]\nname='g'\nindependent=['t','x']\ndependent=['u']\n[params]\np={p}\n[[equation]]\nlead='u_t'\nrhs='-u^p*u_x - u_xxx'\n[scaling]\nt=3\nx=1\nu='-2/p'\n"
        );
        PdeSystem::from_toml(&text, &[]).unwrap()
    }

    fn cur(s: &PdeSystem, t: &str, x: &str) -> Current {
        Current { t: s.parse(t).unwrap(), x: vec![s.parse(x).unwrap()] }
    }

    #[test]
    fn homotopy_currents() {
        let s = gkdv(3);
        let q = vec![s.parse("u").unwrap()];
        let c = current_from_multiplier_homotopy(&s, &q, &[]).unwrap();
        assert_eq!(c.current, cur(&s, "1/2*u^2", "u^5/5 + u*u_xx - 1/2*u_x^2"));
        assert!(verify_characteristic(&s, &c.current, &q).unwrap().passed());
        assert_eq!(multiplier_from_current(&s, &c.current).unwrap(), q);
        let bad = cur(&s, "u", "0");
        assert!(!verify_conservation(&s, &bad).unwrap().passed());
    }

    #[test]
    fn scaling_currents() {
        let s = gkdv(3);
        let q = vec![Expr::one()];
        let c = current_from_multiplier_scaling(&s, &q, &s.scalings[0]).unwrap();
        assert_eq!(c.omega, Some(Coeff::from(Q::new(1.into(), 3.into()))));
        assert!(verify_conservation(&s, &c.current).unwrap().passed());
        let h = current_from_multiplier_homotopy(&s, &q, &[]).unwrap();
        assert!(current_equivalence(&s, &c.current, &h.current).unwrap().equivalent());
        let s2 = gkdv(2);
        assert_eq!(current_from_multiplier_scaling(&s2, &q, &s2.scalings[0]).unwrap_err(), Error::CriticalWeight);
    }

    #[test]
    fn direct_and_equivalence() {
        let s = gkdv(1);
        let q = vec![s.parse("x - t*u").unwrap()];
        let basis = DirectBasis::default_for(&s, &q, 3).unwrap();
        let d = current_from_multiplier_direct(&s, &q, &basis).unwrap();
        assert!(verify_characteristic(&s, &d.current, &q).unwrap().passed());
        let expected = cur(&s, "x*u - 1/2*t*u^2", "t*(1/2*u_x^2 - u*u_xx - 1/3*u^3) + x*(u_xx + 1/2*u^2) - u_x");
        assert!(current_equivalence(&s, &d.current, &expected).unwrap().equivalent());
        let one = cur(&s, "u", "1/2*u^2 + u_xx");
        let two = cur(&s, "2*u", "u^2 + 2*u_xx");
        assert!(!current_equivalence(&s, &one, &two).unwrap().equivalent());
        assert!(current_equivalence(&s, &one, &one).unwrap().equivalent());
    }
}
