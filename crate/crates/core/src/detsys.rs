//! Determining equations for symmetries, adjoint-symmetries, multipliers and
//! variational symmetries, gauge multipliers, triviality, and the exact
//! linear-ansatz solver.

use std::collections::BTreeMap;

use rayon::prelude::*;
use smallvec::SmallVec;

use crate::coeff::{Coeff, Q};
use crate::error::{Error, Result};
use crate::expr::{Expr, JetVar, Monomial, ZeroTest};
use crate::linalg::{Row, Rref};
use crate::oracle::{decide, Verdict, DEFAULT_POINTS};
use crate::pde_system::PdeSystem;
use crate::space::JetSpace;
use crate::varcalc::{frechet, frechet_adjoint, higher_euler, higher_euler_indices, neg_total_derivative};

fn check_len(v: &[Expr], n: usize, what: &str) -> Result<()> {
    if v.len() != n {
        return Err(Error::Dimension(format!("{what} has {} component(s), expected {n}", v.len())));
    }
    Ok(())
}

/// `frechet(G^a, P)|_E` per equation.
pub fn symmetry_residual(sys: &PdeSystem, p: &[Expr]) -> Result<Vec<Expr>> {
    check_len(p, sys.m(), "characteristic")?;
    sys.gs().iter().map(|g| sys.restrict(&frechet(g, p, &sys.space))).collect()
}

/// Adjoint linearization of `G` applied to `Q`, per dependent variable,
/// before restriction.
pub fn adjoint_linearization(sys: &PdeSystem, q: &[Expr]) -> Result<Vec<Expr>> {
    check_len(q, sys.n_eq(), "multiplier")?;
    let sp = &sys.space;
    let mut out = vec![Expr::zero(); sys.m()];
    for (g, qa) in sys.gs().iter().zip(q) {
        if qa.is_zero() {
            continue;
        }
        for (o, c) in out.iter_mut().zip(frechet_adjoint(g, qa, sp)) {
            *o = o.add(&c);
        }
    }
    Ok(out)
}

pub fn adjoint_symmetry_residual(sys: &PdeSystem, q: &[Expr]) -> Result<Vec<Expr>> {
    adjoint_linearization(sys, q)?.iter().map(|e| sys.restrict(e)).collect()
}

/// `E_u(G . Q)`, required to vanish identically in jet space.
pub fn multiplier_residual(sys: &PdeSystem, q: &[Expr]) -> Result<Vec<Expr>> {
    check_len(q, sys.n_eq(), "multiplier")?;
    let f = Expr::sum_owned(sys.gs().iter().zip(q).map(|(g, qa)| g.mul(qa)));
    Ok(crate::varcalc::euler(&f, &sys.space))
}

pub fn verify_multiplier(sys: &PdeSystem, q: &[Expr]) -> Result<Verdict> {
    Ok(decide(multiplier_residual(sys, q)?, &sys.space, DEFAULT_POINTS, 7))
}

/// `frechet(G, P)^t + adjoint linearization of P applied to G`, identically.
pub fn variational_symmetry_residual(sys: &PdeSystem, p: &[Expr]) -> Result<Vec<Expr>> {
    check_len(p, sys.m(), "characteristic")?;
    if sys.n_eq() != sys.m() {
        return Err(Error::Dimension("variational symmetries need a square system".into()));
    }
    let sp = &sys.space;
    let gs = sys.gs();
    let mut out: Vec<Expr> = gs.iter().map(|g| frechet(g, p, sp)).collect();
    for (pb, gb) in p.iter().zip(&gs) {
        for (o, c) in out.iter_mut().zip(frechet_adjoint(pb, gb, sp)) {
            *o = o.add(&c);
        }
    }
    Ok(out)
}

/// One coefficient `R^{(K)}_{a b} + (-1)^|K| E^{(K)}_{u^a}(Q_b)`, restricted.
#[derive(Clone, Debug)]
pub struct SplitResidual {
    pub variable: usize,
    pub equation: usize,
    pub index: SmallVec<[u8; 4]>,
    pub residual: Expr,
}

#[derive(Clone, Debug)]
pub struct TypeSplit {
    /// Restricted adjoint-symmetry residual per dependent variable.
    pub adjoint: Vec<Expr>,
    pub adjoint_symmetry: bool,
    pub residuals: Vec<SplitResidual>,
    /// Terms of the adjoint linearization nonlinear in `G`.
    pub nonlinear: Vec<Expr>,
}

impl TypeSplit {
    pub fn multiplier(&self) -> bool {
        self.adjoint_symmetry && self.residuals.is_empty() && self.nonlinear.iter().all(|e| e.is_zero())
    }
}

/// Helmholtz-type conditions: lift the adjoint linearization off the
/// solution space and compare coefficients with the higher Euler operators
/// of `Q`. Under differential identities the lift is one representative
/// among those differing by the identity operator.
pub fn helmholtz_type_split(sys: &PdeSystem, q: &[Expr]) -> Result<TypeSplit> {
    let sp = &sys.space;
    let a = adjoint_linearization(sys, q)?;
    let mut adjoint = Vec::new();
    let mut residuals = Vec::new();
    let mut nonlinear = Vec::new();
    for (alpha, aa) in a.iter().enumerate() {
        let lift = sys.lift_off_solution_space(aa)?;
        adjoint.push(lift.restricted.clone());
        nonlinear.push(lift.nonlinear.clone());
        let mut keys: Vec<(usize, SmallVec<[u8; 4]>)> = lift.terms.iter().map(|(b, k, _)| (*b, k.clone())).collect();
        for (b, qb) in q.iter().enumerate() {
            keys.push((b, SmallVec::from_elem(0, sys.n_indep())));
            for k in higher_euler_indices(qb, alpha as u16) {
                keys.push((b, k));
            }
        }
        keys.sort_by(|x, y| (x.0, JetVar { dep: 0, idx: x.1.clone() }).cmp(&(y.0, JetVar { dep: 0, idx: y.1.clone() })));
        keys.dedup();
        for (b, k) in keys {
            let r = lift.terms.iter().find(|(bb, kk, _)| *bb == b && *kk == k).map(|x| x.2.clone()).unwrap_or_else(Expr::zero);
            let he = higher_euler(&q[b], alpha as u16, &k, sp);
            let order: u32 = k.iter().map(|&x| x as u32).sum();
            let total = if order % 2 == 0 { r.add(&he) } else { r.sub(&he) };
            let total = sys.restrict(&total)?;
            if total.zero_test() != ZeroTest::Zero {
                residuals.push(SplitResidual { variable: alpha, equation: b, index: k, residual: total });
            }
        }
    }
    let adjoint_symmetry = adjoint.iter().all(|e| e.zero_test() == ZeroTest::Zero);
    Ok(TypeSplit { adjoint, adjoint_symmetry, residuals, nonlinear })
}

/// `Q = D*(chi)`: the adjoint of the identity operators applied to one
/// function per identity.
pub fn gauge_multiplier(sys: &PdeSystem, chi: &[Expr]) -> Result<Vec<Expr>> {
    if sys.identities.is_empty() {
        return Err(Error::NoIdentity);
    }
    check_len(chi, sys.identities.len(), "gauge function")?;
    let sp = &sys.space;
    let mut q = vec![Expr::zero(); sys.n_eq()];
    for (id, c) in sys.identities.iter().zip(chi) {
        for t in &id.terms {
            q[t.eq] = q[t.eq].add(&neg_total_derivative(&t.coeff.mul(c), &t.deriv, sp));
        }
    }
    Ok(q)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Triviality {
    Trivial { witness: Option<Vec<Expr>> },
    NonTrivial,
    Undetermined,
}

/// Trivial iff `Q` vanishes on solutions, or, with identities, iff
/// `Q - D*(chi)` does for some `chi` in the ansatz (default: constants).
pub fn triviality_check(sys: &PdeSystem, q: &[Expr], chi: Option<&LinearAnsatz>) -> Result<Triviality> {
    check_len(q, sys.n_eq(), "multiplier")?;
    let rq: Vec<Expr> = q.iter().map(|e| sys.restrict(e)).collect::<Result<_>>()?;
    let v = decide(rq.clone(), &sys.space, DEFAULT_POINTS, 11);
    if v.passed() {
        return Ok(Triviality::Trivial { witness: None });
    }
    if sys.identities.is_empty() {
        return Ok(match v.outcome {
            crate::oracle::Outcome::Undetermined => Triviality::Undetermined,
            _ => Triviality::NonTrivial,
        });
    }
    let nid = sys.identities.len();
    let default;
    let ans = match chi {
        Some(a) => a,
        None => {
            default = LinearAnsatz::per_slot(&[Expr::one()], nid);
            &default
        }
    };
    let cols: Vec<Vec<Expr>> = ans
        .basis
        .par_iter()
        .map(|b| gauge_multiplier(sys, b).and_then(|g| g.iter().map(|e| sys.restrict(e)).collect::<Result<Vec<_>>>()))
        .collect::<Result<_>>()?;
    let sol = match solve_columns(&cols, Some(&rq), Some(&sys.space)) {
        Ok(s) => s,
        Err(Error::Inconsistent(_)) => return Ok(Triviality::NonTrivial),
        Err(Error::NonLinearResidual(_)) => return Ok(Triviality::Undetermined),
        Err(e) => return Err(e),
    };
    let c = sol.particular.expect("consistent");
    Ok(Triviality::Trivial { witness: Some(ans.combine(&c)) })
}

/// Candidates `sum_i c_i basis_i`, each basis element a full vector.
#[derive(Clone, Debug)]
pub struct LinearAnsatz {
    pub basis: Vec<Vec<Expr>>,
}

impl LinearAnsatz {
    /// Every scalar expression placed in every slot of a `len`-vector.
    pub fn per_slot(scalars: &[Expr], len: usize) -> LinearAnsatz {
        let mut basis = Vec::new();
        for slot in 0..len {
            for s in scalars {
                let mut v = vec![Expr::zero(); len];
                v[slot] = s.clone();
                basis.push(v);
            }
        }
        LinearAnsatz { basis }
    }

    pub fn scalar(scalars: &[Expr]) -> LinearAnsatz {
        LinearAnsatz::per_slot(scalars, 1)
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn combine(&self, c: &[Q]) -> Vec<Expr> {
        let n = self.basis.first().map(|b| b.len()).unwrap_or(0);
        (0..n)
            .map(|k| Expr::sum_owned(self.basis.iter().zip(c).map(|(b, ci)| b[k].scale_q(ci))))
            .collect()
    }

    /// No basis element mentions a lead or lead derivative.
    pub fn avoids_leads(&self, sys: &PdeSystem) -> bool {
        self.basis.iter().flatten().all(|e| e.jet_vars().iter().all(|v| !sys.is_descendant(v)))
    }
}

/// Monomials `prod b_i^{k_i}` over `bases` with per-base maximal exponent
/// and a cap on the total degree in jet variables.
pub fn monomial_basis(bases: &[(Expr, u32)], max_jet_degree: u32) -> Vec<Expr> {
    let mut out = vec![(Expr::one(), 0u32)];
    for (b, max) in bases {
        let is_jet = b.as_jet().is_some();
        let mut next = Vec::new();
        for (e, d) in &out {
            let mut p = Expr::one();
            for k in 0..=*max {
                let nd = if is_jet { d + k } else { *d };
                if nd > max_jet_degree {
                    break;
                }
                next.push((e.mul(&p), nd));
                p = p.mul(b);
            }
        }
        out = next;
    }
    out.into_iter().map(|x| x.0).collect()
}

/// Polynomial basis over `t, x^i` (degree <= 1 each) and the low-order
/// variables of the system (total jet degree <= `degree`).
pub fn default_basis(sys: &PdeSystem, degree: u32) -> Vec<Expr> {
    let mut bases: Vec<(Expr, u32)> = (0..sys.n_indep()).map(|i| (Expr::indep(i), 1)).collect();
    for v in sys.low_order_variables() {
        bases.push((Expr::jet(v), degree));
    }
    monomial_basis(&bases, degree)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    Multipliers,
    AdjointSymmetries,
    Symmetries,
    Variational,
}

impl Target {
    pub fn parse(s: &str) -> Option<Target> {
        match s {
            "multipliers" | "multiplier" => Some(Target::Multipliers),
            "adjoint-symmetries" | "adjoint" => Some(Target::AdjointSymmetries),
            "symmetries" | "symmetry" => Some(Target::Symmetries),
            "variational" => Some(Target::Variational),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Target::Multipliers => "multipliers",
            Target::AdjointSymmetries => "adjoint-symmetries",
            Target::Symmetries => "symmetries",
            Target::Variational => "variational",
        }
    }

    pub fn len(&self, sys: &PdeSystem) -> usize {
        match self {
            Target::Multipliers | Target::AdjointSymmetries => sys.n_eq(),
            Target::Symmetries | Target::Variational => sys.m(),
        }
    }

    pub fn residual(&self, sys: &PdeSystem, v: &[Expr]) -> Result<Vec<Expr>> {
        match self {
            Target::Multipliers => multiplier_residual(sys, v),
            Target::AdjointSymmetries => adjoint_symmetry_residual(sys, v),
            Target::Symmetries => symmetry_residual(sys, v),
            Target::Variational => variational_symmetry_residual(sys, v),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolutionSet {
    pub unknowns: usize,
    pub equations: usize,
    pub rank: usize,
    /// Coefficient vectors spanning the solutions.
    pub coefficients: Vec<Vec<Q>>,
    /// The corresponding candidates.
    pub elements: Vec<Vec<Expr>>,
}

pub(crate) struct ColumnSolve {
    pub rref: Rref,
    pub equations: usize,
    pub particular: Option<Vec<Q>>,
}

fn numeric(c: &Coeff, sp: Option<&JetSpace>) -> Result<Q> {
    c.as_rational().ok_or_else(|| {
        let txt = sp.map(|s| crate::expr::show_coeff(c, s)).unwrap_or_else(|| format!("{c:?}"));
        Error::NonLinearResidual(format!("symbolic coefficient {txt}"))
    }).cloned()
}

/// Split `sum_i c_i cols_i = rhs` over monomials (per component) and row
/// reduce.
pub(crate) fn solve_columns(cols: &[Vec<Expr>], rhs: Option<&[Expr]>, sp: Option<&JetSpace>) -> Result<ColumnSolve> {
    let mut rows: BTreeMap<(usize, Monomial), Row> = BTreeMap::new();
    for (j, col) in cols.iter().enumerate() {
        for (k, e) in col.iter().enumerate() {
            for (m, c) in e.terms() {
                let r = rows.entry((k, m.clone())).or_default();
                r.coeffs.insert(j, numeric(c, sp)?);
            }
        }
    }
    if let Some(rhs) = rhs {
        for (k, e) in rhs.iter().enumerate() {
            for (m, c) in e.terms() {
                rows.entry((k, m.clone())).or_default().rhs = numeric(c, sp)?;
            }
        }
    }
    let equations = rows.len();
    let mut unmatched = Vec::new();
    let mut rref = Rref::new(cols.len());
    for ((k, m), row) in rows {
        let before = rref.consistent;
        rref.push(row);
        if before && !rref.consistent {
            unmatched.push((k, m));
        }
    }
    if rhs.is_some() && !rref.consistent {
        let txt: Vec<String> =
            unmatched
            .iter()
            .map(|(k, m)| {
                let t = Expr::term(Coeff::one(), m.clone());
                match sp {
                    Some(sp) => format!("[{k}] {}", t.show(sp)),
                    None => format!("[{k}] {t:?}"),
                }
            })
            .collect();
        return Err(Error::Inconsistent(txt.join(", ")));
    }
    let particular = rref.particular();
    Ok(ColumnSolve { rref, equations, particular })
}

/// Solve for all `c` with `residual(sum c_i basis_i) = 0` identically, by
/// splitting the residual over jet-space monomials.
pub fn solve_linear_ansatz(sys: &PdeSystem, target: Target, ansatz: &LinearAnsatz) -> Result<SolutionSet> {
    if ansatz.is_empty() {
        return Err(Error::EmptyBasis);
    }
    if let Some(p) = sys.space.free_params().first() {
        return Err(Error::FreeParameter(p.to_string()));
    }
    let len = target.len(sys);
    for b in &ansatz.basis {
        check_len(b, len, "ansatz element")?;
    }
    let cols: Vec<Vec<Expr>> = ansatz.basis.par_iter().map(|b| target.residual(sys, b)).collect::<Result<_>>()?;
    for col in &cols {
        for e in col {
            if let Some((_, c)) = e.terms().find(|(_, c)| c.as_rational().is_none()) {
                return Err(Error::NonLinearResidual(format!("symbolic coefficient {}", crate::expr::show_coeff(c, &sys.space))));
            }
        }
    }
    let s = solve_columns(&cols, None, Some(&sys.space))?;
    let coefficients = s.rref.nullspace();
    let elements = coefficients.iter().map(|c| ansatz.combine(c)).collect();
    Ok(SolutionSet { unknowns: ansatz.len(), equations: s.equations, rank: s.rref.rank(), coefficients, elements })
}

/// Whether two lists of vectors span the same space over the rationals.
pub fn same_span(a: &[Vec<Expr>], b: &[Vec<Expr>]) -> bool {
    let rank = |v: &[Vec<Expr>]| -> Option<usize> { solve_columns(v, None, None).ok().map(|s| s.rref.rank()) };
    let mut both = a.to_vec();
    both.extend(b.iter().cloned());
    match (rank(a), rank(b), rank(&both)) {
        (Some(x), Some(y), Some(z)) => x == y && y == z,
        _ => false,
    }
}

/// Whether `v` lies in the span of `basis`.
pub fn in_span(basis: &[Vec<Expr>], v: &[Expr]) -> bool {
    solve_columns(basis, Some(v), None).is_ok()
}


#[cfg(test)]
mod tests {
    use super::*;

    fn gkdv(p: i64) -> PdeSystem {
        let sp = JetSpace::new(&["t", "x"], &["u"]).with_param("p", Q::from_integer(p.into()));
        PdeSystem::from_equations("gkdv", sp, &[("u_t", "-u^p*u_x - u_xxx")]).unwrap()
    }

    fn v(s: &PdeSystem, e: &str) -> Vec<Expr> {
        vec![s.parse(e).unwrap()]
    }

    #[test]
    fn residuals() {
        let s = gkdv(2);
        assert!(symmetry_residual(&s, &v(&s, "-u_x")).unwrap()[0].is_zero());
        assert!(symmetry_residual(&s, &v(&s, "-(u + 3*t*u_t + x*u_x)")).unwrap()[0].is_zero());
        assert!(!symmetry_residual(&s, &v(&s, "u")).unwrap()[0].is_zero());
        assert!(adjoint_symmetry_residual(&s, &v(&s, "u_xx + u^3/3")).unwrap()[0].is_zero());
        assert!(!adjoint_symmetry_residual(&s, &v(&s, "u_x")).unwrap()[0].is_zero());
        assert!(verify_multiplier(&s, &v(&s, "t*(3*u_xx + u^3) - x*u")).unwrap().passed());
        assert!(!verify_multiplier(&s, &v(&s, "u_x")).unwrap().passed());
        assert!(verify_multiplier(&gkdv(1), &v(&gkdv(1), "x - t*u")).unwrap().passed());
    }

    #[test]
    fn type_split() {
        let s = gkdv(2);
        assert!(helmholtz_type_split(&s, &v(&s, "u_xx + u^3/3")).unwrap().multiplier());
        let bad = helmholtz_type_split(&s, &v(&s, "u_x")).unwrap();
        assert!(!bad.adjoint_symmetry);
    }

    #[test]
    fn solves_gkdv() {
        for (p, dim) in [(1, 4), (2, 4), (3, 3)] {
            let s = gkdv(p);
            let ans = LinearAnsatz::scalar(&default_basis(&s, 4));
            let sol = solve_linear_ansatz(&s, Target::Multipliers, &ans).unwrap();
            assert_eq!(sol.elements.len(), dim, "p = {p}");
        }
    }
}
