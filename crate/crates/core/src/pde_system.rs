//! PDE systems in solved form: loading, validation, restriction to the
//! solution space, lifting off it, and low-order variable classification.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use serde::Deserialize;
use smallvec::SmallVec;

use crate::coeff::{Coeff, Q};
use crate::error::{Error, Result};
use crate::expr::{Base, Expr, JetVar, ZeroTest};
use crate::space::{FuncDecl, JetSpace, ParamDecl};

const RESTRICT_DEPTH: usize = 64;

#[derive(Clone, Debug)]
pub struct Equation {
    pub name: String,
    pub lead: JetVar,
    pub rhs: Expr,
}

/// One term `coeff * D^deriv G^eq` of a differential identity.
#[derive(Clone, Debug)]
pub struct IdentityTerm {
    pub eq: usize,
    pub coeff: Expr,
    pub deriv: SmallVec<[u8; 4]>,
}

/// Linear differential operator annihilating `G` identically.
#[derive(Clone, Debug)]
pub struct Identity {
    pub name: String,
    pub terms: Vec<IdentityTerm>,
}

/// Scaling `t -> e^(a s) t`, `x^i -> e^(b_i s) x^i`, `u^a -> e^(c_a s) u^a`.
#[derive(Clone, Debug)]
pub struct ScalingAction {
    pub name: String,
    pub indep: Vec<Coeff>,
    pub dep: Vec<Coeff>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expect {
    Conserved,
    NotConserved,
}

#[derive(Clone, Debug)]
pub struct NamedMultiplier {
    pub name: String,
    pub q: Vec<Expr>,
    pub expect: Expect,
}

#[derive(Clone, Debug)]
pub struct NamedCurrent {
    pub name: String,
    pub t: Expr,
    pub x: Vec<Expr>,
    pub method: String,
    pub multiplier: Option<Vec<Expr>>,
    pub expect: Expect,
}

pub struct PdeSystem {
    pub name: String,
    pub space: JetSpace,
    pub equations: Vec<Equation>,
    pub identities: Vec<Identity>,
    pub scalings: Vec<ScalingAction>,
    pub multipliers: Vec<NamedMultiplier>,
    pub currents: Vec<NamedCurrent>,
    /// Parameter bindings the known multipliers and currents were read under.
    pub conditions: Vec<BTreeMap<String, String>>,
    cache: Mutex<HashMap<JetVar, Expr>>,
}

impl Clone for PdeSystem {
    fn clone(&self) -> Self {
        PdeSystem {
            name: self.name.clone(),
            space: self.space.clone(),
            equations: self.equations.clone(),
            identities: self.identities.clone(),
            scalings: self.scalings.clone(),
            multipliers: self.multipliers.clone(),
            currents: self.currents.clone(),
            conditions: self.conditions.clone(),
            cache: Mutex::new(HashMap::new()),
        }
    }
}

impl std::fmt::Debug for PdeSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PdeSystem").field("name", &self.name).field("equations", &self.equations).finish()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub identities: Vec<ZeroTest>,
    pub evolution_form: bool,
}

/// Operator `R` with `e = e|_E + R(G)`, as `(equation, multi-index, coeff)`.
#[derive(Clone, Debug)]
pub struct Lift {
    pub restricted: Expr,
    pub terms: Vec<(usize, SmallVec<[u8; 4]>, Expr)>,
    pub nonlinear: Expr,
}

impl PdeSystem {
    pub fn new(name: &str, space: JetSpace, equations: Vec<Equation>) -> PdeSystem {
        PdeSystem {
            name: name.to_string(),
            space,
            equations,
            identities: Vec::new(),
            scalings: Vec::new(),
            multipliers: Vec::new(),
            currents: Vec::new(),
            conditions: Vec::new(),
            cache: Mutex::new(HashMap::new()),
        }
    }

    /// Build from `(lead, rhs)` strings.
    pub fn from_equations(name: &str, mut space: JetSpace, eqs: &[(&str, &str)]) -> Result<PdeSystem> {
        let mut out = Vec::new();
        for (i, (lead, rhs)) in eqs.iter().enumerate() {
            let lead = space.jet(lead)?;
            let rhs = space.parse_declaring(rhs)?;
            out.push(Equation { name: (i + 1).to_string(), lead, rhs });
        }
        Ok(PdeSystem::new(name, space, out))
    }

    pub fn m(&self) -> usize {
        self.space.n_dep()
    }

    pub fn n_eq(&self) -> usize {
        self.equations.len()
    }

    pub fn n_indep(&self) -> usize {
        self.space.n_indep()
    }

    /// `G^a = lead - rhs`.
    pub fn g(&self, a: usize) -> Expr {
        Expr::jet(self.equations[a].lead.clone()).sub(&self.equations[a].rhs)
    }

    pub fn gs(&self) -> Vec<Expr> {
        (0..self.n_eq()).map(|a| self.g(a)).collect()
    }

    /// Maximal differential order of the equations.
    pub fn order(&self) -> u32 {
        self.gs().iter().map(|g| g.max_order()).max().unwrap_or(0)
    }

    pub fn parse(&self, s: &str) -> Result<Expr> {
        self.space.parse(s)
    }

    pub fn show(&self, e: &Expr) -> String {
        e.show(&self.space)
    }

    pub fn equation_index(&self, name: &str) -> Option<usize> {
        self.equations.iter().position(|e| e.name == name)
    }

    pub fn is_descendant(&self, v: &JetVar) -> bool {
        self.lead_for(v).is_some()
    }

    fn lead_for(&self, v: &JetVar) -> Option<usize> {
        self.equations.iter().position(|e| v.descends_from(&e.lead))
    }

    pub fn validate(&self) -> Result<ValidationReport> {
        for (a, eq) in self.equations.iter().enumerate() {
            if eq.lead.idx.len() != self.n_indep() || (eq.lead.dep as usize) >= self.m() {
                return Err(Error::InvalidSystem(format!("equation {} has an invalid lead", eq.name)));
            }
            for v in eq.rhs.jet_vars() {
                if let Some(b) = self.lead_for(&v) {
                    return Err(Error::InvalidSystem(format!(
                        "equation {}: rhs contains {}, a derivative of the lead {} of equation {}",
                        self.equations[a].name,
                        self.space.jet_name(&v),
                        self.space.jet_name(&self.equations[b].lead),
                        self.equations[b].name
                    )));
                }
            }
        }
        let mut ids = Vec::new();
        for (k, id) in self.identities.iter().enumerate() {
            let r = self.apply_identity(id);
            let z = r.zero_test();
            if z == ZeroTest::NonZero {
                return Err(Error::IdentityResidual { index: k + 1, residual: truncate(&self.show(&r)) });
            }
            ids.push(z);
        }
        let mut seen = Vec::new();
        let mut evolution = true;
        for eq in &self.equations {
            let pure_t = eq.lead.idx[0] > 0 && eq.lead.idx[1..].iter().all(|&k| k == 0);
            if !pure_t || seen.contains(&eq.lead.dep) {
                evolution = false;
            }
            seen.push(eq.lead.dep);
        }
        Ok(ValidationReport { identities: ids, evolution_form: evolution })
    }

    /// `sum coeff * D^K G^a` for an identity row.
    pub fn apply_identity(&self, id: &Identity) -> Expr {
        let gs = self.gs();
        self.apply_operator(id, &gs)
    }

    pub fn apply_operator(&self, id: &Identity, v: &[Expr]) -> Expr {
        let parts: Vec<Expr> = id
            .terms
            .iter()
            .map(|t| t.coeff.mul(&v[t.eq].total_derivative_multi(&t.deriv, &self.space)))
            .collect();
        Expr::sum(parts.iter())
    }

    /// Restriction to the solution space: every lead and lead derivative is
    /// replaced by the corresponding derivative of its right-hand side.
    pub fn restrict(&self, e: &Expr) -> Result<Expr> {
        self.restrict_at(e, 0)
    }

    fn restrict_at(&self, e: &Expr, depth: usize) -> Result<Expr> {
        if depth > RESTRICT_DEPTH {
            return Err(Error::RestrictDiverged(truncate(&self.show(e))));
        }
        let mut map: HashMap<JetVar, Expr> = HashMap::new();
        for v in e.jet_vars() {
            if self.is_descendant(&v) {
                let r = self.reduced_var(&v, depth)?;
                map.insert(v, r);
            }
        }
        if map.is_empty() {
            return Ok(e.clone());
        }
        e.substitute(&map, &self.space)
    }

    fn reduced_var(&self, v: &JetVar, depth: usize) -> Result<Expr> {
        if let Some(r) = self.cache.lock().unwrap().get(v) {
            return Ok(r.clone());
        }
        let a = self.lead_for(v).expect("descendant");
        let lead = &self.equations[a].lead;
        let r = if v == lead {
            self.restrict_at(&self.equations[a].rhs, depth + 1)?
        } else {
            let i = (0..v.idx.len()).find(|&i| v.idx[i] > lead.idx[i]).unwrap();
            let w = v.lowered(i).unwrap();
            let rw = self.reduced_var(&w, depth + 1)?;
            self.restrict_at(&rw.total_derivative(i, &self.space), depth + 1)?
        };
        self.cache.lock().unwrap().insert(v.clone(), r.clone());
        Ok(r)
    }

    /// Space extended by one formal dependent variable per equation.
    pub fn lifted_space(&self) -> JetSpace {
        let names: Vec<String> = (0..self.n_eq()).map(|a| format!("Ghat{}", a + 1)).collect();
        self.space.extended(&names).0
    }

    /// Write `e = e|_E + R(G) + (terms nonlinear in G)`.
    pub fn lift_off_solution_space(&self, e: &Expr) -> Result<Lift> {
        let sp = self.lifted_space();
        let m = self.m() as u16;
        let mut cache: HashMap<JetVar, Expr> = HashMap::new();
        let lifted = self.lift_expr(e, &sp, &mut cache, 0)?;
        let mut restricted = Vec::new();
        let mut nonlinear = Vec::new();
        let mut terms: Vec<(usize, SmallVec<[u8; 4]>, Expr)> = Vec::new();
        for (mono, c) in lifted.terms() {
            let mut deg = 0i64;
            let mut hat: Option<(usize, JetVar)> = None;
            let mut nested = false;
            for (k, (b, x)) in mono.factors().enumerate() {
                match b {
                    Base::Jet(v) if v.dep >= m => {
                        deg += x.as_integer().filter(|&n| n > 0).unwrap_or(2);
                        hat = Some((k, v.clone()));
                    }
                    Base::Func(_) | Base::Comp(_) => {
                        let sub = Expr::base(b.clone());
                        if sub.jet_vars().iter().any(|v| v.dep >= m) {
                            nested = true;
                        }
                    }
                    _ => {}
                }
            }
            let t = Expr::term(c.clone(), mono.clone());
            if nested || deg >= 2 {
                nonlinear.push(t);
            } else if deg == 0 {
                restricted.push(t);
            } else {
                let (k, v) = hat.unwrap();
                let coeff = Expr::from_monomial(c.clone(), mono.without(k));
                let a = (v.dep - m) as usize;
                match terms.iter_mut().find(|(b, kk, _)| *b == a && kk[..] == v.idx[..]) {
                    Some(x) => x.2 = x.2.add(&coeff),
                    None => terms.push((a, v.idx.clone(), coeff)),
                }
            }
        }
        terms.retain(|x| !x.2.is_zero());
        terms.sort_by(|x, y| (x.0, JetVar { dep: 0, idx: x.1.clone() }).cmp(&(y.0, JetVar { dep: 0, idx: y.1.clone() })));
        Ok(Lift { restricted: Expr::sum(restricted.iter()), terms, nonlinear: Expr::sum(nonlinear.iter()) })
    }

    fn lift_expr(&self, e: &Expr, sp: &JetSpace, cache: &mut HashMap<JetVar, Expr>, depth: usize) -> Result<Expr> {
        if depth > RESTRICT_DEPTH {
            return Err(Error::RestrictDiverged(truncate(&self.show(e))));
        }
        let mut map = HashMap::new();
        for v in e.jet_vars() {
            if (v.dep as usize) < self.m() && self.is_descendant(&v) {
                let r = self.lifted_var(&v, sp, cache, depth)?;
                map.insert(v, r);
            }
        }
        e.substitute(&map, sp)
    }

    fn lifted_var(&self, v: &JetVar, sp: &JetSpace, cache: &mut HashMap<JetVar, Expr>, depth: usize) -> Result<Expr> {
        if let Some(r) = cache.get(v) {
            return Ok(r.clone());
        }
        let a = self.lead_for(v).unwrap();
        let lead = &self.equations[a].lead;
        let r = if v == lead {
            let hat = JetVar::base((self.m() + a) as u16, self.n_indep());
            self.lift_expr(&self.equations[a].rhs, sp, cache, depth + 1)?.add(&Expr::jet(hat))
        } else {
            let i = (0..v.idx.len()).find(|&i| v.idx[i] > lead.idx[i]).unwrap();
            let w = v.lowered(i).unwrap();
            let rw = self.lifted_var(&w, sp, cache, depth + 1)?;
            self.lift_expr(&rw.total_derivative(i, sp), sp, cache, depth + 1)?
        };
        cache.insert(v.clone(), r.clone());
        Ok(r)
    }

    /// Apply the lift operator to a vector indexed by equation.
    pub fn apply_lift(&self, lift: &Lift, v: &[Expr]) -> Expr {
        let parts: Vec<Expr> = lift
            .terms
            .iter()
            .map(|(a, k, c)| c.mul(&v[*a].total_derivative_multi(k, &self.space)))
            .collect();
        Expr::sum(parts.iter())
    }

    /// Leads plus alternative leads: jet variables appearing linearly in an
    /// equation with no other variable of that equation derived from them.
    pub fn alternative_leads(&self) -> Vec<JetVar> {
        let mut out: Vec<JetVar> = Vec::new();
        for (a, eq) in self.equations.iter().enumerate() {
            if !out.contains(&eq.lead) {
                out.push(eq.lead.clone());
            }
            let g = self.g(a);
            let vars = g.jet_vars();
            for v in &vars {
                if vars.iter().any(|w| w != v && w.descends_from(v)) {
                    continue;
                }
                let linear = g.terms().all(|(m, _)| match m.exponent_of(&Base::Jet(v.clone())) {
                    None => true,
                    Some(e) => e.is_one(),
                }) && !g.terms().any(|(m, _)| {
                    m.factors().any(|(b, _)| matches!(b, Base::Func(_) | Base::Comp(_)) && Expr::base(b.clone()).mentions_jet(v))
                });
                if linear && !out.contains(v) {
                    out.push(v.clone());
                }
            }
        }
        out
    }

    /// Jet variables of order below the system order from which some lead
    /// (or alternative lead) is reached by differentiation.
    pub fn low_order_variables(&self) -> Vec<JetVar> {
        let n = self.order();
        let mut out: Vec<JetVar> = Vec::new();
        for lead in self.alternative_leads() {
            for v in below(&lead) {
                if v.order() < n && !self.is_descendant(&v) && !out.contains(&v) {
                    out.push(v);
                }
            }
        }
        out.sort();
        out
    }

    /// Bind free parameters by name, reparsing nothing: expressions already
    /// parsed keep symbolic coefficients, which are substituted here.
    pub fn bind_params(&self, vals: &[(String, Q)]) -> Result<PdeSystem> {
        let mut s = self.clone();
        s.space.bind_params(vals)?;
        let sp = s.space.clone();
        let bind = |e: &Expr| e.bind_space_params(&sp);
        for eq in &mut s.equations {
            eq.rhs = bind(&eq.rhs)?;
        }
        for id in &mut s.identities {
            for t in &mut id.terms {
                t.coeff = bind(&t.coeff)?;
            }
        }
        for sc in &mut s.scalings {
            for c in sc.indep.iter_mut().chain(sc.dep.iter_mut()) {
                *c = c.subst(&|p| sp.param_value(p))?;
            }
        }
        for m in &mut s.multipliers {
            m.q = m.q.iter().map(bind).collect::<Result<_>>()?;
        }
        for c in &mut s.currents {
            c.t = bind(&c.t)?;
            c.x = c.x.iter().map(bind).collect::<Result<_>>()?;
            if let Some(q) = &c.multiplier {
                c.multiplier = Some(q.iter().map(bind).collect::<Result<_>>()?);
            }
        }
        Ok(s)
    }

    pub fn scaling(&self, name: Option<&str>) -> Result<&ScalingAction> {
        match name {
            None => self.scalings.first().ok_or_else(|| Error::UnknownScaling("(none declared)".into())),
            Some(n) => self.scalings.iter().find(|s| s.name == n).ok_or_else(|| Error::UnknownScaling(n.into())),
        }
    }

    /// Parse a multiplier given as one string per equation.
    pub fn parse_vector(&self, parts: &[String], len: usize) -> Result<Vec<Expr>> {
        if parts.len() != len {
            return Err(Error::Dimension(format!("expected {len} component(s), found {}", parts.len())));
        }
        parts.iter().map(|s| self.parse(s)).collect()
    }
}

/// All jet variables strictly below `v` (same dependent variable).
fn below(v: &JetVar) -> Vec<JetVar> {
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
    out.retain(|w| w != v);
    out
}

pub(crate) fn truncate(s: &str) -> String {
    if s.len() > 400 {
        let mut end = 400;
        while !s.is_char_boundary(end) {
            end -= 1;
        }
        format!("{} ...", &s[..end])
    } else {
        s.to_string()
    }
}

// ---- file format ----

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FileSpec {
    system: Header,
    #[serde(default)]
    params: BTreeMap<String, toml::Value>,
    #[serde(default)]
    functions: BTreeMap<String, FuncSpec>,
    #[serde(default)]
    equation: Vec<EqSpec>,
    #[serde(default)]
    identity: Vec<IdSpec>,
    #[serde(default)]
    scaling: Option<toml::Value>,
    #[serde(default)]
    multiplier: Vec<MultSpec>,
    #[serde(default)]
    current: Vec<CurSpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    name: String,
    independent: Vec<String>,
    dependent: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FuncSpec {
    args: Vec<String>,
    #[serde(default)]
    derivative: Vec<String>,
    sample: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EqSpec {
    name: Option<String>,
    lead: String,
    rhs: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IdSpec {
    name: Option<String>,
    terms: Vec<IdTermSpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IdTermSpec {
    equation: toml::Value,
    #[serde(default)]
    coeff: Option<String>,
    #[serde(default)]
    deriv: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MultSpec {
    name: String,
    #[serde(rename = "Q")]
    q: Vec<String>,
    #[serde(default)]
    expect: Option<String>,
    #[serde(default)]
    when: BTreeMap<String, toml::Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CurSpec {
    name: String,
    #[serde(rename = "T")]
    t: String,
    #[serde(rename = "X")]
    x: Vec<String>,
    #[serde(default)]
    method: Option<String>,
    #[serde(default)]
    multiplier: Option<Vec<String>>,
    #[serde(default)]
    expect: Option<String>,
    #[serde(default)]
    when: BTreeMap<String, toml::Value>,
}

fn value_text(v: &toml::Value) -> Result<String> {
    match v {
        toml::Value::Integer(i) => Ok(i.to_string()),
        toml::Value::String(s) => Ok(s.clone()),
        other => Err(Error::Format(format!("expected a number or string, found {other}"))),
    }
}

/// Parse a rational literal like `2`, `-2/3`.
pub fn parse_rational(s: &str) -> Result<Q> {
    let sp = JetSpace::default();
    let e = sp.parse(s)?;
    match e.as_constant() {
        Some(Coeff::Num(q)) => Ok(q),
        _ => Err(Error::Format(format!("`{s}` is not a rational number"))),
    }
}

fn parse_expect(s: &Option<String>) -> Result<Expect> {
    match s.as_deref() {
        None | Some("conserved") | Some("multiplier") | Some("pass") => Ok(Expect::Conserved),
        Some("not_conserved") | Some("not_multiplier") | Some("fail") => Ok(Expect::NotConserved),
        Some(o) => Err(Error::Format(format!("unknown expect value `{o}`"))),
    }
}

impl PdeSystem {
    pub fn load(path: &std::path::Path, overrides: &[(String, Q)]) -> Result<PdeSystem> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        PdeSystem::from_toml(&text, overrides)
    }

    /// Parameter sets named in `when` clauses of the file.
    pub fn conditions_in(text: &str) -> Result<Vec<Vec<(String, Q)>>> {
        let file: FileSpec = toml::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        let mut out: Vec<Vec<(String, Q)>> = Vec::new();
        let whens = file.multiplier.iter().map(|m| &m.when).chain(file.current.iter().map(|c| &c.when));
        for w in whens {
            if w.is_empty() {
                continue;
            }
            let mut set = Vec::new();
            for (k, v) in w {
                set.push((k.clone(), parse_rational(&value_text(v)?)?));
            }
            if !out.contains(&set) {
                out.push(set);
            }
        }
        Ok(out)
    }

    /// Load a system file. Known multipliers and currents carrying a `when`
    /// clause are kept only when every listed parameter is bound to the
    /// listed value.
    pub fn from_toml(text: &str, overrides: &[(String, Q)]) -> Result<PdeSystem> {
        let file: FileSpec = toml::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        let indep: Vec<&str> = file.system.independent.iter().map(|s| s.as_str()).collect();
        let dep: Vec<&str> = file.system.dependent.iter().map(|s| s.as_str()).collect();
        let mut sp = JetSpace::new(&indep, &dep);
        for (name, v) in &file.params {
            let value = match v {
                toml::Value::String(s) if s == "free" => None,
                v => Some(parse_rational(&value_text(v)?)?),
            };
            sp.params.push(ParamDecl { name: name.clone(), value });
        }
        for (n, v) in overrides {
            let i = sp.param_index(n).ok_or_else(|| Error::Undeclared(n.clone()))?;
            sp.params[i as usize].value = Some(v.clone());
        }
        for (name, f) in &file.functions {
            sp.declare_function(name, f.args.len());
        }
        for (name, f) in &file.functions {
            let id = sp.func_index(name).unwrap() as usize;
            let (formals, fsp) = formal_space(&sp, &f.args)?;
            let mut rules = vec![None; f.args.len()];
            if !f.derivative.is_empty() {
                if f.derivative.len() != f.args.len() {
                    return Err(Error::Format(format!("function {name}: one derivative per argument expected")));
                }
                for (k, r) in f.derivative.iter().enumerate() {
                    if !r.trim().is_empty() {
                        rules[k] = Some(fsp.parse(r)?);
                    }
                }
            }
            let sample = match &f.sample {
                Some(s) => Some(fsp.parse(s)?),
                None => None,
            };
            sp.funcs[id] = FuncDecl { name: name.clone(), arity: f.args.len(), formals, rules, sample };
        }
        let mut eqs = Vec::new();
        for (i, e) in file.equation.iter().enumerate() {
            let lead = sp.jet(&e.lead)?;
            let rhs = sp.parse(&e.rhs)?;
            eqs.push(Equation { name: e.name.clone().unwrap_or_else(|| (i + 1).to_string()), lead, rhs });
        }
        if eqs.is_empty() {
            return Err(Error::InvalidSystem("no equations".into()));
        }
        let mut sys = PdeSystem::new(&file.system.name, sp, eqs);
        for (k, id) in file.identity.iter().enumerate() {
            let mut terms = Vec::new();
            for t in &id.terms {
                let eq = match &t.equation {
                    toml::Value::Integer(i) if *i >= 1 && (*i as usize) <= sys.n_eq() => *i as usize - 1,
                    toml::Value::String(s) => sys
                        .equation_index(s)
                        .ok_or_else(|| Error::Format(format!("identity refers to unknown equation `{s}`")))?,
                    v => return Err(Error::Format(format!("bad equation reference {v}"))),
                };
                let coeff = sys.parse(t.coeff.as_deref().unwrap_or("1"))?;
                let deriv = sys.space.jet_with_suffix(0, t.deriv.as_deref().unwrap_or(""))?.idx;
                terms.push(IdentityTerm { eq, coeff, deriv });
            }
            sys.identities.push(Identity { name: id.name.clone().unwrap_or_else(|| (k + 1).to_string()), terms });
        }
        if let Some(v) = &file.scaling {
            let tables: Vec<toml::Value> = match v {
                toml::Value::Array(a) => a.clone(),
                t @ toml::Value::Table(_) => vec![t.clone()],
                _ => return Err(Error::Format("scaling must be a table or array of tables".into())),
            };
            for (k, t) in tables.iter().enumerate() {
                sys.scalings.push(parse_scaling(&sys.space, t, k)?);
            }
        }
        let bound = |w: &BTreeMap<String, toml::Value>| -> Result<bool> {
            for (k, v) in w {
                let want = parse_rational(&value_text(v)?)?;
                let i = sys.space.param_index(k).ok_or_else(|| Error::Undeclared(k.clone()))?;
                if sys.space.param_value(i) != Some(want) {
                    return Ok(false);
                }
            }
            Ok(true)
        };
        let mut mults = Vec::new();
        for m in &file.multiplier {
            if !bound(&m.when)? {
                continue;
            }
            let q = sys.parse_vector(&m.q, sys.n_eq())?;
            mults.push(NamedMultiplier { name: m.name.clone(), q, expect: parse_expect(&m.expect)? });
        }
        let mut curs = Vec::new();
        for c in &file.current {
            if !bound(&c.when)? {
                continue;
            }
            let t = sys.parse(&c.t)?;
            let x = sys.parse_vector(&c.x, sys.n_indep() - 1)?;
            let multiplier = match &c.multiplier {
                Some(q) => Some(sys.parse_vector(q, sys.n_eq())?),
                None => None,
            };
            curs.push(NamedCurrent {
                name: c.name.clone(),
                t,
                x,
                method: c.method.clone().unwrap_or_else(|| "user".into()),
                multiplier,
                expect: parse_expect(&c.expect)?,
            });
        }
        sys.multipliers = mults;
        sys.currents = curs;
        sys.validate()?;
        Ok(sys)
    }
}

/// Formal argument bases for a function declaration. Names that are not
/// variables of the space become scratch dependent variables.
fn formal_space(sp: &JetSpace, args: &[String]) -> Result<(Vec<Base>, JetSpace)> {
    let mut fsp = sp.clone();
    let mut formals = Vec::new();
    for a in args {
        if let Some(i) = sp.indep_index(a) {
            formals.push(Base::Indep(i as u8));
        } else if let Ok(v) = sp.jet(a) {
            formals.push(Base::Jet(v));
        } else {
            fsp.dep.push(a.clone());
            formals.push(Base::Jet(JetVar::base((fsp.dep.len() - 1) as u16, sp.n_indep())));
        }
    }
    Ok((formals, fsp))
}

fn parse_scaling(sp: &JetSpace, t: &toml::Value, k: usize) -> Result<ScalingAction> {
    let tab = t.as_table().ok_or_else(|| Error::Format("scaling entry must be a table".into()))?;
    let (name, weights) = match tab.get("weights") {
        Some(w) => (
            tab.get("name").and_then(|n| n.as_str()).map(|s| s.to_string()).unwrap_or_else(|| format!("s{}", k + 1)),
            w.as_table().ok_or_else(|| Error::Format("weights must be a table".into()))?.clone(),
        ),
        None => {
            let mut w = tab.clone();
            let name = w.remove("name").and_then(|n| n.as_str().map(|s| s.to_string())).unwrap_or_else(|| format!("s{}", k + 1));
            (name, w)
        }
    };
    let mut indep = vec![Coeff::zero(); sp.n_indep()];
    let mut dep = vec![Coeff::zero(); sp.n_dep()];
    for (key, v) in &weights {
        let e = sp.parse(&value_text(v)?)?;
        let c = e.as_constant().ok_or_else(|| Error::Format(format!("scaling weight for {key} must be constant")))?;
        if let Some(i) = sp.indep_index(key) {
            indep[i] = c;
        } else if let Some(a) = sp.dep_index(key) {
            dep[a as usize] = c;
        } else if sp.param_index(key).is_none() {
            return Err(Error::Undeclared(key.clone()));
        }
    }
    Ok(ScalingAction { name, indep, dep })
}

#[cfg(test)]
mod tests {
    use super::*;

    const GKDV: &str = r#"
[system]
name = "gkdv"
independent = ["t", "x"]
dependent = ["u"]
[params]
p = "free"
[[equation]]
lead = "u_t"
rhs = "-u^p*u_x - u_xxx"
[scaling]
t = 3
x = 1
u = "-2/p"
"#;

    #[test]
    fn gkdv_restricts() {
        let s = PdeSystem::from_toml(GKDV, &[]).unwrap();
        let rep = s.validate().unwrap();
        assert!(rep.evolution_form);
        assert!(s.restrict(&s.g(0)).unwrap().is_zero());
        let e = s.parse("x*u_xx").unwrap();
        assert_eq!(s.restrict(&e).unwrap(), e);
        let r = s.restrict(&s.parse("u_txx").unwrap()).unwrap();
        let want = s.parse("-u^p*u_x - u_xxx").unwrap().total_derivative_multi(&[0, 2], &s.space);
        assert_eq!(r, want);
        assert_eq!(s.restrict(&r).unwrap(), r);
    }

    #[test]
    fn rejects_lead_in_rhs() {
        let bad = GKDV.replace("-u^p*u_x - u_xxx", "-u_tx");
        assert!(matches!(PdeSystem::from_toml(&bad, &[]), Err(Error::InvalidSystem(_))));
    }

    #[test]
    fn low_order() {
        let s = PdeSystem::from_toml(GKDV, &[]).unwrap();
        let names: Vec<String> = s.low_order_variables().iter().map(|v| s.space.jet_name(v)).collect();
        assert_eq!(names, ["u", "u_x", "u_xx"]);
        let sp = JetSpace::new(&["t", "x"], &["u"]);
        let bw = PdeSystem::from_equations(
            "bw",
            sp,
            &[("u_txx", "u_t + 3*u*u_x - 2*u_x*u_xx - u*u_xxx")],
        )
        .unwrap();
        let names: Vec<String> = bw.low_order_variables().iter().map(|v| bw.space.jet_name(v)).collect();
        assert_eq!(names, ["u", "u_x", "u_t", "u_xx", "u_tx"]);
        let tr = PdeSystem::from_equations("tr", JetSpace::new(&["t", "x"], &["u"]), &[("u_t", "u_x")]).unwrap();
        assert_eq!(tr.low_order_variables(), vec![tr.space.u(0)]);
    }

    #[test]
    fn lift_recovers_operator() {
        let s = PdeSystem::from_toml(GKDV, &[]).unwrap();
        let e = s.parse("u*u_t").unwrap();
        let l = s.lift_off_solution_space(&e).unwrap();
        assert_eq!(l.terms.len(), 1);
        assert_eq!(l.terms[0].2, s.parse("u").unwrap());
        assert_eq!(l.restricted, s.restrict(&e).unwrap());
        let back = l.restricted.add(&s.apply_lift(&l, &s.gs()));
        assert!(back.sub(&e).is_zero());
        let q = s.parse("u_t^2").unwrap();
        assert!(!s.lift_off_solution_space(&q).unwrap().nonlinear.is_zero());
    }

    #[test]
    fn scaling_parses() {
        let s = PdeSystem::from_toml(GKDV, &[("p".into(), Q::from_integer(2.into()))]).unwrap();
        let sc = s.scaling(None).unwrap();
        assert_eq!(sc.dep[0], Coeff::from(-1));
        assert_eq!(sc.indep[0], Coeff::from(3));
    }
}
