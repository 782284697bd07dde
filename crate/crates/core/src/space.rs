//! Variable, parameter and function declarations shared by every expression
//! of one system.

use crate::coeff::Q;
use crate::error::{Error, Result};
use crate::expr::{Base, Expr, JetVar};

#[derive(Clone, Debug, PartialEq)]
pub struct ParamDecl {
    pub name: String,
    /// `None` for a free symbol.
    pub value: Option<Q>,
}

/// Declared function `name(formals)`. `rules[i]` is the partial derivative
/// with respect to argument `i`, written over the formals. `sample` is a
/// concrete stand-in used only by the numeric oracle.
#[derive(Clone, Debug, PartialEq)]
pub struct FuncDecl {
    pub name: String,
    pub arity: usize,
    pub formals: Vec<Base>,
    pub rules: Vec<Option<Expr>>,
    pub sample: Option<Expr>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct JetSpace {
    pub indep: Vec<String>,
    pub dep: Vec<String>,
    pub params: Vec<ParamDecl>,
    pub funcs: Vec<FuncDecl>,
}

impl JetSpace {
    pub fn new(indep: &[&str], dep: &[&str]) -> JetSpace {
        JetSpace {
            indep: indep.iter().map(|s| s.to_string()).collect(),
            dep: dep.iter().map(|s| s.to_string()).collect(),
            ..Default::default()
        }
    }

    pub fn with_free_param(mut self, name: &str) -> JetSpace {
        self.params.push(ParamDecl { name: name.into(), value: None });
        self
    }

    pub fn with_param(mut self, name: &str, value: Q) -> JetSpace {
        self.params.push(ParamDecl { name: name.into(), value: Some(value) });
        self
    }

    pub fn n_indep(&self) -> usize {
        self.indep.len()
    }

    pub fn n_dep(&self) -> usize {
        self.dep.len()
    }

    pub fn dep_index(&self, name: &str) -> Option<u16> {
        self.dep.iter().position(|d| d == name).map(|i| i as u16)
    }

    pub fn indep_index(&self, name: &str) -> Option<usize> {
        self.indep.iter().position(|d| d == name)
    }

    pub fn param_index(&self, name: &str) -> Option<u16> {
        self.params.iter().position(|d| d.name == name).map(|i| i as u16)
    }

    pub fn func_index(&self, name: &str) -> Option<u16> {
        self.funcs.iter().position(|d| d.name == name).map(|i| i as u16)
    }

    pub fn param_value(&self, p: u16) -> Option<Q> {
        self.params.get(p as usize).and_then(|d| d.value.clone())
    }

    pub fn free_params(&self) -> Vec<&str> {
        self.params.iter().filter(|p| p.value.is_none()).map(|p| p.name.as_str()).collect()
    }

    pub fn u(&self, dep: usize) -> JetVar {
        JetVar::base(dep as u16, self.n_indep())
    }

    /// Jet variable from a name such as `u` or `u_tx`.
    pub fn jet(&self, name: &str) -> Result<JetVar> {
        let (head, tail) = match name.split_once('_') {
            Some((h, t)) => (h, t),
            None => (name, ""),
        };
        let dep = self.dep_index(head).ok_or_else(|| Error::Undeclared(head.to_string()))?;
        self.jet_with_suffix(dep, tail)
    }

    pub fn jet_with_suffix(&self, dep: u16, suffix: &str) -> Result<JetVar> {
        let idx = self
            .multi_index(suffix)
            .ok_or_else(|| Error::Undeclared(format!("{}_{}", self.dep[dep as usize], suffix)))?;
        Ok(JetVar::new(dep, &idx))
    }

    /// Multi-index spelled by a derivative suffix such as `tx`.
    pub fn multi_index(&self, suffix: &str) -> Option<Vec<u8>> {
        let mut idx = vec![0u8; self.n_indep()];
        let mut rest = suffix;
        while !rest.is_empty() {
            let i = self.indep.iter().position(|n| rest.starts_with(n.as_str()))?;
            idx[i] += 1;
            rest = &rest[self.indep[i].len()..];
        }
        Some(idx)
    }

    pub fn jet_name(&self, v: &JetVar) -> String {
        let mut s = self.dep.get(v.dep as usize).cloned().unwrap_or_else(|| format!("w{}", v.dep));
        if v.order() > 0 {
            s.push('_');
            for (i, &k) in v.idx.iter().enumerate() {
                for _ in 0..k {
                    s.push_str(&self.indep[i]);
                }
            }
        }
        s
    }

    /// Parse an expression; see [`crate::expr::Parser`].
    pub fn parse(&self, text: &str) -> Result<Expr> {
        crate::expr::Parser::new(self).parse(text)
    }

    /// Parse, declaring unknown function names on first use.
    pub fn parse_declaring(&mut self, text: &str) -> Result<Expr> {
        crate::expr::Parser::declaring(self).parse(text)
    }

    pub fn show(&self, e: &Expr) -> String {
        e.show(self)
    }

    /// Add dependent variables, returning the index of the first.
    pub fn extended(&self, names: &[String]) -> (JetSpace, u16) {
        let mut s = self.clone();
        let first = s.dep.len() as u16;
        s.dep.extend(names.iter().cloned());
        (s, first)
    }

    pub fn declare_function(&mut self, name: &str, arity: usize) -> u16 {
        if let Some(i) = self.func_index(name) {
            return i;
        }
        self.funcs.push(FuncDecl {
            name: name.to_string(),
            arity,
            formals: Vec::new(),
            rules: vec![None; arity],
            sample: None,
        });
        (self.funcs.len() - 1) as u16
    }

    /// Substitute numeric values for some free parameters everywhere.
    pub fn bind_params(&mut self, vals: &[(String, Q)]) -> Result<()> {
        for (n, v) in vals {
            let i = self.param_index(n).ok_or_else(|| Error::Undeclared(n.clone()))?;
            self.params[i as usize].value = Some(v.clone());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_names_roundtrip() {
        let sp = JetSpace::new(&["t", "x"], &["u", "m"]);
        let v = sp.jet("u_xtx").unwrap();
        assert_eq!(v, JetVar::new(0, &[1, 2]));
        assert_eq!(sp.jet_name(&v), "u_txx");
        assert_eq!(sp.jet("u_tx").unwrap(), sp.jet("u_xt").unwrap());
        assert!(sp.jet("u_y").is_err());
        assert!(sp.jet("w").is_err());
    }
}
