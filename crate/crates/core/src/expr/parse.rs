//! Pratt parser for the expression grammar.
//!
//! Identifiers are `[a-zA-Z][a-zA-Z0-9]*`, optionally followed by `_` and a
//! string of independent-variable names (`u_tx`). The same suffix after a
//! closing parenthesis takes total derivatives: `(u*v)_x`. Function derivatives are
//! written `f'(u)`, `f''(u)` or `c'[1,0](x, u)`. Literals are integers; a
//! rational is written as a quotient.

use std::sync::Arc;

use num_bigint::BigInt;
use smallvec::SmallVec;

use super::{Base, Expr, FuncApp, Monomial};
use crate::coeff::{Coeff, Exponent, Q};
use crate::error::{Error, Result};
use crate::space::JetSpace;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident { name: String, suffix: Option<String>, derivs: Option<Vec<u8>> },
    Op(char),
    Deriv(String),
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let cs: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |pos: usize, msg: &str| Error::Syntax { pos: pos + 1, msg: msg.to_string() };
    while i < cs.len() {
        let c = cs[i];
        let start = i;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            if i < cs.len() && cs[i] == '.' {
                let mut j = i + 1;
                while j < cs.len() && (cs[j].is_ascii_digit()) {
                    j += 1;
                }
                return Err(Error::NonRational(cs[start..j].iter().collect()));
            }
            let s: String = cs[start..i].iter().collect();
            out.push((Tok::Num(s.parse().unwrap()), start));
        } else if c == '.' {
            let mut j = i + 1;
            while j < cs.len() && cs[j].is_ascii_digit() {
                j += 1;
            }
            return Err(Error::NonRational(cs[start..j].iter().collect()));
        } else if c.is_ascii_alphabetic() {
            while i < cs.len() && cs[i].is_ascii_alphanumeric() {
                i += 1;
            }
            let name: String = cs[start..i].iter().collect();
            let mut suffix = None;
            if i + 1 < cs.len() && cs[i] == '_' && cs[i + 1].is_ascii_alphabetic() {
                let s0 = i + 1;
                i += 1;
                while i < cs.len() && cs[i].is_ascii_alphabetic() {
                    i += 1;
                }
                suffix = Some(cs[s0..i].iter().collect());
            } else if i < cs.len() && cs[i] == '_' {
                return Err(err(i, "expected derivative letters after `_`"));
            }
            let mut derivs = None;
            if i < cs.len() && cs[i] == '\'' {
                if i + 1 < cs.len() && cs[i + 1] == '[' {
                    let close = cs[i..].iter().position(|&c| c == ']').ok_or_else(|| err(i, "unclosed `[`"))? + i;
                    let inner: String = cs[i + 2..close].iter().collect();
                    let mut v = Vec::new();
                    for part in inner.split(',') {
                        v.push(part.trim().parse::<u8>().map_err(|_| err(i + 2, "bad derivative order"))?);
                    }
                    derivs = Some(v);
                    i = close + 1;
                } else {
                    let mut k = 0u8;
                    while i < cs.len() && cs[i] == '\'' {
                        k += 1;
                        i += 1;
                    }
                    derivs = Some(vec![k]);
                }
            }
            out.push((Tok::Ident { name, suffix, derivs }, start));
        } else if c == '_' && matches!(out.last(), Some((Tok::Op(')'), _))) {
            i += 1;
            while i < cs.len() && cs[i].is_ascii_alphabetic() {
                i += 1;
            }
            if i == start + 1 {
                return Err(err(i, "expected derivative letters after `_`"));
            }
            out.push((Tok::Deriv(cs[start + 1..i].iter().collect()), start));
        } else if "+-*/^(),".contains(c) {
            out.push((Tok::Op(c), start));
            i += 1;
        } else {
            return Err(err(i, &format!("unexpected character `{c}`")));
        }
    }
    out.push((Tok::End, cs.len()));
    Ok(out)
}

enum SpaceRef<'a> {
    Shared(&'a JetSpace),
    Mut(&'a mut JetSpace),
}

pub struct Parser<'a> {
    space: SpaceRef<'a>,
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl<'a> Parser<'a> {
    pub fn new(space: &'a JetSpace) -> Parser<'a> {
        Parser { space: SpaceRef::Shared(space), toks: Vec::new(), pos: 0 }
    }

    /// Parser that declares unknown function names as opaque functions.
    pub fn declaring(space: &'a mut JetSpace) -> Parser<'a> {
        Parser { space: SpaceRef::Mut(space), toks: Vec::new(), pos: 0 }
    }

    fn sp(&self) -> &JetSpace {
        match &self.space {
            SpaceRef::Shared(s) => s,
            SpaceRef::Mut(s) => s,
        }
    }

    pub fn parse(mut self, text: &str) -> Result<Expr> {
        self.toks = lex(text)?;
        self.pos = 0;
        let e = self.expr(0)?;
        match &self.toks[self.pos] {
            (Tok::End, _) => Ok(e),
            (t, p) => Err(Error::Syntax { pos: p + 1, msg: format!("unexpected {}", tok_name(t)) }),
        }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn here(&self) -> usize {
        self.toks[self.pos].1 + 1
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == &Tok::Op(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Syntax { pos: self.here(), msg: format!("expected `{c}`, found {}", tok_name(self.peek())) })
        }
    }

    fn expr(&mut self, min_bp: u8) -> Result<Expr> {
        let mut lhs = self.prefix()?;
        loop {
            let (op, lbp) = match self.peek() {
                Tok::Op(c @ ('+' | '-')) => (*c, 1),
                Tok::Op(c @ ('*' | '/')) => (*c, 2),
                Tok::Op('^') => ('^', 4),
                _ => break,
            };
            if lbp <= min_bp {
                break;
            }
            let at = self.here();
            self.pos += 1;
            let rhs = self.expr(if op == '^' { 3 } else { lbp })?;
            lhs = match op {
                '+' => lhs.add(&rhs),
                '-' => lhs.sub(&rhs),
                '*' => lhs.mul(&rhs),
                '/' => lhs.div(&rhs).map_err(|e| relocate(e, at))?,
                _ => {
                    let ex = to_exponent(&rhs)?;
                    lhs.pow(&ex).map_err(|e| relocate(e, at))?
                }
            };
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Expr> {
        let at = self.here();
        let tok = self.peek().clone();
        self.pos += 1;
        match tok {
            Tok::Num(n) => Ok(Expr::rat(Q::from_integer(n))),
            Tok::Op('-') => Ok(self.expr(3)?.neg()),
            Tok::Op('+') => self.expr(3),
            Tok::Op('(') => {
                let mut e = self.expr(0)?;
                self.expect(')')?;
                while let Tok::Deriv(s) = self.peek().clone() {
                    let sp = self.sp();
                    let k = sp.multi_index(&s).ok_or_else(|| Error::Syntax {
                        pos: self.here(),
                        msg: format!("`_{s}` is not a derivative suffix"),
                    })?;
                    e = e.total_derivative_multi(&k, sp);
                    self.pos += 1;
                }
                Ok(e)
            }
            Tok::Ident { name, suffix, derivs } => self.ident(&name, suffix.as_deref(), derivs, at),
            t => Err(Error::Syntax { pos: at, msg: format!("unexpected {}", tok_name(&t)) }),
        }
    }

    fn ident(&mut self, name: &str, suffix: Option<&str>, derivs: Option<Vec<u8>>, at: usize) -> Result<Expr> {
        let call = self.peek() == &Tok::Op('(');
        if !call && derivs.is_none() {
            let sp = self.sp();
            if let Some(d) = sp.dep_index(name) {
                return Ok(Expr::jet(sp.jet_with_suffix(d, suffix.unwrap_or(""))?));
            }
            if suffix.is_none() {
                if let Some(i) = sp.indep_index(name) {
                    return Ok(Expr::indep(i));
                }
                if let Some(p) = sp.param_index(name) {
                    return Ok(match sp.param_value(p) {
                        Some(v) => Expr::rat(v),
                        None => Expr::constant(Coeff::param(p)),
                    });
                }
            }
            let full = match suffix {
                Some(s) => format!("{name}_{s}"),
                None => name.to_string(),
            };
            return Err(Error::Undeclared(full));
        }
        if suffix.is_some() {
            return Err(Error::Syntax { pos: at, msg: format!("function `{name}` cannot take a derivative suffix") });
        }
        self.expect('(')?;
        let mut args = Vec::new();
        if self.peek() != &Tok::Op(')') {
            loop {
                args.push(self.expr(0)?);
                if self.peek() == &Tok::Op(',') {
                    self.pos += 1;
                } else {
                    break;
                }
            }
        }
        self.expect(')')?;
        let id = match self.sp().func_index(name) {
            Some(i) => i,
            None => match &mut self.space {
                SpaceRef::Mut(s) if s.dep_index(name).is_none() && s.param_index(name).is_none() => {
                    s.declare_function(name, args.len())
                }
                _ => return Err(Error::Undeclared(name.to_string())),
            },
        };
        let arity = self.sp().funcs[id as usize].arity;
        if arity != args.len() {
            return Err(Error::Syntax {
                pos: at,
                msg: format!("`{name}` takes {arity} argument(s), found {}", args.len()),
            });
        }
        let mut d: SmallVec<[u8; 2]> = smallvec::smallvec![0; arity];
        if let Some(v) = derivs {
            if arity == 1 && v.len() == 1 {
                d[0] = v[0];
            } else if v.len() == arity {
                d.copy_from_slice(&v);
            } else {
                return Err(Error::Syntax { pos: at, msg: format!("derivative list for `{name}` needs {arity} entries") });
            }
        }
        let app = FuncApp { id, derivs: d, args };
        Ok(Expr::term(Coeff::one(), Monomial::single(Base::Func(Arc::new(app)), Exponent::one())))
    }
}

fn relocate(e: Error, at: usize) -> Error {
    match e {
        Error::DivisionByZero => Error::Syntax { pos: at, msg: "division by zero".into() },
        e => e,
    }
}

fn to_exponent(e: &Expr) -> Result<Exponent> {
    e.as_constant()
        .and_then(|c| c.to_exponent())
        .ok_or_else(|| Error::NonAffine(format!("{e:?}")))
}

fn tok_name(t: &Tok) -> String {
    match t {
        Tok::Num(n) => format!("number `{n}`"),
        Tok::Ident { name, .. } => format!("identifier `{name}`"),
        Tok::Op(c) => format!("`{c}`"),
        Tok::Deriv(s) => format!("`_{s}`"),
        Tok::End => "end of input".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::qf;

    fn space() -> JetSpace {
        JetSpace::new(&["t", "x"], &["u"]).with_free_param("p")
    }

    #[test]
    fn parses_gkdv() {
        let sp = space();
        let g = sp.parse("u_t + u^p*u_x + u_xxx").unwrap();
        assert_eq!(g.len(), 3);
        assert!(sp.parse("0").unwrap().is_zero());
        assert!(sp.parse("u*u_x - u_x*u").unwrap().is_zero());
        assert_eq!(sp.parse("u_tx").unwrap(), sp.parse("u_xt").unwrap());
    }

    #[test]
    fn precedence() {
        let sp = space();
        assert_eq!(sp.parse("-u^2").unwrap(), sp.parse("-(u*u)").unwrap());
        assert_eq!(sp.parse("2^3^2").unwrap(), sp.parse("512").unwrap());
        assert_eq!(sp.parse("1/2*u").unwrap(), Expr::jet(sp.u(0)).scale_q(&qf(1, 2)));
        assert_eq!(sp.parse("u^-1*u").unwrap(), Expr::one());
        assert_eq!(sp.parse("u^(p+1)*u").unwrap(), sp.parse("u^(p+2)").unwrap());
    }

    #[test]
    fn group_derivative() {
        let sp = space();
        assert_eq!(sp.parse("(u*u_x)_x").unwrap(), sp.parse("u_x^2 + u*u_xx").unwrap());
        assert_eq!(sp.parse("(x*u)_tx").unwrap(), sp.parse("u_t + x*u_tx").unwrap());
        assert!(sp.parse("(u)_q").is_err());
    }

    #[test]
    fn errors() {
        let sp = space();
        assert!(matches!(sp.parse("u +"), Err(Error::Syntax { .. })));
        assert!(matches!(sp.parse("v + u"), Err(Error::Undeclared(_))));
        assert!(matches!(sp.parse("0.5*u"), Err(Error::NonRational(_))));
        assert!(matches!(sp.parse("u^u"), Err(Error::NonAffine(_))));
        assert!(matches!(sp.parse("f(u)"), Err(Error::Undeclared(_))));
        let mut sp2 = space();
        let e = sp2.parse_declaring("f(u)*u_x - u_x*f(u)").unwrap();
        assert!(e.is_zero());
        assert_eq!(sp2.funcs.len(), 1);
    }
}
