//! Canonical serialization in the input grammar.

use num_traits::{One, Signed, Zero};

use super::{Base, Expr, Monomial};
use crate::coeff::{Coeff, Exponent, PMono, Poly, Q};
use crate::space::JetSpace;

struct Names<'a> {
    sp: Option<&'a JetSpace>,
}

impl Names<'_> {
    fn param(&self, p: u16) -> String {
        self.sp
            .and_then(|s| s.params.get(p as usize))
            .map(|d| d.name.clone())
            .unwrap_or_else(|| format!("p{p}"))
    }

    fn indep(&self, i: u8) -> String {
        self.sp
            .and_then(|s| s.indep.get(i as usize))
            .cloned()
            .unwrap_or_else(|| format!("x{i}"))
    }

    fn func(&self, id: u16) -> String {
        self.sp
            .and_then(|s| s.funcs.get(id as usize))
            .map(|d| d.name.clone())
            .unwrap_or_else(|| format!("f{id}"))
    }

    fn jet(&self, v: &super::JetVar) -> String {
        match self.sp {
            Some(s) if (v.dep as usize) < s.dep.len() => s.jet_name(v),
            _ => {
                let idx: Vec<String> = v.idx.iter().map(|k| k.to_string()).collect();
                format!("u{}[{}]", v.dep, idx.join(","))
            }
        }
    }
}

fn pmono(m: &PMono, n: &Names) -> String {
    let parts: Vec<String> = m
        .0
        .iter()
        .map(|&(v, e)| if e == 1 { n.param(v) } else { format!("{}^{}", n.param(v), e) })
        .collect();
    parts.join("*")
}

fn join_signed(parts: Vec<(bool, String)>) -> String {
    if parts.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, (neg, body)) in parts.into_iter().enumerate() {
        if i == 0 {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        s.push_str(&body);
    }
    s
}

fn poly(p: &Poly, n: &Names) -> String {
    let mut terms: Vec<(&PMono, &Q)> = p.0.iter().collect();
    terms.sort_by(|a, b| b.0 .0.iter().map(|x| x.1).sum::<u32>().cmp(&a.0 .0.iter().map(|x| x.1).sum::<u32>()).then(a.0.cmp(b.0)));
    let parts = terms
        .into_iter()
        .map(|(m, c)| {
            let a = c.abs();
            let body = if m.0.is_empty() {
                a.to_string()
            } else if a.is_one() {
                pmono(m, n)
            } else {
                format!("{}*{}", a, pmono(m, n))
            };
            (c.is_negative(), body)
        })
        .collect();
    join_signed(parts)
}

fn poly_factor(p: &Poly, n: &Names) -> String {
    let s = poly(p, n);
    if p.0.len() > 1 || s.starts_with('-') || p.0.values().any(|c| !c.is_integer()) {
        format!("({s})")
    } else {
        s
    }
}

/// Coefficient magnitude and sign; `None` body means the coefficient is 1.
fn coeff_parts(c: &Coeff, n: &Names) -> (bool, Option<String>) {
    match c {
        Coeff::Num(x) => {
            let a = x.abs();
            (x.is_negative(), if a.is_one() { None } else { Some(a.to_string()) })
        }
        Coeff::Sym(r) => {
            let lead_neg = r.num.leading_coeff().is_negative();
            let num = if lead_neg { r.num.neg() } else { r.num.clone() };
            let mut s = if num.0.len() == 1 && r.den.is_empty() {
                poly(&num, n)
            } else if r.den.is_empty() {
                format!("({})", poly(&num, n))
            } else {
                poly_factor(&num, n)
            };
            if !r.den.is_empty() {
                let ds: Vec<String> = r
                    .den
                    .iter()
                    .map(|(f, k)| if *k == 1 { poly_factor(f, n) } else { format!("{}^{}", poly_factor(f, n), k) })
                    .collect();
                if ds.len() == 1 && !ds[0].contains('^') {
                    s = format!("{s}/{}", ds[0]);
                } else {
                    s = format!("{s}/({})", ds.join("*"));
                }
            }
            (lead_neg, Some(s))
        }
    }
}

fn exponent(e: &Exponent, n: &Names) -> String {
    if let Some(r) = e.as_rational() {
        if r.is_integer() && !r.is_negative() {
            return r.to_string();
        }
        return format!("({r})");
    }
    let mut parts: Vec<(bool, String)> = e
        .lin
        .iter()
        .map(|(v, a)| {
            let m = a.abs();
            let body = if m.is_one() { n.param(*v) } else { format!("{}*{}", m, n.param(*v)) };
            (a.is_negative(), body)
        })
        .collect();
    if !e.c.is_zero() {
        parts.push((e.c.is_negative(), e.c.abs().to_string()));
    }
    format!("({})", join_signed(parts))
}

fn base(b: &Base, n: &Names) -> String {
    match b {
        Base::Jet(v) => n.jet(v),
        Base::Indep(i) => n.indep(*i),
        Base::Func(a) => {
            let mut s = n.func(a.id);
            if a.derivs.iter().any(|&k| k > 0) {
                if a.derivs.len() == 1 {
                    for _ in 0..a.derivs[0] {
                        s.push('\'');
                    }
                } else {
                    let ks: Vec<String> = a.derivs.iter().map(|k| k.to_string()).collect();
                    s.push_str(&format!("'[{}]", ks.join(",")));
                }
            }
            let args: Vec<String> = a.args.iter().map(|x| render(x, n)).collect();
            format!("{s}({})", args.join(", "))
        }
        Base::Comp(e) => format!("({})", render(e, n)),
    }
}

fn monomial(m: &Monomial, n: &Names) -> String {
    let parts: Vec<String> = m
        .0
        .iter()
        .map(|(b, e)| if e.is_one() { base(b, n) } else { format!("{}^{}", base(b, n), exponent(e, n)) })
        .collect();
    parts.join("*")
}

fn render(e: &Expr, n: &Names) -> String {
    let parts = e
        .terms()
        .map(|(m, c)| {
            let (neg, cs) = coeff_parts(c, n);
            let body = match (cs, m.is_one()) {
                (None, true) => "1".to_string(),
                (None, false) => monomial(m, n),
                (Some(c), true) => c,
                (Some(c), false) => format!("{c}*{}", monomial(m, n)),
            };
            (neg, body)
        })
        .collect();
    join_signed(parts)
}

pub(super) fn debug_string(e: &Expr) -> String {
    render(e, &Names { sp: None })
}

impl Expr {
    /// Canonical text, parseable back in the same space.
    pub fn show(&self, sp: &JetSpace) -> String {
        render(self, &Names { sp: Some(sp) })
    }
}

pub fn show_coeff(c: &Coeff, sp: &JetSpace) -> String {
    Expr::constant(c.clone()).show(sp)
}

pub fn show_exponent(e: &Exponent, sp: &JetSpace) -> String {
    exponent(e, &Names { sp: Some(sp) })
}

#[cfg(test)]
mod tests {
    use crate::space::JetSpace;

    #[test]
    fn canonical_text_roundtrips() {
        let sp = JetSpace::new(&["t", "x"], &["u"]).with_free_param("p");
        for s in [
            "u_t + u^p*u_x + u_xxx",
            "1/(p+1)*u^(p+1)",
            "u^(1/2) - 3/4*u_x^(-2)",
            "(u + u_x)^(-1)*x",
            "p*u^(p-1)*u_x",
            "(p^2+3*p+2)/(p-2)*u",
            "-(2*p)/(p+1)*t",
        ] {
            let e = sp.parse(s).unwrap();
            let txt = e.show(&sp);
            assert_eq!(sp.parse(&txt).unwrap(), e, "{s} -> {txt}");
        }
        assert_eq!(sp.parse("1/(p+1)*u^(p+1)").unwrap().show(&sp), "1/(p + 1)*u^(p + 1)");
        assert_eq!(sp.parse("p*u^(p-1)*u_x").unwrap().show(&sp), "p*u^(p - 1)*u_x");
    }
}
