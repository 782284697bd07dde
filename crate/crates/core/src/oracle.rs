//! Random-point evaluation, an independent check on symbolic zero tests.

use num_integer::Integer;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coeff::Q;
use crate::expr::{Base, Expr, Point, ZeroTest};
use crate::space::JetSpace;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NumericCheck {
    pub requested: usize,
    pub evaluated: usize,
    pub nonzero: usize,
}

impl NumericCheck {
    pub fn passed(&self) -> bool {
        self.evaluated == self.requested && self.nonzero == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    Undetermined,
}

/// Outcome of a zero test on a list of residuals.
#[derive(Clone, Debug)]
pub struct Verdict {
    pub outcome: Outcome,
    pub residuals: Vec<Expr>,
    pub symbolic: ZeroTest,
    pub numeric: Option<NumericCheck>,
    /// Set when the zero was only reached after clearing composite denominators.
    pub cleared_denominators: bool,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }
}

pub const DEFAULT_POINTS: usize = 50;

/// Symbolic zero test on every residual, backed by `points` random exact
/// evaluations whenever opaque content makes the symbolic test inconclusive.
pub fn decide(residuals: Vec<Expr>, sp: &JetSpace, points: usize, seed: u64) -> Verdict {
    let mut symbolic = ZeroTest::Zero;
    let mut cleared = false;
    for r in &residuals {
        match r.zero_test() {
            ZeroTest::NonZero => symbolic = ZeroTest::NonZero,
            ZeroTest::Undetermined if symbolic == ZeroTest::Zero => symbolic = ZeroTest::Undetermined,
            ZeroTest::Zero if !r.is_zero() => cleared = true,
            _ => {}
        }
    }
    let numeric = if symbolic == ZeroTest::NonZero || points == 0 {
        None
    } else {
        Some(numeric_zero(&residuals, sp, points, seed))
    };
    let outcome = match symbolic {
        ZeroTest::NonZero => Outcome::Fail,
        ZeroTest::Zero => Outcome::Pass,
        ZeroTest::Undetermined => match &numeric {
            Some(n) if n.nonzero > 0 => Outcome::Fail,
            Some(n) if n.passed() => Outcome::Pass,
            _ => Outcome::Undetermined,
        },
    };
    Verdict { outcome, residuals, symbolic, numeric, cleared_denominators: cleared }
}

fn exponent_lcm(e: &Expr, sp: &JetSpace, acc: &mut num_bigint::BigInt) {
    for (m, _) in e.terms() {
        for (b, x) in m.factors() {
            if let Some(r) = x.eval(&|p| sp.param_value(p).or(Some(Q::from_integer(2.into())))).ok() {
                *acc = acc.lcm(r.denom());
            }
            match b {
                Base::Comp(inner) => exponent_lcm(inner, sp, acc),
                Base::Func(a) => a.args.iter().for_each(|x| exponent_lcm(x, sp, acc)),
                _ => {}
            }
        }
    }
}

/// A random point covering every base of `exprs`. Values are perfect powers
/// when fractional exponents occur so that roots stay exact.
pub fn random_point(exprs: &[Expr], sp: &JetSpace, rng: &mut ChaCha8Rng) -> Point {
    let mut l = num_bigint::BigInt::from(1);
    for e in exprs {
        exponent_lcm(e, sp, &mut l);
    }
    let power: u32 = if l <= num_bigint::BigInt::from(6) { l.to_string().parse().unwrap() } else { 1 };
    let positive = power > 1;
    let draw = |rng: &mut ChaCha8Rng| -> Q {
        let n: i64 = rng.gen_range(1..=9);
        let d: i64 = rng.gen_range(1..=4);
        let s = if positive || rng.gen_bool(0.5) { 1 } else { -1 };
        let r = Q::new((s * n).into(), d.into());
        num_traits::pow(r, power as usize)
    };
    let mut pt = Point::default();
    let mut vars = Vec::new();
    for e in exprs {
        for v in e.jet_vars() {
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
    }
    vars.sort();
    for v in vars {
        let x = draw(rng);
        pt.jets.insert(v, x);
    }
    for _ in 0..sp.n_indep() {
        let x = draw(rng);
        pt.indep.push(x);
    }
    for (i, p) in sp.params.iter().enumerate() {
        if p.value.is_none() {
            pt.params.insert(i as u16, Q::from_integer(rng.gen_range(1..=4).into()));
        }
    }
    pt
}

/// Evaluate every expression at `points` random points (retrying points
/// where evaluation is undefined) and count nonzero values.
pub fn numeric_zero(exprs: &[Expr], sp: &JetSpace, points: usize, seed: u64) -> NumericCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut evaluated = 0;
    let mut nonzero = 0;
    let mut attempts = 0;
    while evaluated < points && attempts < points * 20 {
        attempts += 1;
        let pt = random_point(exprs, sp, &mut rng);
        let vals: Result<Vec<Q>, _> = exprs.iter().map(|e| e.eval(&pt, sp)).collect();
        let Ok(vals) = vals else { continue };
        evaluated += 1;
        if vals.iter().any(|v| !v.is_zero()) {
            nonzero += 1;
        }
    }
    NumericCheck { requested: points, evaluated, nonzero }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_agrees_with_symbolic() {
        let mut sp = JetSpace::new(&["t", "x"], &["u"]);
        let e = sp.parse("(u + u_x)^2 - u^2 - 2*u*u_x - u_x^2").unwrap();
        assert!(decide(vec![e], &sp, 20, 1).passed());
        let f = sp.parse_declaring("f(u)*u_x - u_x*f(u)").unwrap();
        assert!(decide(vec![f], &sp, 20, 1).passed());
        sp.funcs[0].formals = vec![Base::Jet(sp.u(0))];
        sp.funcs[0].sample = Some(sp.parse("u^2").unwrap());
        let g = sp.parse("f(u) - u^2").unwrap();
        let v = decide(vec![g], &sp, 20, 2);
        assert_eq!(v.symbolic, ZeroTest::Undetermined);
        assert!(v.passed());
        let h = sp.parse("f(u) - u").unwrap();
        assert_eq!(decide(vec![h], &sp, 20, 3).outcome, Outcome::Fail);
        let r = sp.parse("u^(1/2)*u^(1/2) - u").unwrap();
        assert!(decide(vec![r], &sp, 5, 4).passed());
    }
}
