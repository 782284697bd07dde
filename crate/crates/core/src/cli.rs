//! Command-line front end: argument parsing, report rendering, exit codes.
//!
//! Exit codes: 0 when every verdict passes, 1 on a failed verdict or a
//! construction that cannot proceed, 2 on usage, file or parse errors.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::coeff::Q;
use crate::corpus;
use crate::current_builder::{
    current_from_multiplier_direct, current_from_multiplier_homotopy, current_from_multiplier_scaling,
    verify_characteristic, verify_conservation, ConservedCurrent, DirectBasis, Method,
};
use crate::detsys::{default_basis, solve_linear_ansatz, verify_multiplier, LinearAnsatz, Target};
use crate::error::{Error, Result};
use crate::expr::{show_coeff, Expr};
use crate::oracle::{decide, Outcome, Verdict, DEFAULT_POINTS};
use crate::pde_system::{parse_rational, truncate, PdeSystem};
use crate::space::JetSpace;
use crate::varcalc::{euler, frechet, helmholtz_check, Current};

#[derive(Parser, Debug)]
#[command(name = "jetcalc", version, about = "Exact jet-space calculus for conservation laws")]
pub struct Cli {
    /// Emit a JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct SystemArgs {
    /// System file (TOML).
    pub file: PathBuf,
    /// Bind a parameter, e.g. `--param p=2`.
    #[arg(long = "param", value_name = "NAME=VALUE")]
    pub params: Vec<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Verify a multiplier, a current, a (current, multiplier) pair, or
    /// every known entry of the file when none is given.
    Verify {
        #[command(flatten)]
        sys: SystemArgs,
        /// Multiplier components separated by `;`.
        #[arg(long)]
        multiplier: Option<String>,
        /// Current as `T=...` followed by one `X=...` per spatial variable.
        #[arg(long, num_args = 1.., value_name = "T=.. X=..")]
        current: Option<Vec<String>>,
        /// Current and multiplier as `T=.. X=.. Q=..`.
        #[arg(long, num_args = 1.., value_name = "T=.. X=.. Q=..")]
        pair: Option<Vec<String>>,
    },
    /// Solve a determining system over a linear ansatz.
    Solve {
        #[command(flatten)]
        sys: SystemArgs,
        /// multipliers, adjoint-symmetries, symmetries or variational.
        #[arg(long, default_value = "multipliers")]
        target: String,
        /// Comma-separated scalar candidates placed in every slot; default is
        /// the polynomial basis over t, x and the low-order variables.
        #[arg(long)]
        basis: Option<String>,
        /// Jet degree of the default basis.
        #[arg(long, default_value_t = 3)]
        degree: u32,
    },
    /// Build a conserved current from a multiplier.
    Build {
        #[command(flatten)]
        sys: SystemArgs,
        /// Multiplier components separated by `;`.
        #[arg(long)]
        multiplier: String,
        /// homotopy, scaling or direct.
        #[arg(long, default_value = "homotopy")]
        method: String,
        /// Scaling action name (scaling method).
        #[arg(long)]
        scaling: Option<String>,
        /// Homotopy base point, components separated by `;`.
        #[arg(long)]
        u0: Option<String>,
        /// Jet degree of the direct-method basis.
        #[arg(long, default_value_t = 3)]
        degree: u32,
    },
    /// Verify every system file of a corpus directory.
    Corpus {
        /// Corpus directory; defaults to the bundled corpus.
        dir: Option<PathBuf>,
    },
    /// Euler operator of an expression.
    Euler {
        expr: String,
        #[command(flatten)]
        space: SpaceArgs,
    },
    /// Frechet derivative of an expression in a direction.
    Frechet {
        expr: String,
        /// Direction components separated by `;`.
        #[arg(long)]
        direction: String,
        #[command(flatten)]
        space: SpaceArgs,
    },
    /// Helmholtz conditions for a system.
    Helmholtz {
        #[command(flatten)]
        sys: SystemArgs,
    },
}

#[derive(Args, Debug, Clone)]
pub struct SpaceArgs {
    /// Take the jet space from a system file.
    #[arg(long)]
    pub file: Option<PathBuf>,
    #[arg(long, default_value = "t,x")]
    pub indep: String,
    #[arg(long, default_value = "u")]
    pub dep: String,
}

/// Text and JSON forms of one command's result.
struct Report {
    lines: Vec<String>,
    json: Value,
    ok: bool,
}

fn usage(e: &Error) -> bool {
    matches!(
        e,
        Error::Syntax { .. }
            | Error::Undeclared(_)
            | Error::NonRational(_)
            | Error::NonAffine(_)
            | Error::InvalidSystem(_)
            | Error::IdentityResidual { .. }
            | Error::Dimension(_)
            | Error::UnknownScaling(_)
            | Error::Io(_)
            | Error::Format(_)
            | Error::FreeParameter(_)
    )
}

/// Parse arguments, run, print, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let json = cli.json;
    match execute(&cli.command) {
        Ok(r) => {
            if json {
                println!("{}", serde_json::to_string_pretty(&r.json).unwrap());
            } else {
                for l in &r.lines {
                    println!("{l}");
                }
            }
            if r.ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            if json {
                println!("{}", serde_json::to_string_pretty(&json!({ "error": e.to_string() })).unwrap());
            } else {
                eprintln!("error: {e}");
            }
            if usage(&e) {
                2
            } else {
                1
            }
        }
    }
}

fn execute(cmd: &Command) -> Result<Report> {
    match cmd {
        Command::Verify { sys, multiplier, current, pair } => {
            cmd_verify(&load(sys)?, multiplier.as_deref(), current.as_deref(), pair.as_deref())
        }
        Command::Solve { sys, target, basis, degree } => cmd_solve(&load(sys)?, target, basis.as_deref(), *degree),
        Command::Build { sys, multiplier, method, scaling, u0, degree } => {
            cmd_build(&load(sys)?, multiplier, method, scaling.as_deref(), u0.as_deref(), *degree)
        }
        Command::Corpus { dir } => cmd_corpus(dir.clone().unwrap_or_else(corpus::bundled_dir).as_path()),
        Command::Euler { expr, space } => cmd_euler(&space_of(space)?, expr),
        Command::Frechet { expr, direction, space } => cmd_frechet(&space_of(space)?, expr, direction),
        Command::Helmholtz { sys } => cmd_helmholtz(&load(sys)?),
    }
}

fn parse_bindings(params: &[String]) -> Result<Vec<(String, Q)>> {
    params
        .iter()
        .map(|p| {
            let (k, v) = p.split_once('=').ok_or_else(|| Error::Format(format!("expected NAME=VALUE, found `{p}`")))?;
            Ok((k.trim().to_string(), parse_rational(v.trim())?))
        })
        .collect()
}

fn load(a: &SystemArgs) -> Result<PdeSystem> {
    PdeSystem::load(&a.file, &parse_bindings(&a.params)?)
}

fn space_of(a: &SpaceArgs) -> Result<JetSpace> {
    if let Some(f) = &a.file {
        return Ok(PdeSystem::load(f, &[])?.space);
    }
    let split = |s: &str| -> Vec<String> { s.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect() };
    let i = split(&a.indep);
    let d = split(&a.dep);
    let ir: Vec<&str> = i.iter().map(|s| s.as_str()).collect();
    let dr: Vec<&str> = d.iter().map(|s| s.as_str()).collect();
    Ok(JetSpace::new(&ir, &dr))
}

fn split_vector(s: &str) -> Vec<String> {
    s.split(';').map(|x| x.trim().to_string()).collect()
}

/// Split `T=..`, `X=..`, `Q=..` items into their expression lists.
fn keyed(items: &[String]) -> Result<(Option<String>, Vec<String>, Vec<String>)> {
    let mut t = None;
    let mut x = Vec::new();
    let mut q = Vec::new();
    for it in items {
        let (k, v) = it.split_once('=').ok_or_else(|| Error::Format(format!("expected KEY=EXPR, found `{it}`")))?;
        match k.trim() {
            "T" => t = Some(v.to_string()),
            "X" => x.push(v.to_string()),
            "Q" => q.push(v.to_string()),
            o => return Err(Error::Format(format!("unknown key `{o}`; use T, X or Q"))),
        }
    }
    Ok((t, x, q))
}

fn parse_current(sys: &PdeSystem, t: Option<String>, x: &[String]) -> Result<Current> {
    let t = t.ok_or_else(|| Error::Format("current needs T=..".into()))?;
    Ok(Current { t: sys.parse(&t)?, x: sys.parse_vector(x, sys.n_indep() - 1)? })
}

fn outcome_str(o: Outcome) -> &'static str {
    match o {
        Outcome::Pass => "pass",
        Outcome::Fail => "fail",
        Outcome::Undetermined => "undetermined",
    }
}

fn verdict_json(sys_space: &JetSpace, what: &str, v: &Verdict) -> Value {
    json!({
        "check": what,
        "outcome": outcome_str(v.outcome),
        "symbolic": format!("{:?}", v.symbolic),
        "residuals": v.residuals.iter().map(|r| truncate(&sys_space.show(r))).collect::<Vec<_>>(),
        "numeric": v.numeric.as_ref().map(|n| json!({"requested": n.requested, "evaluated": n.evaluated, "nonzero": n.nonzero})),
        "cleared_denominators": v.cleared_denominators,
    })
}

fn verdict_line(sp: &JetSpace, what: &str, v: &Verdict) -> Vec<String> {
    let mut out = vec![format!("{what}: {}", outcome_str(v.outcome))];
    if v.outcome != Outcome::Pass {
        for r in &v.residuals {
            if !r.is_zero() {
                out.push(format!("  residual {}", truncate(&sp.show(r))));
            }
        }
    }
    if let Some(n) = &v.numeric {
        out.push(format!("  numeric check: {}/{} points evaluated, {} nonzero", n.evaluated, n.requested, n.nonzero));
    }
    if v.cleared_denominators {
        out.push("  note: zero reached after clearing denominators; singular loci excluded".into());
    }
    out
}

fn cmd_verify(sys: &PdeSystem, mult: Option<&str>, current: Option<&[String]>, pair: Option<&[String]>) -> Result<Report> {
    let sp = &sys.space;
    let mut checks: Vec<(String, Verdict)> = Vec::new();
    if let Some(m) = mult {
        let q = sys.parse_vector(&split_vector(m), sys.n_eq())?;
        checks.push(("multiplier".into(), verify_multiplier(sys, &q)?));
    }
    if let Some(c) = current {
        let (t, x, q) = keyed(c)?;
        if !q.is_empty() {
            return Err(Error::Format("use --pair to give a multiplier with a current".into()));
        }
        let cur = parse_current(sys, t, &x)?;
        checks.push(("conservation".into(), verify_conservation(sys, &cur)?));
    }
    if let Some(p) = pair {
        let (t, x, q) = keyed(p)?;
        let cur = parse_current(sys, t, &x)?;
        let q = sys.parse_vector(&q, sys.n_eq())?;
        checks.push(("characteristic".into(), verify_characteristic(sys, &cur, &q)?));
    }
    if checks.is_empty() {
        let file = sys.name.clone();
        let entries = corpus::check_system(sys, &file, &[])?;
        let ok = entries.iter().all(|e| e.ok);
        let lines = entries
            .iter()
            .map(|e| {
                format!(
                    "{:4} {:?} {}: {}{}",
                    if e.ok { "ok" } else { "FAIL" },
                    e.kind,
                    e.name,
                    e.outcome,
                    if e.expect_pass { "" } else { " (expected failure)" }
                )
            })
            .collect();
        return Ok(Report { lines, json: json!({ "system": sys.name, "entries": entries }), ok });
    }
    let ok = checks.iter().all(|(_, v)| v.passed());
    let mut lines = Vec::new();
    for (w, v) in &checks {
        lines.extend(verdict_line(sp, w, v));
    }
    let js = json!({
        "system": sys.name,
        "passed": ok,
        "checks": checks.iter().map(|(w, v)| verdict_json(sp, w, v)).collect::<Vec<_>>(),
    });
    Ok(Report { lines, json: js, ok })
}

fn cmd_solve(sys: &PdeSystem, target: &str, basis: Option<&str>, degree: u32) -> Result<Report> {
    let target = Target::parse(target).ok_or_else(|| Error::Format(format!("unknown target `{target}`")))?;
    let scalars = match basis {
        Some(b) => b.split(',').map(|s| sys.parse(s.trim())).collect::<Result<Vec<_>>>()?,
        None => default_basis(sys, degree),
    };
    let ansatz = LinearAnsatz::per_slot(&scalars, target.len(sys));
    let set = solve_linear_ansatz(sys, target, &ansatz)?;
    let mut ok = true;
    let mut lines = vec![format!(
        "{}: {} unknowns, {} equations, rank {}, {} solution(s)",
        target.name(),
        set.unknowns,
        set.equations,
        set.rank,
        set.elements.len()
    )];
    let mut sols = Vec::new();
    for (k, el) in set.elements.iter().enumerate() {
        let v = decide(target.residual(sys, el)?, &sys.space, DEFAULT_POINTS, 23 + k as u64);
        ok &= v.passed();
        let txt: Vec<String> = el.iter().map(|e| sys.show(e)).collect();
        lines.push(format!("  [{}] ({})  check: {}", k + 1, txt.join(", "), outcome_str(v.outcome)));
        sols.push(json!({ "components": txt, "check": outcome_str(v.outcome) }));
    }
    let js = json!({
        "system": sys.name,
        "target": target.name(),
        "unknowns": set.unknowns,
        "equations": set.equations,
        "rank": set.rank,
        "dimension": set.elements.len(),
        "solutions": sols,
    });
    Ok(Report { lines, json: js, ok })
}

fn toml_str(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn current_block(sys: &PdeSystem, c: &ConservedCurrent) -> Vec<String> {
    let (t, x) = c.current.show(&sys.space);
    let mut out = vec![
        "[[current]]".to_string(),
        format!("name = {}", toml_str(&format!("{} current", c.method))),
        format!("T = {}", toml_str(&t)),
        format!("X = [{}]", x.iter().map(|s| toml_str(s)).collect::<Vec<_>>().join(", ")),
        format!("method = {}", toml_str(&c.method.to_string())),
    ];
    if let Some(q) = &c.multiplier {
        out.push(format!("multiplier = [{}]", q.iter().map(|e| toml_str(&sys.show(e))).collect::<Vec<_>>().join(", ")));
    }
    out
}

fn cmd_build(
    sys: &PdeSystem,
    mult: &str,
    method: &str,
    scaling: Option<&str>,
    u0: Option<&str>,
    degree: u32,
) -> Result<Report> {
    let q = sys.parse_vector(&split_vector(mult), sys.n_eq())?;
    let method = Method::parse(method).ok_or_else(|| Error::Format(format!("unknown method `{method}`")))?;
    let built = match method {
        Method::Homotopy => {
            let base = match u0 {
                Some(s) => sys.parse_vector(&split_vector(s), sys.m())?,
                None => Vec::new(),
            };
            current_from_multiplier_homotopy(sys, &q, &base)?
        }
        Method::Scaling => current_from_multiplier_scaling(sys, &q, sys.scaling(scaling)?)?,
        Method::Direct => current_from_multiplier_direct(sys, &q, &DirectBasis::default_for(sys, &q, degree)?)?,
        m => return Err(Error::Format(format!("method `{m}` is not available from the command line"))),
    };
    let cons = verify_conservation(sys, &built.current)?;
    let exact = matches!(method, Method::Homotopy | Method::Direct);
    let chara = if exact { Some(verify_characteristic(sys, &built.current, &q)?) } else { None };
    let ok = cons.passed() && chara.as_ref().map_or(true, |v| v.passed());
    let mut lines = current_block(sys, &built);
    if let Some(w) = &built.omega {
        lines.push(format!("# omega = {}", show_coeff(w, &sys.space)));
    }
    if let Some(f) = built.freedom {
        lines.push(format!("# trivial-current freedom: {f}"));
    }
    for n in &built.notes {
        lines.push(format!("# {n}"));
    }
    lines.extend(verdict_line(&sys.space, "# conservation", &cons));
    if let Some(v) = &chara {
        lines.extend(verdict_line(&sys.space, "# characteristic form", v));
    }
    let (t, x) = built.current.show(&sys.space);
    let js = json!({
        "system": sys.name,
        "current": {
            "T": t,
            "X": x,
            "method": built.method.to_string(),
            "multiplier": q.iter().map(|e| sys.show(e)).collect::<Vec<_>>(),
        },
        "omega": built.omega.as_ref().map(|w| show_coeff(w, &sys.space)),
        "freedom": built.freedom,
        "notes": built.notes,
        "checks": std::iter::once(verdict_json(&sys.space, "conservation", &cons))
            .chain(chara.iter().map(|v| verdict_json(&sys.space, "characteristic", v)))
            .collect::<Vec<_>>(),
    });
    Ok(Report { lines, json: js, ok })
}

fn cmd_corpus(dir: &Path) -> Result<Report> {
    let rep = corpus::run_dir(dir)?;
    let mut lines = Vec::new();
    for e in &rep.entries {
        lines.push(format!(
            "{:4} {:28} {:8} {:15} {:34} {}",
            if e.ok { "ok" } else { "FAIL" },
            e.file,
            e.bindings.join(","),
            format!("{:?}", e.kind).to_lowercase(),
            e.name,
            e.outcome
        ));
    }
    for (f, err) in &rep.errors {
        lines.push(format!("ERROR {f}: {err}"));
    }
    let failed = rep.failures().len();
    lines.push(format!(
        "{} entries, {} failed, {} file error(s)",
        rep.entries.len(),
        failed,
        rep.errors.len()
    ));
    let ok = rep.passed();
    Ok(Report { lines, json: serde_json::to_value(&rep).unwrap(), ok })
}

fn cmd_euler(sp: &JetSpace, text: &str) -> Result<Report> {
    let f = sp.parse(text)?;
    let e = euler(&f, sp);
    let mut lines = Vec::new();
    let mut js = serde_json::Map::new();
    for (a, x) in e.iter().enumerate() {
        lines.push(format!("E_{}: {}", sp.dep[a], sp.show(x)));
        js.insert(sp.dep[a].clone(), Value::String(sp.show(x)));
    }
    Ok(Report { lines, json: json!({ "euler": js }), ok: true })
}

fn cmd_frechet(sp: &JetSpace, text: &str, dir: &str) -> Result<Report> {
    let f = sp.parse(text)?;
    let v = split_vector(dir).iter().map(|s| sp.parse(s)).collect::<Result<Vec<Expr>>>()?;
    if v.len() != sp.n_dep() {
        return Err(Error::Dimension(format!("direction needs {} component(s)", sp.n_dep())));
    }
    let d = sp.show(&frechet(&f, &v, sp));
    Ok(Report { lines: vec![d.clone()], json: json!({ "frechet": d }), ok: true })
}

fn cmd_helmholtz(sys: &PdeSystem) -> Result<Report> {
    let rep = helmholtz_check(sys);
    let mut lines = Vec::new();
    if !rep.square {
        lines.push("system is not square: not variational as written".into());
    }
    if rep.odd_order {
        lines.push("odd differential order".into());
    }
    let mut res = Vec::new();
    for r in &rep.residuals {
        let txt = truncate(&sys.show(&r.residual));
        lines.push(format!(
            "k={} equation {} variable {} index {:?}: {}",
            r.order, sys.equations[r.equation].name, sys.space.dep[r.variable], r.index, txt
        ));
        res.push(json!({
            "order": r.order,
            "equation": sys.equations[r.equation].name,
            "variable": sys.space.dep[r.variable],
            "index": r.index.to_vec(),
            "residual": txt,
        }));
    }
    lines.push(format!("variational: {}", rep.variational));
    let js = json!({
        "system": sys.name,
        "square": rep.square,
        "odd_order": rep.odd_order,
        "variational": rep.variational,
        "residuals": res,
    });
    Ok(Report { lines, json: js, ok: rep.variational })
}
