//! Batch verification of system files carrying known multipliers and currents.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::coeff::Q;
use crate::current_builder::{verify_characteristic, verify_conservation};
use crate::detsys::verify_multiplier;
use crate::error::{Error, Result};
use crate::expr::ZeroTest;
use crate::oracle::{Outcome, Verdict};
use crate::pde_system::{truncate, Expect, PdeSystem};
use crate::varcalc::Current;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryKind {
    Identity,
    Multiplier,
    Conservation,
    Characteristic,
}

#[derive(Clone, Debug, Serialize)]
pub struct EntryResult {
    pub file: String,
    pub system: String,
    /// Parameter values the file was loaded with, as `name=value`.
    pub bindings: Vec<String>,
    pub kind: EntryKind,
    pub name: String,
    pub expect_pass: bool,
    pub outcome: String,
    /// Whether the outcome matches the expectation.
    pub ok: bool,
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CorpusReport {
    pub entries: Vec<EntryResult>,
    /// Files that failed to load, with the error.
    pub errors: Vec<(String, String)>,
}

impl CorpusReport {
    pub fn passed(&self) -> bool {
        self.errors.is_empty() && self.entries.iter().all(|e| e.ok)
    }

    pub fn failures(&self) -> Vec<&EntryResult> {
        self.entries.iter().filter(|e| !e.ok).collect()
    }
}

fn outcome_name(o: Outcome) -> &'static str {
    match o {
        Outcome::Pass => "pass",
        Outcome::Fail => "fail",
        Outcome::Undetermined => "undetermined",
    }
}

fn entry(
    sys: &PdeSystem,
    file: &str,
    bindings: &[String],
    kind: EntryKind,
    name: &str,
    expect: Expect,
    v: Result<Verdict>,
) -> EntryResult {
    let expect_pass = expect == Expect::Conserved;
    let (outcome, ok, detail) = match v {
        Ok(v) => {
            let ok = match v.outcome {
                Outcome::Pass => expect_pass,
                Outcome::Fail => !expect_pass,
                Outcome::Undetermined => false,
            };
            let detail = (v.outcome != Outcome::Pass)
                .then(|| truncate(&v.residuals.iter().map(|r| sys.show(r)).collect::<Vec<_>>().join("; ")));
            (outcome_name(v.outcome).to_string(), ok, detail)
        }
        Err(e) => ("error".to_string(), false, Some(e.to_string())),
    };
    EntryResult {
        file: file.to_string(),
        system: sys.name.clone(),
        bindings: bindings.to_vec(),
        kind,
        name: name.to_string(),
        expect_pass,
        outcome,
        ok,
        detail,
    }
}

/// Verify every known entry of one loaded system.
pub fn check_system(sys: &PdeSystem, file: &str, bindings: &[String]) -> Result<Vec<EntryResult>> {
    let report = sys.validate()?;
    let mut out = Vec::new();
    for (id, z) in sys.identities.iter().zip(&report.identities) {
        let outcome = match z {
            ZeroTest::Zero => Outcome::Pass,
            ZeroTest::NonZero => Outcome::Fail,
            ZeroTest::Undetermined => Outcome::Undetermined,
        };
        let v = Verdict {
            outcome,
            residuals: vec![sys.apply_identity(id)],
            symbolic: *z,
            numeric: None,
            cleared_denominators: false,
        };
        out.push(entry(sys, file, bindings, EntryKind::Identity, &id.name, Expect::Conserved, Ok(v)));
    }
    let mults: Vec<EntryResult> = sys
        .multipliers
        .par_iter()
        .map(|m| entry(sys, file, bindings, EntryKind::Multiplier, &m.name, m.expect, verify_multiplier(sys, &m.q)))
        .collect();
    out.extend(mults);
    let curs: Vec<Vec<EntryResult>> = sys
        .currents
        .par_iter()
        .map(|c| {
            let cur = Current { t: c.t.clone(), x: c.x.clone() };
            let mut v =
                vec![entry(sys, file, bindings, EntryKind::Conservation, &c.name, c.expect, verify_conservation(sys, &cur))];
            if let Some(q) = &c.multiplier {
                let r = verify_characteristic(sys, &cur, q);
                v.push(entry(sys, file, bindings, EntryKind::Characteristic, &c.name, c.expect, r));
            }
            v
        })
        .collect();
    out.extend(curs.into_iter().flatten());
    Ok(out)
}

fn show_bindings(b: &[(String, Q)]) -> Vec<String> {
    b.iter().map(|(k, v)| format!("{k}={v}")).collect()
}

/// Run one file: once as written and once per parameter set named in its
/// `when` clauses.
pub fn run_file(path: &Path, overrides: &[(String, Q)]) -> Result<Vec<EntryResult>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let file = path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
    let mut sets = vec![overrides.to_vec()];
    if overrides.is_empty() {
        sets.extend(PdeSystem::conditions_in(&text)?);
    }
    let mut out = Vec::new();
    for set in sets {
        let sys = PdeSystem::from_toml(&text, &set)?;
        out.extend(check_system(&sys, &file, &show_bindings(&set))?);
    }
    Ok(out)
}

/// All `.toml` files directly inside `dir`, sorted by name.
pub fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let rd = std::fs::read_dir(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> =
        rd.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.extension().is_some_and(|x| x == "toml")).collect();
    files.sort();
    Ok(files)
}

/// Run every file in a corpus directory in parallel. An empty directory is
/// an error.
pub fn run_dir(dir: &Path) -> Result<CorpusReport> {
    let files = corpus_files(dir)?;
    if files.is_empty() {
        return Err(Error::Io(format!("{}: no system files", dir.display())));
    }
    let results: Vec<(String, Result<Vec<EntryResult>>)> =
        files.par_iter().map(|p| (p.display().to_string(), run_file(p, &[]))).collect();
    let mut rep = CorpusReport::default();
    for (f, r) in results {
        match r {
            Ok(v) => rep.entries.extend(v),
            Err(e) => rep.errors.push((f, e.to_string())),
        }
    }
    Ok(rep)
}

/// Directory of the corpus shipped with the crate.
pub fn bundled_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}
