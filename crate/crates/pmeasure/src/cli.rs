//! Command-line surface. `run` does all the work and returns what should be
//! printed, so the binary stays a thin wrapper and tests can call it directly.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use pmeasure_core::amalgam::{
    amalgam_lattice_ops, amalgam_measure, amalgam_order, check_order_independence, check_propagation,
    check_simplebvd, compute_bullets, AmalgamError, MeasuredDiagram,
};
use pmeasure_core::construct::{
    represent_diagram, represent_semilattice, verify_representation, verify_run, CheckEntry, ConstructError,
    ConstructOptions, ConstructionRun, RunReport, CHAIN_BOUND, DEFAULT_BUDGET,
};
use pmeasure_core::diagram::SemilatticeDiagram;
use pmeasure_core::lab::cube::{A, B, C};
use pmeasure_core::lab::{
    build_cube, composition_laws, cube_obstruction, enumerate_pmeasures, find_noncomposing_interval_triple,
    Constraints, CubeFixture, EnumerateError,
};
use pmeasure_core::measure::{check_p1, check_p2, check_p3, MeasureViolation, P2Mode, PMeasuredPoset};
use pmeasure_core::semilattice::{set_name, FiniteJoinSemilattice};
use serde_json::{json, Value};

use crate::doc::{self, DocError, Envelope, Input, Kind};
use crate::dot;

#[derive(Debug, Parser)]
#[command(name = "pmeasure", version, about = "Represent finite distributive semilattices by p-measured lattices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a p-measured lattice for a semilattice, or the blocks of a diagram.
    Represent {
        input: PathBuf,
        /// Write the result document here and print the check report instead.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write a Hasse diagram of the (top) result.
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Largest number of points allowed at one level.
        #[arg(long, env = "PMEASURE_BUDGET", default_value_t = DEFAULT_BUDGET)]
        budget: usize,
    },
    /// Check a measured poset against a target semilattice.
    Verify {
        measured: PathBuf,
        #[arg(long)]
        semilattice: PathBuf,
        #[arg(long, value_enum, default_value_t = P2Arg::All)]
        p2_mode: P2Arg,
    },
    /// Amalgamate the blocks below one index of a diagram.
    Amalgam {
        diagram: PathBuf,
        #[arg(long)]
        top: String,
        #[arg(long, env = "PMEASURE_BUDGET", default_value_t = DEFAULT_BUDGET)]
        budget: usize,
    },
    #[command(subcommand)]
    Counterexample(Counterexample),
    #[command(subcommand)]
    Oracle(Oracle),
}

#[derive(Debug, Subcommand)]
pub enum Counterexample {
    /// Cube-indexed blocks with no common extension.
    Cube {
        /// Read the measured cube diagram from a file instead of the built-in one.
        #[arg(long)]
        diagram: Option<PathBuf>,
    },
    /// Composition laws of extension kinds over small towers.
    IntCompose {
        #[arg(long, default_value_t = 5)]
        max: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum Oracle {
    /// Compare chain meets of two lengths on every amalgam of a diagram.
    Simplebvd {
        diagram: PathBuf,
        #[arg(long, default_value_t = CHAIN_BOUND)]
        chain_bound: usize,
        #[arg(long, env = "PMEASURE_BUDGET", default_value_t = DEFAULT_BUDGET)]
        budget: usize,
    },
    /// Count every p-measure on a poset valued in a semilattice.
    Enumerate {
        poset: PathBuf,
        semilattice: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        node_budget: usize,
        /// Include every measure found in the report.
        #[arg(long)]
        list: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum P2Arg {
    All,
    Bounded,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Doc { path: PathBuf, source: DocError },
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Budget(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Budget(_) => EXIT_BUDGET,
            _ => EXIT_INPUT,
        }
    }
}

impl From<ConstructError> for CliError {
    fn from(e: ConstructError) -> Self {
        match e {
            ConstructError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            e => CliError::Input(e.to_string()),
        }
    }
}

/// What a command wants printed, and its exit code.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { stderr: text, code: EXIT_INPUT, ..Outcome::default() }
            } else {
                Outcome { stdout: text, ..Outcome::default() }
            };
        }
    };
    let start = Instant::now();
    let mut out = match execute(cli.command) {
        Ok(o) => o,
        Err(e) => Outcome { stderr: format!("error: {e}\n"), code: e.code(), ..Outcome::default() },
    };
    out.stderr.push_str(&format!("elapsed: {} ms\n", start.elapsed().as_millis()));
    out
}

fn execute(c: Command) -> Result<Outcome, CliError> {
    match c {
        Command::Represent { input, out, dot, budget } => represent(&input, out.as_deref(), dot.as_deref(), budget),
        Command::Verify { measured, semilattice, p2_mode } => verify(&measured, &semilattice, p2_mode),
        Command::Amalgam { diagram, top, budget } => amalgam(&diagram, &top, budget),
        Command::Counterexample(Counterexample::Cube { diagram }) => cube(diagram.as_deref()),
        Command::Counterexample(Counterexample::IntCompose { max }) => int_compose(max),
        Command::Oracle(Oracle::Simplebvd { diagram, chain_bound, budget }) => simplebvd(&diagram, chain_bound, budget),
        Command::Oracle(Oracle::Enumerate { poset, semilattice, node_budget, list }) => {
            enumerate(&poset, &semilattice, node_budget, list)
        }
    }
}

fn read(path: &Path) -> Result<Envelope, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    doc::read_envelope(&text).map_err(|source| CliError::Doc { path: path.to_path_buf(), source })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn in_file<T>(path: &Path, r: Result<T, DocError>) -> Result<T, CliError> {
    r.map_err(|source| CliError::Doc { path: path.to_path_buf(), source })
}

fn report_text(r: &RunReport, summary: &str, data: Option<Value>) -> String {
    doc::to_text(&doc::envelope(Kind::RunReport, &doc::report_doc(r, summary, data)))
}

fn failures_text(r: &RunReport) -> String {
    r.failures()
        .map(|e| format!("  failed {}/{}: {}\n", e.scope, e.name, e.detail.as_deref().unwrap_or("")))
        .collect()
}

fn level_stats(run: &ConstructionRun) -> String {
    run.stats
        .iter()
        .map(|s| {
            format!(
                "  level {}: amalgam {}, gadgets {} ({} fillers), block {}\n",
                s.level, s.amalgam_size, s.gadgets, s.fillers, s.block_size
            )
        })
        .collect()
}

fn represent(input: &Path, out: Option<&Path>, dot_path: Option<&Path>, budget: usize) -> Result<Outcome, CliError> {
    let env = read(input)?;
    let opts = ConstructOptions { budget, ..ConstructOptions::default() };
    let (result, report, summary, dot_text, stats) = match in_file(input, doc::parse_input(&env))? {
        Input::Semilattice(s) => {
            let rep = represent_semilattice(&s, opts)?;
            let report = verify_representation(&rep);
            let summary = format!("{} elements represented by {} points", s.len(), rep.measured.len());
            let result = doc::envelope(Kind::MeasuredPoset, &doc::measured_doc(&rep.measured, true));
            (result, report, summary, dot::measured_dot(&rep.measured), level_stats(&rep.run))
        }
        Input::Diagram(d, _) => {
            let run = represent_diagram(&d, opts)?;
            let report = verify_run(&run);
            let top = run.maximal_indices()[0];
            let block = run.block(top);
            let summary = format!("{} levels, {} points at {}", run.diagram.index.len(), block.len(), run.diagram.index.name(top));
            let result = doc::envelope(Kind::Diagram, &doc::diagram_doc(&run.diagram, Some(&run.output)));
            (result, report, summary, dot::measured_dot(block), level_stats(&run))
        }
    };
    let mut o = Outcome { stderr: format!("{summary}\n{stats}"), ..Outcome::default() };
    if let Some(p) = dot_path {
        write(p, &dot_text)?;
    }
    let result_text = doc::to_text(&result);
    if let Some(p) = out {
        write(p, &result_text)?;
    }
    if !report.all_ok() {
        o.stderr.push_str(&failures_text(&report));
        o.stdout = report_text(&report, &summary, None);
        o.code = EXIT_FAILED;
    } else if out.is_some() {
        o.stdout = report_text(&report, &summary, None);
    } else {
        o.stdout = result_text;
    }
    Ok(o)
}

fn entry(scope: &str, name: &str, failure: Option<String>) -> CheckEntry {
    CheckEntry { scope: scope.to_string(), name: name.to_string(), ok: failure.is_none(), detail: failure }
}

/// The measure checks with failures spelled out in element names.
pub fn measure_report(m: &PMeasuredPoset, mode: P2Mode) -> RunReport {
    let n = |x: usize| m.poset.element(x).to_string();
    let s = &*m.target;
    let scope = "measure";
    let mut r = RunReport::default();
    let validate = m.validate().err().map(|e| match e {
        MeasureViolation::Malformed => e.to_string(),
        MeasureViolation::Vanishing(x, y) => format!("value at ({}, {}) should vanish since {} <= {}", n(x), n(y), n(x), n(y)),
        MeasureViolation::Triangle(x, y, z) => format!(
            "triangle ({}, {}, {}): {} is not below {} v {}",
            n(x),
            n(y),
            n(z),
            s.name(m.value(x, z)),
            s.name(m.value(x, y)),
            s.name(m.value(y, z))
        ),
    });
    let malformed = validate.is_some();
    r.entries.push(entry(scope, "measure", validate));
    if malformed {
        return r;
    }
    r.entries.push(entry(
        scope,
        "p1",
        check_p1(m).err().map(|(x, y)| format!("distinct {} <= {} at distance 0", n(x), n(y))),
    ));
    r.entries.push(entry(
        scope,
        "p2",
        check_p2(m, mode).err().map(|f| {
            format!("no chain from {} to {} with steps below {} or {}", n(f.u), n(f.v), s.name(f.a), s.name(f.b))
        }),
    ));
    r.entries.push(entry(scope, "p3", check_p3(m).err().map(|e| match e {
        pmeasure_core::measure::P3Failure::NotGenerating(v) => format!("{} is not generated", s.name(v)),
        e => e.to_string(),
    })));
    r.entries.push(entry(
        "target",
        "distributive",
        s.distributivity_witness().map(|(a, b, c)| format!("{} <= {} v {} does not split", s.name(c), s.name(a), s.name(b))),
    ));
    r
}

fn verify(measured: &Path, semilattice: &Path, mode: P2Arg) -> Result<Outcome, CliError> {
    let senv = read(semilattice)?;
    let sdoc = in_file(semilattice, doc::payload(&senv, Kind::Semilattice))?;
    let s = Arc::new(in_file(semilattice, doc::parse_semilattice(&sdoc))?);
    let menv = read(measured)?;
    let mdoc = in_file(measured, doc::payload(&menv, Kind::MeasuredPoset))?;
    let m = in_file(measured, doc::parse_measured(&mdoc, Some(s)))?;
    let mode = match mode {
        P2Arg::All => P2Mode::All,
        P2Arg::Bounded => P2Mode::Bounded,
    };
    let r = measure_report(&m, mode);
    let failed = r.failures().count();
    let summary = if failed == 0 { format!("{} points, all checks pass", m.len()) } else { format!("{failed} checks fail") };
    let code = if failed == 0 { EXIT_OK } else { EXIT_FAILED };
    Ok(Outcome { stdout: report_text(&r, &summary, None), stderr: format!("{summary}\n{}", failures_text(&r)), code })
}

/// The blocks of a diagram document, constructing them when the file has none.
fn measured_diagram(path: &Path, budget: usize) -> Result<(MeasuredDiagram, bool), CliError> {
    let env = read(path)?;
    let ddoc = in_file(path, doc::payload(&env, Kind::Diagram))?;
    let (d, md): (SemilatticeDiagram, _) = in_file(path, doc::parse_diagram(&ddoc))?;
    Ok(match md {
        Some(md) => (md, false),
        None => {
            let run = represent_diagram(&d, ConstructOptions { budget, ..ConstructOptions::default() })?;
            (run.output, true)
        }
    })
}

fn amalgam(path: &Path, top: &str, budget: usize) -> Result<Outcome, CliError> {
    let (md, _) = measured_diagram(path, budget)?;
    let i = md.diagram.index.index_of_name(top).ok_or_else(|| CliError::Input(format!("no index named {top:?}")))?;
    let ideal = md.restrict_to_ideal(i);
    let a = amalgam_order(&ideal, Some(i)).map_err(|e| CliError::Input(format!("amalgam below {top}: {e}")))?;
    let mut r = RunReport::default();
    r.push(top, "order", check_order_independence(&ideal, &a));
    r.push(top, "lattice", amalgam_lattice_ops(&ideal, &a).map(|_| ()));
    r.push(top, "bullets", compute_bullets(&ideal, &a));
    let data = match amalgam_measure(&ideal, &a, i) {
        Ok(m) => {
            r.push(top, "p-measure", m.measured.validate());
            r.push(top, "chain-bound", check_simplebvd(&m, CHAIN_BOUND));
            r.push(top, "propagation", check_propagation(&ideal, &a, &m));
            Some(serde_json::to_value(doc::measured_doc(&m.measured, true)).expect("documents serialize"))
        }
        Err(e) => {
            r.push(top, "p-measure", Err(e));
            None
        }
    };
    let summary = format!("{} points from {} blocks", a.len(), a.members.len());
    let code = if r.all_ok() { EXIT_OK } else { EXIT_FAILED };
    Ok(Outcome { stdout: report_text(&r, &summary, data), stderr: format!("{summary}\n{}", failures_text(&r)), code })
}

/// Rebuilds the cube fixture from a measured diagram document. The values of
/// the blocks must be the fixture's generator tables.
pub fn cube_from_diagram(md: MeasuredDiagram) -> Result<CubeFixture, String> {
    let top = md.diagram.index.index_of_name("{0,1,2}").ok_or("no index named {0,1,2}")?;
    let fixture = CubeFixture { diagram: md.diagram.clone(), top, blocks: md, c: C, a: A, b: B };
    let builtin = build_cube().map_err(|e| e.to_string())?;
    for (i, b) in &fixture.blocks.blocks {
        let name = fixture.diagram.index.name(*i);
        let j = builtin.diagram.index.index_of_name(name).ok_or_else(|| format!("unexpected index {name}"))?;
        let expected = builtin.blocks.blocks.get(&j).ok_or_else(|| format!("unexpected block at {name}"))?;
        if doc::measured_doc(b, true) != doc::measured_doc(expected, true) {
            return Err(format!("block at {name} differs from the generator tables"));
        }
    }
    if fixture.blocks.blocks.len() != builtin.blocks.blocks.len() {
        return Err(format!("expected {} blocks, found {}", builtin.blocks.blocks.len(), fixture.blocks.blocks.len()));
    }
    Ok(fixture)
}

fn sets(masks: &[u64]) -> Vec<String> {
    masks.iter().map(|&m| set_name(m)).collect()
}

fn cube(path: Option<&Path>) -> Result<Outcome, CliError> {
    let f = match path {
        None => build_cube().map_err(|e| CliError::Input(e.to_string()))?,
        Some(p) => {
            let (md, constructed) = measured_diagram(p, DEFAULT_BUDGET)?;
            if constructed {
                return Err(CliError::Input(format!("{}: the cube diagram needs its blocks", p.display())));
            }
            cube_from_diagram(md).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?
        }
    };
    let o = cube_obstruction(&f);
    let top = &f.diagram.objects[f.top];
    let mut r = RunReport::default();
    r.push("diagram", "normal", o.normal.normal.clone());
    r.push("diagram", "interval", o.normal.interval.clone());
    r.push("diagram", "extension", o.normal.extension.clone());
    for (name, count) in &o.block_counts {
        r.entries.push(entry(name, "unique", (*count != 1).then(|| format!("{count} measures"))));
    }
    r.entries.push(entry("top", "no-extension", (o.extensions != 0).then(|| format!("{} extensions", o.extensions))));
    r.entries.push(entry(
        "top",
        "triangle-fails",
        (o.missing == 0).then(|| String::from("the forced values satisfy the triangle inequality")),
    ));
    let summary = format!("{} \u{2284} {} \u{222a} {}", set_name(o.x0_x2), set_name(o.x0_x1), set_name(o.x1_x2));
    let data = json!({
        "c": f.c.iter().map(|row| sets(row)).collect::<Vec<_>>(),
        "a": sets(&f.a),
        "b": sets(&f.b),
        "forced": {
            "x0,x2": set_name(o.x0_x2),
            "x0,x1": set_name(o.x0_x1),
            "x1,x2": set_name(o.x1_x2),
        },
        "missing": set_name(o.missing),
        "block-counts": o.block_counts.iter().map(|(n, c)| (n.clone(), *c)).collect::<BTreeMap<_, _>>(),
        "extensions": o.extensions,
        "top-size": top.len(),
        "doubling": {
            "db1": o.doubling.db1.as_ref().err().map(|e| e.to_string()),
            "db2": o.doubling.db2.as_ref().err().map(|e| e.to_string()),
        },
        "amalgam": doc::poset_doc(&o.amalgam),
    });
    let code = if r.all_ok() { EXIT_OK } else { EXIT_FAILED };
    let stderr = format!("triangle at (x0, x1, x2): {summary}\n{}", failures_text(&r));
    Ok(Outcome { stdout: report_text(&r, &summary, Some(data)), stderr, code })
}

fn int_compose(max: usize) -> Result<Outcome, CliError> {
    let s = composition_laws(max);
    let witness = find_noncomposing_interval_triple(max);
    let mut r = RunReport::default();
    for (name, law) in [
        ("rc-rc", pmeasure_core::extension::LawViolation::RcRc),
        ("int-cov", pmeasure_core::extension::LawViolation::IntCov),
        ("cov-cov", pmeasure_core::extension::LawViolation::CovCov),
    ] {
        let bad = s.violations.iter().filter(|(v, _)| *v == law).count();
        r.entries.push(entry("laws", name, (bad > 0).then(|| format!("{bad} towers"))));
    }
    let summary = match &witness {
        Some(t) => format!("{} towers, int o int fails with |R| = {}", s.towers, t.r.len()),
        None => format!("{} towers, int o int never fails", s.towers),
    };
    let data = json!({
        "towers": s.towers,
        "rc-rc": s.rc_rc,
        "int-cov": s.int_cov,
        "cov-cov": s.cov_cov,
        "int-int": s.int_int,
        "int-int-failures": s.int_int_failures,
        "witness": witness.map(|t| json!({
            "p": doc::poset_doc(&t.p),
            "q": doc::poset_doc(&t.q),
            "r": doc::poset_doc(&t.r),
        })),
    });
    let code = if r.all_ok() { EXIT_OK } else { EXIT_FAILED };
    Ok(Outcome { stdout: report_text(&r, &summary, Some(data)), stderr: format!("{summary}\n{}", failures_text(&r)), code })
}

fn simplebvd(path: &Path, bound: usize, budget: usize) -> Result<Outcome, CliError> {
    let (md, _) = measured_diagram(path, budget)?;
    let ix = &md.diagram.index;
    let mut r = RunReport::default();
    let mut sizes = BTreeMap::new();
    for level in ix.by_height() {
        let ideal = md.restrict_to_ideal(level);
        let a = match amalgam_order(&ideal, Some(level)) {
            Ok(a) => a,
            Err(AmalgamError::NoBlocks) => continue,
            Err(e) => {
                r.push(ix.name(level), "chain-bound", Err(e));
                continue;
            }
        };
        sizes.insert(ix.name(level).to_string(), a.len());
        match amalgam_measure(&ideal, &a, level) {
            Ok(m) => r.push(ix.name(level), "chain-bound", check_simplebvd(&m, bound)),
            Err(e) => r.push(ix.name(level), "chain-bound", Err(e)),
        }
    }
    let summary = format!("{} amalgams, chain bound 3 against {bound}", r.entries.len());
    let code = if r.all_ok() { EXIT_OK } else { EXIT_FAILED };
    let data = json!({ "amalgam-sizes": sizes });
    Ok(Outcome { stdout: report_text(&r, &summary, Some(data)), stderr: format!("{summary}\n{}", failures_text(&r)), code })
}

fn enumerate(poset: &Path, semilattice: &Path, budget: usize, list: bool) -> Result<Outcome, CliError> {
    let penv = read(poset)?;
    let p = in_file(poset, doc::payload(&penv, Kind::Poset).and_then(|d| doc::parse_poset(&d)))?;
    let senv = read(semilattice)?;
    let s: FiniteJoinSemilattice = in_file(semilattice, doc::payload(&senv, Kind::Semilattice).and_then(|d| doc::parse_semilattice(&d)))?;
    let mut found = Vec::new();
    let count = enumerate_pmeasures(&p, Arc::new(s), &Constraints::default(), budget, |m| {
        if list {
            found.push(serde_json::to_value(doc::measured_doc(m, false)).expect("documents serialize"));
        }
        true
    })
    .map_err(|e| match e {
        EnumerateError::BudgetExceeded(_) => CliError::Budget(e.to_string()),
        e => CliError::Input(e.to_string()),
    })?;
    let summary = format!("{count} p-measures");
    let mut data = json!({ "count": count });
    if list {
        data["measures"] = Value::Array(found);
    }
    Ok(Outcome { stdout: report_text(&RunReport::default(), &summary, Some(data)), stderr: format!("{summary}\n"), code: EXIT_OK })
}
