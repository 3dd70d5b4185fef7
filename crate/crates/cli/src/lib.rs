//! Command-line front end. [`run`] maps an argument vector to an exit code
//! and the report text, so it can be driven from tests.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use definetti::classes::{classify_classical, classify_free, DEFAULT_MMAX, DEFAULT_ORDER};
use definetti::cumulant::{
    all_words, classical_cumulants_to_moments, free_cumulants_to_moments, pattern_of, Lattice, MomentOracle,
};
use definetti::invariance::{check_invariance, theorem1_probe, Coefficients};
use definetti::io::{self, Record, SpecFile, Value};
use definetti::partition::{all_partitions, filter_decorated, noncrossing_partitions, Decoration, StarPattern};
use definetti::qgroup::{
    check_biunitary, check_family, lattice_position, structural_consequences, FamilyTag,
};
use definetti::{Error, Execution};
use serde::Serialize;
use serde_json::json;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "definetti", version, about = "Free de Finetti verification toolkit")]
struct Cli {
    /// Emit a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for every randomized choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Run on the calling thread only.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Count (and optionally list) partitions of [k].
    Enumerate(EnumerateArgs),
    /// Convert a spec file between moments and cumulants.
    Convert(ConvertArgs),
    /// Classify a distribution by its vanishing cumulants.
    ClassifyDist(ClassifyArgs),
    /// Check a representation against the quantum families.
    CheckRep(CheckRepArgs),
    /// Locate a representation in the subgroup lattice.
    LatticePosition(LatticeArgs),
    /// Check invariance of a free i.i.d. family under a representation.
    CheckInvariance(InvarianceArgs),
    /// Grid of sample classes against family witnesses.
    Theorem1Probe(ProbeArgs),
    /// Write the witness fixtures.
    Fixtures(FixturesArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false, id = "lattice_size")]
struct EnumerateSize {
    /// Noncrossing partitions of [K].
    #[arg(long, value_name = "K")]
    nc: Option<usize>,
    /// All partitions of [K].
    #[arg(long, value_name = "K")]
    all: Option<usize>,
}

#[derive(Debug, Args)]
struct EnumerateArgs {
    #[command(flatten)]
    size: EnumerateSize,
    /// Star pattern for decorated counts, e.g. 1*1*.
    #[arg(long, requires = "class")]
    pattern: Option<StarPattern>,
    /// Decoration: inf, alternating, pair or m:N.
    #[arg(long, requires = "pattern")]
    class: Option<Decoration>,
    /// Print every partition.
    #[arg(long)]
    list: bool,
}

#[derive(Debug, Args)]
#[group(multiple = false)]
struct LatticeFlag {
    #[arg(long)]
    free: bool,
    #[arg(long)]
    classical: bool,
}

impl LatticeFlag {
    fn lattice(&self) -> Lattice {
        if self.classical {
            Lattice::Classical
        } else {
            Lattice::Free
        }
    }
}

#[derive(Debug, Args)]
struct ConvertArgs {
    file: PathBuf,
    #[command(flatten)]
    lattice: LatticeFlag,
    #[arg(long, default_value_t = DEFAULT_ORDER)]
    order: usize,
    /// Output form; defaults to the opposite of the input.
    #[arg(long, value_parser = ["moments", "cumulants"])]
    to: Option<String>,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    file: PathBuf,
    #[command(flatten)]
    lattice: LatticeFlag,
    #[arg(long, default_value_t = DEFAULT_ORDER)]
    order: usize,
    #[arg(long, default_value_t = DEFAULT_MMAX)]
    mmax: u32,
}

#[derive(Debug, Args)]
struct CheckRepArgs {
    file: PathBuf,
    /// Families to check (repeatable); all when absent.
    #[arg(long = "family")]
    families: Vec<FamilyTag>,
    #[arg(long, default_value_t = DEFAULT_MMAX)]
    mmax: u32,
    /// Also report the structural consequences of this pattern's block identity.
    #[arg(long)]
    pattern: Option<StarPattern>,
}

#[derive(Debug, Args)]
struct LatticeArgs {
    file: PathBuf,
    #[arg(long, default_value_t = DEFAULT_MMAX)]
    mmax: u32,
}

#[derive(Debug, Args)]
struct InvarianceArgs {
    #[arg(long)]
    dist: PathBuf,
    #[arg(long)]
    rep: PathBuf,
    #[arg(long, default_value_t = 4)]
    order: usize,
    /// Interleave a seeded pair of non-commuting 2x2 coefficients.
    #[arg(long)]
    matrix_b: bool,
}

#[derive(Debug, Args)]
struct ProbeArgs {
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 5)]
    order: usize,
}

#[derive(Debug, Args)]
struct FixturesArgs {
    #[arg(long, default_value = "fixtures")]
    out: PathBuf,
}

/// Outcome of one command before formatting.
struct Outcome {
    pass: bool,
    text: String,
    payload: serde_json::Value,
}

impl Outcome {
    fn new(pass: bool, text: String, payload: impl Serialize) -> Result<Self, Error> {
        Ok(Outcome { pass, text, payload: serde_json::to_value(payload)? })
    }
}

#[derive(Serialize)]
struct Report<'a> {
    command: &'a str,
    version: &'static str,
    seed: u64,
    exit: i32,
    result: serde_json::Value,
}

/// Runs one command line (`argv[0]` is the program name).
pub fn run<I, T>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            return (code, e.render().to_string());
        }
    };
    let echo = args.iter().skip(1).map(|a| a.to_string_lossy()).collect::<Vec<_>>().join(" ");
    let exec = if cli.sequential { Execution::Sequential } else { Execution::default() };
    match dispatch(&cli, exec) {
        Ok(out) => {
            let code = if out.pass { EXIT_PASS } else { EXIT_FAIL };
            if cli.json {
                let report =
                    Report { command: &echo, version: env!("CARGO_PKG_VERSION"), seed: cli.seed, exit: code, result: out.payload };
                (code, serde_json::to_string_pretty(&report).expect("serializable"))
            } else {
                (code, out.text)
            }
        }
        Err(e) => {
            if cli.json {
                let report = Report {
                    command: &echo,
                    version: env!("CARGO_PKG_VERSION"),
                    seed: cli.seed,
                    exit: EXIT_INPUT,
                    result: json!({ "error": e.to_string() }),
                };
                (EXIT_INPUT, serde_json::to_string_pretty(&report).expect("serializable"))
            } else {
                (EXIT_INPUT, format!("error: {e}"))
            }
        }
    }
}

fn dispatch(cli: &Cli, exec: Execution) -> Result<Outcome, Error> {
    match &cli.command {
        Command::Enumerate(a) => enumerate(a),
        Command::Convert(a) => convert(a),
        Command::ClassifyDist(a) => classify(a),
        Command::CheckRep(a) => check_rep(a, exec),
        Command::LatticePosition(a) => lattice(a, exec),
        Command::CheckInvariance(a) => invariance(a, cli.seed, exec),
        Command::Theorem1Probe(a) => probe(a, exec),
        Command::Fixtures(a) => fixtures(a),
    }
}

fn enumerate(a: &EnumerateArgs) -> Result<Outcome, Error> {
    let (k, parts) = match (a.size.nc, a.size.all) {
        (Some(k), _) => (k, noncrossing_partitions(k)?),
        (None, Some(k)) => (k, all_partitions(k)?),
        (None, None) => unreachable!("clap requires one size flag"),
    };
    let parts = match (&a.pattern, a.class) {
        (Some(p), Some(c)) => {
            if p.len() != k {
                return Err(Error::Input(format!("pattern {p} has length {} but k = {k}", p.len())));
            }
            filter_decorated(&parts, p, c)?
        }
        _ => parts,
    };
    let mut text = parts.len().to_string();
    if a.list {
        for p in &parts {
            write!(text, "\n{p}").expect("string write");
        }
    }
    let listed = a.list.then_some(&parts);
    Outcome::new(true, text, json!({ "k": k, "count": parts.len(), "partitions": listed }))
}

fn convert(a: &ConvertArgs) -> Result<Outcome, Error> {
    let text = std::fs::read_to_string(&a.file)?;
    let file: SpecFile = serde_json::from_str(&text)?;
    let lattice = a.lattice.lattice();
    let to_moments = match a.to.as_deref() {
        Some(t) => t == "moments",
        None => file.moments.is_none(),
    };
    let spec = file.to_spec(lattice)?;
    let out = if to_moments {
        let table = spec.full_table()?;
        let order = a.order.min(table.order());
        let oracle: Box<dyn MomentOracle> = match lattice {
            Lattice::Free => Box::new(free_cumulants_to_moments(&table, order)?),
            Lattice::Classical => Box::new(classical_cumulants_to_moments(&table, order)?),
        };
        let p = table.side();
        let mut records = Vec::new();
        for k in 1..=order {
            for w in all_words(1, k) {
                let ones = vec![definetti::algebra::Elem::identity(p); k + 1];
                let m = oracle.moment(&w, &ones)?;
                if m.is_zero() {
                    continue;
                }
                let value = match m.as_scalar() {
                    Some(z) => Value::Scalar([z.re, z.im]),
                    None => Value::Matrix(m.rows().iter().map(|r| r.iter().map(|z| [z.re, z.im]).collect()).collect()),
                };
                records.push(Record { pattern: pattern_of(&w), word: None, basis: None, value });
            }
        }
        SpecFile { p, order, selfadjoint: false, shift: None, cumulants: None, moments: Some(records), name: file.name }
    } else {
        let mut out = SpecFile::from_spec(&spec);
        out.name = file.name;
        out
    };
    let body = serde_json::to_string_pretty(&out)?;
    Outcome::new(true, body, out)
}

fn classify(a: &ClassifyArgs) -> Result<Outcome, Error> {
    let lattice = a.lattice.lattice();
    let spec = io::load_spec(&a.file, lattice)?;
    let order = a.order.min(spec.order());
    let (text, payload) = match lattice {
        Lattice::Free => {
            let c = classify_free(&spec, order, a.mmax)?;
            (class_text(&c.tags, &c.minimal, &c.noncanonical), serde_json::to_value(&c)?)
        }
        Lattice::Classical => {
            let c = classify_classical(&spec, order, a.mmax)?;
            (class_text(&c.tags, &c.minimal, &c.noncanonical), serde_json::to_value(&c)?)
        }
    };
    Outcome::new(true, text, payload)
}

fn class_text<T: std::fmt::Display>(
    tags: impl IntoIterator<Item = T>,
    minimal: &[impl std::fmt::Display],
    noncanonical: &[String],
) -> String {
    let tags: Vec<String> = tags.into_iter().map(|t| t.to_string()).collect();
    let minimal: Vec<String> = minimal.iter().map(|t| t.to_string()).collect();
    let mut text = format!("tags: {}\nminimal: {}", tags.join(" "), minimal.join(" "));
    if !noncanonical.is_empty() {
        write!(text, "\nnoncanonical: {}", noncanonical.join(" ")).expect("string write");
    }
    text
}

fn load_rep(path: &PathBuf) -> Result<definetti::qgroup::MatrixRep, Error> {
    io::load_rep(path)
}

fn check_rep(a: &CheckRepArgs, exec: Execution) -> Result<Outcome, Error> {
    let rep = load_rep(&a.file)?;
    let b = check_biunitary(&rep);
    let tags: Vec<FamilyTag> = if a.families.is_empty() {
        definetti::qgroup::Family::all(a.mmax).into_iter().map(FamilyTag::from).collect()
    } else {
        a.families.clone()
    };
    let checks = tags.iter().map(|&t| check_family(&rep, t, exec)).collect::<Result<Vec<_>, _>>()?;
    let mut text = format!("n = {}, d = {}, biunitary residual {:.3e}", rep.n(), rep.d(), b.residual);
    for c in &checks {
        let mark = if c.holds { "pass" } else { "fail" };
        write!(text, "\n{mark} {} (residual {:.3e})", c.family, c.residual).expect("string write");
        if let Some(why) = &c.failed {
            write!(text, ": {why}").expect("string write");
        }
    }
    let structure = a.pattern.as_ref().map(|p| structural_consequences(&rep, p)).transpose()?;
    if let Some(s) = &structure {
        write!(text, "\nblock identity {}: {}", s.pattern, if s.hypothesis { "holds" } else { "fails" })
            .expect("string write");
        for c in &s.consequences {
            write!(text, "\n  {} {} ({:.3e})", if c.holds { "ok" } else { "broken" }, c.name, c.residual)
                .expect("string write");
        }
    }
    // Without explicit families every check is informational.
    let pass = a.families.is_empty() || checks.iter().all(|c| c.holds);
    let pass = pass && structure.as_ref().is_none_or(|s| !s.contradiction);
    Outcome::new(pass, text, json!({ "biunitary": b, "families": checks, "structure": structure }))
}

fn lattice(a: &LatticeArgs, exec: Execution) -> Result<Outcome, Error> {
    let rep = load_rep(&a.file)?;
    let pos = lattice_position(&rep, a.mmax, exec)?;
    let names = |v: &[definetti::qgroup::Family]| v.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(" ");
    let mut text = format!(
        "minimal: {}\nsatisfied: {}\nscan: 3 <= m <= {}",
        names(&pos.minimal),
        names(&pos.satisfied),
        pos.mmax
    );
    if !pos.implied.is_empty() {
        write!(text, "\nimplied by closure but failing: {}", names(&pos.implied)).expect("string write");
    }
    Outcome::new(pos.implied.is_empty(), text, pos)
}

fn invariance(a: &InvarianceArgs, seed: u64, exec: Execution) -> Result<Outcome, Error> {
    let rep = load_rep(&a.rep)?;
    let mut spec = io::load_spec(&a.dist, Lattice::Free)?;
    let coeffs = if a.matrix_b {
        if spec.side() == 1 {
            spec = definetti::classes::CumulantSpec::new(
                spec.table().amplify(2)?,
                definetti::algebra::Elem::scaled_identity(2, spec.shift().as_scalar().expect("scalar")),
                spec.is_selfadjoint(),
            )?;
        }
        Coefficients::NonCommuting { seed }
    } else {
        Coefficients::Identity
    };
    let order = a.order;
    if order > spec.order() {
        return Err(Error::Incomplete(format!("spec has order {} but {order} was requested", spec.order())));
    }
    let joint = definetti::cumulant::FreeFamily::new(spec.full_table()?.truncated(order), rep.n())?;
    let v = check_invariance(&joint, &rep, order, coeffs, exec)?;
    let text = match &v.first_violation {
        None => format!("invariant through order {order} (worst residual {:.3e})", v.worst_residual),
        Some(x) => format!(
            "not invariant: order {}, pattern {}, target {:?}, residual {:.3e}",
            x.order, x.pattern, x.target, x.residual
        ),
    };
    Outcome::new(v.invariant, text, v)
}

fn probe(a: &ProbeArgs, exec: Execution) -> Result<Outcome, Error> {
    let g = theorem1_probe(a.n, a.order, exec)?;
    let mut text = String::from("class \\ witness");
    let columns: Vec<String> = definetti::qgroup::Family::NINE.iter().map(|f| f.to_string()).collect();
    for c in &columns {
        write!(text, " | {c}").expect("string write");
    }
    for (class, row) in &g.rows {
        write!(text, "\n{class}").expect("string write");
        for c in &columns {
            let cell = &row.cells[c];
            let mark = if cell.invariant { "pass" } else { "fail" };
            let flag = if cell.invariant != cell.expected { "!" } else { "" };
            write!(text, " | {mark}{flag}").expect("string write");
        }
    }
    write!(
        text,
        "\nmismatches with the diagram: {}\nmismatches with the completed order: {}",
        g.mismatches.len(),
        g.mismatches_completed.len()
    )
    .expect("string write");
    Outcome::new(g.mismatches.is_empty(), text, g)
}

fn fixtures(a: &FixturesArgs) -> Result<Outcome, Error> {
    let written = io::write_fixtures(&a.out)?;
    let names: Vec<String> = written.iter().map(|p| p.display().to_string()).collect();
    Outcome::new(true, names.join("\n"), names)
}
