//! `qcodes`: build, decode and measure quasi-cyclic codes from the shell.
//!
//! Reports are JSON lines on stdout; algebraic objects go to files in the
//! plain-text formats of `qcodes::io`. Exit status is 0 on success, 1 when a
//! check or decoding fails, and 2 on bad input.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qcodes::decode::{decode, Strategy};
use qcodes::distance::{
    block_min_distance, min_distance_enum, min_distance_low_weight, DistanceReport, ENUM_BUDGET, SUPPORT_BUDGET,
};
use qcodes::evalcode::{eval_code_build, EvalSpec, Projection};
use qcodes::galois::{Field, FieldRef};
use qcodes::io;
use qcodes::qbch::{
    primitive_root_companion, qbch_build, scan_primitive_roots, verify_primitive_root, PrimitiveRoot, Provenance,
    QbchSpec,
};
use qcodes::qccore::LinearCode;
use qcodes::recipe::{export, root_hash, Recipe};
use qcodes::repro::{run_criterion, Reference, CRITERIA};
use qcodes::simulate::{simulate, ChannelModel};
use qcodes::Error;

#[derive(Parser)]
#[command(name = "qcodes", version, about = "Quasi-cyclic codes over finite fields")]
struct Cli {
    /// Worker threads for parallel searches (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a field definition line.
    Field(FieldArgs),
    /// Construct or verify a matrix primitive root of unity.
    Root(RootArgs),
    /// Quasi-BCH codes.
    #[command(subcommand)]
    Qbch(QbchCommand),
    /// Evaluation codes.
    #[command(subcommand)]
    Evalcode(EvalCommand),
    /// Minimum distance of a code file.
    Distance(DistanceArgs),
    /// Decode random block errors and report the success rate.
    Simulate(SimulateArgs),
    /// Reproduce the published examples.
    VerifyPaper(VerifyArgs),
    /// Code-table entry with a rebuild recipe.
    Export(ExportArgs),
}

#[derive(Args)]
struct FieldArgs {
    #[arg(long)]
    p: u32,
    #[arg(long)]
    degree: u32,
    /// Modulus coefficients c0,...,cd (default: built-in table).
    #[arg(long, value_delimiter = ',')]
    modulus: Option<Vec<u32>>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RootArgs {
    #[arg(long)]
    q: Option<u32>,
    #[arg(long, default_value_t = 1)]
    s: u32,
    #[arg(long)]
    l: Option<usize>,
    #[arg(long)]
    m: usize,
    /// `companion`, `scan:N` (N-th root in scan order) or a root file.
    #[arg(long, default_value = "companion")]
    source: String,
    /// Check the root in this file instead of constructing one.
    #[arg(long, conflicts_with = "source")]
    verify: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum QbchCommand {
    Build(QbchBuildArgs),
    Decode(QbchDecodeArgs),
}

#[derive(Args)]
struct QbchBuildArgs {
    #[arg(long)]
    q: u32,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    l: usize,
    #[arg(long)]
    s: u32,
    #[arg(long)]
    delta: usize,
    /// `companion`, `scan:N` or a root file.
    #[arg(long, default_value = "companion")]
    root: String,
    /// Code file to write.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Parameter file for `qbch decode` and `simulate`.
    #[arg(long)]
    spec_out: Option<PathBuf>,
    #[arg(long)]
    recipe_out: Option<PathBuf>,
}

#[derive(Args)]
struct QbchDecodeArgs {
    #[arg(long)]
    spec: PathBuf,
    /// Optional code file; the corrected word is checked against it.
    #[arg(long)]
    code: Option<PathBuf>,
    /// Received word: integers separated by commas, or `hex:` digits.
    #[arg(long)]
    word: String,
    #[arg(long, default_value = "support")]
    strategy: Strategy,
}

#[derive(Subcommand)]
enum EvalCommand {
    Build(EvalBuildArgs),
}

#[derive(Args)]
struct EvalBuildArgs {
    #[arg(long)]
    q: u32,
    #[arg(long)]
    l: usize,
    #[arg(long)]
    k: usize,
    /// Evaluate at the first N powers only.
    #[arg(long, conflicts_with = "suffix")]
    points: Option<usize>,
    /// Evaluate at the last N powers only.
    #[arg(long)]
    suffix: Option<usize>,
    #[arg(long)]
    root: PathBuf,
    /// row:i | col:j | coords:r1c1,r2c2,... | psi | psiPi:<matfile>, indices from 1.
    #[arg(long)]
    proj: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    recipe_out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Enum,
    Lowweight,
}

#[derive(Args)]
struct DistanceArgs {
    #[arg(long)]
    code: PathBuf,
    #[arg(long, value_enum, default_value = "enum")]
    method: Method,
    #[arg(long, default_value_t = 7)]
    wmax: usize,
    /// Cap on codewords (enum) or supports (lowweight).
    #[arg(long)]
    budget: Option<u128>,
    /// Also compute the block distance with the low-weight method.
    #[arg(long)]
    blocks: bool,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    spec: PathBuf,
    /// Number of corrupted blocks per trial.
    #[arg(long)]
    weight: usize,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "support")]
    strategy: Strategy,
    /// Per-trial records as JSON lines.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Criteria to run, e.g. `1,3` (default: all).
    #[arg(long, value_delimiter = ',')]
    only: Option<Vec<u8>>,
}

#[derive(Args)]
struct ExportArgs {
    /// Recipe file written by `qbch build` or `evalcode build`.
    #[arg(long, conflicts_with = "code")]
    recipe: Option<PathBuf>,
    /// Plain code file; the entry then carries the generator itself.
    #[arg(long)]
    code: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "enum")]
    method: Method,
    #[arg(long, default_value_t = 7)]
    wmax: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure of a check on valid input; exits with status 1.
#[derive(Debug)]
struct CheckFailed(String);

impl std::fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CheckFailed {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<CheckFailed>().is_some() {
        return 1;
    }
    match err.downcast_ref::<Error>() {
        Some(
            Error::Parse { .. }
            | Error::NotPrime(_)
            | Error::BadModulus(_)
            | Error::Reducible { .. }
            | Error::FieldTooLarge { .. }
            | Error::NotInField(_)
            | Error::InvalidParameters(_)
            | Error::DimensionMismatch(_),
        ) => 2,
        Some(_) => 1,
        None => 2,
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    if let Some(p) = path {
        fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn emit(v: Value) {
    println!("{v}");
}

fn field_of(q: u32, s: u32) -> anyhow::Result<FieldRef> {
    let (p, a) =
        qcodes::galois::prime_power(q).ok_or_else(|| Error::InvalidParameters(format!("{q} is not a prime power")))?;
    Ok(Field::gf(p, a * s)?)
}

/// Root over `F_{q^s}` from `companion`, `scan:N` or a file.
fn load_root(source: &str, q: u32, s: u32, l: usize, m: usize) -> anyhow::Result<PrimitiveRoot> {
    if source == "companion" {
        return Ok(primitive_root_companion(q, s, l, m)?);
    }
    if let Some(idx) = source.strip_prefix("scan:") {
        let idx: usize = idx.parse().map_err(|_| Error::InvalidParameters(format!("bad scan index {idx:?}")))?;
        let roots = scan_primitive_roots(&field_of(q, s)?, l, m)?;
        let count = roots.len();
        return roots.into_iter().nth(idx).ok_or_else(|| {
            Error::InvalidParameters(format!("scan found {count} roots, index {idx} requested")).into()
        });
    }
    let ext = field_of(q, s)?;
    let (f, a) = io::parse_root(&read(Path::new(source))?, Some(ext.order()))?;
    if *f != *ext {
        bail!(Error::InvalidParameters(format!("root field {} is not F_{}", f.spec_line(), ext.order())));
    }
    if a.rows() != l {
        bail!(Error::InvalidParameters(format!("root is {0}x{0}, expected l = {l}", a.rows())));
    }
    verify_primitive_root(&a, m).map_err(|v| CheckFailed(format!("not a primitive {m}-th root: {v}")))?;
    Ok(PrimitiveRoot::new(a, m, Provenance::Verbatim)?)
}

fn cmd_field(a: FieldArgs) -> anyhow::Result<()> {
    let f = Field::new(a.p, a.degree, a.modulus.as_deref())?;
    let text = io::format_field(&f);
    write(&a.out, &text)?;
    emit(json!({ "field": f.spec_line(), "order": f.order(), "generator": f.generator().0 }));
    Ok(())
}

fn cmd_root(a: RootArgs) -> anyhow::Result<()> {
    if let Some(path) = &a.verify {
        let (_, m) = io::parse_root(&read(path)?, a.q.map(|q| q.pow(a.s)))?;
        let verdict = verify_primitive_root(&m, a.m);
        emit(json!({
            "m": a.m,
            "verified": verdict.is_ok(),
            "violation": verdict.as_ref().err().map(|v| v.to_string()),
            "root_hash": root_hash(&m),
        }));
        return verdict.map_err(|v| CheckFailed(v.to_string()).into());
    }
    let q = a.q.ok_or_else(|| Error::InvalidParameters("--q is required".into()))?;
    let l = a.l.ok_or_else(|| Error::InvalidParameters("--l is required".into()))?;
    let root = load_root(&a.source, q, a.s, l, a.m)?;
    write(&a.out, &io::format_root(root.matrix()))?;
    emit(json!({
        "field": root.field().spec_line(),
        "l": root.size(),
        "m": root.order(),
        "provenance": format!("{:?}", root.provenance()).to_lowercase(),
        "root_hash": root_hash(root.matrix()),
        "verified": true,
    }));
    Ok(())
}

fn cmd_qbch_build(a: QbchBuildArgs) -> anyhow::Result<()> {
    let root = load_root(&a.root, a.q, a.s, a.l, a.m)?;
    let spec = QbchSpec::new(&Field::of_order(a.q)?, root, a.delta)?;
    let code = qbch_build(&spec)?;
    write(&a.out, &io::format_code(&code))?;
    write(&a.spec_out, &io::format_qbch_spec(&spec))?;
    write(&a.recipe_out, &serde_json::to_string_pretty(&Recipe::qbch(&spec))?)?;
    emit(json!({
        "n": code.length(),
        "k": code.dimension(),
        "d_block_lb": spec.delta(),
        "dimension_bound": spec.dimension_bound(),
        "radius": spec.radius(),
        "root_hash": root_hash(spec.root().matrix()),
    }));
    Ok(())
}

fn cmd_qbch_decode(a: QbchDecodeArgs) -> anyhow::Result<()> {
    let spec = io::parse_qbch_spec(&read(&a.spec)?)?;
    let y = io::parse_word(&a.word, spec.base())?;
    if y.len() != spec.m() * spec.l() {
        bail!(Error::DimensionMismatch(format!(
            "word has {} symbols, code length is {}",
            y.len(),
            spec.m() * spec.l()
        )));
    }
    let out = match decode(&y, &spec, a.strategy) {
        Ok(o) => o,
        Err(e @ (Error::DecodingFailure(_) | Error::AmbiguousLocator(_))) => {
            emit(json!({ "decoded": false, "strategy": a.strategy.to_string(), "reason": e.to_string() }));
            bail!(CheckFailed(e.to_string()));
        }
        Err(e) => return Err(e.into()),
    };
    let in_code = match &a.code {
        Some(p) => Some(io::parse_code(&read(p)?)?.contains(&out.codeword)),
        None => None,
    };
    emit(json!({
        "decoded": true,
        "codeword": io::format_word(&out.codeword),
        "support": out.error.support,
        "error_blocks": out.error.blocks.iter().map(|b| io::format_word(b)).collect::<Vec<_>>(),
        "strategy": out.strategy.to_string(),
        "verified": out.verified && in_code != Some(false),
    }));
    if in_code == Some(false) {
        bail!(CheckFailed("corrected word is not in the given code".into()));
    }
    Ok(())
}

fn parse_projection(text: &str, q: u32) -> anyhow::Result<Projection> {
    if let Some(path) = text.strip_prefix("psiPi:") {
        let f = Field::of_order(q)?;
        return Ok(Projection::PsiPi(io::parse_matrix(&read(Path::new(path))?, &f)?));
    }
    Ok(text.parse()?)
}

fn cmd_eval_build(a: EvalBuildArgs) -> anyhow::Result<()> {
    let (f, m) = io::parse_root(&read(&a.root)?, Some(a.q))?;
    if f.order() != a.q || m.rows() != a.l {
        bail!(Error::InvalidParameters(format!("root must be {0}x{0} over F_{1}", a.l, a.q)));
    }
    let order =
        a.q.checked_pow(a.l as u32)
            .map(|v| v as usize - 1)
            .ok_or_else(|| Error::InvalidParameters("q^l too large".into()))?;
    verify_primitive_root(&m, order).map_err(|v| CheckFailed(format!("not a primitive {order}-th root: {v}")))?;
    let root = PrimitiveRoot::new(m, order, Provenance::Verbatim)?;
    let proj = parse_projection(&a.proj, a.q)?;
    let spec = match (a.points, a.suffix) {
        (Some(c), _) => EvalSpec::prefix(root, a.k, c, proj)?,
        (None, Some(c)) => EvalSpec::suffix(root, a.k, c, proj)?,
        (None, None) => EvalSpec::new(root, a.k, proj)?,
    };
    let built = eval_code_build(&spec)?;
    write(&a.out, &io::format_code(&built.code))?;
    write(&a.recipe_out, &serde_json::to_string_pretty(&Recipe::eval(&spec))?)?;
    emit(json!({
        "n": built.code.length(),
        "k": built.code.dimension(),
        "dimension_bound": spec.dimension_bound(),
        "projection": spec.projection().to_string(),
        "projection_kernel_dim": spec.projection_kernel_dim(),
        "quasi_cyclic": built.quasi_cyclic,
        "root_hash": root_hash(spec.root().matrix()),
    }));
    Ok(())
}

fn measure(
    code: &LinearCode,
    method: Method,
    wmax: usize,
    budget: Option<u128>,
    blocks: bool,
) -> anyhow::Result<DistanceReport> {
    Ok(match method {
        Method::Enum => min_distance_enum(code, budget.unwrap_or(ENUM_BUDGET))?,
        Method::Lowweight => {
            let mut r = min_distance_low_weight(code, wmax, budget.unwrap_or(SUPPORT_BUDGET))?;
            if blocks {
                r.block_distance = Some(block_min_distance(code, budget.unwrap_or(SUPPORT_BUDGET))?);
            }
            r
        }
    })
}

fn cmd_distance(a: DistanceArgs) -> anyhow::Result<()> {
    let code = io::parse_code(&read(&a.code)?)?;
    let report = measure(&code, a.method, a.wmax, a.budget, a.blocks)?;
    emit(serde_json::to_value(&report)?);
    Ok(())
}

fn cmd_simulate(a: SimulateArgs) -> anyhow::Result<()> {
    let spec = io::parse_qbch_spec(&read(&a.spec)?)?;
    let code = qbch_build(&spec)?;
    let channel = ChannelModel { weight: a.weight, seed: a.seed };
    let (stats, records) = simulate(&spec, &code, channel, a.trials, a.strategy)?;
    if a.out.is_some() {
        let mut text = String::new();
        for r in &records {
            text += &serde_json::to_string(r)?;
            text.push('\n');
        }
        write(&a.out, &text)?;
    }
    emit(serde_json::to_value(&stats)?);
    if stats.weight <= stats.radius && stats.corrected != stats.trials {
        bail!(CheckFailed(format!(
            "{} of {} trials within the radius failed",
            stats.trials - stats.corrected,
            stats.trials
        )));
    }
    Ok(())
}

fn cmd_verify(a: VerifyArgs) -> anyhow::Result<()> {
    let ids = a.only.unwrap_or_else(|| CRITERIA.to_vec());
    if let Some(bad) = ids.iter().find(|i| !CRITERIA.contains(i)) {
        bail!(Error::InvalidParameters(format!("no criterion {bad}")));
    }
    let reference = Reference::published();
    let mut failed = Vec::new();
    for id in ids {
        let out = run_criterion(id, &reference);
        eprintln!("{}", out.line());
        emit(serde_json::to_value(&out)?);
        if !out.pass {
            failed.push(id);
        }
    }
    if !failed.is_empty() {
        bail!(CheckFailed(format!("criteria {failed:?} failed")));
    }
    Ok(())
}

fn cmd_export(a: ExportArgs) -> anyhow::Result<()> {
    let recipe = match (&a.recipe, &a.code) {
        (Some(p), _) => serde_json::from_str::<Recipe>(&read(p)?)
            .map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?,
        (None, Some(p)) => Recipe::Generator { code: read(p)? },
        (None, None) => bail!(Error::InvalidParameters("give --recipe or --code".into())),
    };
    let code = recipe.build()?;
    if code.dimension() == 0 {
        bail!(Error::InvalidParameters("the zero code has no table entry".into()));
    }
    let report = measure(&code, a.method, a.wmax, None, false)?;
    let entry = export(&code, &report, recipe, a.seed).map_err(|e| match e {
        Error::InvalidParameters(msg) if !report.exact => anyhow!(CheckFailed(msg)),
        e => e.into(),
    })?;
    let line = serde_json::to_string(&entry)?;
    write(&a.out, &(line.clone() + "\n"))?;
    println!("{line}");
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().context("configuring threads")?;
    }
    match cli.cmd {
        Command::Field(a) => cmd_field(a),
        Command::Root(a) => cmd_root(a),
        Command::Qbch(QbchCommand::Build(a)) => cmd_qbch_build(a),
        Command::Qbch(QbchCommand::Decode(a)) => cmd_qbch_decode(a),
        Command::Evalcode(EvalCommand::Build(a)) => cmd_eval_build(a),
        Command::Distance(a) => cmd_distance(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::VerifyPaper(a) => cmd_verify(a),
        Command::Export(a) => cmd_export(a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", json!({ "error": format!("{e:#}") }));
            ExitCode::from(exit_code(&e))
        }
    }
}
