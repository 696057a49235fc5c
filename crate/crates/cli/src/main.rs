//! Command-line frontend for the lpts library.
//!
//! One model file in, one verdict out: exit 0 when the property holds,
//! exit 1 when it fails (a counterexample is written to stdout or `-o`),
//! exit 2 on input errors. Human-readable reports and timing go to stderr so
//! that machine-readable artifacts on stdout stay byte-deterministic.
//! `LPTS_AGAR_LOG=info|debug` surfaces the engines' progress.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use lpts::{
    agar_n, build_cex, cegar, check_simulation, compose, complete_spec, emit_cex, AgarVerdict,
    CegarVerdict, CexDocument, CexFormat, CexMeta, Lpts, ModelFile, ScanMode,
};

#[derive(Parser)]
#[command(
    name = "lpts",
    version,
    about = "Strong simulation and assume-guarantee verification for labeled probabilistic transition systems"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide strong simulation between an implementation and a spec.
    Check(CheckArgs),
    /// Monolithic abstraction refinement (CEGAR) of the implementation.
    Cegar(CegarArgs),
    /// Compositional assume-guarantee abstraction refinement.
    Agar(AgarArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Text,
}

impl From<Format> for CexFormat {
    fn from(f: Format) -> CexFormat {
        match f {
            Format::Json => CexFormat::Json,
            Format::Dot => CexFormat::Dot,
            Format::Text => CexFormat::Text,
        }
    }
}

#[derive(Args)]
struct CheckArgs {
    /// Model file (.lpts).
    model: PathBuf,
    /// Implementation LPTS by name; defaults to the composed system declaration.
    #[arg(long = "impl", value_name = "NAME")]
    implementation: Option<String>,
    /// Specification LPTS by name; defaults to the file's spec declaration.
    #[arg(long, value_name = "NAME")]
    spec: Option<String>,
    /// Counterexample format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the counterexample here instead of stdout.
    #[arg(short, long, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CegarArgs {
    #[command(flatten)]
    common: CheckArgs,
    /// Write the final abstraction as a parseable model.
    #[arg(long, value_name = "PATH")]
    emit_assumption: Option<PathBuf>,
    /// Write the refinement log (JSON lines).
    #[arg(long, value_name = "PATH")]
    log: Option<PathBuf>,
}

#[derive(Args)]
struct AgarArgs {
    /// Model file (.lpts); components come from its system declaration.
    model: PathBuf,
    /// Specification LPTS by name; defaults to the file's spec declaration.
    #[arg(long, value_name = "NAME")]
    spec: Option<String>,
    /// Proof rule: one assumption (asym) or one per seam (asym-n).
    #[arg(long, value_enum, default_value_t = Rule::Asym)]
    rule: Rule,
    /// Permutation of the declared components, 1-based (e.g. 2,1,3).
    #[arg(long, value_name = "I,J,...")]
    order: Option<String>,
    /// Counterexample format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the counterexample here instead of stdout.
    #[arg(short, long, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Write the final assumption(s) as a parseable model.
    #[arg(long, value_name = "PATH")]
    emit_assumption: Option<PathBuf>,
    /// Write the run log (JSON lines).
    #[arg(long, value_name = "PATH")]
    log: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Rule {
    /// Split after the first component; one learned assumption.
    Asym,
    /// Nested assumptions, one per composition seam.
    AsymN,
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter("LPTS_AGAR_LOG"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            2
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32> {
    match cli.cmd {
        Cmd::Check(args) => cmd_check(args),
        Cmd::Cegar(args) => cmd_cegar(args),
        Cmd::Agar(args) => cmd_agar(args),
    }
}

fn load(path: &Path) -> Result<ModelFile> {
    let src = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    lpts::parse_model(&src).map_err(|e| anyhow!("{}: {e}", path.display()))
}

/// The implementation under test: a named definition, or the composed system
/// declaration (left-associatively) when no name is given.
fn resolve_impl(m: &ModelFile, name: Option<&str>) -> Result<Lpts> {
    match name {
        Some(n) => m
            .def(n)
            .cloned()
            .ok_or_else(|| anyhow!("no LPTS named {n} in the model file")),
        None => Ok(fold_compose(&m.system_components())),
    }
}

fn resolve_spec(m: &ModelFile, name: Option<&str>) -> Result<Lpts> {
    match name {
        Some(n) => m
            .def(n)
            .cloned()
            .ok_or_else(|| anyhow!("no LPTS named {n} in the model file")),
        None => Ok(m.spec_lpts().clone()),
    }
}

fn fold_compose(comps: &[&Lpts]) -> Lpts {
    let mut acc = comps[0].clone();
    for c in &comps[1..] {
        acc = compose(&acc, c).lpts().clone();
    }
    acc
}

/// Completes the spec over the joint alphabet, telling the user on stderr
/// when self-loops were added.
fn completed_spec(m: &ModelFile, implementation: &Lpts, spec: &Lpts) -> Lpts {
    let target: BTreeSet<_> = implementation
        .alphabet()
        .union(spec.alphabet())
        .copied()
        .collect();
    let missing: Vec<&str> = target
        .difference(spec.alphabet())
        .map(|&a| m.actions.name(a))
        .collect();
    if !missing.is_empty() {
        eprintln!(
            "note: spec {} completed with self-loops for: {}",
            spec.name(),
            missing.join(", ")
        );
    }
    complete_spec(spec, &target).expect("target contains the spec alphabet")
}

fn plural(n: usize, word: &str) -> String {
    if n == 1 {
        format!("{n} {word}")
    } else {
        format!("{n} {word}s")
    }
}

fn write_artifact(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("cannot write {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_log_lines<T: serde::Serialize>(records: &[T], path: &Path) -> Result<()> {
    let mut out = String::new();
    for rec in records {
        writeln!(out, "{}", serde_json::to_string(rec)?).expect("string writes cannot fail");
    }
    std::fs::write(path, out).with_context(|| format!("cannot write {}", path.display()))
}

/// Writes LPTSes as a self-contained model file (`system`/`spec` point at
/// the first one).
fn write_assumptions(m: &ModelFile, assumptions: &[Lpts], path: &Path) -> Result<()> {
    let named: Vec<Lpts> = if assumptions.len() == 1 {
        vec![assumptions[0].clone().with_name("A")]
    } else {
        assumptions
            .iter()
            .enumerate()
            .map(|(i, a)| a.clone().with_name(format!("A{i}")))
            .collect()
    };
    let first = named[0].name().to_string();
    let file = ModelFile {
        actions: m.actions.clone(),
        defs: named,
        system: vec![first.clone()],
        spec: first,
    };
    std::fs::write(path, lpts::pretty_print(&file))
        .with_context(|| format!("cannot write {}", path.display()))
}

fn cmd_check(args: CheckArgs) -> Result<i32> {
    let m = load(&args.model)?;
    let implementation = resolve_impl(&m, args.implementation.as_deref())?;
    let spec = resolve_spec(&m, args.spec.as_deref())?;
    let completed = completed_spec(&m, &implementation, &spec);
    let t0 = Instant::now();
    let chk = check_simulation(&implementation, &completed, ScanMode::EarlyExit);
    let verdict = if chk.holds { "holds" } else { "fails" };
    eprintln!(
        "check: {} ({}) ⪯ {} ({}): {verdict} in {:.2?}",
        implementation.name(),
        plural(implementation.n_states(), "state"),
        spec.name(),
        plural(spec.n_states(), "state"),
        t0.elapsed()
    );
    if chk.holds {
        return Ok(0);
    }
    let tree = build_cex(&chk, chk.start, &implementation)
        .context("internal: failed to rebuild the counterexample")?;
    let doc = CexDocument::from_tree(
        &tree,
        &implementation,
        &m.actions,
        CexMeta {
            premise: format!("{} ⪯ {}", implementation.name(), spec.name()),
            iterations: 0,
        },
    );
    write_artifact(&emit_cex(&doc, args.format.into()), args.output.as_deref())?;
    Ok(1)
}

fn cmd_cegar(args: CegarArgs) -> Result<i32> {
    let m = load(&args.common.model)?;
    let implementation = resolve_impl(&m, args.common.implementation.as_deref())?;
    let spec = resolve_spec(&m, args.common.spec.as_deref())?;
    // cegar completes the spec itself; this is only for the notice.
    let _ = completed_spec(&m, &implementation, &spec);
    let t0 = Instant::now();
    let out = cegar(&implementation, &spec).context("cegar run failed")?;
    let verdict = match out.verdict {
        CegarVerdict::Holds => "holds",
        CegarVerdict::Fails => "fails",
    };
    eprintln!(
        "cegar: {} ⪯ {}: {verdict} after {} refinements; abstraction {} of {} states in {:.2?}",
        implementation.name(),
        spec.name(),
        out.refinements,
        out.assumption.n_states(),
        implementation.n_states(),
        t0.elapsed()
    );
    if let Some(path) = &args.log {
        write_log_lines(&out.log, path)?;
    }
    if let Some(path) = &args.emit_assumption {
        write_assumptions(&m, std::slice::from_ref(&out.assumption), path)?;
    }
    match out.verdict {
        CegarVerdict::Holds => Ok(0),
        CegarVerdict::Fails => {
            let tree = out.cex.expect("failing runs carry a counterexample");
            let doc = CexDocument::from_tree(
                &tree,
                &out.assumption,
                &m.actions,
                CexMeta {
                    premise: format!("{} ⪯ {}", implementation.name(), spec.name()),
                    iterations: out.refinements,
                },
            );
            write_artifact(&emit_cex(&doc, args.common.format.into()), args.common.output.as_deref())?;
            Ok(1)
        }
    }
}

fn parse_order(order: &str, n: usize) -> Result<Vec<usize>> {
    let idx: Vec<usize> = order
        .split(',')
        .map(|s| s.trim().parse::<usize>().map_err(|_| anyhow!("bad index {s:?} in --order")))
        .collect::<Result<_>>()?;
    let mut seen = idx.clone();
    seen.sort_unstable();
    if seen != (1..=n).collect::<Vec<_>>() {
        bail!("--order must be a permutation of 1..={n}");
    }
    Ok(idx)
}

fn cmd_agar(args: AgarArgs) -> Result<i32> {
    let m = load(&args.model)?;
    let mut comps: Vec<Lpts> = m.system_components().into_iter().cloned().collect();
    if let Some(order) = &args.order {
        let idx = parse_order(order, comps.len())?;
        comps = idx.iter().map(|&i| comps[i - 1].clone()).collect();
    }
    if comps.len() < 2 {
        bail!("agar needs a system declaration with at least two components");
    }
    let spec = resolve_spec(&m, args.spec.as_deref())?;
    let full_impl = fold_compose(&comps.iter().collect::<Vec<_>>());
    let _ = completed_spec(&m, &full_impl, &spec);
    // Rule asym groups everything after the first component into one block.
    let blocks: Vec<Lpts> = match args.rule {
        Rule::AsymN => comps,
        Rule::Asym if comps.len() == 2 => comps,
        Rule::Asym => {
            let rest = fold_compose(&comps[1..].iter().collect::<Vec<_>>());
            vec![comps[0].clone(), rest]
        }
    };
    let t0 = Instant::now();
    let out = agar_n(&blocks, &spec).context("agar run failed")?;
    let verdict = match out.verdict {
        AgarVerdict::Holds => "holds",
        AgarVerdict::Fails => "fails",
    };
    eprintln!(
        "agar: {verdict}; |A_M| = {}, |L_M| = {}, refinements per level = {:?}, assumptions {:?} states in {:.2?}",
        out.max_assumption_states,
        out.max_composed_states,
        out.refinements,
        out.assumptions.iter().map(Lpts::n_states).collect::<Vec<_>>(),
        t0.elapsed()
    );
    if let Some(path) = &args.log {
        write_log_lines(&out.log, path)?;
    }
    if let Some(path) = &args.emit_assumption {
        write_assumptions(&m, &out.assumptions, path)?;
    }
    match out.verdict {
        AgarVerdict::Holds => Ok(0),
        AgarVerdict::Fails => {
            let tree = out.cex.expect("failing runs carry a counterexample");
            let top = compose(&blocks[0], &out.assumptions[0]);
            let doc = CexDocument::from_tree(
                &tree,
                top.lpts(),
                &m.actions,
                CexMeta {
                    premise: format!("{} ⪯ {}", top.lpts().name(), spec.name()),
                    iterations: out.refinements.iter().sum(),
                },
            );
            write_artifact(&emit_cex(&doc, args.format.into()), args.output.as_deref())?;
            Ok(1)
        }
    }
}
