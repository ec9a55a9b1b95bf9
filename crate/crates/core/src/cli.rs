//! The `lampar` command line: `check`, `run`, `topo2axiom` and `fuzz`.
//!
//! Exit codes: 0 success, 1 input or type error (or a failed fuzz campaign), 2 deadlock,
//! 3 fuel exhausted.

use std::io::{IsTerminal, Write};
use std::path::{Path as FsPath, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::engine::{run, NormalizationScope, Outcome, StrategyKind, StrategyParams, TraceMode};
use crate::error::Error;
use crate::fuzz::{fuzz, FuzzKind, FuzzOptions};
use crate::prims::{parse_matrix, Literal, Registry, RowValue};
use crate::syntax::{parse_program, parse_topology, pretty, render_snippet, Parsed};
use crate::term::{substitute, Path, Prim, Term};
use crate::topology::extract_axiom;
use crate::typecheck::check_program;

#[derive(Parser, Debug)]
#[command(name = "lampar", version, about = "Check, run and fuzz typed parallel lambda programs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TraceFormat {
    Text,
    Structured,
    Off,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyName {
    /// The deterministic strategy with round-robin receivers.
    #[value(name = "paper", alias = "deterministic")]
    Deterministic,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScopeName {
    Everything,
    Designated,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Type-check a program and print its type.
    Check {
        file: PathBuf,
        /// Primitive profile; defaults to a `-- prims: <name>` line in the file, else `base`.
        #[arg(long)]
        prims: Option<String>,
    },
    /// Reduce a program and print the outcome.
    Run {
        file: PathBuf,
        #[arg(long)]
        prims: Option<String>,
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        fuel: u64,
        /// Process that receives first.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        receiver: u64,
        #[arg(long, value_enum, default_value_t = TraceFormat::Off)]
        trace: TraceFormat,
        #[arg(long, value_enum, default_value_t = StrategyName::Deterministic)]
        strategy: StrategyName,
        /// Seed for the random strategy.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ScopeName::Everything)]
        scope: ScopeName,
        /// Keep alpha-equal results when extracting.
        #[arg(long)]
        keep_duplicates: bool,
        /// Replace a free variable by a term before running, e.g. `--let x=ff`.
        #[arg(long = "let", value_name = "VAR=TERM")]
        lets: Vec<String>,
        /// Distance matrix giving numeric entries to the rows `I<i>(k)`.
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
    /// Compile a topology file into an axiom schema.
    Topo2axiom { file: PathBuf },
    /// Check a property on generated inputs.
    Fuzz {
        #[arg(value_parser = str::parse::<FuzzKind>)]
        kind: FuzzKind,
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest node count for exhaustive topology enumeration.
        #[arg(long, default_value_t = 4)]
        exhaustive: usize,
        #[arg(long, default_value_t = 100_000)]
        fuel: usize,
    },
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    color: bool,
}

impl Io<'_> {
    fn error(&mut self, msg: &str) {
        let label = if self.color { "\x1b[31merror\x1b[0m" } else { "error" };
        let _ = writeln!(self.err, "{label}: {msg}");
    }
}

/// Whether error labels are colored: never when `LAMPAR_COLOR=0`, else when stderr is a terminal.
pub fn color_enabled() -> bool {
    std::env::var("LAMPAR_COLOR").map_or(true, |v| v != "0") && std::io::stderr().is_terminal()
}

/// Runs the command line on `args` (without the program name) and returns the exit code.
pub fn main_with(args: &[String], out: &mut dyn Write, err: &mut dyn Write, color: bool) -> i32 {
    let cli = match Cli::try_parse_from(std::iter::once("lampar".to_string()).chain(args.iter().cloned())) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let mut io = Io { out, err, color };
    match cli.command {
        Command::Check { file, prims } => check(&mut io, &file, prims.as_deref()),
        Command::Run { file, prims, fuel, receiver, trace, strategy, seed, scope, keep_duplicates, lets, matrix } => {
            let params = StrategyParams {
                fuel: fuel as usize,
                start_receiver: receiver as usize,
                scope: match scope {
                    ScopeName::Everything => NormalizationScope::Everything,
                    ScopeName::Designated => NormalizationScope::Designated,
                },
                dedup_results: !keep_duplicates,
                trace: if trace == TraceFormat::Off { TraceMode::Off } else { TraceMode::On },
                strategy: match strategy {
                    StrategyName::Deterministic => StrategyKind::Deterministic,
                    StrategyName::Random => StrategyKind::Random { seed },
                },
                check_types: false,
            };
            run_cmd(&mut io, &file, prims.as_deref(), &params, trace, &lets, matrix.as_deref())
        }
        Command::Topo2axiom { file } => topo2axiom(&mut io, &file),
        Command::Fuzz { kind, count, seed, exhaustive, fuel } => {
            let opts = FuzzOptions { count, seed, max_nodes: exhaustive, fuel };
            match fuzz(kind, &opts) {
                Ok(report) => {
                    let _ = writeln!(io.out, "{report}");
                    if report.passed() {
                        0
                    } else {
                        io.error(&format!("{} counterexample(s) with seed {seed}", report.failures.len()));
                        1
                    }
                }
                Err(e) => {
                    io.error(&e.to_string());
                    1
                }
            }
        }
    }
}

/// Profile named by the first `-- prims: <name>` comment.
fn declared_profile(src: &str) -> Option<&str> {
    src.lines().find_map(|l| l.trim().strip_prefix("--")?.trim().strip_prefix("prims:").map(str::trim))
}

/// Largest `k` among identifiers `f<k>` in the source.
fn pi_width(src: &str) -> Option<usize> {
    src.split(|c: char| !c.is_ascii_alphanumeric() && c != '_')
        .filter_map(|w| w.strip_prefix('f')?.parse::<usize>().ok())
        .max()
}

fn registry_for(src: &str, prims: Option<&str>) -> crate::Result<Registry> {
    let name = prims.or_else(|| declared_profile(src)).unwrap_or("base");
    if name == "pi" {
        let p = pi_width(src).ok_or_else(|| Error::Prim("profile pi needs f1..fp in the program".into()))?;
        return Registry::profile(&format!("pi:{p}"), None);
    }
    Registry::profile(name, None)
}

fn load(io: &mut Io, file: &FsPath, prims: Option<&str>) -> Option<(String, Parsed, Registry)> {
    let src = match std::fs::read_to_string(file) {
        Ok(s) => s,
        Err(e) => {
            io.error(&format!("{}: {e}", file.display()));
            return None;
        }
    };
    let reg = match registry_for(&src, prims) {
        Ok(r) => r,
        Err(e) => {
            io.error(&e.to_string());
            return None;
        }
    };
    match parse_program(&src, &reg) {
        Ok(p) => Some((src, p, reg)),
        Err(e) => {
            io.error(&format!("{}\n{}", file.display(), render_snippet(&src, &e.span, &e.message)));
            None
        }
    }
}

fn check(io: &mut Io, file: &FsPath, prims: Option<&str>) -> i32 {
    let Some((src, parsed, reg)) = load(io, file, prims) else { return 1 };
    match check_program(&parsed.term) {
        Ok(ty) => {
            if let Err(e) = reg.check_term(&parsed.term) {
                io.error(&e.to_string());
                return 1;
            }
            let _ = writeln!(io.out, "{ty}");
            0
        }
        Err(d) => {
            let span = parsed.spans.locate(&parsed.term, &d.path);
            io.error(&format!("{}\n{}", file.display(), render_snippet(&src, span, &d.to_string())));
            1
        }
    }
}

fn apply_lets(mut t: Term, lets: &[String], reg: &Registry) -> crate::Result<Term> {
    for l in lets {
        let (x, rhs) = l
            .split_once('=')
            .ok_or_else(|| Error::Term(format!("--let expects VAR=TERM, got {l}")))?;
        let v = parse_program(rhs.trim(), reg)?.term;
        let x = x.trim();
        if !t.occurs_free(x) {
            return Err(Error::Term(format!("--let {x}: no free variable {x} in the program")));
        }
        t = substitute(&t, x, &v)?;
    }
    Ok(t)
}

/// Gives every symbolic row `I<i>(k)` the entries of row `i` of the matrix.
fn apply_matrix(t: Term, text: &str) -> crate::Result<Term> {
    let m = parse_matrix(text)?;
    let mut sites = Vec::new();
    t.walk(&mut |p: &Path, n| {
        if let Term::Const { prim: Prim::Lit(Literal::Row(r)), .. } = n {
            sites.push((p.clone(), r.clone()));
        }
    });
    let mut out = t;
    for (p, r) in sites {
        let row = m
            .get(r.source - 1)
            .ok_or_else(|| Error::Prim(format!("matrix has no row {}", r.source)))?;
        out = out.replace_at(&p, Term::lit(Literal::Row(RowValue::numeric(r.source, r.stage, row.clone()))))?;
    }
    Ok(out)
}

fn run_cmd(
    io: &mut Io,
    file: &FsPath,
    prims: Option<&str>,
    params: &StrategyParams,
    trace: TraceFormat,
    lets: &[String],
    matrix: Option<&FsPath>,
) -> i32 {
    let Some((src, parsed, reg)) = load(io, file, prims) else { return 1 };
    if let Err(d) = check_program(&parsed.term) {
        let span = parsed.spans.locate(&parsed.term, &d.path);
        io.error(&format!("{}\n{}", file.display(), render_snippet(&src, span, &d.to_string())));
        return 1;
    }
    let prepared = apply_lets(parsed.term, lets, &reg).and_then(|t| match matrix {
        Some(path) => apply_matrix(t, &std::fs::read_to_string(path)?),
        None => Ok(t),
    });
    let t = match prepared {
        Ok(t) => t,
        Err(e) => {
            io.error(&e.to_string());
            return 1;
        }
    };
    let result = match run(&t, &reg, params) {
        Ok(r) => r,
        Err(e) => {
            io.error(&e.to_string());
            return 1;
        }
    };
    match trace {
        TraceFormat::Text => {
            let _ = write!(io.out, "{}", result.trace.to_text());
        }
        TraceFormat::Structured => {
            let _ = write!(io.out, "{}", result.trace.to_json_lines());
        }
        TraceFormat::Off => {}
    }
    let _ = writeln!(io.out, "{}", pretty(result.outcome.term()));
    match &result.outcome {
        Outcome::NormalForm(_) => 0,
        Outcome::Deadlock { explanation, .. } => {
            io.error(&format!("deadlock after {} steps: {explanation}", result.steps));
            2
        }
        Outcome::FuelExhausted(_) => {
            io.error(&format!("fuel exhausted after {} steps", result.steps));
            3
        }
    }
}

fn topo2axiom(io: &mut Io, file: &FsPath) -> i32 {
    let src = match std::fs::read_to_string(file) {
        Ok(s) => s,
        Err(e) => {
            io.error(&format!("{}: {e}", file.display()));
            return 1;
        }
    };
    let parsed = match parse_topology(&src) {
        Ok(p) => p,
        Err(e) => {
            io.error(&format!("{}\n{}", file.display(), render_snippet(&src, &e.span, &e.message)));
            return 1;
        }
    };
    for n in &parsed.notices {
        let _ = writeln!(io.err, "note: {n}");
    }
    match extract_axiom(&parsed.graph) {
        Ok(schema) => {
            let _ = writeln!(io.out, "{}", schema.notation());
            let _ = writeln!(io.out, "nu a : {} . ...", schema.header_snippet());
            0
        }
        Err(e) => {
            io.error(&e.to_string());
            1
        }
    }
}
