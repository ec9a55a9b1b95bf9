//! Seeded property campaigns shared by the `fuzz` subcommand and the test suite.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::iter::{ParallelBridge, ParallelIterator};
use serde::Serialize;

use crate::engine::{
    cross_ready, cross_reduce, enumerate_steps, run, Outcome, RedexDescriptor, RedexKind, StrategyKind, StrategyParams,
    TraceMode,
};
use crate::error::Result;
use crate::gen::{self, GenConfig};
use crate::ndredux::{nd_run_random, simulate_cross, NdBudget};
use crate::prims::{floyd_warshall, Distance, Literal};
use crate::syntax::pretty;
use crate::term::{Prim, Term};
use crate::topology::{all_reflexive_graphs, extract_axiom, schema_to_graph};
use crate::typecheck::check_program;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FuzzKind {
    SubjectReduction,
    Termination,
    NdTermination,
    Simulation,
    Topology,
    FloydWarshall,
}

impl FuzzKind {
    pub const ALL: [FuzzKind; 6] = [
        FuzzKind::SubjectReduction,
        FuzzKind::Termination,
        FuzzKind::NdTermination,
        FuzzKind::Simulation,
        FuzzKind::Topology,
        FuzzKind::FloydWarshall,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FuzzKind::SubjectReduction => "subject-reduction",
            FuzzKind::Termination => "termination",
            FuzzKind::NdTermination => "nd-termination",
            FuzzKind::Simulation => "simulation",
            FuzzKind::Topology => "topology",
            FuzzKind::FloydWarshall => "floyd-warshall",
        }
    }
}

impl fmt::Display for FuzzKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FuzzKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<FuzzKind, String> {
        FuzzKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            let names: Vec<&str> = FuzzKind::ALL.iter().map(|k| k.name()).collect();
            format!("unknown fuzz kind {s}; expected one of {}", names.join(", "))
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FuzzReport {
    pub kind: FuzzKind,
    pub cases: usize,
    pub failures: Vec<String>,
    /// Tallies such as how many runs ended in a normal form or a deadlock.
    pub tally: BTreeMap<String, usize>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl FuzzReport {
    fn new(kind: FuzzKind) -> FuzzReport {
        FuzzReport { kind, cases: 0, failures: Vec::new(), tally: BTreeMap::new(), elapsed: Duration::ZERO }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn count(&mut self, key: &str) {
        *self.tally.entry(key.to_string()).or_default() += 1;
    }
}

impl fmt::Display for FuzzReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "ok" } else { "FAILED" };
        write!(f, "{}: {} cases, {} failures, {:.2?}", self.kind, self.cases, self.failures.len(), self.elapsed)?;
        for (k, v) in &self.tally {
            write!(f, ", {k} {v}")?;
        }
        write!(f, " [{verdict}]")?;
        for fail in self.failures.iter().take(5) {
            write!(f, "\n  {fail}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct FuzzOptions {
    pub count: usize,
    pub seed: u64,
    /// Largest node count for exhaustive topology enumeration.
    pub max_nodes: usize,
    pub fuel: usize,
}

impl Default for FuzzOptions {
    fn default() -> Self {
        FuzzOptions { count: 100, seed: 0, max_nodes: 4, fuel: 100_000 }
    }
}

pub fn fuzz(kind: FuzzKind, opts: &FuzzOptions) -> Result<FuzzReport> {
    let start = Instant::now();
    let mut report = match kind {
        FuzzKind::SubjectReduction => subject_reduction(opts)?,
        FuzzKind::Termination => termination(opts)?,
        FuzzKind::NdTermination => nd_termination(opts)?,
        FuzzKind::Simulation => simulation(opts)?,
        FuzzKind::Topology => topology(opts)?,
        FuzzKind::FloydWarshall => floyd_warshall_graphs(opts)?,
    };
    report.elapsed = start.elapsed();
    Ok(report)
}

fn case_rng(seed: u64, case: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(case as u64))
}

/// Along a random path of each program, every one-step successor keeps the program's type.
pub fn subject_reduction(opts: &FuzzOptions) -> Result<FuzzReport> {
    let reg = gen::registry();
    let mut report = FuzzReport::new(FuzzKind::SubjectReduction);
    for case in 0..opts.count {
        let mut rng = case_rng(opts.seed, case);
        let mut cur = gen::program(&mut rng, &GenConfig::default())?;
        let ty = check_program(&cur)?;
        report.cases += 1;
        for _ in 0..40 {
            let succ = enumerate_steps(&cur, &reg)?;
            if succ.is_empty() {
                break;
            }
            for (desc, next) in &succ {
                report.count(&format!("{} successors", desc.kind));
                if !next.free_vars().is_subset(&cur.free_vars()) {
                    report.failures.push(format!("case {case}: {desc} introduced free variables"));
                }
                match check_program(next) {
                    Ok(t) if t == ty => {}
                    Ok(t) => report.failures.push(format!("case {case}: {desc} gave type {t}, expected {ty}")),
                    Err(e) => report.failures.push(format!("case {case}: {desc} is ill-typed: {e}\n  {}", pretty(&cur))),
                }
            }
            cur = pick_lingering(&mut rng, succ);
        }
    }
    Ok(report)
}

/// A random successor, preferring anything but extraction so walks see more communication.
fn pick_lingering<R: Rng>(rng: &mut R, succ: Vec<(RedexDescriptor, Term)>) -> Term {
    let inner: Vec<usize> = (0..succ.len()).filter(|&i| succ[i].0.kind != RedexKind::Simplify).collect();
    let pick = if !inner.is_empty() && rng.gen_bool(0.9) {
        inner[rng.gen_range(0..inner.len())]
    } else {
        rng.gen_range(0..succ.len())
    };
    succ.into_iter().nth(pick).expect("index in range").1
}

/// Every random program reaches a term with no further step under random choice.
pub fn termination(opts: &FuzzOptions) -> Result<FuzzReport> {
    let reg = gen::registry();
    let mut report = FuzzReport::new(FuzzKind::Termination);
    for case in 0..opts.count {
        let mut rng = case_rng(opts.seed, case);
        let p = gen::program(&mut rng, &GenConfig::default())?;
        let params = StrategyParams {
            fuel: opts.fuel,
            trace: TraceMode::Off,
            strategy: StrategyKind::Random { seed: rng.gen() },
            ..Default::default()
        };
        report.cases += 1;
        match run(&p, &reg, &params)?.outcome {
            Outcome::NormalForm(_) => report.count("normal"),
            Outcome::Deadlock { .. } => report.count("stuck"),
            Outcome::FuelExhausted(_) => report.failures.push(format!("case {case}: fuel ran out on {}", pretty(&p))),
        }
    }
    Ok(report)
}

/// Random simply typed terms with free channels terminate under the non-deterministic relation.
pub fn nd_termination(opts: &FuzzOptions) -> Result<FuzzReport> {
    let reg = gen::registry();
    let mut report = FuzzReport::new(FuzzKind::NdTermination);
    for case in 0..opts.count {
        let mut rng = case_rng(opts.seed, case);
        let t = gen::simply_typed_term(&mut rng, &GenConfig::default(), true);
        let budget = NdBudget { seed: rng.gen(), ..Default::default() };
        report.cases += 1;
        let r = nd_run_random(&t, &budget, opts.fuel, &reg)?;
        if r.terminated {
            *report.tally.entry("total steps".into()).or_default() += r.steps;
        } else {
            report.failures.push(format!("case {case}: no termination within {} steps on {}", opts.fuel, pretty(&t)));
        }
    }
    Ok(report)
}

/// Every communication met along random runs replays as non-deterministic steps.
pub fn simulation(opts: &FuzzOptions) -> Result<FuzzReport> {
    let reg = gen::registry();
    let mut report = FuzzReport::new(FuzzKind::Simulation);
    for case in 0..opts.count {
        let mut rng = case_rng(opts.seed, case);
        let mut cur = gen::program(&mut rng, &GenConfig::default())?;
        report.cases += 1;
        for _ in 0..60 {
            if let Term::Nu(nu) = &cur {
                for r in 1..=nu.processes.len() {
                    let Ok(plan) = cross_ready(nu, r) else { continue };
                    let after = cross_reduce(nu, &plan)?;
                    match simulate_cross(nu, &plan, &after, &reg) {
                        Ok(true) => report.count("replayed"),
                        Ok(false) => report.count("not applicable"),
                        Err(e) => report.failures.push(format!("case {case}: {e}")),
                    }
                }
            }
            let succ = enumerate_steps(&cur, &reg)?;
            if succ.is_empty() {
                break;
            }
            cur = pick_lingering(&mut rng, succ);
        }
    }
    Ok(report)
}

/// Every reflexive graph up to `max_nodes` nodes: the extracted axiom maps back to the graph,
/// and one round of communication follows exactly its edges.
pub fn topology(opts: &FuzzOptions) -> Result<FuzzReport> {
    let mut report = FuzzReport::new(FuzzKind::Topology);
    for n in 1..=opts.max_nodes {
        let outcomes: Vec<Result<Option<String>>> = all_reflexive_graphs(n)
            .par_bridge()
            .map(|g| {
                let schema = extract_axiom(&g)?;
                if schema_to_graph(&schema) != g {
                    return Ok(Some(format!("round trip changed {}", schema.notation())));
                }
                let want: BTreeSet<(usize, usize)> = g.edges().iter().copied().filter(|(s, d)| s != d).collect();
                let seen = crate::programs::observed_edges(&g)?;
                Ok((seen != want).then(|| format!("{}: observed {seen:?}, expected {want:?}", schema.notation())))
            })
            .collect();
        for o in outcomes {
            report.cases += 1;
            if let Some(fail) = o? {
                report.failures.push(fail);
            }
        }
    }
    report.failures.sort();
    Ok(report)
}

/// A random weighted digraph on `n` nodes; absent edges are infinite.
pub fn random_matrix<R: Rng>(rng: &mut R, n: usize) -> Vec<Vec<Distance>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Distance::Finite(0)
                    } else if rng.gen_bool(0.5) {
                        Distance::Finite(rng.gen_range(1..20))
                    } else {
                        Distance::Infinite
                    }
                })
                .collect()
        })
        .collect()
}

/// Distance rows read off a finished Floyd-Warshall run, in process order.
pub fn result_rows(t: &Term) -> Option<Vec<Vec<Distance>>> {
    let threads = match t {
        Term::Par(ts) => ts.as_slice(),
        one => std::slice::from_ref(one),
    };
    threads
        .iter()
        .map(|th| match th {
            Term::Const { prim: Prim::Lit(Literal::Row(r)), .. } => r.entries.clone(),
            _ => None,
        })
        .collect()
}

/// Numeric Floyd-Warshall on random graphs with 3 to 6 nodes agrees with the sequential oracle.
pub fn floyd_warshall_graphs(opts: &FuzzOptions) -> Result<FuzzReport> {
    let mut report = FuzzReport::new(FuzzKind::FloydWarshall);
    for case in 0..opts.count {
        let mut rng = case_rng(opts.seed, case);
        let n = rng.gen_range(3..=6);
        let m = random_matrix(&mut rng, n);
        let (t, reg) = crate::programs::fw(n, Some(&m))?;
        let params = StrategyParams { fuel: opts.fuel, trace: TraceMode::Off, ..Default::default() };
        report.cases += 1;
        let out = run(&t, &reg, &params)?.outcome;
        let want = floyd_warshall(&m);
        match out {
            Outcome::NormalForm(nf) if result_rows(&nf).as_ref() == Some(&want) => report.count(&format!("n={n}")),
            other => report.failures.push(format!("case {case} (n={n}): got {}", pretty(other.term()))),
        }
    }
    Ok(report)
}
