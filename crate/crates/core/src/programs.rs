//! Ready-made programs: parallel or, the π approximation, Floyd-Warshall, buyer and vendor,
//! and one-round probes of a topology.

use std::collections::BTreeSet;

use crate::engine::{Machine, StrategyParams, TraceMode};
use crate::error::{Error, Result};
use crate::formula::{AxiomInstance, AxiomSchema, Formula};
use crate::prims::{Distance, Registry};
use crate::syntax::parse_program;
use crate::term::{tuple_component, Polarity, Term};
use crate::topology::{extract_axiom, TopologyGraph};

/// Parallel or over two boolean subterms, e.g. `tt`, `ff`, `u` or a variable name.
pub fn parallel_or_source(x: &str, y: &str) -> String {
    let mut decls = String::new();
    for v in [x, y] {
        if !matches!(v, "tt" | "ff" | "u") && !decls.contains(&format!("var {v} ")) {
            decls.push_str(&format!("var {v} : Bool;\n"));
        }
    }
    format!(
        "{decls}nu a : {{1: Bool ~ []; 2: Top ~ [1]}} .\n  \
         (if {x} then tt else (a! ff).0)\n  \
         || (if {y} then tt else (a? (\\z:Bot. z)).1)\n"
    )
}

pub fn parallel_or(x: &str, y: &str) -> Result<(Term, Registry)> {
    let reg = Registry::profile("bool", None)?;
    let t = parse_program(&parallel_or_source(x, y), &reg)?.term;
    Ok((t, reg))
}

/// `p` producers each summing one block of the midpoint rule, one collector adding them up.
/// With `l = None` the length stays a free variable `l : Nat`.
pub fn pi_source(p: usize, l: Option<u64>) -> Result<String> {
    if p == 0 {
        return Err(Error::Term("at least one producer is needed".into()));
    }
    let len = l.map_or_else(|| "l".to_string(), |l| l.to_string());
    let mut header: Vec<String> = (1..=p).map(|k| format!("{k}: Q ~ []")).collect();
    let all: Vec<String> = (1..=p).map(|k| k.to_string()).collect();
    header.push(format!("{}: Top ~ [{}]", p + 1, all.join(", ")));
    let mut procs: Vec<String> = (1..=p).map(|k| format!("(a! (f{k} {len})).0")).collect();
    procs.push(format!("sum ((a? (\\x:Bot. x)).1) {len}"));
    let decl = if l.is_none() { "var l : Nat;\n" } else { "" };
    Ok(format!("{decl}nu a : {{{}}} .\n  {}\n", header.join("; "), procs.join("\n  || ")))
}

pub fn pi(p: usize, l: u64) -> Result<(Term, Registry)> {
    let reg = Registry::profile(&format!("pi:{p}"), None)?;
    let t = parse_program(&pi_source(p, Some(l))?, &reg)?.term;
    Ok((t, reg))
}

/// `u (v (u (v ... s)))` with `k` copies of `u v`.
fn nest_app(u: &str, v: &str, k: usize, s: &str) -> String {
    let mut out = s.to_string();
    for _ in 0..k {
        out = format!("{u} ({v} ({out}))");
    }
    out
}

/// `u ((u (... s.i)).i)` with `k` copies of `u`.
fn nest_proj(u: &str, i: usize, k: usize, s: &str) -> String {
    let mut out = s.to_string();
    for _ in 0..k {
        out = format!("{u} (({out}).{i})");
    }
    out
}

fn row(i: usize, matrix: Option<&[Vec<Distance>]>) -> String {
    match matrix {
        None => format!("I{i}(0)"),
        Some(m) => {
            let es: Vec<String> = m[i - 1].iter().map(Distance::to_string).collect();
            format!("I{i}(0)[{}]", es.join(", "))
        }
    }
}

/// Floyd-Warshall on `n` processes arranged in a ring; process `i` owns row `i`.
/// With a matrix the rows carry distances, otherwise they are symbolic.
pub fn fw_source(n: usize, matrix: Option<&[Vec<Distance>]>) -> Result<String> {
    if n < 2 {
        return Err(Error::Term("Floyd-Warshall needs at least two processes".into()));
    }
    if let Some(m) = matrix {
        if m.len() != n || m.iter().any(|r| r.len() != n) {
            return Err(Error::Term(format!("matrix must be {n} by {n}")));
        }
    }
    let header: Vec<String> = (1..=n).map(|i| format!("{i}: Row ~ [{}]", if i == 1 { n } else { i - 1 })).collect();
    let mut procs = Vec::new();
    for i in 1..=n {
        let r = row(i, matrix);
        let recv = format!("a? {r}");
        let threads = if i == 1 {
            vec![
                nest_app("f", "a?", n, &r),
                format!("({}).0", nest_proj("a!", 1, n, &recv)),
                format!("(a! {r}).0"),
            ]
        } else if i < n {
            vec![
                nest_app("f", "a?", n + 1, &r),
                format!("({}).0", nest_proj("a!", 1, n + 1 - i, &nest_proj("a?", 1, i, &recv))),
                format!("(a! ({})).0", nest_app("f", "a?", i, &r)),
                format!("({}).0", nest_proj("a!", 1, i - 1, &recv)),
            ]
        } else {
            vec![
                nest_app("f", "a?", n + 1, &r),
                format!("(a! ({})).0", nest_app("f", "a?", n, &r)),
                format!("({}).0", nest_proj("a!", 1, n - 1, &recv)),
            ]
        };
        procs.push(threads.join("\n   | "));
    }
    Ok(format!("nu a : {{{}}} .\n  {}\n", header.join("; "), procs.join("\n  || ")))
}

pub fn fw(n: usize, matrix: Option<&[Vec<Distance>]>) -> Result<(Term, Registry)> {
    let reg = Registry::profile("floyd-warshall", None)?;
    let t = parse_program(&fw_source(n, matrix)?, &reg)?.term;
    Ok((t, reg))
}

pub const BUYER_VENDOR_SOURCE: &str = "\
var B : String /\\ Nat -> Bool;
var V : Nat -> Bool;
nu a : {1: String ~ [2]; 2: Nat ~ [1]} .
  B (a! (pay_for ((a! prod).1)))
  || V (use ((a! (cost ((a? 0).1))).1))
";

pub fn buyer_vendor() -> Result<(Term, Registry)> {
    let reg = Registry::profile("buyer-vendor", None)?;
    let t = parse_program(BUYER_VENDOR_SOURCE, &reg)?.term;
    Ok((t, reg))
}

/// One-round program for `receiver`: it runs `(a? v).0`, every other node `(a! w<j>).0`.
pub fn topology_probe(schema: &AxiomSchema, receiver: usize) -> Result<Term> {
    let m = schema.len();
    let a = Formula::atom("A");
    let inst = AxiomInstance::uniform(schema.clone(), a.clone());
    let mut processes = Vec::new();
    for j in 1..=m {
        let ty = inst.channel_type(j).expect("index in range");
        let (pol, payload) = if j == receiver { (Polarity::In, "v".to_string()) } else { (Polarity::Out, format!("w{j}")) };
        let thread = Term::fst(Term::app(Term::chan("a", pol, j, ty), Term::var(payload, a.clone())));
        processes.push(vec![thread]);
    }
    Ok(Term::nu("a", inst, processes))
}

/// Runs a probe with the strategy up to its first communication and returns the nodes whose
/// messages reached `receiver`, read off the delivered tuple.
pub fn probe_senders(schema: &AxiomSchema, receiver: usize) -> Result<BTreeSet<usize>> {
    let t = topology_probe(schema, receiver)?;
    let reg = Registry::base();
    let params = StrategyParams { start_receiver: receiver, trace: TraceMode::Off, ..Default::default() };
    let mut machine = Machine::new(t, &reg, params);
    if machine.strategy_step()?.is_some() {
        return Ok(BTreeSet::new());
    }
    let Term::Nu(nu) = machine.term() else {
        return Err(Error::Reduction("probe lost its binder before communicating".into()));
    };
    let Term::Proj(_, tuple) = &nu.processes[receiver - 1][0] else {
        return Err(Error::Reduction("probe receiver did not communicate".into()));
    };
    let k = schema.outlinks(receiver).map_or(0, <[usize]>::len);
    let mut out = BTreeSet::new();
    for i in 1..=k {
        match tuple_component(tuple, i, k + 1)? {
            Term::Var { name, .. } => {
                let j = name
                    .strip_prefix('w')
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| Error::Reduction(format!("unexpected message {name}")))?;
                out.insert(j);
            }
            other => return Err(Error::Reduction(format!("unexpected message {other:?}"))),
        }
    }
    Ok(out)
}

/// Edges `(sender, receiver)` observed by probing every node of the axiom extracted from `g`.
pub fn observed_edges(g: &TopologyGraph) -> Result<BTreeSet<(usize, usize)>> {
    let schema = extract_axiom(g)?;
    let mut out = BTreeSet::new();
    for y in 1..=schema.len() {
        for x in probe_senders(&schema, y)? {
            out.insert((x, y));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run, Outcome};
    use crate::syntax::pretty;

    fn normal(t: &Term, reg: &Registry) -> String {
        let r = run(t, reg, &StrategyParams::default()).unwrap();
        match r.outcome {
            Outcome::NormalForm(t) => pretty(&t),
            other => panic!("{other:?}\n{}", r.trace.to_text()),
        }
    }

    #[test]
    fn fw_three_symbolic() {
        let (t, reg) = fw(3, None).unwrap();
        assert_eq!(normal(&t, &reg), "I1(3) || I2(3) || I3(3)");
    }

    #[test]
    fn buyer_vendor_ends_with_use() {
        let (t, reg) = buyer_vendor().unwrap();
        assert_eq!(normal(&t, &reg), "V (use card)");
    }

    #[test]
    fn pi_two_by_four() {
        let (t, reg) = pi(2, 4).unwrap();
        let want = crate::prims::pi_oracle(4);
        assert_eq!(normal(&t, &reg), format!("{}/{}", want.numer(), want.denom()));
    }

    #[test]
    fn probe_on_a_chain() {
        let g = TopologyGraph::reflexive(3, [(1, 2), (2, 3)]);
        let seen = observed_edges(&g).unwrap();
        assert_eq!(seen, BTreeSet::from([(1, 2), (2, 3)]));
    }
}
