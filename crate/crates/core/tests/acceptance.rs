//! One line per acceptance criterion. Runs without the libtest harness so every line is shown.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use lampar::engine::{run, Outcome, RedexKind, StrategyParams, TraceEvent};
use lampar::fuzz::{self, FuzzOptions};
use lampar::prims::pi_oracle;
use lampar::programs;
use lampar::syntax::{parse_topology, pretty};
use lampar::topology::{all_reflexive_graphs, extract_axiom, schema_to_graph};

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

fn normal_form(t: &lampar::Term, reg: &lampar::prims::Registry) -> Result<(String, Vec<TraceEvent>), String> {
    let r = run(t, reg, &StrategyParams::default()).map_err(|e| e.to_string())?;
    match r.outcome {
        Outcome::NormalForm(nf) => Ok((pretty(&nf), r.trace.events)),
        other => Err(format!("no normal form: {other:?}")),
    }
}

fn within(limit: Duration, start: Instant) -> Check {
    let took = start.elapsed();
    if took > limit {
        return Err(format!("took {took:.2?}, limit {limit:?}"));
    }
    Ok(())
}

fn parallel_or() -> Check {
    let start = Instant::now();
    for (x, y, want) in [
        ("tt", "tt", "tt"),
        ("tt", "ff", "tt"),
        ("ff", "tt", "tt"),
        ("u", "tt", "tt"),
        ("tt", "u", "tt"),
        ("ff", "ff", "ff"),
    ] {
        let (t, reg) = programs::parallel_or(x, y).map_err(|e| e.to_string())?;
        let (got, _) = normal_form(&t, &reg)?;
        if got != want {
            return Err(format!("or({x}, {y}) gave {got}, expected {want}"));
        }
    }
    within(Duration::from_secs(1), start)
}

fn pi_values() -> Check {
    let start = Instant::now();
    for l in [4u64, 8, 16] {
        let want = pi_oracle(l);
        let want = format!("{}/{}", want.numer(), want.denom());
        for p in [2usize, 4] {
            let (t, reg) = programs::pi(p, l).map_err(|e| e.to_string())?;
            let (got, _) = normal_form(&t, &reg)?;
            if got != want {
                return Err(format!("l={l} p={p}: got {got}, expected {want}"));
            }
        }
    }
    within(Duration::from_secs(1), start)
}

fn fw_symbolic() -> Check {
    let (t, reg) = programs::fw(3, None).map_err(|e| e.to_string())?;
    let (got, events) = normal_form(&t, &reg)?;
    if got != "I1(3) || I2(3) || I3(3)" {
        return Err(format!("normal form {got}"));
    }
    let first = events
        .iter()
        .position(|e| e.kind == RedexKind::Cross)
        .ok_or("no communication")?;
    if !events[first].term.contains("f <I2(0), I1(0)>") {
        return Err(format!("first communication gave {}", events[first].term));
    }
    let second_cycle = events
        .iter()
        .position(|e| e.kind == RedexKind::Cross && e.term.contains(", I2(1)>"))
        .ok_or("I2(1) is never delivered")?;
    let last = events.len() - 1;
    if events[last].kind != RedexKind::Simplify || events[last].term != got {
        return Err(format!("last step is {} {}", events[last].kind, events[last].term));
    }
    if !(first < second_cycle && second_cycle < last) {
        return Err(format!("milestones out of order: {first}, {second_cycle}, {last}"));
    }
    Ok(())
}

fn fw_numeric() -> Check {
    let start = Instant::now();
    let report = fuzz::floyd_warshall_graphs(&FuzzOptions { count: 24, seed: 11, ..Default::default() })
        .map_err(|e| e.to_string())?;
    if !report.passed() {
        return Err(report.to_string());
    }
    within(Duration::from_secs(5), start)
}

fn topo_golden_and_round_trip() -> Check {
    let start = Instant::now();
    let file = parse_topology(include_str!("../programs/example4.topo")).map_err(|e| e.to_string())?;
    let schema = extract_axiom(&file.graph).map_err(|e| e.to_string())?;
    let want = "(A1 -> A1 /\\ A2 /\\ A4) \\/ (A2 -> A2 /\\ A1) \\/ (A3 -> A3 /\\ A1 /\\ A2) \\/ (A4 -> A4 /\\ Bot)";
    if schema.notation() != want {
        return Err(format!("got {}", schema.notation()));
    }
    let mut graphs = 0;
    for n in 1..=4 {
        for g in all_reflexive_graphs(n) {
            graphs += 1;
            let back = schema_to_graph(&extract_axiom(&g).map_err(|e| e.to_string())?);
            if back != g {
                return Err(format!("round trip changed\n{g}into\n{back}"));
            }
        }
    }
    if graphs != 1 + 4 + 64 + 4096 {
        return Err(format!("enumerated {graphs} graphs"));
    }
    within(Duration::from_secs(10), start)
}

fn topology_correspondence() -> Check {
    for n in 1..=4 {
        for g in all_reflexive_graphs(n) {
            let want: BTreeSet<(usize, usize)> = g.edges().iter().copied().filter(|(s, d)| s != d).collect();
            let seen = programs::observed_edges(&g).map_err(|e| e.to_string())?;
            if seen != want {
                return Err(format!("graph\n{g}observed {seen:?}"));
            }
        }
    }
    Ok(())
}

fn subject_reduction() -> Check {
    let start = Instant::now();
    let report = fuzz::subject_reduction(&FuzzOptions { count: 1000, seed: 7, ..Default::default() })
        .map_err(|e| e.to_string())?;
    if !report.passed() {
        return Err(report.to_string());
    }
    within(Duration::from_secs(60), start)
}

fn termination() -> Check {
    let opts = FuzzOptions { count: 500, seed: 7, fuel: 100_000, ..Default::default() };
    for report in [fuzz::termination(&opts), fuzz::nd_termination(&opts)] {
        let report = report.map_err(|e| e.to_string())?;
        if !report.passed() || report.cases != 500 {
            return Err(report.to_string());
        }
    }
    Ok(())
}

fn buyer_vendor() -> Check {
    let start = Instant::now();
    let (t, reg) = programs::buyer_vendor().map_err(|e| e.to_string())?;
    let (got, events) = normal_form(&t, &reg)?;
    // projections that unpack a delivered tuple belong to the step that delivered it
    let mut shown: Vec<(RedexKind, String)> = Vec::new();
    for e in events {
        match (e.kind, shown.last_mut()) {
            (RedexKind::Proj, Some(last)) => last.1 = e.term,
            _ => shown.push((e.kind, e.term)),
        }
    }
    let header = "nu a : {1: String ~ [2]; 2: Nat ~ [1]} . ";
    let want = [
        (RedexKind::Cross, "B (a! (pay_for (a? prod).1)) || V (use (a! (cost prod)).1)"),
        (RedexKind::Delta, "B (a! (pay_for (a? prod).1)) || V (use (a! price).1)"),
        (RedexKind::Cross, "B (a! (pay_for price)) || V (use (a? price).1)"),
        (RedexKind::Delta, "B (a! card) || V (use (a? price).1)"),
        (RedexKind::Cross, "B (a? card) || V (use card)"),
        (RedexKind::Simplify, "V (use card)"),
    ];
    if shown.len() != want.len() {
        return Err(format!("{} steps, expected {}", shown.len(), want.len()));
    }
    for (i, ((kind, term), (wk, wt))) in shown.iter().zip(want).enumerate() {
        let wt = if wk == RedexKind::Simplify { wt.to_string() } else { format!("{header}{wt}") };
        if *kind != wk || *term != wt {
            return Err(format!("step {}: {kind} {term}, expected {wk} {wt}", i + 1));
        }
    }
    if got != "V (use card)" {
        return Err(format!("normal form {got}"));
    }
    within(Duration::from_secs(1), start)
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("parallel or truth table", parallel_or),
        ("pi approximation equals the sequential sum", pi_values),
        ("Floyd-Warshall symbolic trace", fw_symbolic),
        ("Floyd-Warshall numeric against the oracle", fw_numeric),
        ("topology compiler golden case and round trip", topo_golden_and_round_trip),
        ("topology correspondence", topology_correspondence),
        ("subject reduction on random programs", subject_reduction),
        ("termination of random runs", termination),
        ("buyer and vendor", buyer_vendor),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let took = start.elapsed();
        match result {
            Ok(()) => println!("criterion {}: {name} ... PASS ({took:.2?})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: {name} ... FAIL ({took:.2?}): {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
