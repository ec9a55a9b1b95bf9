use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lampar::engine::{cross_ready, cross_reduce, run, StrategyKind, StrategyParams, TraceMode};
use lampar::gen::{self, GenConfig};
use lampar::syntax::{parse_program, pretty_program};
use lampar::term::{mk_tuple, substitute, tuple_component, Polarity, Term};
use lampar::topology::{extract_axiom, schema_to_graph, TopologyGraph};
use lampar::typecheck::{check_program, synthesize};
use lampar::Formula;

fn program(seed: u64) -> Term {
    gen::program(&mut ChaCha8Rng::seed_from_u64(seed), &GenConfig::default()).unwrap()
}

fn simple(seed: u64) -> Term {
    gen::simply_typed_term(&mut ChaCha8Rng::seed_from_u64(seed), &GenConfig::default(), false)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn printed_programs_parse_back(seed in any::<u64>()) {
        let reg = gen::registry();
        for t in [program(seed), simple(seed)] {
            let text = pretty_program(&t);
            let back = parse_program(&text, &reg).map_err(|e| TestCaseError::fail(format!("{text}\n{e}")))?.term;
            prop_assert!(back.alpha_eq(&t), "{}", text);
        }
    }

    #[test]
    fn tuple_components_round_trip(n in 1usize..7) {
        let items: Vec<Term> = (0..n).map(|i| Term::var(format!("w{i}"), Formula::atom("A"))).collect();
        let t = mk_tuple(items.clone()).unwrap();
        for (i, item) in items.iter().enumerate() {
            prop_assert_eq!(&tuple_component(&t, i, n).unwrap(), item);
        }
    }

    #[test]
    fn substitution_keeps_type_and_bounds_free_variables(seed in any::<u64>()) {
        let t = simple(seed);
        let fv = t.free_var_types();
        let Some((x, ty)) = fv.iter().next() else { return Ok(()) };
        let v = Term::var("fresh", ty.clone());
        let out = substitute(&t, x, &v).unwrap();
        prop_assert_eq!(synthesize(&out).unwrap(), synthesize(&t).unwrap());
        let mut allowed: BTreeSet<String> = t.free_vars();
        allowed.remove(x);
        allowed.insert("fresh".into());
        prop_assert!(out.free_vars().is_subset(&allowed));
        prop_assert!(!out.occurs_free(x));
    }

    #[test]
    fn topology_round_trip(n in 1usize..7, bits in any::<u64>()) {
        let pairs: Vec<(usize, usize)> = (1..=n).flat_map(|s| (1..=n).filter(move |&d| d != s).map(move |d| (s, d))).collect();
        let edges = pairs.iter().enumerate().filter(|(i, _)| bits >> (i % 64) & 1 == 1).map(|(_, &e)| e);
        let g = TopologyGraph::reflexive(n, edges);
        prop_assert_eq!(schema_to_graph(&extract_axiom(&g).unwrap()), g);
    }

    #[test]
    fn communication_is_local(seed in any::<u64>()) {
        let Term::Nu(nu) = program(seed) else { unreachable!() };
        for r in 1..=nu.processes.len() {
            let Ok(plan) = cross_ready(&nu, r) else { continue };
            let after = cross_reduce(&nu, &plan).unwrap();
            let senders: BTreeSet<usize> = plan.senders.iter().map(|s| s.process).collect();
            for (p, (before_ts, after_ts)) in nu.processes.iter().zip(&after.processes).enumerate() {
                let p = p + 1;
                if p != r && !senders.contains(&p) {
                    prop_assert_eq!(before_ts, after_ts);
                }
            }
            for s in &plan.senders {
                let Some(Term::Chan(c)) = after.processes[s.process - 1][s.thread].at(&s.chan_path) else {
                    return Err(TestCaseError::fail("sender site lost its channel"));
                };
                prop_assert_eq!(c.polarity, Polarity::In);
            }
            // the receiver keeps what it put in as the first component
            for site in &plan.sites {
                let got = after.processes[r - 1][site.thread].at(&site.app_path).unwrap();
                let first = tuple_component(got, 0, plan.senders.len() + 1).unwrap();
                prop_assert!(first.alpha_eq(&site.argument));
            }
        }
    }

    #[test]
    fn every_random_step_preserves_typing(seed in any::<u64>()) {
        let p = program(seed);
        let params = StrategyParams {
            strategy: StrategyKind::Random { seed },
            check_types: true,
            trace: TraceMode::Off,
            ..Default::default()
        };
        let r = run(&p, &gen::registry(), &params);
        prop_assert!(r.is_ok(), "{:?}", r.err());
    }

    #[test]
    fn strategy_is_deterministic(seed in any::<u64>()) {
        let p = program(seed);
        let reg = gen::registry();
        let a = run(&p, &reg, &StrategyParams::default()).unwrap();
        let b = run(&p, &reg, &StrategyParams::default()).unwrap();
        prop_assert_eq!(a.trace, b.trace);
        prop_assert_eq!(a.outcome, b.outcome);
    }

    #[test]
    fn strategy_results_are_well_typed(seed in any::<u64>()) {
        let p = program(seed);
        let ty = check_program(&p).unwrap();
        let r = run(&p, &gen::registry(), &StrategyParams { trace: TraceMode::Off, ..Default::default() }).unwrap();
        prop_assert_eq!(check_program(r.outcome.term()).unwrap(), ty);
    }
}
