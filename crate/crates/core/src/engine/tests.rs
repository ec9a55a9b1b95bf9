use super::*;
use crate::syntax::parse_program;

fn bool_reg() -> Registry {
    Registry::profile("bool", None).unwrap()
}

fn or_src(x: &str, y: &str) -> String {
    format!(
        "nu a : {{1: Bool ~ []; 2: Top ~ [1]}} . \
         (if {x} then tt else (a! ff).0) || (if {y} then tt else (a? (\\z:Bot. z)).1)"
    )
}

fn run_src(src: &str, reg: &Registry, params: StrategyParams) -> RunResult {
    let t = parse_program(src, reg).unwrap().term;
    run(&t, reg, &params).unwrap()
}

#[test]
fn parallel_or_table() {
    let reg = bool_reg();
    for (x, y, want) in [
        ("tt", "tt", "tt"),
        ("tt", "ff", "tt"),
        ("ff", "tt", "tt"),
        ("ff", "ff", "ff"),
        ("u", "tt", "tt"),
        ("tt", "u", "tt"),
    ] {
        let r = run_src(&or_src(x, y), &reg, StrategyParams::default());
        let Outcome::NormalForm(t) = &r.outcome else { panic!("{x} {y}: {:?}", r.outcome) };
        assert_eq!(pretty(t), want, "{x} {y}\n{}", r.trace.to_text());
    }
}

#[test]
fn parallel_or_designated_scope_agrees() {
    let reg = bool_reg();
    let params = StrategyParams { scope: NormalizationScope::Designated, ..Default::default() };
    let r = run_src(&or_src("ff", "ff"), &reg, params);
    assert_eq!(pretty(r.outcome.term()), "ff");
}

#[test]
fn deadlock_is_reported() {
    let src = "var x : A /\\ A -> B; var y : A /\\ A -> B; var s : A; var t : A; \
               nu a : {1: A ~ [2]; 2: A ~ [1]} . x (a? s) || y (a? t)";
    let r = run_src(src, &Registry::base(), StrategyParams::default());
    let Outcome::Deadlock { explanation, .. } = &r.outcome else { panic!("{:?}", r.outcome) };
    assert!(explanation.contains("receiver 1"), "{explanation}");
    assert!(explanation.contains("receiver 2"), "{explanation}");
}

#[test]
fn fuel_runs_out() {
    let params = StrategyParams { fuel: 1, ..Default::default() };
    let r = run_src("var v : A; (\\x:A. x) ((\\y:A. y) v)", &Registry::base(), params);
    assert!(matches!(r.outcome, Outcome::FuelExhausted(_)));
    assert_eq!(r.steps, 1);
}

#[test]
fn random_strategy_reaches_same_or_results() {
    let reg = bool_reg();
    for seed in 0..20 {
        let params = StrategyParams { strategy: StrategyKind::Random { seed }, check_types: true, ..Default::default() };
        let r = run_src(&or_src("ff", "tt"), &reg, params);
        let Outcome::NormalForm(t) = &r.outcome else { panic!("seed {seed}: {:?}", r.outcome) };
        let printed = pretty(t);
        assert!(printed == "tt" || printed == "tt || tt", "seed {seed}: {printed}");
    }
}

#[test]
fn successors_include_cross_and_simplify() {
    let reg = bool_reg();
    let t = parse_program(&or_src("ff", "ff"), &reg).unwrap().term;
    let kinds: Vec<RedexKind> = enumerate_steps(&t, &reg).unwrap().into_iter().map(|(d, _)| d.kind).collect();
    assert_eq!(kinds.iter().filter(|k| **k == RedexKind::Delta).count(), 2);
    let t = run_src(&or_src("ff", "ff"), &reg, StrategyParams { fuel: 2, ..Default::default() }).outcome;
    let succ = enumerate_steps(t.term(), &reg).unwrap();
    assert!(succ.iter().any(|(d, _)| d.kind == RedexKind::Cross), "{succ:?}");
}

#[test]
fn trace_formats() {
    let r = run_src(&or_src("ff", "ff"), &bool_reg(), StrategyParams::default());
    let kinds = r.trace.kinds();
    assert_eq!(kinds, vec![RedexKind::Delta, RedexKind::Delta, RedexKind::Cross, RedexKind::Proj, RedexKind::Simplify]);
    assert!(r.trace.to_text().lines().count() == kinds.len());
    for line in r.trace.to_json_lines().lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v.get("kind").is_some() && v.get("term").is_some());
    }
}
