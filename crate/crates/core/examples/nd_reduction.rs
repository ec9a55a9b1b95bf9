//! The non-deterministic reduction on a small term with channels: successors and random runs.
use lampar::gen;
use lampar::ndredux::{nd_run_random, nd_successors, NdBudget};
use lampar::syntax::{parse_type, pretty};
use lampar::term::{Polarity, Term};
use lampar::Formula;

fn main() -> lampar::Result<()> {
    let reg = gen::registry();
    let ty = parse_type("A -> A /\\ B")?;
    let v = Term::var("v", Formula::atom("A"));
    let w = Term::var("w", Formula::atom("B"));
    let t = Term::pair(Term::app(Term::chan("a", Polarity::In, 1, ty), v), w);
    println!("{}", pretty(&t));
    for s in nd_successors(&t, &NdBudget::default(), &reg)? {
        println!("  ~> {}", pretty(&s));
    }
    for seed in 0..3 {
        let r = nd_run_random(&t, &NdBudget { seed, ..Default::default() }, 1000, &reg)?;
        println!("seed {seed}: terminated {} after {} steps", r.terminated, r.steps);
    }
    Ok(())
}
