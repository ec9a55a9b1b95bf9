//! A generated program reduced by the deterministic strategy and by seeded random choice.
use lampar::engine::{enumerate_steps, run, StrategyKind, StrategyParams};
use lampar::gen::{self, GenConfig};
use lampar::syntax::pretty;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> lampar::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    let reg = gen::registry();
    let p = gen::program(&mut ChaCha8Rng::seed_from_u64(seed), &GenConfig::default())?;
    println!("program: {}", pretty(&p));
    for (d, _) in enumerate_steps(&p, &reg)? {
        println!("  possible: {d}");
    }
    let r = run(&p, &reg, &StrategyParams::default())?;
    println!("strategy: {} after {} steps", pretty(r.outcome.term()), r.steps);
    for s in 0..3 {
        let params = StrategyParams { strategy: StrategyKind::Random { seed: s }, check_types: true, ..Default::default() };
        let r = run(&p, &reg, &params)?;
        println!("random {s}: {}", pretty(r.outcome.term()));
    }
    Ok(())
}
