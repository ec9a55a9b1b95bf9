//! Floyd-Warshall over a ring of processes: symbolic rows with the full trace, then a random
//! weighted graph compared with the sequential algorithm.
use lampar::engine::{run, StrategyParams};
use lampar::fuzz::{random_matrix, result_rows};
use lampar::prims::floyd_warshall;
use lampar::programs::fw;
use lampar::syntax::pretty;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> lampar::Result<()> {
    let n = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let (t, reg) = fw(n, None)?;
    let r = run(&t, &reg, &StrategyParams::default())?;
    print!("{}", r.trace.to_text());

    let m = random_matrix(&mut ChaCha8Rng::seed_from_u64(1), n);
    let (t, reg) = fw(n, Some(&m))?;
    let r = run(&t, &reg, &StrategyParams::default())?;
    println!("{}", pretty(r.outcome.term()));
    println!("agrees with the sequential algorithm: {}", result_rows(r.outcome.term()) == Some(floyd_warshall(&m)));
    Ok(())
}
