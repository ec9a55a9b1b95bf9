//! The parallel or truth table, including the opaque boolean `u` on either side.
use lampar::engine::{run, StrategyParams};
use lampar::programs::parallel_or;
use lampar::syntax::pretty;

fn main() -> lampar::Result<()> {
    for (x, y) in [("tt", "tt"), ("tt", "ff"), ("ff", "tt"), ("ff", "ff"), ("u", "tt"), ("tt", "u")] {
        let (t, reg) = parallel_or(x, y)?;
        let r = run(&t, &reg, &StrategyParams::default())?;
        println!("or({x}, {y}) = {}  [{} steps]", pretty(r.outcome.term()), r.steps);
    }
    Ok(())
}
