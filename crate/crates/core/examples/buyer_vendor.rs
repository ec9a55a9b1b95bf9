//! Buyer and vendor exchanging a product name, its price and a card number.
use lampar::engine::{run, StrategyParams};
use lampar::programs::buyer_vendor;

fn main() -> lampar::Result<()> {
    let (t, reg) = buyer_vendor()?;
    let r = run(&t, &reg, &StrategyParams::default())?;
    print!("{}", r.trace.to_text());
    Ok(())
}
