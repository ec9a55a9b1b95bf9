//! Runs every property campaign with a small count and prints one summary line each.
use lampar::fuzz::{fuzz, FuzzKind, FuzzOptions};

fn main() -> lampar::Result<()> {
    let count = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(50);
    let opts = FuzzOptions { count, ..Default::default() };
    for kind in FuzzKind::ALL {
        println!("{}", fuzz(kind, &opts)?);
    }
    Ok(())
}
