//! Prints the source of a generated program: `or`, `pi <p>`, `fw <n>` or `buyer-vendor`.
use lampar::programs::{fw_source, parallel_or_source, pi_source, BUYER_VENDOR_SOURCE};

fn main() -> lampar::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n = |i: usize, d: usize| args.get(i).and_then(|s| s.parse().ok()).unwrap_or(d);
    match args.first().map(String::as_str) {
        Some("pi") => print!("-- prims: pi\n{}", pi_source(n(1, 2), None)?),
        Some("fw") => print!("-- prims: floyd-warshall\n{}", fw_source(n(1, 3), None)?),
        Some("buyer-vendor") => print!("-- prims: buyer-vendor\n{BUYER_VENDOR_SOURCE}"),
        _ => print!("-- prims: bool\n{}", parallel_or_source("x", "y")),
    }
    Ok(())
}
