//! Midpoint-rule approximation of pi split over `p` producers, checked against the sequential sum.
use lampar::engine::{run, StrategyParams};
use lampar::prims::{pi_oracle, Literal};
use lampar::programs::pi;
use lampar::term::{Prim, Term};
use num_traits::ToPrimitive;

fn main() -> lampar::Result<()> {
    for l in [4, 8, 16] {
        for p in [2, 4] {
            let (t, reg) = pi(p, l)?;
            let r = run(&t, &reg, &StrategyParams::default())?;
            let Term::Const { prim: Prim::Lit(Literal::Rat(q)), .. } = r.outcome.term() else {
                panic!("no rational result");
            };
            let approx = q.numer().to_f64().unwrap_or(f64::NAN) / q.denom().to_f64().unwrap_or(f64::NAN);
            println!("l={l:>2} p={p}: {approx:.10}  exact match: {}", *q == pi_oracle(l));
        }
    }
    Ok(())
}
