//! The non-deterministic reduction over simply typed terms: ordinary redexes, `a!` turning
//! into `a?`, and `a?` replaced by a channel-free term of its type.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::{all_redexes, CrossPlan};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::prims::Registry;
use crate::term::{mk_tuple, NuTerm, Path, Polarity, Step, Term};
use crate::typecheck::synthesize;

/// Limits that make the successor set finite.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NdBudget {
    /// Largest subterm reused inside an injector `\x. <x, w>`.
    pub max_size: usize,
    pub max_successors: usize,
    pub seed: u64,
}

impl Default for NdBudget {
    fn default() -> Self {
        NdBudget { max_size: 40, max_successors: 64, seed: 0 }
    }
}

fn simply_typed(t: &Term) -> Result<()> {
    let mut bad = false;
    t.walk(&mut |_, n| bad |= matches!(n, Term::Par(_) | Term::Nu(_)));
    if bad {
        return Err(Error::Term("expected a simply typed term without parallel composition".into()));
    }
    Ok(())
}

/// Whether `t` contains no channel occurrence.
pub fn is_deterministic(t: &Term) -> Result<bool> {
    simply_typed(t)?;
    Ok(!t.has_channels())
}

/// Closed channel-free term of type `f`, built from registered defaults.
pub fn canonical_inhabitant(f: &Formula, reg: &Registry) -> Result<Term> {
    match f {
        Formula::Atom(a) => reg
            .default_for(a)
            .cloned()
            .ok_or_else(|| Error::Term(format!("no default constant for {a}"))),
        Formula::Bottom => Err(Error::Term("Bot has no closed inhabitant".into())),
        Formula::Conj(l, r) => Ok(Term::pair(canonical_inhabitant(l, reg)?, canonical_inhabitant(r, reg)?)),
        Formula::Arrow(l, r) => {
            let body = match canonical_inhabitant(r, reg) {
                Ok(b) => b,
                // A -> A and in particular Top
                Err(_) if l == r => Term::var("x", (**l).clone()),
                Err(e) => return Err(e),
            };
            Ok(Term::lam("x", (**l).clone(), body))
        }
    }
}

/// Channel-free subterms of `t` with type `ty`, whose free variables are not rebound above `at`.
fn reusable(t: &Term, ty: &Formula, at: &Path, max_size: usize) -> Vec<Term> {
    let bound = t.binders_above(at);
    let mut out: Vec<Term> = Vec::new();
    t.walk(&mut |_, u| {
        if u.size() > max_size || u.has_channels() || out.iter().any(|o| o.alpha_eq(u)) {
            return;
        }
        if u.free_vars().iter().any(|v| bound.contains(&v.as_str())) {
            return;
        }
        if synthesize(u).is_ok_and(|found| &found == ty) {
            out.push(u.clone());
        }
    });
    out
}

/// `\x:A. <x, w>` for a channel of type `A -> A /\ B` and `w : B`.
pub fn injector(payload: &Formula, w: Term) -> Result<Term> {
    let fv = w.free_vars();
    let x = if fv.contains("x") { crate::term::fresh_name("x", &fv) } else { "x".to_string() };
    Ok(Term::lam(x.clone(), payload.clone(), mk_tuple(vec![Term::var(x, payload.clone()), w])?))
}

/// One-step successors. Redexes and flips are always listed; for each `a?` the canonical
/// inhabitant is listed, then injectors while the budget allows, chosen with the budget's seed.
pub fn nd_successors(t: &Term, budget: &NdBudget, reg: &Registry) -> Result<Vec<Term>> {
    simply_typed(t)?;
    let mut out = Vec::new();
    for (path, new, _) in all_redexes(t, reg)? {
        out.push(t.replace_at(&path, new)?);
    }
    let mut chans = Vec::new();
    t.walk(&mut |p, n| {
        if let Term::Chan(c) = n {
            chans.push((p.clone(), c.clone()));
        }
    });
    let mut extra = Vec::new();
    for (path, c) in &chans {
        match c.polarity {
            Polarity::Out => {
                let mut flipped = c.clone();
                flipped.polarity = Polarity::In;
                out.push(t.replace_at(path, Term::Chan(flipped))?);
            }
            Polarity::In => {
                if let Ok(inh) = canonical_inhabitant(&c.ty, reg) {
                    out.push(t.replace_at(path, inh)?);
                }
                let Some((payload, rest)) = c.ty.as_arrow() else { continue };
                let Some((_, tail)) = rest.as_conj() else { continue };
                for w in reusable(t, tail, path, budget.max_size) {
                    extra.push((path.clone(), injector(payload, w)?));
                }
            }
        }
    }
    let room = budget.max_successors.saturating_sub(out.len());
    if extra.len() > room {
        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed ^ t.size() as u64);
        extra.shuffle(&mut rng);
        extra.truncate(room);
    }
    for (path, r) in extra {
        out.push(t.replace_at(&path, r)?);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NdRun {
    pub terminated: bool,
    pub steps: usize,
}

/// Follows a seeded random path until no successor remains or the fuel runs out.
pub fn nd_run_random(t: &Term, budget: &NdBudget, fuel: usize, reg: &Registry) -> Result<NdRun> {
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let mut cur = t.clone();
    for steps in 0..=fuel {
        let step_budget = NdBudget { seed: rng.gen(), ..*budget };
        let mut succ = nd_successors(&cur, &step_budget, reg)?;
        if succ.is_empty() {
            return Ok(NdRun { terminated: true, steps });
        }
        if steps == fuel {
            break;
        }
        let i = rng.gen_range(0..succ.len());
        cur = succ.swap_remove(i);
    }
    Ok(NdRun { terminated: false, steps: fuel })
}

/// Replays a communication as non-deterministic steps: each receiving `a? v` becomes
/// `(\x. <x, w..>) v` and then `<v, w..>`, each sending `a!` is flipped.
/// Returns `Ok(false)` when the messages carry channels, so no injector exists.
pub fn simulate_cross(before: &NuTerm, plan: &CrossPlan, after: &NuTerm, reg: &Registry) -> Result<bool> {
    let messages: Vec<Term> = plan.senders.iter().map(|s| s.message.clone()).collect();
    if messages.iter().any(Term::has_channels) {
        return Ok(false);
    }
    let r = plan.receiver - 1;
    let payload = before.instance.payload_type(plan.receiver).ok_or_else(|| Error::Term("bad receiver".into()))?;
    let w = mk_tuple(messages)?;
    let mut replayed = before.processes.clone();
    for site in &plan.sites {
        let thread = &replayed[r][site.thread];
        let chan_at = site.app_path.child(Step::Fun);
        let bound = thread.binders_above(&chan_at);
        if w.free_vars().iter().any(|v| bound.contains(&v.as_str())) {
            return Ok(false);
        }
        let injected = thread.replace_at(&chan_at, injector(&payload, w.clone())?)?;
        let redex = injected.at(&site.app_path).expect("site exists").clone();
        let Some((contractum, _)) = crate::engine::contract_here(&redex, reg)? else {
            return Err(Error::Reduction("injector did not form a redex".into()));
        };
        replayed[r][site.thread] = injected.replace_at(&site.app_path, contractum)?;
    }
    for s in &plan.senders {
        let thread = &replayed[s.process - 1][s.thread];
        let Some(Term::Chan(c)) = thread.at(&s.chan_path) else {
            return Err(Error::Reduction("sender site is not a channel".into()));
        };
        let mut flipped = c.clone();
        flipped.polarity = Polarity::In;
        replayed[s.process - 1][s.thread] = thread.replace_at(&s.chan_path, Term::Chan(flipped))?;
    }
    for (p, ts) in replayed.iter().enumerate() {
        for (i, t) in ts.iter().enumerate() {
            if !t.alpha_eq(&after.processes[p][i]) {
                return Err(Error::Reduction(format!("replay differs at process {} thread {}", p + 1, i + 1)));
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{cross_ready, cross_reduce};
    use crate::syntax::{parse_program, pretty};

    fn reg() -> Registry {
        let mut r = Registry::profile("bool", None).unwrap();
        r.register_opaque("dA", Formula::atom("A"));
        r.set_default("A", Term::op("dA", Formula::atom("A")));
        r
    }

    fn chan(pol: Polarity, ty: &str) -> Term {
        Term::chan("a", pol, 1, crate::syntax::parse_type(ty).unwrap())
    }

    #[test]
    fn determinism() {
        let id = parse_program("\\x:A. x", &reg()).unwrap().term;
        assert!(is_deterministic(&id).unwrap());
        let s = Term::var("s", Formula::atom("A"));
        assert!(!is_deterministic(&Term::app(chan(Polarity::Out, "A -> A /\\ A"), s)).unwrap());
        assert!(is_deterministic(&parse_program("tt || tt", &reg()).unwrap().term).is_err());
    }

    #[test]
    fn inhabitants() {
        let r = reg();
        assert_eq!(pretty(&canonical_inhabitant(&Formula::top(), &r).unwrap()), "\\x:Bot. x");
        assert_eq!(pretty(&canonical_inhabitant(&Formula::atom("Bool"), &r).unwrap()), "tt");
        let ab = crate::syntax::parse_type("A /\\ Bool").unwrap();
        assert_eq!(pretty(&canonical_inhabitant(&ab, &r).unwrap()), "<dA, tt>");
        assert!(canonical_inhabitant(&Formula::Bottom, &r).is_err());
        assert!(canonical_inhabitant(&Formula::atom("C"), &r).is_err());
    }

    #[test]
    fn flip_and_replace() {
        let r = reg();
        let w = Term::var("w", Formula::atom("A"));
        let out = Term::app(chan(Polarity::Out, "A -> A /\\ A"), Term::var("v", Formula::atom("A")));
        let t = Term::pair(out, w);
        let succ: Vec<String> = nd_successors(&t, &NdBudget::default(), &r).unwrap().iter().map(pretty).collect();
        assert_eq!(succ, vec!["<a? v, w>"]);
        let t = Term::pair(Term::app(chan(Polarity::In, "A -> A /\\ A"), Term::var("v", Formula::atom("A"))), Term::var("w", Formula::atom("A")));
        let succ: Vec<String> = nd_successors(&t, &NdBudget::default(), &r).unwrap().iter().map(pretty).collect();
        assert!(succ.contains(&"<(\\x:A. <dA, dA>) v, w>".to_string()), "{succ:?}");
        assert!(succ.contains(&"<(\\x:A. <x, w>) v, w>".to_string()), "{succ:?}");
        let nf = Term::var("w", Formula::atom("A"));
        assert!(nd_successors(&nf, &NdBudget::default(), &r).unwrap().is_empty());
    }

    #[test]
    fn random_runs_terminate() {
        let r = reg();
        let t = Term::app(chan(Polarity::Out, "A -> A /\\ A"), Term::var("v", Formula::atom("A")));
        for seed in 0..20 {
            let run = nd_run_random(&t, &NdBudget { seed, ..Default::default() }, 1000, &r).unwrap();
            assert!(run.terminated && run.steps >= 2, "{run:?}");
        }
        let nf = Term::var("w", Formula::atom("A"));
        assert_eq!(nd_run_random(&nf, &NdBudget::default(), 10, &r).unwrap(), NdRun { terminated: true, steps: 0 });
    }

    #[test]
    fn communication_is_simulated() {
        let r = reg();
        let src = "var g : A /\\ A -> B; var s : A; var w : A; \
                   nu a : {1: A ~ [2]; 2: A ~ [1]} . g (a? s) || (a! w).0";
        let Term::Nu(nu) = parse_program(src, &r).unwrap().term else { panic!() };
        let plan = cross_ready(&nu, 1).unwrap();
        let after = cross_reduce(&nu, &plan).unwrap();
        assert!(simulate_cross(&nu, &plan, &after, &r).unwrap());
    }
}
