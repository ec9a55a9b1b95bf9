//! Seeded generators of well-typed terms and programs.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::Result;
use crate::formula::{AxiomInstance, AxiomSchema, Formula};
use crate::prims::Registry;
use crate::term::{Polarity, Term};
use crate::topology::TopologyGraph;

const ATOMS: [&str; 2] = ["A", "B"];

/// Base registry plus default constants `dA`, `dB` so every atom the generators use is inhabited.
pub fn registry() -> Registry {
    let mut r = Registry::base();
    for a in ATOMS {
        let d = format!("d{a}");
        r.register_opaque(&d, Formula::atom(a));
        r.set_default(a, Term::op(d, Formula::atom(a)));
    }
    r
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenConfig {
    /// Nesting depth of generated terms.
    pub depth: usize,
    pub max_processes: usize,
    pub max_threads: usize,
    /// Chance of a channel occurrence wherever one would fit.
    pub channel_rate: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { depth: 3, max_processes: 4, max_threads: 2, channel_rate: 0.7 }
    }
}

/// Where channel occurrences may be placed: the enclosing process and the types involved.
#[derive(Clone)]
struct ChanSite {
    index: usize,
    /// Chance that an occurrence is an input.
    input_rate: f64,
    payload: Formula,
    tail: Formula,
    ty: Formula,
}

struct Gen<'g, R: Rng> {
    rng: &'g mut R,
    cfg: GenConfig,
    /// Free variables invented so far, by name.
    free: BTreeMap<String, Formula>,
    fresh: usize,
    chan: Option<ChanSite>,
    /// Free channel atoms for simply typed terms, when no process is in scope.
    loose_chans: bool,
}

fn random_type<R: Rng>(rng: &mut R, depth: usize) -> Formula {
    let atom = Formula::atom(*ATOMS.choose(rng).expect("nonempty"));
    if depth == 0 {
        return atom;
    }
    match rng.gen_range(0..5) {
        0 => Formula::arrow(random_type(rng, depth - 1), random_type(rng, depth - 1)),
        1 => Formula::conj(random_type(rng, depth - 1), random_type(rng, depth - 1)),
        _ => atom,
    }
}

impl<'g, R: Rng> Gen<'g, R> {
    fn free_var(&mut self, ty: &Formula) -> Term {
        let same: Vec<&String> = self.free.iter().filter(|(_, t)| *t == ty).map(|(n, _)| n).collect();
        if !same.is_empty() && self.rng.gen_bool(0.5) {
            let name = (*same.choose(self.rng).expect("nonempty")).clone();
            return Term::var(name, ty.clone());
        }
        self.fresh += 1;
        let name = format!("v{}", self.fresh);
        self.free.insert(name.clone(), ty.clone());
        Term::var(name, ty.clone())
    }

    fn bound_name(&mut self) -> String {
        self.fresh += 1;
        format!("x{}", self.fresh)
    }

    /// A channel application whose result has type `want`, if one fits.
    fn channel_use(&mut self, ctx: &[(String, Formula)], want: &Formula, depth: usize) -> Option<Term> {
        let site = match &self.chan {
            Some(s) => s.clone(),
            None if self.loose_chans => {
                let payload = want.clone();
                let tail = Formula::atom(*ATOMS.choose(self.rng).expect("nonempty"));
                let ty = Formula::arrow(payload.clone(), Formula::conj(payload.clone(), tail.clone()));
                ChanSite { index: 1, input_rate: 0.5, payload, tail, ty }
            }
            None => return None,
        };
        let pol = if self.rng.gen_bool(site.input_rate) { Polarity::In } else { Polarity::Out };
        let full = Formula::conj(site.payload.clone(), site.tail.clone());
        let wrap: fn(Term) -> Term = if *want == site.payload {
            Term::fst
        } else if *want == site.tail {
            Term::snd
        } else if *want == full {
            |t| t
        } else {
            return None;
        };
        let arg = self.term(ctx, &site.payload, depth.saturating_sub(1));
        Some(wrap(Term::app(Term::chan("a", pol, site.index, site.ty), arg)))
    }

    fn term(&mut self, ctx: &[(String, Formula)], want: &Formula, depth: usize) -> Term {
        if self.rng.gen_bool(self.cfg.channel_rate) {
            if let Some(t) = self.channel_use(ctx, want, depth) {
                return t;
            }
        }
        let bound: Vec<&(String, Formula)> = ctx.iter().filter(|(_, t)| t == want).collect();
        if depth == 0 {
            if !bound.is_empty() && self.rng.gen_bool(0.6) {
                let (n, t) = (*bound.choose(self.rng).expect("nonempty")).clone();
                return Term::var(n, t);
            }
            return self.free_var(want);
        }
        match self.rng.gen_range(0..6) {
            // beta redex
            0 => {
                let x = self.bound_name();
                let dom = random_type(self.rng, 1);
                let mut inner = ctx.to_vec();
                inner.push((x.clone(), dom.clone()));
                let body = self.term(&inner, want, depth - 1);
                let arg = self.term(ctx, &dom, depth - 1);
                Term::app(Term::lam(x, dom, body), arg)
            }
            // projection redex or projection of something opaque
            1 => {
                let other = random_type(self.rng, 0);
                let left = self.rng.gen_bool(0.5);
                let (l, r) = if left { (want.clone(), other) } else { (other, want.clone()) };
                let pair_ty = Formula::conj(l.clone(), r.clone());
                let of = if self.rng.gen_bool(0.5) {
                    Term::pair(self.term(ctx, &l, depth - 1), self.term(ctx, &r, depth - 1))
                } else {
                    self.term(ctx, &pair_ty, depth - 1)
                };
                if left {
                    Term::fst(of)
                } else {
                    Term::snd(of)
                }
            }
            // application of a function-typed term
            2 => {
                let dom = random_type(self.rng, 0);
                let f = self.term(ctx, &Formula::arrow(dom.clone(), want.clone()), depth - 1);
                let a = self.term(ctx, &dom, depth - 1);
                Term::app(f, a)
            }
            _ => match want {
                Formula::Arrow(d, c) => {
                    let x = self.bound_name();
                    let mut inner = ctx.to_vec();
                    inner.push((x.clone(), (**d).clone()));
                    Term::lam(x, (**d).clone(), self.term(&inner, c, depth - 1))
                }
                Formula::Conj(l, r) => Term::pair(self.term(ctx, l, depth - 1), self.term(ctx, r, depth - 1)),
                _ if !bound.is_empty() => {
                    let (n, t) = (*bound.choose(self.rng).expect("nonempty")).clone();
                    Term::var(n, t)
                }
                _ => self.free_var(want),
            },
        }
    }
}

/// A random simply typed term of a random type. With `channels`, free channel occurrences of
/// both polarities appear, as used by the non-deterministic reduction.
pub fn simply_typed_term<R: Rng>(rng: &mut R, cfg: &GenConfig, channels: bool) -> Term {
    let ty = random_type(rng, 1);
    let mut g = Gen { rng, cfg: *cfg, free: BTreeMap::new(), fresh: 0, chan: None, loose_chans: channels };
    g.term(&[], &ty, cfg.depth)
}

/// A random axiom schema on `m` processes, each non-self edge present with probability 0.4.
pub fn random_schema<R: Rng>(rng: &mut R, m: usize) -> Result<AxiomSchema> {
    let mut edges = Vec::new();
    for j in 1..=m {
        for i in 1..=m {
            if i != j && rng.gen_bool(0.4) {
                edges.push((i, j));
            }
        }
    }
    crate::topology::extract_axiom(&TopologyGraph::reflexive(m, edges))
}

/// A random well-typed program whose root is a single parallel binder.
pub fn program<R: Rng>(rng: &mut R, cfg: &GenConfig) -> Result<Term> {
    let m = rng.gen_range(2..=cfg.max_processes.max(2));
    let schema = random_schema(rng, m)?;
    let assignment: Vec<Formula> = (0..m).map(|_| random_type(rng, 0)).collect();
    let inst = AxiomInstance::new(schema, assignment)?;
    let thread_ty = random_type(rng, 0);
    let mut g = Gen { rng, cfg: *cfg, free: BTreeMap::new(), fresh: 0, chan: None, loose_chans: false };
    let mut processes = Vec::new();
    for i in 1..=m {
        let ty = inst.channel_type(i).expect("index in range");
        let (payload, rest) = ty.as_arrow().map(|(p, r)| (p.clone(), r.clone())).expect("channel type is an arrow");
        let tail = rest.as_conj().map(|(_, t)| t.clone()).expect("channel result is a pair");
        // lean each process towards receiving or sending so that communications line up
        let receives = inst.schema().outlinks(i).is_some() && g.rng.gen_bool(0.5);
        let input_rate = if receives { 0.85 } else { 0.15 };
        g.chan = Some(ChanSite { index: i, input_rate, payload, tail, ty });
        let k = g.rng.gen_range(1..=cfg.max_threads.max(1));
        let threads = (0..k).map(|_| g.term(&[], &thread_ty, cfg.depth)).collect();
        processes.push(threads);
    }
    Ok(Term::nu("a", inst, processes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::typecheck::check_program;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_programs_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut with_channels = 0;
        for _ in 0..200 {
            let p = program(&mut rng, &GenConfig::default()).unwrap();
            check_program(&p).unwrap_or_else(|e| panic!("{e}\n{}", crate::syntax::pretty(&p)));
            with_channels += usize::from(p.has_channels());
        }
        assert!(with_channels > 150);
    }

    #[test]
    fn generated_terms_synthesize() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let t = simply_typed_term(&mut rng, &GenConfig::default(), true);
            crate::typecheck::synthesize(&t).unwrap();
        }
    }
}
