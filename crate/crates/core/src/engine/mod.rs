//! Reduction: intuitionistic steps, communication, simplification, and the deterministic
//! strategy with round-robin receiver selection.

mod cross;
mod redex;
mod trace;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::prims::Registry;
use crate::syntax::pretty;
use crate::term::{NuTerm, Path, Step, Term};
use crate::typecheck::{check_program, check_step_preserves_type, Context};

pub use cross::{
    channel_free_threads, cross_ready, cross_reduce, rightmost_channel, rightmost_in_process, simplify, CrossPlan,
    Occurrence, ReceiverSite, SenderSite,
};
pub use redex::{all_redexes, contract_here, intuitionistic_step, is_intuitionistic_normal, leftmost_redex};
pub use trace::{Location, RedexDescriptor, RedexKind, Trace, TraceEvent, TraceMode};

/// Which threads are normalized before communication is attempted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NormalizationScope {
    /// Every thread, in process and thread order.
    #[default]
    Everything,
    /// Only the channel threads of the candidate receiver and the rightmost channel thread of
    /// each of its senders; the rest only when no receiver is ready.
    Designated,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum StrategyKind {
    #[default]
    Deterministic,
    /// Uniform choice among all one-step successors.
    Random { seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrategyParams {
    pub fuel: usize,
    /// Process that receives first (1-based).
    pub start_receiver: usize,
    pub scope: NormalizationScope,
    /// Drop results that are alpha-equal to an earlier kept one when extracting.
    pub dedup_results: bool,
    pub trace: TraceMode,
    pub strategy: StrategyKind,
    /// Re-check typing after every step.
    pub check_types: bool,
}

impl Default for StrategyParams {
    fn default() -> Self {
        StrategyParams {
            fuel: 100_000,
            start_receiver: 1,
            scope: NormalizationScope::Everything,
            dedup_results: true,
            trace: TraceMode::On,
            strategy: StrategyKind::Deterministic,
            check_types: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    NormalForm(Term),
    Deadlock { term: Term, explanation: String },
    FuelExhausted(Term),
}

impl Outcome {
    pub fn term(&self) -> &Term {
        match self {
            Outcome::NormalForm(t) | Outcome::FuelExhausted(t) => t,
            Outcome::Deadlock { term, .. } => term,
        }
    }

    pub fn is_normal_form(&self) -> bool {
        matches!(self, Outcome::NormalForm(_))
    }
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub outcome: Outcome,
    pub trace: Trace,
    pub steps: usize,
}

/// Reduction state: the current term, whose turn it is to receive, and what is left of the fuel.
pub struct Machine<'r> {
    term: Term,
    receiver: usize,
    fuel: usize,
    steps: usize,
    trace: Trace,
    params: StrategyParams,
    registry: &'r Registry,
    rng: Option<ChaCha8Rng>,
    ctx: Context,
}

impl<'r> Machine<'r> {
    pub fn new(term: Term, registry: &'r Registry, params: StrategyParams) -> Machine<'r> {
        let rng = match params.strategy {
            StrategyKind::Random { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
            StrategyKind::Deterministic => None,
        };
        let ctx = term.free_var_types();
        Machine {
            term,
            receiver: params.start_receiver.max(1),
            fuel: params.fuel,
            steps: 0,
            trace: Trace::default(),
            params,
            registry,
            rng,
            ctx,
        }
    }

    pub fn term(&self) -> &Term {
        &self.term
    }

    pub fn receiver(&self) -> usize {
        self.receiver
    }

    pub fn fuel(&self) -> usize {
        self.fuel
    }

    pub fn trace(&self) -> &Trace {
        &self.trace
    }

    fn record(&mut self, before: Option<Term>, kind: RedexKind, location: Location) -> Result<()> {
        self.steps += 1;
        if let Some(before) = before {
            if !check_step_preserves_type(&before, &self.term, &self.ctx) {
                return Err(Error::Reduction(format!("step {} ({kind} {location}) does not preserve typing", self.steps)));
            }
        }
        if self.params.trace == TraceMode::On {
            self.trace.events.push(TraceEvent {
                step: self.steps,
                kind,
                location: location.to_string(),
                term: pretty(&self.term),
            });
        }
        Ok(())
    }

    fn snapshot(&self) -> Option<Term> {
        self.params.check_types.then(|| self.term.clone())
    }

    /// Normalizes the subterm at `at`; `false` when the fuel ran out first.
    fn normalize_at(&mut self, at: &Path) -> Result<bool> {
        loop {
            let sub = self.term.at(at).ok_or_else(|| Error::Reduction(format!("no subterm at {at}")))?;
            let Some((path, new, kind)) = leftmost_redex(sub, self.registry)? else {
                return Ok(true);
            };
            if self.fuel == 0 {
                return Ok(false);
            }
            self.fuel -= 1;
            let before = self.snapshot();
            let full = at.join(&path);
            *self.term.at_mut(&full).expect("redex path resolves") = new;
            self.record(before, kind, Location::At(full))?;
        }
    }

    fn thread_paths(&self) -> Vec<Path> {
        match &self.term {
            Term::Par(ts) => (0..ts.len()).map(|i| Path::root().child(Step::Thread(i))).collect(),
            Term::Nu(nu) => nu
                .processes
                .iter()
                .enumerate()
                .flat_map(|(p, ts)| (0..ts.len()).map(move |i| Path::root().child(Step::Proc(p, i))))
                .collect(),
            _ => vec![Path::root()],
        }
    }

    fn normalize_all(&mut self) -> Result<bool> {
        for p in self.thread_paths() {
            if !self.normalize_at(&p)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn normalize_designated(&mut self, receiver: usize) -> Result<bool> {
        let Term::Nu(nu) = &self.term else {
            return Ok(true);
        };
        let mut targets = Vec::new();
        for (i, t) in nu.processes[receiver - 1].iter().enumerate() {
            if t.mentions_chan(&nu.chan) {
                targets.push(Path::root().child(Step::Proc(receiver - 1, i)));
            }
        }
        for &j in nu.instance.schema().outlinks(receiver).unwrap_or(&[]) {
            if let Some((i, _)) = rightmost_in_process(&nu.processes[j - 1], &nu.chan) {
                targets.push(Path::root().child(Step::Proc(j - 1, i)));
            }
        }
        for p in targets {
            if !self.normalize_at(&p)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn nu(&self) -> Option<&NuTerm> {
        match &self.term {
            Term::Nu(nu) => Some(nu),
            _ => None,
        }
    }

    fn fire(&mut self, plan: &CrossPlan) -> Result<()> {
        let nu = self.nu().expect("binder");
        let out = cross_reduce(nu, plan)?;
        let before = self.snapshot();
        self.term = Term::Nu(Box::new(out));
        let location = Location::Cross {
            receiver: plan.receiver,
            threads: plan.sites.iter().map(|s| (s.thread + 1, s.app_path.clone())).collect(),
            senders: plan.senders.iter().map(|s| s.process).collect(),
        };
        self.record(before, RedexKind::Cross, location)
    }

    /// Tries every receiver once, starting with the current one; fires the first that is ready.
    fn scan(&mut self, designated: bool) -> Result<std::result::Result<bool, Vec<(usize, String)>>> {
        let m = self.nu().expect("binder").processes.len();
        let mut reasons = Vec::new();
        for k in 0..m {
            let r = (self.receiver - 1 + k) % m + 1;
            if designated && !self.normalize_designated(r)? {
                return Ok(Ok(false));
            }
            match cross_ready(self.nu().expect("binder"), r) {
                Ok(plan) => {
                    if self.fuel == 0 {
                        return Ok(Ok(false));
                    }
                    self.fuel -= 1;
                    self.fire(&plan)?;
                    self.receiver = r % m + 1;
                    return Ok(Ok(true));
                }
                Err(reason) => reasons.push((r, reason)),
            }
        }
        Ok(Err(reasons))
    }

    /// Leftmost channel-free thread of each process that has one.
    fn extraction(&self) -> Vec<(usize, usize)> {
        let nu = self.nu().expect("binder");
        let mut kept: Vec<(usize, usize)> = Vec::new();
        for (p, ts) in nu.processes.iter().enumerate() {
            let Some(i) = ts.iter().position(|t| !t.mentions_chan(&nu.chan)) else {
                continue;
            };
            let dup = self.params.dedup_results
                && kept.iter().any(|&(q, j)| nu.processes[q][j].alpha_eq(&ts[i]));
            if !dup {
                kept.push((p, i));
            }
        }
        kept
    }

    /// One iteration of the deterministic strategy. Returns the outcome once the run is over.
    pub fn strategy_step(&mut self) -> Result<Option<Outcome>> {
        if let StrategyKind::Random { .. } = self.params.strategy {
            return self.random_step();
        }
        if self.nu().is_none() {
            if !self.normalize_all()? {
                return Ok(Some(Outcome::FuelExhausted(self.term.clone())));
            }
            return Ok(Some(Outcome::NormalForm(self.term.clone())));
        }
        let designated = self.params.scope == NormalizationScope::Designated;
        if !designated && !self.normalize_all()? {
            return Ok(Some(Outcome::FuelExhausted(self.term.clone())));
        }
        let mut reasons = match self.scan(designated)? {
            Ok(true) => return Ok(None),
            Ok(false) => return Ok(Some(Outcome::FuelExhausted(self.term.clone()))),
            Err(reasons) => reasons,
        };
        if designated {
            if !self.normalize_all()? {
                return Ok(Some(Outcome::FuelExhausted(self.term.clone())));
            }
            reasons = match self.scan(false)? {
                Ok(true) => return Ok(None),
                Ok(false) => return Ok(Some(Outcome::FuelExhausted(self.term.clone()))),
                Err(reasons) => reasons,
            };
        }
        let kept = self.extraction();
        if kept.is_empty() {
            let detail: Vec<String> = reasons.iter().map(|(r, why)| format!("receiver {r}: {why}")).collect();
            return Ok(Some(Outcome::Deadlock {
                term: self.term.clone(),
                explanation: format!("no extractable result; {}", detail.join("; ")),
            }));
        }
        if self.fuel == 0 {
            return Ok(Some(Outcome::FuelExhausted(self.term.clone())));
        }
        self.fuel -= 1;
        let before = self.snapshot();
        self.term = simplify(self.nu().expect("binder"), &kept)?;
        let kept1 = kept.iter().map(|&(p, i)| (p + 1, i + 1)).collect();
        self.record(before, RedexKind::Simplify, Location::Simplify { kept: kept1 })?;
        Ok(None)
    }

    fn random_step(&mut self) -> Result<Option<Outcome>> {
        let succs = enumerate_steps(&self.term, self.registry)?;
        if succs.is_empty() {
            return Ok(Some(match &self.term {
                Term::Nu(_) => Outcome::Deadlock {
                    term: self.term.clone(),
                    explanation: "no reduction applies".into(),
                },
                t => Outcome::NormalForm(t.clone()),
            }));
        }
        if self.fuel == 0 {
            return Ok(Some(Outcome::FuelExhausted(self.term.clone())));
        }
        self.fuel -= 1;
        let rng = self.rng.as_mut().expect("random strategy has a generator");
        let pick = rng.gen_range(0..succs.len());
        let (desc, next) = succs.into_iter().nth(pick).expect("index in range");
        let before = self.snapshot();
        self.term = next;
        self.record(before, desc.kind, desc.location)?;
        Ok(None)
    }

    /// Runs to an outcome.
    pub fn run(mut self) -> Result<RunResult> {
        loop {
            if let Some(outcome) = self.strategy_step()? {
                return Ok(RunResult { outcome, trace: self.trace, steps: self.steps });
            }
        }
    }
}

/// Type-checks `p` and reduces it under `params`.
pub fn run(p: &Term, registry: &Registry, params: &StrategyParams) -> Result<RunResult> {
    check_program(p)?;
    registry.check_term(p)?;
    if let Term::Nu(nu) = p {
        if params.start_receiver == 0 || params.start_receiver > nu.processes.len() {
            return Err(Error::Reduction(format!(
                "receiver {} out of range 1..{}",
                params.start_receiver,
                nu.processes.len()
            )));
        }
    }
    Machine::new(p.clone(), registry, params.clone()).run()
}

/// All one-step successors: every intuitionistic redex, one communication per ready
/// receiver, and every order-preserving nonempty choice of channel-free threads.
pub fn enumerate_steps(t: &Term, registry: &Registry) -> Result<Vec<(RedexDescriptor, Term)>> {
    let mut out = Vec::new();
    for (path, new, kind) in all_redexes(t, registry)? {
        let next = t.replace_at(&path, new)?;
        out.push((RedexDescriptor { kind, location: Location::At(path) }, next));
    }
    if let Term::Nu(nu) = t {
        for r in 1..=nu.processes.len() {
            if let Ok(plan) = cross_ready(nu, r) {
                let next = Term::Nu(Box::new(cross_reduce(nu, &plan)?));
                let location = Location::Cross {
                    receiver: r,
                    threads: plan.sites.iter().map(|s| (s.thread + 1, s.app_path.clone())).collect(),
                    senders: plan.senders.iter().map(|s| s.process).collect(),
                };
                out.push((RedexDescriptor { kind: RedexKind::Cross, location }, next));
            }
        }
        let free = channel_free_threads(nu);
        if free.len() >= usize::BITS as usize - 1 {
            return Err(Error::Reduction("too many channel-free threads to enumerate".into()));
        }
        for mask in 1usize..(1 << free.len()) {
            let sel: Vec<(usize, usize)> =
                free.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &s)| s).collect();
            let next = simplify(nu, &sel)?;
            let kept = sel.iter().map(|&(p, i)| (p + 1, i + 1)).collect();
            out.push((RedexDescriptor { kind: RedexKind::Simplify, location: Location::Simplify { kept } }, next));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
