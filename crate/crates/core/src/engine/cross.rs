use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::term::{fresh_name, mk_tuple, NuTerm, Path, Polarity, Step, Term};

/// A channel occurrence found by [`rightmost_channel`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Occurrence {
    /// Path to the channel node.
    pub path: Path,
    pub polarity: Polarity,
    /// The argument when the occurrence is applied, `a! w` or `a? w`.
    pub argument: Option<Term>,
}

impl Occurrence {
    /// Path of the application node `a w`, when applied.
    pub fn app_path(&self) -> Option<Path> {
        self.argument.as_ref()?;
        self.path.parent()
    }
}

/// Last occurrence of `chan` in left-to-right preorder.
pub fn rightmost_channel(scope: &Term, chan: &str) -> Option<Occurrence> {
    let mut last: Option<(Path, Polarity)> = None;
    scope.walk(&mut |p, n| {
        if let Term::Chan(c) = n {
            if c.name == chan {
                last = Some((p.clone(), c.polarity));
            }
        }
    });
    let (path, polarity) = last?;
    let argument = match (path.steps().last(), path.parent().and_then(|pp| scope.at(&pp).cloned())) {
        (Some(Step::Fun), Some(Term::App(_, arg))) => Some(*arg),
        _ => None,
    };
    Some(Occurrence { path, polarity, argument })
}

/// Rightmost occurrence over a whole process: inside the last thread that mentions `chan`.
pub fn rightmost_in_process(threads: &[Term], chan: &str) -> Option<(usize, Occurrence)> {
    threads
        .iter()
        .enumerate()
        .rev()
        .find_map(|(i, t)| rightmost_channel(t, chan).map(|o| (i, o)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReceiverSite {
    /// Thread index within the receiving process (0-based).
    pub thread: usize,
    /// Path within the thread to the application `a? v`.
    pub app_path: Path,
    pub argument: Term,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SenderSite {
    /// Sending process (1-based).
    pub process: usize,
    pub thread: usize,
    /// Path within the thread to the output channel node.
    pub chan_path: Path,
    pub message: Term,
}

/// Everything needed to fire one communication towards `receiver`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossPlan {
    pub receiver: usize,
    pub sites: Vec<ReceiverSite>,
    /// In the receiver's outlink order.
    pub senders: Vec<SenderSite>,
}

/// Plans a communication towards process `receiver` (1-based), or explains why none applies.
pub fn cross_ready(nu: &NuTerm, receiver: usize) -> std::result::Result<CrossPlan, String> {
    let m = nu.processes.len();
    if receiver == 0 || receiver > m {
        return Err(format!("no process {receiver}"));
    }
    let Some(links) = nu.instance.schema().outlinks(receiver) else {
        return Err(format!("process {receiver} has no senders"));
    };
    let mut sites = Vec::new();
    for (i, t) in nu.processes[receiver - 1].iter().enumerate() {
        let Some(occ) = rightmost_channel(t, &nu.chan) else {
            continue;
        };
        if occ.polarity != Polarity::In {
            return Err(format!("thread {} of process {receiver} ends with an output", i + 1));
        }
        let (Some(app_path), Some(argument)) = (occ.app_path(), occ.argument.clone()) else {
            return Err(format!("thread {} of process {receiver} has an unapplied input", i + 1));
        };
        sites.push(ReceiverSite { thread: i, app_path, argument });
    }
    if sites.is_empty() {
        return Err(format!("process {receiver} does not use the channel"));
    }
    let mut senders = Vec::new();
    for &j in links {
        let threads = &nu.processes[j - 1];
        let Some((ti, occ)) = rightmost_in_process(threads, &nu.chan) else {
            return Err(format!("sender {j} no longer uses the channel"));
        };
        if occ.polarity != Polarity::Out {
            return Err(format!("sender {j} is waiting for input"));
        }
        let Some(message) = occ.argument.clone() else {
            return Err(format!("sender {j} has an unapplied output"));
        };
        let binders: BTreeSet<&str> = threads[ti].binders_above(&occ.path).into_iter().collect();
        if let Some(x) = message.free_vars().iter().find(|x| binders.contains(x.as_str())) {
            return Err(format!("message of sender {j} depends on the bound variable {x}"));
        }
        senders.push(SenderSite { process: j, thread: ti, chan_path: occ.path, message });
    }
    Ok(CrossPlan { receiver, sites, senders })
}

/// Fires a planned communication: each `a? v` in the receiver becomes `<v, w1, ..., wp>`
/// and each sender's `a!` becomes `a?`.
pub fn cross_reduce(nu: &NuTerm, plan: &CrossPlan) -> Result<NuTerm> {
    let stale = || Error::Reduction("stale communication plan".into());
    let mut out = nu.clone();
    let messages: Vec<Term> = plan.senders.iter().map(|s| s.message.clone()).collect();
    let mut message_fv = BTreeSet::new();
    for w in &messages {
        message_fv.extend(w.free_vars());
    }
    for s in &plan.senders {
        let thread = out
            .processes
            .get_mut(s.process - 1)
            .and_then(|p| p.get_mut(s.thread))
            .ok_or_else(stale)?;
        match thread.at_mut(&s.chan_path) {
            Some(Term::Chan(c)) if c.name == nu.chan && c.polarity == Polarity::Out => c.polarity = Polarity::In,
            _ => return Err(stale()),
        }
    }
    let process = out.processes.get_mut(plan.receiver - 1).ok_or_else(stale)?;
    for site in &plan.sites {
        let thread = process.get_mut(site.thread).ok_or_else(stale)?;
        match thread.at(&site.app_path) {
            Some(Term::App(f, v))
                if matches!(&**f, Term::Chan(c) if c.name == nu.chan && c.polarity == Polarity::In)
                    && **v == site.argument => {}
            _ => return Err(stale()),
        }
        rename_capturing_binders(thread, &site.app_path, &message_fv);
        let argument = thread.at(&site.app_path.child(Step::Arg)).ok_or_else(stale)?.clone();
        let mut items = vec![argument];
        items.extend(messages.iter().cloned());
        *thread.at_mut(&site.app_path).ok_or_else(stale)? = mk_tuple(items)?;
    }
    Ok(out)
}

/// Renames lambdas above `path` whose variable occurs free in the incoming messages.
fn rename_capturing_binders(thread: &mut Term, path: &Path, incoming: &BTreeSet<String>) {
    let mut prefix = Path::root();
    for &step in path.steps() {
        let renamed = match thread.at(&prefix) {
            Some(Term::Lam { var, ty, body }) if incoming.contains(var) => {
                let mut avoid = incoming.clone();
                avoid.extend(body.free_vars());
                let z = fresh_name(var, &avoid);
                Some(Term::lam(z.clone(), ty.clone(), body.subst(var, &Term::var(z, ty.clone()))))
            }
            _ => None,
        };
        if let Some(r) = renamed {
            *thread.at_mut(&prefix).expect("resolved above") = r;
        }
        prefix.push(step);
    }
}

/// Keeps the selected channel-free threads `(process, thread)` (0-based, flattened order)
/// and drops the binder.
pub fn simplify(nu: &NuTerm, selection: &[(usize, usize)]) -> Result<Term> {
    if selection.is_empty() {
        return Err(Error::Reduction("empty simplification".into()));
    }
    if selection.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Reduction("simplification must keep thread order".into()));
    }
    let mut kept = Vec::new();
    for &(p, i) in selection {
        let t = nu
            .processes
            .get(p)
            .and_then(|ts| ts.get(i))
            .ok_or_else(|| Error::Reduction(format!("no thread {} in process {}", i + 1, p + 1)))?;
        if t.mentions_chan(&nu.chan) {
            return Err(Error::Reduction(format!(
                "thread {} of process {} still uses the channel",
                i + 1,
                p + 1
            )));
        }
        kept.push(t.clone());
    }
    Ok(if kept.len() == 1 { kept.pop().expect("one") } else { Term::Par(kept) })
}

/// Channel-free threads in flattened order.
pub fn channel_free_threads(nu: &NuTerm) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (p, ts) in nu.processes.iter().enumerate() {
        for (i, t) in ts.iter().enumerate() {
            if !t.mentions_chan(&nu.chan) {
                out.push((p, i));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prims::Registry;
    use crate::syntax::{parse_program, pretty};

    fn nu_of(src: &str) -> NuTerm {
        match parse_program(src, &Registry::base()).unwrap().term {
            Term::Nu(nu) => *nu,
            _ => panic!("expected a binder"),
        }
    }

    const EM: &str = "nu a : {1: A ~ []; 2: A ~ [1]} . ";

    #[test]
    fn rightmost_is_the_inner_application() {
        let nu = nu_of(&format!("var x : A /\\ Bot -> A; var s : A; {EM} (a! (x (a! s))).0 || s"));
        let occ = rightmost_channel(&nu.processes[0][0], "a").unwrap();
        assert_eq!(occ.polarity, Polarity::Out);
        assert_eq!(pretty(occ.argument.as_ref().unwrap()), "s");
        assert!(rightmost_channel(&nu.processes[1][0], "a").is_none());
    }

    #[test]
    fn em_communication_keeps_memory() {
        let src = format!("var c : A /\\ Bot -> B; var d : A /\\ A -> B; var v : A; var w : A; {EM} c (a! v) || d (a? w)");
        let nu = nu_of(&src);
        let plan = cross_ready(&nu, 2).unwrap();
        assert_eq!(plan.senders.len(), 1);
        assert_eq!(pretty(&plan.senders[0].message), "v");
        let out = cross_reduce(&nu, &plan).unwrap();
        assert_eq!(pretty(&Term::Nu(Box::new(out))), format!("{EM}c (a? v) || d <w, v>"));
        assert!(cross_ready(&nu, 1).unwrap_err().contains("no senders"));
    }

    #[test]
    fn delivery_to_every_receiving_thread() {
        let src = format!(
            "var x : A /\\ Bot -> B; var y : A /\\ A -> B; var z : A /\\ A -> A; var s : A; var u : A; var w : A; \
             {EM} x (a! s) || y (a? u) | y (a? (z (a? w)))"
        );
        let out = cross_reduce(&nu_of(&src), &cross_ready(&nu_of(&src), 2).unwrap()).unwrap();
        assert_eq!(
            pretty(&Term::Nu(Box::new(out))),
            format!("{EM}x (a? s) || y <u, s> | y (a? (z <w, s>))")
        );
    }

    #[test]
    fn input_at_the_right_blocks_sending() {
        // x (a? s) || y (a! t): only process 2 can send, towards process 1
        let src = "var x : A /\\ A -> B; var y : A /\\ A -> B; var s : A; var t : A; \
                   nu a : {1: A ~ [2]; 2: A ~ [1]} . x (a? s) || y (a! t)";
        let nu = nu_of(src);
        assert!(cross_ready(&nu, 2).is_err());
        let plan = cross_ready(&nu, 1).unwrap();
        assert_eq!(plan.senders[0].process, 2);
        assert_eq!(pretty(&plan.senders[0].message), "t");
    }

    #[test]
    fn captured_message_is_not_sent() {
        let src = format!("var d : A /\\ A -> B; var w : A; {EM} (\\z:A. (a! z).0) w || d (a? w)");
        let reason = cross_ready(&nu_of(&src), 2).unwrap_err();
        assert!(reason.contains("bound variable z"), "{reason}");
    }

    #[test]
    fn receiver_binders_renamed_apart() {
        let src = format!("var v : A; var d : A /\\ A -> B; {EM} (a! v).0 || (\\v:A. d (a? v)) v");
        let nu = nu_of(&src);
        let out = cross_reduce(&nu, &cross_ready(&nu, 2).unwrap()).unwrap();
        assert_eq!(pretty(&out.processes[1][0]), "(\\v':A. d <v', v>) v");
    }

    #[test]
    fn simplification() {
        let nu = nu_of(&format!("var v : A; var s : A; {EM} (a! v).0 | s || v | s"));
        assert_eq!(channel_free_threads(&nu), vec![(0, 1), (1, 0), (1, 1)]);
        assert_eq!(pretty(&simplify(&nu, &[(1, 0)]).unwrap()), "v");
        assert_eq!(pretty(&simplify(&nu, &[(0, 1), (1, 1)]).unwrap()), "s || s");
        assert!(simplify(&nu, &[(0, 0)]).is_err());
        assert!(simplify(&nu, &[]).is_err());
        assert!(simplify(&nu, &[(1, 0), (0, 1)]).is_err());
    }
}
