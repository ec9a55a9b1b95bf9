//! Abstract syntax of programs: simply typed terms with channel occurrences,
//! parallel threads, and the channel binder.

mod path;
mod subst;
mod tuple;

use std::collections::{BTreeMap, BTreeSet};


use crate::formula::{AxiomInstance, Formula};
use crate::prims::Literal;

pub use path::{Path, Step};
pub use subst::{fresh_name, substitute, HoleContext};
pub use tuple::{mk_tuple, select_term, tuple_component, tuple_select};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    /// Output occurrence: transmits its argument.
    Out,
    /// Input occurrence: is replaced by the batch of messages it receives.
    In,
}

impl Polarity {
    pub fn sigil(self) -> char {
        match self {
            Polarity::Out => '!',
            Polarity::In => '?',
        }
    }
}

/// One occurrence of a channel, annotated with its polarity, the disjunct of the
/// enclosing process, and the channel type `Ai -> Ai /\ Bi` of that disjunct.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Channel {
    pub name: String,
    pub polarity: Polarity,
    pub index: usize,
    pub ty: Formula,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn index(self) -> usize {
        match self {
            Side::Left => 0,
            Side::Right => 1,
        }
    }

    pub fn from_index(i: usize) -> Option<Side> {
        match i {
            0 => Some(Side::Left),
            1 => Some(Side::Right),
            _ => None,
        }
    }
}

/// Head of a constant: a literal value or a named operation from the primitive registry.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Prim {
    Lit(Literal),
    Op(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NuTerm {
    pub chan: String,
    pub instance: AxiomInstance,
    /// Processes in order; each process is a nonempty list of threads.
    pub processes: Vec<Vec<Term>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var { name: String, ty: Formula },
    Chan(Channel),
    Lam { var: String, ty: Formula, body: Box<Term> },
    App(Box<Term>, Box<Term>),
    Pair(Box<Term>, Box<Term>),
    Proj(Side, Box<Term>),
    /// Falsity elimination into an atomic type other than `Bot`.
    Efq { target: Formula, body: Box<Term> },
    Const { prim: Prim, ty: Formula },
    /// Parallel composition of simply typed threads.
    Par(Vec<Term>),
    Nu(Box<NuTerm>),
}

impl Term {
    pub fn var(name: impl Into<String>, ty: Formula) -> Term {
        Term::Var { name: name.into(), ty }
    }

    pub fn lam(var: impl Into<String>, ty: Formula, body: Term) -> Term {
        Term::Lam { var: var.into(), ty, body: Box::new(body) }
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        Term::App(Box::new(fun), Box::new(arg))
    }

    /// Left-nested application `f a1 a2 ...`.
    pub fn apps(fun: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(fun, Term::app)
    }

    pub fn pair(left: Term, right: Term) -> Term {
        Term::Pair(Box::new(left), Box::new(right))
    }

    pub fn proj(side: Side, of: Term) -> Term {
        Term::Proj(side, Box::new(of))
    }

    pub fn fst(of: Term) -> Term {
        Term::proj(Side::Left, of)
    }

    pub fn snd(of: Term) -> Term {
        Term::proj(Side::Right, of)
    }

    pub fn efq(target: Formula, body: Term) -> Term {
        Term::Efq { target, body: Box::new(body) }
    }

    pub fn chan(name: impl Into<String>, polarity: Polarity, index: usize, ty: Formula) -> Term {
        Term::Chan(Channel { name: name.into(), polarity, index, ty })
    }

    pub fn lit(lit: Literal) -> Term {
        let ty = lit.formula();
        Term::Const { prim: Prim::Lit(lit), ty }
    }

    pub fn op(name: impl Into<String>, ty: Formula) -> Term {
        Term::Const { prim: Prim::Op(name.into()), ty }
    }

    pub fn nu(chan: impl Into<String>, instance: AxiomInstance, processes: Vec<Vec<Term>>) -> Term {
        Term::Nu(Box::new(NuTerm { chan: chan.into(), instance, processes }))
    }

    pub fn is_parallel(&self) -> bool {
        matches!(self, Term::Par(_) | Term::Nu(_))
    }

    /// Number of syntax nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Var { .. } | Term::Chan(_) | Term::Const { .. } => 1,
            Term::Lam { body, .. } | Term::Proj(_, body) | Term::Efq { body, .. } => 1 + body.size(),
            Term::App(l, r) | Term::Pair(l, r) => 1 + l.size() + r.size(),
            Term::Par(ts) => 1 + ts.iter().map(Term::size).sum::<usize>(),
            Term::Nu(nu) => 1 + nu.processes.iter().flatten().map(Term::size).sum::<usize>(),
        }
    }

    /// Immediate subterms paired with the step that reaches them.
    pub fn children(&self) -> Vec<(Step, &Term)> {
        match self {
            Term::Var { .. } | Term::Chan(_) | Term::Const { .. } => vec![],
            Term::Lam { body, .. } => vec![(Step::Body, body)],
            Term::App(f, a) => vec![(Step::Fun, f), (Step::Arg, a)],
            Term::Pair(l, r) => vec![(Step::Left, l), (Step::Right, r)],
            Term::Proj(_, t) | Term::Efq { body: t, .. } => vec![(Step::Of, t)],
            Term::Par(ts) => ts.iter().enumerate().map(|(i, t)| (Step::Thread(i), t)).collect(),
            Term::Nu(nu) => nu
                .processes
                .iter()
                .enumerate()
                .flat_map(|(p, threads)| threads.iter().enumerate().map(move |(i, t)| (Step::Proc(p, i), t)))
                .collect(),
        }
    }

    /// Preorder traversal; for channel nodes this is their left-to-right textual order.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&Path, &'a Term)) {
        let mut path = Path::root();
        self.walk_inner(&mut path, f);
    }

    fn walk_inner<'a>(&'a self, path: &mut Path, f: &mut impl FnMut(&Path, &'a Term)) {
        f(path, self);
        for (step, child) in self.children() {
            path.push(step);
            child.walk_inner(path, f);
            path.pop();
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free_vars(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free_vars(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Term::Var { name, .. } => {
                if !bound.contains(name) {
                    out.insert(name.clone());
                }
            }
            Term::Lam { var, body, .. } => {
                bound.push(var.clone());
                body.collect_free_vars(bound, out);
                bound.pop();
            }
            _ => {
                for (_, c) in self.children() {
                    c.collect_free_vars(bound, out);
                }
            }
        }
    }

    /// Free variables with their annotated types; the first annotation wins.
    pub fn free_var_types(&self) -> BTreeMap<String, Formula> {
        let mut out = BTreeMap::new();
        self.collect_free_var_types(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free_var_types(&self, bound: &mut Vec<String>, out: &mut BTreeMap<String, Formula>) {
        match self {
            Term::Var { name, ty } => {
                if !bound.contains(name) {
                    out.entry(name.clone()).or_insert_with(|| ty.clone());
                }
            }
            Term::Lam { var, body, .. } => {
                bound.push(var.clone());
                body.collect_free_var_types(bound, out);
                bound.pop();
            }
            _ => {
                for (_, c) in self.children() {
                    c.collect_free_var_types(bound, out);
                }
            }
        }
    }

    pub fn occurs_free(&self, x: &str) -> bool {
        match self {
            Term::Var { name, .. } => name == x,
            Term::Lam { var, body, .. } => var != x && body.occurs_free(x),
            _ => self.children().into_iter().any(|(_, c)| c.occurs_free(x)),
        }
    }

    /// Free channel occurrences as `(name, polarity, disjunct index)`; a channel binder
    /// binds both polarities of its name.
    pub fn free_chans(&self) -> BTreeSet<(String, Polarity, usize)> {
        let mut out = BTreeSet::new();
        self.collect_free_chans(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free_chans(&self, bound: &mut Vec<String>, out: &mut BTreeSet<(String, Polarity, usize)>) {
        match self {
            Term::Chan(c) => {
                if !bound.contains(&c.name) {
                    out.insert((c.name.clone(), c.polarity, c.index));
                }
            }
            Term::Nu(nu) => {
                bound.push(nu.chan.clone());
                for t in nu.processes.iter().flatten() {
                    t.collect_free_chans(bound, out);
                }
                bound.pop();
            }
            _ => {
                for (_, c) in self.children() {
                    c.collect_free_chans(bound, out);
                }
            }
        }
    }

    /// Whether any occurrence of channel `name` (either polarity) appears.
    pub fn mentions_chan(&self, name: &str) -> bool {
        match self {
            Term::Chan(c) => c.name == name,
            Term::Nu(nu) if nu.chan == name => false,
            _ => self.children().into_iter().any(|(_, c)| c.mentions_chan(name)),
        }
    }

    pub fn has_channels(&self) -> bool {
        match self {
            Term::Chan(_) => true,
            _ => self.children().into_iter().any(|(_, c)| c.has_channels()),
        }
    }

    /// Alpha-equivalence: lambda-bound variables and channel binders compared up to renaming.
    pub fn alpha_eq(&self, other: &Term) -> bool {
        alpha(self, other, &mut Vec::new(), &mut Vec::new())
    }
}

fn lookup_depth(env: &[(String, String)], name: &str, left: bool) -> Option<usize> {
    env.iter()
        .rev()
        .position(|(l, r)| if left { l == name } else { r == name })
}

fn alpha(a: &Term, b: &Term, vars: &mut Vec<(String, String)>, chans: &mut Vec<(String, String)>) -> bool {
    match (a, b) {
        (Term::Var { name: x, ty: tx }, Term::Var { name: y, ty: ty_ }) => {
            tx == ty_
                && match (lookup_depth(vars, x, true), lookup_depth(vars, y, false)) {
                    (Some(i), Some(j)) => i == j,
                    (None, None) => x == y,
                    _ => false,
                }
        }
        (Term::Chan(c), Term::Chan(d)) => {
            c.polarity == d.polarity
                && c.index == d.index
                && c.ty == d.ty
                && match (lookup_depth(chans, &c.name, true), lookup_depth(chans, &d.name, false)) {
                    (Some(i), Some(j)) => i == j,
                    (None, None) => c.name == d.name,
                    _ => false,
                }
        }
        (Term::Lam { var: x, ty: tx, body: bx }, Term::Lam { var: y, ty: ty_, body: by }) => {
            if tx != ty_ {
                return false;
            }
            vars.push((x.clone(), y.clone()));
            let r = alpha(bx, by, vars, chans);
            vars.pop();
            r
        }
        (Term::App(f, x), Term::App(g, y)) | (Term::Pair(f, x), Term::Pair(g, y)) => {
            alpha(f, g, vars, chans) && alpha(x, y, vars, chans)
        }
        (Term::Proj(s, x), Term::Proj(t, y)) => s == t && alpha(x, y, vars, chans),
        (Term::Efq { target: p, body: x }, Term::Efq { target: q, body: y }) => p == q && alpha(x, y, vars, chans),
        (Term::Const { prim: p, ty: s }, Term::Const { prim: q, ty: t }) => p == q && s == t,
        (Term::Par(xs), Term::Par(ys)) => {
            xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| alpha(x, y, vars, chans))
        }
        (Term::Nu(m), Term::Nu(n)) => {
            if m.instance != n.instance || m.processes.len() != n.processes.len() {
                return false;
            }
            chans.push((m.chan.clone(), n.chan.clone()));
            let r = m.processes.iter().zip(&n.processes).all(|(p, q)| {
                p.len() == q.len() && p.iter().zip(q).all(|(x, y)| alpha(x, y, vars, chans))
            });
            chans.pop();
            r
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> Formula {
        Formula::atom("A")
    }

    #[test]
    fn free_vars_respect_lambda() {
        // \x. x y
        let t = Term::lam("x", Formula::arrow(a(), a()), Term::app(Term::var("x", Formula::arrow(a(), a())), Term::var("y", a())));
        assert_eq!(t.free_vars(), BTreeSet::from(["y".to_string()]));
    }

    #[test]
    fn nu_binds_both_polarities() {
        let inst = AxiomInstance::uniform(crate::formula::AxiomSchema::em(), a());
        let ty1 = inst.channel_type(1).unwrap();
        let ty2 = inst.channel_type(2).unwrap();
        let send = Term::app(Term::chan("a", Polarity::Out, 1, ty1), Term::var("v", a()));
        let recv = Term::app(Term::chan("a", Polarity::In, 2, ty2), Term::var("w", a()));
        assert_eq!(
            send.free_chans(),
            BTreeSet::from([("a".to_string(), Polarity::Out, 1)])
        );
        let nu = Term::nu("a", inst, vec![vec![send], vec![recv]]);
        assert!(nu.free_chans().is_empty());
    }

    #[test]
    fn alpha_equivalence_renames_binders() {
        let t = Term::lam("x", a(), Term::var("x", a()));
        let u = Term::lam("y", a(), Term::var("y", a()));
        let v = Term::lam("y", a(), Term::var("x", a()));
        assert!(t.alpha_eq(&u));
        assert!(!t.alpha_eq(&v));
    }

    #[test]
    fn preorder_lists_channels_left_to_right() {
        let ty = Formula::arrow(a(), Formula::conj(a(), a()));
        // a!(x (a! s))
        let inner = Term::app(Term::chan("a", Polarity::Out, 1, ty.clone()), Term::var("s", a()));
        let t = Term::app(
            Term::chan("a", Polarity::Out, 1, ty),
            Term::app(Term::var("x", Formula::arrow(Formula::conj(a(), a()), a())), inner),
        );
        let mut seen = vec![];
        t.walk(&mut |p, n| {
            if let Term::Chan(_) = n {
                seen.push(p.clone());
            }
        });
        assert_eq!(seen.len(), 2);
        assert_eq!(seen[0], Path::from(vec![Step::Fun]));
        assert_eq!(seen[1], Path::from(vec![Step::Arg, Step::Arg, Step::Fun]));
    }
}
