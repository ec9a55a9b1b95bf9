use std::fmt;

use super::Term;
use crate::error::{Error, Result};

/// One child selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Step {
    Fun,
    Arg,
    Body,
    Left,
    Right,
    /// Operand of a projection or of `efq`.
    Of,
    /// Thread of a parallel composition.
    Thread(usize),
    /// Thread `.1` of process `.0` under a channel binder (both 0-based).
    Proc(usize, usize),
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::Fun => f.write_str("fun"),
            Step::Arg => f.write_str("arg"),
            Step::Body => f.write_str("body"),
            Step::Left => f.write_str("left"),
            Step::Right => f.write_str("right"),
            Step::Of => f.write_str("of"),
            Step::Thread(i) => write!(f, "t{}", i + 1),
            Step::Proc(p, i) => write!(f, "p{}t{}", p + 1, i + 1),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path(Vec<Step>);

impl Path {
    pub fn root() -> Path {
        Path(Vec::new())
    }

    pub fn steps(&self) -> &[Step] {
        &self.0
    }

    pub fn push(&mut self, step: Step) {
        self.0.push(step);
    }

    pub fn pop(&mut self) -> Option<Step> {
        self.0.pop()
    }

    pub fn child(&self, step: Step) -> Path {
        let mut p = self.clone();
        p.push(step);
        p
    }

    pub fn join(&self, rest: &Path) -> Path {
        let mut p = self.clone();
        p.0.extend_from_slice(&rest.0);
        p
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn starts_with(&self, prefix: &Path) -> bool {
        self.0.starts_with(&prefix.0)
    }

    pub fn parent(&self) -> Option<Path> {
        let (_, rest) = self.0.split_last()?;
        Some(Path(rest.to_vec()))
    }
}

impl From<Vec<Step>> for Path {
    fn from(steps: Vec<Step>) -> Self {
        Path(steps)
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        let parts: Vec<String> = self.0.iter().map(Step::to_string).collect();
        f.write_str(&parts.join("/"))
    }
}

fn child(t: &Term, step: Step) -> Option<&Term> {
    match (t, step) {
        (Term::Lam { body, .. }, Step::Body) => Some(body),
        (Term::App(f, _), Step::Fun) => Some(f),
        (Term::App(_, a), Step::Arg) => Some(a),
        (Term::Pair(l, _), Step::Left) => Some(l),
        (Term::Pair(_, r), Step::Right) => Some(r),
        (Term::Proj(_, t), Step::Of) | (Term::Efq { body: t, .. }, Step::Of) => Some(t),
        (Term::Par(ts), Step::Thread(i)) => ts.get(i),
        (Term::Nu(nu), Step::Proc(p, i)) => nu.processes.get(p)?.get(i),
        _ => None,
    }
}

fn child_mut(t: &mut Term, step: Step) -> Option<&mut Term> {
    match (t, step) {
        (Term::Lam { body, .. }, Step::Body) => Some(body),
        (Term::App(f, _), Step::Fun) => Some(f),
        (Term::App(_, a), Step::Arg) => Some(a),
        (Term::Pair(l, _), Step::Left) => Some(l),
        (Term::Pair(_, r), Step::Right) => Some(r),
        (Term::Proj(_, t), Step::Of) | (Term::Efq { body: t, .. }, Step::Of) => Some(t),
        (Term::Par(ts), Step::Thread(i)) => ts.get_mut(i),
        (Term::Nu(nu), Step::Proc(p, i)) => nu.processes.get_mut(p)?.get_mut(i),
        _ => None,
    }
}

impl Term {
    /// Subterm at `path`, if the path resolves.
    pub fn at(&self, path: &Path) -> Option<&Term> {
        path.0.iter().try_fold(self, |t, &s| child(t, s))
    }

    pub fn at_mut(&mut self, path: &Path) -> Option<&mut Term> {
        path.0.iter().try_fold(self, |t, &s| child_mut(t, s))
    }

    /// Copy of `self` with the subterm at `path` replaced.
    pub fn replace_at(&self, path: &Path, new: Term) -> Result<Term> {
        let mut out = self.clone();
        let slot = out
            .at_mut(path)
            .ok_or_else(|| Error::Term(format!("path {path} does not resolve")))?;
        *slot = new;
        Ok(out)
    }

    /// Names bound by lambdas strictly above `path`, outermost first.
    pub fn binders_above(&self, path: &Path) -> Vec<&str> {
        let mut out = Vec::new();
        let mut cur = self;
        for &s in &path.0 {
            if let Term::Lam { var, .. } = cur {
                out.push(var.as_str());
            }
            match child(cur, s) {
                Some(next) => cur = next,
                None => break,
            }
        }
        out
    }
}
