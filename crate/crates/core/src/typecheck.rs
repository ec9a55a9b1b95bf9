//! Typing rules for simply typed terms, parallel threads and the channel binder.
//!
//! Terms carry their annotations, so checking is a single bottom-up pass.

use std::collections::BTreeMap;
use std::fmt;

use crate::formula::Formula;
use crate::term::{NuTerm, Path, Step, Term};

/// Typing context `x1 : A1, ..., xn : An`.
pub type Context = BTreeMap<String, Formula>;

/// A located typing failure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub path: Path,
    pub rule: &'static str,
    pub expected: Option<Formula>,
    pub found: Option<Formula>,
    pub message: String,
}

impl Diagnostic {
    fn new(path: &Path, rule: &'static str, message: impl Into<String>) -> Diagnostic {
        Diagnostic { path: path.clone(), rule, expected: None, found: None, message: message.into() }
    }

    fn mismatch(path: &Path, rule: &'static str, message: impl Into<String>, expected: &Formula, found: &Formula) -> Diagnostic {
        Diagnostic {
            expected: Some(expected.clone()),
            found: Some(found.clone()),
            ..Diagnostic::new(path, rule, message)
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "type error at {} ({}): {}", self.path, self.rule, self.message)?;
        if let (Some(e), Some(g)) = (&self.expected, &self.found) {
            write!(f, "; expected {e}, found {g}")?;
        }
        Ok(())
    }
}

impl std::error::Error for Diagnostic {}

pub type TypeReport = Result<Formula, Diagnostic>;

struct Checker<'a> {
    ctx: Option<&'a Context>,
    bound: Vec<(String, Formula)>,
}

impl Checker<'_> {
    fn simple(&mut self, t: &Term, path: &mut Path) -> TypeReport {
        match t {
            Term::Var { name, ty } => {
                if let Some((_, bty)) = self.bound.iter().rev().find(|(n, _)| n == name) {
                    if bty != ty {
                        return Err(Diagnostic::mismatch(path, "variable", format!("{name} is bound at another type"), bty, ty));
                    }
                    return Ok(ty.clone());
                }
                match self.ctx {
                    None => Ok(ty.clone()),
                    Some(ctx) => match ctx.get(name) {
                        None => Err(Diagnostic::new(path, "variable", format!("unbound variable {name}"))),
                        Some(cty) if cty != ty => Err(Diagnostic::mismatch(
                            path,
                            "variable",
                            format!("{name} has another type in the context"),
                            cty,
                            ty,
                        )),
                        Some(_) => Ok(ty.clone()),
                    },
                }
            }
            Term::Chan(c) => match &c.ty {
                Formula::Arrow(_, _) => Ok(c.ty.clone()),
                other => Err(Diagnostic::new(path, "channel", format!("channel {} has non-arrow type {other}", c.name))),
            },
            Term::Const { ty, .. } => Ok(ty.clone()),
            Term::Lam { var, ty, body } => {
                self.bound.push((var.clone(), ty.clone()));
                path.push(Step::Body);
                let r = self.simple(body, path);
                path.pop();
                self.bound.pop();
                Ok(Formula::arrow(ty.clone(), r?))
            }
            Term::App(fun, arg) => {
                path.push(Step::Fun);
                let fty = self.simple(fun, path);
                path.pop();
                let fty = fty?;
                path.push(Step::Arg);
                let aty = self.simple(arg, path);
                path.pop();
                let aty = aty?;
                match fty.as_arrow() {
                    Some((dom, cod)) if *dom == aty => Ok(cod.clone()),
                    Some((dom, _)) => Err(Diagnostic::mismatch(path, "application", "argument type differs from the domain", dom, &aty)),
                    None => Err(Diagnostic::new(path, "application", format!("applying a term of non-arrow type {fty}"))),
                }
            }
            Term::Pair(l, r) => {
                path.push(Step::Left);
                let lt = self.simple(l, path);
                path.pop();
                path.push(Step::Right);
                let rt = self.simple(r, path);
                path.pop();
                Ok(Formula::conj(lt?, rt?))
            }
            Term::Proj(side, of) => {
                path.push(Step::Of);
                let ty = self.simple(of, path);
                path.pop();
                let ty = ty?;
                match ty.as_conj() {
                    Some((l, r)) => Ok(if side.index() == 0 { l.clone() } else { r.clone() }),
                    None => Err(Diagnostic::new(path, "projection", format!("projecting from non-conjunction {ty}"))),
                }
            }
            Term::Efq { target, body } => {
                if !target.is_atomic() {
                    return Err(Diagnostic::new(path, "efq", format!("efq target {target} must be an atom other than Bot")));
                }
                path.push(Step::Of);
                let ty = self.simple(body, path);
                path.pop();
                let ty = ty?;
                if ty != Formula::Bottom {
                    return Err(Diagnostic::mismatch(path, "efq", "efq needs a proof of Bot", &Formula::Bottom, &ty));
                }
                Ok(target.clone())
            }
            Term::Par(_) | Term::Nu(_) => Err(Diagnostic::new(
                path,
                "1-depth",
                "parallel composition or channel binder nested inside a thread",
            )),
        }
    }
}

/// Type of a simply typed term (channel occurrences allowed) under `ctx`.
pub fn infer_simply_typed(ctx: &Context, t: &Term) -> TypeReport {
    Checker { ctx: Some(ctx), bound: Vec::new() }.simple(t, &mut Path::root())
}

/// Type of a term read off its annotations alone; parallel terms go through the program rules.
pub fn synthesize(t: &Term) -> TypeReport {
    match t {
        Term::Par(_) | Term::Nu(_) => check_program_in(&t.free_var_types(), t),
        _ => Checker { ctx: None, bound: Vec::new() }.simple(t, &mut Path::root()),
    }
}

/// Checks a whole program, taking the context from its free-variable annotations.
pub fn check_program(p: &Term) -> TypeReport {
    check_program_in(&p.free_var_types(), p)
}

/// Checks a program: a simply typed term, threads in parallel, or a single root channel binder.
pub fn check_program_in(ctx: &Context, p: &Term) -> TypeReport {
    let mut ck = Checker { ctx: Some(ctx), bound: Vec::new() };
    match p {
        Term::Par(threads) => {
            if threads.is_empty() {
                return Err(Diagnostic::new(&Path::root(), "contr", "empty parallel composition"));
            }
            let mut ty: Option<Formula> = None;
            for (i, t) in threads.iter().enumerate() {
                let mut path = Path::root().child(Step::Thread(i));
                no_free_channels(t, &path)?;
                let tt = ck.simple(t, &mut path)?;
                match &ty {
                    None => ty = Some(tt),
                    Some(b) if *b != tt => {
                        return Err(Diagnostic::mismatch(&path, "contr", "threads have different types", b, &tt))
                    }
                    Some(_) => {}
                }
            }
            Ok(ty.expect("nonempty"))
        }
        Term::Nu(nu) => check_nu(&mut ck, nu),
        _ => {
            no_free_channels(p, &Path::root())?;
            ck.simple(p, &mut Path::root())
        }
    }
}

fn no_free_channels(t: &Term, at: &Path) -> Result<(), Diagnostic> {
    let mut bad = None;
    t.walk(&mut |p, n| {
        if let Term::Chan(c) = n {
            if bad.is_none() {
                bad = Some(Diagnostic::new(&at.join(p), "channel", format!("channel {} is not bound by a binder", c.name)));
            }
        }
    });
    bad.map_or(Ok(()), Err)
}

fn check_nu(ck: &mut Checker<'_>, nu: &NuTerm) -> TypeReport {
    let root = Path::root();
    let m = nu.instance.len();
    if nu.processes.len() != m {
        return Err(Diagnostic::new(
            &root,
            "axiom",
            format!("{} processes but the axiom has {m} disjuncts", nu.processes.len()),
        ));
    }
    let mut ty: Option<Formula> = None;
    for (pi, threads) in nu.processes.iter().enumerate() {
        let index = pi + 1;
        if threads.is_empty() {
            return Err(Diagnostic::new(&root, "axiom", format!("process {index} has no threads")));
        }
        let chan_ty = nu.instance.channel_type(index).expect("index in range");
        for (ti, t) in threads.iter().enumerate() {
            let at = root.child(Step::Proc(pi, ti));
            let mut bad = None;
            t.walk(&mut |p, n| {
                if bad.is_some() {
                    return;
                }
                if matches!(n, Term::Par(_) | Term::Nu(_)) {
                    bad = Some(Diagnostic::new(
                        &at.join(p),
                        "1-depth",
                        "parallel composition or channel binder nested inside a thread",
                    ));
                }
                if let Term::Chan(c) = n {
                    let here = at.join(p);
                    if c.name != nu.chan {
                        bad = Some(Diagnostic::new(&here, "channel", format!("channel {} is not bound by a binder", c.name)));
                    } else if c.index != index {
                        bad = Some(Diagnostic::new(
                            &here,
                            "axiom",
                            format!("occurrence in process {index} is annotated with disjunct {}", c.index),
                        ));
                    } else if c.ty != chan_ty {
                        bad = Some(Diagnostic::mismatch(&here, "axiom", format!("channel type in process {index}"), &chan_ty, &c.ty));
                    }
                }
            });
            if let Some(d) = bad {
                return Err(d);
            }
            let mut path = at.clone();
            let tt = ck.simple(t, &mut path)?;
            match &ty {
                None => ty = Some(tt),
                Some(b) if *b != tt => return Err(Diagnostic::mismatch(&at, "axiom", "threads have different types", b, &tt)),
                Some(_) => {}
            }
        }
    }
    Ok(ty.expect("m >= 1"))
}

/// Subject-reduction check for one step: same type, and no new free variables.
pub fn check_step_preserves_type(before: &Term, after: &Term, ctx: &Context) -> bool {
    let (Ok(b), Ok(a)) = (check_program_in(ctx, before), check_program_in(ctx, after)) else {
        return false;
    };
    a == b && after.free_vars().is_subset(&before.free_vars())
}
