use std::collections::BTreeSet;

use super::{Path, Term};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::typecheck::synthesize;

/// `base` primed until it avoids every name in `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let mut name = format!("{base}'");
    while avoid.contains(&name) {
        name.push('\'');
    }
    name
}

/// Capture-avoiding `t[v/x]`. Every free occurrence of `x` in `t` must carry the type of `v`.
pub fn substitute(t: &Term, x: &str, v: &Term) -> Result<Term> {
    let v_ty = synthesize(v)?;
    if let Some(ty) = t.free_var_types().get(x) {
        if *ty != v_ty {
            return Err(Error::Term(format!("cannot substitute a term of type {v_ty} for {x} : {ty}")));
        }
    }
    Ok(t.subst(x, v))
}

impl Term {
    /// Capture-avoiding substitution without the type check.
    pub fn subst(&self, x: &str, v: &Term) -> Term {
        if !self.occurs_free(x) {
            return self.clone();
        }
        let fv = v.free_vars();
        self.subst_inner(x, v, &fv)
    }

    fn subst_inner(&self, x: &str, v: &Term, fv: &BTreeSet<String>) -> Term {
        match self {
            Term::Var { name, .. } => {
                if name == x {
                    v.clone()
                } else {
                    self.clone()
                }
            }
            Term::Chan(_) | Term::Const { .. } => self.clone(),
            Term::Lam { var, ty, body } => {
                if var == x || !body.occurs_free(x) {
                    return self.clone();
                }
                if fv.contains(var) {
                    let mut avoid = fv.clone();
                    avoid.extend(body.free_vars());
                    avoid.insert(x.to_string());
                    let z = fresh_name(var, &avoid);
                    let renamed = body.subst(var, &Term::var(z.clone(), ty.clone()));
                    Term::lam(z, ty.clone(), renamed.subst_inner(x, v, fv))
                } else {
                    Term::lam(var.clone(), ty.clone(), body.subst_inner(x, v, fv))
                }
            }
            Term::App(f, a) => Term::app(f.subst_inner(x, v, fv), a.subst_inner(x, v, fv)),
            Term::Pair(l, r) => Term::pair(l.subst_inner(x, v, fv), r.subst_inner(x, v, fv)),
            Term::Proj(s, t) => Term::proj(*s, t.subst_inner(x, v, fv)),
            Term::Efq { target, body } => Term::efq(target.clone(), body.subst_inner(x, v, fv)),
            Term::Par(ts) => Term::Par(ts.iter().map(|t| t.subst_inner(x, v, fv)).collect()),
            Term::Nu(nu) => {
                let mut nu = nu.clone();
                for t in nu.processes.iter_mut().flatten() {
                    *t = t.subst_inner(x, v, fv);
                }
                Term::Nu(nu)
            }
        }
    }
}

const HOLE: &str = "[]";

/// A term with a single hole of a fixed type. Filling does not rename bound variables,
/// so variables free in the filler may be captured.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HoleContext {
    skeleton: Term,
    hole: Path,
    hole_ty: Formula,
}

impl HoleContext {
    /// The empty context `[ ]` of type `ty`.
    pub fn empty(ty: Formula) -> HoleContext {
        HoleContext { skeleton: Term::var(HOLE, ty.clone()), hole: Path::root(), hole_ty: ty }
    }

    /// Splits `term` at `path` into a context and the subterm that was there.
    pub fn around(term: &Term, path: &Path) -> Result<(HoleContext, Term)> {
        let inner = term
            .at(path)
            .ok_or_else(|| Error::Term(format!("path {path} does not resolve")))?
            .clone();
        let hole_ty = synthesize(&inner)?;
        let skeleton = term.replace_at(path, Term::var(HOLE, hole_ty.clone()))?;
        Ok((HoleContext { skeleton, hole: path.clone(), hole_ty }, inner))
    }

    pub fn hole_type(&self) -> &Formula {
        &self.hole_ty
    }

    pub fn hole_path(&self) -> &Path {
        &self.hole
    }

    pub fn fill(&self, u: &Term) -> Result<Term> {
        let ty = synthesize(u)?;
        if ty != self.hole_ty {
            return Err(Error::Term(format!("hole expects {} but filler has type {ty}", self.hole_ty)));
        }
        self.skeleton.replace_at(&self.hole, u.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{Polarity, Step};

    fn a() -> Formula {
        Formula::atom("A")
    }

    #[test]
    fn substitution_under_unrelated_binder() {
        let t = Term::lam("y", a(), Term::var("x", a()));
        let v = Term::var("v", a());
        assert_eq!(substitute(&t, "x", &v).unwrap(), Term::lam("y", a(), v));
    }

    #[test]
    fn shadowed_variable_untouched() {
        let t = Term::lam("x", a(), Term::var("x", a()));
        assert_eq!(substitute(&t, "x", &Term::var("v", a())).unwrap(), t);
    }

    #[test]
    fn binder_renamed_to_avoid_capture() {
        // (\y. <x, y>)[y/x] = \y'. <y, y'>
        let t = Term::lam("y", a(), Term::pair(Term::var("x", a()), Term::var("y", a())));
        let out = substitute(&t, "x", &Term::var("y", a())).unwrap();
        let expected = Term::lam("y'", a(), Term::pair(Term::var("y", a()), Term::var("y'", a())));
        assert_eq!(out, expected);
    }

    #[test]
    fn type_mismatch_rejected() {
        let t = Term::var("x", a());
        assert!(substitute(&t, "x", &Term::var("v", Formula::atom("B"))).is_err());
    }

    #[test]
    fn fill_captures() {
        let (ctx, _) = HoleContext::around(&Term::lam("x", a(), Term::var("z", a())), &Path::from(vec![Step::Body])).unwrap();
        let out = ctx.fill(&Term::var("x", a())).unwrap();
        assert_eq!(out, Term::lam("x", a(), Term::var("x", a())));
    }

    #[test]
    fn fill_empty_context() {
        let t = Term::var("t", a());
        assert_eq!(HoleContext::empty(a()).fill(&t).unwrap(), t);
        assert!(HoleContext::empty(Formula::atom("B")).fill(&t).is_err());
    }

    #[test]
    fn fill_under_input_channel() {
        // f (a? [ ])
        let ch = Formula::arrow(a(), Formula::conj(a(), a()));
        let f = Term::var("f", Formula::arrow(Formula::conj(a(), a()), a()));
        let d = Term::app(f.clone(), Term::app(Term::chan("a", Polarity::In, 1, ch.clone()), Term::var("r", a())));
        let (ctx, _) = HoleContext::around(&d, &Path::from(vec![Step::Arg, Step::Arg])).unwrap();
        let w = Term::var("w", a());
        let expected = Term::app(f, Term::app(Term::chan("a", Polarity::In, 1, ch), w.clone()));
        assert_eq!(ctx.fill(&w).unwrap(), expected);
    }
}
