use super::RedexKind;
use crate::error::Result;
use crate::prims::Registry;
use crate::term::{Path, Term};

/// Contracts `t` itself if it is a beta, projection or delta redex.
pub fn contract_here(t: &Term, reg: &Registry) -> Result<Option<(Term, RedexKind)>> {
    match t {
        Term::App(f, arg) => {
            if let Term::Lam { var, body, .. } = &**f {
                return Ok(Some((body.subst(var, arg), RedexKind::Beta)));
            }
            Ok(reg.contract(t)?.map(|u| (u, RedexKind::Delta)))
        }
        Term::Proj(side, of) => match &**of {
            Term::Pair(l, r) => Ok(Some(((if side.index() == 0 { l } else { r }).as_ref().clone(), RedexKind::Proj))),
            _ => Ok(None),
        },
        _ => Ok(None),
    }
}

/// Leftmost-outermost redex of `t`: its path, contractum and kind.
pub fn leftmost_redex(t: &Term, reg: &Registry) -> Result<Option<(Path, Term, RedexKind)>> {
    let mut path = Path::root();
    find(t, reg, &mut path)
}

fn find(t: &Term, reg: &Registry, path: &mut Path) -> Result<Option<(Path, Term, RedexKind)>> {
    if let Some((u, kind)) = contract_here(t, reg)? {
        return Ok(Some((path.clone(), u, kind)));
    }
    for (step, child) in t.children() {
        path.push(step);
        let r = find(child, reg, path)?;
        path.pop();
        if r.is_some() {
            return Ok(r);
        }
    }
    Ok(None)
}

/// Every redex of `t`, in preorder.
pub fn all_redexes(t: &Term, reg: &Registry) -> Result<Vec<(Path, Term, RedexKind)>> {
    let mut out = Vec::new();
    let mut err = None;
    t.walk(&mut |p, n| {
        if err.is_some() {
            return;
        }
        match contract_here(n, reg) {
            Ok(Some((u, kind))) => out.push((p.clone(), u, kind)),
            Ok(None) => {}
            Err(e) => err = Some(e),
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Whether `t` has no beta, projection or delta redex.
pub fn is_intuitionistic_normal(t: &Term, reg: &Registry) -> Result<bool> {
    Ok(leftmost_redex(t, reg)?.is_none())
}

/// One leftmost-outermost intuitionistic step on a term, if any.
pub fn intuitionistic_step(t: &Term, reg: &Registry) -> Result<Option<(Term, Path, RedexKind)>> {
    let Some((path, u, kind)) = leftmost_redex(t, reg)? else {
        return Ok(None);
    };
    Ok(Some((t.replace_at(&path, u)?, path, kind)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_program, pretty};

    fn reg() -> Registry {
        Registry::profile("bool", None).unwrap()
    }

    fn nf(src: &str) -> String {
        let mut t = parse_program(src, &reg()).unwrap().term;
        while let Some((u, _, _)) = intuitionistic_step(&t, &reg()).unwrap() {
            t = u;
        }
        pretty(&t)
    }

    #[test]
    fn beta_and_projection() {
        assert_eq!(nf("var v : A; (\\x:A. x) v"), "v");
        assert_eq!(nf("var u : A; var w : B; <u, w>.1"), "w");
        assert_eq!(nf("if ff then 1 else 2"), "2");
    }

    #[test]
    fn reordering_example() {
        // (\x. y x (a n)) (a m) reduces to y (a m) (a n)
        let src = "var y : A -> A -> B; var a : N -> A; var n : N; var m : N; (\\x:A. y x (a n)) (a m)";
        assert_eq!(nf(src), "y (a m) (a n)");
    }

    #[test]
    fn leftmost_outermost_order() {
        let t = parse_program("var v : A; (\\x:A. x) ((\\y:A. y) v)", &reg()).unwrap().term;
        let (u, path, kind) = intuitionistic_step(&t, &reg()).unwrap().unwrap();
        assert!(path.is_root());
        assert_eq!(kind, RedexKind::Beta);
        assert_eq!(pretty(&u), "(\\y:A. y) v");
        assert_eq!(all_redexes(&t, &reg()).unwrap().len(), 2);
    }
}
