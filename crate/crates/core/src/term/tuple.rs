use super::{Side, Term};
use crate::error::{Error, Result};

/// Right-nested tuple `<t1, <t2, ... <tn-1, tn>>>`; a singleton is the item itself.
pub fn mk_tuple(items: Vec<Term>) -> Result<Term> {
    let mut items = items;
    let mut acc = items.pop().ok_or_else(|| Error::Term("empty tuple".into()))?;
    while let Some(item) = items.pop() {
        acc = Term::pair(item, acc);
    }
    Ok(acc)
}

/// Component `i` (0-based) of a right-nested tuple, read off the pair structure.
///
/// The arity is taken to be as large as the nesting allows, so a last component that is
/// itself a pair is split further; use [`tuple_component`] when the arity is known.
pub fn tuple_select(tuple: &Term, i: usize) -> Result<Term> {
    let mut cur = tuple;
    for _ in 0..i {
        match cur {
            Term::Pair(_, r) => cur = r,
            _ => return Err(Error::Term(format!("tuple has no component {i}"))),
        }
    }
    match cur {
        Term::Pair(l, _) => Ok((**l).clone()),
        _ => Ok(cur.clone()),
    }
}

/// Component `i` of a tuple of known arity `n`.
pub fn tuple_component(tuple: &Term, i: usize, n: usize) -> Result<Term> {
    if i >= n {
        return Err(Error::Term(format!("index {i} out of range for a {n}-tuple")));
    }
    let mut cur = tuple;
    for _ in 0..i {
        match cur {
            Term::Pair(_, r) => cur = r,
            _ => return Err(Error::Term(format!("term is not a {n}-tuple"))),
        }
    }
    if i + 1 == n {
        return Ok(cur.clone());
    }
    match cur {
        Term::Pair(l, _) => Ok((**l).clone()),
        _ => Err(Error::Term(format!("term is not a {n}-tuple"))),
    }
}

/// The projection chain selecting component `i` of an `n`-tuple, as a term over `of`.
pub fn select_term(of: Term, i: usize, n: usize) -> Result<Term> {
    if i >= n {
        return Err(Error::Term(format!("index {i} out of range for a {n}-tuple")));
    }
    let mut t = of;
    for _ in 0..i {
        t = Term::proj(Side::Right, t);
    }
    if i + 1 < n {
        t = Term::proj(Side::Left, t);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Formula;

    fn v(n: &str) -> Term {
        Term::var(n, Formula::atom("A"))
    }

    #[test]
    fn singleton_and_triple() {
        assert_eq!(mk_tuple(vec![v("t")]).unwrap(), v("t"));
        assert_eq!(
            mk_tuple(vec![v("a"), v("b"), v("c")]).unwrap(),
            Term::pair(v("a"), Term::pair(v("b"), v("c")))
        );
        assert!(mk_tuple(vec![]).is_err());
    }

    #[test]
    fn select_components() {
        let t = mk_tuple(vec![v("a"), v("b"), v("c")]).unwrap();
        assert_eq!(tuple_select(&t, 0).unwrap(), v("a"));
        assert_eq!(tuple_select(&t, 1).unwrap(), v("b"));
        assert_eq!(tuple_select(&t, 2).unwrap(), v("c"));
        assert!(tuple_select(&t, 3).is_err());
        let p = mk_tuple(vec![v("a"), v("b")]).unwrap();
        assert_eq!(tuple_select(&p, 1).unwrap(), v("b"));
    }
}
