use std::collections::BTreeMap;
use std::fmt::Write;

use crate::formula::{AxiomInstance, Formula};
use crate::prims::{conditional_branch_type, spine, IF};
use crate::term::{Prim, Term};

// Precedence levels: 0 binders and conditionals, 1 application, 2 postfix, 3 atoms.
const BINDER: u8 = 0;
const APP: u8 = 1;
const POSTFIX: u8 = 2;
const ATOM: u8 = 3;

/// Canonical concrete syntax of a term.
pub fn pretty(t: &Term) -> String {
    let mut out = String::new();
    write_program(&mut out, t);
    out
}

/// A full program file: declarations for free variables and operation constants, then the term.
pub fn pretty_program(t: &Term) -> String {
    let mut out = String::new();
    for (name, ty) in t.free_var_types() {
        let _ = writeln!(out, "var {name} : {ty};");
    }
    let mut consts = BTreeMap::new();
    t.walk(&mut |_, n| {
        if let Term::Const { prim: Prim::Op(name), ty } = n {
            if name != IF {
                consts.entry(name.clone()).or_insert_with(|| ty.clone());
            }
        }
    });
    for (name, ty) in consts {
        let _ = writeln!(out, "const {name} : {ty};");
    }
    write_program(&mut out, t);
    out.push('\n');
    out
}

/// The header `{1: A ~ [..]; ...}` of a channel binder.
pub fn pretty_header(inst: &AxiomInstance) -> String {
    let parts: Vec<String> = (1..=inst.len())
        .map(|i| {
            let links = inst
                .schema()
                .outlinks(i)
                .map(|ks| ks.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "))
                .unwrap_or_default();
            format!("{i}: {} ~ [{links}]", inst.formula(i).expect("in range"))
        })
        .collect();
    format!("{{{}}}", parts.join("; "))
}

fn write_program(out: &mut String, t: &Term) {
    match t {
        Term::Par(ts) => {
            for (i, th) in ts.iter().enumerate() {
                if i > 0 {
                    out.push_str(" || ");
                }
                write_term(out, th, BINDER);
            }
        }
        Term::Nu(nu) => {
            let _ = write!(out, "nu {} : {} . ", nu.chan, pretty_header(&nu.instance));
            for (p, threads) in nu.processes.iter().enumerate() {
                if p > 0 {
                    out.push_str(" || ");
                }
                for (i, th) in threads.iter().enumerate() {
                    if i > 0 {
                        out.push_str(" | ");
                    }
                    write_term(out, th, BINDER);
                }
            }
        }
        _ => write_term(out, t, BINDER),
    }
}

fn level(t: &Term) -> u8 {
    match t {
        Term::Lam { .. } => BINDER,
        Term::App(..) if as_conditional(t).is_some() => BINDER,
        Term::App(..) | Term::Efq { .. } => APP,
        Term::Proj(..) => POSTFIX,
        _ => ATOM,
    }
}

fn as_conditional(t: &Term) -> Option<(&Term, &Term, &Term)> {
    let (head, args) = spine(t);
    match head {
        Term::Const { prim: Prim::Op(name), ty } if name == IF && args.len() == 3 && conditional_branch_type(ty).is_some() => {
            Some((args[0], args[1], args[2]))
        }
        _ => None,
    }
}

fn write_term(out: &mut String, t: &Term, ctx: u8) {
    if level(t) < ctx {
        out.push('(');
        write_term(out, t, BINDER);
        out.push(')');
        return;
    }
    match t {
        Term::Var { name, .. } => out.push_str(name),
        Term::Chan(c) => {
            out.push_str(&c.name);
            out.push(c.polarity.sigil());
        }
        Term::Const { prim: Prim::Lit(l), .. } => {
            let _ = write!(out, "{l}");
        }
        Term::Const { prim: Prim::Op(name), ty } => {
            if name == IF {
                let branch = conditional_branch_type(ty).cloned().unwrap_or(Formula::Bottom);
                let _ = write!(out, "if[{branch}]");
            } else {
                out.push_str(name);
            }
        }
        Term::Lam { var, ty, body } => {
            let _ = write!(out, "\\{var}:{ty}. ");
            write_term(out, body, BINDER);
        }
        Term::App(f, a) => {
            if let Some((c, u, v)) = as_conditional(t) {
                out.push_str("if ");
                write_term(out, c, BINDER);
                out.push_str(" then ");
                write_term(out, u, BINDER);
                out.push_str(" else ");
                write_term(out, v, BINDER);
                return;
            }
            // A conditional or efq in head position must be parenthesized even at level 1.
            if as_conditional(f).is_some() || matches!(**f, Term::Efq { .. }) {
                out.push('(');
                write_term(out, f, BINDER);
                out.push(')');
            } else {
                write_term(out, f, APP);
            }
            out.push(' ');
            write_term(out, a, POSTFIX);
        }
        Term::Pair(..) => {
            out.push('<');
            let mut cur = t;
            let mut first = true;
            while let Term::Pair(l, r) = cur {
                if !first {
                    out.push_str(", ");
                }
                first = false;
                write_term(out, l, BINDER);
                cur = r;
            }
            out.push_str(", ");
            write_term(out, cur, BINDER);
            out.push('>');
        }
        Term::Proj(side, of) => {
            write_term(out, of, POSTFIX);
            let _ = write!(out, ".{}", side.index());
        }
        Term::Efq { target, body } => {
            let _ = write!(out, "efq[{target}] ");
            write_term(out, body, POSTFIX);
        }
        Term::Par(_) | Term::Nu(_) => {
            out.push('(');
            write_program(out, t);
            out.push(')');
        }
    }
}
