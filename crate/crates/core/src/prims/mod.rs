//! Base types, constants and their delta rules.
//!
//! Primitive atoms (`Bool`, `Nat`, `Q`, `String`, `Row`) are ordinary formula atoms and
//! constants are ordinary terms; a [`Registry`] only decides which constant
//! applications contract and to what.

mod fw;
mod pi;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::term::{Prim, Term};
use crate::typecheck::synthesize;

pub use fw::{floyd_warshall, fw_f, parse_matrix, Distance, RowValue};
pub use pi::{pi_oracle, pi_partial, pi_integrand};

pub const BOOL: &str = "Bool";
pub const NAT: &str = "Nat";
pub const RAT: &str = "Q";
pub const STRING: &str = "String";
pub const ROW: &str = "Row";

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Literal {
    Bool(bool),
    Nat(BigUint),
    Rat(BigRational),
    Str(String),
    Row(RowValue),
}

impl Literal {
    pub fn nat(n: u64) -> Literal {
        Literal::Nat(BigUint::from(n))
    }

    pub fn formula(&self) -> Formula {
        Formula::atom(match self {
            Literal::Bool(_) => BOOL,
            Literal::Nat(_) => NAT,
            Literal::Rat(_) => RAT,
            Literal::Str(_) => STRING,
            Literal::Row(_) => ROW,
        })
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Bool(true) => f.write_str("tt"),
            Literal::Bool(false) => f.write_str("ff"),
            Literal::Nat(n) => write!(f, "{n}"),
            Literal::Rat(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            Literal::Str(s) => {
                f.write_str("\"")?;
                for c in s.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        '\n' => f.write_str("\\n")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")
            }
            Literal::Row(r) => write!(f, "{r}"),
        }
    }
}

/// Name of the conditional constant `if : Bool -> T -> T -> T`.
pub const IF: &str = "if";

pub type DeltaFn = Arc<dyn Fn(&[Term]) -> Result<Option<Term>> + Send + Sync>;

/// How an operation constant may be typed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Signature {
    Fixed(Formula),
    /// `Bool -> T -> T -> T` for any `T`.
    Conditional,
}

impl Signature {
    pub fn admits(&self, ty: &Formula) -> bool {
        match self {
            Signature::Fixed(f) => f == ty,
            Signature::Conditional => conditional_branch_type(ty).is_some(),
        }
    }
}

/// `T` when `ty` is `Bool -> T -> T -> T`.
pub fn conditional_branch_type(ty: &Formula) -> Option<&Formula> {
    let (b, rest) = ty.as_arrow()?;
    let (t1, rest) = rest.as_arrow()?;
    let (t2, t3) = rest.as_arrow()?;
    (*b == Formula::atom(BOOL) && t1 == t2 && t2 == t3).then_some(t1)
}

#[derive(Clone)]
pub struct OpDef {
    pub name: String,
    pub sig: Signature,
    /// Number of arguments the delta rule inspects.
    pub arity: usize,
    rule: Option<DeltaFn>,
}

impl fmt::Debug for OpDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OpDef")
            .field("name", &self.name)
            .field("sig", &self.sig)
            .field("arity", &self.arity)
            .field("has_rule", &self.rule.is_some())
            .finish()
    }
}

/// Constants, their signatures and delta rules, plus a default inhabitant per atom.
#[derive(Clone, Debug)]
pub struct Registry {
    name: String,
    ops: BTreeMap<String, OpDef>,
    defaults: BTreeMap<String, Term>,
}

impl Default for Registry {
    fn default() -> Self {
        Registry::base()
    }
}

impl Registry {
    /// Literals, the conditional, and defaults for the built-in atoms.
    pub fn base() -> Registry {
        let mut r = Registry { name: "base".into(), ops: BTreeMap::new(), defaults: BTreeMap::new() };
        r.register(IF, Signature::Conditional, 3, Some(Arc::new(if_rule)));
        r.set_default(BOOL, Term::lit(Literal::Bool(true)));
        r.set_default(NAT, Term::lit(Literal::nat(0)));
        r.set_default(RAT, Term::lit(Literal::Rat(BigRational::zero())));
        r.set_default(STRING, Term::lit(Literal::Str(String::new())));
        r.set_default(ROW, Term::lit(Literal::Row(RowValue::symbolic(1, 0))));
        r
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn register(&mut self, name: &str, sig: Signature, arity: usize, rule: Option<DeltaFn>) {
        self.ops.insert(name.to_string(), OpDef { name: name.to_string(), sig, arity, rule });
    }

    /// Constant without a delta rule.
    pub fn register_opaque(&mut self, name: &str, ty: Formula) {
        self.register(name, Signature::Fixed(ty), 0, None);
    }

    pub fn set_default(&mut self, atom: &str, witness: Term) {
        self.defaults.insert(atom.to_string(), witness);
    }

    pub fn default_for(&self, atom: &str) -> Option<&Term> {
        self.defaults.get(atom)
    }

    pub fn op(&self, name: &str) -> Option<&OpDef> {
        self.ops.get(name)
    }

    pub fn ops(&self) -> impl Iterator<Item = &OpDef> {
        self.ops.values()
    }

    /// The fixed type of a registered constant, if it has one.
    pub fn fixed_type(&self, name: &str) -> Option<&Formula> {
        match &self.ops.get(name)?.sig {
            Signature::Fixed(f) => Some(f),
            Signature::Conditional => None,
        }
    }

    /// Every registered constant in `t` must be used at an admissible type.
    pub fn check_term(&self, t: &Term) -> Result<()> {
        let mut err = None;
        t.walk(&mut |_, n| {
            if let Term::Const { prim: Prim::Op(name), ty } = n {
                if let Some(def) = self.ops.get(name) {
                    if !def.sig.admits(ty) && err.is_none() {
                        err = Some(Error::Prim(format!("constant {name} used at type {ty}")));
                    }
                }
            }
        });
        err.map_or(Ok(()), Err)
    }

    /// Contracts `t` when it is a saturated application of a constant whose rule fires.
    pub fn contract(&self, t: &Term) -> Result<Option<Term>> {
        let (head, args) = spine(t);
        let Term::Const { prim: Prim::Op(name), ty } = head else {
            return Ok(None);
        };
        let Some(def) = self.ops.get(name) else {
            return Ok(None);
        };
        let Some(rule) = &def.rule else {
            return Ok(None);
        };
        if args.len() != def.arity {
            return Ok(None);
        }
        let args: Vec<Term> = args.into_iter().cloned().collect();
        let Some(out) = rule(&args)? else {
            return Ok(None);
        };
        let mut expected = ty;
        for _ in 0..def.arity {
            expected = expected
                .as_arrow()
                .ok_or_else(|| Error::Prim(format!("{name} applied beyond its type")))?
                .1;
        }
        let found = synthesize(&out)?;
        if &found != expected {
            return Err(Error::Prim(format!("rule for {name} produced {found}, expected {expected}")));
        }
        Ok(Some(out))
    }

    /// Registry for a named profile: `bool`, `pi` / `pi:<p>`, `floyd-warshall`, `buyer-vendor`, `base`.
    ///
    /// A bare `pi` takes `p` from the largest `f<k>` constant occurring in `program`.
    pub fn profile(name: &str, program: Option<&Term>) -> Result<Registry> {
        let mut r = Registry::base();
        r.name = name.to_string();
        match name {
            "base" => {}
            "bool" => {
                r.register_opaque("u", Formula::atom(BOOL));
            }
            "floyd-warshall" => fw::register(&mut r),
            "buyer-vendor" => register_buyer_vendor(&mut r),
            "pi" => {
                let p = program.and_then(infer_pi_width).ok_or_else(|| {
                    Error::Prim("profile pi needs a program mentioning f1..fp, or use pi:<p>".into())
                })?;
                pi::register(&mut r, p);
            }
            _ => match name.strip_prefix("pi:").map(str::parse::<usize>) {
                Some(Ok(p)) if p >= 1 => pi::register(&mut r, p),
                _ => return Err(Error::Prim(format!("unknown profile {name}"))),
            },
        }
        Ok(r)
    }
}

fn infer_pi_width(t: &Term) -> Option<usize> {
    let mut best = None;
    t.walk(&mut |_, n| {
        if let Term::Const { prim: Prim::Op(name), .. } = n {
            if let Some(k) = name.strip_prefix('f').and_then(|k| k.parse::<usize>().ok()) {
                best = best.max(Some(k));
            }
        }
    });
    best
}

/// Head and arguments of a left-nested application.
pub fn spine(t: &Term) -> (&Term, Vec<&Term>) {
    let mut args = Vec::new();
    let mut cur = t;
    while let Term::App(f, a) = cur {
        args.push(&**a);
        cur = f;
    }
    args.reverse();
    (cur, args)
}

pub fn as_literal(t: &Term) -> Option<&Literal> {
    match t {
        Term::Const { prim: Prim::Lit(l), .. } => Some(l),
        _ => None,
    }
}

fn if_rule(args: &[Term]) -> Result<Option<Term>> {
    Ok(match as_literal(&args[0]) {
        Some(Literal::Bool(true)) => Some(args[1].clone()),
        Some(Literal::Bool(false)) => Some(args[2].clone()),
        _ => None,
    })
}

fn is_op(t: &Term, name: &str) -> bool {
    matches!(t, Term::Const { prim: Prim::Op(n), .. } if n == name)
}

fn register_buyer_vendor(r: &mut Registry) {
    let string = Formula::atom(STRING);
    let nat = Formula::atom(NAT);
    r.register_opaque("prod", string.clone());
    r.register_opaque("price", nat.clone());
    r.register_opaque("card", string.clone());
    let price_ty = nat.clone();
    r.register(
        "cost",
        Signature::Fixed(Formula::arrow(string.clone(), nat.clone())),
        1,
        Some(Arc::new(move |args: &[Term]| {
            Ok(is_op(&args[0], "prod").then(|| Term::op("price", price_ty.clone())))
        })),
    );
    let card_ty = string.clone();
    r.register(
        "pay_for",
        Signature::Fixed(Formula::arrow(nat.clone(), string.clone())),
        1,
        Some(Arc::new(move |args: &[Term]| {
            Ok(is_op(&args[0], "price").then(|| Term::op("card", card_ty.clone())))
        })),
    );
    // Turning the card number into money happens outside the program.
    r.register_opaque("use", Formula::arrow(string, nat));
}

pub(crate) fn nat_value(t: &Term) -> Option<u64> {
    match as_literal(t)? {
        Literal::Nat(n) => n.to_u64(),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: bool) -> Term {
        Term::lit(Literal::Bool(v))
    }

    fn if_term(c: Term, u: Term, v: Term) -> Term {
        let ty = Formula::atom(NAT);
        let if_ty = Formula::arrow(Formula::atom(BOOL), Formula::arrow(ty.clone(), Formula::arrow(ty.clone(), ty)));
        Term::apps(Term::op(IF, if_ty), [c, u, v])
    }

    #[test]
    fn conditional_rule() {
        let r = Registry::profile("bool", None).unwrap();
        let one = Term::lit(Literal::nat(1));
        let two = Term::lit(Literal::nat(2));
        assert_eq!(r.contract(&if_term(b(true), one.clone(), two.clone())).unwrap(), Some(one.clone()));
        assert_eq!(r.contract(&if_term(b(false), one.clone(), two.clone())).unwrap(), Some(two.clone()));
        let unknown = Term::op("u", Formula::atom(BOOL));
        assert_eq!(r.contract(&if_term(unknown, one, two)).unwrap(), None);
    }

    #[test]
    fn buyer_vendor_rules() {
        let r = Registry::profile("buyer-vendor", None).unwrap();
        let string = Formula::atom(STRING);
        let nat = Formula::atom(NAT);
        let cost = Term::op("cost", Formula::arrow(string.clone(), nat.clone()));
        let t = Term::app(cost, Term::op("prod", string.clone()));
        assert_eq!(r.contract(&t).unwrap(), Some(Term::op("price", nat.clone())));
        let pay = Term::op("pay_for", Formula::arrow(nat.clone(), string.clone()));
        let t = Term::app(pay, Term::op("price", nat.clone()));
        assert_eq!(r.contract(&t).unwrap(), Some(Term::op("card", string.clone())));
        let use_ = Term::op("use", Formula::arrow(string.clone(), nat));
        assert_eq!(r.contract(&Term::app(use_, Term::op("card", string))).unwrap(), None);
    }

    #[test]
    fn profiles() {
        assert!(Registry::profile("bool", None).unwrap().op(IF).is_some());
        let pi = Registry::profile("pi:2", None).unwrap();
        assert!(pi.op("f1").is_some() && pi.op("f2").is_some() && pi.op("sum").is_some());
        assert!(pi.op("f3").is_none());
        assert!(Registry::profile("floyd-warshall", None).unwrap().op("f").is_some());
        assert!(Registry::profile("nonsense", None).is_err());
        assert!(Registry::profile("pi", None).is_err());
    }

    #[test]
    fn literal_display() {
        assert_eq!(Literal::Rat(BigRational::new(6.into(), 4.into())).to_string(), "3/2");
        assert_eq!(Literal::Str("a\"b".into()).to_string(), "\"a\\\"b\"");
    }
}
