//! Simple types, axiom schemata of the disjunctive class, and their instances.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A simple type: atoms, falsity, implication and conjunction.
///
/// `->` and `/\` both associate to the right, and `/\` binds tighter than `->`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Formula {
    Atom(String),
    Bottom,
    Arrow(Box<Formula>, Box<Formula>),
    Conj(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Formula {
        Formula::Atom(name.into())
    }

    pub fn arrow(left: Formula, right: Formula) -> Formula {
        Formula::Arrow(Box::new(left), Box::new(right))
    }

    pub fn conj(left: Formula, right: Formula) -> Formula {
        Formula::Conj(Box::new(left), Box::new(right))
    }

    /// `A -> Bot`.
    pub fn neg(inner: Formula) -> Formula {
        Formula::arrow(inner, Formula::Bottom)
    }

    /// `Bot -> Bot`.
    pub fn top() -> Formula {
        Formula::arrow(Formula::Bottom, Formula::Bottom)
    }

    /// Right-nested conjunction `A1 /\ (A2 /\ ... An)`. Returns `None` for an empty list.
    pub fn conj_all(items: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        let mut items: Vec<Formula> = items.into_iter().collect();
        let mut acc = items.pop()?;
        while let Some(item) = items.pop() {
            acc = Formula::conj(item, acc);
        }
        Some(acc)
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Formula::Atom(_))
    }

    pub fn is_top(&self) -> bool {
        matches!(self, Formula::Arrow(l, r) if **l == Formula::Bottom && **r == Formula::Bottom)
    }

    pub fn as_arrow(&self) -> Option<(&Formula, &Formula)> {
        match self {
            Formula::Arrow(l, r) => Some((l, r)),
            _ => None,
        }
    }

    pub fn as_conj(&self) -> Option<(&Formula, &Formula)> {
        match self {
            Formula::Conj(l, r) => Some((l, r)),
            _ => None,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Bottom => 1,
            Formula::Arrow(l, r) | Formula::Conj(l, r) => 1 + l.size() + r.size(),
        }
    }

    /// Splits a right-nested conjunction into exactly `n` components.
    pub fn conj_components(&self, n: usize) -> Option<Vec<&Formula>> {
        let mut out = Vec::with_capacity(n);
        let mut cur = self;
        for _ in 1..n {
            let (l, r) = cur.as_conj()?;
            out.push(l);
            cur = r;
        }
        out.push(cur);
        Some(out)
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        // prec 0: arrow position, 1: conjunction operand, 2: atomic only
        match self {
            Formula::Atom(name) => write!(f, "{name}"),
            Formula::Bottom => write!(f, "Bot"),
            _ if self.is_top() => write!(f, "Top"),
            Formula::Arrow(l, r) => {
                if prec > 0 {
                    write!(f, "(")?;
                }
                l.fmt_prec(f, 1)?;
                write!(f, " -> ")?;
                r.fmt_prec(f, 0)?;
                if prec > 0 {
                    write!(f, ")")?;
                }
                Ok(())
            }
            Formula::Conj(l, r) => {
                if prec > 1 {
                    write!(f, "(")?;
                }
                l.fmt_prec(f, 2)?;
                write!(f, " /\\ ")?;
                r.fmt_prec(f, 1)?;
                if prec > 1 {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// An axiom schema `(A1 -> A1 /\ B1) \/ ... \/ (Am -> Am /\ Bm)`.
///
/// Disjunct `i` (1-based) records its outlinks: `None` when `Bi` is falsity,
/// otherwise the strictly increasing list of indices `k` with `Ak` a conjunct of `Bi`.
/// Process `k` may send to process `i` exactly when `k` is in that list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AxiomSchema {
    disjuncts: Vec<Option<Vec<usize>>>,
}

impl AxiomSchema {
    pub fn new(disjuncts: Vec<Option<Vec<usize>>>) -> Result<AxiomSchema> {
        let m = disjuncts.len();
        if m == 0 {
            return Err(Error::Schema("an axiom schema needs at least one disjunct".into()));
        }
        for (pos, links) in disjuncts.iter().enumerate() {
            let i = pos + 1;
            let Some(links) = links else { continue };
            if links.is_empty() {
                return Err(Error::Schema(format!(
                    "disjunct {i}: outlink list must be nonempty (use no list for Bot)"
                )));
            }
            for w in links.windows(2) {
                if w[0] >= w[1] {
                    return Err(Error::Schema(format!(
                        "disjunct {i}: outlink indices must be strictly increasing"
                    )));
                }
            }
            for &k in links {
                if k == 0 || k > m {
                    return Err(Error::Schema(format!(
                        "disjunct {i}: outlink index {k} is outside 1..{m}"
                    )));
                }
                if k == i {
                    return Err(Error::Schema(format!(
                        "disjunct {i}: a disjunct cannot list itself as an outlink"
                    )));
                }
            }
        }
        Ok(AxiomSchema { disjuncts })
    }

    /// Number of disjuncts `m`.
    pub fn len(&self) -> usize {
        self.disjuncts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.disjuncts.is_empty()
    }

    /// Outlinks of disjunct `i` (1-based); `None` for a falsity disjunct.
    pub fn outlinks(&self, i: usize) -> Option<&[usize]> {
        self.disjuncts.get(i.checked_sub(1)?)?.as_deref()
    }

    pub fn disjuncts(&self) -> &[Option<Vec<usize>>] {
        &self.disjuncts
    }

    /// Whether process `i` is outlinked to process `j`, i.e. may send to it.
    pub fn outlinked(&self, i: usize, j: usize) -> Result<bool> {
        let m = self.len();
        if i == j {
            return Err(Error::Schema(format!("outlinked({i}, {j}): indices must differ")));
        }
        if i == 0 || j == 0 || i > m || j > m {
            return Err(Error::Schema(format!("outlinked({i}, {j}): indices must be in 1..{m}")));
        }
        Ok(self.outlinks(j).is_some_and(|ks| ks.contains(&i)))
    }

    /// The em schema `(A1 -> A1 /\ Bot) \/ (A2 -> A2 /\ A1)`.
    pub fn em() -> AxiomSchema {
        AxiomSchema { disjuncts: vec![None, Some(vec![1])] }
    }

    /// Ring of `n` processes where process `i` receives from its predecessor.
    pub fn ring(n: usize) -> Result<AxiomSchema> {
        if n < 2 {
            return Err(Error::Schema("a ring needs at least two processes".into()));
        }
        let disjuncts = (1..=n).map(|i| Some(vec![if i == 1 { n } else { i - 1 }])).collect();
        AxiomSchema::new(disjuncts)
    }

    /// `p` producers that all feed one collector placed last.
    pub fn star(p: usize) -> Result<AxiomSchema> {
        let mut disjuncts = vec![None; p];
        disjuncts.push(Some((1..=p).collect()));
        AxiomSchema::new(disjuncts)
    }

    /// Textual notation with `A1..Am` for the schematic variables.
    pub fn notation(&self) -> String {
        let parts: Vec<String> = self
            .disjuncts
            .iter()
            .enumerate()
            .map(|(pos, links)| {
                let i = pos + 1;
                let rest = match links {
                    None => "Bot".to_string(),
                    Some(ks) => ks.iter().map(|k| format!("A{k}")).collect::<Vec<_>>().join(" /\\ "),
                };
                format!("(A{i} -> A{i} /\\ {rest})")
            })
            .collect();
        parts.join(" \\/ ")
    }

    /// Header accepted by the program parser, with each disjunct instantiated to `Ai`.
    pub fn header_snippet(&self) -> String {
        let parts: Vec<String> = self
            .disjuncts
            .iter()
            .enumerate()
            .map(|(pos, links)| {
                let i = pos + 1;
                let ks = links
                    .as_ref()
                    .map(|ks| ks.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(", "))
                    .unwrap_or_default();
                format!("{i}: A{i} ~ [{ks}]")
            })
            .collect();
        format!("{{{}}}", parts.join("; "))
    }
}

impl fmt::Display for AxiomSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.notation())
    }
}

/// An axiom schema together with the formula substituted for each schematic variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AxiomInstance {
    schema: AxiomSchema,
    assignment: Vec<Formula>,
}

impl AxiomInstance {
    pub fn new(schema: AxiomSchema, assignment: Vec<Formula>) -> Result<AxiomInstance> {
        if assignment.len() != schema.len() {
            return Err(Error::Schema(format!(
                "instance assigns {} formulas to a schema with {} disjuncts",
                assignment.len(),
                schema.len()
            )));
        }
        Ok(AxiomInstance { schema, assignment })
    }

    /// Same formula for every schematic variable.
    pub fn uniform(schema: AxiomSchema, formula: Formula) -> AxiomInstance {
        let assignment = vec![formula; schema.len()];
        AxiomInstance { schema, assignment }
    }

    pub fn schema(&self) -> &AxiomSchema {
        &self.schema
    }

    pub fn len(&self) -> usize {
        self.schema.len()
    }

    pub fn is_empty(&self) -> bool {
        self.schema.is_empty()
    }

    /// Formula assigned to disjunct `i` (1-based).
    pub fn formula(&self, i: usize) -> Option<&Formula> {
        self.assignment.get(i.checked_sub(1)?)
    }

    pub fn assignment(&self) -> &[Formula] {
        &self.assignment
    }

    /// `Bi`: falsity or the right-nested conjunction of the outlinked formulas.
    pub fn payload_type(&self, i: usize) -> Option<Formula> {
        self.formula(i)?;
        match self.schema.outlinks(i) {
            None => Some(Formula::Bottom),
            Some(ks) => Formula::conj_all(ks.iter().map(|&k| self.assignment[k - 1].clone())),
        }
    }

    /// `Ai -> Ai /\ Bi`, the type of both polarities of the channel in process `i`.
    pub fn channel_type(&self, i: usize) -> Option<Formula> {
        let a = self.formula(i)?.clone();
        let b = self.payload_type(i)?;
        Some(Formula::arrow(a.clone(), Formula::conj(a, b)))
    }
}

/// Builds an instance from a (possibly partial) map of assignments; every index must be present.
pub fn instantiate(schema: &AxiomSchema, assignment: &BTreeMap<usize, Formula>) -> Result<AxiomInstance> {
    let mut formulas = Vec::with_capacity(schema.len());
    for i in 1..=schema.len() {
        match assignment.get(&i) {
            Some(f) => formulas.push(f.clone()),
            None => return Err(Error::Schema(format!("instantiation is missing disjunct {i}"))),
        }
    }
    if let Some(extra) = assignment.keys().find(|&&k| k == 0 || k > schema.len()) {
        return Err(Error::Schema(format!("instantiation mentions unknown disjunct {extra}")));
    }
    AxiomInstance::new(schema.clone(), formulas)
}
