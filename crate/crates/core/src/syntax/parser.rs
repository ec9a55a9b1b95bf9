use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::lexer::{Lexer, Tok, Token};
use super::{ParseError, SourceSpan, SpanTree};
use crate::formula::{AxiomInstance, AxiomSchema, Formula};
use crate::prims::{Distance, Literal, Registry, RowValue, IF};
use crate::term::{Polarity, Side, Term};
use crate::typecheck::{synthesize, Context};

/// A parsed program with its declarations and a span for every node.
#[derive(Clone, Debug)]
pub struct Parsed {
    pub term: Term,
    pub spans: SpanTree,
    /// Free variables declared with `var`.
    pub vars: Context,
    /// Opaque constants declared with `const`.
    pub consts: BTreeMap<String, Formula>,
}

type Node = (Term, SpanTree);

const KEYWORDS: &[&str] = &["nu", "var", "const", "efq", "if", "then", "else"];

struct ChanScope {
    name: String,
    instance: AxiomInstance,
    process: usize,
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<Token>,
    pos: usize,
    registry: &'a Registry,
    vars: Context,
    consts: BTreeMap<String, Formula>,
    bound: Vec<(String, Formula)>,
    chans: Vec<ChanScope>,
}

/// Parses a program file: `var`/`const` declarations followed by one program.
pub fn parse_program(text: &str, registry: &Registry) -> Result<Parsed, ParseError> {
    parse_program_with(text, registry, &Context::new())
}

/// Like [`parse_program`] with extra free-variable declarations supplied by the caller.
pub fn parse_program_with(text: &str, registry: &Registry, vars: &Context) -> Result<Parsed, ParseError> {
    let mut p = Parser::new(text, registry)?;
    p.vars = vars.clone();
    p.declarations()?;
    let (term, spans) = p.program()?;
    p.expect_eof()?;
    Ok(Parsed { term, spans, vars: p.vars, consts: p.consts })
}

/// Parses a formula such as `Bool /\ Q -> Top`.
pub fn parse_type(text: &str) -> Result<Formula, ParseError> {
    let registry = Registry::base();
    let mut p = Parser::new(text, &registry)?;
    let ty = p.ty()?;
    p.expect_eof()?;
    Ok(ty)
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, registry: &'a Registry) -> Result<Parser<'a>, ParseError> {
        let toks = Lexer::new(src).tokenize()?;
        Ok(Parser {
            src,
            toks,
            pos: 0,
            registry,
            vars: Context::new(),
            consts: BTreeMap::new(),
            bound: Vec::new(),
            chans: Vec::new(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn adjacent(&self, k: usize) -> bool {
        let i = self.pos + k;
        i > 0 && i < self.toks.len() && self.toks[i - 1].end == self.toks[i].start
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn start(&self) -> usize {
        self.toks[self.pos].start
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.toks[self.pos - 1].end
        }
    }

    fn span_from(&self, start: usize) -> SourceSpan {
        SourceSpan::from_offsets(self.src, start, self.prev_end().max(start))
    }

    fn error_here(&self, msg: impl Into<String>) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError::new(msg, SourceSpan::from_offsets(self.src, t.start, t.end))
    }

    fn error_span(&self, start: usize, msg: impl Into<String>) -> ParseError {
        ParseError::new(msg, self.span_from(start))
    }

    fn expect(&mut self, tok: Tok) -> Result<Token, ParseError> {
        if *self.peek() == tok {
            Ok(self.bump())
        } else {
            Err(self.error_here(format!("expected {}, found {}", tok.describe(), self.peek().describe())))
        }
    }

    fn expect_eof(&self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Eof => Ok(()),
            t => Err(self.error_here(format!("unexpected {} after the program", t.describe()))),
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expect_kw(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.is_kw(kw) {
            self.bump();
            Ok(())
        } else {
            Err(self.error_here(format!("expected `{kw}`, found {}", self.peek().describe())))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            t => Err(self.error_here(format!("expected an identifier, found {}", t.describe()))),
        }
    }

    fn small_nat(&mut self) -> Result<usize, ParseError> {
        match self.peek().clone() {
            Tok::Nat(n) => {
                let v = n.to_usize().ok_or_else(|| self.error_here("number too large"))?;
                self.bump();
                Ok(v)
            }
            t => Err(self.error_here(format!("expected a number, found {}", t.describe()))),
        }
    }

    fn declarations(&mut self) -> Result<(), ParseError> {
        loop {
            let is_var = self.is_kw("var");
            if !is_var && !self.is_kw("const") {
                return Ok(());
            }
            let start = self.start();
            self.bump();
            let name = self.ident()?;
            self.expect(Tok::Colon)?;
            let ty = self.ty()?;
            self.expect(Tok::Semi)?;
            if self.vars.contains_key(&name) || self.consts.contains_key(&name) {
                return Err(self.error_span(start, format!("{name} is declared twice")));
            }
            if is_var {
                self.vars.insert(name, ty);
            } else {
                self.consts.insert(name, ty);
            }
        }
    }

    // ---- types

    fn ty(&mut self) -> Result<Formula, ParseError> {
        let left = self.conj()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            Ok(Formula::arrow(left, self.ty()?))
        } else {
            Ok(left)
        }
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let left = self.ty_atom()?;
        if *self.peek() == Tok::Wedge {
            self.bump();
            Ok(Formula::conj(left, self.conj()?))
        } else {
            Ok(left)
        }
    }

    fn ty_atom(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if s == "Bot" => {
                self.bump();
                Ok(Formula::Bottom)
            }
            Tok::Ident(s) if s == "Top" => {
                self.bump();
                Ok(Formula::top())
            }
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(Formula::atom(s))
            }
            Tok::LParen => {
                self.bump();
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            t => Err(self.error_here(format!("expected a type, found {}", t.describe()))),
        }
    }

    // ---- programs

    fn program(&mut self) -> Result<Node, ParseError> {
        if self.is_kw("nu") {
            return self.nu();
        }
        let start = self.start();
        let first = self.term()?;
        if !matches!(self.peek(), Tok::Bar | Tok::BarBar) {
            return Ok(first);
        }
        let mut threads = vec![first];
        while matches!(self.peek(), Tok::Bar | Tok::BarBar) {
            self.bump();
            threads.push(self.term()?);
        }
        let (terms, spans): (Vec<Term>, Vec<SpanTree>) = threads.into_iter().unzip();
        Ok((Term::Par(terms), SpanTree::new(self.span_from(start), spans)))
    }

    fn nu(&mut self) -> Result<Node, ParseError> {
        let start = self.start();
        self.expect_kw("nu")?;
        let name = self.ident()?;
        self.expect(Tok::Colon)?;
        let instance = self.header()?;
        self.expect(Tok::Dot)?;
        let m = instance.len();
        self.chans.push(ChanScope { name: name.clone(), instance: instance.clone(), process: 1 });
        let mut processes = Vec::new();
        let mut spans = Vec::new();
        let result = (|| {
            loop {
                let index = processes.len() + 1;
                if index > m {
                    return Err(self.error_here(format!("more processes than the {m} disjuncts of the axiom")));
                }
                self.chans.last_mut().expect("scope").process = index;
                let mut threads = vec![];
                loop {
                    let (t, s) = self.term()?;
                    threads.push(t);
                    spans.push(s);
                    if *self.peek() != Tok::Bar {
                        break;
                    }
                    self.bump();
                }
                processes.push(threads);
                if *self.peek() != Tok::BarBar {
                    return Ok(());
                }
                self.bump();
            }
        })();
        self.chans.pop();
        result?;
        Ok((Term::nu(name, instance, processes), SpanTree::new(self.span_from(start), spans)))
    }

    fn header(&mut self) -> Result<AxiomInstance, ParseError> {
        let start = self.start();
        self.expect(Tok::LBrace)?;
        let mut formulas = Vec::new();
        let mut disjuncts = Vec::new();
        while *self.peek() != Tok::RBrace {
            let idx_start = self.start();
            let i = self.small_nat()?;
            if i != formulas.len() + 1 {
                return Err(self.error_span(idx_start, format!("expected disjunct {}, found {i}", formulas.len() + 1)));
            }
            self.expect(Tok::Colon)?;
            formulas.push(self.ty()?);
            self.expect(Tok::Tilde)?;
            self.expect(Tok::LBracket)?;
            let mut links = Vec::new();
            while *self.peek() != Tok::RBracket {
                links.push(self.small_nat()?);
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
            self.expect(Tok::RBracket)?;
            disjuncts.push((!links.is_empty()).then_some(links));
            if *self.peek() == Tok::Semi {
                self.bump();
            } else {
                break;
            }
        }
        self.expect(Tok::RBrace)?;
        let schema = AxiomSchema::new(disjuncts).map_err(|e| self.error_span(start, e.to_string()))?;
        AxiomInstance::new(schema, formulas).map_err(|e| self.error_span(start, e.to_string()))
    }

    // ---- terms

    fn term(&mut self) -> Result<Node, ParseError> {
        let start = self.start();
        match self.peek() {
            Tok::Backslash => {
                self.bump();
                let var = self.ident()?;
                self.expect(Tok::Colon)?;
                let ty = self.ty()?;
                self.expect(Tok::Dot)?;
                self.bound.push((var.clone(), ty.clone()));
                let body = self.term();
                self.bound.pop();
                let (body, bs) = body?;
                Ok((Term::lam(var, ty, body), SpanTree::new(self.span_from(start), vec![bs])))
            }
            Tok::Ident(s) if s == "if" && *self.peek_at(1) != Tok::LBracket => self.conditional(),
            _ => self.app(),
        }
    }

    fn conditional(&mut self) -> Result<Node, ParseError> {
        let start = self.start();
        let if_start = self.start();
        self.expect_kw("if")?;
        let if_span = self.span_from(if_start);
        let (c, cs) = self.term()?;
        self.expect_kw("then")?;
        let (u, us) = self.term()?;
        self.expect_kw("else")?;
        let (v, vs) = self.term()?;
        let branch = synthesize(&u).map_err(|d| self.error_span(start, format!("cannot type the then-branch: {d}")))?;
        let span = self.span_from(start);
        let if_ty = conditional_type(branch);
        let head = Term::op(IF, if_ty);
        let t1 = Term::app(head, c);
        let t2 = Term::app(t1, u);
        let t3 = Term::app(t2, v);
        let s1 = SpanTree::new(span.clone(), vec![SpanTree::leaf(if_span), cs]);
        let s2 = SpanTree::new(span.clone(), vec![s1, us]);
        Ok((t3, SpanTree::new(span, vec![s2, vs])))
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Tok::Ident(s) if s == "if" => *self.peek_at(1) == Tok::LBracket,
            Tok::Ident(s) => !KEYWORDS.contains(&s.as_str()),
            Tok::Nat(_) | Tok::Rat(..) | Tok::Str(_) | Tok::LParen | Tok::LAngle => true,
            _ => false,
        }
    }

    fn app(&mut self) -> Result<Node, ParseError> {
        let start = self.start();
        if self.is_kw("efq") {
            self.bump();
            self.expect(Tok::LBracket)?;
            let target = self.ty()?;
            self.expect(Tok::RBracket)?;
            let (body, bs) = self.postfix()?;
            return Ok((Term::efq(target, body), SpanTree::new(self.span_from(start), vec![bs])));
        }
        if !self.starts_atom() {
            return Err(self.error_here(format!("expected a term, found {}", self.peek().describe())));
        }
        let (mut head, mut hs) = self.postfix()?;
        while self.starts_atom() {
            let (arg, as_) = self.postfix()?;
            head = Term::app(head, arg);
            hs = SpanTree::new(self.span_from(start), vec![hs, as_]);
        }
        Ok((head, hs))
    }

    fn postfix(&mut self) -> Result<Node, ParseError> {
        let start = self.start();
        let (mut t, mut s) = self.atom()?;
        while *self.peek() == Tok::Dot && self.adjacent(0) && self.adjacent(1) {
            let side = match self.peek_at(1) {
                Tok::Nat(n) if *n == BigUint::from(0u8) => Side::Left,
                Tok::Nat(n) if *n == BigUint::from(1u8) => Side::Right,
                _ => break,
            };
            self.bump();
            self.bump();
            t = Term::proj(side, t);
            s = SpanTree::new(self.span_from(start), vec![s]);
        }
        Ok((t, s))
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        let start = self.start();
        let tok = self.peek().clone();
        let term = match tok {
            Tok::Nat(n) => {
                self.bump();
                Term::lit(Literal::Nat(n))
            }
            Tok::Rat(n, d) => {
                self.bump();
                Term::lit(Literal::Rat(BigRational::new(n.into(), d.into())))
            }
            Tok::Str(s) => {
                self.bump();
                Term::lit(Literal::Str(s))
            }
            Tok::LParen => {
                self.bump();
                let (t, s) = self.program()?;
                self.expect(Tok::RParen)?;
                return Ok((t, s.with_span(self.span_from(start))));
            }
            Tok::LAngle => return self.tuple(),
            Tok::Ident(name) => return self.named(name),
            t => return Err(self.error_here(format!("expected a term, found {}", t.describe()))),
        };
        Ok((term, SpanTree::leaf(self.span_from(start))))
    }

    fn tuple(&mut self) -> Result<Node, ParseError> {
        let start = self.start();
        self.expect(Tok::LAngle)?;
        let mut items = vec![self.term()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            items.push(self.term()?);
        }
        self.expect(Tok::RAngle)?;
        let mut iter = items.into_iter().rev();
        let (mut acc, mut acc_span) = iter.next().expect("one item");
        for (t, s) in iter {
            let span = SourceSpan::from_offsets(self.src, s.span.start, acc_span.span.end);
            acc = Term::pair(t, acc);
            acc_span = SpanTree::new(span, vec![s, acc_span]);
        }
        Ok((acc, acc_span.with_span(self.span_from(start))))
    }

    fn named(&mut self, name: String) -> Result<Node, ParseError> {
        let start = self.start();
        match name.as_str() {
            "tt" | "ff" => {
                self.bump();
                return Ok((Term::lit(Literal::Bool(name == "tt")), SpanTree::leaf(self.span_from(start))));
            }
            "if" => {
                self.bump();
                self.expect(Tok::LBracket)?;
                let branch = self.ty()?;
                self.expect(Tok::RBracket)?;
                return Ok((Term::op(IF, conditional_type(branch)), SpanTree::leaf(self.span_from(start))));
            }
            "nu" => return Err(self.error_here("a channel binder inside a term must be parenthesized")),
            _ if KEYWORDS.contains(&name.as_str()) => {
                return Err(self.error_here(format!("unexpected keyword `{name}`")));
            }
            _ => {}
        }
        if is_row_head(&name) && *self.peek_at(1) == Tok::LParen {
            return self.row(&name);
        }
        self.bump();
        let polarity = match self.peek() {
            Tok::Bang if self.adjacent(0) => Some(Polarity::Out),
            Tok::Question if self.adjacent(0) => Some(Polarity::In),
            _ => None,
        };
        if let Some(polarity) = polarity {
            self.bump();
            let scope = self
                .chans
                .iter()
                .rev()
                .find(|s| s.name == name)
                .ok_or_else(|| self.error_span(start, format!("channel {name} is not bound by a binder")))?;
            let ty = scope.instance.channel_type(scope.process).expect("process within the axiom");
            let term = Term::chan(name, polarity, scope.process, ty);
            return Ok((term, SpanTree::leaf(self.span_from(start))));
        }
        let term = if let Some((_, ty)) = self.bound.iter().rev().find(|(n, _)| *n == name) {
            Term::var(name, ty.clone())
        } else if let Some(ty) = self.vars.get(&name) {
            Term::var(name, ty.clone())
        } else if let Some(ty) = self.consts.get(&name) {
            Term::op(name, ty.clone())
        } else if let Some(ty) = self.registry.fixed_type(&name) {
            Term::op(name, ty.clone())
        } else {
            return Err(self.error_span(start, format!("unknown identifier {name}")));
        };
        Ok((term, SpanTree::leaf(self.span_from(start))))
    }

    fn row(&mut self, head: &str) -> Result<Node, ParseError> {
        let start = self.start();
        let source: usize = head[1..].parse().map_err(|_| self.error_here("row index too large"))?;
        self.bump();
        self.expect(Tok::LParen)?;
        let stage = self.small_nat()?;
        self.expect(Tok::RParen)?;
        let mut entries = None;
        if *self.peek() == Tok::LBracket && self.adjacent(0) {
            self.bump();
            let mut es = Vec::new();
            while *self.peek() != Tok::RBracket {
                match self.peek().clone() {
                    Tok::Nat(n) => {
                        let v = n.to_u64().ok_or_else(|| self.error_here("distance too large"))?;
                        es.push(Distance::Finite(v));
                    }
                    Tok::Ident(s) if s == "inf" => es.push(Distance::Infinite),
                    t => return Err(self.error_here(format!("expected a distance, found {}", t.describe()))),
                }
                self.bump();
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
            self.expect(Tok::RBracket)?;
            entries = Some(es);
        }
        let row = RowValue { source, stage, entries };
        Ok((Term::lit(Literal::Row(row)), SpanTree::leaf(self.span_from(start))))
    }
}

fn is_row_head(name: &str) -> bool {
    name.len() > 1 && name.starts_with('I') && name[1..].bytes().all(|b| b.is_ascii_digit())
}

/// `Bool -> T -> T -> T`.
pub fn conditional_type(branch: Formula) -> Formula {
    Formula::arrow(
        Formula::atom(crate::prims::BOOL),
        Formula::arrow(branch.clone(), Formula::arrow(branch.clone(), branch)),
    )
}
