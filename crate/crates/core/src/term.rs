//! Signatures and the absolutely free term algebra over a set of generators.
//!
//! Terms are plain immutable trees. A term either names a generator or applies
//! an operation symbol to an ordered list of argument terms; generators and the
//! extension variable share one namespace.

use alloc::borrow::ToOwned;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::algebra::{Elem, FiniteAlgebra};

/// Default cap on the number of terms a single enumeration may produce.
pub const DEFAULT_TERM_CAP: usize = 1_000_000;

/// An operation symbol with a fixed arity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

/// An ordered list of operation symbols with pairwise distinct names.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Signature {
    symbols: Vec<Symbol>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("invalid symbol name `{0}`")]
    InvalidName(String),
    #[error("duplicate symbol `{0}`")]
    Duplicate(String),
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Signature {
    pub fn new<I, S>(symbols: I) -> Result<Self, SignatureError>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let mut out: Vec<Symbol> = Vec::new();
        for (name, arity) in symbols {
            let name = name.into();
            if !is_identifier(&name) {
                return Err(SignatureError::InvalidName(name));
            }
            if out.iter().any(|s| s.name == name) {
                return Err(SignatureError::Duplicate(name));
            }
            out.push(Symbol { name, arity });
        }
        Ok(Signature { symbols: out })
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn lookup(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    pub fn name(&self, op: usize) -> &str {
        &self.symbols[op].name
    }

    pub fn arity(&self, op: usize) -> usize {
        self.symbols[op].arity
    }

    /// Indices of the nullary symbols, in signature order.
    pub fn constants(&self) -> impl Iterator<Item = usize> + '_ {
        self.symbols
            .iter()
            .enumerate()
            .filter(|(_, s)| s.arity == 0)
            .map(|(i, _)| i)
    }

    pub fn has_constants(&self) -> bool {
        self.constants().next().is_some()
    }

    pub fn max_arity(&self) -> usize {
        self.symbols.iter().map(|s| s.arity).max().unwrap_or(0)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.symbols.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}/{}", s.name, s.arity)?;
        }
        Ok(())
    }
}

/// An element of the word algebra: a generator or an applied operation symbol.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Gen(String),
    App(String, Vec<Term>),
}

impl Term {
    pub fn gen(name: impl Into<String>) -> Term {
        Term::Gen(name.into())
    }

    pub fn app(op: impl Into<String>, args: Vec<Term>) -> Term {
        Term::App(op.into(), args)
    }

    pub fn constant(op: impl Into<String>) -> Term {
        Term::App(op.into(), Vec::new())
    }

    /// Tree height; generators and constants have height 0.
    pub fn height(&self) -> usize {
        match self {
            Term::Gen(_) => 0,
            Term::App(_, args) => args.iter().map(|a| a.height() + 1).max().unwrap_or(0),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Gen(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn mentions(&self, gen: &str) -> bool {
        match self {
            Term::Gen(g) => g == gen,
            Term::App(_, args) => args.iter().any(|a| a.mentions(gen)),
        }
    }

    pub fn generators(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_generators(&mut out);
        out
    }

    fn collect_generators<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Term::Gen(g) => {
                out.insert(g.as_str());
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_generators(out)),
        }
    }

    /// Checks that every application matches its symbol's arity.
    pub fn check(&self, sig: &Signature) -> Result<(), TermError> {
        match self {
            Term::Gen(_) => Ok(()),
            Term::App(op, args) => {
                let idx = sig
                    .lookup(op)
                    .ok_or_else(|| TermError::UnknownSymbol(op.clone()))?;
                if sig.arity(idx) != args.len() {
                    return Err(TermError::ArityMismatch {
                        symbol: op.clone(),
                        expected: sig.arity(idx),
                        found: args.len(),
                    });
                }
                args.iter().try_for_each(|a| a.check(sig))
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Gen(g) => f.write_str(g),
            Term::App(op, args) if args.is_empty() => f.write_str(op),
            Term::App(op, args) => {
                write!(f, "{op}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Generator names mapped to carrier elements.
pub type Assignment = BTreeMap<String, Elem>;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{symbol}` takes {expected} argument(s), found {found}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("generator `{0}` is not assigned")]
    Uncovered(String),
    #[error("element {0} is outside the carrier")]
    OutOfCarrier(Elem),
    #[error("term enumeration would exceed the cap of {cap} terms")]
    CapExceeded { cap: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("trailing input")]
    Trailing,
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{symbol}` takes {expected} argument(s), found {found}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("generator `{0}` clashes with an operation symbol")]
    GeneratorClash(String),
}

/// Parse failure with the byte offset where it was detected.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{kind} at offset {offset}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

/// Parses the concrete syntax `ident | ident "(" term ("," term)* ")" | ident "(" ")"`.
///
/// Identifiers resolve to operation symbols first; anything else must be one
/// of `gens`. Nullary symbols may be written with or without `()`.
pub fn parse_term<S: AsRef<str>>(text: &str, sig: &Signature, gens: &[S]) -> Result<Term, ParseError> {
    for g in gens {
        if sig.lookup(g.as_ref()).is_some() {
            return Err(ParseError {
                offset: 0,
                kind: ParseErrorKind::GeneratorClash(g.as_ref().to_owned()),
            });
        }
    }
    let mut p = Parser {
        src: text,
        pos: 0,
        sig,
        gens,
    };
    let t = p.term()?;
    p.skip_ws();
    if p.pos < text.len() {
        return Err(p.error(ParseErrorKind::Trailing));
    }
    Ok(t)
}

struct Parser<'a, S> {
    src: &'a str,
    pos: usize,
    sig: &'a Signature,
    gens: &'a [S],
}

impl<S: AsRef<str>> Parser<'_, S> {
    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            offset: self.pos,
            kind,
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn ident(&mut self) -> Result<(usize, &str), ParseError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            None => return Err(self.error(ParseErrorKind::UnexpectedEnd)),
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
            Some(c) => return Err(self.error(ParseErrorKind::UnexpectedChar(c))),
        }
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok((start, &self.src[start..self.pos]))
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let (start, name) = self.ident()?;
        let name = name.to_owned();
        self.skip_ws();
        let mut args = Vec::new();
        let mut parenthesized = false;
        if self.peek() == Some('(') {
            parenthesized = true;
            self.pos += 1;
            self.skip_ws();
            if self.peek() == Some(')') {
                self.pos += 1;
            } else {
                loop {
                    args.push(self.term()?);
                    self.skip_ws();
                    match self.peek() {
                        Some(',') => self.pos += 1,
                        Some(')') => {
                            self.pos += 1;
                            break;
                        }
                        Some(c) => return Err(self.error(ParseErrorKind::UnexpectedChar(c))),
                        None => return Err(self.error(ParseErrorKind::UnexpectedEnd)),
                    }
                }
            }
        }
        let at = |kind| ParseError {
            offset: start,
            kind,
        };
        match self.sig.lookup(&name) {
            Some(op) => {
                let expected = self.sig.arity(op);
                if expected != args.len() {
                    return Err(at(ParseErrorKind::ArityMismatch {
                        symbol: name,
                        expected,
                        found: args.len(),
                    }));
                }
                Ok(Term::App(name, args))
            }
            None if parenthesized => Err(at(ParseErrorKind::UnknownSymbol(name))),
            None if self.gens.iter().any(|g| g.as_ref() == name) => Ok(Term::Gen(name)),
            None => Err(at(ParseErrorKind::UnknownIdentifier(name))),
        }
    }
}

/// Evaluates `t` bottom-up in `alg` under `asg`.
pub fn eval_term(t: &Term, alg: &FiniteAlgebra, asg: &Assignment) -> Result<Elem, TermError> {
    match t {
        Term::Gen(g) => {
            let e = *asg.get(g).ok_or_else(|| TermError::Uncovered(g.clone()))?;
            if e >= alg.size() {
                return Err(TermError::OutOfCarrier(e));
            }
            Ok(e)
        }
        Term::App(op, args) => {
            let sig = alg.signature();
            let idx = sig
                .lookup(op)
                .ok_or_else(|| TermError::UnknownSymbol(op.clone()))?;
            if sig.arity(idx) != args.len() {
                return Err(TermError::ArityMismatch {
                    symbol: op.clone(),
                    expected: sig.arity(idx),
                    found: args.len(),
                });
            }
            let mut vals = Vec::with_capacity(args.len());
            for a in args {
                vals.push(eval_term(a, alg, asg)?);
            }
            Ok(alg.apply(idx, &vals))
        }
    }
}

/// Simultaneous substitution; generators outside `binding` are left alone.
pub fn substitute(t: &Term, binding: &BTreeMap<String, Term>) -> Term {
    match t {
        Term::Gen(g) => binding.get(g).cloned().unwrap_or_else(|| t.clone()),
        Term::App(op, args) => Term::App(
            op.clone(),
            args.iter().map(|a| substitute(a, binding)).collect(),
        ),
    }
}

/// Number of terms of height at most `depth`, or `None` on overflow.
pub fn count_terms(sig: &Signature, gens: usize, depth: usize) -> Option<u128> {
    let base = (gens as u128).checked_add(sig.constants().count() as u128)?;
    let mut n = base;
    for _ in 0..depth {
        let mut next = base;
        for s in sig.symbols().iter().filter(|s| s.arity > 0) {
            next = next.checked_add(n.checked_pow(s.arity as u32)?)?;
        }
        n = next;
    }
    Some(n)
}

/// All terms over `gens` of height at most `depth`.
///
/// Order: by height; within a height, generators (given order) then constants
/// at height 0, and for higher levels symbol order then argument tuples in
/// lexicographic order of their position in the enumeration.
pub fn enumerate_terms<S: AsRef<str>>(
    sig: &Signature,
    gens: &[S],
    depth: usize,
    cap: usize,
) -> Result<Vec<Term>, TermError> {
    match count_terms(sig, gens.len(), depth) {
        Some(n) if n <= cap as u128 => {}
        _ => return Err(TermError::CapExceeded { cap }),
    }
    let mut all: Vec<Term> = gens.iter().map(|g| Term::gen(g.as_ref())).collect();
    all.extend(sig.constants().map(|c| Term::constant(sig.name(c))));
    // terms[..prev_end] have height < level - 1, terms[prev_end..level_end] height level - 1
    let mut prev_end = 0;
    for _ in 0..depth {
        let level_end = all.len();
        let mut fresh = Vec::new();
        for s in sig.symbols().iter().filter(|s| s.arity > 0) {
            for_each_tuple(level_end, s.arity, |tuple| {
                if tuple.iter().any(|&i| i >= prev_end) {
                    let args = tuple.iter().map(|&i| all[i].clone()).collect();
                    fresh.push(Term::App(s.name.clone(), args));
                }
            });
        }
        prev_end = level_end;
        all.extend(fresh);
    }
    Ok(all)
}

/// A term of height at most `height` built from `gens` and the symbols of
/// `sig`. `pick(n)` must return a number below `n`; passing a seeded random
/// source gives reproducible random terms.
pub fn random_term<S: AsRef<str>>(
    sig: &Signature,
    gens: &[S],
    height: usize,
    pick: &mut impl FnMut(usize) -> usize,
) -> Term {
    let leaves = gens.len() + sig.constants().count();
    let ops: Vec<usize> = (0..sig.len()).filter(|&op| sig.arity(op) > 0).collect();
    let leaf = |pick: &mut dyn FnMut(usize) -> usize| {
        let i = pick(leaves);
        if i < gens.len() {
            Term::gen(gens[i].as_ref())
        } else {
            Term::constant(sig.name(sig.constants().nth(i - gens.len()).unwrap()))
        }
    };
    if height == 0 || ops.is_empty() || (leaves > 0 && pick(3) == 0) {
        assert!(leaves > 0, "no generators and no constants");
        return leaf(pick);
    }
    let op = ops[pick(ops.len())];
    let args = (0..sig.arity(op))
        .map(|_| random_term(sig, gens, height - 1, pick))
        .collect();
    Term::app(sig.name(op), args)
}

/// Calls `f` on every tuple in `0..n` of the given length, lexicographically.
pub fn for_each_tuple(n: usize, len: usize, mut f: impl FnMut(&[usize])) {
    if len == 0 {
        f(&[]);
        return;
    }
    if n == 0 {
        return;
    }
    let mut tuple = alloc::vec![0usize; len];
    loop {
        f(&tuple);
        let mut i = len;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            tuple[i] += 1;
            if tuple[i] < n {
                break;
            }
            tuple[i] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::standard;
    use alloc::string::ToString;
    use alloc::vec;

    fn not_and() -> Signature {
        Signature::new([("not", 1), ("and", 2)]).unwrap()
    }

    #[test]
    fn parses_nested_application() {
        let sig = standard::boolean_signature();
        let t = parse_term("and(x,not(x))", &sig, &["x"]).unwrap();
        assert_eq!(
            t,
            Term::app("and", vec![Term::gen("x"), Term::app("not", vec![Term::gen("x")])])
        );
    }

    #[test]
    fn nullary_with_or_without_parens() {
        let sig = standard::boolean_signature();
        let none: [&str; 0] = [];
        assert_eq!(parse_term("one", &sig, &none).unwrap(), Term::constant("one"));
        assert_eq!(parse_term(" one ( ) ", &sig, &none).unwrap(), Term::constant("one"));
    }

    #[test]
    fn parse_errors() {
        let sig = standard::boolean_signature();
        let e = parse_term("and(x)", &sig, &["x"]).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::ArityMismatch { expected: 2, found: 1, .. }));
        let e = parse_term("and(x,y)", &sig, &["x"]).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownIdentifier("y".into()));
        assert_eq!(e.offset, 6);
        let e = parse_term("foo(x)", &sig, &["x"]).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownSymbol("foo".into()));
        let e = parse_term("and(x,,x)", &sig, &["x"]).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnexpectedChar(','));
        let e = parse_term("and(x,x", &sig, &["x"]).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnexpectedEnd);
        let e = parse_term("x x", &sig, &["x"]).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Trailing);
        let e = parse_term("x", &sig, &["one"]).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::GeneratorClash("one".into()));
    }

    #[test]
    fn eval_examples() {
        let ba2 = standard::ba2();
        let sig = ba2.signature().clone();
        let t = parse_term("and(x,not(x))", &sig, &["x"]).unwrap();
        let asg: Assignment = [("x".to_string(), 1)].into_iter().collect();
        assert_eq!(eval_term(&t, &ba2, &asg), Ok(0));
        assert_eq!(eval_term(&Term::constant("one"), &ba2, &Assignment::new()), Ok(1));
        assert_eq!(
            eval_term(&t, &ba2, &Assignment::new()),
            Err(TermError::Uncovered("x".into()))
        );
        let bad: Assignment = [("x".to_string(), 7)].into_iter().collect();
        assert_eq!(eval_term(&t, &ba2, &bad), Err(TermError::OutOfCarrier(7)));

        let z4 = standard::cyclic(4);
        let t = parse_term("plus(x,x)", z4.signature(), &["x"]).unwrap();
        let asg: Assignment = [("x".to_string(), 3)].into_iter().collect();
        assert_eq!(eval_term(&t, &z4, &asg), Ok(2));
    }

    #[test]
    fn substitution_examples() {
        let sig = standard::boolean_signature();
        let t = parse_term("and(x,y)", &sig, &["x", "y"]).unwrap();
        let b: BTreeMap<String, Term> = [("x".to_string(), Term::gen("a"))].into_iter().collect();
        assert_eq!(substitute(&t, &b).to_string(), "and(a,y)");
        let b: BTreeMap<String, Term> =
            [("x".to_string(), Term::app("not", vec![Term::gen("x")]))].into_iter().collect();
        assert_eq!(substitute(&Term::gen("x"), &b).to_string(), "not(x)");
        assert_eq!(substitute(&Term::constant("one"), &b), Term::constant("one"));
    }

    #[test]
    fn enumeration_examples() {
        let sig = not_and();
        let d0 = enumerate_terms(&sig, &["x"], 0, DEFAULT_TERM_CAP).unwrap();
        assert_eq!(d0, vec![Term::gen("x")]);
        let d1 = enumerate_terms(&sig, &["x"], 1, DEFAULT_TERM_CAP).unwrap();
        let shown: Vec<_> = d1.iter().map(ToString::to_string).collect();
        assert_eq!(shown, ["x", "not(x)", "and(x,x)"]);

        let unary = Signature::new([("not", 1)]).unwrap();
        let d3 = enumerate_terms(&unary, &["x"], 3, DEFAULT_TERM_CAP).unwrap();
        let shown: Vec<_> = d3.iter().map(ToString::to_string).collect();
        assert_eq!(shown, ["x", "not(x)", "not(not(x))", "not(not(not(x)))"]);
    }

    #[test]
    fn enumeration_cap() {
        let sig = standard::boolean_signature();
        assert_eq!(
            enumerate_terms(&sig, &["x", "y"], 3, 1000),
            Err(TermError::CapExceeded { cap: 1000 })
        );
    }

    /// Independent generator: all trees of height <= depth by direct recursion.
    fn brute_force(sig: &Signature, gens: &[&str], depth: usize) -> BTreeSet<Term> {
        let mut out: BTreeSet<Term> = gens.iter().map(|g| Term::gen(*g)).collect();
        for c in sig.constants() {
            out.insert(Term::constant(sig.name(c)));
        }
        if depth == 0 {
            return out;
        }
        let below: Vec<Term> = brute_force(sig, gens, depth - 1).into_iter().collect();
        for s in sig.symbols().iter().filter(|s| s.arity > 0) {
            let mut partial: Vec<Vec<Term>> = vec![vec![]];
            for _ in 0..s.arity {
                partial = partial
                    .into_iter()
                    .flat_map(|p| {
                        below.iter().map(move |t| {
                            let mut q = p.clone();
                            q.push(t.clone());
                            q
                        })
                    })
                    .collect();
            }
            out.extend(partial.into_iter().map(|args| Term::App(s.name.clone(), args)));
        }
        out
    }

    #[test]
    fn enumeration_matches_brute_force_and_closed_form() {
        let sig = standard::group_signature();
        for depth in 0..=2 {
            let got = enumerate_terms(&sig, &["g", "x"], depth, DEFAULT_TERM_CAP).unwrap();
            let set: BTreeSet<Term> = got.iter().cloned().collect();
            assert_eq!(set.len(), got.len(), "duplicates at depth {depth}");
            assert_eq!(set, brute_force(&sig, &["g", "x"], depth));
            assert_eq!(count_terms(&sig, 2, depth), Some(got.len() as u128));
            assert!(got.iter().all(|t| t.height() <= depth));
            if depth > 0 {
                let prev = enumerate_terms(&sig, &["g", "x"], depth - 1, DEFAULT_TERM_CAP).unwrap();
                assert_eq!(&got[..prev.len()], &prev[..]);
            }
        }
    }

    #[test]
    fn signature_validation() {
        assert_eq!(
            Signature::new([("and", 2), ("and", 1)]),
            Err(SignatureError::Duplicate("and".into()))
        );
        assert_eq!(
            Signature::new([("", 2)]),
            Err(SignatureError::InvalidName("".into()))
        );
        assert_eq!(not_and().to_string(), "not/1 and/2");
    }
}
