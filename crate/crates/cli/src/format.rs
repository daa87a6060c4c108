//! Line-oriented algebra and variety files.
//!
//! ```text
//! # the two-element Boolean algebra
//! signature: and/2 or/2 not/1 zero/0 one/0
//! carrier: 0 1
//! op and: 0,0=0 0,1=0 1,0=0 1,1=1
//! op zero: =0
//! ```
//!
//! A variety file has a `signature:` line, `identity: l = r` lines and
//! optional `generator-algebra: PATH` lines, paths relative to the file.
//! `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use simplext_core::term::{for_each_tuple, is_identifier, ParseErrorKind, SignatureError};
use simplext_core::variety::VarietyError;
use simplext_core::{parse_term, FiniteAlgebra, Signature, Term, Variety};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FormatErrorKind {
    #[error("expected `key: value`")]
    NoColon,
    #[error("unknown directive `{0}`")]
    UnknownDirective(String),
    #[error("`{0}` given twice")]
    Repeated(&'static str),
    #[error("`{0}` line missing")]
    Missing(&'static str),
    #[error("`{0}` must come after the signature and carrier")]
    OutOfOrder(String),
    #[error("expected `name/arity`, found `{0}`")]
    BadSymbol(String),
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error("invalid element label `{0}`")]
    BadLabel(String),
    #[error("duplicate element label `{0}`")]
    DuplicateLabel(String),
    #[error("carrier is empty")]
    EmptyCarrier,
    #[error("unknown operation `{0}`")]
    UnknownOp(String),
    #[error("expected `args=value`, found `{0}`")]
    BadEntry(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("`{symbol}` takes {expected} argument(s), entry has {found}")]
    WrongArity {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("entry `{0}` given twice")]
    DuplicateEntry(String),
    #[error("operation `{symbol}` has no entry for `{args}`")]
    MissingEntry { symbol: String, args: String },
    #[error("no `op {0}:` line")]
    MissingOp(String),
    #[error("expected `lhs = rhs`")]
    NoEquals,
    #[error("{0}")]
    Term(ParseErrorKind),
    #[error("generating algebra `{0}` has a different signature")]
    GeneratorSignature(String),
    #[error("identity {index} of the variety fails in this generating algebra")]
    GeneratorViolates { index: usize },
}

/// A malformed file, with 1-based line and column.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct FormatError {
    pub line: usize,
    pub column: usize,
    pub kind: FormatErrorKind,
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Format { path: PathBuf, source: FormatError },
    #[error("{path}: {source}")]
    Variety { path: PathBuf, source: VarietyError },
}

/// Column of byte offset `at` within `line`, counting characters.
fn column(line: &str, at: usize) -> usize {
    line[..at].chars().count() + 1
}

/// Whitespace-separated tokens of `line[from..]` with their byte offsets.
fn tokens(line: &str, from: usize) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line[from..].char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((from + s, &line[from + s..from + i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((from + s, &line[from + s..]));
    }
    out
}

/// Lines with comments removed, paired with their 1-based numbers; blank
/// lines are dropped.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("");
        (!l.trim().is_empty()).then_some((i + 1, l))
    })
}

/// `key` and the byte offset where the value starts.
fn directive(line: &str) -> Option<(&str, usize)> {
    let colon = line.find(':')?;
    Some((line[..colon].trim(), colon + 1))
}

fn usable_label(s: &str) -> bool {
    !s.is_empty() && !s.contains([',', '=', ':', '#', '(', ')'])
}

fn parse_signature(line: &str, from: usize, ln: usize) -> Result<Signature, FormatError> {
    let err = |at: usize, kind| FormatError {
        line: ln,
        column: column(line, at),
        kind,
    };
    let mut symbols: Vec<(String, usize)> = Vec::new();
    for (at, tok) in tokens(line, from) {
        let parsed = tok
            .split_once('/')
            .and_then(|(n, a)| Some((n, a.parse::<usize>().ok()?)))
            .filter(|(n, _)| is_identifier(n));
        let Some((name, arity)) = parsed else {
            return Err(err(at, FormatErrorKind::BadSymbol(tok.into())));
        };
        if symbols.iter().any(|(n, _)| n == name) {
            return Err(err(at, SignatureError::Duplicate(name.into()).into()));
        }
        symbols.push((name.into(), arity));
    }
    Signature::new(symbols).map_err(|e| err(from, e.into()))
}

pub fn parse_algebra(text: &str) -> Result<FiniteAlgebra, FormatError> {
    let mut sig: Option<Signature> = None;
    let mut sig_line: Option<(usize, String, usize)> = None;
    let mut labels: Option<Vec<String>> = None;
    let mut tables: BTreeMap<usize, Vec<Option<usize>>> = BTreeMap::new();
    let mut op_lines: BTreeMap<usize, usize> = BTreeMap::new();
    for (ln, line) in content_lines(text) {
        let err = |at: usize, kind| FormatError {
            line: ln,
            column: column(line, at),
            kind,
        };
        let first = line.len() - line.trim_start().len();
        let Some((key, from)) = directive(line) else {
            return Err(err(first, FormatErrorKind::NoColon));
        };
        match key {
            "signature" => {
                if sig.is_some() {
                    return Err(err(first, FormatErrorKind::Repeated("signature")));
                }
                sig = Some(parse_signature(line, from, ln)?);
                sig_line = Some((ln, line.to_string(), from));
            }
            "carrier" => {
                if labels.is_some() {
                    return Err(err(first, FormatErrorKind::Repeated("carrier")));
                }
                let mut ls: Vec<String> = Vec::new();
                for (at, tok) in tokens(line, from) {
                    if !usable_label(tok) {
                        return Err(err(at, FormatErrorKind::BadLabel(tok.into())));
                    }
                    if ls.iter().any(|l| l == tok) {
                        return Err(err(at, FormatErrorKind::DuplicateLabel(tok.into())));
                    }
                    ls.push(tok.into());
                }
                if ls.is_empty() {
                    return Err(err(from, FormatErrorKind::EmptyCarrier));
                }
                labels = Some(ls);
            }
            k if k.starts_with("op ") || k == "op" => {
                let name = k[2..].trim();
                let (Some(sig), Some(labels)) = (&sig, &labels) else {
                    return Err(err(first, FormatErrorKind::OutOfOrder(k.into())));
                };
                let name_at = first + line[first..].find(name).unwrap_or(0);
                let Some(op) = sig.lookup(name) else {
                    return Err(err(name_at, FormatErrorKind::UnknownOp(name.into())));
                };
                if op_lines.contains_key(&op) {
                    return Err(err(first, FormatErrorKind::DuplicateEntry(format!("op {name}"))));
                }
                op_lines.insert(op, ln);
                let n = labels.len();
                let arity = sig.arity(op);
                let mut table = vec![None; n.pow(arity as u32)];
                for (at, tok) in tokens(line, from) {
                    let Some(eq) = tok.find('=') else {
                        return Err(err(at, FormatErrorKind::BadEntry(tok.into())));
                    };
                    let lookup = |s: &str, off: usize| {
                        labels
                            .iter()
                            .position(|l| l == s)
                            .ok_or_else(|| err(at + off, FormatErrorKind::UnknownElement(s.into())))
                    };
                    let lhs = &tok[..eq];
                    let mut args = Vec::new();
                    if !lhs.is_empty() {
                        let mut off = 0;
                        for part in lhs.split(',') {
                            args.push(lookup(part, off)?);
                            off += part.len() + 1;
                        }
                    }
                    if args.len() != arity {
                        return Err(err(
                            at,
                            FormatErrorKind::WrongArity {
                                symbol: name.into(),
                                expected: arity,
                                found: args.len(),
                            },
                        ));
                    }
                    let value = lookup(&tok[eq + 1..], eq + 1)?;
                    let idx = args.iter().fold(0, |acc, &a| acc * n + a);
                    if table[idx].replace(value).is_some() {
                        return Err(err(at, FormatErrorKind::DuplicateEntry(tok.into())));
                    }
                }
                tables.insert(op, table);
            }
            other => return Err(err(first, FormatErrorKind::UnknownDirective(other.into()))),
        }
    }
    let eof = |kind| FormatError {
        line: text.lines().count() + 1,
        column: 1,
        kind,
    };
    let sig = sig.ok_or_else(|| eof(FormatErrorKind::Missing("signature")))?;
    let labels = labels.ok_or_else(|| eof(FormatErrorKind::Missing("carrier")))?;
    let (sig_ln, sig_text, sig_from) = sig_line.unwrap();
    let n = labels.len();
    let mut out = Vec::with_capacity(sig.len());
    for op in 0..sig.len() {
        let name = sig.name(op);
        let Some(table) = tables.remove(&op) else {
            let at = sig_text[sig_from..].find(name).map_or(sig_from, |i| sig_from + i);
            return Err(FormatError {
                line: sig_ln,
                column: column(&sig_text, at),
                kind: FormatErrorKind::MissingOp(name.into()),
            });
        };
        let mut missing = None;
        let mut i = 0;
        for_each_tuple(n, sig.arity(op), |args| {
            if missing.is_none() && table[i].is_none() {
                missing = Some(args.iter().map(|&a| labels[a].as_str()).collect::<Vec<_>>().join(","));
            }
            i += 1;
        });
        if let Some(args) = missing {
            return Err(FormatError {
                line: op_lines[&op],
                column: 1,
                kind: FormatErrorKind::MissingEntry {
                    symbol: name.into(),
                    args,
                },
            });
        }
        out.push(table.into_iter().map(Option::unwrap).collect());
    }
    Ok(FiniteAlgebra::new(sig, labels, out).expect("validated while parsing"))
}

/// The algebra in file form. Parsing it back gives the same algebra when
/// every label is a valid file label.
pub fn write_algebra(alg: &FiniteAlgebra) -> String {
    let sig = alg.signature();
    let mut s = String::new();
    let symbols: Vec<String> = sig.symbols().iter().map(|s| format!("{}/{}", s.name, s.arity)).collect();
    let _ = writeln!(s, "signature: {}", symbols.join(" "));
    let _ = writeln!(s, "carrier: {}", alg.labels().join(" "));
    for op in 0..sig.len() {
        let mut entries = Vec::new();
        let mut i = 0;
        let table = alg.table(op);
        for_each_tuple(alg.size(), sig.arity(op), |args| {
            let lhs: Vec<&str> = args.iter().map(|&a| alg.label(a)).collect();
            entries.push(format!("{}={}", lhs.join(","), alg.label(table[i])));
            i += 1;
        });
        let _ = writeln!(s, "op {}: {}", sig.name(op), entries.join(" "));
    }
    s
}

/// A parsed variety file before its generating algebras are loaded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarietySpec {
    pub signature: Signature,
    pub identities: Vec<(Term, Term)>,
    /// Path as written, with the line and column it appeared at.
    pub generators: Vec<(usize, usize, String)>,
}

/// Identifiers in `s` that are not operation symbols, in order of first use.
pub fn variables(s: &str, sig: &Signature) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for word in s.split(|c: char| !(c.is_ascii_alphanumeric() || c == '_')) {
        if is_identifier(word) && sig.lookup(word).is_none() && !out.iter().any(|w| w == word) {
            out.push(word.into());
        }
    }
    out
}

pub fn parse_variety(text: &str) -> Result<VarietySpec, FormatError> {
    let mut sig: Option<Signature> = None;
    let mut identities = Vec::new();
    let mut generators = Vec::new();
    for (ln, line) in content_lines(text) {
        let err = |at: usize, kind| FormatError {
            line: ln,
            column: column(line, at),
            kind,
        };
        let first = line.len() - line.trim_start().len();
        let Some((key, from)) = directive(line) else {
            return Err(err(first, FormatErrorKind::NoColon));
        };
        match key {
            "signature" => {
                if sig.is_some() {
                    return Err(err(first, FormatErrorKind::Repeated("signature")));
                }
                sig = Some(parse_signature(line, from, ln)?);
            }
            "identity" => {
                let Some(sig) = &sig else {
                    return Err(err(first, FormatErrorKind::OutOfOrder(key.into())));
                };
                let Some(eq) = line[from..].find('=').map(|i| from + i) else {
                    return Err(err(from, FormatErrorKind::NoEquals));
                };
                let vars = variables(&line[from..], sig);
                let side = |start: usize, end: usize| {
                    let raw = &line[start..end];
                    let lead = raw.len() - raw.trim_start().len();
                    parse_term(raw.trim(), sig, &vars)
                        .map_err(|e| err(start + lead + e.offset.min(raw.trim().len()), FormatErrorKind::Term(e.kind)))
                };
                identities.push((side(from, eq)?, side(eq + 1, line.len())?));
            }
            "generator-algebra" => {
                let path = line[from..].trim();
                let at = from + line[from..].find(path).unwrap_or(0);
                if path.is_empty() {
                    return Err(err(from, FormatErrorKind::Missing("path")));
                }
                generators.push((ln, column(line, at), path.to_string()));
            }
            other => return Err(err(first, FormatErrorKind::UnknownDirective(other.into()))),
        }
    }
    let signature = sig.ok_or(FormatError {
        line: text.lines().count() + 1,
        column: 1,
        kind: FormatErrorKind::Missing("signature"),
    })?;
    Ok(VarietySpec {
        signature,
        identities,
        generators,
    })
}

fn read(path: &Path) -> Result<String, LoadError> {
    fs::read_to_string(path).map_err(|e| LoadError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "algebra".into(), |s| s.to_string_lossy().into_owned())
}

pub fn load_algebra(path: &Path) -> Result<FiniteAlgebra, LoadError> {
    parse_algebra(&read(path)?).map_err(|source| LoadError::Format {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads a variety; it is named after the file, and each generating algebra
/// after its own file.
pub fn load_variety(path: &Path) -> Result<Variety, LoadError> {
    let spec = parse_variety(&read(path)?).map_err(|source| LoadError::Format {
        path: path.to_path_buf(),
        source,
    })?;
    let dir = path.parent().unwrap_or(Path::new(""));
    let mut gens = Vec::new();
    for (line, column, rel) in &spec.generators {
        let gpath = dir.join(rel);
        let alg = load_algebra(&gpath)?;
        let at = |kind| LoadError::Format {
            path: path.to_path_buf(),
            source: FormatError {
                line: *line,
                column: *column,
                kind,
            },
        };
        if alg.signature() != &spec.signature {
            return Err(at(FormatErrorKind::GeneratorSignature(rel.clone())));
        }
        if let Some(index) = spec
            .identities
            .iter()
            .position(|(l, r)| simplext_core::variety::check_identity(&alg, l, r).is_err())
        {
            return Err(at(FormatErrorKind::GeneratorViolates { index }));
        }
        gens.push((stem(&gpath), alg));
    }
    Variety::new(stem(path), spec.signature, spec.identities, gens).map_err(|source| LoadError::Variety {
        path: path.to_path_buf(),
        source,
    })
}
