//! Finite model search over operation tables, canonical forms and
//! isomorphism testing.
//!
//! The search fills table cells one at a time. Every identity instance waits
//! on the first undefined cell its evaluation touched and is re-evaluated when
//! that cell gets a value; an instance missing only its outermost cell forces
//! that cell. With isomorphism pruning on, values follow the least-number
//! heuristic: a cell may only take an element already in play or the next
//! unused one.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::ControlFlow;

use thiserror::Error;

use crate::algebra::{for_each_extension, Elem, FiniteAlgebra};
use crate::term::{for_each_tuple, Signature, Term};

/// Default cap on search nodes for a single model enumeration.
pub const DEFAULT_SEARCH_CAP: u64 = 50_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("model search exceeded the cap of {cap} nodes")]
    SearchCap { cap: u64 },
    #[error("size must be at least 1")]
    EmptyCarrier,
    #[error("identity uses unknown symbol `{0}`")]
    UnknownSymbol(alloc::string::String),
}

const UNSET: usize = usize::MAX;

#[derive(Debug)]
enum Node {
    Var(usize),
    Op(usize, Vec<Node>),
}

fn compile(t: &Term, sig: &Signature, vars: &mut Vec<alloc::string::String>) -> Result<Node, ModelError> {
    match t {
        Term::Gen(g) => {
            let i = match vars.iter().position(|v| v == g) {
                Some(i) => i,
                None => {
                    vars.push(g.clone());
                    vars.len() - 1
                }
            };
            Ok(Node::Var(i))
        }
        Term::App(op, args) => {
            let idx = sig
                .lookup(op)
                .ok_or_else(|| ModelError::UnknownSymbol(op.clone()))?;
            let args = args
                .iter()
                .map(|a| compile(a, sig, vars))
                .collect::<Result<_, _>>()?;
            Ok(Node::Op(idx, args))
        }
    }
}

struct Tables {
    n: usize,
    offsets: Vec<usize>,
    arity: Vec<usize>,
    cells: Vec<usize>,
}

impl Tables {
    fn cell(&self, op: usize, args: &[Elem]) -> usize {
        self.offsets[op] + args.iter().fold(0, |acc, &a| acc * self.n + a)
    }

    /// Maximum argument of a cell, `None` for constants.
    fn max_arg(&self, cell: usize) -> Option<usize> {
        let op = self.offsets.partition_point(|&o| o <= cell) - 1;
        let mut idx = cell - self.offsets[op];
        let mut best = None;
        for _ in 0..self.arity[op] {
            let a = idx % self.n;
            idx /= self.n;
            best = Some(best.map_or(a, |b: usize| b.max(a)));
        }
        best
    }

    /// On `Err`, the undefined cell evaluation ran into and whether it was
    /// the outermost application (all its arguments known).
    fn eval(&self, node: &Node, env: &[Elem]) -> Result<Elem, (usize, bool)> {
        match node {
            Node::Var(i) => Ok(env[*i]),
            Node::Op(op, args) => {
                let mut vals = [0usize; 8];
                let mut big = Vec::new();
                let vals: &mut [usize] = if args.len() <= 8 {
                    &mut vals[..args.len()]
                } else {
                    big.resize(args.len(), 0);
                    &mut big
                };
                for (slot, a) in vals.iter_mut().zip(args) {
                    *slot = self.eval(a, env).map_err(|(c, _)| (c, false))?;
                }
                let c = self.cell(*op, vals);
                match self.cells[c] {
                    UNSET => Err((c, true)),
                    v => Ok(v),
                }
            }
        }
    }
}

struct Instance {
    identity: usize,
    env: Vec<Elem>,
}

enum Check {
    Holds,
    Fails,
    Waits(usize),
    Forces(usize, Elem),
}

enum Undo {
    Set(usize),
    Took(usize, Vec<usize>),
    Moved(usize),
}

struct Search<'a> {
    sig: &'a Signature,
    tables: Tables,
    identities: Vec<(Node, Node)>,
    instances: Vec<Instance>,
    watch: Vec<Vec<usize>>,
    trail: Vec<Undo>,
    order: Vec<(usize, usize)>, // (cell, max argument or UNSET for constants)
    prune_iso: bool,
    nodes: u64,
    cap: u64,
    found: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn check(&self, inst: usize) -> Check {
        let Instance { identity, env } = &self.instances[inst];
        let (l, r) = &self.identities[*identity];
        match (self.tables.eval(l, env), self.tables.eval(r, env)) {
            (Ok(a), Ok(b)) if a == b => Check::Holds,
            (Ok(_), Ok(_)) => Check::Fails,
            (Ok(v), Err((c, true))) | (Err((c, true)), Ok(v)) => Check::Forces(c, v),
            (Err((c, true)), Err((d, true))) if c == d => Check::Holds,
            (Err((c, _)), _) | (_, Err((c, _))) => Check::Waits(c),
        }
    }

    fn set(&mut self, cell: usize, value: Elem, queue: &mut Vec<usize>) {
        self.tables.cells[cell] = value;
        self.trail.push(Undo::Set(cell));
        queue.push(cell);
    }

    /// Sets `cell` and everything the identities force from it. Returns the
    /// largest element mentioned by the cells set, or `None` on conflict; the
    /// caller undoes the trail in either case.
    fn assign(&mut self, cell: usize, value: Elem) -> Option<usize> {
        let mut queue = Vec::new();
        let mut mentioned = value;
        self.set(cell, value, &mut queue);
        while let Some(c) = queue.pop() {
            let waiting = core::mem::take(&mut self.watch[c]);
            self.trail.push(Undo::Took(c, waiting.clone()));
            for inst in waiting {
                match self.check(inst) {
                    Check::Holds => {}
                    Check::Fails => return None,
                    Check::Waits(d) => {
                        self.watch[d].push(inst);
                        self.trail.push(Undo::Moved(d));
                    }
                    Check::Forces(d, v) => {
                        mentioned = mentioned.max(v);
                        if let Some(a) = self.tables.max_arg(d) {
                            mentioned = mentioned.max(a);
                        }
                        self.set(d, v, &mut queue);
                    }
                }
            }
        }
        Some(mentioned)
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            match self.trail.pop().unwrap() {
                Undo::Set(c) => self.tables.cells[c] = UNSET,
                Undo::Took(c, list) => self.watch[c] = list,
                Undo::Moved(d) => {
                    self.watch[d].pop();
                }
            }
        }
    }

    fn all_hold(&self) -> bool {
        (0..self.instances.len()).all(|i| matches!(self.check(i), Check::Holds))
    }

    fn run(&mut self, mut pos: usize, max_used: Option<usize>) -> Result<(), ModelError> {
        self.nodes += 1;
        if self.nodes > self.cap {
            return Err(ModelError::SearchCap { cap: self.cap });
        }
        while pos < self.order.len() && self.tables.cells[self.order[pos].0] != UNSET {
            pos += 1;
        }
        if pos == self.order.len() {
            debug_assert!(self.all_hold());
            self.found.push(self.tables.cells.clone());
            return Ok(());
        }
        let (cell, max_arg) = self.order[pos];
        let n = self.tables.n;
        let mut used = max_used;
        if max_arg != UNSET {
            used = Some(used.map_or(max_arg, |u| u.max(max_arg)));
        }
        let limit = if self.prune_iso {
            used.map_or(1, |u| (u + 2).min(n))
        } else {
            n
        };
        for v in 0..limit {
            let mark = self.trail.len();
            if let Some(m) = self.assign(cell, v) {
                let next_used = Some(used.map_or(m, |u| u.max(m)));
                let r = self.run(pos + 1, next_used);
                self.undo_to(mark);
                r?;
            } else {
                self.undo_to(mark);
            }
        }
        Ok(())
    }
}

/// All algebras on `{0, .., size-1}` satisfying `identities`.
///
/// With `prune_iso` the result holds one canonical representative per
/// isomorphism class, sorted by canonical key; otherwise every labelled model
/// in lexicographic order of its tables.
pub fn enumerate_models(
    sig: &Signature,
    identities: &[(Term, Term)],
    size: usize,
    prune_iso: bool,
    cap: u64,
) -> Result<Vec<FiniteAlgebra>, ModelError> {
    if size == 0 {
        return Err(ModelError::EmptyCarrier);
    }
    let n = size;
    let mut offsets = Vec::with_capacity(sig.len());
    let mut total = 0;
    for s in sig.symbols() {
        offsets.push(total);
        total += n.pow(s.arity as u32);
    }
    let arity: Vec<usize> = sig.symbols().iter().map(|s| s.arity).collect();
    let tables = Tables {
        n,
        offsets,
        arity,
        cells: vec![UNSET; total],
    };

    let mut compiled = Vec::new();
    let mut instances = Vec::new();
    for (i, (l, r)) in identities.iter().enumerate() {
        let mut vars = Vec::new();
        let l = compile(l, sig, &mut vars)?;
        let r = compile(r, sig, &mut vars)?;
        for_each_tuple(n, vars.len(), |env| {
            instances.push(Instance {
                identity: i,
                env: env.to_vec(),
            })
        });
        compiled.push((l, r));
    }

    // constants first, then cells grouped by their largest argument
    let mut order: Vec<(usize, usize)> = Vec::new();
    for op in sig.constants() {
        order.push((tables.offsets[op], UNSET));
    }
    for k in 0..n {
        for op in 0..sig.len() {
            if tables.arity[op] == 0 {
                continue;
            }
            for_each_tuple(n, tables.arity[op], |args| {
                if args.iter().copied().max() == Some(k) {
                    order.push((tables.cell(op, args), k));
                }
            });
        }
    }

    let mut search = Search {
        sig,
        tables,
        identities: compiled,
        instances,
        watch: vec![Vec::new(); total],
        trail: Vec::new(),
        order,
        prune_iso,
        nodes: 0,
        cap,
        found: Vec::new(),
    };
    let mut forced = Vec::new();
    for inst in 0..search.instances.len() {
        match search.check(inst) {
            Check::Holds => {}
            Check::Fails => return Ok(Vec::new()),
            Check::Waits(c) => search.watch[c].push(inst),
            Check::Forces(c, v) => forced.push((c, v)),
        }
    }
    let mut used = None;
    for (c, v) in forced {
        match search.tables.cells[c] {
            UNSET => {
                let Some(m) = search.assign(c, v) else {
                    return Ok(Vec::new());
                };
                let m = search.tables.max_arg(c).map_or(m, |a| a.max(m));
                used = Some(used.map_or(m, |u: usize| u.max(m)));
            }
            w if w == v => {}
            _ => return Ok(Vec::new()),
        }
    }
    search.run(0, used)?;

    let labels = FiniteAlgebra::numeric_labels(n);
    let to_algebra = |cells: &[usize]| {
        let tables = (0..sig.len())
            .map(|op| {
                let start = search.tables.offsets[op];
                cells[start..start + n.pow(search.tables.arity[op] as u32)].to_vec()
            })
            .collect();
        FiniteAlgebra::new(search.sig.clone(), labels.clone(), tables).expect("complete tables")
    };
    let mut models: Vec<FiniteAlgebra> = search.found.iter().map(|c| to_algebra(c)).collect();
    if prune_iso {
        let mut classes: BTreeMap<Vec<Elem>, FiniteAlgebra> = BTreeMap::new();
        for m in models {
            let (perm, key) = canonical_form(&m);
            classes.entry(key).or_insert_with(|| {
                m.permute(&perm)
                    .with_labels(labels.clone())
                    .expect("numeric labels")
            });
        }
        models = classes.into_values().collect();
    }
    Ok(models)
}

/// Iso-invariant colouring by iterated refinement. Colours are ranks of
/// invariant signatures, so isomorphic algebras get matching colourings.
fn refine_colours(alg: &FiniteAlgebra) -> Vec<usize> {
    let n = alg.size();
    let sig = alg.signature();
    let mut colour = vec![0usize; n];
    let mut classes = 1;
    loop {
        let mut keys: Vec<Vec<usize>> = Vec::with_capacity(n);
        for e in 0..n {
            let mut key = vec![colour[e]];
            for op in 0..sig.len() {
                match sig.arity(op) {
                    0 => key.push(usize::from(alg.apply(op, &[]) == e)),
                    1 => key.push(colour[alg.apply(op, &[e])]),
                    2 => {
                        key.push(colour[alg.apply(op, &[e, e])]);
                        let mut around: Vec<(usize, usize, usize)> = (0..n)
                            .map(|y| {
                                (
                                    colour[y],
                                    colour[alg.apply(op, &[e, y])],
                                    colour[alg.apply(op, &[y, e])],
                                )
                            })
                            .collect();
                        around.sort_unstable();
                        for (a, b, c) in around {
                            key.extend([a, b, c]);
                        }
                    }
                    k => key.push(colour[alg.apply(op, &vec![e; k])]),
                }
            }
            keys.push(key);
        }
        let mut distinct = keys.clone();
        distinct.sort();
        distinct.dedup();
        colour = keys
            .iter()
            .map(|k| distinct.binary_search(k).unwrap())
            .collect();
        if distinct.len() == classes {
            return colour;
        }
        classes = distinct.len();
    }
}

/// Canonical relabelling and key: the lexicographically least table encoding
/// among relabellings that place colour classes in colour order.
///
/// Returns `(perm, key)` where `perm[e]` is the new index of `e`.
pub fn canonical_form(alg: &FiniteAlgebra) -> (Vec<Elem>, Vec<Elem>) {
    let n = alg.size();
    let colour = refine_colours(alg);
    let mut by_colour: BTreeMap<usize, Vec<Elem>> = BTreeMap::new();
    for (e, &c) in colour.iter().enumerate() {
        by_colour.entry(c).or_default().push(e);
    }
    let groups: Vec<Vec<Elem>> = by_colour.into_values().collect();

    let mut best: Option<(Vec<Elem>, Vec<Elem>)> = None;
    let mut perm = vec![0; n];
    let mut groups_perm: Vec<Vec<Elem>> = groups.clone();
    permute_groups(&mut groups_perm, 0, &mut |gs| {
        let mut pos = 0;
        for g in gs {
            for &e in g {
                perm[e] = pos;
                pos += 1;
            }
        }
        let key = encode(alg, &perm);
        if best.as_ref().is_none_or(|(_, k)| key < *k) {
            best = Some((perm.clone(), key));
        }
    });
    best.expect("at least one relabelling")
}

fn encode(alg: &FiniteAlgebra, perm: &[Elem]) -> Vec<Elem> {
    let n = alg.size();
    let mut inv = vec![0; n];
    for (e, &p) in perm.iter().enumerate() {
        inv[p] = e;
    }
    let sig = alg.signature();
    let mut key = Vec::new();
    let mut orig = Vec::new();
    for op in 0..sig.len() {
        for_each_tuple(n, sig.arity(op), |args| {
            orig.clear();
            orig.extend(args.iter().map(|&a| inv[a]));
            key.push(perm[alg.apply(op, &orig)]);
        });
    }
    key
}

fn permute_groups(groups: &mut [Vec<Elem>], i: usize, f: &mut impl FnMut(&[Vec<Elem>])) {
    if i == groups.len() {
        f(groups);
        return;
    }
    let len = groups[i].len();
    heap_permutations(groups, i, len, f);
}

fn heap_permutations(groups: &mut [Vec<Elem>], i: usize, k: usize, f: &mut impl FnMut(&[Vec<Elem>])) {
    if k <= 1 {
        permute_groups(groups, i + 1, f);
        return;
    }
    for j in 0..k {
        heap_permutations(groups, i, k - 1, f);
        if k.is_multiple_of(2) {
            groups[i].swap(j, k - 1);
        } else {
            groups[i].swap(0, k - 1);
        }
    }
}

/// An isomorphism `a -> b`, if one exists.
pub fn isomorphism(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Option<Vec<Elem>> {
    if a.size() != b.size() || a.signature() != b.signature() {
        return None;
    }
    for_each_extension(a, b, &vec![None; a.size()], |h| {
        if crate::algebra::is_injective(h) {
            ControlFlow::Break(h.to_vec())
        } else {
            ControlFlow::Continue(())
        }
    })
}

pub fn is_isomorphic(a: &FiniteAlgebra, b: &FiniteAlgebra) -> bool {
    isomorphism(a, b).is_some()
}

pub fn automorphism_count(a: &FiniteAlgebra) -> usize {
    let mut count = 0;
    for_each_extension::<()>(a, a, &vec![None; a.size()], |h| {
        if crate::algebra::is_injective(h) {
            count += 1;
        }
        ControlFlow::Continue(())
    });
    count
}
