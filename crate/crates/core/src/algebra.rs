//! Finite algebras given by operation tables, and the basic machinery on them:
//! subalgebra closure, homomorphisms, congruences and quotients.
//!
//! Carrier elements are the indices `0..n`; labels live in a side table and are
//! only used for display and file formats.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::ops::ControlFlow;

use thiserror::Error;

use crate::term::{for_each_tuple, Signature};

/// Index of a carrier element.
pub type Elem = usize;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("carrier is empty")]
    EmptyCarrier,
    #[error("duplicate element label `{0}`")]
    DuplicateLabel(String),
    #[error("table for `{symbol}` has {found} entries, expected {expected}")]
    TableSize {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("table for `{symbol}` leaves the carrier (value {value})")]
    NotClosed { symbol: String, value: Elem },
    #[error("expected {expected} tables, found {found}")]
    TableCount { expected: usize, found: usize },
    #[error("subset is empty or not closed under the operations")]
    NotSubalgebra,
}

/// A finite algebra: a signature, a labelled carrier and one total table per symbol.
///
/// Tables are flat and row-major: the entry for `f(a_1, ..., a_k)` sits at
/// `sum(a_i * n^(k - i))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteAlgebra {
    sig: Signature,
    labels: Vec<String>,
    tables: Vec<Vec<Elem>>,
}

impl FiniteAlgebra {
    pub fn new(sig: Signature, labels: Vec<String>, tables: Vec<Vec<Elem>>) -> Result<Self, AlgebraError> {
        let n = labels.len();
        if n == 0 {
            return Err(AlgebraError::EmptyCarrier);
        }
        let mut seen = BTreeSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(AlgebraError::DuplicateLabel(l.clone()));
            }
        }
        if tables.len() != sig.len() {
            return Err(AlgebraError::TableCount {
                expected: sig.len(),
                found: tables.len(),
            });
        }
        for (s, table) in sig.symbols().iter().zip(&tables) {
            let expected = n.pow(s.arity as u32);
            if table.len() != expected {
                return Err(AlgebraError::TableSize {
                    symbol: s.name.clone(),
                    expected,
                    found: table.len(),
                });
            }
            if let Some(&value) = table.iter().find(|&&v| v >= n) {
                return Err(AlgebraError::NotClosed {
                    symbol: s.name.clone(),
                    value,
                });
            }
        }
        Ok(FiniteAlgebra { sig, labels, tables })
    }

    /// Builds the tables by calling `f(op, args)` on every argument tuple.
    pub fn from_fn(
        sig: Signature,
        labels: Vec<String>,
        mut f: impl FnMut(usize, &[Elem]) -> Elem,
    ) -> Result<Self, AlgebraError> {
        let n = labels.len();
        let tables = (0..sig.len())
            .map(|op| {
                let mut t = Vec::with_capacity(n.pow(sig.arity(op) as u32));
                for_each_tuple(n, sig.arity(op), |args| t.push(f(op, args)));
                t
            })
            .collect();
        FiniteAlgebra::new(sig, labels, tables)
    }

    /// Labels `0..n` as decimal strings.
    pub fn numeric_labels(n: usize) -> Vec<String> {
        (0..n).map(|i| i.to_string()).collect()
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, e: Elem) -> &str {
        &self.labels[e]
    }

    pub fn element(&self, label: &str) -> Option<Elem> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn table(&self, op: usize) -> &[Elem] {
        &self.tables[op]
    }

    pub fn tables(&self) -> &[Vec<Elem>] {
        &self.tables
    }

    #[inline]
    pub fn apply(&self, op: usize, args: &[Elem]) -> Elem {
        let n = self.size();
        let idx = args.iter().fold(0, |acc, &a| acc * n + a);
        self.tables[op][idx]
    }

    /// Values of the nullary symbols.
    pub fn constant_values(&self) -> Vec<Elem> {
        self.sig.constants().map(|c| self.tables[c][0]).collect()
    }

    pub fn with_labels(&self, labels: Vec<String>) -> Result<Self, AlgebraError> {
        FiniteAlgebra::new(self.sig.clone(), labels, self.tables.clone())
    }

    /// The subalgebra on a closed subset, with the embedding into `self`.
    ///
    /// Elements of the result follow the order of `subset` after sorting.
    pub fn restrict(&self, subset: &[Elem]) -> Result<(FiniteAlgebra, Vec<Elem>), AlgebraError> {
        let mut embed: Vec<Elem> = subset.to_vec();
        embed.sort_unstable();
        embed.dedup();
        if embed.is_empty() || embed.last().is_some_and(|&e| e >= self.size()) {
            return Err(AlgebraError::NotSubalgebra);
        }
        let mut pos = vec![usize::MAX; self.size()];
        for (i, &e) in embed.iter().enumerate() {
            pos[e] = i;
        }
        let labels = embed.iter().map(|&e| self.labels[e].clone()).collect();
        let mut closed = true;
        let sub = FiniteAlgebra::from_fn(self.sig.clone(), labels, |op, args| {
            let lifted: Vec<Elem> = args.iter().map(|&a| embed[a]).collect();
            let r = pos[self.apply(op, &lifted)];
            if r == usize::MAX {
                closed = false;
                0
            } else {
                r
            }
        })?;
        if !closed {
            return Err(AlgebraError::NotSubalgebra);
        }
        Ok((sub, embed))
    }

    /// Relabels element `e` as `perm[e]`.
    pub fn permute(&self, perm: &[Elem]) -> FiniteAlgebra {
        let n = self.size();
        let mut inv = vec![0; n];
        for (e, &p) in perm.iter().enumerate() {
            inv[p] = e;
        }
        let mut labels = vec![String::new(); n];
        for (e, &p) in perm.iter().enumerate() {
            labels[p] = self.labels[e].clone();
        }
        FiniteAlgebra::from_fn(self.sig.clone(), labels, |op, args| {
            let orig: Vec<Elem> = args.iter().map(|&a| inv[a]).collect();
            perm[self.apply(op, &orig)]
        })
        .expect("permutation of a valid algebra")
    }
}

/// Least subset containing `seed` and the constants, closed under every table.
///
/// Returned sorted.
pub fn subalgebra_closure(alg: &FiniteAlgebra, seed: &[Elem]) -> Vec<Elem> {
    let n = alg.size();
    let mut member = vec![false; n];
    let mut elems: Vec<Elem> = Vec::new();
    for &e in seed.iter().chain(alg.constant_values().iter()) {
        if !member[e] {
            member[e] = true;
            elems.push(e);
        }
    }
    let sig = alg.signature();
    // semi-naive: each round only looks at tuples touching an element added last round
    let mut old = 0;
    while old < elems.len() {
        let snapshot = elems.len();
        let mut fresh = Vec::new();
        for op in 0..sig.len() {
            let arity = sig.arity(op);
            if arity == 0 {
                continue;
            }
            for_each_tuple(snapshot, arity, |idx| {
                if idx.iter().all(|&i| i < old) {
                    return;
                }
                let args: Vec<Elem> = idx.iter().map(|&i| elems[i]).collect();
                let r = alg.apply(op, &args);
                if !member[r] {
                    member[r] = true;
                    fresh.push(r);
                }
            });
        }
        old = snapshot;
        elems.extend(fresh);
    }
    elems.sort_unstable();
    elems
}

/// Greedy generating set of the subalgebra `subset`: walk it in carrier order
/// and keep each element not yet generated by the earlier ones.
pub fn generating_set(alg: &FiniteAlgebra, subset: &[Elem]) -> Vec<Elem> {
    let mut sorted = subset.to_vec();
    sorted.sort_unstable();
    let mut gens = Vec::new();
    let mut covered = subalgebra_closure(alg, &[]);
    for e in sorted {
        if covered.binary_search(&e).is_err() {
            gens.push(e);
            covered = subalgebra_closure(alg, &gens);
        }
    }
    gens
}

/// All non-empty subalgebras, ordered by size and then lexicographically.
pub fn subalgebras(alg: &FiniteAlgebra) -> Vec<Vec<Elem>> {
    let mut found: BTreeSet<Vec<Elem>> = BTreeSet::new();
    let mut frontier: Vec<Vec<Elem>> = Vec::new();
    let base = subalgebra_closure(alg, &[]);
    if base.is_empty() {
        for e in 0..alg.size() {
            let s = subalgebra_closure(alg, &[e]);
            if found.insert(s.clone()) {
                frontier.push(s);
            }
        }
    } else {
        found.insert(base.clone());
        frontier.push(base);
    }
    while let Some(s) = frontier.pop() {
        for e in 0..alg.size() {
            if s.binary_search(&e).is_ok() {
                continue;
            }
            let mut seed = s.clone();
            seed.push(e);
            let t = subalgebra_closure(alg, &seed);
            if found.insert(t.clone()) {
                frontier.push(t);
            }
        }
    }
    let mut out: Vec<Vec<Elem>> = found.into_iter().collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// First place where a candidate map fails to preserve a table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub op: usize,
    pub args: Vec<Elem>,
}

pub fn is_homomorphism(map: &[Elem], dom: &FiniteAlgebra, cod: &FiniteAlgebra) -> Result<(), Violation> {
    assert_eq!(dom.signature(), cod.signature(), "signatures differ");
    assert_eq!(map.len(), dom.size(), "map must be total on the domain");
    let sig = dom.signature();
    for op in 0..sig.len() {
        let mut bad = None;
        let mut image = vec![0; sig.arity(op)];
        for_each_tuple(dom.size(), sig.arity(op), |args| {
            if bad.is_some() {
                return;
            }
            for (slot, &a) in image.iter_mut().zip(args) {
                *slot = map[a];
            }
            if map[dom.apply(op, args)] != cod.apply(op, &image) {
                bad = Some(args.to_vec());
            }
        });
        if let Some(args) = bad {
            return Err(Violation { op, args });
        }
    }
    Ok(())
}

/// Closes a partial map under the operations of `dom`.
///
/// Every tuple of mapped elements is pushed through both tables; unmapped
/// results get the forced image. Returns `false` on a conflict.
pub fn propagate(dom: &FiniteAlgebra, cod: &FiniteAlgebra, map: &mut [Option<Elem>]) -> bool {
    let sig = dom.signature();
    let mut order: Vec<Elem> = (0..dom.size()).filter(|&e| map[e].is_some()).collect();
    let mut processed = 0;
    let mut first = true;
    let mut image = Vec::new();
    let mut args = Vec::new();
    while first || processed < order.len() {
        let snapshot = order.len();
        for op in 0..sig.len() {
            let arity = sig.arity(op);
            if arity == 0 && !first {
                continue;
            }
            let mut ok = true;
            for_each_tuple(snapshot, arity, |idx| {
                if !ok || (arity > 0 && idx.iter().all(|&i| i < processed)) {
                    return;
                }
                args.clear();
                args.extend(idx.iter().map(|&i| order[i]));
                image.clear();
                image.extend(args.iter().map(|&a| map[a].unwrap()));
                let r = dom.apply(op, &args);
                let v = cod.apply(op, &image);
                match map[r] {
                    Some(w) => ok = w == v,
                    None => {
                        map[r] = Some(v);
                        order.push(r);
                    }
                }
            });
            if !ok {
                return false;
            }
        }
        first = false;
        processed = snapshot;
    }
    true
}

/// Visits every homomorphism `dom -> cod` agreeing with `partial`, in
/// lexicographic order of the image vector. The visitor may stop early.
pub fn for_each_extension<B>(
    dom: &FiniteAlgebra,
    cod: &FiniteAlgebra,
    partial: &[Option<Elem>],
    mut visit: impl FnMut(&[Elem]) -> ControlFlow<B>,
) -> Option<B> {
    let mut map = partial.to_vec();
    if !propagate(dom, cod, &mut map) {
        return None;
    }
    match search(dom, cod, map, &mut visit) {
        ControlFlow::Break(b) => Some(b),
        ControlFlow::Continue(()) => None,
    }
}

fn search<B>(
    dom: &FiniteAlgebra,
    cod: &FiniteAlgebra,
    map: Vec<Option<Elem>>,
    visit: &mut impl FnMut(&[Elem]) -> ControlFlow<B>,
) -> ControlFlow<B> {
    let Some(next) = map.iter().position(Option::is_none) else {
        let total: Vec<Elem> = map.into_iter().map(Option::unwrap).collect();
        return visit(&total);
    };
    for v in 0..cod.size() {
        let mut branch = map.clone();
        branch[next] = Some(v);
        if propagate(dom, cod, &mut branch) {
            search(dom, cod, branch, visit)?;
        }
    }
    ControlFlow::Continue(())
}

/// All homomorphisms `dom -> cod` in lexicographic order of their image vectors.
pub fn enumerate_homs(dom: &FiniteAlgebra, cod: &FiniteAlgebra) -> Vec<Vec<Elem>> {
    extensions(dom, cod, &vec![None; dom.size()])
}

/// All homomorphisms agreeing with a partial map.
pub fn extensions(dom: &FiniteAlgebra, cod: &FiniteAlgebra, partial: &[Option<Elem>]) -> Vec<Vec<Elem>> {
    let mut out = Vec::new();
    for_each_extension::<()>(dom, cod, partial, |h| {
        out.push(h.to_vec());
        ControlFlow::Continue(())
    });
    out
}

/// Some homomorphism agreeing with a partial map, if one exists.
pub fn first_extension(dom: &FiniteAlgebra, cod: &FiniteAlgebra, partial: &[Option<Elem>]) -> Option<Vec<Elem>> {
    for_each_extension(dom, cod, partial, |h| ControlFlow::Break(h.to_vec()))
}

pub fn is_injective(map: &[Elem]) -> bool {
    let set: BTreeSet<Elem> = map.iter().copied().collect();
    set.len() == map.len()
}

pub fn image(map: &[Elem]) -> Vec<Elem> {
    let set: BTreeSet<Elem> = map.iter().copied().collect();
    set.into_iter().collect()
}

/// A congruence stored as a canonical partition: blocks sorted internally and
/// ordered by their least element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Congruence {
    block_of: Vec<usize>,
    blocks: Vec<Vec<Elem>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CongruenceError {
    #[error("blocks do not partition the carrier")]
    NotPartition,
    #[error("partition is not compatible with `{symbol}`")]
    Incompatible { symbol: String },
}

impl Congruence {
    fn from_block_ids(ids: &[usize]) -> Congruence {
        let mut blocks: Vec<Vec<Elem>> = Vec::new();
        let mut renumber = vec![usize::MAX; ids.len()];
        let mut block_of = vec![0; ids.len()];
        for (e, &id) in ids.iter().enumerate() {
            if renumber[id] == usize::MAX {
                renumber[id] = blocks.len();
                blocks.push(Vec::new());
            }
            block_of[e] = renumber[id];
            blocks[renumber[id]].push(e);
        }
        Congruence { block_of, blocks }
    }

    pub fn identity(alg: &FiniteAlgebra) -> Congruence {
        Congruence::from_block_ids(&(0..alg.size()).collect::<Vec<_>>())
    }

    pub fn total(alg: &FiniteAlgebra) -> Congruence {
        Congruence::from_block_ids(&vec![0; alg.size()])
    }

    /// Validates a partition as a congruence of `alg`.
    pub fn from_blocks(alg: &FiniteAlgebra, blocks: &[Vec<Elem>]) -> Result<Congruence, CongruenceError> {
        let mut ids = vec![usize::MAX; alg.size()];
        for (b, block) in blocks.iter().enumerate() {
            for &e in block {
                if e >= alg.size() || ids[e] != usize::MAX {
                    return Err(CongruenceError::NotPartition);
                }
                ids[e] = b;
            }
        }
        if ids.contains(&usize::MAX) {
            return Err(CongruenceError::NotPartition);
        }
        let c = Congruence::from_block_ids(&ids);
        match c.incompatible_symbol(alg) {
            Some(op) => Err(CongruenceError::Incompatible {
                symbol: alg.signature().name(op).to_string(),
            }),
            None => Ok(c),
        }
    }

    fn incompatible_symbol(&self, alg: &FiniteAlgebra) -> Option<usize> {
        let sig = alg.signature();
        for op in 0..sig.len() {
            let mut ok = true;
            let mut swapped = Vec::new();
            for_each_tuple(alg.size(), sig.arity(op), |args| {
                if !ok {
                    return;
                }
                let r = self.block_of[alg.apply(op, args)];
                for i in 0..args.len() {
                    swapped.clear();
                    swapped.extend_from_slice(args);
                    swapped[i] = self.blocks[self.block_of[args[i]]][0];
                    if self.block_of[alg.apply(op, &swapped)] != r {
                        ok = false;
                        return;
                    }
                }
            });
            if !ok {
                return Some(op);
            }
        }
        None
    }

    pub fn is_compatible(&self, alg: &FiniteAlgebra) -> bool {
        self.incompatible_symbol(alg).is_none()
    }

    pub fn blocks(&self) -> &[Vec<Elem>] {
        &self.blocks
    }

    pub fn block_of(&self, e: Elem) -> usize {
        self.block_of[e]
    }

    pub fn related(&self, a: Elem, b: Elem) -> bool {
        self.block_of[a] == self.block_of[b]
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// `self` is contained in `other` as a relation.
    pub fn refines(&self, other: &Congruence) -> bool {
        self.blocks
            .iter()
            .all(|b| b.iter().all(|&e| other.related(b[0], e)))
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the two classes; the smaller root survives.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

/// Least congruence containing `pairs`: union-find plus saturation.
///
/// A full pass compares `f(t)` with `f(t')` where `t'` replaces one coordinate
/// of `t` by its class root; passes repeat until nothing merges.
pub fn congruence_generated(alg: &FiniteAlgebra, pairs: &[(Elem, Elem)]) -> Congruence {
    let n = alg.size();
    let mut uf = UnionFind::new(n);
    for &(a, b) in pairs {
        uf.union(a, b);
    }
    let sig = alg.signature();
    let mut swapped = Vec::new();
    loop {
        let mut merged = false;
        for op in 0..sig.len() {
            let arity = sig.arity(op);
            if arity == 0 {
                continue;
            }
            for_each_tuple(n, arity, |args| {
                let r = alg.apply(op, args);
                for i in 0..arity {
                    let root = uf.find(args[i]);
                    if root == args[i] {
                        continue;
                    }
                    swapped.clear();
                    swapped.extend_from_slice(args);
                    swapped[i] = root;
                    let s = alg.apply(op, &swapped);
                    merged |= uf.union(r, s);
                }
            });
        }
        if !merged {
            break;
        }
    }
    let ids: Vec<usize> = (0..n).map(|e| uf.find(e)).collect();
    Congruence::from_block_ids(&ids)
}

/// The factor algebra and its projection. Blocks are labelled by the label of
/// their least element.
pub fn quotient(alg: &FiniteAlgebra, c: &Congruence) -> (FiniteAlgebra, Vec<Elem>) {
    let labels = c.blocks().iter().map(|b| alg.label(b[0]).to_string()).collect();
    let q = FiniteAlgebra::from_fn(alg.signature().clone(), labels, |op, args| {
        let reps: Vec<Elem> = args.iter().map(|&a| c.blocks()[a][0]).collect();
        c.block_of(alg.apply(op, &reps))
    })
    .expect("quotient tables are well formed");
    let projection = (0..alg.size()).map(|e| c.block_of(e)).collect();
    (q, projection)
}

/// Kernel partition of a map.
pub fn kernel(map: &[Elem]) -> Congruence {
    Congruence::from_block_ids(map)
}
