//! Simple extensions `A(A0) ⊔ a`, their extension conditions, continuation of
//! homomorphisms and the quotient construction of an extension from a
//! condition set.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::algebra::{
    congruence_generated, is_homomorphism, is_injective, propagate, quotient, subalgebra_closure, Elem,
    FiniteAlgebra,
};
use crate::term::{enumerate_terms, eval_term, for_each_tuple, is_identifier, substitute, Assignment, Term, TermError};
use crate::variety::{free_algebra, Variety, VarietyError};
use crate::window::{saturate, Window};

/// The reserved extension variable.
pub const DEFAULT_VAR: &str = "x";

/// Cap on profiles kept by a condition window.
pub const DEFAULT_WINDOW_CAP: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ExtensionError {
    #[error("`{0}` is not a usable generator name")]
    BadGeneratorName(String),
    #[error("element {0} is outside the carrier")]
    OutsideCarrier(Elem),
    #[error("the base generators and the extension element do not generate the ambient algebra")]
    NotGenerating,
    #[error("base map has {found} entries, expected {expected}")]
    BaseMapLength { expected: usize, found: usize },
    #[error("base map is not a homomorphism on the base subalgebra")]
    BaseNotHom,
    #[error("map is not onto the target subalgebra")]
    NotSurjective,
    #[error("signatures differ")]
    SignatureMismatch,
    #[error("condition does not mention `{0}`")]
    MissingVariable(String),
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Variety(#[from] VarietyError),
}

/// A finite algebra generated by named base generators together with one
/// distinguished element. The base generators generate the base subalgebra
/// `A`; the extension element may or may not lie in `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleExtension {
    ambient: FiniteAlgebra,
    base_gens: Vec<(String, Elem)>,
    ext_elem: Elem,
    var: String,
    base: Vec<Elem>,
}

impl SimpleExtension {
    pub fn new(ambient: FiniteAlgebra, base_gens: Vec<(String, Elem)>, ext_elem: Elem) -> Result<Self, ExtensionError> {
        Self::with_var(ambient, base_gens, ext_elem, DEFAULT_VAR)
    }

    pub fn with_var(
        ambient: FiniteAlgebra,
        base_gens: Vec<(String, Elem)>,
        ext_elem: Elem,
        var: &str,
    ) -> Result<Self, ExtensionError> {
        let sig = ambient.signature();
        if !is_identifier(var) || sig.lookup(var).is_some() {
            return Err(ExtensionError::BadGeneratorName(var.into()));
        }
        for (i, (name, e)) in base_gens.iter().enumerate() {
            if !is_identifier(name)
                || sig.lookup(name).is_some()
                || name == var
                || base_gens[..i].iter().any(|(n, _)| n == name)
            {
                return Err(ExtensionError::BadGeneratorName(name.clone()));
            }
            if *e >= ambient.size() {
                return Err(ExtensionError::OutsideCarrier(*e));
            }
        }
        if ext_elem >= ambient.size() {
            return Err(ExtensionError::OutsideCarrier(ext_elem));
        }
        let mut seed: Vec<Elem> = base_gens.iter().map(|(_, e)| *e).collect();
        let base = subalgebra_closure(&ambient, &seed);
        if base.is_empty() {
            // no generators and no constants: the base subalgebra would be empty
            return Err(ExtensionError::NotGenerating);
        }
        seed.push(ext_elem);
        if subalgebra_closure(&ambient, &seed).len() != ambient.size() {
            return Err(ExtensionError::NotGenerating);
        }
        Ok(SimpleExtension {
            ambient,
            base_gens,
            ext_elem,
            var: var.into(),
            base,
        })
    }

    /// The extension generated inside `member` by `base_gens` and `a`,
    /// together with its embedding into `member`.
    pub fn realize(
        member: &FiniteAlgebra,
        base_gens: Vec<(String, Elem)>,
        a: Elem,
    ) -> Result<(Self, Vec<Elem>), ExtensionError> {
        if let Some(&(_, e)) = base_gens.iter().find(|(_, e)| *e >= member.size()) {
            return Err(ExtensionError::OutsideCarrier(e));
        }
        if a >= member.size() {
            return Err(ExtensionError::OutsideCarrier(a));
        }
        let mut seed: Vec<Elem> = base_gens.iter().map(|(_, e)| *e).collect();
        seed.push(a);
        let closure = subalgebra_closure(member, &seed);
        let (ambient, embed) = member.restrict(&closure).map_err(|_| ExtensionError::NotGenerating)?;
        let local = |e: Elem| closure.binary_search(&e).unwrap();
        let gens = base_gens.into_iter().map(|(n, e)| (n, local(e))).collect();
        let ext = Self::new(ambient, gens, local(a))?;
        Ok((ext, embed))
    }

    pub fn ambient(&self) -> &FiniteAlgebra {
        &self.ambient
    }

    pub fn base_gens(&self) -> &[(String, Elem)] {
        &self.base_gens
    }

    pub fn ext_elem(&self) -> Elem {
        self.ext_elem
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    /// The base subalgebra `A`, as sorted ambient elements.
    pub fn base(&self) -> &[Elem] {
        &self.base
    }

    /// Whether the extension element already lies in `A`.
    pub fn is_degenerate(&self) -> bool {
        self.base.binary_search(&self.ext_elem).is_ok()
    }

    /// `A` as an algebra of its own (elements in ambient order) with its
    /// embedding into the ambient algebra.
    pub fn base_algebra(&self) -> (FiniteAlgebra, Vec<Elem>) {
        self.ambient.restrict(&self.base).expect("base is a subalgebra")
    }

    pub fn generator_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self.base_gens.iter().map(|(n, _)| n.clone()).collect();
        names.push(self.var.clone());
        names
    }

    /// Base generators and the variable, sent to their ambient elements.
    pub fn assignment(&self) -> Assignment {
        self.target_assignment(&self.base_images(), self.ext_elem)
    }

    fn base_images(&self) -> Vec<Elem> {
        self.base_gens.iter().map(|(_, e)| *e).collect()
    }

    /// Base generators sent by `base_map` and the variable sent to `b`.
    pub fn target_assignment(&self, base_map: &[Elem], b: Elem) -> Assignment {
        let mut asg: Assignment = self
            .base_gens
            .iter()
            .zip(base_map)
            .map(|((n, _), &e)| (n.clone(), e))
            .collect();
        asg.insert(self.var.clone(), b);
        asg
    }

    /// Position of an ambient element inside `base()`.
    pub fn base_index(&self, e: Elem) -> Option<usize> {
        self.base.binary_search(&e).ok()
    }

    /// The homomorphism `A -> target` fixed by `base_map` on the generators,
    /// as a partial map on the ambient carrier.
    fn base_hom(&self, target: &FiniteAlgebra, base_map: &[Elem]) -> Result<Vec<Option<Elem>>, ExtensionError> {
        if self.ambient.signature() != target.signature() {
            return Err(ExtensionError::SignatureMismatch);
        }
        if base_map.len() != self.base_gens.len() {
            return Err(ExtensionError::BaseMapLength {
                expected: self.base_gens.len(),
                found: base_map.len(),
            });
        }
        if let Some(&e) = base_map.iter().find(|&&e| e >= target.size()) {
            return Err(ExtensionError::OutsideCarrier(e));
        }
        let mut partial = vec![None; self.ambient.size()];
        for ((_, a), &t) in self.base_gens.iter().zip(base_map) {
            if partial[*a].is_some_and(|prev| prev != t) {
                return Err(ExtensionError::BaseNotHom);
            }
            partial[*a] = Some(t);
        }
        if !propagate(&self.ambient, target, &mut partial) {
            return Err(ExtensionError::BaseNotHom);
        }
        Ok(partial)
    }
}

fn apply_refs(alg: &FiniteAlgebra, op: usize, args: &[&Elem]) -> Elem {
    let mut buf = [0usize; 8];
    if args.len() <= buf.len() {
        for (slot, a) in buf.iter_mut().zip(args) {
            *slot = **a;
        }
        alg.apply(op, &buf[..args.len()])
    } else {
        let v: Vec<Elem> = args.iter().map(|a| **a).collect();
        alg.apply(op, &v)
    }
}

/// A pair of terms over the base generators and the variable, at least one of
/// which mentions the variable.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExtensionCondition {
    pub lhs: Term,
    pub rhs: Term,
}

impl ExtensionCondition {
    pub fn new(lhs: Term, rhs: Term, var: &str) -> Result<Self, ExtensionError> {
        if !lhs.mentions(var) && !rhs.mentions(var) {
            return Err(ExtensionError::MissingVariable(var.into()));
        }
        Ok(ExtensionCondition { lhs, rhs })
    }
}

impl fmt::Display for ExtensionCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

/// Renames base generators to terms on the other side and the variable to
/// the other side's variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransportMap {
    pub images: BTreeMap<String, Term>,
    pub x_source: String,
    pub x_target: String,
}

impl TransportMap {
    pub fn apply(&self, t: &Term) -> Term {
        let mut binding = self.images.clone();
        binding.insert(self.x_source.clone(), Term::gen(self.x_target.as_str()));
        substitute(t, &binding)
    }

    pub fn apply_condition(&self, c: &ExtensionCondition) -> ExtensionCondition {
        ExtensionCondition {
            lhs: self.apply(&c.lhs),
            rhs: self.apply(&c.rhs),
        }
    }
}

pub fn condition_holds(ext: &SimpleExtension, c: &ExtensionCondition) -> Result<bool, TermError> {
    let asg = ext.assignment();
    Ok(eval_term(&c.lhs, &ext.ambient, &asg)? == eval_term(&c.rhs, &ext.ambient, &asg)?)
}

/// Every condition of the extension among terms of height at most `depth`:
/// pairs `(w, w')` with `w` before `w'` in enumeration order, at least one
/// mentioning the variable, that hold in the ambient algebra.
pub fn enumerate_conditions(ext: &SimpleExtension, depth: usize, cap: usize) -> Result<Vec<ExtensionCondition>, TermError> {
    let names = ext.generator_names();
    let terms = enumerate_terms(ext.ambient.signature(), &names, depth, cap)?;
    let asg = ext.assignment();
    let vals = terms
        .iter()
        .map(|t| eval_term(t, &ext.ambient, &asg))
        .collect::<Result<Vec<_>, _>>()?;
    let has_x: Vec<bool> = terms.iter().map(|t| t.mentions(&ext.var)).collect();
    let mut out = Vec::new();
    for i in 0..terms.len() {
        for j in i + 1..terms.len() {
            if vals[i] == vals[j] && (has_x[i] || has_x[j]) {
                if out.len() >= cap {
                    return Err(TermError::CapExceeded { cap });
                }
                out.push(ExtensionCondition {
                    lhs: terms[i].clone(),
                    rhs: terms[j].clone(),
                });
            }
        }
    }
    Ok(out)
}

/// Outcome of checking a condition list.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Satisfaction {
    Satisfied,
    /// Index of the first violated condition.
    Violated(usize),
}

impl Satisfaction {
    pub fn is_satisfied(self) -> bool {
        self == Satisfaction::Satisfied
    }
}

/// Whether `b` satisfies every condition when the base generators are sent
/// by `base_map` and the variable `var` to `b`.
pub fn satisfies_conditions(
    target: &FiniteAlgebra,
    base_map: &Assignment,
    var: &str,
    b: Elem,
    conds: &[ExtensionCondition],
) -> Result<Satisfaction, TermError> {
    if b >= target.size() {
        return Err(TermError::OutOfCarrier(b));
    }
    let mut asg = base_map.clone();
    asg.insert(var.into(), b);
    for (i, c) in conds.iter().enumerate() {
        if eval_term(&c.lhs, target, &asg)? != eval_term(&c.rhs, target, &asg)? {
            return Ok(Satisfaction::Violated(i));
        }
    }
    Ok(Satisfaction::Satisfied)
}

/// The homomorphism `ambient -> target` that sends the base generators by
/// `base_map` and the extension element to `b`, if there is one. It is unique
/// because the ambient algebra is generated by those elements.
pub fn extends_to_hom(
    ext: &SimpleExtension,
    target: &FiniteAlgebra,
    base_map: &[Elem],
    b: Elem,
) -> Result<Option<Vec<Elem>>, ExtensionError> {
    if b >= target.size() {
        return Err(ExtensionError::OutsideCarrier(b));
    }
    let mut partial = ext.base_hom(target, base_map)?;
    match partial[ext.ext_elem] {
        Some(prev) if prev != b => return Ok(None),
        _ => partial[ext.ext_elem] = Some(b),
    }
    if !propagate(&ext.ambient, target, &mut partial) {
        return Ok(None);
    }
    let map: Vec<Elem> = partial
        .into_iter()
        .map(|e| e.expect("generators determine the whole map"))
        .collect();
    debug_assert!(is_homomorphism(&map, &ext.ambient, target).is_ok());
    Ok(Some(map))
}

/// Profile of a term in a condition window: ambient value, whether the
/// variable occurs, and the value in the target for every candidate `b`.
pub type ConditionProfile = (Elem, bool, Vec<Elem>);

/// The bounded condition set of an extension, evaluated against every
/// candidate element of one target at once.
///
/// Two terms of the same profile agree on every question the bounded
/// condition set can ask, so one representative per profile suffices.
#[derive(Clone, Debug)]
pub struct ConditionWindow {
    window: Window<ConditionProfile>,
    var: String,
    target_size: usize,
}

impl ConditionWindow {
    /// `depth = None` saturates until the profile set is closed, which
    /// covers terms of every height.
    pub fn new(
        ext: &SimpleExtension,
        target: &FiniteAlgebra,
        base_map: &[Elem],
        depth: Option<usize>,
    ) -> Result<Self, ExtensionError> {
        // audits the base map before any conditions are read off
        ext.base_hom(target, base_map)?;
        let n = target.size();
        let mut leaves: Vec<(Term, ConditionProfile)> = ext
            .base_gens
            .iter()
            .zip(base_map)
            .map(|((name, a), &t)| (Term::gen(name.as_str()), (*a, false, vec![t; n])))
            .collect();
        leaves.push((Term::gen(ext.var.as_str()), (ext.ext_elem, true, (0..n).collect())));
        let amb = &ext.ambient;
        let mut buf = Vec::new();
        let window = saturate(
            amb.signature(),
            leaves,
            |op, args: &[&ConditionProfile]| {
                buf.clear();
                buf.extend(args.iter().map(|p| p.0));
                let a = amb.apply(op, &buf);
                let has_x = args.iter().any(|p| p.1);
                let vals = (0..n)
                    .map(|b| {
                        buf.clear();
                        buf.extend(args.iter().map(|p| p.2[b]));
                        target.apply(op, &buf)
                    })
                    .collect();
                (a, has_x, vals)
            },
            depth,
            DEFAULT_WINDOW_CAP,
        )?;
        Ok(ConditionWindow {
            window,
            var: ext.var.clone(),
            target_size: n,
        })
    }

    pub fn window(&self) -> &Window<ConditionProfile> {
        &self.window
    }

    /// Whether deeper windows would read off the same verdicts.
    pub fn is_stable(&self) -> bool {
        self.window.is_stable()
    }

    /// Representative pairs per ambient class: the first variable-mentioning
    /// representative against every other representative of its class. An
    /// element satisfies these iff it satisfies the whole bounded set.
    pub fn reduced_conditions(&self) -> Vec<ExtensionCondition> {
        let mut out = Vec::new();
        for (anchor, others) in self.classes() {
            for j in others {
                out.push(ExtensionCondition {
                    lhs: self.window.term(anchor).clone(),
                    rhs: self.window.term(j).clone(),
                });
            }
        }
        out
    }

    fn classes(&self) -> Vec<(usize, Vec<usize>)> {
        let mut by_value: BTreeMap<Elem, Vec<usize>> = BTreeMap::new();
        for (i, p) in self.window.profiles().iter().enumerate() {
            by_value.entry(p.0).or_default().push(i);
        }
        let profiles = self.window.profiles();
        by_value
            .into_values()
            .filter_map(|members| {
                let anchor = *members.iter().find(|&&i| profiles[i].1)?;
                let others = members.into_iter().filter(|&i| i != anchor).collect();
                Some((anchor, others))
            })
            .collect()
    }

    /// A condition of the window violated at `b`, if any.
    pub fn violation(&self, b: Elem) -> Option<ExtensionCondition> {
        assert!(b < self.target_size, "candidate outside the target");
        let profiles = self.window.profiles();
        for (anchor, others) in self.classes() {
            for j in others {
                if profiles[anchor].2[b] != profiles[j].2[b] {
                    return Some(ExtensionCondition {
                        lhs: self.window.term(anchor).clone(),
                        rhs: self.window.term(j).clone(),
                    });
                }
            }
        }
        None
    }

    /// Candidates satisfying the bounded condition set.
    pub fn satisfying(&self) -> Vec<Elem> {
        (0..self.target_size)
            .filter(|&b| self.violation(b).is_none())
            .collect()
    }

    pub fn var(&self) -> &str {
        &self.var
    }
}

/// A violated condition of height at most `depth` at `b`, or `None` when `b`
/// satisfies the whole bounded condition set.
pub fn bounded_violation(
    ext: &SimpleExtension,
    target: &FiniteAlgebra,
    base_map: &[Elem],
    b: Elem,
    depth: usize,
) -> Result<Option<ExtensionCondition>, ExtensionError> {
    if b >= target.size() {
        return Err(ExtensionError::OutsideCarrier(b));
    }
    Ok(ConditionWindow::new(ext, target, base_map, Some(depth))?.violation(b))
}

/// Shortest representative term over the base generators of `target` for
/// every element of its base subalgebra.
fn base_representatives(target: &SimpleExtension) -> BTreeMap<Elem, Term> {
    let leaves = target
        .base_gens
        .iter()
        .map(|(n, e)| (Term::gen(n.as_str()), *e))
        .collect();
    let amb = &target.ambient;
    let w = saturate(amb.signature(), leaves, |op, a| apply_refs(amb, op, a), None, usize::MAX).expect("uncapped");
    w.iter().map(|(&e, t)| (e, t.clone())).collect()
}

/// The transport of an extension's conditions along `g : A -> B`, where `B`
/// is the base of `target` and `g[i]` is the image of `ext.base()[i]`.
pub fn transport_map(ext: &SimpleExtension, target: &SimpleExtension, g: &[Elem]) -> Result<TransportMap, ExtensionError> {
    let reps = base_representatives(target);
    let mut images = BTreeMap::new();
    for (name, a) in &ext.base_gens {
        let i = ext.base_index(*a).expect("generators lie in the base");
        let t = reps.get(&g[i]).ok_or(ExtensionError::NotSurjective)?;
        images.insert(name.clone(), t.clone());
    }
    Ok(TransportMap {
        images,
        x_source: ext.var.clone(),
        x_target: target.var.clone(),
    })
}

fn check_base_map(ext: &SimpleExtension, target: &SimpleExtension, g: &[Elem]) -> Result<(), ExtensionError> {
    if ext.ambient.signature() != target.ambient.signature() {
        return Err(ExtensionError::SignatureMismatch);
    }
    if g.len() != ext.base.len() {
        return Err(ExtensionError::BaseMapLength {
            expected: ext.base.len(),
            found: g.len(),
        });
    }
    if g.iter().any(|&e| target.base_index(e).is_none()) {
        return Err(ExtensionError::NotSurjective);
    }
    let onto: BTreeSet<Elem> = g.iter().copied().collect();
    if onto.len() != target.base.len() {
        return Err(ExtensionError::NotSurjective);
    }
    let (a, _) = ext.base_algebra();
    let (b, _) = target.base_algebra();
    let local: Vec<Elem> = g.iter().map(|&e| target.base_index(e).unwrap()).collect();
    is_homomorphism(&local, &a, &b).map_err(|_| ExtensionError::BaseNotHom)
}

/// Bounded continuation criterion: every condition of `ext` up to `depth`,
/// transported along `g`, holds in `target` at its extension element.
///
/// The conditions are the reduced set of a window read against the target
/// ambient algebra, which is equivalent there to the full bounded set.
pub fn prop1_check(ext: &SimpleExtension, target: &SimpleExtension, g: &[Elem], depth: usize) -> Result<bool, ExtensionError> {
    check_base_map(ext, target, g)?;
    let t = transport_map(ext, target, g)?;
    let base_map: Vec<Elem> = ext
        .base_gens
        .iter()
        .map(|(_, a)| g[ext.base_index(*a).unwrap()])
        .collect();
    let window = ConditionWindow::new(ext, &target.ambient, &base_map, Some(depth))?;
    for c in window.reduced_conditions() {
        if !condition_holds(target, &t.apply_condition(&c))? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The extension of `B` built from the conditions of `ext` by the quotient
/// construction.
#[derive(Clone, Debug)]
pub struct Prop2Output {
    /// `B ⊔ x`, with the base generators of `ext` sent to the images of
    /// their `g`-values and `x̄` as extension element.
    pub extension: SimpleExtension,
    /// `B -> B ⊔ x`, indexed by elements of `B`.
    pub embedding: Vec<Elem>,
    /// Size of the free algebra the quotient was taken of.
    pub free_size: usize,
}

impl Prop2Output {
    pub fn x_bar(&self) -> Elem {
        self.extension.ext_elem
    }
}

/// Builds `B ⊔ x` as the free algebra of `v` on the base generators of `ext`
/// and the variable, modulo the congruence generated by the table relations
/// of `ext`'s ambient algebra and the kernel of `g : A -> B`.
///
/// `g[i]` is the image in `b_alg` of `ext.base()[i]` and must be a
/// surjective homomorphism.
pub fn prop2_construct(
    v: &Variety,
    ext: &SimpleExtension,
    b_alg: &FiniteAlgebra,
    g: &[Elem],
    cap: usize,
) -> Result<Prop2Output, ExtensionError> {
    if ext.ambient.signature() != b_alg.signature() || v.signature() != b_alg.signature() {
        return Err(ExtensionError::SignatureMismatch);
    }
    if g.len() != ext.base.len() {
        return Err(ExtensionError::BaseMapLength {
            expected: ext.base.len(),
            found: g.len(),
        });
    }
    if let Some(&e) = g.iter().find(|&&e| e >= b_alg.size()) {
        return Err(ExtensionError::OutsideCarrier(e));
    }
    let (a_alg, _) = ext.base_algebra();
    is_homomorphism(g, &a_alg, b_alg).map_err(|_| ExtensionError::BaseNotHom)?;
    if BTreeSet::from_iter(g.iter().copied()).len() != b_alg.size() {
        return Err(ExtensionError::NotSurjective);
    }

    let names = ext.generator_names();
    let free = free_algebra(v, &names, cap)?;
    let f = free.algebra();
    let amb = &ext.ambient;
    let sig = amb.signature();

    // free-algebra class of a representative term of every ambient element
    let leaves = ext
        .base_gens
        .iter()
        .map(|(n, e)| (Term::gen(n.as_str()), *e))
        .chain(core::iter::once((Term::gen(ext.var.as_str()), ext.ext_elem)))
        .collect::<Vec<_>>();
    let reps = saturate(sig, leaves, |op, a| apply_refs(amb, op, a), None, usize::MAX)?;
    let mut cls = vec![0; amb.size()];
    for (&e, t) in reps.iter() {
        cls[e] = free.class_of(t)?;
    }
    let gen_elems: Vec<(Elem, Elem)> = ext
        .base_gens
        .iter()
        .enumerate()
        .map(|(i, (_, e))| (*e, free.generator(i)))
        .chain(core::iter::once((ext.ext_elem, free.generator(ext.base_gens.len()))))
        .collect();

    let mut pairs = Vec::new();
    // generators that name an element directly
    for &(e, c) in &gen_elems {
        pairs.push((c, cls[e]));
    }
    // the table diagram of the ambient algebra
    for op in 0..sig.len() {
        let mut fargs = Vec::new();
        for_each_tuple(amb.size(), sig.arity(op), |args| {
            fargs.clear();
            fargs.extend(args.iter().map(|&a| cls[a]));
            pairs.push((f.apply(op, &fargs), cls[amb.apply(op, args)]));
        });
    }
    // the kernel of g
    let mut first_preimage: BTreeMap<Elem, Elem> = BTreeMap::new();
    for (i, &t) in g.iter().enumerate() {
        let a = ext.base[i];
        match first_preimage.get(&t) {
            Some(&p) => pairs.push((cls[p], cls[a])),
            None => {
                first_preimage.insert(t, a);
            }
        }
    }

    let con = congruence_generated(f, &pairs);
    let (q, proj) = quotient(f, &con);
    let embedding: Vec<Elem> = (0..b_alg.size()).map(|e| proj[cls[first_preimage[&e]]]).collect();
    if !is_injective(&embedding) || is_homomorphism(&embedding, b_alg, &q).is_err() {
        panic!("quotient construction failed to embed the base algebra");
    }
    let x_bar = proj[free.generator(ext.base_gens.len())];

    let mut labels: Vec<Option<String>> = vec![None; q.size()];
    for (e, &img) in embedding.iter().enumerate() {
        labels[img] = Some(b_alg.label(e).to_string());
    }
    if labels[x_bar].is_none() {
        labels[x_bar] = Some(ext.var.clone());
    }
    let mut used: BTreeSet<String> = labels.iter().flatten().cloned().collect();
    let labels = labels
        .into_iter()
        .enumerate()
        .map(|(i, l)| {
            l.unwrap_or_else(|| {
                let mut cand = format!("q{i}");
                while used.contains(&cand) {
                    cand.push('\'');
                }
                used.insert(cand.clone());
                cand
            })
        })
        .collect();
    let q = q.with_labels(labels).expect("labels are distinct");
    let base_gens = ext
        .base_gens
        .iter()
        .enumerate()
        .map(|(i, (n, _))| (n.clone(), proj[free.generator(i)]))
        .collect();
    let extension = SimpleExtension::with_var(q, base_gens, x_bar, &ext.var)?;
    Ok(Prop2Output {
        extension,
        embedding,
        free_size: free.size(),
    })
}

/// What a checked quotient construction got wrong.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Prop2AuditFailure {
    NotEmbedded,
    NotGenerated,
    /// A pair of terms equal in `ext`'s ambient algebra but not in `B ⊔ x`.
    KernelPair(Term, Term),
    BaseMismatch(String),
}

/// Audits a quotient construction: `B` embeds, `B` and `x̄` generate, the
/// base generators land on the embedded `g`-images, and every pair of terms
/// up to `depth` identified in `ext` is identified in the output.
pub fn audit_prop2(
    out: &Prop2Output,
    ext: &SimpleExtension,
    b_alg: &FiniteAlgebra,
    g: &[Elem],
    depth: usize,
) -> Result<(), Prop2AuditFailure> {
    let q = out.extension.ambient();
    if !is_injective(&out.embedding) || is_homomorphism(&out.embedding, b_alg, q).is_err() {
        return Err(Prop2AuditFailure::NotEmbedded);
    }
    let mut seed = out.embedding.clone();
    seed.push(out.x_bar());
    if subalgebra_closure(q, &seed).len() != q.size() {
        return Err(Prop2AuditFailure::NotGenerated);
    }
    for ((name, a), (_, e)) in ext.base_gens.iter().zip(out.extension.base_gens()) {
        let i = ext.base_index(*a).unwrap();
        if out.embedding[g[i]] != *e {
            return Err(Prop2AuditFailure::BaseMismatch(name.clone()));
        }
    }
    let names = ext.generator_names();
    let terms = enumerate_terms(ext.ambient.signature(), &names, depth, crate::term::DEFAULT_TERM_CAP)
        .map_err(|_| Prop2AuditFailure::NotGenerated)?;
    let src = ext.assignment();
    let dst = out.extension.assignment();
    let mut seen: BTreeMap<Elem, (Elem, usize)> = BTreeMap::new();
    for (i, t) in terms.iter().enumerate() {
        let a = eval_term(t, &ext.ambient, &src).unwrap();
        let b = eval_term(t, q, &dst).unwrap();
        match seen.get(&a) {
            Some(&(prev, j)) if prev != b => {
                return Err(Prop2AuditFailure::KernelPair(terms[j].clone(), t.clone()));
            }
            Some(_) => {}
            None => {
                seen.insert(a, (b, i));
            }
        }
    }
    Ok(())
}

/// Result of checking that evaluating the transported term equals evaluating
/// the original term under `h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lemma1Report {
    pub terms_checked: u128,
    pub counterexample: Option<Term>,
}

impl Lemma1Report {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Name of the target-side generator standing for element `e`.
pub fn element_generator(e: Elem) -> String {
    format!("a{e}")
}

/// For every term of height at most `depth` over `names`: evaluating it under
/// `names[i] -> h[i]` agrees with evaluating its transport (each generator
/// renamed to the generator of its image) under the tautological assignment.
///
/// All levels but the last are materialised; the last is covered exactly by
/// iterating over the distinct value pairs of its arguments.
pub fn lemma1_audit<S: AsRef<str>>(
    names: &[S],
    h: &[Elem],
    target: &FiniteAlgebra,
    depth: usize,
) -> Result<Lemma1Report, TermError> {
    assert_eq!(names.len(), h.len(), "one image per generator");
    if let Some(&e) = h.iter().find(|&&e| e >= target.size()) {
        return Err(TermError::OutOfCarrier(e));
    }
    let sig = target.signature();
    let renamed: BTreeMap<String, Term> = names
        .iter()
        .zip(h)
        .map(|(n, &e)| (n.as_ref().to_string(), Term::gen(element_generator(e))))
        .collect();
    let direct: Assignment = names.iter().zip(h).map(|(n, &e)| (n.as_ref().to_string(), e)).collect();
    let tautological: Assignment = h.iter().map(|&e| (element_generator(e), e)).collect();

    let lower = depth.saturating_sub(1);
    let terms = enumerate_terms(sig, names, lower, crate::term::DEFAULT_TERM_CAP)?;
    let mut values = Vec::with_capacity(terms.len());
    for t in &terms {
        let d = eval_term(t, target, &direct)?;
        let tr = eval_term(&substitute(t, &renamed), target, &tautological)?;
        if d != tr {
            return Ok(Lemma1Report {
                terms_checked: terms.len() as u128,
                counterexample: Some(t.clone()),
            });
        }
        values.push((d, tr));
    }
    let total = crate::term::count_terms(sig, names.len(), depth).unwrap_or(u128::MAX);
    if depth == 0 {
        return Ok(Lemma1Report {
            terms_checked: total,
            counterexample: None,
        });
    }
    // terms of height exactly `depth - 1` start where the shallower window ends
    let boundary = if lower == 0 {
        0
    } else {
        crate::term::count_terms(sig, names.len(), lower - 1).unwrap() as usize
    };
    let mut classes: Vec<((Elem, Elem), bool, usize)> = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, &v) in values.iter().enumerate() {
        let fresh = i >= boundary;
        if seen.insert((v, fresh)) {
            classes.push((v, fresh, i));
        }
    }
    for op in 0..sig.len() {
        let arity = sig.arity(op);
        if arity == 0 {
            continue;
        }
        let mut bad = None;
        let (mut da, mut ta) = (vec![0; arity], vec![0; arity]);
        for_each_tuple(classes.len(), arity, |idx| {
            if bad.is_some() || !idx.iter().any(|&i| classes[i].1) {
                return;
            }
            for (k, &i) in idx.iter().enumerate() {
                da[k] = classes[i].0 .0;
                ta[k] = classes[i].0 .1;
            }
            if target.apply(op, &da) != target.apply(op, &ta) {
                bad = Some(idx.to_vec());
            }
        });
        if let Some(idx) = bad {
            let args = idx.iter().map(|&i| terms[classes[i].2].clone()).collect();
            return Ok(Lemma1Report {
                terms_checked: total,
                counterexample: Some(Term::app(sig.name(op), args)),
            });
        }
    }
    Ok(Lemma1Report {
        terms_checked: total,
        counterexample: None,
    })
}

/// Term-by-term version of [`lemma1_audit`], for small windows.
pub fn lemma1_audit_materialized<S: AsRef<str>>(
    names: &[S],
    h: &[Elem],
    target: &FiniteAlgebra,
    depth: usize,
    cap: usize,
) -> Result<Lemma1Report, TermError> {
    let renamed: BTreeMap<String, Term> = names
        .iter()
        .zip(h)
        .map(|(n, &e)| (n.as_ref().to_string(), Term::gen(element_generator(e))))
        .collect();
    let direct: Assignment = names.iter().zip(h).map(|(n, &e)| (n.as_ref().to_string(), e)).collect();
    let tautological: Assignment = h.iter().map(|&e| (element_generator(e), e)).collect();
    let terms = enumerate_terms(target.signature(), names, depth, cap)?;
    for t in &terms {
        if eval_term(t, target, &direct)? != eval_term(&substitute(t, &renamed), target, &tautological)? {
            return Ok(Lemma1Report {
                terms_checked: terms.len() as u128,
                counterexample: Some(t.clone()),
            });
        }
    }
    Ok(Lemma1Report {
        terms_checked: terms.len() as u128,
        counterexample: None,
    })
}
