//! Bounded completeness and injectivity checks, and their crosscheck.
//!
//! Both checks quantify over a catalog of the variety's members up to a size
//! bound. The completeness check reads condition sets off simple extensions of
//! subalgebras of `B`: those realised inside catalog members, and those built
//! by the quotient construction from an extension inside a member and a map
//! onto the subalgebra. The injectivity check extends homomorphisms from
//! subalgebras of members into `B` one simple extension at a time.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::algebra::{
    enumerate_homs, first_extension, generating_set, is_homomorphism, is_injective, propagate, subalgebra_closure,
    subalgebras, Elem, FiniteAlgebra,
};
use crate::extension::{
    condition_holds, extends_to_hom, prop2_construct, satisfies_conditions, ConditionWindow, ExtensionCondition,
    ExtensionError, SimpleExtension, DEFAULT_VAR,
};
use crate::models::{enumerate_models, is_isomorphic, ModelError};
use crate::term::{is_identifier, TermError};
use crate::variety::{Variety, VarietyError, DEFAULT_FREE_CAP};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("algebra violates identity {index} of the variety")]
    NotMember { index: usize },
    #[error("signatures differ")]
    SignatureMismatch,
    #[error(transparent)]
    Models(#[from] ModelError),
    #[error(transparent)]
    Extension(#[from] ExtensionError),
}

impl CheckError {
    /// Whether a resource cap rather than the input caused the failure.
    pub fn is_cap(&self) -> bool {
        matches!(
            self,
            CheckError::Models(ModelError::SearchCap { .. })
                | CheckError::Extension(ExtensionError::Term(TermError::CapExceeded { .. }))
                | CheckError::Extension(ExtensionError::Variety(VarietyError::CapExceeded { .. }))
                | CheckError::Extension(ExtensionError::Variety(VarietyError::Term(TermError::CapExceeded { .. })))
        )
    }
}

impl From<TermError> for CheckError {
    fn from(e: TermError) -> Self {
        CheckError::Extension(e.into())
    }
}

/// Resource limits for the bounded checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub model_nodes: u64,
    pub free_size: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            model_nodes: crate::models::DEFAULT_SEARCH_CAP,
            free_size: DEFAULT_FREE_CAP,
        }
    }
}

/// A member of the variety, named after a generating algebra it is
/// isomorphic to, or `M<size>.<index>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Member {
    pub name: String,
    pub algebra: FiniteAlgebra,
}

/// One representative of every isomorphism class of members up to a size.
#[derive(Clone, Debug)]
pub struct Catalog {
    members: Vec<Member>,
    size_bound: usize,
}

impl Catalog {
    pub fn build(v: &Variety, size_bound: usize, limits: Limits) -> Result<Catalog, CheckError> {
        match Self::build_partial(v, size_bound, limits) {
            (c, None) => Ok(c),
            (_, Some(e)) => Err(e),
        }
    }

    /// Like [`Catalog::build`], but on failure also returns the catalog of
    /// every size finished before it, with `size_bound` lowered to match.
    pub fn build_partial(v: &Variety, size_bound: usize, limits: Limits) -> (Catalog, Option<CheckError>) {
        let mut members = Vec::new();
        for size in 1..=size_bound {
            let models = match enumerate_models(v.signature(), v.identities(), size, true, limits.model_nodes) {
                Ok(m) => m,
                Err(e) => {
                    let partial = Catalog {
                        members,
                        size_bound: size - 1,
                    };
                    return (partial, Some(e.into()));
                }
            };
            for (i, m) in models.into_iter().enumerate() {
                let named = v
                    .generators()
                    .iter()
                    .find(|(_, g)| is_isomorphic(g, &m))
                    .map(|(n, g)| Member {
                        name: n.clone(),
                        algebra: g.clone(),
                    });
                members.push(named.unwrap_or(Member {
                    name: format!("M{size}.{}", i + 1),
                    algebra: m,
                }));
            }
        }
        (Catalog { members, size_bound }, None)
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn size_bound(&self) -> usize {
        self.size_bound
    }

    pub fn get(&self, name: &str) -> Option<&Member> {
        self.members.iter().find(|m| m.name == name)
    }
}

/// Counters describing how much of the instance grid a check examined.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CheckStats {
    pub members: usize,
    pub subalgebras: usize,
    /// Extensions realised inside members.
    pub realized: usize,
    /// Extensions from the quotient construction.
    pub constructed: usize,
    /// Homomorphisms from subalgebras of members into `B`.
    pub homs: usize,
    /// Extensions where some element passed the bounded conditions but no
    /// homomorphism existed, so a deeper condition refuted it.
    pub depth_insufficient: usize,
}

/// Outcome of a bounded check; the witness is present iff the check failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict<W> {
    pub witness: Option<W>,
    pub stats: CheckStats,
}

impl<W> Verdict<W> {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

/// Where the extension of a completeness witness came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtensionSource {
    /// Generated inside `member` by the image of the subalgebra under
    /// `embedding` (indexed by position in the subalgebra) and `ext_elem`.
    Realized {
        member: String,
        embedding: Vec<Elem>,
        ext_elem: Elem,
    },
    /// Built by the quotient construction from the extension of `domain`
    /// by `ext_elem` inside `member`, along `hom` (indexed by position in
    /// `domain`, valued in `B`) onto the subalgebra.
    Constructed {
        member: String,
        domain: Vec<Elem>,
        ext_elem: Elem,
        hom: Vec<Elem>,
    },
}

/// Why a candidate element fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Refutation {
    Condition(ExtensionCondition),
    NoHomomorphism,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompletenessWitness {
    /// The subalgebra of `B`, as sorted elements.
    pub subalgebra: Vec<Elem>,
    pub source: ExtensionSource,
    pub extension: SimpleExtension,
    /// Images in `B` of the extension's base generators.
    pub base_map: Vec<Elem>,
    /// One refutation per element of `B`.
    pub refutations: Vec<Refutation>,
}

/// The step where no extension of the homomorphism exists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeadEnd {
    /// Subalgebra of the member reached so far.
    pub domain: Vec<Elem>,
    /// Least homomorphism `domain -> B` extending the original one, indexed
    /// by position in `domain`.
    pub hom: Vec<Elem>,
    /// The element whose adjunction cannot be followed.
    pub next: Elem,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InjectivityWitness {
    pub member: String,
    pub subalgebra: Vec<Elem>,
    /// Indexed by position in `subalgebra`.
    pub hom: Vec<Elem>,
    pub dead_end: DeadEnd,
}

/// Generator names for `gens`: element labels where they are usable
/// identifiers, otherwise `g<i>`.
pub fn generator_names(alg: &FiniteAlgebra, gens: &[Elem], var: &str) -> Vec<String> {
    let sig = alg.signature();
    let usable = |s: &str| is_identifier(s) && sig.lookup(s).is_none() && s != var;
    let labels: Vec<String> = gens.iter().map(|&e| alg.label(e).to_string()).collect();
    if labels.iter().all(|l| usable(l)) {
        return labels;
    }
    let mut names: Vec<String> = (0..gens.len()).map(|i| format!("g{i}")).collect();
    for n in &mut names {
        while !usable(n) {
            n.push('_');
        }
    }
    names
}

fn check_member(b: &FiniteAlgebra, v: &Variety) -> Result<(), CheckError> {
    if b.signature() != v.signature() {
        return Err(CheckError::SignatureMismatch);
    }
    v.check_member(b).map_err(|(index, _)| CheckError::NotMember { index })
}

fn injective_homs(dom: &FiniteAlgebra, cod: &FiniteAlgebra) -> Vec<Vec<Elem>> {
    if dom.size() > cod.size() {
        return Vec::new();
    }
    enumerate_homs(dom, cod).into_iter().filter(|h| is_injective(h)).collect()
}

fn surjective_homs(dom: &FiniteAlgebra, cod: &FiniteAlgebra) -> Vec<Vec<Elem>> {
    if dom.size() < cod.size() {
        return Vec::new();
    }
    enumerate_homs(dom, cod)
        .into_iter()
        .filter(|h| BTreeSet::from_iter(h.iter().copied()).len() == cod.size())
        .collect()
}

/// Decides one extension against `b`: `Ok(None)` when some element admits
/// a homomorphism, otherwise one refutation per element.
fn refute(
    ext: &SimpleExtension,
    b: &FiniteAlgebra,
    base_map: &[Elem],
    depth: usize,
    stats: &mut CheckStats,
) -> Result<Option<Vec<Refutation>>, CheckError> {
    let window = ConditionWindow::new(ext, b, base_map, Some(depth))?;
    let mut passing = false;
    for c in 0..b.size() {
        if window.violation(c).is_none() {
            passing = true;
            if extends_to_hom(ext, b, base_map, c)?.is_some() {
                return Ok(None);
            }
        }
    }
    if passing {
        stats.depth_insufficient += 1;
    }
    // conditions of every height: the closed window refutes whatever the
    // bounded one let through
    let full = ConditionWindow::new(ext, b, base_map, None)?;
    let refutations = (0..b.size())
        .map(|c| match window.violation(c).or_else(|| full.violation(c)) {
            Some(cond) => Refutation::Condition(cond),
            None => Refutation::NoHomomorphism,
        })
        .collect();
    Ok(Some(refutations))
}

/// The simple extension of `domain` by `ext_elem` inside `member`, with
/// base generators named by [`generator_names`].
fn member_extension(member: &FiniteAlgebra, domain: &[Elem], ext_elem: Elem) -> Result<(SimpleExtension, Vec<Elem>), CheckError> {
    let gens = generating_set(member, domain);
    let names = generator_names(member, &gens, DEFAULT_VAR);
    let base_gens = names.into_iter().zip(gens).collect();
    Ok(SimpleExtension::realize(member, base_gens, ext_elem)?)
}

/// Every simple extension realised in `member`: one per subalgebra and
/// extension element, the subalgebra generated by [`generating_set`].
pub fn realized_extensions(member: &FiniteAlgebra) -> Result<Vec<SimpleExtension>, CheckError> {
    let mut out = Vec::new();
    for sub in subalgebras(member) {
        for a in 0..member.size() {
            out.push(member_extension(member, &sub, a)?.0);
        }
    }
    Ok(out)
}

/// Images of the base generators under every homomorphism from the base
/// subalgebra of `ext` into `target`.
pub fn base_maps(ext: &SimpleExtension, target: &FiniteAlgebra) -> Vec<Vec<Elem>> {
    let (base_alg, _) = ext.base_algebra();
    enumerate_homs(&base_alg, target)
        .into_iter()
        .map(|h| {
            ext.base_gens()
                .iter()
                .map(|(_, a)| h[ext.base_index(*a).unwrap()])
                .collect()
        })
        .collect()
}

/// The quotient-construction extension of `subalgebra` (of `b`) from the
/// extension of `domain` by `ext_elem` in `member`, along `hom`. Returns the
/// extension and the base map into `b`.
#[allow(clippy::too_many_arguments)]
fn constructed_extension(
    v: &Variety,
    b: &FiniteAlgebra,
    subalgebra: &[Elem],
    member: &FiniteAlgebra,
    domain: &[Elem],
    ext_elem: Elem,
    hom: &[Elem],
    limits: Limits,
) -> Result<(SimpleExtension, Vec<Elem>), CheckError> {
    let (ext, embed) = member_extension(member, domain, ext_elem)?;
    let (sub_alg, _) = b.restrict(subalgebra).map_err(|_| CheckError::SignatureMismatch)?;
    // g on ext.base() positions, valued in sub_alg positions
    let g: Vec<Elem> = ext
        .base()
        .iter()
        .map(|&local| {
            let d = domain.binary_search(&embed[local]).expect("base lies in the domain");
            subalgebra.binary_search(&hom[d]).expect("hom lands in the subalgebra")
        })
        .collect();
    let out = prop2_construct(v, &ext, &sub_alg, &g, limits.free_size)?;
    let base_map = ext
        .base_gens()
        .iter()
        .map(|(_, a)| subalgebra[g[ext.base_index(*a).unwrap()]])
        .collect();
    Ok((out.extension, base_map))
}

/// Bounded completeness of `b`: for every subalgebra and every extension of
/// it drawn from the catalog, some element of `b` admits a homomorphism
/// (equivalently, satisfies all of the extension's conditions).
pub fn is_complete_upto(
    b: &FiniteAlgebra,
    v: &Variety,
    catalog: &Catalog,
    depth: usize,
    limits: Limits,
) -> Result<Verdict<CompletenessWitness>, CheckError> {
    check_member(b, v)?;
    let mut stats = CheckStats {
        members: catalog.members.len(),
        ..CheckStats::default()
    };
    // (ambient tables, base, extension element, base map)
    type Seen = (Vec<Vec<Elem>>, Vec<Elem>, Elem, Vec<Elem>);
    let mut seen: BTreeSet<Seen> = BTreeSet::new();
    for sub in subalgebras(b) {
        stats.subalgebras += 1;
        let (sub_alg, _) = b.restrict(&sub).expect("subalgebra");
        let gens = generating_set(b, &sub);
        let names = generator_names(b, &gens, DEFAULT_VAR);
        let positions: Vec<usize> = gens.iter().map(|g| sub.binary_search(g).unwrap()).collect();

        for m in &catalog.members {
            for emb in injective_homs(&sub_alg, &m.algebra) {
                for a in 0..m.algebra.size() {
                    let base_gens = names
                        .iter()
                        .cloned()
                        .zip(positions.iter().map(|&p| emb[p]))
                        .collect();
                    let (ext, _) = SimpleExtension::realize(&m.algebra, base_gens, a)?;
                    let key = (ext.ambient().tables().to_vec(), gens.clone(), ext.ext_elem(), base_key(&ext));
                    if !seen.insert(key) {
                        continue;
                    }
                    stats.realized += 1;
                    if let Some(refutations) = refute(&ext, b, &gens, depth, &mut stats)? {
                        return Ok(Verdict {
                            witness: Some(CompletenessWitness {
                                subalgebra: sub,
                                source: ExtensionSource::Realized {
                                    member: m.name.clone(),
                                    embedding: emb,
                                    ext_elem: a,
                                },
                                extension: ext,
                                base_map: gens,
                                refutations,
                            }),
                            stats,
                        });
                    }
                }
            }
        }

        for m in &catalog.members {
            for domain in subalgebras(&m.algebra) {
                let (dom_alg, _) = m.algebra.restrict(&domain).expect("subalgebra");
                let onto = surjective_homs(&dom_alg, &sub_alg);
                if onto.is_empty() {
                    continue;
                }
                for e in 0..m.algebra.size() {
                    if domain.binary_search(&e).is_ok() {
                        // adjoining an element already present adds no conditions
                        continue;
                    }
                    for h in &onto {
                        let hom: Vec<Elem> = h.iter().map(|&i| sub[i]).collect();
                        let (ext, base_map) =
                            constructed_extension(v, b, &sub, &m.algebra, &domain, e, &hom, limits)?;
                        stats.constructed += 1;
                        if let Some(refutations) = refute(&ext, b, &base_map, depth, &mut stats)? {
                            return Ok(Verdict {
                                witness: Some(CompletenessWitness {
                                    subalgebra: sub,
                                    source: ExtensionSource::Constructed {
                                        member: m.name.clone(),
                                        domain,
                                        ext_elem: e,
                                        hom,
                                    },
                                    extension: ext,
                                    base_map,
                                    refutations,
                                }),
                                stats,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(Verdict { witness: None, stats })
}

fn base_key(ext: &SimpleExtension) -> Vec<Elem> {
    ext.base_gens().iter().map(|(_, e)| *e).collect()
}

/// Extends `hom` (on `sub`, valued in `b`) along the chain that adjoins the
/// least missing element of `member` at each step, keeping every extension
/// at each level. Returns the dead end if the chain cannot be completed.
pub fn chain_extend(member: &FiniteAlgebra, b: &FiniteAlgebra, sub: &[Elem], hom: &[Elem]) -> Result<Vec<Elem>, DeadEnd> {
    let mut start = vec![None; member.size()];
    for (&a, &t) in sub.iter().zip(hom) {
        start[a] = Some(t);
    }
    let mut current = sub.to_vec();
    let mut level: BTreeSet<Vec<Option<Elem>>> = BTreeSet::from([start]);
    while current.len() < member.size() {
        let e = (0..member.size())
            .find(|x| current.binary_search(x).is_err())
            .unwrap();
        let mut next_level = BTreeSet::new();
        for h in &level {
            for t in 0..b.size() {
                let mut partial = h.clone();
                partial[e] = Some(t);
                if propagate(member, b, &mut partial) {
                    next_level.insert(partial);
                }
            }
        }
        if next_level.is_empty() {
            let h = level.first().unwrap();
            return Err(DeadEnd {
                hom: current.iter().map(|&c| h[c].unwrap()).collect(),
                domain: current,
                next: e,
            });
        }
        let mut seed = current.clone();
        seed.push(e);
        current = subalgebra_closure(member, &seed);
        level = next_level;
    }
    let h = level.first().unwrap();
    Ok(h.iter().map(|x| x.unwrap()).collect())
}

/// Bounded injectivity of `b`: every homomorphism from a subalgebra of a
/// catalog member into `b` extends to the whole member.
pub fn is_injective_upto(b: &FiniteAlgebra, v: &Variety, catalog: &Catalog) -> Result<Verdict<InjectivityWitness>, CheckError> {
    check_member(b, v)?;
    let mut stats = CheckStats {
        members: catalog.members.len(),
        ..CheckStats::default()
    };
    for m in &catalog.members {
        for sub in subalgebras(&m.algebra) {
            stats.subalgebras += 1;
            let (sub_alg, _) = m.algebra.restrict(&sub).expect("subalgebra");
            for g in enumerate_homs(&sub_alg, b) {
                stats.homs += 1;
                let chained = chain_extend(&m.algebra, b, &sub, &g);
                debug_assert_eq!(chained.is_ok(), {
                    let mut partial = vec![None; m.algebra.size()];
                    for (&a, &t) in sub.iter().zip(&g) {
                        partial[a] = Some(t);
                    }
                    first_extension(&m.algebra, b, &partial).is_some()
                });
                if let Err(dead_end) = chained {
                    return Ok(Verdict {
                        witness: Some(InjectivityWitness {
                            member: m.name.clone(),
                            subalgebra: sub,
                            hom: g,
                            dead_end,
                        }),
                        stats,
                    });
                }
            }
        }
    }
    Ok(Verdict { witness: None, stats })
}

/// Replays a completeness witness with the extension primitives alone: every
/// refuting condition holds in the extension and fails at its element, and
/// no element of `b` admits a homomorphism.
pub fn replay_completeness(w: &CompletenessWitness, b: &FiniteAlgebra) -> Result<bool, CheckError> {
    if w.refutations.len() != b.size() {
        return Ok(false);
    }
    let ext = &w.extension;
    let base_map = ext.target_assignment(&w.base_map, 0);
    for (c, r) in w.refutations.iter().enumerate() {
        if extends_to_hom(ext, b, &w.base_map, c)?.is_some() {
            return Ok(false);
        }
        if let Refutation::Condition(cond) = r {
            if !condition_holds(ext, cond)? {
                return Ok(false);
            }
            let verdict = satisfies_conditions(b, &base_map, ext.var(), c, core::slice::from_ref(cond))?;
            if verdict.is_satisfied() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Replays an injectivity witness: the homomorphisms are homomorphisms, the
/// dead end extends the original map, no element can be adjoined there, and
/// no homomorphism from the whole member extends the original map.
pub fn replay_injectivity(w: &InjectivityWitness, b: &FiniteAlgebra, catalog: &Catalog) -> Result<bool, CheckError> {
    let Some(m) = catalog.get(&w.member) else {
        return Ok(false);
    };
    let member = &m.algebra;
    let Ok((sub_alg, _)) = member.restrict(&w.subalgebra) else {
        return Ok(false);
    };
    if is_homomorphism(&w.hom, &sub_alg, b).is_err() {
        return Ok(false);
    }
    let d = &w.dead_end;
    let Ok((dom_alg, _)) = member.restrict(&d.domain) else {
        return Ok(false);
    };
    if is_homomorphism(&d.hom, &dom_alg, b).is_err() {
        return Ok(false);
    }
    for (i, a) in w.subalgebra.iter().enumerate() {
        match d.domain.binary_search(a) {
            Ok(j) if d.hom[j] == w.hom[i] => {}
            _ => return Ok(false),
        }
    }
    let (ext, embed) = member_extension(member, &d.domain, d.next)?;
    let base_map: Vec<Elem> = ext
        .base_gens()
        .iter()
        .map(|(_, a)| d.hom[d.domain.binary_search(&embed[*a]).unwrap()])
        .collect();
    for t in 0..b.size() {
        if extends_to_hom(&ext, b, &base_map, t)?.is_some() {
            return Ok(false);
        }
    }
    let mut partial = vec![None; member.size()];
    for (&a, &t) in w.subalgebra.iter().zip(&w.hom) {
        partial[a] = Some(t);
    }
    Ok(first_extension(member, b, &partial).is_none())
}

/// Turns an injectivity witness into a completeness witness: the quotient
/// construction applied at the dead end yields an extension of the image of
/// the dead-end homomorphism that no element of `b` can follow.
pub fn completeness_from_injectivity(
    w: &InjectivityWitness,
    b: &FiniteAlgebra,
    v: &Variety,
    catalog: &Catalog,
    depth: usize,
    limits: Limits,
) -> Result<Option<CompletenessWitness>, CheckError> {
    let Some(m) = catalog.get(&w.member) else {
        return Ok(None);
    };
    let d = &w.dead_end;
    let sub: Vec<Elem> = BTreeSet::from_iter(d.hom.iter().copied()).into_iter().collect();
    let (ext, base_map) = constructed_extension(v, b, &sub, &m.algebra, &d.domain, d.next, &d.hom, limits)?;
    let mut stats = CheckStats::default();
    Ok(refute(&ext, b, &base_map, depth, &mut stats)?.map(|refutations| CompletenessWitness {
        subalgebra: sub,
        source: ExtensionSource::Constructed {
            member: w.member.clone(),
            domain: d.domain.clone(),
            ext_elem: d.next,
            hom: d.hom.clone(),
        },
        extension: ext,
        base_map,
        refutations,
    }))
}

/// Turns a completeness witness into an injectivity witness: the member the
/// extension came from, with the map its subalgebra was built from.
pub fn injectivity_from_completeness(
    w: &CompletenessWitness,
    b: &FiniteAlgebra,
    catalog: &Catalog,
) -> Option<InjectivityWitness> {
    let (member, sub, hom) = match &w.source {
        ExtensionSource::Realized { member, embedding, .. } => {
            let mut pairs: Vec<(Elem, Elem)> = embedding.iter().copied().zip(w.subalgebra.iter().copied()).collect();
            pairs.sort_unstable();
            let (sub, hom) = pairs.into_iter().unzip();
            (member, sub, hom)
        }
        ExtensionSource::Constructed { member, domain, hom, .. } => (member, domain.clone(), hom.clone()),
    };
    let m = catalog.get(member)?;
    let dead_end = chain_extend(&m.algebra, b, &sub, &hom).err()?;
    Some(InjectivityWitness {
        member: member.clone(),
        subalgebra: sub,
        hom,
        dead_end,
    })
}

/// Both bounded checks on one algebra, with witness conversion in both
/// directions when they fail.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crosscheck {
    pub complete: Verdict<CompletenessWitness>,
    pub injective: Verdict<InjectivityWitness>,
    pub injectivity_from_completeness: Option<InjectivityWitness>,
    pub completeness_from_injectivity: Option<CompletenessWitness>,
    /// On disagreement, whether rerunning the completeness check with a
    /// deeper window restores agreement.
    pub deeper_agrees: Option<bool>,
}

impl Crosscheck {
    pub fn agree(&self) -> bool {
        self.complete.passed() == self.injective.passed()
    }

    /// Both failed and each witness converts into a replayable witness of
    /// the other kind.
    pub fn interconvertible(&self) -> bool {
        !self.complete.passed()
            && !self.injective.passed()
            && self.injectivity_from_completeness.is_some()
            && self.completeness_from_injectivity.is_some()
    }
}

pub fn crosscheck(
    b: &FiniteAlgebra,
    v: &Variety,
    catalog: &Catalog,
    depth: usize,
    limits: Limits,
) -> Result<Crosscheck, CheckError> {
    let complete = is_complete_upto(b, v, catalog, depth, limits)?;
    let injective = is_injective_upto(b, v, catalog)?;
    let mut injectivity_from = None;
    let mut completeness_from = None;
    if let Some(w) = &complete.witness {
        injectivity_from = injectivity_from_completeness(w, b, catalog)
            .filter(|iw| replay_injectivity(iw, b, catalog).unwrap_or(false));
    }
    if let Some(w) = &injective.witness {
        completeness_from = completeness_from_injectivity(w, b, v, catalog, depth, limits)?
            .filter(|cw| replay_completeness(cw, b).unwrap_or(false));
    }
    let deeper_agrees = if complete.passed() != injective.passed() {
        Some(is_complete_upto(b, v, catalog, depth + 2, limits)?.passed() == injective.passed())
    } else {
        None
    };
    Ok(Crosscheck {
        complete,
        injective,
        injectivity_from_completeness: injectivity_from,
        completeness_from_injectivity: completeness_from,
        deeper_agrees,
    })
}
