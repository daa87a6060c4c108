//! Equational classes, identity checking and free algebras in varieties
//! generated by finitely many finite algebras.
//!
//! A free algebra is realised inside a direct power of the generating
//! algebras: each element is an evaluation vector with one coordinate per
//! assignment of the free generators into a generating algebra. Two terms
//! denote the same factor class exactly when their vectors agree.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use crate::algebra::{subalgebra_closure, Elem, FiniteAlgebra};
use crate::term::{eval_term, for_each_tuple, is_identifier, Assignment, Signature, Term, TermError};

/// Default cap on the number of elements of a constructed free algebra.
pub const DEFAULT_FREE_CAP: usize = 1024;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum VarietyError {
    #[error("identity {index}: {source}")]
    BadIdentity { index: usize, source: TermError },
    #[error("generating algebra `{0}` has a different signature")]
    SignatureMismatch(String),
    #[error("generating algebra `{name}` violates identity {index}")]
    GeneratorViolates { name: String, index: usize },
    #[error("the variety has no generating algebras; free algebras need a finite generating set")]
    NoGeneratingAlgebras,
    #[error("free algebra would exceed the cap of {cap} elements")]
    CapExceeded { cap: usize },
    #[error("free generators `{0}` and `{1}` collapse in every generating algebra")]
    GeneratorCollapse(String, String),
    #[error("invalid generator name `{0}`")]
    BadGeneratorName(String),
    #[error("the variety has no constants, so the free algebra on no generators is empty")]
    EmptyFreeAlgebra,
    #[error(transparent)]
    Term(#[from] TermError),
    #[error("assigned elements do not generate the algebra")]
    NotGenerating,
}

/// An equational class: a signature, defining identities and optionally a
/// finite list of algebras generating the class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variety {
    name: String,
    sig: Signature,
    identities: Vec<(Term, Term)>,
    generators: Vec<(String, FiniteAlgebra)>,
}

impl Variety {
    pub fn new(
        name: impl Into<String>,
        sig: Signature,
        identities: Vec<(Term, Term)>,
        generators: Vec<(String, FiniteAlgebra)>,
    ) -> Result<Self, VarietyError> {
        for (index, (l, r)) in identities.iter().enumerate() {
            l.check(&sig)
                .and_then(|_| r.check(&sig))
                .map_err(|source| VarietyError::BadIdentity { index, source })?;
        }
        for (name, g) in &generators {
            if g.signature() != &sig {
                return Err(VarietyError::SignatureMismatch(name.clone()));
            }
            if let Some(index) = identities
                .iter()
                .position(|(l, r)| check_identity(g, l, r).is_err())
            {
                return Err(VarietyError::GeneratorViolates {
                    name: name.clone(),
                    index,
                });
            }
        }
        Ok(Variety {
            name: name.into(),
            sig,
            identities,
            generators,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn identities(&self) -> &[(Term, Term)] {
        &self.identities
    }

    pub fn generators(&self) -> &[(String, FiniteAlgebra)] {
        &self.generators
    }

    /// First identity `alg` violates, with the offending assignment.
    pub fn check_member(&self, alg: &FiniteAlgebra) -> Result<(), (usize, Assignment)> {
        for (i, (l, r)) in self.identities.iter().enumerate() {
            check_identity(alg, l, r).map_err(|asg| (i, asg))?;
        }
        Ok(())
    }
}

fn variables<'a>(l: &'a Term, r: &'a Term) -> Vec<&'a str> {
    let mut vars: BTreeSet<&str> = l.generators();
    vars.extend(r.generators());
    vars.into_iter().collect()
}

/// Checks `l = r` under every assignment of its variables into `alg`.
///
/// Assignments are tried in lexicographic order of the sorted variable names;
/// the first violating one is returned.
pub fn check_identity(alg: &FiniteAlgebra, l: &Term, r: &Term) -> Result<(), Assignment> {
    let vars = variables(l, r);
    let mut bad = None;
    for_each_tuple(alg.size(), vars.len(), |vals| {
        if bad.is_some() {
            return;
        }
        let asg: Assignment = vars
            .iter()
            .zip(vals)
            .map(|(v, &e)| (v.to_string(), e))
            .collect();
        let lv = eval_term(l, alg, &asg).expect("identity terms are well formed");
        let rv = eval_term(r, alg, &asg).expect("identity terms are well formed");
        if lv != rv {
            bad = Some(asg);
        }
    });
    match bad {
        Some(asg) => Err(asg),
        None => Ok(()),
    }
}

/// The free algebra on named generators, realised by evaluation vectors.
#[derive(Clone, Debug)]
pub struct FreeAlgebra {
    algebra: FiniteAlgebra,
    generators: Vec<String>,
    generator_elems: Vec<Elem>,
    vectors: Vec<Vec<Elem>>,
    representatives: Vec<Term>,
    coordinates: Vec<(usize, Vec<Elem>)>,
}

impl FreeAlgebra {
    pub fn algebra(&self) -> &FiniteAlgebra {
        &self.algebra
    }

    pub fn size(&self) -> usize {
        self.algebra.size()
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    /// Element of the `i`-th free generator.
    pub fn generator(&self, i: usize) -> Elem {
        self.generator_elems[i]
    }

    pub fn vector(&self, e: Elem) -> &[Elem] {
        &self.vectors[e]
    }

    /// A shortest-height term denoting `e`.
    pub fn representative(&self, e: Elem) -> &Term {
        &self.representatives[e]
    }

    /// Coordinate order: generating-algebra index, then the assignment of the
    /// free generators in lexicographic order.
    pub fn coordinates(&self) -> &[(usize, Vec<Elem>)] {
        &self.coordinates
    }

    pub fn assignment(&self) -> Assignment {
        self.generators
            .iter()
            .cloned()
            .zip(self.generator_elems.iter().copied())
            .collect()
    }

    /// The factor class `[t]`.
    pub fn class_of(&self, t: &Term) -> Result<Elem, TermError> {
        eval_term(t, &self.algebra, &self.assignment())
    }
}

/// Builds the free algebra of `v` on the generators `gens`.
pub fn free_algebra<S: AsRef<str>>(v: &Variety, gens: &[S], cap: usize) -> Result<FreeAlgebra, VarietyError> {
    if v.generators.is_empty() {
        return Err(VarietyError::NoGeneratingAlgebras);
    }
    let names: Vec<String> = gens.iter().map(|g| g.as_ref().to_string()).collect();
    for (i, g) in names.iter().enumerate() {
        if !is_identifier(g) || v.sig.lookup(g).is_some() || names[..i].contains(g) {
            return Err(VarietyError::BadGeneratorName(g.clone()));
        }
    }
    let k = names.len();
    let mut coordinates = Vec::new();
    for (j, (_, alg)) in v.generators.iter().enumerate() {
        for_each_tuple(alg.size(), k, |asg| coordinates.push((j, asg.to_vec())));
    }
    let algs: Vec<&FiniteAlgebra> = v.generators.iter().map(|(_, a)| a).collect();

    let mut index: BTreeMap<Vec<Elem>, Elem> = BTreeMap::new();
    let mut vectors: Vec<Vec<Elem>> = Vec::new();
    let mut reps: Vec<Term> = Vec::new();
    let mut generator_elems = Vec::with_capacity(k);

    for (i, name) in names.iter().enumerate() {
        let vec: Vec<Elem> = coordinates.iter().map(|(_, asg)| asg[i]).collect();
        if let Some(&prev) = index.get(&vec) {
            return Err(VarietyError::GeneratorCollapse(
                names[prev].clone(),
                name.clone(),
            ));
        }
        index.insert(vec.clone(), vectors.len());
        generator_elems.push(vectors.len());
        vectors.push(vec);
        reps.push(Term::gen(name.as_str()));
    }
    let sig = &v.sig;
    for c in sig.constants() {
        let vec: Vec<Elem> = coordinates.iter().map(|(j, _)| algs[*j].apply(c, &[])).collect();
        if !index.contains_key(&vec) {
            index.insert(vec.clone(), vectors.len());
            vectors.push(vec);
            reps.push(Term::constant(sig.name(c)));
        }
    }
    if vectors.is_empty() {
        return Err(VarietyError::EmptyFreeAlgebra);
    }

    let apply_coordinatewise = |op: usize, args: &[&Vec<Elem>]| -> Vec<Elem> {
        let mut buf = Vec::with_capacity(args.len());
        coordinates
            .iter()
            .enumerate()
            .map(|(c, (j, _))| {
                buf.clear();
                buf.extend(args.iter().map(|a| a[c]));
                algs[*j].apply(op, &buf)
            })
            .collect()
    };

    let mut old = 0;
    while old < vectors.len() {
        let snapshot = vectors.len();
        for op in 0..sig.len() {
            let arity = sig.arity(op);
            if arity == 0 {
                continue;
            }
            let mut overflow = false;
            for_each_tuple(snapshot, arity, |idx| {
                if overflow || idx.iter().all(|&i| i < old) {
                    return;
                }
                let args: Vec<&Vec<Elem>> = idx.iter().map(|&i| &vectors[i]).collect();
                let vec = apply_coordinatewise(op, &args);
                if index.contains_key(&vec) {
                    return;
                }
                if vectors.len() >= cap {
                    overflow = true;
                    return;
                }
                let t = Term::app(sig.name(op), idx.iter().map(|&i| reps[i].clone()).collect());
                index.insert(vec.clone(), vectors.len());
                vectors.push(vec);
                reps.push(t);
            });
            if overflow {
                return Err(VarietyError::CapExceeded { cap });
            }
        }
        old = snapshot;
    }

    let labels = (0..vectors.len()).map(|i| format!("w{i}")).collect();
    let algebra = FiniteAlgebra::from_fn(sig.clone(), labels, |op, args| {
        let a: Vec<&Vec<Elem>> = args.iter().map(|&i| &vectors[i]).collect();
        index[&apply_coordinatewise(op, &a)]
    })
    .expect("free algebra tables are closed");

    Ok(FreeAlgebra {
        algebra,
        generators: names,
        generator_elems,
        vectors,
        representatives: reps,
        coordinates,
    })
}

/// Whether `[w] = [w2]` in the free algebra of `v`: the identity `w = w2`
/// holds in every generating algebra.
pub fn factor_class_equal(v: &Variety, w: &Term, w2: &Term) -> Result<bool, VarietyError> {
    if v.generators.is_empty() {
        return Err(VarietyError::NoGeneratingAlgebras);
    }
    Ok(v
        .generators
        .iter()
        .all(|(_, g)| check_identity(g, w, w2).is_ok()))
}

/// Whether `w` and `w2` evaluate equally in `alg` under the generator
/// assignment `gens`, which must generate `alg`.
pub fn kernel_related(
    alg: &FiniteAlgebra,
    gens: &Assignment,
    w: &Term,
    w2: &Term,
) -> Result<bool, VarietyError> {
    let seed: Vec<Elem> = gens.values().copied().collect();
    if seed.iter().any(|&e| e >= alg.size()) {
        return Err(VarietyError::NotGenerating);
    }
    if subalgebra_closure(alg, &seed).len() != alg.size() {
        return Err(VarietyError::NotGenerating);
    }
    Ok(eval_term(w, alg, gens)? == eval_term(w2, alg, gens)?)
}

/// Generator names `x0, x1, ...`.
pub fn default_generator_names(k: usize) -> Vec<String> {
    (0..k).map(|i| format!("x{i}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::enumerate_homs;
    use crate::standard;
    use crate::term::parse_term;

    fn t(s: &str) -> Term {
        parse_term(s, &standard::boolean_signature(), &["x", "y"]).unwrap()
    }

    #[test]
    fn identity_examples() {
        let ba2 = standard::ba2();
        assert_eq!(check_identity(&ba2, &t("and(x,y)"), &t("and(y,x)")), Ok(()));
        assert_eq!(check_identity(&ba2, &t("x"), &t("x")), Ok(()));
        let z4 = standard::cyclic(4);
        let sig = standard::group_signature();
        let l = parse_term("plus(x,x)", &sig, &["x"]).unwrap();
        let r = parse_term("zero", &sig, &["x"]).unwrap();
        let asg = check_identity(&z4, &l, &r).unwrap_err();
        assert_eq!(asg.get("x"), Some(&1));
    }

    #[test]
    fn free_boolean_sizes() {
        let v = standard::boolean_variety();
        let f1 = free_algebra(&v, &["x"], DEFAULT_FREE_CAP).unwrap();
        assert_eq!(f1.size(), 4);
        let mut vecs: Vec<Vec<Elem>> = (0..4).map(|e| f1.vector(e).to_vec()).collect();
        vecs.sort();
        assert_eq!(vecs, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        let f2 = free_algebra(&v, &["x", "y"], DEFAULT_FREE_CAP).unwrap();
        assert_eq!(f2.size(), 16);
        let e2 = standard::exponent_variety(2);
        assert_eq!(free_algebra(&e2, &["x"], DEFAULT_FREE_CAP).unwrap().size(), 2);
        let e4 = standard::exponent_variety(4);
        assert_eq!(free_algebra(&e4, &["x", "y"], DEFAULT_FREE_CAP).unwrap().size(), 16);
        let sl = standard::semilattice_variety();
        assert_eq!(free_algebra(&sl, &["x", "y", "z"], DEFAULT_FREE_CAP).unwrap().size(), 7);
    }

    #[test]
    fn free_algebra_errors() {
        let v = standard::boolean_variety();
        assert_eq!(
            free_algebra(&v, &["a", "b", "c", "d"], 100).unwrap_err(),
            VarietyError::CapExceeded { cap: 100 }
        );
        let bare = Variety::new("bare", v.signature().clone(), v.identities().to_vec(), vec![]).unwrap();
        assert_eq!(
            free_algebra(&bare, &["x"], 100).unwrap_err(),
            VarietyError::NoGeneratingAlgebras
        );
        let trivial = Variety::new(
            "trivial",
            standard::group_signature(),
            vec![],
            vec![("z1".into(), standard::cyclic(1))],
        )
        .unwrap();
        assert_eq!(
            free_algebra(&trivial, &["x", "y"], 100).unwrap_err(),
            VarietyError::GeneratorCollapse("x".into(), "y".into())
        );
        let sl = standard::semilattice_variety();
        let none: [&str; 0] = [];
        assert_eq!(free_algebra(&sl, &none, 100).unwrap_err(), VarietyError::EmptyFreeAlgebra);
        assert_eq!(
            free_algebra(&v, &["and"], 100).unwrap_err(),
            VarietyError::BadGeneratorName("and".into())
        );
    }

    #[test]
    fn free_algebra_satisfies_identities() {
        for v in standard::bundled_varieties() {
            let f = free_algebra(&v, &["x", "y"], DEFAULT_FREE_CAP).unwrap();
            assert_eq!(v.check_member(f.algebra()), Ok(()), "{}", v.name());
        }
    }

    #[test]
    fn free_algebra_universal_property() {
        for v in standard::bundled_varieties() {
            for k in 1..=2 {
                let names = default_generator_names(k);
                let f = free_algebra(&v, &names, DEFAULT_FREE_CAP).unwrap();
                for (_, g) in v.generators() {
                    let homs = enumerate_homs(f.algebra(), g);
                    for_each_tuple(g.size(), k, |imgs| {
                        let count = homs
                            .iter()
                            .filter(|h| (0..k).all(|i| h[f.generator(i)] == imgs[i]))
                            .count();
                        assert_eq!(count, 1, "{} k={k} images {imgs:?}", v.name());
                    });
                }
            }
        }
    }

    #[test]
    fn factor_classes() {
        let v = standard::boolean_variety();
        assert_eq!(factor_class_equal(&v, &t("and(x,x)"), &t("x")), Ok(true));
        assert_eq!(factor_class_equal(&v, &t("x"), &t("y")), Ok(false));
        assert_eq!(
            factor_class_equal(&v, &t("not(and(x,y))"), &t("or(not(x),not(y))")),
            Ok(true)
        );
        let f = free_algebra(&v, &["x", "y"], DEFAULT_FREE_CAP).unwrap();
        assert_eq!(f.class_of(&t("not(and(x,y))")), f.class_of(&t("or(not(x),not(y))")));
        assert_ne!(f.class_of(&t("x")), f.class_of(&t("y")));
    }

    #[test]
    fn kernel_examples() {
        let ba2 = standard::ba2();
        let sig = standard::boolean_signature();
        let gens: Assignment = [("g0".to_string(), 0), ("g1".to_string(), 1)].into_iter().collect();
        let p = |s: &str| parse_term(s, &sig, &["g0", "g1"]).unwrap();
        assert_eq!(kernel_related(&ba2, &gens, &p("and(g1,g1)"), &p("g1")), Ok(true));
        assert_eq!(kernel_related(&ba2, &gens, &p("g0"), &p("g1")), Ok(false));

        let z4 = standard::cyclic(4);
        let gsig = standard::group_signature();
        let g: Assignment = [("g".to_string(), 1)].into_iter().collect();
        let four = standard::multiple(4, Term::gen("g"));
        let zero = parse_term("zero", &gsig, &["g"]).unwrap();
        assert_eq!(kernel_related(&z4, &g, &four, &zero), Ok(true));
        let two: Assignment = [("g".to_string(), 2)].into_iter().collect();
        assert_eq!(
            kernel_related(&z4, &two, &four, &zero),
            Err(VarietyError::NotGenerating)
        );
    }
}
