//! Bounded windows into the term algebra, summarised by profile.
//!
//! A profile is any value computed homomorphically from a term (its value in
//! one or more algebras, whether it mentions some generator, ...). Because the
//! profile of `f(t1, .., tn)` depends only on the profiles of the `ti`, the set
//! of profiles reached by terms of height at most `d` is computed by iterating
//! the operations on profiles rather than on terms.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::term::{for_each_tuple, Signature, Term, TermError};

/// Profiles reached by a bounded set of terms, each with the first term (in
/// enumeration order restricted to the lowest height) that reaches it.
#[derive(Clone, Debug)]
pub struct Window<P> {
    profiles: Vec<P>,
    terms: Vec<Term>,
    heights: Vec<usize>,
    stable: bool,
}

impl<P> Window<P> {
    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    pub fn profiles(&self) -> &[P] {
        &self.profiles
    }

    pub fn term(&self, i: usize) -> &Term {
        &self.terms[i]
    }

    pub fn height(&self, i: usize) -> usize {
        self.heights[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&P, &Term)> {
        self.profiles.iter().zip(&self.terms)
    }

    /// Whether one more level would add nothing, so every deeper window
    /// reaches the same profiles.
    pub fn is_stable(&self) -> bool {
        self.stable
    }
}

/// Saturates `leaves` and the constants under `apply` for up to `depth`
/// levels (`None`: until nothing new appears). Fails when more than `cap`
/// profiles arise.
pub fn saturate<P: Ord + Clone>(
    sig: &Signature,
    leaves: Vec<(Term, P)>,
    mut apply: impl FnMut(usize, &[&P]) -> P,
    depth: Option<usize>,
    cap: usize,
) -> Result<Window<P>, TermError> {
    let mut index: BTreeMap<P, usize> = BTreeMap::new();
    let mut w = Window {
        profiles: Vec::new(),
        terms: Vec::new(),
        heights: Vec::new(),
        stable: false,
    };
    let constants = sig.constants().map(|c| (Term::constant(sig.name(c)), apply(c, &[])));
    for (t, p) in leaves.into_iter().chain(constants.collect::<Vec<_>>()) {
        if !index.contains_key(&p) {
            index.insert(p.clone(), w.profiles.len());
            w.profiles.push(p);
            w.terms.push(t);
            w.heights.push(0);
        }
    }
    let mut old = 0;
    let mut level = 0;
    loop {
        let snapshot = w.profiles.len();
        if depth == Some(level) {
            break;
        }
        level += 1;
        let mut overflow = false;
        let mut args: Vec<&P> = Vec::new();
        let mut fresh: Vec<(P, Term)> = Vec::new();
        for op in 0..sig.len() {
            let arity = sig.arity(op);
            if arity == 0 {
                continue;
            }
            for_each_tuple(snapshot, arity, |idx| {
                if overflow || idx.iter().all(|&i| i < old) {
                    return;
                }
                args.clear();
                args.extend(idx.iter().map(|&i| &w.profiles[i]));
                let p = apply(op, &args);
                if index.contains_key(&p) {
                    return;
                }
                if snapshot + fresh.len() >= cap {
                    overflow = true;
                    return;
                }
                let t = Term::app(sig.name(op), idx.iter().map(|&i| w.terms[i].clone()).collect());
                index.insert(p.clone(), snapshot + fresh.len());
                fresh.push((p, t));
            });
            if overflow {
                return Err(TermError::CapExceeded { cap });
            }
        }
        if fresh.is_empty() {
            w.stable = true;
            return Ok(w);
        }
        for (p, t) in fresh {
            w.profiles.push(p);
            w.terms.push(t);
            w.heights.push(level);
        }
        old = snapshot;
    }
    // one probing round decides stability without growing the window
    let snapshot = w.profiles.len();
    let mut grows = false;
    let mut args: Vec<&P> = Vec::new();
    for op in 0..sig.len() {
        let arity = sig.arity(op);
        if arity == 0 || grows {
            continue;
        }
        for_each_tuple(snapshot, arity, |idx| {
            if grows || idx.iter().all(|&i| i < old) {
                return;
            }
            args.clear();
            args.extend(idx.iter().map(|&i| &w.profiles[i]));
            if !index.contains_key(&apply(op, &args)) {
                grows = true;
            }
        });
    }
    w.stable = !grows;
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::standard;
    use crate::term::{enumerate_terms, eval_term, Assignment};
    use alloc::collections::BTreeSet;
    use alloc::vec;

    #[test]
    fn profiles_match_enumerated_terms() {
        let z4 = standard::cyclic(4);
        let sig = z4.signature();
        let asg: Assignment = [("g".into(), 1), ("h".into(), 2)].into_iter().collect();
        for depth in 0..=2 {
            let leaves = vec![(Term::gen("g"), 1usize), (Term::gen("h"), 2)];
            let apply = |op: usize, a: &[&usize]| {
                let args: Vec<usize> = a.iter().map(|v| **v).collect();
                z4.apply(op, &args)
            };
            let w = saturate(sig, leaves, apply, Some(depth), 1000).unwrap();
            let direct: BTreeSet<usize> = enumerate_terms(sig, &["g", "h"], depth, 100_000)
                .unwrap()
                .iter()
                .map(|t| eval_term(t, &z4, &asg).unwrap())
                .collect();
            let got: BTreeSet<usize> = w.profiles().iter().copied().collect();
            assert_eq!(got, direct);
            for (p, t) in w.iter() {
                assert_eq!(eval_term(t, &z4, &asg).unwrap(), *p);
                assert!(t.height() <= depth);
            }
        }
    }

    #[test]
    fn stability_is_detected() {
        let z4 = standard::cyclic(4);
        let sig = z4.signature();
        let leaves = vec![(Term::gen("g"), 1usize)];
        let apply = |op: usize, a: &[&usize]| {
            let args: Vec<usize> = a.iter().map(|v| **v).collect();
            z4.apply(op, &args)
        };
        let w0 = saturate(sig, leaves.clone(), apply, Some(0), 100).unwrap();
        assert!(!w0.is_stable());
        let w1 = saturate(sig, leaves.clone(), apply, Some(1), 100).unwrap();
        assert!(w1.is_stable());
        let full = saturate(sig, leaves, apply, None, 100).unwrap();
        assert!(full.is_stable());
        assert_eq!(full.len(), 4);
    }

    #[test]
    fn cap_is_enforced() {
        let z4 = standard::cyclic(4);
        let leaves = vec![(Term::gen("g"), 1usize)];
        let apply = |op: usize, a: &[&usize]| {
            let args: Vec<usize> = a.iter().map(|v| **v).collect();
            z4.apply(op, &args)
        };
        assert_eq!(
            saturate(z4.signature(), leaves, apply, None, 3).unwrap_err(),
            TermError::CapExceeded { cap: 3 }
        );
    }
}
