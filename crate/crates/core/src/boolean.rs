//! Powerset Boolean algebras: decomposition of terms in one variable,
//! conditions as lower and upper bounds, and the supremum witness. Also a
//! small finite-cofinite algebra showing what goes wrong without completeness.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::algebra::{Elem, FiniteAlgebra};
use crate::extension::ExtensionCondition;
use crate::standard;
use crate::term::{eval_term, Assignment, Term, TermError};

/// `P({1..n})` with elements as bit rows: bit `j` marks atom `j + 1`.
#[derive(Clone, Debug)]
pub struct PowersetAlgebra {
    atoms: u32,
    alg: FiniteAlgebra,
}

impl PowersetAlgebra {
    /// Panics above 16 atoms; the table form would not fit anyway.
    pub fn new(atoms: u32) -> Self {
        assert!(atoms <= 16, "at most 16 atoms");
        PowersetAlgebra {
            atoms,
            alg: standard::powerset(atoms),
        }
    }

    pub fn atoms(&self) -> u32 {
        self.atoms
    }

    pub fn algebra(&self) -> &FiniteAlgebra {
        &self.alg
    }

    pub fn size(&self) -> usize {
        1 << self.atoms
    }

    pub fn top(&self) -> Elem {
        self.size() - 1
    }

    /// The element with the given atoms (numbered from 1).
    pub fn set(&self, atoms: &[u32]) -> Elem {
        atoms.iter().fold(0, |m, &a| {
            assert!(a >= 1 && a <= self.atoms, "atom {a} out of range");
            m | 1 << (a - 1)
        })
    }

    pub fn meet(&self, a: Elem, b: Elem) -> Elem {
        a & b
    }

    pub fn join(&self, a: Elem, b: Elem) -> Elem {
        a | b
    }

    pub fn complement(&self, a: Elem) -> Elem {
        self.top() & !a
    }

    /// `(a ∧ b′) ∨ (a′ ∧ b)`.
    pub fn symdiff(&self, a: Elem, b: Elem) -> Elem {
        self.join(self.meet(a, self.complement(b)), self.meet(self.complement(a), b))
    }

    pub fn leq(&self, a: Elem, b: Elem) -> bool {
        a & !b == 0
    }

    pub fn label(&self, a: Elem) -> String {
        standard::subset_label(a as u64, self.atoms)
    }
}

/// Both sides of `(a ∧ b = a ∧ c) ⟺ a ≤ (b Δ c)′`.
pub fn lemma2_check(p: &PowersetAlgebra, a: Elem, b: Elem, c: Elem) -> (bool, bool) {
    let lhs = p.meet(a, b) == p.meet(a, c);
    let rhs = p.leq(a, p.complement(p.symdiff(b, c)));
    (lhs, rhs)
}

/// Coefficients `(b, c)` with `t = (x ∧ b) ∨ (x′ ∧ c)`: the values of `t` at
/// `x = 1` and at `x = 0`.
pub fn dnf_normalize(t: &Term, p: &PowersetAlgebra, base_map: &Assignment, var: &str) -> Result<(Elem, Elem), TermError> {
    let mut asg = base_map.clone();
    asg.insert(var.into(), p.top());
    let b = eval_term(t, &p.alg, &asg)?;
    asg.insert(var.into(), 0);
    let c = eval_term(t, &p.alg, &asg)?;
    Ok((b, c))
}

/// Evaluates `(x ∧ b) ∨ (x′ ∧ c)`.
pub fn dnf_value(p: &PowersetAlgebra, (b, c): (Elem, Elem), x: Elem) -> Elem {
    p.join(p.meet(x, b), p.meet(p.complement(x), c))
}

/// The bounds one condition puts on the variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundsIncrement {
    pub upper: Elem,
    pub lower: Elem,
}

/// With `lhs = (k, l)` and `rhs = (m, n)` the condition says `x ≤ (k Δ m)′`
/// and `l Δ n ≤ x`.
pub fn condition_to_bounds(
    c: &ExtensionCondition,
    p: &PowersetAlgebra,
    base_map: &Assignment,
    var: &str,
) -> Result<BoundsIncrement, TermError> {
    let (k, l) = dnf_normalize(&c.lhs, p, base_map, var)?;
    let (m, n) = dnf_normalize(&c.rhs, p, base_map, var)?;
    Ok(BoundsIncrement {
        upper: p.complement(p.symdiff(k, m)),
        lower: p.symdiff(l, n),
    })
}

/// Lower and upper bound families, each bound tagged with the index of the
/// condition it came from.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BoundsPair {
    pub lower: Vec<(Elem, usize)>,
    pub upper: Vec<(Elem, usize)>,
}

impl BoundsPair {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, origin: usize, inc: BoundsIncrement) {
        self.lower.push((inc.lower, origin));
        self.upper.push((inc.upper, origin));
    }

    pub fn sup_lower(&self, p: &PowersetAlgebra) -> Elem {
        self.lower.iter().fold(0, |acc, &(l, _)| p.join(acc, l))
    }

    pub fn inf_upper(&self, p: &PowersetAlgebra) -> Elem {
        self.upper.iter().fold(p.top(), |acc, &(u, _)| p.meet(acc, u))
    }

    /// Whether `a` lies between every lower and every upper bound.
    pub fn admits(&self, p: &PowersetAlgebra, a: Elem) -> bool {
        p.leq(self.sup_lower(p), a) && p.leq(a, self.inf_upper(p))
    }
}

/// Accumulates the bounds of every condition in order.
pub fn bounds_from_conditions(
    conds: &[ExtensionCondition],
    p: &PowersetAlgebra,
    base_map: &Assignment,
    var: &str,
) -> Result<BoundsPair, TermError> {
    let mut bp = BoundsPair::new();
    for (i, c) in conds.iter().enumerate() {
        bp.push(i, condition_to_bounds(c, p, base_map, var)?);
    }
    Ok(bp)
}

/// A lower bound that is not below an upper bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
#[error("lower bound {lower:?} from condition {lower_origin} exceeds upper bound {upper:?} from condition {upper_origin}")]
pub struct BoundsCrossing {
    pub lower: Elem,
    pub lower_origin: usize,
    pub upper: Elem,
    pub upper_origin: usize,
}

/// The join of the lower bounds, which lies below every upper bound when the
/// families come from a satisfiable condition set.
pub fn sup_witness(bp: &BoundsPair, p: &PowersetAlgebra) -> Result<Elem, BoundsCrossing> {
    for &(l, lo) in &bp.lower {
        for &(u, uo) in &bp.upper {
            if !p.leq(l, u) {
                return Err(BoundsCrossing {
                    lower: l,
                    lower_origin: lo,
                    upper: u,
                    upper_origin: uo,
                });
            }
        }
    }
    let sup = bp.sup_lower(p);
    debug_assert!(p.leq(sup, bp.inf_upper(p)));
    Ok(sup)
}

/// A finite or cofinite set of naturals.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FiniteCofiniteElement {
    /// The members when finite, the non-members when cofinite.
    pub support: BTreeSet<u64>,
    pub cofinite: bool,
}

impl FiniteCofiniteElement {
    pub fn finite(items: impl IntoIterator<Item = u64>) -> Self {
        FiniteCofiniteElement {
            support: items.into_iter().collect(),
            cofinite: false,
        }
    }

    /// `ℕ` minus `excluded`.
    pub fn cofinite(excluded: impl IntoIterator<Item = u64>) -> Self {
        FiniteCofiniteElement {
            support: excluded.into_iter().collect(),
            cofinite: true,
        }
    }

    pub fn contains(&self, n: u64) -> bool {
        self.support.contains(&n) != self.cofinite
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        match (self.cofinite, other.cofinite) {
            (false, false) => self.support.is_subset(&other.support),
            (false, true) => self.support.is_disjoint(&other.support),
            (true, false) => false,
            (true, true) => other.support.is_subset(&self.support),
        }
    }
}

impl fmt::Display for FiniteCofiniteElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.support.iter().map(|n| n.to_string()).collect();
        if self.cofinite {
            write!(f, "N\\{{{}}}", items.join(","))
        } else {
            write!(f, "{{{}}}", items.join(","))
        }
    }
}

/// `E_k = {0, 2, .., 2k}`.
pub fn even_prefix(k: u64) -> FiniteCofiniteElement {
    FiniteCofiniteElement::finite((0..=k).map(|i| 2 * i))
}

/// Why a candidate is not the supremum of the `E_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FcRefutation {
    /// `E_k` is not below the candidate; `missing` is an even number it lacks.
    NotUpperBound { k: u64, missing: u64 },
    /// A strictly smaller upper bound of `E_0, .., E_{k_max}`.
    SmallerUpperBound(FiniteCofiniteElement),
}

/// Refutes `candidate` as a least upper bound of the even prefixes.
///
/// A finite candidate always misses some `E_k`, and the least such `k` is
/// reported even past `k_max`. A cofinite candidate that contains
/// `E_0, .., E_{k_max}` loses its least odd member and stays an upper bound.
pub fn fc_no_sup_demo(k_max: u64, candidate: &FiniteCofiniteElement) -> FcRefutation {
    let first_missing_even = |limit: u64| (0..=limit).map(|k| 2 * k).find(|&e| !candidate.contains(e));
    if !candidate.cofinite {
        let limit = k_max.max(candidate.support.len() as u64);
        let missing = first_missing_even(limit).expect("a finite set misses an even number");
        return FcRefutation::NotUpperBound { k: missing / 2, missing };
    }
    if let Some(missing) = first_missing_even(k_max) {
        return FcRefutation::NotUpperBound { k: missing / 2, missing };
    }
    let odd = (0..)
        .map(|i| 2 * i + 1)
        .find(|o| !candidate.support.contains(o))
        .expect("the excluded set is finite");
    let mut smaller = candidate.clone();
    smaller.support.insert(odd);
    FcRefutation::SmallerUpperBound(smaller)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse_term;

    fn brute_lemma2(a: bool, b: bool, c: bool) -> bool {
        (a && b) == (a && c)
    }

    #[test]
    fn lemma2_examples() {
        let ba2 = PowersetAlgebra::new(1);
        assert_eq!(lemma2_check(&ba2, 1, 1, 1), (true, true));
        assert_eq!(lemma2_check(&ba2, 1, 1, 0), (false, false));
        let p2 = PowersetAlgebra::new(2);
        let (a, b, c) = (p2.set(&[1]), p2.set(&[1, 2]), p2.set(&[1]));
        assert_eq!(lemma2_check(&p2, a, b, c), (true, true));
        for t in 0..8 {
            let (a, b, c) = (t & 1, t >> 1 & 1, t >> 2 & 1);
            let (l, _) = lemma2_check(&ba2, a, b, c);
            assert_eq!(l, brute_lemma2(a == 1, b == 1, c == 1));
        }
    }

    #[test]
    fn lemma2_exhaustive_three_atoms() {
        let p = PowersetAlgebra::new(3);
        for a in 0..8 {
            for b in 0..8 {
                for c in 0..8 {
                    let (l, r) = lemma2_check(&p, a, b, c);
                    assert_eq!(l, r, "{a} {b} {c}");
                }
            }
        }
    }

    #[test]
    fn dnf_examples() {
        let p = PowersetAlgebra::new(3);
        let sig = p.algebra().signature().clone();
        let k = p.set(&[1, 3]);
        let asg: Assignment = [("k".to_string(), k)].into_iter().collect();
        let t = parse_term("not(and(x,k))", &sig, &["x", "k"]).unwrap();
        assert_eq!(dnf_normalize(&t, &p, &asg, "x").unwrap(), (p.complement(k), p.top()));
        let t = parse_term("x", &sig, &["x"]).unwrap();
        assert_eq!(dnf_normalize(&t, &p, &asg, "x").unwrap(), (p.top(), 0));
        let t = parse_term("k", &sig, &["k"]).unwrap();
        assert_eq!(dnf_normalize(&t, &p, &asg, "x").unwrap(), (k, k));
        let t = parse_term("or(and(x,k),not(x))", &sig, &["x", "k"]).unwrap();
        let bc = dnf_normalize(&t, &p, &asg, "x").unwrap();
        for x in 0..8 {
            let mut a = asg.clone();
            a.insert("x".into(), x);
            assert_eq!(dnf_value(&p, bc, x), eval_term(&t, p.algebra(), &a).unwrap());
        }
    }

    #[test]
    fn bounds_examples() {
        let p = PowersetAlgebra::new(3);
        let sig = p.algebra().signature().clone();
        // k = {1,2}, l = 0 on the left; m = 1, n = 0 on the right
        let asg: Assignment = [("k".to_string(), p.set(&[1, 2]))].into_iter().collect();
        let lhs = parse_term("and(x,k)", &sig, &["x", "k"]).unwrap();
        let rhs = parse_term("x", &sig, &["x"]).unwrap();
        let c = ExtensionCondition::new(lhs, rhs, "x").unwrap();
        let inc = condition_to_bounds(&c, &p, &asg, "x").unwrap();
        assert_eq!(inc, BoundsIncrement { upper: p.set(&[1, 2]), lower: 0 });

        let a = p.set(&[2]);
        let asg: Assignment = [("a".to_string(), a)].into_iter().collect();
        let c = ExtensionCondition::new(Term::gen("x"), Term::gen("a"), "x").unwrap();
        let inc = condition_to_bounds(&c, &p, &asg, "x").unwrap();
        assert_eq!(inc, BoundsIncrement { upper: a, lower: a });

        let lhs = parse_term("and(x,x)", &sig, &["x"]).unwrap();
        let c = ExtensionCondition::new(lhs, Term::gen("x"), "x").unwrap();
        let inc = condition_to_bounds(&c, &p, &asg, "x").unwrap();
        assert_eq!(inc, BoundsIncrement { upper: p.top(), lower: 0 });
    }

    #[test]
    fn sup_witness_examples() {
        let p = PowersetAlgebra::new(3);
        let bp = BoundsPair {
            lower: vec![(p.set(&[1]), 0)],
            upper: vec![(p.set(&[1, 2]), 0)],
        };
        assert_eq!(sup_witness(&bp, &p).unwrap(), p.set(&[1]));
        let bp = BoundsPair {
            lower: vec![(0, 0)],
            upper: vec![(p.top(), 0)],
        };
        assert_eq!(sup_witness(&bp, &p).unwrap(), 0);
        let bp = BoundsPair {
            lower: vec![(p.set(&[1]), 0), (p.set(&[2]), 1)],
            upper: vec![(p.set(&[1, 2]), 0), (p.top(), 1)],
        };
        assert_eq!(sup_witness(&bp, &p).unwrap(), p.set(&[1, 2]));
        let bp = BoundsPair {
            lower: vec![(p.set(&[3]), 4)],
            upper: vec![(p.set(&[1, 2]), 7)],
        };
        let err = sup_witness(&bp, &p).unwrap_err();
        assert_eq!((err.lower_origin, err.upper_origin), (4, 7));
    }

    #[test]
    fn finite_cofinite_demo() {
        let c = FiniteCofiniteElement::cofinite([1]);
        assert_eq!(
            fc_no_sup_demo(5, &c),
            FcRefutation::SmallerUpperBound(FiniteCofiniteElement::cofinite([1, 3]))
        );
        let c = FiniteCofiniteElement::finite([0, 2, 4]);
        assert_eq!(fc_no_sup_demo(5, &c), FcRefutation::NotUpperBound { k: 3, missing: 6 });
        let c = FiniteCofiniteElement::cofinite([0]);
        assert_eq!(fc_no_sup_demo(5, &c), FcRefutation::NotUpperBound { k: 0, missing: 0 });
        // the refutation past the horizon still names the first gap
        let c = FiniteCofiniteElement::finite([0, 2, 4, 6, 8]);
        assert_eq!(fc_no_sup_demo(1, &c), FcRefutation::NotUpperBound { k: 5, missing: 10 });
        assert_eq!(c.to_string(), "{0,2,4,6,8}");
        assert_eq!(FiniteCofiniteElement::cofinite([1, 3]).to_string(), "N\\{1,3}");
    }

    #[test]
    fn smaller_bound_is_an_upper_bound() {
        let c = FiniteCofiniteElement::cofinite([1, 3, 10]);
        let FcRefutation::SmallerUpperBound(s) = fc_no_sup_demo(4, &c) else {
            panic!("expected a smaller bound");
        };
        assert!(s.is_subset(&c) && s != c);
        for k in 0..=4 {
            assert!(even_prefix(k).is_subset(&s));
        }
    }
}
