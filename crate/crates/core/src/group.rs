//! Abelian groups: every condition in one variable is `n·x = a`, so an
//! extension problem reduces to divisibility. Finite cyclic products and the
//! divisible group `Q/Z`.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Debug;

use num_integer::Integer;
use thiserror::Error;

use crate::algebra::{Elem, FiniteAlgebra};
use crate::extension::ExtensionCondition;
use crate::standard::{self, NEG, PLUS, ZERO};
use crate::term::Term;

pub trait AbelianGroup {
    type Elem: Clone + Eq + Debug;

    fn zero(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    /// `n·a` by doubling.
    fn times(&self, n: i64, a: &Self::Elem) -> Self::Elem {
        let mut base = if n < 0 { self.neg(a) } else { a.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = self.zero();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            base = self.add(&base, &base);
            k >>= 1;
        }
        acc
    }
}

/// A finite group whose elements can be listed, least first.
pub trait FiniteAbelianGroup: AbelianGroup {
    fn elements(&self) -> Vec<Self::Elem>;
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("moduli must be positive")]
    ZeroModulus,
    #[error("residue tuple {0:?} does not match the moduli")]
    BadTuple(Vec<usize>),
    #[error("algebra lacks the additive symbols plus/2, neg/1, zero/0")]
    NotAdditive,
    #[error("unknown symbol `{0}` in a group term")]
    UnknownSymbol(String),
    #[error("generator `{0}` is not assigned")]
    Unassigned(String),
}

/// `Z_{m_1} x .. x Z_{m_k}` on residue tuples, ordered lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicProductGroup {
    moduli: Vec<usize>,
}

impl CyclicProductGroup {
    pub fn new(moduli: Vec<usize>) -> Result<Self, GroupError> {
        if moduli.contains(&0) {
            return Err(GroupError::ZeroModulus);
        }
        Ok(CyclicProductGroup { moduli })
    }

    pub fn moduli(&self) -> &[usize] {
        &self.moduli
    }

    pub fn order(&self) -> usize {
        self.moduli.iter().product()
    }

    /// The same group as a table algebra; element `i` is the `i`th tuple.
    pub fn algebra(&self) -> FiniteAlgebra {
        standard::product_group(&self.moduli)
    }

    pub fn tuple(&self, v: &[usize]) -> Result<Vec<usize>, GroupError> {
        if v.len() != self.moduli.len() || v.iter().zip(&self.moduli).any(|(x, m)| x >= m) {
            return Err(GroupError::BadTuple(v.to_vec()));
        }
        Ok(v.to_vec())
    }

    pub fn encode(&self, t: &[usize]) -> Elem {
        t.iter().zip(&self.moduli).fold(0, |acc, (&v, &m)| acc * m + v)
    }

    pub fn decode(&self, mut e: Elem) -> Vec<usize> {
        let mut out = vec![0; self.moduli.len()];
        for (i, &m) in self.moduli.iter().enumerate().rev() {
            out[i] = e % m;
            e /= m;
        }
        out
    }

    pub fn format(&self, t: &[usize]) -> String {
        let parts: Vec<String> = t.iter().map(ToString::to_string).collect();
        parts.join(",")
    }
}

impl AbelianGroup for CyclicProductGroup {
    type Elem = Vec<usize>;

    fn zero(&self) -> Vec<usize> {
        vec![0; self.moduli.len()]
    }

    fn add(&self, a: &Vec<usize>, b: &Vec<usize>) -> Vec<usize> {
        a.iter()
            .zip(b)
            .zip(&self.moduli)
            .map(|((x, y), m)| (x + y) % m)
            .collect()
    }

    fn neg(&self, a: &Vec<usize>) -> Vec<usize> {
        a.iter().zip(&self.moduli).map(|(x, m)| (m - x) % m).collect()
    }
}

impl FiniteAbelianGroup for CyclicProductGroup {
    fn elements(&self) -> Vec<Vec<usize>> {
        (0..self.order()).map(|e| self.decode(e)).collect()
    }
}

/// A table algebra in the additive signature, read as a group.
#[derive(Clone, Copy, Debug)]
pub struct TableGroup<'a> {
    alg: &'a FiniteAlgebra,
    plus: usize,
    neg: usize,
    zero: Elem,
}

impl<'a> TableGroup<'a> {
    pub fn new(alg: &'a FiniteAlgebra) -> Result<Self, GroupError> {
        let sig = alg.signature();
        let find = |name: &str, arity: usize| {
            sig.lookup(name)
                .filter(|&op| sig.arity(op) == arity)
                .ok_or(GroupError::NotAdditive)
        };
        let (plus, neg, zero) = (find(PLUS, 2)?, find(NEG, 1)?, find(ZERO, 0)?);
        Ok(TableGroup {
            alg,
            plus,
            neg,
            zero: alg.apply(zero, &[]),
        })
    }

    pub fn algebra(&self) -> &FiniteAlgebra {
        self.alg
    }
}

impl AbelianGroup for TableGroup<'_> {
    type Elem = Elem;

    fn zero(&self) -> Elem {
        self.zero
    }

    fn add(&self, a: &Elem, b: &Elem) -> Elem {
        self.alg.apply(self.plus, &[*a, *b])
    }

    fn neg(&self, a: &Elem) -> Elem {
        self.alg.apply(self.neg, &[*a])
    }
}

impl FiniteAbelianGroup for TableGroup<'_> {
    fn elements(&self) -> Vec<Elem> {
        (0..self.alg.size()).collect()
    }
}

/// `p/q` in `Q/Z`, reduced with `0 ≤ p < q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QmodZElement {
    num: u64,
    den: u64,
}

impl QmodZElement {
    /// The class of `p/q`; `None` when `q = 0`.
    pub fn new(p: i64, q: u64) -> Option<Self> {
        if q == 0 {
            return None;
        }
        Some(Self::reduce(p as i128, q as i128))
    }

    fn reduce(p: i128, q: i128) -> Self {
        let p = p.rem_euclid(q);
        let g = p.gcd(&q);
        QmodZElement {
            num: (p / g) as u64,
            den: (q / g) as u64,
        }
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }
}

impl fmt::Display for QmodZElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// The rationals modulo the integers: divisible, hence every `n·x = a` with
/// `n ≥ 1` is solvable.
#[derive(Clone, Copy, Debug, Default)]
pub struct QmodZ;

impl AbelianGroup for QmodZ {
    type Elem = QmodZElement;

    fn zero(&self) -> QmodZElement {
        QmodZElement { num: 0, den: 1 }
    }

    fn add(&self, a: &QmodZElement, b: &QmodZElement) -> QmodZElement {
        let (p, q) = (a.num as i128, a.den as i128);
        let (r, s) = (b.num as i128, b.den as i128);
        let l = q.lcm(&s);
        QmodZElement::reduce(p * (l / q) + r * (l / s), l)
    }

    fn neg(&self, a: &QmodZElement) -> QmodZElement {
        QmodZElement::reduce(-(a.num as i128), a.den as i128)
    }
}

impl QmodZ {
    /// `a/n` for `n ≥ 1`; for `n = 0` the condition is solvable by `0` iff `a = 0`.
    pub fn solve(&self, lc: &LinearCondition<QmodZElement>) -> Option<QmodZElement> {
        if lc.n == 0 {
            return (lc.a == self.zero()).then(|| self.zero());
        }
        let n = lc.n.unsigned_abs() as i128;
        let sol = QmodZElement::reduce(lc.a.num as i128, lc.a.den as i128 * n);
        Some(if lc.n < 0 { self.neg(&sol) } else { sol })
    }
}

/// `n·x = a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearCondition<E> {
    pub n: i64,
    pub a: E,
}

impl<E> LinearCondition<E> {
    /// Negates both sides when `n < 0`.
    pub fn normalized<G: AbelianGroup<Elem = E>>(self, g: &G) -> Self {
        if self.n < 0 {
            LinearCondition {
                n: -self.n,
                a: g.neg(&self.a),
            }
        } else {
            self
        }
    }
}

impl<E: fmt::Display> fmt::Display for LinearCondition<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x = {}", self.n, self.a)
    }
}

/// `(n, c)` with `t = n·x + c` once the generators other than `var` are
/// replaced by their images.
pub fn linearize<G: AbelianGroup>(
    t: &Term,
    g: &G,
    base_map: &BTreeMap<String, G::Elem>,
    var: &str,
) -> Result<(i64, G::Elem), GroupError> {
    match t {
        Term::Gen(name) if name == var => Ok((1, g.zero())),
        Term::Gen(name) => base_map
            .get(name)
            .map(|e| (0, e.clone()))
            .ok_or_else(|| GroupError::Unassigned(name.clone())),
        Term::App(op, args) => match (op.as_str(), args.as_slice()) {
            (PLUS, [l, r]) => {
                let (n1, c1) = linearize(l, g, base_map, var)?;
                let (n2, c2) = linearize(r, g, base_map, var)?;
                Ok((n1 + n2, g.add(&c1, &c2)))
            }
            (NEG, [a]) => {
                let (n, c) = linearize(a, g, base_map, var)?;
                Ok((-n, g.neg(&c)))
            }
            (ZERO, []) => Ok((0, g.zero())),
            _ => Err(GroupError::UnknownSymbol(op.clone())),
        },
    }
}

/// `(n_l - n_r)·x = c_r - c_l`, with the coefficient made non-negative.
pub fn normalize_condition<G: AbelianGroup>(
    c: &ExtensionCondition,
    g: &G,
    base_map: &BTreeMap<String, G::Elem>,
    var: &str,
) -> Result<LinearCondition<G::Elem>, GroupError> {
    let (nl, cl) = linearize(&c.lhs, g, base_map, var)?;
    let (nr, cr) = linearize(&c.rhs, g, base_map, var)?;
    Ok(LinearCondition {
        n: nl - nr,
        a: g.sub(&cr, &cl),
    }
    .normalized(g))
}

pub fn solves<G: AbelianGroup>(g: &G, lc: &LinearCondition<G::Elem>, x: &G::Elem) -> bool {
    g.times(lc.n, x) == lc.a
}

/// The least solution in element order, by exhaustive search.
pub fn solve_linear<G: FiniteAbelianGroup>(g: &G, lc: &LinearCondition<G::Elem>) -> Option<G::Elem> {
    g.elements().into_iter().find(|x| solves(g, lc, x))
}

/// Every `(n, a)` with `1 ≤ n ≤ n_max` for which `n·x = a` has no solution.
pub fn divisibility_report<G: FiniteAbelianGroup>(g: &G, n_max: u64) -> Vec<(u64, G::Elem)> {
    let elems = g.elements();
    let mut out = Vec::new();
    for n in 1..=n_max {
        let multiples: Vec<G::Elem> = elems.iter().map(|x| g.times(n as i64, x)).collect();
        for a in &elems {
            if !multiples.contains(a) {
                out.push((n, a.clone()));
            }
        }
    }
    out
}
