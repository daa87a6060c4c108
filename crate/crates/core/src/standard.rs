//! Bundled signatures, algebras and varieties used throughout the tests and
//! the command-line fixtures.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::FiniteAlgebra;
use crate::term::{parse_term, Signature, Term};
use crate::variety::Variety;

pub const AND: &str = "and";
pub const OR: &str = "or";
pub const NOT: &str = "not";
pub const ZERO: &str = "zero";
pub const ONE: &str = "one";
pub const PLUS: &str = "plus";
pub const NEG: &str = "neg";
pub const MEET: &str = "meet";

/// `and/2 or/2 not/1 zero/0 one/0`
pub fn boolean_signature() -> Signature {
    Signature::new([(AND, 2), (OR, 2), (NOT, 1), (ZERO, 0), (ONE, 0)]).unwrap()
}

/// `plus/2 neg/1 zero/0`
pub fn group_signature() -> Signature {
    Signature::new([(PLUS, 2), (NEG, 1), (ZERO, 0)]).unwrap()
}

/// `meet/2`
pub fn semilattice_signature() -> Signature {
    Signature::new([(MEET, 2)]).unwrap()
}

/// The powerset algebra of `atoms` atoms; element index `i` is the subset
/// whose bit `j` marks atom `j + 1`.
pub fn powerset(atoms: u32) -> FiniteAlgebra {
    let n = 1usize << atoms;
    let full = n - 1;
    let labels = (0..n).map(|m| subset_label(m as u64, atoms)).collect();
    FiniteAlgebra::from_fn(boolean_signature(), labels, |op, args| match op {
        0 => args[0] & args[1],
        1 => args[0] | args[1],
        2 => full & !args[0],
        3 => 0,
        _ => full,
    })
    .unwrap()
}

/// `{1,3}`-style label of a bit set.
pub fn subset_label(mask: u64, atoms: u32) -> String {
    let parts: Vec<String> = (0..atoms)
        .filter(|j| mask >> j & 1 == 1)
        .map(|j| (j + 1).to_string())
        .collect();
    format!("{{{}}}", parts.join(","))
}

/// The two-element Boolean algebra with carrier `0 1`.
pub fn ba2() -> FiniteAlgebra {
    powerset(1)
        .with_labels(vec!["0".into(), "1".into()])
        .unwrap()
}

/// The cyclic group of order `m` in the additive signature.
pub fn cyclic(m: usize) -> FiniteAlgebra {
    product_group(&[m])
}

/// `Z_{m_1} x ... x Z_{m_k}`; tuples are ordered lexicographically and
/// labelled `a_b_c`.
pub fn product_group(moduli: &[usize]) -> FiniteAlgebra {
    let n: usize = moduli.iter().product();
    let decode = |mut e: usize| -> Vec<usize> {
        let mut out = vec![0; moduli.len()];
        for (i, &m) in moduli.iter().enumerate().rev() {
            out[i] = e % m;
            e /= m;
        }
        out
    };
    let encode = |t: &[usize]| t.iter().zip(moduli).fold(0, |acc, (&v, &m)| acc * m + v);
    let labels = (0..n)
        .map(|e| {
            let parts: Vec<String> = decode(e).iter().map(ToString::to_string).collect();
            parts.join("_")
        })
        .collect();
    FiniteAlgebra::from_fn(group_signature(), labels, |op, args| match op {
        0 => {
            let (a, b) = (decode(args[0]), decode(args[1]));
            let s: Vec<usize> = a
                .iter()
                .zip(&b)
                .zip(moduli)
                .map(|((x, y), m)| (x + y) % m)
                .collect();
            encode(&s)
        }
        1 => {
            let a = decode(args[0]);
            let s: Vec<usize> = a.iter().zip(moduli).map(|(x, m)| (m - x) % m).collect();
            encode(&s)
        }
        _ => 0,
    })
    .unwrap()
}

/// The two-element meet semilattice `{0, 1}` with `meet = min`.
pub fn semilattice2() -> FiniteAlgebra {
    FiniteAlgebra::from_fn(
        semilattice_signature(),
        FiniteAlgebra::numeric_labels(2),
        |_, args| args[0].min(args[1]),
    )
    .unwrap()
}

fn identities(sig: &Signature, lines: &[&str]) -> Vec<(Term, Term)> {
    lines
        .iter()
        .map(|line| {
            let (l, r) = line.split_once('=').unwrap();
            let vars = ["x", "y", "z"];
            (
                parse_term(l, sig, &vars).unwrap(),
                parse_term(r, sig, &vars).unwrap(),
            )
        })
        .collect()
}

pub const BOOLEAN_IDENTITIES: &[&str] = &[
    "and(x,y) = and(y,x)",
    "or(x,y) = or(y,x)",
    "and(x,and(y,z)) = and(and(x,y),z)",
    "or(x,or(y,z)) = or(or(x,y),z)",
    "and(x,or(x,y)) = x",
    "or(x,and(x,y)) = x",
    "and(x,or(y,z)) = or(and(x,y),and(x,z))",
    "or(x,not(x)) = one",
    "and(x,not(x)) = zero",
];

pub fn boolean_identities() -> Vec<(Term, Term)> {
    identities(&boolean_signature(), BOOLEAN_IDENTITIES)
}

/// Boolean algebras, generated by the two-element algebra.
pub fn boolean_variety() -> Variety {
    Variety::new(
        "boolean",
        boolean_signature(),
        boolean_identities(),
        vec![("ba2".into(), ba2())],
    )
    .unwrap()
}

/// `m * x` written as a left-nested sum.
pub fn multiple(m: usize, t: Term) -> Term {
    if m == 0 {
        return Term::constant(ZERO);
    }
    (1..m).fold(t.clone(), |acc, _| Term::app(PLUS, vec![acc, t.clone()]))
}

pub fn abelian_group_identities(exponent: Option<usize>) -> Vec<(Term, Term)> {
    let mut ids = identities(
        &group_signature(),
        &[
            "plus(x,y) = plus(y,x)",
            "plus(x,plus(y,z)) = plus(plus(x,y),z)",
            "plus(x,zero) = x",
            "plus(x,neg(x)) = zero",
        ],
    );
    if let Some(m) = exponent {
        ids.push((multiple(m, Term::gen("x")), Term::constant(ZERO)));
    }
    ids
}

/// Abelian groups of exponent dividing `m`, generated by `Z_m`.
pub fn exponent_variety(m: usize) -> Variety {
    Variety::new(
        format!("exp{m}"),
        group_signature(),
        abelian_group_identities(Some(m)),
        vec![(format!("z{m}"), cyclic(m))],
    )
    .unwrap()
}

/// Meet semilattices, generated by the two-element chain.
pub fn semilattice_variety() -> Variety {
    Variety::new(
        "semilattice",
        semilattice_signature(),
        identities(
            &semilattice_signature(),
            &[
                "meet(x,x) = x",
                "meet(x,y) = meet(y,x)",
                "meet(x,meet(y,z)) = meet(meet(x,y),z)",
            ],
        ),
        vec![("sl2".into(), semilattice2())],
    )
    .unwrap()
}

/// The four varieties exercised by the exhaustive suites.
pub fn bundled_varieties() -> Vec<Variety> {
    vec![
        boolean_variety(),
        exponent_variety(2),
        exponent_variety(4),
        semilattice_variety(),
    ]
}
