#![allow(dead_code)]

use proptest::prelude::*;
use simplext_core::{FiniteAlgebra, Signature};

/// `f/2 g/1 c/0`
pub fn mixed_signature() -> Signature {
    Signature::new([("f", 2), ("g", 1), ("c", 0)]).unwrap()
}

/// `f/2 g/1`, no constants, so subalgebras can be proper.
pub fn free_signature() -> Signature {
    Signature::new([("f", 2), ("g", 1)]).unwrap()
}

pub fn table_algebra(sig: &Signature, n: usize, cells: &[usize]) -> FiniteAlgebra {
    let mut pos = 0;
    let tables = (0..sig.len())
        .map(|op| {
            let len = n.pow(sig.arity(op) as u32);
            let t = cells[pos..pos + len].iter().map(|c| c % n).collect();
            pos += len;
            t
        })
        .collect();
    FiniteAlgebra::new(sig.clone(), FiniteAlgebra::numeric_labels(n), tables).unwrap()
}

/// Random algebras of size `1..=max` over `sig`.
pub fn arb_algebra(sig: Signature, max: usize) -> impl Strategy<Value = FiniteAlgebra> {
    (1..=max).prop_flat_map(move |n| {
        let cells: usize = (0..sig.len()).map(|op| n.pow(sig.arity(op) as u32)).sum();
        let sig = sig.clone();
        proptest::collection::vec(0..n, cells).prop_map(move |c| table_algebra(&sig, n, &c))
    })
}
