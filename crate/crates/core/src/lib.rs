//! Finite universal algebras, simple extensions and the bounded checks for
//! completeness relative to a variety.
//!
//! Everything here is `no_std` with `alloc`; file formats and the command
//! line live in the `simplext` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod algebra;
pub mod boolean;
pub mod completeness;
pub mod extension;
pub mod group;
pub mod models;
pub mod standard;
pub mod term;
pub mod variety;
pub mod window;

pub use algebra::{Congruence, Elem, FiniteAlgebra};
pub use term::{parse_term, Signature, Term};
pub use variety::{free_algebra, FreeAlgebra, Variety};
