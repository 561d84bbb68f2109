//! Grammar convergence toolkit.
//!
//! Grammars are recovered from text written in an arbitrary EBNF dialect
//! ([`recovery`], parameterised by a [`metasyntax::NotationSpec`]), massaged by
//! programmable transformation operators ([`transform`]) and bulk grammar
//! mutations ([`mutate`]), and finally compared with an idealised master
//! grammar by production signatures ([`converge`]).
//!
//! All values are immutable after construction and every operation is a pure
//! function, so everything here is `Send + Sync` and safe to share.

pub mod converge;
pub mod grammar;
pub mod metasyntax;
pub mod mutate;
pub mod recovery;
pub mod transform;

pub use grammar::{Expression, Grammar, Production, Vocabulary};
