//! Exact q-character computations for quantum loop algebras.
//!
//! Everything here is integer Laurent-monomial arithmetic: no floats, no
//! truncation, no symbolic simplification beyond exponent bookkeeping.
//! The main entry points are:
//!
//! - [`cartan::CartanData`]: Cartan matrices, symmetrizers, bar involution.
//! - [`monomial::Monomial`]: Laurent monomials in the variables `Y_{i,q^r}`.
//! - [`engine::fm_qchar`]: Frenkel-Mukhin saturation from a dominant head.
//! - [`engine::explore`]: certified speciality search above a seed monomial.
//! - [`minaff`]: Kirillov-Reshetikhin and minimal affinization heads.
//! - [`tsystem`]: T-system and general product identities, checked exactly.
//! - [`tableaux`]: type B Jacobi-Trudi tableau characters for skew shapes.

pub mod calculus;
pub mod cartan;
pub mod engine;
pub mod minaff;
pub mod monomial;
pub mod qchar;
pub mod sl2;
pub mod tableaux;
pub mod tsystem;

pub use cartan::{CartanData, CartanKind};
pub use monomial::{Monomial, Weight};
pub use qchar::QCharacter;
