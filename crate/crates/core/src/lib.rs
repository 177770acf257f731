//! Coverings, gluings and differential calculi over finitely presented
//! *-algebras, with the quantum disc / glued quantum sphere as worked example.

pub mod dga;
pub mod freealg;
pub mod gluing;
pub mod hopf;
pub mod linalg;
pub mod models;
pub mod parse;
pub mod quotient;
pub mod rep;
pub mod rewrite;
pub mod scalar;

pub use freealg::{Alphabet, Element, Word};
pub use scalar::Scalar;
