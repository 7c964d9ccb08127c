//! Embedding-based invariants of persistence modules over finite posets.
//!
//! Everything is exact: linear algebra runs over the rationals or a prime
//! field, never floating point.

pub mod cli;
pub mod decomp;
pub mod error;
pub mod invariants;
pub mod io;
pub mod kan;
pub mod linalg;
pub mod pmod;
pub mod poset;
pub mod relexact;
pub mod signed;
pub mod suite;

pub use error::{Error, Result};
pub use linalg::{Field, Matrix, Scalar};
pub use pmod::{ModuleMorphism, PModule};
pub use poset::{OrderEmbedding, Poset};
