//! Ultrametric greedoids: Bhargava greedoids of ultra triples, Gaussian
//! elimination greedoids of vector families, and the construction that
//! represents the former as the latter over a finite field.

pub mod field;
pub mod fixtures;
pub mod geg;
pub mod group_algebra;
pub mod label;
pub mod newick;
pub mod represent;
pub mod ring;
pub mod setsys;
pub mod ultra;

pub use field::{FieldElement, FieldError, FieldSpec};
pub use geg::{GegError, VectorFamily};
pub use group_algebra::{GroupAlgebraElement, GroupAlgebraError};
pub use label::Label;
pub use represent::{RepresentError, Representation, ValadicEmbedding};
pub use ring::{Matrix, Polynomial, Ring};
pub use setsys::{SetSysError, SetSystem};
pub use ultra::{UltraError, UltraTriple};
