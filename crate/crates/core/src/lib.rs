//! Reidemeister numbers, product numbers and Reidemeister spectra of finite
//! abelian groups.
//!
//! A finite abelian group splits into its Sylow components, and each
//! component `⊕ Z/p^{e_i}` has its endomorphisms modelled by integer matrices
//! (see [`endo`]). The Reidemeister number of an endomorphism of a finite
//! abelian group is its number of fixed points, computed here as a lattice
//! index. [`spectra`] holds the closed forms and witness constructions,
//! [`oracle`] the brute-force ground truth used to check them.

pub mod decomposition;
pub mod endo;
pub mod error;
pub mod factored;
pub mod lattice;
pub mod matrix;
pub mod oracle;
pub mod spectra;

pub use decomposition::{abc_decompose, Block, BlockDecomposition, BlockKind};
pub use endo::{is_valid_endo, reidemeister_cyclic, EndoMatrix, GroupElement, PGroupType};
pub use error::{Error, Result};
pub use factored::Factored;
pub use matrix::IntMatrix;
pub use oracle::EnumBudget;
pub use spectra::{AbelianGroupType, Spectrum};
