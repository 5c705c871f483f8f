//! Computable models of commutative Arens-Michael algebras.
//!
//! The crate instantiates three model algebras (entire-function
//! polynomials, matrix algebras, finite function algebras) and builds the
//! full verification apparatus over them: the seminorm lattice with its
//! quotient Banach algebras, state and pure-state spaces, spectral
//! functors on marked character sets, the fullness/A-convexity topology
//! with its strict-domination basis, the sections presheaf, and the
//! holomorphic chart construction recovering the character space as a
//! complex manifold.
//!
//! Every construction is paired with executable checks: exact brute-force
//! comparisons on the finite models, seeded sampling on the parametric
//! ones.

pub mod algebra;
pub mod error;
pub mod poly;
pub mod seminorm;
pub mod state;
pub mod functor;

pub use error::{AmError, Result};
