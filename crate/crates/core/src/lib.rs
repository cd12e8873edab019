//! Generic variables of acyclic cluster algebras.
//!
//! The crate computes Caldero-Chapoton characters of quiver representations
//! by exact point counting over prime fields, assembles generic variables
//! from Kac's canonical decomposition, and compares the resulting basis of
//! the Kronecker cluster algebra with the Sherman-Zelevinsky and
//! Caldero-Zelevinsky bases.

#![allow(clippy::needless_range_loop)]

pub mod acceptance;
pub mod affine;
pub mod candecomp;
pub mod ccmap;
pub mod config;
pub mod error;
pub mod kronecker;
pub mod laurent;
pub mod linalg;
pub mod mutation;
pub mod quiver;
pub mod repfq;
pub mod univariate;

pub use error::{Error, Result};
pub use laurent::LaurentPoly;
pub use quiver::{AffineData, DimVector, Quiver, QuiverType, RootKind};
pub use univariate::UnivariatePoly;
