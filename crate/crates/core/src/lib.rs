//! Orders in étale cubic algebras over `D = F_p[[t]]`, computed exactly
//! modulo `t^N`.
//!
//! Lattices are kept in a canonical column echelon form, so equality of
//! modules is equality of matrices. On top of that sit the named families
//! of over-rings, their duals, ideal classes and singularity names.

pub mod algebra;
pub mod classify;
pub mod duality;
pub mod error;
pub mod families;
pub mod fp;
pub mod ideals;
pub mod lattice;
pub mod overrings;
pub mod series;
pub mod verify;

pub use algebra::{AlgebraElement, BranchCase, CubicAlgebra};
pub use error::{Error, Result};
pub use families::{make_family, recognize, FamilyDescriptor};
pub use lattice::Lattice;
pub use series::{RingConfig, TruncatedSeries, Valuation};
