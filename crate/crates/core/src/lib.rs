//! Bounded windows of Tate resolutions, cohomology tables, corner complexes
//! and Beilinson monads for coherent sheaves on products of projective
//! spaces over a prime field.
//!
//! Every computation reduces to exact linear algebra on finite-dimensional
//! multigraded pieces of the Cox ring S and the exterior algebra E.
//!
//! ```
//! use tate::beilinson::{beilinson_monad, verify_monad};
//! use tate::cohomology::cohomology_matrix_of;
//! use tate::{md, PresentedModule, ProductSpace};
//!
//! # fn main() -> tate::Result<()> {
//! let space = ProductSpace::p1p2();
//! let o = PresentedModule::structure_sheaf(space.clone());
//! let matrix = cohomology_matrix_of(&o, &md![-1, -1], &md![1, 1])?;
//! assert_eq!(matrix, "| 0 3 6 |\n| 0 1 2 |\n| 0 0 0 |\n");
//!
//! let m = o.twist(&md![1, 1]).tensor(&PresentedModule::koszul_kernel(space))?;
//! let b = beilinson_monad(&m)?;
//! assert!(verify_monad(&b, &m, &md![0, 0], &md![3, 3]).passed());
//! # Ok(())
//! # }
//! ```

pub mod beilinson;
pub mod bgg;
pub mod cohomology;
pub mod complex;
pub mod degree;
pub mod error;
pub mod exterior;
pub mod field;
pub mod json;
pub mod linalg;
pub mod module;
pub mod space;
pub mod spoly;
pub mod tail;
pub mod tate;

pub use degree::Multidegree;
pub use error::{Error, Result};
pub use exterior::ExteriorElement;
pub use field::PrimeField;
pub use linalg::SparseMatrix;
pub use module::PresentedModule;
pub use space::ProductSpace;
pub use spoly::SPolynomial;
