//! Exact symbolic engine for Grassmann-graded Lagrangian theory on jet
//! spaces: graded polynomial and form algebras, the variational bicomplex
//! operators, explicit homotopy operators, Noether-identity verification
//! with the Koszul-Tate construction, and gauge-symmetry synthesis.
//!
//! All coefficients are exact rationals; every identity the engine claims is
//! checked by exact equality. Values are immutable and operations are pure
//! functions, so everything here is safe to use from multiple threads.

pub mod derivation;
pub mod error;
pub mod eta;
pub mod form;
pub mod fixtures;
pub mod homotopy;
pub mod index;
pub mod model;
pub mod noether;
pub mod parity;
pub mod parser;
pub mod printer;
pub mod random;
pub mod scalar;
pub mod variational;

pub use error::AlgebraError;
pub use form::{GradedForm, interior_product};
pub use index::MultiIndex;
pub use model::{GenClass, GenId, JetSymbol, Model};
pub use parity::Parity;
pub use scalar::GradedScalar;
pub use variational::Lagrangian;
