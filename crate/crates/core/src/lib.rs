//! Invertibility and spectra of operator-algebra elements computed from
//! families of representations.
//!
//! The crate is layered bottom-up:
//!
//! - [`linalg`]: dense complex matrices, eigensolvers, functional calculus,
//!   spectrum sets and Hausdorff distances.
//! - [`model`]: concrete algebras (matrix-valued functions on discrete sets,
//!   the interval and the circle, and the Toeplitz algebra), their
//!   representations and primitive-ideal points.
//! - [`families`]: faithful / exhausting / full classification of
//!   representation families and the invertibility and spectral reductions
//!   each class supports.
//! - [`affiliated`]: self-adjoint observables in Cayley form, including
//!   "infinite" and fibered (unbounded) ones.
//! - [`parametric`]: translation-invariant operators on `M × ℝⁿ` studied
//!   through their fiber operators.

pub mod affiliated;
pub mod error;
pub mod families;
pub mod linalg;
pub mod model;
pub mod parametric;
mod serde_float;

pub use error::{Error, Result};
