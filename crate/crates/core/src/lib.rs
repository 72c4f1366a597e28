//! Conserved and correctable algebras of observables for finite-dimensional quantum channels.
//!
//! The crate decides whether an algebra of observables is conserved (passive error
//! correction) or correctable (active error correction) for states in a code subspace,
//! computes the largest such algebras, synthesizes and verifies recovery channels, analyzes
//! how information about a system splits between the system and an apparatus, and lifts
//! corrected algebras to operator spaces that are corrected on all input states.
//!
//! Modules, bottom up:
//! - [`linalg`], [`opspace`]: matrices, Hilbert–Schmidt geometry, kernels of superoperators
//! - [`channel`]: Kraus channels, duals, dilations, complementary channels
//! - [`algebra`]: generated algebras, commutants, centers, Wedderburn structure
//! - [`qec`]: conservation and correctability verdicts, largest algebras
//! - [`recovery`]: recovery synthesis and verification, operator-space lift
//! - [`infoflow`]: system/apparatus information flow
//! - [`io`]: JSON schemas

pub mod algebra;
pub mod channel;
pub mod error;
pub mod infoflow;
pub mod io;
pub mod linalg;
pub mod models;
pub mod opspace;
pub mod qec;
pub mod random;
pub mod recovery;
pub mod tol;

pub use algebra::{AlgebraStructure, Sector};
pub use channel::{Isometry, KrausChannel, TpReport};
pub use error::{Error, Result};
pub use linalg::Matrix;
pub use opspace::OperatorSpan;
