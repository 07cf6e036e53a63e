//! Moore–Penrose pseudoinverses of singular matrices under rank-augmenting
//! low-rank updates.
//!
//! The crate is organized bottom-up:
//!
//! - [`densecore`]: dense matrices, the Jacobi SVD and the SVD oracle `A⁺`
//! - [`subspace`]: projectors and the split `X = V + W` against `M(A)`
//! - [`update`]: the update identities and Penrose verification
//! - [`regress`]: least squares through the centered SSP decomposition
//! - [`bench`], [`synth`]: timing harness and seeded random instances

pub mod bench;
pub mod densecore;
pub mod error;
pub mod regress;
pub mod subspace;
pub mod synth;
pub mod update;

pub use densecore::{Matrix, SvdFactors, ToleranceConfig};
pub use error::{Error, Hypothesis, Result};
pub use subspace::{DecomposedPerturbation, Side};
pub use update::{PenroseReport, RemarkReport, UpdateProblem};
