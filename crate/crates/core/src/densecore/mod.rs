//! Dense real matrix arithmetic, the Jacobi SVD and the SVD-based
//! Moore–Penrose oracle that the update identities are checked against.

mod io;
mod matrix;
mod solve;
mod svd;
mod tolerance;

pub use io::{format_matrix, parse_matrix, read_matrix, write_matrix};
pub use matrix::{frob_norm, matmul, transpose, Matrix};
pub use solve::{cholesky_solve, inverse, solve, Lu};
pub use svd::{numerical_rank, oracle_pinv, svd, SvdFactors};
pub use tolerance::ToleranceConfig;

pub(crate) use matrix::norm2;

/// `‖a − b‖_F / (1 + ‖b‖_F)`.
pub fn rel_diff(a: &Matrix, b: &Matrix) -> f64 {
    match a.sub(b) {
        Ok(d) => d.frob_norm() / (1.0 + b.frob_norm()),
        Err(_) => f64::INFINITY,
    }
}
