//! Thin singular value decomposition by one-sided (Hestenes) Jacobi.
//!
//! The working copy of the input is stored column-major so that each
//! plane rotation touches two contiguous slices. Convergence is declared
//! once a full cyclic sweep finds every pair of columns orthogonal to
//! `CONVERGENCE_TOL` relative to the product of their norms.

use super::matrix::{norm2, Matrix};
use super::tolerance::ToleranceConfig;
use crate::error::{Error, Result};

const CONVERGENCE_TOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 30;

/// Truncated thin SVD `A ≈ U·diag(σ)·Vᵀ`.
///
/// Only the `numerical_rank` singular triplets above `rank_threshold` are
/// kept, so `u` is `rows×r` and `v` is `cols×r`.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    pub u: Matrix,
    pub sigma: Vec<f64>,
    pub v: Matrix,
    pub numerical_rank: usize,
    /// `rank_rel_tol · max(rows, cols) · σ_max`; zero for the zero matrix.
    pub rank_threshold: f64,
}

impl SvdFactors {
    /// Rows of the factored matrix.
    pub fn input_rows(&self) -> usize {
        self.u.rows()
    }

    /// Columns of the factored matrix.
    pub fn input_cols(&self) -> usize {
        self.v.rows()
    }

    /// `V·diag(1/σ)·Uᵀ`.
    pub fn pinv(&self) -> Matrix {
        let r = self.numerical_rank;
        let n = self.v.rows();
        let mut scaled = self.v.as_slice().to_vec();
        for i in 0..n {
            for j in 0..r {
                scaled[i * r + j] /= self.sigma[j];
            }
        }
        Matrix::from_raw(n, r, scaled)
            .matmul_t(&self.u)
            .expect("thin factors share the rank dimension")
    }

    /// `U·diag(σ)·Vᵀ`.
    pub fn reconstruct(&self) -> Matrix {
        let r = self.numerical_rank;
        let m = self.u.rows();
        let mut scaled = self.u.as_slice().to_vec();
        for i in 0..m {
            for j in 0..r {
                scaled[i * r + j] *= self.sigma[j];
            }
        }
        Matrix::from_raw(m, r, scaled)
            .matmul_t(&self.v)
            .expect("thin factors share the rank dimension")
    }

    /// Orthogonal projector `U·Uᵀ` onto the column space.
    pub fn column_projector(&self) -> Matrix {
        self.u.matmul_t(&self.u).expect("square by construction")
    }

    /// Orthogonal projector `V·Vᵀ` onto the row space.
    pub fn row_projector(&self) -> Matrix {
        self.v.matmul_t(&self.v).expect("square by construction")
    }

    /// `U·(Uᵀ·x)`, the column-space projection of `x` without forming `U·Uᵀ`.
    pub fn project_onto_columns(&self, x: &Matrix) -> Result<Matrix> {
        self.u.matmul(&self.u.t_matmul(x)?)
    }

    /// `V·(Vᵀ·x)`, the row-space projection of `x`.
    pub fn project_onto_rows(&self, x: &Matrix) -> Result<Matrix> {
        self.v.matmul(&self.v.t_matmul(x)?)
    }
}

/// Thin SVD of `a`, truncated at the numerical rank.
pub fn svd(a: &Matrix, tol: &ToleranceConfig) -> Result<SvdFactors> {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return Err(Error::Precondition("svd of an empty matrix".into()));
    }
    if m >= n {
        jacobi_tall(a, tol)
    } else {
        let f = jacobi_tall(&a.transpose(), tol)?;
        Ok(SvdFactors { u: f.v, v: f.u, ..f })
    }
}

/// Moore–Penrose pseudoinverse through the SVD; the reference oracle.
pub fn oracle_pinv(a: &Matrix, tol: &ToleranceConfig) -> Result<Matrix> {
    Ok(svd(a, tol)?.pinv())
}

/// Numerical rank under the configured threshold rule.
pub fn numerical_rank(a: &Matrix, tol: &ToleranceConfig) -> Result<usize> {
    Ok(svd(a, tol)?.numerical_rank)
}

/// One-sided Jacobi for `rows >= cols`.
fn jacobi_tall(a: &Matrix, tol: &ToleranceConfig) -> Result<SvdFactors> {
    let (m, n) = a.shape();
    // Column j of the working matrix lives at work[j*m..(j+1)*m].
    let mut work = a.transpose().into_vec();
    let mut vcols = vec![0.0; n * n];
    for j in 0..n {
        vcols[j * n + j] = 1.0;
    }

    let mut converged = false;
    let mut off = 0.0f64;
    for _ in 0..MAX_SWEEPS {
        off = 0.0;
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let (cp, cq) = column_pair(&mut work, m, p, q);
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for (&x, &y) in cp.iter().zip(cq.iter()) {
                    alpha += x * x;
                    beta += y * y;
                    gamma += x * y;
                }
                if alpha == 0.0 || beta == 0.0 || gamma == 0.0 {
                    continue;
                }
                let ratio = gamma.abs() / (alpha.sqrt() * beta.sqrt());
                off = off.max(ratio);
                if ratio <= CONVERGENCE_TOL {
                    continue;
                }
                rotated = true;

                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = if zeta.abs() > 1e150 {
                    0.5 / zeta
                } else {
                    zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(cp, cq, c, s);
                let (vp, vq) = column_pair(&mut vcols, n, p, q);
                rotate(vp, vq, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Convergence {
            sweeps: MAX_SWEEPS,
            residual: off,
        });
    }

    let norms: Vec<f64> = (0..n).map(|j| norm2(&work[j * m..(j + 1) * m])).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let sigma_max = norms[order[0]];
    let rank_threshold = tol.rank_rel_tol * m.max(n) as f64 * sigma_max;
    let rank = order.iter().take_while(|&&j| norms[j] > rank_threshold).count();

    let mut u = vec![0.0; m * rank];
    let mut v = vec![0.0; n * rank];
    let mut sigma = Vec::with_capacity(rank);
    for (k, &j) in order.iter().take(rank).enumerate() {
        let s = norms[j];
        sigma.push(s);
        for i in 0..m {
            u[i * rank + k] = work[j * m + i] / s;
        }
        for i in 0..n {
            v[i * rank + k] = vcols[j * n + i];
        }
    }

    Ok(SvdFactors {
        u: Matrix::from_raw(m, rank, u),
        sigma,
        v: Matrix::from_raw(n, rank, v),
        numerical_rank: rank,
        rank_threshold,
    })
}

fn column_pair(buf: &mut [f64], len: usize, p: usize, q: usize) -> (&mut [f64], &mut [f64]) {
    debug_assert!(p < q);
    let (head, tail) = buf.split_at_mut(q * len);
    (&mut head[p * len..(p + 1) * len], &mut tail[..len])
}

#[inline]
fn rotate(xs: &mut [f64], ys: &mut [f64], c: f64, s: f64) {
    for (x, y) in xs.iter_mut().zip(ys.iter_mut()) {
        let (a, b) = (*x, *y);
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}
