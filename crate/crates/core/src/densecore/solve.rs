//! Direct solvers for square systems: LU with partial pivoting and Cholesky.

use super::matrix::Matrix;
use crate::error::{Error, Result};

/// `P·A = L·U` with unit-lower `L` and upper `U` packed into one buffer.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl Lu {
    /// Factors `a`. An exactly zero pivot is reported as singular; near
    /// singularity is the caller's concern (use the SVD rank for that).
    pub fn factor(a: &Matrix) -> Result<Lu> {
        if !a.is_square() {
            return Err(Error::shape("lu", a.shape(), (a.cols(), a.rows())));
        }
        let n = a.rows();
        let mut lu = a.as_slice().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (piv, max) =
                (k..n)
                    .map(|i| (i, lu[i * n + k].abs()))
                    .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if max == 0.0 {
                return Err(Error::Singular { op: "lu" });
            }
            if piv != k {
                for j in 0..n {
                    lu.swap(k * n + j, piv * n + j);
                }
                perm.swap(k, piv);
            }
            let pivot = lu[k * n + k];
            for i in (k + 1)..n {
                let f = lu[i * n + k] / pivot;
                lu[i * n + k] = f;
                if f != 0.0 {
                    for j in (k + 1)..n {
                        lu[i * n + j] -= f * lu[k * n + j];
                    }
                }
            }
        }
        Ok(Lu { n, lu, perm })
    }

    /// Solves `A·X = B` for all columns of `b`.
    pub fn solve(&self, b: &Matrix) -> Result<Matrix> {
        let n = self.n;
        if b.rows() != n {
            return Err(Error::shape("lu_solve", (n, n), b.shape()));
        }
        let p = b.cols();
        let mut x = vec![0.0; n * p];
        for (i, &src) in self.perm.iter().enumerate() {
            x[i * p..(i + 1) * p].copy_from_slice(b.row(src));
        }
        for i in 0..n {
            for k in 0..i {
                let f = self.lu[i * n + k];
                if f != 0.0 {
                    for j in 0..p {
                        x[i * p + j] -= f * x[k * p + j];
                    }
                }
            }
        }
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                let f = self.lu[i * n + k];
                if f != 0.0 {
                    for j in 0..p {
                        x[i * p + j] -= f * x[k * p + j];
                    }
                }
            }
            let d = self.lu[i * n + i];
            for j in 0..p {
                x[i * p + j] /= d;
            }
        }
        Matrix::new(n, p, x).map_err(|_| Error::Singular { op: "lu_solve" })
    }

    pub fn inverse(&self) -> Result<Matrix> {
        self.solve(&Matrix::identity(self.n))
    }
}

/// `A⁻¹` by LU; fails only on an exactly zero pivot or overflow.
pub fn inverse(a: &Matrix) -> Result<Matrix> {
    Lu::factor(a)?.inverse()
}

/// Solves `A·X = B` by LU.
pub fn solve(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    Lu::factor(a)?.solve(b)
}

/// Solves `A·X = B` for symmetric positive-definite `A`.
pub fn cholesky_solve(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::shape("cholesky", a.shape(), (a.cols(), a.rows())));
    }
    let n = a.rows();
    if b.rows() != n {
        return Err(Error::shape("cholesky_solve", a.shape(), b.shape()));
    }
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = a.get(j, j);
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if d <= 0.0 || !d.is_finite() {
            return Err(Error::Singular { op: "cholesky" });
        }
        let d = d.sqrt();
        l[j * n + j] = d;
        for i in (j + 1)..n {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / d;
        }
    }
    let p = b.cols();
    let mut x = b.as_slice().to_vec();
    for i in 0..n {
        for k in 0..i {
            let f = l[i * n + k];
            for j in 0..p {
                x[i * p + j] -= f * x[k * p + j];
            }
        }
        for j in 0..p {
            x[i * p + j] /= l[i * n + i];
        }
    }
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            let f = l[k * n + i];
            for j in 0..p {
                x[i * p + j] -= f * x[k * p + j];
            }
        }
        for j in 0..p {
            x[i * p + j] /= l[i * n + i];
        }
    }
    Matrix::new(n, p, x).map_err(|_| Error::Singular { op: "cholesky_solve" })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_two_by_two() {
        let a = Matrix::from_rows(&[&[3.0, 1.0], &[1.0, 1.0]]).unwrap();
        let inv = inverse(&a).unwrap();
        let expected = Matrix::from_rows(&[&[0.5, -0.5], &[-0.5, 1.5]]).unwrap();
        assert!(inv.sub(&expected).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn pivoting_handles_zero_leading_entry() {
        let a = Matrix::from_rows(&[&[0.0, 2.0], &[3.0, 0.0]]).unwrap();
        let x = solve(&a, &Matrix::column(&[4.0, 9.0]).unwrap()).unwrap();
        assert_eq!(x.as_slice(), &[3.0, 2.0]);
    }

    #[test]
    fn singular_detected() {
        let a = Matrix::from_rows(&[&[1.0, 2.0], &[2.0, 4.0]]).unwrap();
        assert!(matches!(inverse(&a), Err(Error::Singular { .. })));
    }

    #[test]
    fn cholesky_matches_lu() {
        let a = Matrix::from_rows(&[&[4.0, 2.0, 0.4], &[2.0, 5.0, 1.0], &[0.4, 1.0, 3.0]]).unwrap();
        let b = Matrix::from_rows(&[&[1.0, 0.0], &[2.0, 1.0], &[-1.0, 3.0]]).unwrap();
        let x1 = cholesky_solve(&a, &b).unwrap();
        let x2 = solve(&a, &b).unwrap();
        assert!(x1.sub(&x2).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = Matrix::diag(&[1.0, 0.0]).unwrap();
        assert!(cholesky_solve(&a, &Matrix::identity(2)).is_err());
    }
}
