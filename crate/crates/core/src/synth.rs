//! Seeded random instances: exact-rank matrices, structured update
//! problems and regression datasets.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

use crate::densecore::{norm2, Matrix, SvdFactors, ToleranceConfig};
use crate::regress::Dataset;

pub struct Generator {
    rng: StdRng,
}

/// Raw inputs `A`, `X₁`, `G`, `X₂` of a rank-augmenting update, with the
/// exact rank of `A` and the bases used to build it.
#[derive(Debug, Clone)]
pub struct RawInstance {
    pub a: Matrix,
    pub x1: Matrix,
    pub g: Matrix,
    pub x2: Matrix,
    pub rank: usize,
    /// `ℓ×ℓ`; the first `rank` columns span `M(A)`, the rest its complement.
    pub left_basis: Matrix,
    /// `ℓ×ℓ`; the first `rank` columns span `M(Aᵀ)`.
    pub right_basis: Matrix,
    /// Nonzero singular values of `A`, non-increasing.
    pub sigma: Vec<f64>,
}

impl RawInstance {
    /// The SVD of `A` as constructed, without running the Jacobi solver.
    pub fn a_factors(&self, tol: &ToleranceConfig) -> SvdFactors {
        let r = self.rank;
        let sigma_max = self.sigma.first().copied().unwrap_or(0.0);
        SvdFactors {
            u: self.left_basis.columns(0, r),
            sigma: self.sigma.clone(),
            v: self.right_basis.columns(0, r),
            numerical_rank: r,
            rank_threshold: tol.rank_rel_tol * self.a.rows() as f64 * sigma_max,
        }
    }
}

impl Generator {
    pub fn new(seed: u64) -> Self {
        Generator {
            rng: StdRng::seed_from_u64(seed),
        }
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn range(&mut self, lo: usize, hi_inclusive: usize) -> usize {
        self.rng.random_range(lo..=hi_inclusive)
    }

    pub fn normal_matrix(&mut self, rows: usize, cols: usize) -> Matrix {
        let data = (0..rows * cols).map(|_| self.normal()).collect();
        Matrix::new(rows, cols, data).expect("finite normals")
    }

    /// `n×k` matrix with orthonormal columns (Gram–Schmidt, applied twice).
    pub fn orthonormal(&mut self, n: usize, k: usize) -> Matrix {
        assert!(k <= n);
        let mut cols: Vec<Vec<f64>> = Vec::with_capacity(k);
        while cols.len() < k {
            let mut c: Vec<f64> = (0..n).map(|_| self.normal()).collect();
            for _ in 0..2 {
                for q in &cols {
                    let d: f64 = q.iter().zip(&c).map(|(a, b)| a * b).sum();
                    for (ci, qi) in c.iter_mut().zip(q) {
                        *ci -= d * qi;
                    }
                }
            }
            let nrm = norm2(&c);
            if nrm > 1e-8 {
                c.iter_mut().for_each(|x| *x /= nrm);
                cols.push(c);
            }
        }
        Matrix::from_columns(&cols).expect("equal lengths")
    }

    /// Singular values `0.5 + |z|` in non-increasing order, bounded away
    /// from the rank cutoff.
    fn spectrum(&mut self, r: usize) -> Vec<f64> {
        let mut s: Vec<f64> = (0..r).map(|_| 0.5 + self.normal().abs()).collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    /// `U·diag(σ)·Vᵀ` of exact rank `rank`.
    pub fn square_with_rank(&mut self, ell: usize, rank: usize) -> (Matrix, Matrix, Matrix) {
        let (a, u, v, _) = self.square_with_rank_and_spectrum(ell, rank);
        (a, u, v)
    }

    fn square_with_rank_and_spectrum(&mut self, ell: usize, rank: usize) -> (Matrix, Matrix, Matrix, Vec<f64>) {
        let u = self.orthonormal(ell, ell);
        let v = self.orthonormal(ell, ell);
        let s = self.spectrum(rank);
        let a = scaled_product(&u.columns(0, rank), &s, &v.columns(0, rank));
        (a, u, v, s)
    }

    /// Symmetric positive semidefinite `Q·diag(σ)·Qᵀ` of exact rank.
    pub fn symmetric_with_rank(&mut self, ell: usize, rank: usize) -> (Matrix, Matrix) {
        let q = self.orthonormal(ell, ell);
        let s = self.spectrum(rank);
        let qr = q.columns(0, rank);
        (scaled_product(&qr, &s, &qr), q)
    }

    /// Rank-augmenting instance: `A` of rank `rank`, `X₁`, `X₂` and `G`
    /// with unit-normal entries.
    pub fn update_instance(&mut self, ell: usize, rank: usize, k: usize) -> RawInstance {
        assert!(rank + k <= ell, "rank budget exceeded");
        let (a, left_basis, right_basis, sigma) = self.square_with_rank_and_spectrum(ell, rank);
        RawInstance {
            a,
            x1: self.normal_matrix(ell, k),
            g: self.normal_matrix(k, k),
            x2: self.normal_matrix(ell, k),
            rank,
            left_basis,
            right_basis,
            sigma,
        }
    }

    /// Random design with `n_const` covariates held at a fixed value and a
    /// response `y = X·β + noise`.
    pub fn dataset(&mut self, n: usize, ell: usize, n_const: usize) -> Dataset {
        assert!(n_const <= ell);
        let mut constant: Vec<Option<f64>> = vec![None; ell];
        let mut slots: Vec<usize> = (0..ell).collect();
        for _ in 0..n_const {
            let pick = self.range(0, slots.len() - 1);
            let j = slots.swap_remove(pick);
            constant[j] = Some(1.0 + self.normal().abs());
        }
        let offsets: Vec<f64> = (0..ell).map(|_| self.normal()).collect();
        let mut data = Vec::with_capacity(n * ell);
        for _ in 0..n {
            for j in 0..ell {
                data.push(constant[j].unwrap_or_else(|| offsets[j] + self.normal()));
            }
        }
        let x = Matrix::new(n, ell, data).expect("finite");
        let beta: Vec<f64> = (0..ell).map(|_| self.normal()).collect();
        let y = (0..n)
            .map(|i| x.row(i).iter().zip(&beta).map(|(a, b)| a * b).sum::<f64>() + 0.1 * self.normal())
            .collect();
        Dataset::new(x, Some(y)).expect("consistent shapes")
    }
}

fn scaled_product(u: &Matrix, s: &[f64], v: &Matrix) -> Matrix {
    let r = s.len();
    let scaled = Matrix::from_fn(u.rows(), r, |i, j| u.get(i, j) * s[j]).expect("finite");
    scaled.matmul_t(v).expect("rank dimensions agree")
}
