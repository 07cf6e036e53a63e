//! Least squares through the centered decomposition of the SSP matrix.
//!
//! Writing each observation as `xᵢ = x̄ + x̃ᵢ` gives
//!
//! ```text
//! XᵀX = X̃ᵀX̃ + n·x̄x̄ᵀ = X̃ᵀX̃ + (v + w)(v + w)ᵀ
//! ```
//!
//! where `√n·x̄ = v + w` is split against the column space of the centered
//! covariance `X̃ᵀX̃`. When some covariates were never varied the
//! covariance is singular, `w` is generally nonzero, and the pseudoinverse
//! of the SSP matrix follows from the rank-one update formula.

use std::io::Read;
use std::path::Path;

use crate::densecore::{norm2, svd, Matrix, ToleranceConfig};
use crate::error::{Error, Result};
use crate::update::{bartlett_inverse, rank_one_pinv};

#[derive(Debug, Clone)]
pub struct Dataset {
    /// `n×ℓ`, one observation per row.
    pub x: Matrix,
    pub y: Option<Vec<f64>>,
    /// Covariate names in file order, when read from CSV.
    pub names: Vec<String>,
}

impl Dataset {
    pub fn new(x: Matrix, y: Option<Vec<f64>>) -> Result<Self> {
        if x.rows() == 0 || x.cols() == 0 {
            return Err(Error::Precondition(
                "dataset needs at least one observation and one covariate".into(),
            ));
        }
        if let Some(y) = &y {
            if y.len() != x.rows() {
                return Err(Error::shape("dataset", (y.len(), 1), (x.rows(), 1)));
            }
            if y.iter().any(|v| !v.is_finite()) {
                return Err(Error::Precondition("response contains non-finite values".into()));
            }
        }
        let names = (1..=x.cols()).map(|j| format!("x{j}")).collect();
        Ok(Dataset { x, y, names })
    }

    pub fn n(&self) -> usize {
        self.x.rows()
    }

    pub fn ell(&self) -> usize {
        self.x.cols()
    }

    /// Reads CSV with a header row. A column named exactly `y` is the
    /// response; every other column is a covariate, in file order.
    pub fn from_csv_reader(reader: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let header = rdr.headers().map_err(csv_error)?.clone();
        let y_col = header.iter().position(|h| h == "y");
        let names: Vec<String> = header
            .iter()
            .enumerate()
            .filter(|&(j, _)| Some(j) != y_col)
            .map(|(_, h)| h.to_string())
            .collect();
        if names.is_empty() {
            return Err(Error::parse(1, 1, "no covariate columns"));
        }

        let mut data = Vec::new();
        let mut ys = Vec::new();
        let mut n = 0;
        for record in rdr.records() {
            let record = record.map_err(csv_error)?;
            let line = record.position().map_or(0, |p| p.line() as usize);
            if record.iter().all(str::is_empty) {
                continue;
            }
            for (j, field) in record.iter().enumerate() {
                let value: f64 = field
                    .parse()
                    .ok()
                    .filter(|v: &f64| v.is_finite())
                    .ok_or_else(|| Error::parse(line, j + 1, format!("invalid number '{field}'")))?;
                if Some(j) == y_col {
                    ys.push(value);
                } else {
                    data.push(value);
                }
            }
            n += 1;
        }
        if n == 0 {
            return Err(Error::parse(1, 1, "no observations"));
        }
        let x = Matrix::new(n, names.len(), data)?;
        let mut d = Dataset::new(x, y_col.map(|_| ys))?;
        d.names = names;
        Ok(d)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        Dataset::from_csv_reader(std::fs::File::open(path)?)
    }
}

fn csv_error(e: csv::Error) -> Error {
    let (line, column) = match e.kind() {
        csv::ErrorKind::UnequalLengths { pos, len, .. } => {
            (pos.as_ref().map_or(0, |p| p.line() as usize), *len as usize + 1)
        }
        _ => (e.position().map_or(0, |p| p.line() as usize), 1),
    };
    match e.kind() {
        csv::ErrorKind::Io(_) => Error::Io(e.to_string()),
        _ => Error::parse(line, column, e.to_string()),
    }
}

/// Mean, centered rows and centered cross-product matrix of a dataset.
#[derive(Debug, Clone)]
pub struct CenteredData {
    pub x_bar: Vec<f64>,
    pub x_tilde: Matrix,
    /// `X̃ᵀX̃`, with directions whose spread is rounding noise relative to
    /// the SSP matrix removed.
    pub cov: Matrix,
    pub cov_rank: usize,
}

pub fn center(d: &Dataset, tol: &ToleranceConfig) -> Result<CenteredData> {
    let (n, ell) = d.x.shape();
    let x_bar: Vec<f64> = (0..ell)
        .map(|j| {
            let first = d.x.get(0, j);
            if (1..n).all(|i| d.x.get(i, j) == first) {
                // Exact, so the centered column is exactly zero.
                first
            } else {
                (0..n).map(|i| d.x.get(i, j)).sum::<f64>() / n as f64
            }
        })
        .collect();
    let x_tilde = Matrix::from_fn(n, ell, |i, j| d.x.get(i, j) - x_bar[j])?;
    let raw_cov = x_tilde.t_matmul(&x_tilde)?;

    // The rank is judged against the scale of the whole SSP matrix: a
    // covariance made only of cancellation residue would otherwise count
    // its own largest singular value as signal.
    let f = svd(&raw_cov, tol)?;
    let mean_sq = n as f64 * x_bar.iter().map(|m| m * m).sum::<f64>();
    let scale = f.sigma.first().copied().unwrap_or(0.0).max(mean_sq);
    let floor = f.rank_threshold.max(tol.rank_rel_tol * ell as f64 * scale);
    let cov_rank = f.sigma.iter().filter(|&&s| s > floor).count();
    let cov = if cov_rank == f.numerical_rank {
        raw_cov
    } else {
        let u = f.u.columns(0, cov_rank);
        let us = Matrix::from_fn(ell, cov_rank, |i, j| u.get(i, j) * f.sigma[j])?;
        let c = us.matmul_t(&u)?;
        Matrix::from_fn(ell, ell, |i, j| 0.5 * (c.get(i, j) + c.get(j, i)))?
    };
    Ok(CenteredData {
        x_bar,
        x_tilde,
        cov,
        cov_rank,
    })
}

/// `X̃ᵀX̃ + n·x̄x̄ᵀ`.
pub fn assemble_ssp(c: &CenteredData, n: usize) -> Matrix {
    let ell = c.x_bar.len();
    let nf = n as f64;
    let outer = Matrix::from_fn(ell, ell, |i, j| nf * c.x_bar[i] * c.x_bar[j]).expect("finite mean");
    c.cov.add(&outer).expect("ℓ×ℓ")
}

/// How the SSP pseudoinverse was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SspBranch {
    /// The scaled mean has a component outside `M(X̃ᵀX̃)`: rank-one
    /// pseudoinverse update, raising the rank by one.
    RankAugmenting,
    /// Nonsingular covariance: classical rank-one inverse update.
    Bartlett,
    /// Singular covariance with the scaled mean inside its column space:
    /// rank-one update of `(X̃ᵀX̃)⁺` restricted to that column space.
    RangeRestricted,
}

impl SspBranch {
    pub fn name(self) -> &'static str {
        match self {
            SspBranch::RankAugmenting => "rank-augmenting",
            SspBranch::Bartlett => "bartlett",
            SspBranch::RangeRestricted => "range-restricted",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SspInverse {
    pub pinv: Matrix,
    pub branch: SspBranch,
    /// Component of `√n·x̄` inside `M(X̃ᵀX̃)`.
    pub v: Vec<f64>,
    /// Component of `√n·x̄` orthogonal to `M(X̃ᵀX̃)`.
    pub w: Vec<f64>,
}

/// Pseudoinverse of the SSP matrix from the covariance and the mean.
pub fn ssp_pinv_via_update(c: &CenteredData, n: usize, tol: &ToleranceConfig) -> Result<SspInverse> {
    let ell = c.x_bar.len();
    let root_n = (n as f64).sqrt();
    let u: Vec<f64> = c.x_bar.iter().map(|m| root_n * m).collect();
    let um = Matrix::column(&u)?;
    let factors = svd(&c.cov, tol)?;
    let v = factors.project_onto_columns(&um)?.into_vec();
    let w: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a - b).collect();

    let threshold = tol.subspace_tol * (1.0 + norm2(&u));
    let (pinv, branch) = if norm2(&w) > threshold {
        (rank_one_pinv(&c.cov, &v, &w, &v, &w, tol)?, SspBranch::RankAugmenting)
    } else if factors.numerical_rank == ell {
        (bartlett_inverse(&c.cov, &u, &u, tol)?, SspBranch::Bartlett)
    } else {
        // Both the covariance and u·uᵀ act inside M(cov), where the
        // covariance is invertible.
        let cov_pinv = factors.pinv();
        let pu = cov_pinv.matmul(&um)?;
        let denom = 1.0 + um.t_matmul(&pu)?.get(0, 0);
        let pinv = cov_pinv.sub(&pu.matmul_t(&pu)?.scale(1.0 / denom))?;
        (pinv, SspBranch::RangeRestricted)
    };
    Ok(SspInverse { pinv, branch, v, w })
}

#[derive(Debug, Clone)]
pub struct RegressionFit {
    /// Minimum-norm least-squares coefficients `(XᵀX)⁺Xᵀy`.
    pub beta_hat: Vec<f64>,
    pub ssp_pinv: Matrix,
    pub used_rank_augmenting: bool,
    pub branch: SspBranch,
    /// `‖y − Xβ̂‖₂`
    pub residual_norm: f64,
}

pub fn fit_ols(d: &Dataset, tol: &ToleranceConfig) -> Result<RegressionFit> {
    let y =
        d.y.as_ref()
            .ok_or_else(|| Error::Precondition("regression needs a response column 'y'".into()))?;
    let c = center(d, tol)?;
    let inv = ssp_pinv_via_update(&c, d.n(), tol)?;
    let ym = Matrix::column(y)?;
    let xty = d.x.t_matmul(&ym)?;
    let beta = inv.pinv.matmul(&xty)?;
    let fitted = d.x.matmul(&beta)?;
    let residual: Vec<f64> = y.iter().zip(fitted.as_slice()).map(|(a, b)| a - b).collect();
    Ok(RegressionFit {
        beta_hat: beta.into_vec(),
        ssp_pinv: inv.pinv,
        used_rank_augmenting: inv.branch == SspBranch::RankAugmenting,
        branch: inv.branch,
        residual_norm: norm2(&residual),
    })
}
