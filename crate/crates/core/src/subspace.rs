//! Column-space projectors and the split `X = V + W` of a perturbation into
//! a part inside a reference subspace and a part orthogonal to it.

use std::fmt;

use crate::densecore::{cholesky_solve, oracle_pinv, svd, Matrix, SvdFactors, ToleranceConfig};
use crate::error::{Error, Hypothesis, Result};
use crate::update::UpdateProblem;

/// Which fundamental subspace of `A` a perturbation is split against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `M(A)`, for the left factor `X₁`.
    ColumnSpace,
    /// `M(Aᵀ)`, for the right factor `X₂`.
    RowSpace,
}

impl Side {
    /// 1 for the left factor, 2 for the right.
    pub fn index(self) -> usize {
        match self {
            Side::ColumnSpace => 1,
            Side::RowSpace => 2,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::ColumnSpace => "column space",
            Side::RowSpace => "row space",
        })
    }
}

/// `X = V + W` with `V` inside the reference subspace and `W` orthogonal to
/// it, together with `B = WᵀW` and `C = W·B⁻¹`.
#[derive(Debug, Clone)]
pub struct DecomposedPerturbation {
    pub v: Matrix,
    pub w: Matrix,
    pub b: Matrix,
    /// `None` when `B` is rank-deficient.
    pub c: Option<Matrix>,
    pub b_rank_full: bool,
    pub side: Side,
}

impl DecomposedPerturbation {
    /// Perturbation rank `k`.
    pub fn k(&self) -> usize {
        self.v.cols()
    }

    /// `V + W`.
    pub fn x(&self) -> Matrix {
        self.v.add(&self.w).expect("components share a shape")
    }

    /// Validates an externally supplied split against `a`.
    pub fn from_parts(v: Matrix, w: Matrix, a: &Matrix, side: Side, tol: &ToleranceConfig) -> Result<Self> {
        let f = svd(a, tol)?;
        Self::from_parts_with(v, w, &f, side, tol)
    }

    /// As [`from_parts`](Self::from_parts) with the SVD of `A` already at hand.
    pub fn from_parts_with(
        v: Matrix,
        w: Matrix,
        factors: &SvdFactors,
        side: Side,
        tol: &ToleranceConfig,
    ) -> Result<Self> {
        if v.shape() != w.shape() {
            return Err(Error::shape("from_parts", v.shape(), w.shape()));
        }
        check_rows(&v, factors, side)?;
        let x_norm = v.add(&w)?.frob_norm();
        let band = tol.subspace_tol * x_norm;

        let pv = project(factors, side, &v)?;
        if pv.sub(&v)?.frob_norm() > band {
            return Err(Error::Hypothesis(Hypothesis::NotInRange {
                name: v_name(side),
                side,
            }));
        }
        if project(factors, side, &w)?.frob_norm() > band {
            return Err(Error::Hypothesis(Hypothesis::NotOrthogonal {
                name: w_name(side),
                side,
            }));
        }
        Ok(finish(v, w, x_norm, side, tol))
    }
}

fn v_name(side: Side) -> &'static str {
    match side {
        Side::ColumnSpace => "V1",
        Side::RowSpace => "V2",
    }
}

fn w_name(side: Side) -> &'static str {
    match side {
        Side::ColumnSpace => "W1",
        Side::RowSpace => "W2",
    }
}

fn check_rows(x: &Matrix, factors: &SvdFactors, side: Side) -> Result<()> {
    let (ref_rows, ref_cols) = (factors.input_rows(), factors.input_cols());
    let needed = match side {
        Side::ColumnSpace => ref_rows,
        Side::RowSpace => ref_cols,
    };
    if x.rows() != needed {
        return Err(Error::shape("decompose", x.shape(), (ref_rows, ref_cols)));
    }
    Ok(())
}

fn project(factors: &SvdFactors, side: Side, x: &Matrix) -> Result<Matrix> {
    match side {
        Side::ColumnSpace => factors.project_onto_columns(x),
        Side::RowSpace => factors.project_onto_rows(x),
    }
}

/// Builds `B`, `C` and the rank flag.
///
/// `B` counts as rank-deficient when its numerical rank falls short of `k`,
/// when its smallest eigenvalue is below `(subspace_tol·‖X‖_F)²` (the
/// orthogonal part is rounding noise), or when the Cholesky solve fails.
fn finish(v: Matrix, w: Matrix, x_norm: f64, side: Side, tol: &ToleranceConfig) -> DecomposedPerturbation {
    let k = w.cols();
    let b = w.t_matmul(&w).expect("square Gram matrix");
    let mut c = None;
    if k > 0 && !b.is_zero() {
        let noise_floor = (tol.subspace_tol * x_norm).powi(2);
        let full = match svd(&b, tol) {
            Ok(f) => f.numerical_rank == k && f.sigma[k - 1] > noise_floor,
            Err(_) => false,
        };
        if full {
            // C = W·B⁻¹, i.e. Cᵀ solves B·Cᵀ = Wᵀ.
            c = cholesky_solve(&b, &w.transpose()).ok().map(|ct| ct.transpose());
        }
    }
    DecomposedPerturbation {
        v,
        w,
        b,
        b_rank_full: c.is_some(),
        c,
        side,
    }
}

/// Orthogonal projector `U·Uᵀ` onto `M(a)`.
pub fn column_space_projector(a: &Matrix, tol: &ToleranceConfig) -> Result<Matrix> {
    Ok(svd(a, tol)?.column_projector())
}

/// Splits `x` against `M(a)` or `M(aᵀ)`.
pub fn decompose(x: &Matrix, a: &Matrix, side: Side, tol: &ToleranceConfig) -> Result<DecomposedPerturbation> {
    let f = svd(a, tol)?;
    decompose_with(x, &f, side, tol)
}

/// As [`decompose`] with the SVD of the reference matrix already computed.
pub fn decompose_with(
    x: &Matrix,
    factors: &SvdFactors,
    side: Side,
    tol: &ToleranceConfig,
) -> Result<DecomposedPerturbation> {
    check_rows(x, factors, side)?;
    let v = project(factors, side, x)?;
    let w = x.sub(&v)?;
    Ok(finish(v, w, x.frob_norm(), side, tol))
}

/// Checks the hypotheses of the rank-augmenting identity and bundles the
/// inputs. `A⁺` is computed here once and cached on the problem.
pub fn validate_hypotheses(
    p1: DecomposedPerturbation,
    p2: DecomposedPerturbation,
    g: Matrix,
    a: Matrix,
    tol: &ToleranceConfig,
) -> Result<UpdateProblem> {
    if !a.is_square() {
        return Err(Error::Hypothesis(Hypothesis::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        }));
    }
    let a_pinv = oracle_pinv(&a, tol)?;
    validate_hypotheses_with_pinv(p1, p2, g, a, a_pinv, tol)
}

/// As [`validate_hypotheses`] for callers that already hold `A⁺`.
pub fn validate_hypotheses_with_pinv(
    p1: DecomposedPerturbation,
    p2: DecomposedPerturbation,
    g: Matrix,
    a: Matrix,
    a_pinv: Matrix,
    tol: &ToleranceConfig,
) -> Result<UpdateProblem> {
    if !a.is_square() {
        return Err(Error::Hypothesis(Hypothesis::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        }));
    }
    let ell = a.rows();
    if a_pinv.shape() != (ell, ell) {
        return Err(Error::shape("validate_hypotheses", a.shape(), a_pinv.shape()));
    }
    if p1.side != Side::ColumnSpace {
        return Err(Error::Hypothesis(Hypothesis::WrongSide {
            name: "X1",
            expected: Side::ColumnSpace,
        }));
    }
    if p2.side != Side::RowSpace {
        return Err(Error::Hypothesis(Hypothesis::WrongSide {
            name: "X2",
            expected: Side::RowSpace,
        }));
    }
    let k = p1.k();
    if p1.v.rows() != ell || p2.v.rows() != ell || p2.k() != k {
        return Err(Error::shape("validate_hypotheses", p1.v.shape(), p2.v.shape()));
    }
    if g.shape() != (k, k) {
        return Err(Error::shape("validate_hypotheses", g.shape(), (k, k)));
    }
    if k > ell {
        return Err(Error::shape("validate_hypotheses", (k, k), (ell, ell)));
    }

    let a_norm = a.frob_norm();
    let x1_norm = p1.x().frob_norm();
    let x2_norm = p2.x().frob_norm();
    // W₁ ⊥ M(A) ⇔ AᵀW₁ = 0 and W₂ ⊥ M(Aᵀ) ⇔ A·W₂ = 0.
    if a.t_matmul(&p1.w)?.frob_norm() > tol.subspace_tol * a_norm * x1_norm {
        return Err(Error::Hypothesis(Hypothesis::NotOrthogonal {
            name: "W1",
            side: Side::ColumnSpace,
        }));
    }
    if a.matmul(&p2.w)?.frob_norm() > tol.subspace_tol * a_norm * x2_norm {
        return Err(Error::Hypothesis(Hypothesis::NotOrthogonal {
            name: "W2",
            side: Side::RowSpace,
        }));
    }

    let c1 = match (&p1.c, p1.b_rank_full) {
        (Some(c), true) => c.clone(),
        _ => {
            return Err(Error::Hypothesis(Hypothesis::SingularB {
                side: Side::ColumnSpace,
            }))
        }
    };
    let c2 = match (&p2.c, p2.b_rank_full) {
        (Some(c), true) => c.clone(),
        _ => return Err(Error::Hypothesis(Hypothesis::SingularB { side: Side::RowSpace })),
    };

    let g_rank = if k == 0 { 0 } else { svd(&g, tol)?.numerical_rank };
    if g_rank != k {
        return Err(Error::Hypothesis(Hypothesis::SingularG { k, rank: g_rank }));
    }
    let g_inv =
        crate::densecore::inverse(&g).map_err(|_| Error::Hypothesis(Hypothesis::SingularG { k, rank: g_rank }))?;

    Ok(UpdateProblem::from_validated(
        a, p1.v, p1.w, c1, p2.v, p2.w, c2, g, g_inv, a_pinv,
    ))
}
