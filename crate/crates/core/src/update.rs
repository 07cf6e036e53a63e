//! Inverse and pseudoinverse update identities.
//!
//! For a singular square `A` and a perturbation `(V₁+W₁)·G·(V₂+W₂)ᵀ` whose
//! `W` parts lie outside the column and row spaces of `A`, the
//! pseudoinverse of
//!
//! ```text
//! Ω = A + (V₁ + W₁)·G·(V₂ + W₂)ᵀ
//! ```
//!
//! is available in closed form from `A⁺`, with `Cᵢ = Wᵢ(WᵢᵀWᵢ)⁻¹`:
//!
//! ```text
//! Ω⁺ = A⁺ − C₂V₂ᵀA⁺ − A⁺V₁C₁ᵀ + C₂(G⁻¹ + V₂ᵀA⁺V₁)C₁ᵀ
//! ```
//!
//! The classical Woodbury and Bartlett identities for nonsingular `A` live
//! here as well, alongside the checks used to certify a candidate inverse.

use log::warn;

use crate::densecore::{inverse, norm2, oracle_pinv, svd, Matrix, ToleranceConfig};
use crate::error::{Error, Hypothesis, Result};
use crate::subspace::{DecomposedPerturbation, Side};

/// Validated inputs of the rank-augmenting identity.
///
/// Only [`crate::subspace::validate_hypotheses`] builds these, so every
/// instance satisfies the hypotheses. `A⁺`, `C₁`, `C₂` and `G⁻¹` are
/// computed at construction and never change afterwards.
#[derive(Debug, Clone)]
pub struct UpdateProblem {
    a: Matrix,
    v1: Matrix,
    w1: Matrix,
    c1: Matrix,
    v2: Matrix,
    w2: Matrix,
    c2: Matrix,
    g: Matrix,
    g_inv: Matrix,
    a_pinv: Matrix,
}

impl UpdateProblem {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_validated(
        a: Matrix,
        v1: Matrix,
        w1: Matrix,
        c1: Matrix,
        v2: Matrix,
        w2: Matrix,
        c2: Matrix,
        g: Matrix,
        g_inv: Matrix,
        a_pinv: Matrix,
    ) -> Self {
        UpdateProblem {
            a,
            v1,
            w1,
            c1,
            v2,
            w2,
            c2,
            g,
            g_inv,
            a_pinv,
        }
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }
    pub fn v1(&self) -> &Matrix {
        &self.v1
    }
    pub fn w1(&self) -> &Matrix {
        &self.w1
    }
    pub fn c1(&self) -> &Matrix {
        &self.c1
    }
    pub fn v2(&self) -> &Matrix {
        &self.v2
    }
    pub fn w2(&self) -> &Matrix {
        &self.w2
    }
    pub fn c2(&self) -> &Matrix {
        &self.c2
    }
    pub fn g(&self) -> &Matrix {
        &self.g
    }
    pub fn g_inv(&self) -> &Matrix {
        &self.g_inv
    }
    pub fn a_pinv(&self) -> &Matrix {
        &self.a_pinv
    }

    /// Perturbation rank.
    pub fn k(&self) -> usize {
        self.g.rows()
    }

    /// Dimension of `A`.
    pub fn ell(&self) -> usize {
        self.a.rows()
    }

    /// `Ω = A + (V₁+W₁)·G·(V₂+W₂)ᵀ`.
    pub fn omega(&self) -> Matrix {
        let x1 = self.v1.add(&self.w1).expect("validated shapes");
        let x2 = self.v2.add(&self.w2).expect("validated shapes");
        let low_rank = x1
            .matmul(&self.g)
            .and_then(|t| t.matmul_t(&x2))
            .expect("validated shapes");
        self.a.add(&low_rank).expect("validated shapes")
    }
}

/// Frobenius residuals of the four Penrose conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenroseReport {
    /// `‖ΩXΩ − Ω‖`
    pub res_a: f64,
    /// `‖XΩX − X‖`
    pub res_b: f64,
    /// `‖(ΩX)ᵀ − ΩX‖`
    pub res_c: f64,
    /// `‖(XΩ)ᵀ − XΩ‖`
    pub res_d: f64,
    pub passed: bool,
    pub tol_used: f64,
    /// `tol_used·(1+‖Ω‖_F)·(1+‖X‖_F)`, the bound each residual is held to.
    pub bound: f64,
}

impl PenroseReport {
    pub fn max_residual(&self) -> f64 {
        self.res_a.max(self.res_b).max(self.res_c).max(self.res_d)
    }
}

/// Residuals of the four weaker conditions that may replace the full-rank
/// requirements on `G` and `Bᵢ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemarkReport {
    /// `‖G·W₂ᵀC₂·G⁺·C₁ᵀ − C₁ᵀ‖`
    pub res_1: f64,
    /// `‖G·W₂ᵀC₂·V₂ᵀ − G·V₂ᵀ‖`
    pub res_2: f64,
    /// `‖C₂·G⁺·C₁ᵀW₁·G − C₂‖`
    pub res_3: f64,
    /// `‖V₁·C₁ᵀW₁·G − V₁·G‖`
    pub res_4: f64,
    pub passed: bool,
}

fn check_square(op: &'static str, a: &Matrix) -> Result<()> {
    if a.is_square() {
        Ok(())
    } else {
        Err(Error::shape(op, a.shape(), (a.cols(), a.rows())))
    }
}

/// Woodbury: `(A + X₁GX₂ᵀ)⁻¹ = A⁻¹ − A⁻¹X₁(G⁻¹ + X₂ᵀA⁻¹X₁)⁻¹X₂ᵀA⁻¹`.
pub fn woodbury_inverse(a: &Matrix, x1: &Matrix, g: &Matrix, x2: &Matrix, tol: &ToleranceConfig) -> Result<Matrix> {
    check_square("woodbury_inverse", a)?;
    let ell = a.rows();
    let k = g.rows();
    check_square("woodbury_inverse", g)?;
    if x1.shape() != (ell, k) {
        return Err(Error::shape("woodbury_inverse", x1.shape(), (ell, k)));
    }
    if x2.shape() != (ell, k) {
        return Err(Error::shape("woodbury_inverse", x2.shape(), (ell, k)));
    }
    let rank = svd(a, tol)?.numerical_rank;
    if rank < ell {
        return Err(Error::Precondition(format!(
            "A is singular (numerical rank {rank} < {ell}); use rank_augmenting_pinv instead"
        )));
    }
    let a_inv = inverse(a)?;
    if k == 0 {
        return Ok(a_inv);
    }
    if svd(g, tol)?.numerical_rank < k {
        return Err(Error::Precondition("G is singular".into()));
    }
    let g_inv = inverse(g)?;

    let ainv_x1 = a_inv.matmul(x1)?;
    let x2t_ainv = x2.t_matmul(&a_inv)?;
    let capacitance = g_inv.add(&x2.t_matmul(&ainv_x1)?)?;
    let cap_rank = svd(&capacitance, tol)?.numerical_rank;
    if cap_rank < k {
        return Err(Error::SingularUpdate(format!(
            "capacitance G⁻¹ + X₂ᵀA⁻¹X₁ has rank {cap_rank} < {k}: the updated matrix is singular"
        )));
    }
    let correction = ainv_x1.matmul(&inverse(&capacitance)?)?.matmul(&x2t_ainv)?;
    a_inv.sub(&correction)
}

/// `A⁺ − C₂V₂ᵀA⁺ − A⁺V₁C₁ᵀ + C₂(G⁻¹ + V₂ᵀA⁺V₁)C₁ᵀ`.
fn rank_augmenting_formula(
    a_pinv: &Matrix,
    v1: &Matrix,
    c1: &Matrix,
    v2: &Matrix,
    c2: &Matrix,
    g_inv: &Matrix,
) -> Result<Matrix> {
    let ap_v1 = a_pinv.matmul(v1)?; // ℓ×k
    let v2t_ap = v2.t_matmul(a_pinv)?; // k×ℓ
    let middle = g_inv.add(&v2.t_matmul(&ap_v1)?)?; // k×k
    let left = c2.matmul(&v2t_ap)?;
    let right = ap_v1.matmul_t(c1)?;
    let core = c2.matmul(&middle)?.matmul_t(c1)?;
    a_pinv.sub(&left)?.sub(&right)?.add(&core)
}

/// Pseudoinverse of `Ω` for a validated problem.
pub fn rank_augmenting_pinv(p: &UpdateProblem) -> Matrix {
    rank_augmenting_formula(&p.a_pinv, &p.v1, &p.c1, &p.v2, &p.c2, &p.g_inv).expect("validated shapes")
}

/// The `V₁ = V₂ = 0` special case: `A⁺ + C₂G⁻¹C₁ᵀ`.
pub fn orthogonal_only_pinv(a_pinv: &Matrix, c1: &Matrix, c2: &Matrix, g: &Matrix) -> Result<Matrix> {
    check_square("orthogonal_only_pinv", a_pinv)?;
    check_square("orthogonal_only_pinv", g)?;
    let (ell, k) = (a_pinv.rows(), g.rows());
    for c in [c1, c2] {
        if c.shape() != (ell, k) {
            return Err(Error::shape("orthogonal_only_pinv", c.shape(), (ell, k)));
        }
    }
    let g_inv = inverse(g).map_err(|_| {
        Error::Hypothesis(Hypothesis::SingularG {
            k,
            rank: k.saturating_sub(1),
        })
    })?;
    a_pinv.add(&c2.matmul(&g_inv)?.matmul_t(c1)?)
}

/// Symmetric case `Ω = A + (V+W)G(V+W)ᵀ` with `A = Aᵀ`.
///
/// Uses `A⁺ = (A⁺)ᵀ` so that `CVᵀA⁺` is the transpose of `A⁺VCᵀ`.
pub fn symmetric_pinv(a: &Matrix, v: &Matrix, w: &Matrix, g: &Matrix, tol: &ToleranceConfig) -> Result<Matrix> {
    check_square("symmetric_pinv", a)?;
    let asym = a.asymmetry().unwrap_or(f64::INFINITY);
    if asym > 1e-12 * a.frob_norm() {
        return Err(Error::Precondition(format!(
            "A is not symmetric (‖A − Aᵀ‖_F = {asym:e})"
        )));
    }
    let factors = svd(a, tol)?;
    let p1 = DecomposedPerturbation::from_parts_with(v.clone(), w.clone(), &factors, Side::ColumnSpace, tol)?;
    let p2 = DecomposedPerturbation::from_parts_with(v.clone(), w.clone(), &factors, Side::RowSpace, tol)?;
    let problem = crate::subspace::validate_hypotheses_with_pinv(p1, p2, g.clone(), a.clone(), factors.pinv(), tol)?;

    let ap = problem.a_pinv();
    let c = problem.c1();
    let ap_v = ap.matmul(v)?;
    let t = ap_v.matmul_t(c)?;
    let middle = problem.g_inv().add(&v.t_matmul(&ap_v)?)?;
    let core = c.matmul(&middle)?.matmul_t(c)?;
    ap.sub(&t)?.sub(&t.transpose())?.add(&core)
}

fn column_vector(name: &'static str, v: &[f64], ell: usize) -> Result<Matrix> {
    if v.len() != ell {
        return Err(Error::shape(name, (v.len(), 1), (ell, 1)));
    }
    Matrix::column(v)
}

/// Bartlett: `(A + v₁v₂ᵀ)⁻¹ = A⁻¹ − (A⁻¹v₁)(v₂ᵀA⁻¹) / (1 + v₂ᵀA⁻¹v₁)`.
pub fn bartlett_inverse(a: &Matrix, v1: &[f64], v2: &[f64], tol: &ToleranceConfig) -> Result<Matrix> {
    check_square("bartlett_inverse", a)?;
    let ell = a.rows();
    let v1 = column_vector("bartlett_inverse", v1, ell)?;
    let v2 = column_vector("bartlett_inverse", v2, ell)?;
    let rank = svd(a, tol)?.numerical_rank;
    if rank < ell {
        return Err(Error::Precondition(format!(
            "A is singular (numerical rank {rank} < {ell}); use rank_one_pinv instead"
        )));
    }
    let a_inv = inverse(a)?;
    let ainv_v1 = a_inv.matmul(&v1)?;
    let v2t_ainv = v2.t_matmul(&a_inv)?;
    let quad = v2.t_matmul(&ainv_v1)?.get(0, 0);
    let denom = 1.0 + quad;
    if denom.abs() <= tol.rank_rel_tol * (1.0 + quad.abs()) {
        return Err(Error::SingularUpdate(format!(
            "1 + v₂ᵀA⁻¹v₁ = {denom:e} vanishes: the updated matrix is singular"
        )));
    }
    a_inv.sub(&ainv_v1.matmul(&v2t_ainv)?.scale(1.0 / denom))
}

/// Whether `w₁` and `w₂` are parallel within `subspace_tol`.
pub fn w_parallel(w1: &[f64], w2: &[f64], tol: &ToleranceConfig) -> bool {
    let (n1, n2) = (norm2(w1), norm2(w2));
    if n1 == 0.0 || n2 == 0.0 {
        return false;
    }
    let cos: f64 = w1.iter().zip(w2).map(|(a, b)| (a / n1) * (b / n2)).sum();
    1.0 - cos.abs() <= tol.subspace_tol
}

/// Rank-one case with `G = 1` and `Cᵢ = wᵢ/‖wᵢ‖²`:
///
/// ```text
/// Ω⁺ = A⁺ − w₂v₂ᵀA⁺/‖w₂‖² − A⁺v₁w₁ᵀ/‖w₁‖² + (1 + v₂ᵀA⁺v₁)·w₂w₁ᵀ/(‖w₁‖²‖w₂‖²)
/// ```
///
/// Non-parallel `w₁`, `w₂` are accepted with a warning; the rank-k identity
/// at `k = 1` needs no such condition and the formula stays exact.
pub fn rank_one_pinv(
    a: &Matrix,
    v1: &[f64],
    w1: &[f64],
    v2: &[f64],
    w2: &[f64],
    tol: &ToleranceConfig,
) -> Result<Matrix> {
    check_square("rank_one_pinv", a)?;
    let ell = a.rows();
    let factors = svd(a, tol)?;
    let cols = [
        column_vector("rank_one_pinv", v1, ell)?,
        column_vector("rank_one_pinv", w1, ell)?,
        column_vector("rank_one_pinv", v2, ell)?,
        column_vector("rank_one_pinv", w2, ell)?,
    ];
    let [v1m, w1m, v2m, w2m] = cols;

    for (index, v, w) in [(1, &v1m, &w1m), (2, &v2m, &w2m)] {
        let wn = w.frob_norm();
        let xn = v.add(w)?.frob_norm();
        // ‖w‖² is the singular value the update adds, so it is compared
        // with the rank threshold of A.
        if wn == 0.0 || wn * wn <= factors.rank_threshold || wn <= tol.subspace_tol * xn {
            return Err(Error::Hypothesis(Hypothesis::VanishingW { index }));
        }
    }
    DecomposedPerturbation::from_parts_with(v1m.clone(), w1m.clone(), &factors, Side::ColumnSpace, tol)?;
    DecomposedPerturbation::from_parts_with(v2m.clone(), w2m.clone(), &factors, Side::RowSpace, tol)?;
    if !w_parallel(w1, w2, tol) {
        warn!("rank_one_pinv: w2 is not parallel to w1; applying the general rank-one formula");
    }

    let ap = factors.pinv();
    let n1 = w1m.frob_norm().powi(2);
    let n2 = w2m.frob_norm().powi(2);
    let ap_v1 = ap.matmul(&v1m)?;
    let v2t_ap = v2m.t_matmul(&ap)?;
    let gain = 1.0 + v2m.t_matmul(&ap_v1)?.get(0, 0);

    let t2 = w2m.matmul(&v2t_ap)?.scale(1.0 / n2);
    let t3 = ap_v1.matmul_t(&w1m)?.scale(1.0 / n1);
    let t4 = w2m.matmul_t(&w1m)?.scale(gain / (n1 * n2));
    ap.sub(&t2)?.sub(&t3)?.add(&t4)
}

/// `ΩΩ⁺ = AA⁺ + W₁C₁ᵀ`, the projector onto `M(Ω)`.
pub fn left_projector(p: &UpdateProblem) -> Matrix {
    p.a.matmul(&p.a_pinv)
        .and_then(|aa| aa.add(&p.w1.matmul_t(&p.c1)?))
        .expect("validated shapes")
}

/// `Ω⁺Ω = A⁺A + C₂W₂ᵀ`, the projector onto `M(Ωᵀ)`.
pub fn right_projector(p: &UpdateProblem) -> Matrix {
    p.a_pinv
        .matmul(&p.a)
        .and_then(|aa| aa.add(&p.c2.matmul_t(&p.w2)?))
        .expect("validated shapes")
}

/// `A⁺A + wwᵀ/‖w‖²`, the row-space projector of a rank-one update.
pub fn row_space_projector(a: &Matrix, w: &[f64], tol: &ToleranceConfig) -> Result<Matrix> {
    let factors = svd(a, tol)?;
    let wm = column_vector("row_space_projector", w, a.cols())?;
    let wn = wm.frob_norm();
    if wn == 0.0 || wn * wn <= factors.rank_threshold {
        return Err(Error::Hypothesis(Hypothesis::VanishingW { index: 2 }));
    }
    if factors.project_onto_rows(&wm)?.frob_norm() > tol.subspace_tol * wn {
        return Err(Error::Hypothesis(Hypothesis::NotOrthogonal {
            name: "w",
            side: Side::RowSpace,
        }));
    }
    factors.row_projector().add(&wm.matmul_t(&wm)?.scale(1.0 / (wn * wn)))
}

/// Evaluates the four Penrose conditions for `candidate` as a
/// pseudoinverse of `omega`.
pub fn penrose_check(omega: &Matrix, candidate: &Matrix, tol: &ToleranceConfig) -> Result<PenroseReport> {
    if candidate.shape() != (omega.cols(), omega.rows()) {
        return Err(Error::shape("penrose_check", omega.shape(), candidate.shape()));
    }
    let ox = omega.matmul(candidate)?;
    let xo = candidate.matmul(omega)?;
    let res_a = ox.matmul(omega)?.sub(omega)?.frob_norm();
    let res_b = xo.matmul(candidate)?.sub(candidate)?.frob_norm();
    let res_c = ox.asymmetry().expect("square");
    let res_d = xo.asymmetry().expect("square");
    let bound = tol.penrose_tol * (1.0 + omega.frob_norm()) * (1.0 + candidate.frob_norm());
    let passed = [res_a, res_b, res_c, res_d].iter().all(|&r| r <= bound);
    Ok(PenroseReport {
        res_a,
        res_b,
        res_c,
        res_d,
        passed,
        tol_used: tol.penrose_tol,
        bound,
    })
}

/// Evaluates the weaker conditions on a validated problem.
pub fn remark_conditions_check(p: &UpdateProblem, tol: &ToleranceConfig) -> RemarkReport {
    remark_conditions(&p.v1, &p.w1, &p.c1, &p.v2, &p.w2, &p.c2, &p.g, tol).expect("validated shapes")
}

/// Evaluates the weaker conditions on raw parts. `G⁺` comes from the SVD
/// oracle so that singular `G` can be probed.
#[allow(clippy::too_many_arguments)]
pub fn remark_conditions(
    v1: &Matrix,
    w1: &Matrix,
    c1: &Matrix,
    v2: &Matrix,
    w2: &Matrix,
    c2: &Matrix,
    g: &Matrix,
    tol: &ToleranceConfig,
) -> Result<RemarkReport> {
    let g_pinv = if g.is_zero() {
        g.transpose()
    } else {
        oracle_pinv(g, tol)?
    };
    let c1t = c1.transpose();
    let gw2c2 = g.matmul(&w2.t_matmul(c2)?)?; // G·W₂ᵀC₂
    let c1tw1g = c1t.matmul(w1)?.matmul(g)?; // C₁ᵀW₁·G

    let lhs1 = gw2c2.matmul(&g_pinv)?.matmul(&c1t)?;
    let res_1 = lhs1.sub(&c1t)?.frob_norm();
    let g_v2t = g.matmul_t(v2)?;
    let res_2 = gw2c2.matmul_t(v2)?.sub(&g_v2t)?.frob_norm();
    let lhs3 = c2.matmul(&g_pinv)?.matmul(&c1tw1g)?;
    let res_3 = lhs3.sub(c2)?.frob_norm();
    let v1g = v1.matmul(g)?;
    let res_4 = v1.matmul(&c1tw1g)?.sub(&v1g)?.frob_norm();

    let passed = res_1 <= tol.penrose_tol * (1.0 + c1t.frob_norm())
        && res_2 <= tol.penrose_tol * (1.0 + g_v2t.frob_norm())
        && res_3 <= tol.penrose_tol * (1.0 + c2.frob_norm())
        && res_4 <= tol.penrose_tol * (1.0 + v1g.frob_norm());
    Ok(RemarkReport {
        res_1,
        res_2,
        res_3,
        res_4,
        passed,
    })
}
