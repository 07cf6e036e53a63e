#![allow(dead_code)]

use rankup::densecore::{inverse, Matrix};
use rankup::subspace::{decompose, validate_hypotheses, Side};
use rankup::synth::{Generator, RawInstance};
use rankup::{ToleranceConfig, UpdateProblem};

pub fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

pub struct Case {
    pub raw: RawInstance,
    pub problem: UpdateProblem,
}

/// Random `(ℓ, rank(A), k)` with `2 ≤ ℓ ≤ max_ell`, `1 ≤ k ≤ max_k` and
/// `rank(A) ≤ ℓ − k`.
pub fn dims(gen: &mut Generator, max_ell: usize, max_k: usize) -> (usize, usize, usize) {
    let ell = gen.range(2, max_ell);
    let k = gen.range(1, max_k.min(ell));
    let rank = gen.range(0, ell - k);
    (ell, rank, k)
}

/// Splits the raw factors against `A` and validates the problem.
pub fn validate(raw: RawInstance) -> Case {
    let t = tol();
    let p1 = decompose(&raw.x1, &raw.a, Side::ColumnSpace, &t).expect("split X1");
    let p2 = decompose(&raw.x2, &raw.a, Side::RowSpace, &t).expect("split X2");
    let problem = validate_hypotheses(p1, p2, raw.g.clone(), raw.a.clone(), &t).expect("hypotheses");
    Case { raw, problem }
}

pub fn random_case(gen: &mut Generator, max_ell: usize, max_k: usize) -> Case {
    let (ell, rank, k) = dims(gen, max_ell, max_k);
    validate(gen.update_instance(ell, rank, k))
}

/// `‖a − b‖₂ / (1 + ‖b‖₂)` for vectors.
pub fn rel_vec(a: &[f64], b: &[f64]) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let n: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    d / (1.0 + n)
}

/// Inverse of a 2×2 matrix through its adjugate.
pub fn adjugate_inverse(m: &Matrix) -> Matrix {
    let (a, b, c, d) = (m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1));
    let det = a * d - b * c;
    Matrix::from_rows(&[&[d / det, -b / det], &[-c / det, a / det]]).unwrap()
}

/// `A + X₁GX₂ᵀ` from the raw inputs.
pub fn omega(raw: &RawInstance) -> Matrix {
    raw.a
        .add(&raw.x1.matmul(&raw.g).unwrap().matmul_t(&raw.x2).unwrap())
        .unwrap()
}

/// Nonsingular `ℓ×ℓ` matrix with singular values in `[0.5, ∞)`.
pub fn nonsingular(gen: &mut Generator, ell: usize) -> (Matrix, Matrix) {
    let (a, _, _) = gen.square_with_rank(ell, ell);
    let a_inv = inverse(&a).unwrap();
    (a, a_inv)
}
