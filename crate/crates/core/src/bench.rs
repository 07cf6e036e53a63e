//! Timing of the rank-augmenting update against full recomputation.
//!
//! The update path starts from a held SVD of `A` (and so `A⁺`); obtaining
//! that factorization is a one-time cost and is not timed. The synthetic
//! instances are built from known factors, which are used directly. It covers the
//! split of `X₁`, `X₂`, hypothesis validation and the closed-form formula.
//! The full path forms `Ω` and runs the SVD oracle on it.

use std::time::Instant;

use crate::densecore::{oracle_pinv, rel_diff, ToleranceConfig};
use crate::error::{Error, Result};
use crate::subspace::{decompose_with, validate_hypotheses_with_pinv, Side};
use crate::synth::Generator;
use crate::update::rank_augmenting_pinv;

pub const MAX_BENCH_DIM: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchParams {
    pub ell: usize,
    pub rank: usize,
    pub k: usize,
    pub trials: usize,
    pub seed: u64,
}

impl BenchParams {
    pub fn validate(&self) -> Result<()> {
        let BenchParams {
            ell, rank, k, trials, ..
        } = *self;
        let fail = |m: String| Err(Error::Precondition(m));
        if ell == 0 || ell > MAX_BENCH_DIM {
            return fail(format!("size {ell} must lie in 1..={MAX_BENCH_DIM}"));
        }
        if rank >= ell {
            return fail(format!("rank {rank} must be below size {ell}"));
        }
        if k == 0 || k > ell - rank {
            return fail(format!("k = {k} must lie in 1..={} (size − rank)", ell - rank));
        }
        if trials == 0 {
            return fail("trials must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub ell: usize,
    pub rank: usize,
    pub k: usize,
    pub trials: usize,
    /// Median wall time of the update path.
    pub t_update_ns: u128,
    /// Median wall time of the full recomputation.
    pub t_full_ns: u128,
    /// Largest `‖update − full‖_F / (1 + ‖full‖_F)` over all trials.
    pub max_err: f64,
}

impl BenchReport {
    pub fn speedup(&self) -> f64 {
        self.t_full_ns as f64 / self.t_update_ns.max(1) as f64
    }
}

fn median(mut xs: Vec<u128>) -> u128 {
    xs.sort_unstable();
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2
    }
}

pub fn run_bench(params: &BenchParams, tol: &ToleranceConfig) -> Result<BenchReport> {
    params.validate()?;
    let mut gen = Generator::new(params.seed);
    let mut t_update = Vec::with_capacity(params.trials);
    let mut t_full = Vec::with_capacity(params.trials);
    let mut max_err = 0.0f64;

    for _ in 0..params.trials {
        let inst = gen.update_instance(params.ell, params.rank, params.k);
        // One-time factorization of A, outside the timed region.
        let factors = inst.a_factors(tol);
        let a_pinv = factors.pinv();

        let start = Instant::now();
        let p1 = decompose_with(&inst.x1, &factors, Side::ColumnSpace, tol)?;
        let p2 = decompose_with(&inst.x2, &factors, Side::RowSpace, tol)?;
        let problem = validate_hypotheses_with_pinv(p1, p2, inst.g.clone(), inst.a.clone(), a_pinv, tol)?;
        let updated = rank_augmenting_pinv(&problem);
        t_update.push(start.elapsed().as_nanos());

        let start = Instant::now();
        let omega = inst.a.add(&inst.x1.matmul(&inst.g)?.matmul_t(&inst.x2)?)?;
        let full = oracle_pinv(&omega, tol)?;
        t_full.push(start.elapsed().as_nanos());

        max_err = max_err.max(rel_diff(&updated, &full));
    }

    Ok(BenchReport {
        ell: params.ell,
        rank: params.rank,
        k: params.k,
        trials: params.trials,
        t_update_ns: median(t_update),
        t_full_ns: median(t_full),
        max_err,
    })
}
