//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::panic;
use std::time::{Duration, Instant};

use common::{adjugate_inverse, nonsingular, omega, random_case, rel_vec, tol, validate, Case};
use rankup::bench::{run_bench, BenchParams};
use rankup::densecore::{numerical_rank, oracle_pinv, rel_diff, Matrix};
use rankup::regress::{assemble_ssp, center, fit_ols, ssp_pinv_via_update, Dataset};
use rankup::subspace::{validate_hypotheses, DecomposedPerturbation, Side};
use rankup::synth::Generator;
use rankup::update::{
    bartlett_inverse, left_projector, orthogonal_only_pinv, penrose_check, rank_augmenting_pinv, rank_one_pinv,
    right_projector, symmetric_pinv, woodbury_inverse,
};

const CORPUS: usize = 500;
const CORPUS_SEED: u64 = 0x5eed_0001;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn corpus() -> Vec<Case> {
    let mut gen = Generator::new(CORPUS_SEED);
    (0..CORPUS).map(|_| random_case(&mut gen, 20, 4)).collect()
}

fn oracle_equivalence(cases: &[Case], elapsed_build: Duration) -> Outcome {
    let start = Instant::now();
    let t = tol();
    let mut worst = 0.0f64;
    for c in cases {
        let fast = rank_augmenting_pinv(&c.problem);
        let oracle = oracle_pinv(&omega(&c.raw), &t).unwrap();
        worst = worst.max(rel_diff(&fast, &oracle));
    }
    let secs = (elapsed_build + start.elapsed()).as_secs_f64();
    outcome(
        worst <= 1e-7 && secs < 30.0,
        format!(
            "{} instances, max rel err {worst:.2e} (≤ 1e-7), {secs:.2}s (< 30s)",
            cases.len()
        ),
    )
}

/// Largest Penrose residual divided by its bound; passing means ≤ 1.
fn penrose_ratio(omega: &Matrix, candidate: &Matrix) -> f64 {
    let r = penrose_check(omega, candidate, &tol()).unwrap();
    r.max_residual() / r.bound
}

fn penrose_suite(cases: &[Case]) -> Outcome {
    let t = tol();
    let mut gen = Generator::new(CORPUS_SEED ^ 2);
    let mut worst = [0.0f64; 4];
    for c in cases {
        let p = &c.problem;
        let om = p.omega();
        worst[0] = worst[0].max(penrose_ratio(&om, &rank_augmenting_pinv(p)));

        // No column-space perturbation: Ω = A + W₁GW₂ᵀ.
        let c1 = p.c1().matmul(&Matrix::identity(p.k())).unwrap();
        let om3 = p
            .a()
            .add(&p.w1().matmul(p.g()).unwrap().matmul_t(p.w2()).unwrap())
            .unwrap();
        let eq3 = orthogonal_only_pinv(p.a_pinv(), &c1, p.c2(), p.g()).unwrap();
        worst[1] = worst[1].max(penrose_ratio(&om3, &eq3));

        // Symmetric A with a shared perturbation V + W.
        let ell = p.ell();
        let rank = numerical_rank(p.a(), &t).unwrap();
        let (a_sym, q) = gen.symmetric_with_rank(ell, rank);
        let x = gen.normal_matrix(ell, p.k());
        let v = q
            .columns(0, rank)
            .matmul(&q.columns(0, rank).t_matmul(&x).unwrap())
            .unwrap();
        let w = x.sub(&v).unwrap();
        let g = p.g();
        let om4 = a_sym.add(&x.matmul(g).unwrap().matmul_t(&x).unwrap()).unwrap();
        let eq4 = symmetric_pinv(&a_sym, &v, &w, g, &t).unwrap();
        worst[2] = worst[2].max(penrose_ratio(&om4, &eq4));

        // Rank one with G = 1, built from the first columns.
        let (v1, w1) = (p.v1().col(0), p.w1().col(0));
        let (v2, w2) = (p.v2().col(0), p.w2().col(0));
        let x1 = Matrix::column(&c.raw.x1.col(0)).unwrap();
        let x2 = Matrix::column(&c.raw.x2.col(0)).unwrap();
        let om6 = p.a().add(&x1.matmul_t(&x2).unwrap()).unwrap();
        let eq6 = rank_one_pinv(p.a(), &v1, &w1, &v2, &w2, &t).unwrap();
        worst[3] = worst[3].max(penrose_ratio(&om6, &eq6));
    }
    outcome(
        worst.iter().all(|&r| r <= 1.0),
        format!(
            "residual/bound maxima: rank-k {:.2e}, orthogonal-only {:.2e}, symmetric {:.2e}, rank-one {:.2e} (≤ 1)",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

fn projector_identities(cases: &[Case]) -> Outcome {
    let t = tol();
    let mut worst_identity = 0.0f64;
    let mut worst_shape = 0.0f64;
    let mut rank_misses = 0;
    for c in cases {
        let p = &c.problem;
        let om = p.omega();
        let om_pinv = oracle_pinv(&om, &t).unwrap();
        let expected_rank = numerical_rank(p.a(), &t).unwrap() + p.k();
        for (direct, closed) in [
            (om.matmul(&om_pinv).unwrap(), left_projector(p)),
            (om_pinv.matmul(&om).unwrap(), right_projector(p)),
        ] {
            worst_identity = worst_identity.max(rel_diff(&closed, &direct));
            let idem = closed.matmul(&closed).unwrap().sub(&closed).unwrap().frob_norm();
            let asym = closed.asymmetry().unwrap();
            worst_shape = worst_shape.max(idem.max(asym) / (1.0 + closed.frob_norm()));
            if numerical_rank(&closed, &t).unwrap() != expected_rank {
                rank_misses += 1;
            }
        }
    }
    outcome(
        worst_identity <= 1e-8 && worst_shape <= 1e-8 && rank_misses == 0,
        format!(
            "identity max rel {worst_identity:.2e}, idempotence/symmetry max rel {worst_shape:.2e} (≤ 1e-8), \
             rank mismatches {rank_misses}"
        ),
    )
}

fn reduction_chain() -> Outcome {
    let t = tol();
    let mut gen = Generator::new(CORPUS_SEED ^ 4);
    let (mut d3, mut d6, mut d5) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        // V = 0.
        let Case { raw, problem } = random_case(&mut gen, 20, 4);
        let fa = rankup::densecore::svd(&raw.a, &t).unwrap();
        let zero = Matrix::zeros(problem.ell(), problem.k());
        let p1 =
            DecomposedPerturbation::from_parts_with(zero.clone(), problem.w1().clone(), &fa, Side::ColumnSpace, &t)
                .unwrap();
        let p2 = DecomposedPerturbation::from_parts_with(zero, problem.w2().clone(), &fa, Side::RowSpace, &t).unwrap();
        let orth = validate_hypotheses(p1, p2, raw.g.clone(), raw.a.clone(), &t).unwrap();
        let eq2 = rank_augmenting_pinv(&orth);
        let eq3 = orthogonal_only_pinv(orth.a_pinv(), orth.c1(), orth.c2(), orth.g()).unwrap();
        d3 = d3.max(rel_diff(&eq2, &eq3));

        // k = 1, G = 1.
        let ell = gen.range(2, 20);
        let rank = gen.range(0, ell - 1);
        let mut raw = gen.update_instance(ell, rank, 1);
        raw.g = Matrix::identity(1);
        let p = validate(raw).problem;
        let eq2 = rank_augmenting_pinv(&p);
        let eq6 = rank_one_pinv(
            p.a(),
            &p.v1().col(0),
            &p.w1().col(0),
            &p.v2().col(0),
            &p.w2().col(0),
            &t,
        )
        .unwrap();
        d6 = d6.max(rel_diff(&eq2, &eq6));

        // Nonsingular A, rank-one update; draws with 1 + v₂ᵀA⁻¹v₁ near zero
        // are redrawn since both sides then lose all accuracy.
        let ell = gen.range(1, 20);
        let (a, a_inv) = nonsingular(&mut gen, ell);
        let (v1, v2) = loop {
            let v1 = gen.normal_matrix(ell, 1);
            let v2 = gen.normal_matrix(ell, 1);
            let denom = 1.0 + v2.t_matmul(&a_inv.matmul(&v1).unwrap()).unwrap().get(0, 0);
            if denom.abs() > 0.1 {
                break (v1, v2);
            }
        };
        let eq1 = woodbury_inverse(&a, &v1, &Matrix::identity(1), &v2, &t).unwrap();
        let eq5 = bartlett_inverse(&a, &v1.col(0), &v2.col(0), &t).unwrap();
        d5 = d5.max(rel_diff(&eq1, &eq5));
    }
    outcome(
        d3 <= 1e-12 && d6 <= 1e-10 && d5 <= 1e-12,
        format!("V=0 {d3:.2e} (≤ 1e-12), k=1 {d6:.2e} (≤ 1e-10), Woodbury vs Bartlett {d5:.2e} (≤ 1e-12)"),
    )
}

fn hand_fixtures() -> Outcome {
    let t = tol();
    let a = Matrix::from_rows(&[&[2.0, 0.0], &[0.0, 0.0]]).unwrap();
    let v = Matrix::column(&[1.0, 0.0]).unwrap();
    let w = Matrix::column(&[0.0, 1.0]).unwrap();
    let p1 = DecomposedPerturbation::from_parts(v.clone(), w.clone(), &a, Side::ColumnSpace, &t).unwrap();
    let p2 = DecomposedPerturbation::from_parts(v, w, &a, Side::RowSpace, &t).unwrap();
    let p = validate_hypotheses(p1, p2, Matrix::identity(1), a, &t).unwrap();
    let got = rank_augmenting_pinv(&p);
    let literal = Matrix::from_rows(&[&[0.5, -0.5], &[-0.5, 1.5]]).unwrap();
    let err_update = got.sub(&adjugate_inverse(&p.omega())).unwrap().max_abs();
    let err_update_lit = got.sub(&literal).unwrap().max_abs();

    let d = Dataset::new(Matrix::from_rows(&[&[1.0, 1.0], &[3.0, 1.0]]).unwrap(), None).unwrap();
    let c = center(&d, &t).unwrap();
    let ssp = assemble_ssp(&c, d.n());
    let ssp_lit = Matrix::from_rows(&[&[10.0, 4.0], &[4.0, 2.0]]).unwrap();
    let inv = ssp_pinv_via_update(&c, d.n(), &t).unwrap().pinv;
    let inv_lit = Matrix::from_rows(&[&[0.5, -1.0], &[-1.0, 2.5]]).unwrap();
    let err_ssp = ssp.sub(&ssp_lit).unwrap().max_abs();
    let err_inv = inv.sub(&adjugate_inverse(&ssp_lit)).unwrap().max_abs();
    let err_inv_lit = inv.sub(&inv_lit).unwrap().max_abs();

    let worst = err_update
        .max(err_update_lit)
        .max(err_ssp)
        .max(err_inv)
        .max(err_inv_lit);
    outcome(
        worst <= 1e-12,
        format!("update fixture {err_update:.1e}, SSP {err_ssp:.1e}, SSP⁺ {err_inv:.1e} (max abs ≤ 1e-12)"),
    )
}

fn singularity_scaling() -> Outcome {
    let t = tol();
    let mut gen = Generator::new(CORPUS_SEED ^ 6);
    let (ell, rank) = (6, 4);
    let (a, q) = gen.symmetric_with_rank(ell, rank);
    let inside = q.columns(0, rank).matmul(&gen.normal_matrix(rank, 1)).unwrap().col(0);
    let w_dir = q
        .columns(rank, ell)
        .matmul(&gen.normal_matrix(ell - rank, 1))
        .unwrap()
        .col(0);
    let w_norm = w_dir.iter().map(|x| x * x).sum::<f64>().sqrt();

    let scales = [1e-1, 1e-2, 1e-3, 1e-4];
    let mut points = Vec::new();
    let mut oracle_err = 0.0f64;
    for &s in &scales {
        let w: Vec<f64> = w_dir.iter().map(|x| s * x / w_norm).collect();
        let pinv = rank_one_pinv(&a, &inside, &w, &inside, &w, &t).unwrap();
        let x: Vec<f64> = inside.iter().zip(&w).map(|(a, b)| a + b).collect();
        let xm = Matrix::column(&x).unwrap();
        let om = a.add(&xm.matmul_t(&xm).unwrap()).unwrap();
        oracle_err = oracle_err.max(rel_diff(&pinv, &oracle_pinv(&om, &t).unwrap()));
        points.push((s.log10(), pinv.frob_norm().log10()));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    outcome(
        (slope + 2.0).abs() <= 0.1,
        format!("log-log slope {slope:.4} (−2 ± 0.1); max rel err vs SVD oracle {oracle_err:.1e}"),
    )
}

fn regression_equivalence() -> Outcome {
    let t = tol();
    let mut gen = Generator::new(CORPUS_SEED ^ 7);
    let (mut d_ssp, mut d_beta) = (0.0f64, 0.0f64);
    for _ in 0..200 {
        let n = gen.range(2, 50);
        let ell = gen.range(1, 8);
        let n_const = gen.range(0, 3.min(ell));
        let d = gen.dataset(n, ell, n_const);
        let c = center(&d, &t).unwrap();
        let inv = ssp_pinv_via_update(&c, n, &t).unwrap().pinv;
        let ssp_oracle = oracle_pinv(&d.x.t_matmul(&d.x).unwrap(), &t).unwrap();
        d_ssp = d_ssp.max(rel_diff(&inv, &ssp_oracle));

        let fit = fit_ols(&d, &t).unwrap();
        let y = Matrix::column(d.y.as_ref().unwrap()).unwrap();
        let beta_oracle = oracle_pinv(&d.x, &t).unwrap().matmul(&y).unwrap();
        d_beta = d_beta.max(rel_vec(&fit.beta_hat, beta_oracle.as_slice()));
    }
    outcome(
        d_ssp <= 1e-7 && d_beta <= 1e-7,
        format!("200 datasets, SSP⁺ max rel {d_ssp:.2e}, β̂ max rel {d_beta:.2e} (≤ 1e-7)"),
    )
}

fn performance() -> Outcome {
    let params = BenchParams {
        ell: 512,
        rank: 500,
        k: 4,
        trials: 10,
        seed: CORPUS_SEED,
    };
    let r = run_bench(&params, &tol()).unwrap();
    outcome(
        r.speedup() >= 5.0 && r.max_err < 1e-6,
        format!(
            "ℓ=512 rank 500 k=4, {} trials: update {:.2} ms, full {:.1} ms, speedup {:.1}× (≥ 5×), max rel err {:.2e} (< 1e-6)",
            r.trials,
            r.t_update_ns as f64 / 1e6,
            r.t_full_ns as f64 / 1e6,
            r.speedup(),
            r.max_err
        ),
    )
}

fn run(index: usize, name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let result = panic::catch_unwind(panic::AssertUnwindSafe(f));
    let secs = start.elapsed().as_secs_f64();
    let o = result.unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        outcome(false, format!("panicked: {msg}"))
    });
    println!(
        "{} [{index}] {name}: {} [{secs:.2}s]",
        if o.pass { "PASS" } else { "FAIL" },
        o.detail
    );
    o.pass
}

fn main() {
    let build = Instant::now();
    let cases = corpus();
    let build_time = build.elapsed();

    let results = [
        run(1, "oracle equivalence", || oracle_equivalence(&cases, build_time)),
        run(2, "Penrose conditions", || penrose_suite(&cases)),
        run(3, "projector identities", || projector_identities(&cases)),
        run(4, "reduction chain", reduction_chain),
        run(5, "hand fixtures", hand_fixtures),
        run(6, "singularity scaling", singularity_scaling),
        run(7, "regression equivalence", regression_equivalence),
        run(8, "performance", performance),
    ];
    let failed = results.iter().filter(|&&p| !p).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
