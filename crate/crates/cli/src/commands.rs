use std::fs;
use std::io::Write;
use std::path::Path;

use rankup::bench::{run_bench, BenchParams};
use rankup::densecore::{format_matrix, read_matrix, svd, write_matrix, Matrix};
use rankup::regress::{center, fit_ols, ssp_pinv_via_update, Dataset};
use rankup::subspace::{decompose_with, validate_hypotheses_with_pinv, Side};
use rankup::update::{penrose_check, rank_augmenting_pinv, woodbury_inverse, PenroseReport};
use rankup::{Error, Result, ToleranceConfig};
use serde_json::json;

use crate::args::{Format, GlobalOpts};

/// What a command concluded, before mapping to an exit code.
pub enum Outcome {
    Pass,
    VerifyFailed,
}

fn read(path: &Path) -> Result<Matrix> {
    read_matrix(path).map_err(|e| with_path(path, e))
}

fn with_path(path: &Path, e: Error) -> Error {
    match e {
        Error::Io(m) => Error::Io(format!("{}: {m}", path.display())),
        Error::Parse { line, column, message } => Error::Parse {
            line,
            column,
            message: format!("{message} (in {})", path.display()),
        },
        other => other,
    }
}

/// Report lines go to stdout unless the matrix itself does.
struct Sink {
    matrix_on_stdout: bool,
    lines: Vec<String>,
}

impl Sink {
    fn new(opts: &GlobalOpts, emits_matrix: bool) -> Self {
        Sink {
            matrix_on_stdout: emits_matrix && opts.out.is_none(),
            lines: Vec::new(),
        }
    }

    fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    fn flush(self) {
        let text = self.lines.iter().map(|l| format!("{l}\n")).collect::<String>();
        if self.matrix_on_stdout {
            eprint!("{text}");
        } else {
            print!("{text}");
        }
    }
}

fn emit_matrix(opts: &GlobalOpts, m: &Matrix) -> Result<()> {
    match &opts.out {
        Some(p) => write_matrix(p, m).map_err(|e| with_path(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(format_matrix(m).as_bytes())?;
            Ok(())
        }
    }
}

fn penrose_lines(sink: &mut Sink, r: &PenroseReport) {
    sink.line(format!("res_a: {:.3e}", r.res_a));
    sink.line(format!("res_b: {:.3e}", r.res_b));
    sink.line(format!("res_c: {:.3e}", r.res_c));
    sink.line(format!("res_d: {:.3e}", r.res_d));
    sink.line(format!("bound: {:.3e}", r.bound));
    sink.line(format!("penrose: {}", if r.passed { "pass" } else { "fail" }));
}

fn penrose_json(r: &PenroseReport) -> serde_json::Value {
    json!({
        "res_a": r.res_a,
        "res_b": r.res_b,
        "res_c": r.res_c,
        "res_d": r.res_d,
        "bound": r.bound,
        "passed": r.passed,
    })
}

fn verdict(r: &PenroseReport) -> Outcome {
    if r.passed {
        Outcome::Pass
    } else {
        Outcome::VerifyFailed
    }
}

pub fn update(opts: &GlobalOpts, a: &Path, x1: &Path, g: &Path, x2: Option<&Path>) -> Result<Outcome> {
    let tol = opts.tolerances()?;
    let a = read(a)?;
    let x1 = read(x1)?;
    let g = read(g)?;
    let x2 = match x2 {
        Some(p) => read(p)?,
        None => x1.clone(),
    };
    let (pinv, path) = dispatch_update(&a, &x1, &g, &x2, &tol)?;
    let omega = a.add(&x1.matmul(&g)?.matmul_t(&x2)?)?;
    let report = penrose_check(&omega, &pinv, &tol)?;

    emit_matrix(opts, &pinv)?;
    let mut sink = Sink::new(opts, true);
    match opts.format {
        Format::Text => {
            sink.line(format!("path: {path}"));
            penrose_lines(&mut sink, &report);
        }
        Format::Jsonl => {
            let mut v = penrose_json(&report);
            v["path"] = json!(path);
            sink.line(v.to_string());
        }
    }
    sink.flush();
    Ok(verdict(&report))
}

/// Nonsingular `A` takes the classical inverse update; otherwise the
/// factors are split against `A` and the rank-augmenting formula applies.
fn dispatch_update(
    a: &Matrix,
    x1: &Matrix,
    g: &Matrix,
    x2: &Matrix,
    tol: &ToleranceConfig,
) -> Result<(Matrix, &'static str)> {
    if !a.is_square() {
        return Err(Error::Precondition(format!(
            "A must be square, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let factors = svd(a, tol)?;
    if factors.numerical_rank == a.rows() {
        return Ok((woodbury_inverse(a, x1, g, x2, tol)?, "woodbury (Eq.1)"));
    }
    let p1 = decompose_with(x1, &factors, Side::ColumnSpace, tol)?;
    let p2 = decompose_with(x2, &factors, Side::RowSpace, tol)?;
    let problem = validate_hypotheses_with_pinv(p1, p2, g.clone(), a.clone(), factors.pinv(), tol)?;
    Ok((rank_augmenting_pinv(&problem), "rank-augmenting (Eq.2)"))
}

pub fn verify(opts: &GlobalOpts, omega: &Path, candidate: &Path) -> Result<Outcome> {
    let tol = opts.tolerances()?;
    let omega = read(omega)?;
    let candidate = read(candidate)?;
    let report = penrose_check(&omega, &candidate, &tol)?;
    let mut sink = Sink::new(opts, false);
    match opts.format {
        Format::Text => penrose_lines(&mut sink, &report),
        Format::Jsonl => sink.line(penrose_json(&report).to_string()),
    }
    sink.flush();
    Ok(verdict(&report))
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn regress(opts: &GlobalOpts, csv: &Path, no_fit: bool) -> Result<Outcome> {
    let tol = opts.tolerances()?;
    let data = Dataset::from_csv_path(csv).map_err(|e| with_path(csv, e))?;
    let centered = center(&data, &tol)?;
    let inv = ssp_pinv_via_update(&centered, data.n(), &tol)?;
    let fit = if no_fit { None } else { Some(fit_ols(&data, &tol)?) };

    if let Some(p) = &opts.out {
        write_matrix(p, &inv.pinv).map_err(|e| with_path(p, e))?;
    }
    let mut sink = Sink::new(opts, false);
    match opts.format {
        Format::Text => {
            sink.line(format!("covariates: {}", data.names.join(" ")));
            sink.line(format!("x_bar: {}", join(&centered.x_bar)));
            sink.line(format!("cov rank: {}", centered.cov_rank));
            sink.line(format!("branch: {}", inv.branch.name()));
            if let Some(f) = &fit {
                sink.line(format!("beta_hat: {}", join(&f.beta_hat)));
                sink.line(format!("residual norm: {:e}", f.residual_norm));
            }
        }
        Format::Jsonl => {
            let mut v = json!({
                "covariates": data.names,
                "x_bar": centered.x_bar,
                "cov_rank": centered.cov_rank,
                "branch": inv.branch.name(),
            });
            if let Some(f) = &fit {
                v["beta_hat"] = json!(f.beta_hat);
                v["residual_norm"] = json!(f.residual_norm);
            }
            sink.line(v.to_string());
        }
    }
    sink.flush();
    Ok(Outcome::Pass)
}

pub fn bench(opts: &GlobalOpts, params: BenchParams) -> Result<Outcome> {
    let tol = opts.tolerances()?;
    params.validate()?;
    let header = "# update timing assumes A⁺ is held: the one-time SVD of A is excluded";
    let r = run_bench(&params, &tol)?;
    let line = match opts.format {
        Format::Text => {
            println!("{header}");
            format!(
                "l={} rank={} k={} trials={} t_update_ns={} t_full_ns={} speedup={:.1} max_err={:.3e}",
                r.ell,
                r.rank,
                r.k,
                r.trials,
                r.t_update_ns,
                r.t_full_ns,
                r.speedup(),
                r.max_err
            )
        }
        Format::Jsonl => {
            eprintln!("{header}");
            json!({
                "l": r.ell,
                "k": r.k,
                "t_update_ns": r.t_update_ns as u64,
                "t_full_ns": r.t_full_ns as u64,
                "max_err": r.max_err,
            })
            .to_string()
        }
    };
    match &opts.out {
        Some(p) => fs::write(p, format!("{line}\n")).map_err(|e| with_path(p, e.into()))?,
        None => println!("{line}"),
    }
    Ok(Outcome::Pass)
}
