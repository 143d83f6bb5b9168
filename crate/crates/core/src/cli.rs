//! Command-line front end. Every JSON document carries the tool version and
//! an echo of the parsed configuration; sweeps are written as CSV.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bosehubbard::{
    build_balanced_hamiltonian, build_hamiltonian, closed_form_spectrum, BHParams,
};
use crate::error::{invalid, Error, Result};
use crate::jordan::{
    detect_jordan_structure, transition_matrix, transition_residual, PartitionSpec,
};
use crate::l1::{reconstruct, refine_root, solve_secular, L1Problem};
use crate::lgeq2::{
    rescaled_problem, search_real_domain, solve_l2, solve_leading_order,
    solve_rescaled_leading_order, LProblem,
};
use crate::numkit::spectrum::sort_roots;
use crate::numkit::{eig_oracle, read_matrix, Matrix, SpectrumReport, Tolerances};
use crate::partitions::{count_nontrivial, count_oracle, enumerate_ep_partitions, MAX_ENUMERATE_K};
use crate::scalar::ExactComplex;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Parser, Serialize)]
#[command(
    name = "epkit",
    version,
    about = "Perturbed spectra near degenerate exceptional points"
)]
pub struct RunConfig {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GlobalOpts {
    /// Imaginary-part threshold for calling a root real
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol_reality: f64,
    /// Relative rank threshold for Jordan-structure detection
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol_rank: f64,
    /// Series truncation order (default 2K)
    #[arg(long, global = true)]
    pub order: Option<usize>,
    /// Seed for randomized searches
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write output here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Catalog of EP partitionings of K into parts >= 2
    Partitions {
        #[arg(long = "K")]
        k: usize,
    },
    /// Jordan structure and transition matrix of a matrix at eta
    Jordan {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        eta_re: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        eta_im: f64,
        /// Fail unless this partition is detected
        #[arg(long)]
        expect: Option<PartitionSpec>,
    },
    /// Two-mode Bose-Hubbard matrix, oracle and closed-form spectra
    BoseHubbard {
        #[arg(long = "K")]
        k: usize,
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        v: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        c: f64,
    },
    /// Secular-equation spectrum of J^(K)(0) + lambda V
    L1Solve {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        lambda_im: f64,
        /// Newton-refine each root on the untruncated equation
        #[arg(long)]
        refine: bool,
    },
    /// Partitioned solver for several Jordan blocks
    L2Solve {
        #[arg(long)]
        partition: PartitionSpec,
        #[arg(long, required_unless_present = "rescaled")]
        matrix: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        /// Build V from this W by the rescaled first-column postulates
        #[arg(long, conflicts_with = "matrix")]
        rescaled: Option<PathBuf>,
    },
    /// Roots over a logarithmic lambda grid, as CSV
    Sweep {
        /// Block sizes; a single block (or none) uses the L=1 solver
        #[arg(long)]
        partition: Option<PartitionSpec>,
        #[arg(long, required_unless_present = "rescaled")]
        matrix: Option<PathBuf>,
        #[arg(long, conflicts_with = "matrix")]
        rescaled: Option<PathBuf>,
        #[arg(long)]
        lambda_min: f64,
        #[arg(long)]
        lambda_max: f64,
        #[arg(long, default_value_t = 9)]
        points: usize,
    },
    /// Reality of the rescaled leading-order spectrum, or a seeded search
    /// for a W with all-real spectrum
    Classify {
        #[arg(long)]
        partition: PartitionSpec,
        #[arg(long, required_unless_present = "search")]
        rescaled: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-2)]
        lambda: f64,
        /// Randomized search; requires --seed
        #[arg(long, conflicts_with = "rescaled")]
        search: bool,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
    },
}

/// Rendered output and the exit status it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub status: i32,
}

impl GlobalOpts {
    pub fn tolerances(&self) -> Result<Tolerances> {
        let tol = Tolerances {
            reality: self.tol_reality,
            rank: self.tol_rank,
            ..Tolerances::default()
        };
        tol.validate()?;
        Ok(tol)
    }
}

fn envelope(config: &RunConfig, result: Value) -> Result<String> {
    let doc = json!({
        "tool": "epkit",
        "version": VERSION,
        "config": config,
        "result": result,
    });
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

fn to_value<T: Serialize>(x: &T) -> Result<Value> {
    Ok(serde_json::to_value(x)?)
}

/// Largest distance from a reference value to its nearest candidate.
fn max_nearest(reference: &[Complex64], candidates: &[Complex64]) -> Option<f64> {
    if candidates.is_empty() {
        return None;
    }
    Some(
        reference
            .iter()
            .map(|e| {
                candidates
                    .iter()
                    .map(|r| (r - e).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max),
    )
}

fn partitions(k: usize) -> Result<Value> {
    let nontrivial = count_nontrivial(k)?;
    let listed = if k <= MAX_ENUMERATE_K {
        let cat = enumerate_ep_partitions(k)?;
        Some(
            cat.entries
                .iter()
                .map(|p| p.parts().to_vec())
                .collect::<Vec<_>>(),
        )
    } else {
        None
    };
    Ok(json!({
        "K": k,
        "partitions": listed,
        "nontrivial": nontrivial,
        "nontrivial_oracle": count_oracle(k)?,
    }))
}

fn jordan(
    matrix: &PathBuf,
    eta: Complex64,
    expect: Option<&PartitionSpec>,
    tol: &Tolerances,
) -> Result<Value> {
    let h = read_matrix(matrix)?;
    if !h.is_square() {
        return Err(invalid("jordan needs a square matrix"));
    }
    let partition = detect_jordan_structure(&h, eta, tol.rank)?;
    if let Some(e) = expect {
        if e != &partition {
            return Err(Error::StructureMismatch {
                expected: e.kernel_dims(),
                detected: partition.kernel_dims(),
            });
        }
    }
    let q = transition_matrix(&h, &partition, eta, tol.rank)?;
    let residual = transition_residual(&h, &q, &partition, eta);
    Ok(json!({
        "partition": partition,
        "kernel_dims": partition.kernel_dims(),
        "transition_matrix": q,
        "transition_residual": residual,
        "hamiltonian_norm": h.frobenius_norm(),
    }))
}

fn bose_hubbard(k: usize, gamma: f64, v: f64, c: f64, tol: &Tolerances) -> Result<Value> {
    let p = BHParams::new(k, gamma, v, c)?;
    let h: Matrix<Complex64> = build_hamiltonian(&p);
    // Exact characteristic polynomial of the square-root-free similar form.
    let oracle = eig_oracle(&build_balanced_hamiltonian::<ExactComplex>(&p), tol)?;
    let mut result = json!({
        "matrix": h,
        "oracle": oracle,
    });
    if c == 0.0 && v == 1.0 {
        let cf = closed_form_spectrum(k, gamma);
        let deviation = cf.real.then(|| {
            let mut got = oracle.values();
            sort_roots(&mut got);
            got.iter()
                .zip(&cf.values)
                .map(|(a, b)| (a - Complex64::new(*b, 0.0)).norm())
                .fold(0.0, f64::max)
        });
        result["closed_form"] = to_value(&cf)?;
        result["max_deviation"] = to_value(&deviation)?;
    }
    if gamma.abs() == 1.0 {
        result["jordan_structure"] =
            match detect_jordan_structure(&h, Complex64::new(0.0, 0.0), tol.rank) {
                Ok(part) => to_value(&part)?,
                Err(e) => json!({ "error": e.to_string() }),
            };
    }
    Ok(result)
}

fn l1_solve(
    matrix: &PathBuf,
    lambda: Complex64,
    order: Option<usize>,
    refine: bool,
    tol: &Tolerances,
) -> Result<Value> {
    let problem = L1Problem::new(read_matrix(matrix)?, lambda)?;
    let order = order.unwrap_or(2 * problem.k());
    let spectrum = solve_secular(&problem, order, tol)?;
    let oracle = eig_oracle(&problem.hamiltonian(), tol)?;
    let states = spectrum
        .values()
        .into_iter()
        .map(|e| {
            if refine {
                refine_root(&problem, e, tol)
            } else {
                reconstruct(&problem, e, tol)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(json!({
        "order": order,
        "spectrum": spectrum,
        "oracle": oracle,
        "max_oracle_deviation": max_nearest(&oracle.values(), &spectrum.values()),
        "states": states,
    }))
}

fn load_l_problem(
    partition: &PartitionSpec,
    matrix: Option<&PathBuf>,
    rescaled: Option<&PathBuf>,
    lambda: f64,
) -> Result<LProblem> {
    match (matrix, rescaled) {
        (_, Some(w)) => rescaled_problem(&read_matrix(w)?, partition, lambda),
        (Some(v), None) => LProblem::new(
            partition.clone(),
            read_matrix(v)?,
            Complex64::new(lambda, 0.0),
        ),
        (None, None) => Err(invalid("either --matrix or --rescaled is required")),
    }
}

fn l2_solve(
    partition: &PartitionSpec,
    matrix: Option<&PathBuf>,
    rescaled: Option<&PathBuf>,
    lambda: f64,
    order: Option<usize>,
    tol: &Tolerances,
) -> Result<(Value, bool)> {
    let problem = load_l_problem(partition, matrix, rescaled, lambda)?;
    let order = order.unwrap_or(2 * problem.k());
    let reduced = solve_leading_order(&problem, true, tol)?;
    let sol = solve_l2(&problem, order, tol)?;
    let oracle = eig_oracle(&problem.hamiltonian(), tol)?;
    let refined =
        SpectrumReport::from_roots(crate::numkit::Provenance::Refined, sol.refined.eps(), tol);
    let mut result = json!({
        "order": order,
        "leading_order_reduced": reduced.spectrum,
        "leading_order": sol.leading,
        "refined": sol.refined,
        "refined_spectrum": refined,
        "oracle": oracle,
        "max_oracle_deviation": max_nearest(&oracle.values(), &sol.refined.eps()),
        "classification": {
            "refined_all_real": refined.all_real(),
            "oracle_all_real": oracle.all_real(),
            "oracle_all_distinct": oracle.all_distinct(),
        },
        "complete": sol.complete,
    });
    if let Some(w) = rescaled {
        result["rescaled"] = to_value(&solve_rescaled_leading_order(
            &read_matrix(w)?,
            partition,
            lambda,
            tol,
        )?)?;
    }
    Ok((result, sol.complete))
}

/// `points` values from `lo` to `hi`, evenly spaced in `log λ`.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) || points == 0 {
        return Err(invalid(
            "sweep needs 0 < lambda-min <= lambda-max and at least one point",
        ));
    }
    if points == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..points)
        .map(|i| {
            if i == 0 {
                lo
            } else if i + 1 == points {
                hi
            } else {
                (a + (b - a) * i as f64 / (points - 1) as f64).exp()
            }
        })
        .collect())
}

fn sweep_point(
    partition: Option<&PartitionSpec>,
    base: &Matrix<Complex64>,
    rescaled: bool,
    lambda: f64,
    order: Option<usize>,
    tol: &Tolerances,
) -> Result<Vec<Complex64>> {
    let single = partition.is_none_or(|p| p.l() == 1);
    let mut roots = if single {
        let problem = L1Problem::new(base.clone(), Complex64::new(lambda, 0.0))?;
        let order = order.unwrap_or(2 * problem.k());
        solve_secular(&problem, order, tol)?.values()
    } else {
        let partition = partition.expect("checked above");
        let problem = if rescaled {
            rescaled_problem(base, partition, lambda)?
        } else {
            LProblem::new(partition.clone(), base.clone(), Complex64::new(lambda, 0.0))?
        };
        let order = order.unwrap_or(2 * problem.k());
        let sol = solve_l2(&problem, order, tol)?;
        if !sol.complete {
            return Err(Error::NoConvergence {
                iterations: tol.max_iterations,
                residuals: sol.refined.failed.iter().map(|_| f64::NAN).collect(),
                max_residual: f64::NAN,
            });
        }
        sol.refined.eps()
    };
    sort_roots(&mut roots);
    Ok(roots)
}

fn sweep(
    partition: Option<&PartitionSpec>,
    matrix: Option<&PathBuf>,
    rescaled: Option<&PathBuf>,
    grid: &[f64],
    order: Option<usize>,
    tol: &Tolerances,
) -> Result<String> {
    let base = match (matrix, rescaled) {
        (_, Some(w)) => read_matrix(w)?,
        (Some(v), None) => read_matrix(v)?,
        (None, None) => return Err(invalid("either --matrix or --rescaled is required")),
    };
    if rescaled.is_some() && partition.is_none_or(|p| p.l() < 2) {
        return Err(invalid(
            "--rescaled needs a partition with at least two blocks",
        ));
    }
    let rows: Vec<Vec<Complex64>> = grid
        .par_iter()
        .map(|&lam| sweep_point(partition, &base, rescaled.is_some(), lam, order, tol))
        .collect::<Result<_>>()?;
    let mut csv = String::from("lambda,root_index,re,im,is_real\n");
    for (lam, roots) in grid.iter().zip(rows) {
        for (i, z) in roots.iter().enumerate() {
            let real = crate::numkit::is_real(*z, tol.reality);
            writeln!(csv, "{lam:e},{i},{:e},{:e},{real}", z.re, z.im).expect("writing to a String");
        }
    }
    Ok(csv)
}

fn classify(
    partition: &PartitionSpec,
    rescaled: Option<&PathBuf>,
    lambda: f64,
    search: bool,
    trials: usize,
    seed: Option<u64>,
    tol: &Tolerances,
) -> Result<(Value, bool)> {
    if partition.l() < 2 {
        return Err(invalid(
            "classify needs a partition with at least two blocks",
        ));
    }
    if search {
        let seed = seed.ok_or_else(|| invalid("--search requires --seed"))?;
        let found = search_real_domain(partition, seed, trials, tol)?;
        let ok = found.is_some();
        return Ok((json!({ "found": ok, "sample": found }), ok));
    }
    let w = rescaled.ok_or_else(|| invalid("--rescaled W.json or --search is required"))?;
    let sol = solve_rescaled_leading_order(&read_matrix(w)?, partition, lambda, tol)?;
    Ok((
        json!({
            "all_real": sol.e_spectrum.all_real(),
            "all_distinct": sol.e_spectrum.all_distinct(),
            "solution": sol,
        }),
        true,
    ))
}

/// Executes one parsed command.
pub fn run(config: &RunConfig) -> Result<Outcome> {
    let g = &config.global;
    let tol = g.tolerances()?;
    let done = |value: Value, ok: bool| -> Result<Outcome> {
        Ok(Outcome {
            text: envelope(config, value)?,
            status: if ok { 0 } else { 3 },
        })
    };
    match &config.command {
        Command::Partitions { k } => done(partitions(*k)?, true),
        Command::Jordan {
            matrix,
            eta_re,
            eta_im,
            expect,
        } => done(
            jordan(
                matrix,
                Complex64::new(*eta_re, *eta_im),
                expect.as_ref(),
                &tol,
            )?,
            true,
        ),
        Command::BoseHubbard { k, gamma, v, c } => {
            done(bose_hubbard(*k, *gamma, *v, *c, &tol)?, true)
        }
        Command::L1Solve {
            matrix,
            lambda,
            lambda_im,
            refine,
        } => done(
            l1_solve(
                matrix,
                Complex64::new(*lambda, *lambda_im),
                g.order,
                *refine,
                &tol,
            )?,
            true,
        ),
        Command::L2Solve {
            partition,
            matrix,
            lambda,
            rescaled,
        } => {
            let (v, ok) = l2_solve(
                partition,
                matrix.as_ref(),
                rescaled.as_ref(),
                *lambda,
                g.order,
                &tol,
            )?;
            done(v, ok)
        }
        Command::Sweep {
            partition,
            matrix,
            rescaled,
            lambda_min,
            lambda_max,
            points,
        } => {
            let grid = log_grid(*lambda_min, *lambda_max, *points)?;
            let text = sweep(
                partition.as_ref(),
                matrix.as_ref(),
                rescaled.as_ref(),
                &grid,
                g.order,
                &tol,
            )?;
            Ok(Outcome { text, status: 0 })
        }
        Command::Classify {
            partition,
            rescaled,
            lambda,
            search,
            trials,
        } => {
            let (v, ok) = classify(
                partition,
                rescaled.as_ref(),
                *lambda,
                *search,
                *trials,
                g.seed,
                &tol,
            )?;
            done(v, ok)
        }
    }
}

/// Parses `args`, runs, writes the output and returns the exit code:
/// 0 success, 2 input error, 3 numerical failure.
pub fn main_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let outcome = match run(&config) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return if e.is_input_error() { 2 } else { 3 };
        }
    };
    let written = match &config.global.out {
        Some(path) => std::fs::write(path, &outcome.text),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(outcome.text.as_bytes())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return 2;
    }
    if outcome.status != 0 {
        eprintln!("error: numerical failure, partial results written");
    }
    outcome.status
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> RunConfig {
        RunConfig::try_parse_from(std::iter::once("epkit").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn partitions_command() {
        let out = run(&parse(&["partitions", "--K", "8"])).unwrap();
        let v: Value = serde_json::from_str(&out.text).unwrap();
        assert_eq!(v["result"]["partitions"].as_array().unwrap().len(), 7);
        assert_eq!(v["version"], VERSION);
        assert_eq!(v["config"]["command"]["partitions"]["k"], 8);
        let big: Value =
            serde_json::from_str(&run(&parse(&["partitions", "--K", "150"])).unwrap().text)
                .unwrap();
        assert!(big["result"]["partitions"].is_null());
    }

    #[test]
    fn bose_hubbard_command() {
        let out = run(&parse(&["bose-hubbard", "--K", "4", "--gamma", "0"])).unwrap();
        let v: Value = serde_json::from_str(&out.text).unwrap();
        let roots: Vec<f64> = v["result"]["oracle"]["roots"]
            .as_array()
            .unwrap()
            .iter()
            .map(|r| r["value"][0].as_f64().unwrap())
            .collect();
        for (r, e) in roots.iter().zip([-3.0, -1.0, 1.0, 3.0]) {
            assert!((r - e).abs() < 1e-12);
        }
        assert!(v["result"]["max_deviation"].as_f64().unwrap() < 1e-12);
        let ep: Value = serde_json::from_str(
            &run(&parse(&["bose-hubbard", "--K", "5", "--gamma", "-1"]))
                .unwrap()
                .text,
        )
        .unwrap();
        assert_eq!(ep["result"]["jordan_structure"], json!([5]));
    }

    #[test]
    fn grid_endpoints() {
        let g = log_grid(1e-6, 1e-2, 5).unwrap();
        assert_eq!(g[0], 1e-6);
        assert_eq!(g[4], 1e-2);
        assert!((g[2] / 1e-4 - 1.0).abs() < 1e-12);
        assert!(log_grid(0.0, 1.0, 3).is_err());
    }

    #[test]
    fn bad_tolerance_is_input_error() {
        let err = run(&parse(&["--tol-reality=-1", "partitions", "--K", "4"])).unwrap_err();
        assert!(err.is_input_error());
        let err = run(&parse(&["classify", "--partition", "2,2", "--search"])).unwrap_err();
        assert!(err.is_input_error());
    }
}
