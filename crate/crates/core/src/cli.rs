//! Command-line front end. All file I/O of the crate happens here and in
//! [`crate::persist`].

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bloch::build_basis;
use crate::certify::verify_matrices;
use crate::knaster::{
    circle_profile, continuity_coefficients, knaster_s1, optimize, scan_f0, CircleProfile,
    OptContext, OptimizerConfig, ScanSchedule, S1Solution,
};
use crate::persist::{
    read_json, rotation_from_rows, scan_csv, to_json_string, write_json, write_text, BasisFile,
    FiducialFile, ResultFile, RunManifest,
};
use crate::rotation::RotationState;
use crate::simplex::regular_simplex;
use crate::tracepoly::DEFAULT_PURITY_TOL;
use crate::weyl::{seed_from_fiducial, seed_sic};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;

/// Environment variable capping the number of parallel scan jobs.
pub const THREADS_ENV: &str = "SIMPLEXFORGE_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "simplexforge",
    version,
    about = "SIC-POVM geometry and generalized SIC-POVM families on the generalized Bloch sphere"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Dump the generalized Gell-Mann basis as JSON.
    Basis {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Vertices of the regular simplex in R^N.
    Simplex {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// A verified seed SIC-POVM (n = 2, 3, or any n with --fiducial).
    SeedSic {
        #[arg(long)]
        dim: usize,
        /// JSON file {"dim": n, "fiducial": [[re, im], ...]}.
        #[arg(long)]
        fiducial: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Orient the simplex so every vertex reaches a common value.
    Optimize {
        #[arg(long)]
        dim: usize,
        #[arg(long, allow_negative_numbers = true)]
        f0: f64,
        #[command(flatten)]
        opt: OptArgs,
        /// Result file whose orientation is used as the starting point.
        #[arg(long)]
        start: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Continuation scan over evenly spaced targets.
    Scan {
        #[arg(long)]
        dim: usize,
        #[arg(long, allow_negative_numbers = true)]
        f0_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        f0_max: f64,
        #[arg(long)]
        steps: usize,
        #[command(flatten)]
        opt: OptArgs,
        /// Independent jobs from the common start, one RNG stream each.
        #[arg(long)]
        parallel: bool,
        #[arg(long)]
        start: Option<PathBuf>,
        /// Directory receiving one JSON file per target.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Summary CSV path; defaults to <out-dir>/summary.csv.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Cubic trace on the circle through three elements of a result file.
    Circle {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 1)]
        indices: Vec<usize>,
        #[arg(long, default_value_t = 360)]
        samples: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Recompute every check of a result file from its matrices.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Report JSON path.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Equal-value rigid configurations on the circle.
    KnasterS1 {
        #[arg(long, value_enum)]
        function: S1Function,
        #[arg(long)]
        points: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args, Clone)]
struct OptArgs {
    #[arg(long, default_value_t = 3)]
    power: usize,
    #[arg(long, default_value_t = 1e-18)]
    tol: f64,
    #[arg(long, default_value_t = 500)]
    max_iter: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-3)]
    damping: f64,
}

impl OptArgs {
    fn config(&self, target: f64) -> OptimizerConfig {
        OptimizerConfig {
            power: self.power,
            target,
            tol_residual: self.tol,
            max_iters: self.max_iter,
            lm_damping: self.damping,
            seed: self.seed,
            ..OptimizerConfig::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum S1Function {
    /// 3x²y - y³, equal to sin 3θ on the circle.
    Sin3,
    /// The height y.
    Height,
    Const,
}

impl S1Function {
    fn eval(self, x: f64, y: f64) -> f64 {
        match self {
            S1Function::Sin3 => 3.0 * x * x * y - y * y * y,
            S1Function::Height => y,
            S1Function::Const => 1.0,
        }
    }
}

/// Parses `argv` (program name first) and runs the command; returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let command_line: Vec<String> = argv
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    match dispatch(cli.command, command_line) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::NotConverged { .. } => EXIT_NOT_CONVERGED,
                _ => EXIT_USAGE,
            }
        }
    }
}

fn emit<T: Serialize>(value: &T, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => write_json(path, value),
        None => {
            print!("{}", to_json_string(value)?);
            Ok(())
        }
    }
}

fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&t| t > 0)
            .map(Some)
            .ok_or_else(|| Error::Precondition(format!("{THREADS_ENV}={v:?} is not a positive integer"))),
        Err(_) => Ok(None),
    }
}

fn start_state(ctx: &OptContext, start: Option<&Path>, seed: u64) -> Result<RotationState> {
    let Some(path) = start else {
        return ctx.default_start(seed);
    };
    let file: ResultFile = read_json(path)?;
    if file.dim != ctx.n {
        return Err(Error::DimensionMismatch {
            expected: ctx.n,
            actual: file.dim,
        });
    }
    if let Some(rows) = &file.rotation {
        return RotationState::from_matrix(rotation_from_rows(rows)?);
    }
    let targets: Vec<_> = file
        .bloch_vertices()?
        .into_iter()
        .map(|v| v.coords)
        .collect();
    RotationState::aligning(&ctx.reference, &targets)
}

#[derive(Debug, Serialize)]
struct CircleFile<'a> {
    manifest: RunManifest,
    input: String,
    indices: [usize; 3],
    #[serde(flatten)]
    profile: &'a CircleProfile,
    closed_form_constant: f64,
    closed_form_cos3_coefficient: f64,
}

#[derive(Debug, Serialize)]
struct S1File<'a> {
    manifest: RunManifest,
    function: S1Function,
    points: usize,
    #[serde(flatten)]
    solution: &'a S1Solution,
}

fn dispatch(command: Command, command_line: Vec<String>) -> Result<i32> {
    let clock = Instant::now();
    match command {
        Command::Basis { dim, output } => {
            let basis = build_basis(dim)?;
            emit(&BasisFile::of(&basis), output.as_deref())?;
            Ok(EXIT_OK)
        }
        Command::Simplex { dim, output } => {
            let s = regular_simplex(dim)?;
            let rows: Vec<Vec<f64>> = s
                .vertices()
                .iter()
                .map(|v| v.iter().copied().collect())
                .collect();
            emit(&rows, output.as_deref())?;
            Ok(EXIT_OK)
        }
        Command::SeedSic {
            dim,
            fiducial,
            output,
        } => {
            let cand = match &fiducial {
                Some(path) => {
                    let f: FiducialFile = read_json(path)?;
                    if f.dim != dim {
                        return Err(Error::DimensionMismatch {
                            expected: dim,
                            actual: f.dim,
                        });
                    }
                    seed_from_fiducial(dim, &f.vector()?, 1e-10)?
                }
                None => seed_sic(dim)?,
            };
            let ctx = OptContext::new(dim)?;
            let mut manifest = RunManifest::new(
                command_line,
                serde_json::json!({ "dim": dim, "fiducial": fiducial }),
                0,
            )
            .with_tolerance("verify", 1e-10);
            manifest.wall_time = clock.elapsed().as_secs_f64();
            let file = ResultFile::from_sic(&cand, &ctx, manifest)?;
            emit(&file, output.as_deref())?;
            Ok(EXIT_OK)
        }
        Command::Optimize {
            dim,
            f0,
            opt,
            start,
            output,
        } => {
            let ctx = OptContext::new(dim)?;
            let cfg = opt.config(f0);
            cfg.validate()?;
            let state = start_state(&ctx, start.as_deref(), cfg.seed)?;
            let result = optimize(&state, &ctx, &cfg)?;
            let mut manifest = RunManifest::new(
                command_line,
                serde_json::json!({ "dim": dim, "optimizer": cfg, "start": start }),
                cfg.seed,
            )
            .with_tolerance("residual", cfg.tol_residual)
            .with_tolerance("psd", crate::knaster::PSD_THRESHOLD)
            .with_tolerance("purity", DEFAULT_PURITY_TOL);
            manifest.wall_time = clock.elapsed().as_secs_f64();
            let file = ResultFile::from_family(&result, manifest);
            emit(&file, output.as_deref())?;
            eprintln!(
                "f0 {:.16e}  residual_sum {:.3e}  iterations {}  restarts {}  converged {}",
                f0, result.residual_sum, result.iterations, result.restarts, result.converged
            );
            Ok(if result.converged {
                EXIT_OK
            } else {
                EXIT_NOT_CONVERGED
            })
        }
        Command::Scan {
            dim,
            f0_min,
            f0_max,
            steps,
            opt,
            parallel,
            start,
            out_dir,
            csv,
        } => {
            let ctx = OptContext::new(dim)?;
            let cfg = opt.config(f0_min);
            cfg.validate()?;
            let state = start_state(&ctx, start.as_deref(), cfg.seed)?;
            let schedule = if parallel {
                ScanSchedule::Parallel
            } else {
                ScanSchedule::Sequential
            };
            let out_dir =
                out_dir.unwrap_or_else(|| PathBuf::from(format!("scan_d{dim}_m{}", cfg.power)));
            let csv_path = csv.unwrap_or_else(|| out_dir.join("summary.csv"));
            let base = RunManifest::new(
                command_line,
                serde_json::json!({
                    "dim": dim,
                    "f0_min": f0_min,
                    "f0_max": f0_max,
                    "steps": steps,
                    "optimizer": cfg,
                    "start": start,
                }),
                cfg.seed,
            )
            .with_tolerance("residual", cfg.tol_residual)
            .with_tolerance("psd", crate::knaster::PSD_THRESHOLD);
            let mut base = base;
            base.schedule = Some(
                match schedule {
                    ScanSchedule::Sequential => "sequential",
                    ScanSchedule::Parallel => "parallel",
                }
                .into(),
            );

            let mut write_error: Option<Error> = None;
            let mut on_result = |e: &crate::knaster::ScanEntry| {
                let mut manifest = base.clone();
                manifest.wall_time = e.result.wall_time;
                let file = ResultFile::from_family(&e.result, manifest);
                let path = out_dir.join(format!("step_{:04}.json", e.index));
                if let Err(err) = write_json(&path, &file) {
                    write_error.get_or_insert(err);
                }
                eprintln!(
                    "[{:>4}] f0 {:+.6e}  residual_sum {:.3e}  converged {}",
                    e.index, e.f0, e.result.residual_sum, e.result.converged
                );
            };
            let entries = match (schedule, threads_from_env()?) {
                (ScanSchedule::Parallel, Some(t)) => {
                    let pool = rayon::ThreadPoolBuilder::new()
                        .num_threads(t)
                        .build()
                        .map_err(|e| Error::Precondition(e.to_string()))?;
                    pool.install(|| {
                        scan_f0(f0_min, f0_max, steps, &cfg, &state, &ctx, schedule, &mut on_result)
                    })?
                }
                _ => scan_f0(f0_min, f0_max, steps, &cfg, &state, &ctx, schedule, &mut on_result)?,
            };
            if let Some(err) = write_error {
                return Err(err);
            }
            write_text(&csv_path, &scan_csv(&entries))?;
            let converged = entries.iter().filter(|e| e.result.converged).count();
            eprintln!(
                "{converged}/{} targets converged; summary in {}",
                entries.len(),
                csv_path.display()
            );
            Ok(if converged == 0 {
                EXIT_NOT_CONVERGED
            } else {
                EXIT_OK
            })
        }
        Command::Circle {
            input,
            indices,
            samples,
            output,
        } => {
            let [a, b, c]: [usize; 3] = indices.clone().try_into().map_err(|_| {
                Error::Precondition(format!("--indices needs three values, got {indices:?}"))
            })?;
            let file: ResultFile = read_json(&input)?;
            let mats = file.hermitian_matrices()?;
            let get = |i: usize| {
                mats.get(i).ok_or_else(|| {
                    Error::Precondition(format!("index {i} out of range ({} elements)", mats.len()))
                })
            };
            let profile = circle_profile(get(a)?, get(b)?, get(c)?, samples)?;
            let (ca, cb) = continuity_coefficients(profile.dim, profile.alpha);
            let mut manifest = RunManifest::new(
                command_line,
                serde_json::json!({ "input": input, "indices": [a, b, c], "samples": samples }),
                0,
            );
            manifest.wall_time = clock.elapsed().as_secs_f64();
            let out = CircleFile {
                manifest,
                input: input.display().to_string(),
                indices: [a, b, c],
                profile: &profile,
                closed_form_constant: ca,
                closed_form_cos3_coefficient: cb,
            };
            emit(&out, output.as_deref())?;
            eprintln!(
                "alpha {:+.12}  A {:.12} (closed form {:.12})  B {:+.3e} (closed form {:+.3e})  fit residual {:.3e}",
                profile.alpha,
                profile.fitted_constant,
                ca,
                profile.fitted_cos3_coefficient,
                cb,
                profile.fit_residual
            );
            Ok(EXIT_OK)
        }
        Command::Verify { input, tol, report } => {
            let file: ResultFile = read_json(&input)?;
            let mats = file.hermitian_matrices()?;
            let rep = verify_matrices(&mats, file.power, Some(file.f0), tol)?;
            if let Some(path) = &report {
                write_json(path, &rep)?;
            }
            print!("{}", rep.table());
            Ok(if rep.flags.verdict {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAILED
            })
        }
        Command::KnasterS1 {
            function,
            points,
            tol,
            output,
        } => {
            let sol = knaster_s1(|x, y| function.eval(x, y), points, tol)?;
            let mut manifest = RunManifest::new(
                command_line,
                serde_json::json!({ "function": function, "points": points, "tol": tol }),
                0,
            )
            .with_tolerance("spread", tol);
            manifest.wall_time = clock.elapsed().as_secs_f64();
            emit(
                &S1File {
                    manifest,
                    function,
                    points,
                    solution: &sol,
                },
                output.as_deref(),
            )?;
            Ok(EXIT_OK)
        }
    }
}
