//! Command-line front end for informativity analysis and attack synthesis.
//!
//! Exit codes are part of the interface so shell pipelines can branch on
//! verdicts:
//!   0  success (analyze: data informative; attack/minnorm: all checks pass)
//!   1  operational error (I/O, parsing, solver failure)
//!   2  usage error (from argument parsing)
//!   3  data not informative for strong observability
//!   4  per-block dimensional feasibility fails
//!   5  a target vector lies inside pi_O(Z)
//!   6  no admissible attack direction found

mod manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use nalgebra::DVector;
use serde::Serialize;

use informativity::io::{
    read_attack_spec, read_dataset, read_system_json, write_dataset_csv_dir, write_matrix_csv,
    write_system_json, AttackReportFile, InformativityReportFile, MinNormReportFile,
    PerturbationBoundFile,
};
use informativity::{
    alternating_solve, build_problem, check_perturbation_bound, max_coeff_space, run_attack,
    verify_attack, AffineSetParams, Annihilator, Error, GridConfig, InformativityReport, InputMode,
    MultistartConfig, NoiseMode, SimConfig, SystemModel, Tolerance, X0Mode,
};

use manifest::ManifestBuilder;

const EXIT_NOT_INFORMATIVE: u8 = 3;
const EXIT_DIMENSIONAL: u8 = 4;
const EXIT_TARGET_IN_IMAGE: u8 = 5;
const EXIT_DIRECTION: u8 = 6;

#[derive(Parser)]
#[command(
    name = "informativity",
    version,
    about = "Informativity-for-strong-observability analysis and stealthy data-transformation attacks"
)]
struct Cli {
    /// Relative rank tolerance threaded through all numeric decisions.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a trajectory dataset and write it as CSV blocks.
    Gen(GenArgs),
    /// Test whether a dataset is informative for strong observability.
    Analyze(AnalyzeArgs),
    /// Synthesize the constructive attack for a prescribed eigenpair.
    Attack(AttackArgs),
    /// Compute the minimum-norm attack and the vulnerability metric.
    Minnorm(MinnormArgs),
}

#[derive(Args, Serialize)]
struct GenArgs {
    /// `line5` or a path to a system JSON file with `A` present.
    #[arg(long)]
    system: String,
    /// Data horizon.
    #[arg(long = "T", default_value_t = 100)]
    t: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for the CSV blocks and manifest.
    #[arg(long)]
    out: PathBuf,
    /// Input signal: `zero` | `random` | `pe:<order>` | `feedback`.
    #[arg(long, default_value = "random")]
    input: String,
    /// Scale applied to random, pe and feedback inputs.
    #[arg(long, default_value_t = 0.05)]
    input_scale: f64,
    /// Initial state: unit (random) | ones (balanced) | comma-separated list.
    #[arg(long, default_value = "unit")]
    x0: String,
    /// Noise: `none` | `structural:<scale>` | `gaussian:<sigma>`.
    #[arg(long, default_value = "none")]
    noise: String,
}

#[derive(Args, Serialize)]
struct AnalyzeArgs {
    /// Dataset: a directory of CSV blocks or a JSON file.
    #[arg(long)]
    data: PathBuf,
    /// System JSON; defaults to `system.json` next to the data.
    #[arg(long)]
    system: Option<PathBuf>,
    /// Where to write the report JSON (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct AttackArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    system: Option<PathBuf>,
    /// Attack spec JSON: {"lambda": .., "x0": [..], "u0": [..]}.
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Serialize)]
struct MinnormArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    system: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Skip the distance lower-bound section (required for noisy data).
    #[arg(long, default_value_t = false)]
    skip_bound: bool,
    /// Coarse grid step of the unobservability-distance search.
    #[arg(long, default_value_t = 0.05)]
    grid_step: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tol = Tolerance::relative(cli.tol);
    let outcome = match cli.command {
        Command::Gen(args) => cmd_gen(args, &tol),
        Command::Analyze(args) => cmd_analyze(args, &tol),
        Command::Attack(args) => cmd_attack(args, &tol),
        Command::Minnorm(args) => cmd_minnorm(args, &tol),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

/// Maps feasibility failures onto the documented exit-code taxonomy.
fn exit_code_for(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::DimensionalInfeasible { .. }) => EXIT_DIMENSIONAL,
        Some(Error::TargetInUnobservableImage(_)) => EXIT_TARGET_IN_IMAGE,
        Some(Error::DirectionExhausted(_)) | Some(Error::PivotTooSmall(_)) => EXIT_DIRECTION,
        _ => 1,
    }
}

fn load_system(arg: &str) -> anyhow::Result<SystemModel> {
    if arg == "line5" {
        Ok(informativity::line_network_5())
    } else {
        read_system_json(Path::new(arg)).with_context(|| format!("reading system {arg}"))
    }
}

fn system_for(data_path: &Path, explicit: &Option<PathBuf>) -> anyhow::Result<SystemModel> {
    let path = match explicit {
        Some(p) => p.clone(),
        None => {
            let candidate = if data_path.is_dir() {
                data_path.join("system.json")
            } else {
                data_path.with_file_name("system.json")
            };
            if !candidate.exists() {
                return Err(anyhow!(
                    "no --system given and {} does not exist",
                    candidate.display()
                ));
            }
            candidate
        }
    };
    Ok(read_system_json(&path)?)
}

fn annihilator_for(sys: &SystemModel, tol: &Tolerance) -> anyhow::Result<Annihilator> {
    Ok(Annihilator::compute(&sys.e, &sys.f, tol)?)
}

fn parse_input_mode(input: &str, scale: f64) -> anyhow::Result<InputMode> {
    match input {
        "zero" => Ok(InputMode::Zero),
        "random" => Ok(InputMode::Random { scale }),
        "feedback" => Ok(InputMode::Feedback { scale }),
        other => {
            if let Some(order) = other.strip_prefix("pe:") {
                Ok(InputMode::Pe {
                    order: order.parse().context("pe order")?,
                    scale,
                })
            } else {
                Err(anyhow!("unknown input mode {other}"))
            }
        }
    }
}

fn parse_x0_mode(x0: &str, n: usize) -> anyhow::Result<X0Mode> {
    match x0 {
        "unit" => Ok(X0Mode::RandomUnit),
        "ones" => Ok(X0Mode::Given(DVector::from_element(
            n,
            1.0 / (n as f64).sqrt(),
        ))),
        list => {
            let vals: Result<Vec<f64>, _> = list.split(',').map(|v| v.trim().parse()).collect();
            Ok(X0Mode::Given(DVector::from_vec(vals.context("x0 list")?)))
        }
    }
}

fn parse_noise_mode(noise: &str) -> anyhow::Result<NoiseMode> {
    if noise == "none" {
        return Ok(NoiseMode::None);
    }
    if let Some(s) = noise.strip_prefix("structural:") {
        return Ok(NoiseMode::Structural {
            scale: s.parse().context("structural scale")?,
        });
    }
    if let Some(s) = noise.strip_prefix("gaussian:") {
        return Ok(NoiseMode::Gaussian {
            sigma: s.parse().context("gaussian sigma")?,
        });
    }
    Err(anyhow!("unknown noise mode {noise}"))
}

fn cmd_gen(args: GenArgs, _tol: &Tolerance) -> anyhow::Result<ExitCode> {
    let mut manifest = ManifestBuilder::start("gen", &args, args.seed)?;
    let sys = load_system(&args.system)?;
    manifest.note(
        "dims",
        serde_json::json!({
            "n": sys.state_dim(),
            "m": sys.input_dim(),
            "p": sys.output_dim(),
            "l": sys.noise_dim(),
        }),
    )?;
    let cfg = SimConfig {
        t: args.t,
        seed: args.seed,
        x0: parse_x0_mode(&args.x0, sys.state_dim())?,
        input: parse_input_mode(&args.input, args.input_scale)?,
        noise: parse_noise_mode(&args.noise)?,
    };
    let data = informativity::simulate(&sys, &cfg)?;
    write_dataset_csv_dir(&args.out, &data)?;
    write_system_json(&args.out.join("system.json"), &sys)?;
    manifest.write(&args.out)?;
    println!(
        "wrote {} columns of data to {}",
        data.horizon(),
        args.out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_analyze(args: AnalyzeArgs, tol: &Tolerance) -> anyhow::Result<ExitCode> {
    let data = read_dataset(&args.data)?;
    let sys = system_for(&args.data, &args.system)?;
    let ann = annihilator_for(&sys, tol)?;
    let report = InformativityReport::evaluate(&data, &sys, &ann, tol)?;
    let file = InformativityReportFile::from_report(&report);
    let text = serde_json::to_string_pretty(&file)?;
    match &args.out {
        Some(path) => std::fs::write(path, &text)?,
        None => println!("{text}"),
    }
    if report.informative {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(EXIT_NOT_INFORMATIVE))
    }
}

fn cmd_attack(args: AttackArgs, tol: &Tolerance) -> anyhow::Result<ExitCode> {
    let manifest = ManifestBuilder::start("attack", &args, args.seed)?;
    let data = read_dataset(&args.data)?;
    let sys = system_for(&args.data, &args.system)?;
    let ann = annihilator_for(&sys, tol)?;
    let spec = read_attack_spec(&args.spec)?;

    let result = run_attack(&data, &sys, &ann, &spec, tol, args.seed)?;

    let params = AffineSetParams::compute(&data, &sys, &ann)?;
    let j_before = max_coeff_space(&params, &sys, tol);
    let report = verify_attack(
        &result.attacked,
        &sys,
        &ann,
        &j_before,
        &result.v,
        &spec,
        tol,
    )?;

    std::fs::create_dir_all(&args.out)?;
    write_matrix_csv(
        &args.out.join("Phi_X_minus.csv"),
        &result.transform.phi_x_minus,
    )?;
    write_matrix_csv(
        &args.out.join("Phi_X_plus.csv"),
        &result.transform.phi_x_plus,
    )?;
    write_matrix_csv(&args.out.join("Phi_U_minus.csv"), &result.transform.phi_u)?;
    write_matrix_csv(&args.out.join("Phi_Y_minus.csv"), &result.transform.phi_y)?;
    let attacked_dir = args.out.join("attacked");
    write_dataset_csv_dir(&attacked_dir, &result.attacked)?;
    write_system_json(&attacked_dir.join("system.json"), &sys)?;
    let delta_dir = args.out.join("delta");
    write_dataset_csv_dir(&delta_dir, &result.delta)?;
    write_matrix_csv(
        &args.out.join("direction.csv"),
        &nalgebra::DMatrix::from_column_slice(result.v.len(), 1, result.v.as_slice()),
    )?;

    let file = AttackReportFile::from_report(result.lambda, &report);
    std::fs::write(
        args.out.join("attack_report.json"),
        serde_json::to_string_pretty(&file)?,
    )?;
    manifest.write(&args.out)?;

    if report.all_passed() {
        println!(
            "attack verified: dim J* {} -> {}, eigen residual {:.2e}",
            report.dim_j_before, report.dim_j_after, report.eigen_residual
        );
        Ok(ExitCode::SUCCESS)
    } else {
        Err(anyhow!("attack verification failed: {report:?}"))
    }
}

fn cmd_minnorm(args: MinnormArgs, tol: &Tolerance) -> anyhow::Result<ExitCode> {
    let manifest = ManifestBuilder::start("minnorm", &args, 0)?;
    let data = read_dataset(&args.data)?;
    let sys = system_for(&args.data, &args.system)?;
    let ann = annihilator_for(&sys, tol)?;
    if !ann.is_noise_free() && !args.skip_bound {
        return Err(anyhow!(
            "the distance bound requires noise-free data; pass --skip-bound for noisy annihilators"
        ));
    }

    let prob = build_problem(&data, &sys, &ann, tol)?;
    let sol = alternating_solve(&prob, tol, &MultistartConfig::default())?;

    let mut attacked = data.clone();
    attacked.x_plus = &sol.phi_x_plus * &data.x_plus;
    let post = InformativityReport::evaluate(&attacked, &sys, &ann, tol)?;

    let grid = GridConfig {
        coarse_step: args.grid_step,
        ..GridConfig::default()
    };
    let bound = if args.skip_bound {
        None
    } else {
        Some(PerturbationBoundFile::from_audit(
            &check_perturbation_bound(&sol, &data, &sys, &ann, tol, &grid)?,
        ))
    };

    std::fs::create_dir_all(&args.out)?;
    write_matrix_csv(&args.out.join("Delta_X_plus.csv"), &sol.delta_x_plus)?;
    write_matrix_csv(&args.out.join("Phi_X_plus.csv"), &sol.phi_x_plus)?;
    let attacked_dir = args.out.join("attacked");
    write_dataset_csv_dir(&attacked_dir, &attacked)?;
    write_system_json(&attacked_dir.join("system.json"), &sys)?;

    let bound_holds = bound.as_ref().map(|t| t.holds).unwrap_or(true);
    let report =
        MinNormReportFile::from_solution(&sol, data.x_plus.norm(), post.informative, bound);
    std::fs::write(
        args.out.join("minnorm_report.json"),
        serde_json::to_string_pretty(&report)?,
    )?;
    manifest.write(&args.out)?;

    println!(
        "lambda* = {:.4}, |Delta|_F = {:.4e}, relative error = {:.2e}",
        sol.lambda_star, sol.frob_norm, report.relative_error
    );
    if sol.converged && bound_holds {
        Ok(ExitCode::SUCCESS)
    } else {
        Err(anyhow!(
            "minnorm finished without certificate (converged: {}, bound holds: {bound_holds})",
            sol.converged
        ))
    }
}
