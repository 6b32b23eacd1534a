//! `itomc`: identify Ito disturbance models from data, validate them,
//! generate sample paths, and estimate response statistics with either the
//! traditional (path-per-sample) or the fast (spectral + Latin hypercube)
//! Monte Carlo method.
//!
//! Exit codes: 0 success, 2 input error, 3 numerical non-convergence,
//! 4 simulator failure.

mod config;

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::MethodChoice;
use itomc::engine::{
    self, run_comparison, run_fast_mcs, run_traditional_mcs, ComparisonReport, StatsReport,
};
use itomc::identify::{fit, read_dataset_file, validate, BasisSpec, FitOptions, FitResult};
use itomc::model::{model_to_toml, read_model};
use itomc::sde::simulate_em_paths;
use itomc::spectral::kle_basis;
use itomc::{make_preset, DistributionPreset, Error, PathOrigin, PresetKind, Result, TimeGrid};

#[derive(Parser)]
#[command(name = "itomc", version, about = "Monte Carlo toolkit for Ito-process disturbances")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a polynomial drift/diffusion model to a uniformly sampled series.
    Identify(IdentifyArgs),
    /// Compare recorded data against a model's self-simulation.
    Validate(ValidateArgs),
    /// Simulate Euler-Maruyama sample paths and write them as CSV.
    Paths(PathsArgs),
    /// Print samples of the orthonormal cosine basis as CSV.
    Basis(BasisArgs),
    /// Run one Monte Carlo method per an experiment config.
    Run(RunArgs),
    /// Run both methods and benchmark their convergence.
    Compare(CompareArgs),
}

#[derive(Args)]
struct IdentifyArgs {
    /// Input CSV with header `t,xi_1` and uniform time spacing.
    #[arg(long)]
    data: PathBuf,
    /// Drift polynomial degree.
    #[arg(long, default_value_t = 1)]
    drift_degree: usize,
    /// Diffusion polynomial degree.
    #[arg(long, default_value_t = 0)]
    diffusion_degree: usize,
    /// Output model file (TOML).
    #[arg(long)]
    out: PathBuf,
    /// Fit report destination; stdout when omitted.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Iteration cap for the optimizer.
    #[arg(long, default_value_t = FitOptions::default().max_iter)]
    max_iter: usize,
}

#[derive(Args)]
struct ValidateArgs {
    /// Model file (TOML).
    #[arg(long)]
    model: PathBuf,
    /// Recorded series CSV.
    #[arg(long)]
    data: PathBuf,
    /// Highest autocorrelation lag to compare.
    #[arg(long, default_value_t = 50)]
    lags: usize,
}

#[derive(Args)]
struct PathsArgs {
    /// Model file (TOML); mutually exclusive with --preset.
    #[arg(long, conflicts_with = "preset")]
    model: Option<PathBuf>,
    /// Preset name: gaussian, beta, gamma or laplace.
    #[arg(long, requires = "a", requires = "b")]
    preset: Option<String>,
    /// First preset parameter.
    #[arg(long)]
    a: Option<f64>,
    /// Second preset parameter.
    #[arg(long)]
    b: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    t0: f64,
    /// Simulated duration.
    #[arg(long)]
    horizon: f64,
    /// Time step.
    #[arg(long)]
    step: f64,
    #[arg(long, default_value_t = 1)]
    n_paths: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BasisArgs {
    /// Expansion horizon T.
    #[arg(long)]
    horizon: f64,
    /// Number of basis functions.
    #[arg(long)]
    k: usize,
    /// Number of grid intervals on [0, T].
    #[arg(long, default_value_t = 200)]
    points: usize,
    /// Output CSV file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Directory for report artifacts.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Worker pool width; does not affect results.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct CompareArgs {
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Directory for report artifacts.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Worker pool width; does not affect results.
    #[arg(long)]
    workers: Option<usize>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let run = match cli.command {
        Command::Identify(a) => cmd_identify(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Paths(a) => cmd_paths(a),
        Command::Basis(a) => cmd_basis(a),
        Command::Run(a) => cmd_run(a),
        Command::Compare(a) => cmd_compare(a),
    };
    match run {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NoConvergence { .. } => 3,
        Error::NonFinite { .. } | Error::Simulator(_) => 4,
        _ => 2,
    }
}

fn workers_or_default(workers: Option<usize>) -> usize {
    workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn cmd_identify(args: IdentifyArgs) -> Result<ExitCode> {
    let data = read_dataset_file(&args.data)?;
    let basis =
        BasisSpec { drift_degree: args.drift_degree, diffusion_degree: args.diffusion_degree };
    let opts = FitOptions { max_iter: args.max_iter, ..FitOptions::default() };
    let result = fit(&data, &basis, &opts)?;

    let model = itomc::identify::model_from_params(&basis, &result.q, data.value(0, 0))?;
    let mut text = model_to_toml(&model);
    if !result.converged {
        text = format!("# fit did not converge after {} iterations\n{text}", result.iterations);
    }
    std::fs::write(&args.out, text)?;

    let report = fit_report(&args.data, &data.step(), &basis, &result);
    match &args.report {
        Some(path) => std::fs::write(path, report)?,
        None => print!("{report}"),
    }
    Ok(if result.converged { ExitCode::SUCCESS } else { ExitCode::from(3) })
}

fn fit_report(data_path: &Path, step: &f64, basis: &BasisSpec, result: &FitResult) -> String {
    let mut s = String::new();
    s.push_str("fit report\n");
    s.push_str(&format!("data: {}\n", data_path.display()));
    s.push_str(&format!("step: {step}\n"));
    s.push_str(&format!("drift_degree: {}\n", basis.drift_degree));
    s.push_str(&format!("diffusion_degree: {}\n", basis.diffusion_degree));
    s.push_str(&format!("converged: {}\n", result.converged));
    s.push_str(&format!("degenerate: {}\n", result.degenerate));
    s.push_str(&format!("iterations: {}\n", result.iterations));
    s.push_str(&format!("objective: {}\n", result.objective));
    s.push_str(&format!("gradient_norm: {}\n", result.gradient_norm));
    let (qm, qs) = result.q.split_at(basis.n_drift());
    for (i, c) in qm.iter().enumerate() {
        s.push_str(&format!("drift_{i}: {c}\n"));
    }
    for (i, c) in qs.iter().enumerate() {
        s.push_str(&format!("diffusion_{i}: {c}\n"));
    }
    s
}

fn cmd_validate(args: ValidateArgs) -> Result<ExitCode> {
    let model = read_model(&args.model)?;
    let data = read_dataset_file(&args.data)?;
    let report = validate(&model, &data, args.lags)?;
    print!(
        "validation report\nmodel: {}\ndata: {}\nlags: {}\npdf_distance: {}\nacf_rmse: {}\n",
        args.model.display(),
        args.data.display(),
        report.lags,
        report.pdf_distance,
        report.acf_rmse
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_paths(args: PathsArgs) -> Result<ExitCode> {
    let model = match (&args.model, &args.preset) {
        (Some(path), None) => read_model(path)?,
        (None, Some(name)) => {
            let kind = PresetKind::parse(name).ok_or_else(|| {
                Error::invalid(
                    "preset",
                    format!("unknown preset {name:?}; expected gaussian, beta, gamma or laplace"),
                )
            })?;
            make_preset(&DistributionPreset::new(kind, args.a.unwrap(), args.b.unwrap())?)
        }
        _ => return Err(Error::invalid("model", "give exactly one of --model or --preset")),
    };
    let grid = TimeGrid::new(args.t0, args.t0 + args.horizon, args.step)?;
    let paths = simulate_em_paths(&model, &grid, model.initial(), args.n_paths, args.seed)?;
    itomc::sde::write_paths_file(&paths, &args.out)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_basis(args: BasisArgs) -> Result<ExitCode> {
    if args.k == 0 || args.points == 0 {
        return Err(Error::invalid("k", "need at least one mode and one interval"));
    }
    let mut text = String::from("t");
    for j in 1..=args.k {
        text.push_str(&format!(",m_{j}"));
    }
    text.push('\n');
    for i in 0..=args.points {
        let t = args.horizon * i as f64 / args.points as f64;
        text.push_str(&format!("{t}"));
        for j in 1..=args.k {
            text.push_str(&format!(",{}", kle_basis(j, t, args.horizon)?));
        }
        text.push('\n');
    }
    match &args.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn cmd_run(args: RunArgs) -> Result<ExitCode> {
    let exp = config::load(&args.config)?;
    let (method, n, k) = exp.run_settings()?;
    let workers = workers_or_default(args.workers);
    let report: StatsReport = match method {
        MethodChoice::Traditional => {
            let rrf = exp.response.build(PathOrigin::EulerMaruyama)?;
            run_traditional_mcs(&exp.model, &*rrf, &exp.grid, n, exp.seed, workers)?
        }
        MethodChoice::Fast => {
            let rrf = exp.response.build(PathOrigin::Spectral)?;
            run_fast_mcs(
                &exp.model,
                &*rrf,
                &exp.grid,
                n,
                k,
                exp.seed,
                exp.placement,
                exp.decorrelate,
                workers,
            )?
        }
    };
    std::fs::create_dir_all(&args.out_dir)?;
    engine::write_report_text(create(&args.out_dir.join("report.txt"))?, &report)?;
    engine::write_prefix_csv(create(&args.out_dir.join("series.csv"))?, &report)?;
    println!("mean: {}", report.mean);
    println!("variance: {}", report.variance);
    Ok(ExitCode::SUCCESS)
}

fn cmd_compare(args: CompareArgs) -> Result<ExitCode> {
    let exp = config::load(&args.config)?;
    let (mode, budget_traditional, budget_fast, k) = exp.compare_settings()?;
    if budget_traditional < 5 || budget_fast < 5 {
        eprintln!("error: degree computation needs at least 5 samples per method");
        return Ok(ExitCode::from(3));
    }
    let workers = workers_or_default(args.workers);
    let rrf_traditional = exp.response.build(PathOrigin::EulerMaruyama)?;
    let rrf_fast = exp.response.build(PathOrigin::Spectral)?;
    let report: ComparisonReport = run_comparison(
        &exp.model,
        &*rrf_traditional,
        &*rrf_fast,
        &exp.grid,
        budget_traditional,
        budget_fast,
        k,
        exp.seed,
        exp.placement,
        exp.decorrelate,
        mode,
        workers,
    )?;
    std::fs::create_dir_all(&args.out_dir)?;
    engine::write_comparison_text(create(&args.out_dir.join("comparison.txt"))?, &report)?;
    match &report.detail {
        engine::ComparisonDetail::Prefix { traditional, fast } => {
            engine::write_prefix_csv(create(&args.out_dir.join("traditional.csv"))?, traditional)?;
            engine::write_prefix_csv(create(&args.out_dir.join("fast.csv"))?, fast)?;
        }
        engine::ComparisonDetail::Rerun { traditional, fast } => {
            engine::write_tail_csv(create(&args.out_dir.join("traditional.csv"))?, traditional)?;
            engine::write_scan_csv(create(&args.out_dir.join("fast.csv"))?, fast)?;
        }
    }
    for outcome in [&report.mean, &report.variance] {
        match outcome.speedup {
            Some(s) => println!("speedup_{}: {s}", outcome.statistic.name()),
            None => println!("speedup_{}: not-reached", outcome.statistic.name()),
        }
    }
    Ok(ExitCode::SUCCESS)
}
