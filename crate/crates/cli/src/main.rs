//! `tweezer`: plan, validate and benchmark atom rearrangement sequences.

mod settings;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tweezer_core::io::{format_grid, parse_grid, replay, PlanDocument};
use tweezer_core::montecarlo::{feasibility_curve, run_trials, stats_to_csv, Algorithm, Sweep};
use tweezer_core::{count_target_vacancies, plan, plan_sequential, random_grid, InstanceSpec};

use settings::Settings;

/// Exit status when a plan could not be produced or does not check out.
const EXIT_PLAN_FAILED: u8 = 1;
/// Exit status for I/O, parse and configuration problems.
const EXIT_OPERATIONAL: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "tweezer", version, about = "Parallel rearrangement planner for optical tweezer arrays")]
struct Cli {
    /// TOML config file; planner fields at the top level, instance defaults under [instance].
    #[arg(long, global = true, env = "TWEEZER_CONFIG", value_name = "PATH")]
    config: Option<PathBuf>,

    /// Override one setting, e.g. `--set n_h=8`, `--set cost=tm`, `--set fill=0.6`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Plan one instance read from a grid file or drawn at random.
    Plan(PlanArgs),
    /// Replay a plan file against its grid and report rule violations.
    Validate(ValidateArgs),
    /// Run seeded Monte Carlo trials over a size sweep.
    Bench(BenchArgs),
    /// Print the chance that a random load holds enough atoms.
    Feasibility(FeasibilityArgs),
}

#[derive(Args, Debug)]
struct InstanceArgs {
    /// Number of target sites.
    #[arg(long)]
    size: Option<usize>,
    /// Ratio of total to target side length.
    #[arg(long)]
    ratio: Option<f64>,
    /// Loading probability per site.
    #[arg(long)]
    fill: Option<f64>,
}

#[derive(Args, Debug)]
struct PlanArgs {
    /// Grid file with a `#target:` header. Without it an instance is drawn.
    grid: Option<PathBuf>,
    #[command(flatten)]
    instance: InstanceArgs,
    /// Seed for the drawn instance.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = AlgorithmArg::Parallel)]
    algorithm: AlgorithmArg,
    /// Plan file to write; the plan goes to standard output when omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Also write the instance as a grid file.
    #[arg(long, value_name = "PATH")]
    grid_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    grid: PathBuf,
    plan: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Comma-separated target sizes.
    #[arg(long, value_delimiter = ',', default_values_t = [16usize, 36, 100, 400])]
    sizes: Vec<usize>,
    #[command(flatten)]
    instance: InstanceArgs,
    /// Master seed; per-trial seeds are derived from it.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Worker threads; results do not depend on this.
    #[arg(long, default_value_t = default_workers())]
    workers: usize,
    #[arg(long, value_enum, default_value_t = AlgorithmArg::Parallel)]
    algorithm: AlgorithmArg,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Fill CTime with measured planner wall time (makes output machine dependent).
    #[arg(long)]
    walltime: bool,
}

#[derive(Args, Debug)]
struct FeasibilityArgs {
    #[arg(long, value_delimiter = ',', default_values_t = (1..=20).map(|s| s * s).collect::<Vec<usize>>())]
    sizes: Vec<usize>,
    #[arg(long)]
    ratio: Option<f64>,
    #[arg(long)]
    fill: Option<f64>,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AlgorithmArg {
    Parallel,
    Sequential,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Parallel => Algorithm::Parallel,
            AlgorithmArg::Sequential => Algorithm::Sequential,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// A reason to stop, with the exit status it maps to.
#[derive(Debug)]
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    pub fn operational(message: impl Into<String>) -> Self {
        Self { code: EXIT_OPERATIONAL, message: message.into() }
    }

    fn plan(message: impl Into<String>) -> Self {
        Self { code: EXIT_PLAN_FAILED, message: message.into() }
    }
}

impl From<tweezer_core::Error> for Failure {
    fn from(e: tweezer_core::Error) -> Self {
        Self::operational(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::operational(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::operational(format!("cannot write {}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => write(p, text),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::operational(format!("cannot write to stdout: {e}"))),
    }
}

fn instance_spec(settings: &Settings, args: &InstanceArgs, seed: Option<u64>) -> Result<InstanceSpec, Failure> {
    let d = &settings.instance;
    Ok(InstanceSpec::new(
        args.size.unwrap_or(d.size),
        args.ratio.unwrap_or(d.ratio),
        args.fill.unwrap_or(d.fill),
        seed.unwrap_or(d.seed),
    )?)
}

fn cmd_plan(settings: &Settings, args: &PlanArgs) -> Result<(), Failure> {
    let (grid, region) = match &args.grid {
        Some(path) => {
            let (grid, region) =
                parse_grid(&read(path)?).map_err(|e| Failure::operational(format!("{}: {e}", path.display())))?;
            let region = region
                .ok_or_else(|| Failure::operational(format!("{}: missing `#target:` header", path.display())))?;
            (grid, region)
        }
        None => random_grid(&instance_spec(settings, &args.instance, args.seed)?)?,
    };
    if let Some(p) = &args.grid_out {
        write(p, &format_grid(&grid, Some(&region)))?;
    }
    let config = &settings.planner;
    let vacancies = count_target_vacancies(&grid, &region);
    let outcome = match args.algorithm {
        AlgorithmArg::Parallel => plan(&grid, &region, config)?,
        AlgorithmArg::Sequential => plan_sequential(&grid, &region, config)?,
    };
    let p = outcome.map_err(|f| Failure::plan(format!("planning failed: {f}")))?;
    let doc = PlanDocument::new(&grid, &region, &p, config);
    emit(args.out.as_deref(), &doc.to_json())?;
    let summary = format!(
        "{} moves fill {vacancies} vacancies of a {}x{} target in a {}x{} grid: {:.1} us, {:.2} um",
        p.move_count,
        region.height,
        region.width,
        grid.rows(),
        grid.cols(),
        p.total_time,
        p.total_distance
    );
    if args.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}

fn cmd_validate(settings: &Settings, args: &ValidateArgs) -> Result<(), Failure> {
    let (grid, region) =
        parse_grid(&read(&args.grid)?).map_err(|e| Failure::operational(format!("{}: {e}", args.grid.display())))?;
    let doc = PlanDocument::from_json(&read(&args.plan)?)
        .map_err(|e| Failure::operational(format!("{}: {e}", args.plan.display())))?;
    let region = region.unwrap_or(doc.target);
    if (doc.rows, doc.cols, doc.target) != (grid.rows(), grid.cols(), region) {
        return Err(Failure::operational(format!(
            "plan is for a {}x{} grid with target {:?}, grid file is {}x{} with target {:?}",
            doc.rows,
            doc.cols,
            doc.target,
            grid.rows(),
            grid.cols(),
            region
        )));
    }
    let report = replay(&grid, &region, &doc.moves(), &settings.planner);
    let text = if args.format == Format::Json {
        serde_json::to_string_pretty(&report).expect("reports serialise") + "\n"
    } else {
        let mut s = String::new();
        for m in &report.invalid {
            for v in &m.violations {
                let _ = writeln!(s, "move {}: {v}", m.index);
            }
        }
        let _ = writeln!(
            s,
            "{}/{} moves applied, vacancies {} -> {}",
            report.moves_applied, report.moves_total, report.initial_vacancies, report.final_vacancies
        );
        s
    };
    emit(None, &text)?;
    if report.ok() {
        Ok(())
    } else if report.invalid.is_empty() {
        Err(Failure::plan(format!("plan leaves {} target vacancies", report.final_vacancies)))
    } else {
        Err(Failure::plan("plan breaks the move rules"))
    }
}

fn cmd_bench(settings: &Settings, args: &BenchArgs) -> Result<(), Failure> {
    if args.format == Format::Text {
        return Err(Failure::operational("bench writes csv or json"));
    }
    let d = &settings.instance;
    let sweep = Sweep {
        sizes: args.sizes.clone(),
        ratio: args.instance.ratio.unwrap_or(d.ratio),
        fill: args.instance.fill.unwrap_or(d.fill),
        master_seed: args.seed.unwrap_or(d.seed),
    };
    let stats = run_trials(&sweep, &settings.planner, args.trials, args.workers, args.algorithm.into())?;
    for s in stats.iter().filter(|s| s.no_progress > 0) {
        eprintln!("warning: n_t={}: {} of {} trials stalled with enough atoms", s.n_t, s.no_progress, s.trials);
    }
    let text = match args.format {
        Format::Json => {
            let mut stats = stats;
            if !args.walltime {
                stats.iter_mut().for_each(|s| s.avg_planner_walltime_us = 0.0);
            }
            serde_json::to_string_pretty(&stats).expect("stats serialise") + "\n"
        }
        _ => stats_to_csv(&stats, args.walltime),
    };
    emit(args.out.as_deref(), &text)
}

fn cmd_feasibility(settings: &Settings, args: &FeasibilityArgs) -> Result<(), Failure> {
    let ratio = args.ratio.unwrap_or(settings.instance.ratio);
    let fill = args.fill.unwrap_or(settings.instance.fill);
    if ratio.is_nan() || ratio < 1.0 || !(0.0..=1.0).contains(&fill) {
        return Err(Failure::operational(format!("need ratio >= 1 and fill in [0, 1], got {ratio} and {fill}")));
    }
    let curve = feasibility_curve(ratio, fill, &args.sizes);
    let text = match args.format {
        Format::Json => {
            let rows: Vec<_> =
                curve.iter().map(|&(n, p)| serde_json::json!({ "n_t": n, "probability": p })).collect();
            serde_json::to_string_pretty(&rows).expect("curve serialises") + "\n"
        }
        Format::Csv => {
            let mut s = String::from("Qubit,Chance\n");
            for (n, p) in curve {
                let _ = writeln!(s, "{n},{p}");
            }
            s
        }
        Format::Text => return Err(Failure::operational("feasibility writes csv or json")),
    };
    emit(args.out.as_deref(), &text)
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let settings = Settings::load(cli.config.as_deref(), &cli.overrides)?;
    match &cli.command {
        Command::Plan(a) => cmd_plan(&settings, a),
        Command::Validate(a) => cmd_validate(&settings, a),
        Command::Bench(a) => cmd_bench(&settings, a),
        Command::Feasibility(a) => cmd_feasibility(&settings, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("tweezer: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
