use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use seglab::config::{preset, Counterexample, ExperimentConfig, MethodEntry, ScheduleSpec, PRESETS};
use seglab::experiment::{run_experiment, run_sweep, write_outputs, write_sweep};
use seglab::gen::{generate, GenRequest};
use seglab::plot::{read_series, render_svg};
use seglab::verify::{run_suite, Suite};

/// Shuffling-based stochastic extragradient experiments.
#[derive(Parser)]
#[command(name = "seglab", version)]
struct Cli {
    /// Worker threads for runs and Monte-Carlo trials.
    #[arg(long, env = "SEGLAB_THREADS", global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a problem instance as JSON.
    Gen(GenArgs),
    /// Run methods over instances; writes per-run CSVs, aggregate.csv and summary.json.
    Run(ExperimentArgs),
    /// Run the experiment once per base stepsize; writes sweep.csv.
    Sweep(SweepArgs),
    /// Run a verification suite; exit 1 if a hard check fails.
    Verify(VerifyArgs),
    /// Draw aggregate CSVs as an SVG line chart.
    Plot(PlotArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Monotone,
    StronglyMonotone,
    Divergence,
    VarianceFloor,
    RrLowerBound,
    Bilinear,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    dx: usize,
    #[arg(long, default_value_t = 20)]
    dy: usize,
    #[arg(long, default_value_t = 40)]
    n: usize,
    /// Smoothness constant of the counterexamples.
    #[arg(long = "L", default_value_t = 1.0)]
    l: f64,
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Use the SGDA variant of the lower-bound instance.
    #[arg(long)]
    sgda: bool,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Built-in protocol to start from.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(PRESETS))]
    preset: Option<String>,
    /// JSON config; replaces the preset.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Shorter horizon for presets.
    #[arg(long)]
    fast: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    stride: Option<usize>,
    #[arg(long)]
    instances: Option<usize>,
    /// Comma-separated method labels, all using the default schedule.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    /// Constant stepsize used as the default schedule.
    #[arg(long)]
    eta: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,
    /// Comma-separated base stepsizes.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
}

#[derive(Args)]
struct VerifyArgs {
    /// counterexamples, error-order, floor, phi or all.
    suite: String,
    /// Report path; defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    #[arg(required = true)]
    csv: Vec<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "")]
    title: String,
}

fn resolve(args: &ExperimentArgs) -> Result<ExperimentConfig> {
    let mut cfg = match (&args.config, &args.preset) {
        (Some(path), _) => ExperimentConfig::from_path(path)?,
        (None, Some(name)) => preset(name, args.fast)?,
        (None, None) => bail!("give --preset or --config"),
    };
    if let Some(out) = &args.out {
        cfg.output_dir = out.clone();
    }
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }
    if let Some(b) = args.budget {
        cfg.budget_passes = b;
    }
    if let Some(s) = args.stride {
        cfg.checkpoint_stride = s;
    }
    if let Some(i) = args.instances {
        cfg.instance_count = i;
    }
    if let Some(eta) = args.eta {
        cfg.default_schedule = Some(ScheduleSpec::Constant { eta });
    }
    if let Some(methods) = &args.methods {
        cfg.methods = methods
            .iter()
            .map(|m| MethodEntry {
                method: m.clone(),
                name: None,
                schedule: None,
            })
            .collect();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn gen(args: &GenArgs) -> Result<()> {
    let req = match args.kind {
        Kind::Monotone => GenRequest::Monotone {
            seed: args.seed,
            d1: args.dx,
            d2: args.dy,
            n: args.n,
        },
        Kind::StronglyMonotone => GenRequest::StronglyMonotone {
            seed: args.seed,
            d1: args.dx,
            d2: args.dy,
            n: args.n,
        },
        kind => {
            let example = match kind {
                Kind::Divergence => Counterexample::Divergence { l: args.l },
                Kind::VarianceFloor => Counterexample::VarianceFloor {
                    l: args.l,
                    sigma: args.sigma,
                },
                Kind::RrLowerBound => Counterexample::RrLowerBound {
                    l: args.l,
                    mu: args.mu,
                    sigma: args.sigma,
                    n: args.n,
                    sgda: args.sgda,
                },
                _ => Counterexample::Bilinear,
            };
            GenRequest::Counterexample { example, seed: args.seed }
        }
    };
    let path = generate(&req, &args.out)?;
    println!("{}", path.display());
    Ok(())
}

/// `Ok(false)` means a verification failure.
fn dispatch(cli: Cli) -> Result<bool> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .context("configuring the worker pool")?;
    }
    match cli.command {
        Command::Gen(args) => gen(&args)?,
        Command::Run(args) => {
            let cfg = resolve(&args)?;
            let out = run_experiment(&cfg)?;
            write_outputs(&cfg.output_dir, &cfg, &out)?;
            for s in &out.summary {
                let flag = if s.diverged_instances.is_empty() { String::new() } else { format!(" (diverged on {:?})", s.diverged_instances) };
                println!("{:<16} pass {:>8}  geo-mean ratio {:e}{flag}", s.method, s.final_pass, s.final_geo_mean_ratio);
            }
        }
        Command::Sweep(args) => {
            let mut cfg = resolve(&args.experiment)?;
            if let Some(grid) = args.grid {
                cfg.stepsize_grid = grid;
            }
            let (csv, cells) = run_sweep(&cfg)?;
            write_sweep(&cfg.output_dir, &cfg, &csv, &cells)?;
            println!("{} cells written to {}", cells.len(), cfg.output_dir.join("sweep.csv").display());
        }
        Command::Verify(args) => {
            let suite: Suite = args.suite.parse()?;
            let report = run_suite(suite)?;
            let json = report.to_json();
            match &args.out {
                Some(path) => std::fs::write(path, &json).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{json}"),
            }
            for c in report.checks.iter().filter(|c| c.hard_failure()) {
                eprintln!("FAILED {}: expected {} observed {} tolerance {} {}", c.check_name, c.expected, c.observed, c.tolerance, c.details);
            }
            return Ok(report.passed);
        }
        Command::Plot(args) => {
            let series = read_series(&args.csv)?;
            let svg = render_svg(&series, &args.title);
            std::fs::write(&args.out, svg).with_context(|| format!("writing {}", args.out.display()))?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
