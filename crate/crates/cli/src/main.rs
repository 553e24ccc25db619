use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ftalloc_core::benchmark::{bench, to_tsv};
use ftalloc_core::eval::{objective_exact, ObjectiveEstimate};
use ftalloc_core::gen::{generate, GenParams};
use ftalloc_core::io::InstanceSpec;
use ftalloc_core::oracle::{brute_force_optimum, five_node_counterexample, uniform_split_baseline};
use ftalloc_core::rational::{format_rational, int, parse_rational, to_f64};
use ftalloc_core::sampling::mc_estimate;
use ftalloc_core::{solve, Error, Mode, Rational, SolverConfig};
use serde_json::json;

#[derive(Parser)]
#[command(name = "ftalloc", version, about = "Fault-tolerant storage allocation solver")]
struct Cli {
    /// Worker threads (output does not depend on this).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance and print a JSON report.
    Solve {
        instance: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Evaluate a weight vector on an instance.
    Eval {
        instance: PathBuf,
        /// Comma-separated weights in the instance's order, e.g. "1/2,1/4,1/4".
        #[arg(long)]
        weights: String,
        /// Estimate from this many samples instead of computing exactly.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 22)]
        exact_eval_max_n: usize,
    },
    /// Exact optimum for up to five nodes.
    Oracle { instance: PathBuf },
    /// Best uniform split over the k most reliable nodes.
    Baseline { instance: PathBuf },
    /// Compare solver, baseline and oracle on a set of instances.
    Bench {
        #[arg(required = true)]
        instances: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Tsv)]
        format: Format,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Write a random instance.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.3)]
        lo: f64,
        #[arg(long, default_value_t = 0.7)]
        hi: f64,
        #[arg(long, default_value = "1/2")]
        theta: String,
        #[arg(long, default_value = "1/4")]
        epsilon: String,
        #[arg(long, default_value = "1/20")]
        delta: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Five nodes at 0.9 where a non-uniform split beats every uniform one.
    Counterexample,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Tsv,
    Json,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, default_value = "theory")]
    mode: String,
    /// Tail granularity (practical mode).
    #[arg(long)]
    kappa: Option<String>,
    /// Cap on the head size (practical mode).
    #[arg(long)]
    l_cap: Option<usize>,
    #[arg(long, default_value = "1")]
    c_l: String,
    #[arg(long, default_value = "1")]
    mc_constant: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 22)]
    exact_eval_max_n: usize,
    #[arg(long, default_value_t = 100_000_000)]
    state_space_limit: u64,
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig, Error> {
        let config = SolverConfig {
            mode: self.mode.parse::<Mode>()?,
            c_l: parse_rational(&self.c_l)?,
            kappa_override: self.kappa.as_deref().map(parse_rational).transpose()?,
            l_cap: self.l_cap,
            mc_constant: parse_rational(&self.mc_constant)?,
            seed: self.seed,
            exact_eval_max_n: self.exact_eval_max_n,
            state_space_limit: self.state_space_limit,
        };
        config.validate()?;
        Ok(config)
    }
}

fn load(path: &Path) -> Result<InstanceSpec, Error> {
    InstanceSpec::load(path).map_err(|e| match e {
        Error::Io(io) => Error::InvalidInput(format!("cannot read {}: {io}", path.display())),
        other => other,
    })
}

fn strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json value serialises")
}

fn run(cli: &Cli) -> Result<String, Error> {
    match &cli.command {
        Command::Solve { instance, solver } => {
            let spec = load(instance)?;
            let report = solve(&spec.probs, &spec.theta, &spec.epsilon, &spec.delta, &solver.config()?)?;
            Ok(report.to_json())
        }
        Command::Eval {
            instance,
            weights,
            samples,
            seed,
            exact_eval_max_n,
        } => {
            let spec = load(instance)?;
            let w = weights.split(',').map(parse_rational).collect::<Result<Vec<_>, _>>()?;
            if w.len() != spec.probs.len() {
                return Err(Error::InvalidInput(format!(
                    "{} weights for {} nodes",
                    w.len(),
                    spec.probs.len()
                )));
            }
            let (estimate, exact): (ObjectiveEstimate, Option<String>) = match samples {
                Some(0) => return Err(Error::InvalidInput("--samples must be positive".into())),
                Some(m) => (mc_estimate(&spec.probs, &w, &spec.theta, *m, *seed), None),
                None => {
                    let v = objective_exact(&spec.probs, &w, &spec.theta, *exact_eval_max_n)?;
                    (ObjectiveEstimate::exact(&v), Some(format_rational(&v)))
                }
            };
            Ok(pretty(&json!({
                "weights": strings(&w),
                "feasible": w.iter().all(|x| *x >= int(0))
                    && w.iter().sum::<Rational>() <= int(1),
                "exact": exact,
                "estimate": estimate,
            })))
        }
        Command::Oracle { instance } => {
            let spec = load(instance)?;
            let r = brute_force_optimum(&spec.probs, &spec.theta)?;
            Ok(pretty(&json!({
                "opt_value": format_rational(&r.opt_value),
                "opt_value_f64": to_f64(&r.opt_value),
                "witness": strings(&r.witness),
                "sets_examined": r.sets_examined,
                "method": r.method,
            })))
        }
        Command::Baseline { instance } => {
            let spec = load(instance)?;
            let r = uniform_split_baseline(&spec.probs, &spec.theta)?;
            Ok(pretty(&json!({
                "best_k": r.best_k,
                "value": format_rational(&r.value),
                "value_f64": to_f64(&r.value),
                "per_k": strings(&r.per_k),
                "weights": strings(&r.weights),
            })))
        }
        Command::Bench {
            instances,
            format,
            solver,
        } => {
            let config = solver.config()?;
            let named = instances
                .iter()
                .map(|p| Ok((p.display().to_string(), load(p)?)))
                .collect::<Result<Vec<_>, Error>>()?;
            let rows = bench(&named, &config)?;
            Ok(match format {
                Format::Tsv => to_tsv(&rows).trim_end().to_string(),
                Format::Json => serde_json::to_string_pretty(&rows)?,
            })
        }
        Command::Gen {
            n,
            lo,
            hi,
            theta,
            epsilon,
            delta,
            seed,
        } => Ok(generate(&GenParams {
            n: *n,
            lo: *lo,
            hi: *hi,
            theta: parse_rational(theta)?,
            epsilon: parse_rational(epsilon)?,
            delta: parse_rational(delta)?,
            seed: *seed,
        })?
        .to_json()),
        Command::Counterexample => Ok(serde_json::to_string_pretty(&five_node_counterexample()?)?),
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        _ if e.is_guard() => 3,
        Error::InvalidInput(_) | Error::Json(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: cannot configure {t} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let result = run(&cli).and_then(|text| {
        match &cli.out {
            Some(path) => std::fs::write(path, format!("{text}\n"))?,
            None => match writeln!(std::io::stdout().lock(), "{text}") {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                other => other?,
            },
        }
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
