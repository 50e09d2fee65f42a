mod input;
mod output;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use uvpriv::baseline::sweeney_baseline;
use uvpriv::greedy::{Algorithm, LagrangianConfig};
use uvpriv::oracle::{oracle_min, Objective, Problem};
use uvpriv::pareto::{default_grid, geometric_grid, linear_grid, sweep, FrontierMode, SweepConfig};
use uvpriv::{CodewordPolicy, Distance, Error, Result, UtilityChoice};

use input::InputArgs;

#[derive(Parser, Debug)]
#[command(name = "uvpriv", version, about = "Range-based privacy measures and quantization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dataset statistics.
    Stats {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Run one greedy algorithm, or evaluate a saved quantization.
    Quantize {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        run: RunArgs,
        /// Evaluate the quantization in this JSON file instead of running an algorithm.
        #[arg(long)]
        apply_quantization: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep λ and print the leakage/utility-loss frontier.
    Pareto {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value = "istar")]
        algorithm: AlgorithmArg,
        #[arg(long, value_enum, default_value = "u1")]
        utility: UtilityArg,
        #[arg(long, value_enum, default_value = "centroid")]
        codeword: PolicyArg,
        /// "count,min,max[,geometric|linear]"; defaults to 0 plus 64 geometric points on [1e-3, 1e2].
        #[arg(long)]
        grid: Option<String>,
        /// Explicit comma-separated λ values; overrides --grid.
        #[arg(long)]
        lambdas: Option<String>,
        /// Keep only each run's returned quantization, not its iterates.
        #[arg(long)]
        final_only: bool,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// k-anonymity by generalization and suppression.
    Baseline {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value = "centroid")]
        codeword: PolicyArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive optimum over all quantizations (at most 12 x-symbols).
    Oracle {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum)]
        problem: AlgorithmArg,
        #[arg(long, allow_hyphen_values = true, conflicts_with = "theta", required_unless_present = "theta")]
        lambda: Option<f64>,
        /// Minimum utility; minimizes leakage subject to U ≥ θ.
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<f64>,
        #[arg(long, value_enum, default_value = "u1")]
        utility: UtilityArg,
        #[arg(long, value_enum, default_value = "centroid")]
        codeword: PolicyArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(clap::Args, Debug, Clone)]
struct RunArgs {
    #[arg(long, value_enum, default_value = "istar")]
    algorithm: AlgorithmArg,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    lambda: f64,
    #[arg(long, value_enum, default_value = "u1")]
    utility: UtilityArg,
    #[arg(long, value_enum, default_value = "centroid")]
    codeword: PolicyArg,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum AlgorithmArg {
    L0,
    Istar,
    L0ZeroIstar,
}

impl AlgorithmArg {
    fn algorithm(self) -> Algorithm {
        match self {
            AlgorithmArg::L0 => Algorithm::MinL0,
            AlgorithmArg::Istar => Algorithm::MinIStar,
            AlgorithmArg::L0ZeroIstar => Algorithm::L0ZeroIStar,
        }
    }

    fn problem(self) -> Problem {
        match self {
            AlgorithmArg::L0 => Problem::MinL0,
            AlgorithmArg::Istar => Problem::MinIStar,
            AlgorithmArg::L0ZeroIstar => Problem::MinL0ZeroIStar,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum UtilityArg {
    U1,
    U2,
}

impl UtilityArg {
    fn choice(self) -> UtilityChoice {
        match self {
            UtilityArg::U1 => UtilityChoice::resolution(),
            UtilityArg::U2 => UtilityChoice::max_distortion(),
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum PolicyArg {
    Centroid,
    Representative,
}

impl PolicyArg {
    fn policy(self) -> CodewordPolicy {
        match self {
            PolicyArg::Centroid => CodewordPolicy::Centroid,
            PolicyArg::Representative => CodewordPolicy::Representative,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum FormatArg {
    Csv,
    Json,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Ingest(_) => 2,
        Error::Config(_) | Error::Contract(_) | Error::IndexOutOfRange { .. } => 3,
        Error::SizeLimit(_) => 4,
        Error::Infeasible(_) => 5,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(3),
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn manifest(subcommand: &str, input: &InputArgs, config: Value) -> Value {
    json!({
        "subcommand": subcommand,
        "input": input.manifest(),
        "config": config,
        "version": env!("CARGO_PKG_VERSION"),
        "timestamp": chrono::Utc::now().to_rfc3339(),
    })
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display()))),
        None => match writeln!(std::io::stdout().lock(), "{text}") {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                Err(Error::Config(format!("cannot write to stdout: {e}")))
            }
            _ => Ok(()),
        },
    }
}

fn emit_json(doc: &Value, out: Option<&PathBuf>) -> Result<()> {
    emit(&serde_json::to_string_pretty(doc).expect("json"), out)
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Stats { input } => {
            let loaded = input.load()?;
            let stats = match &loaded.dataset {
                Some(ds) => ds.stats,
                None => {
                    let records: Vec<_> = loaded.joint_range.pairs().to_vec();
                    uvpriv::ingest::stats(&loaded.joint_range, &records)
                }
            };
            let doc = json!({
                "schema": output::SCHEMA,
                "manifest": manifest("stats", &input, json!({})),
                "stats": stats,
                "dropped_rows": loaded.dataset.as_ref().map(|d| d.dropped),
                "x_numeric": loaded.joint_range.x_values().is_some(),
            });
            emit_json(&doc, None)
        }

        Command::Quantize {
            input,
            run,
            apply_quantization,
            out,
        } => {
            let jr = input.load()?.joint_range;
            let utility = run.utility.choice();
            let cfg = LagrangianConfig::new(run.lambda, utility)?.with_policy(run.codeword.policy());
            if utility.needs_values() && jr.x_values().is_none() {
                return Err(Error::Config("u2 needs numeric x-values".into()));
            }
            let config = json!({
                "algorithm": run.algorithm.algorithm(),
                "lambda": run.lambda,
                "utility": utility.kind,
                "codeword": cfg.policy,
                "apply_quantization": apply_quantization,
            });
            let doc = if let Some(path) = &apply_quantization {
                let text = fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
                let saved: Value = serde_json::from_str(&text)
                    .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
                let q = output::read_quantization(&jr, &saved, cfg.policy)?;
                json!({
                    "schema": output::SCHEMA,
                    "manifest": manifest("quantize", &input, config),
                    "quantization": output::quantization(&jr, &q),
                    "measures": output::measures(&jr, &q, Some(&utility))?,
                })
            } else {
                let res = run.algorithm.algorithm().run(&jr, &cfg)?;
                json!({
                    "schema": output::SCHEMA,
                    "manifest": manifest("quantize", &input, config),
                    "quantization": output::quantization(&jr, &res.quantization),
                    "measures": output::measures(&jr, &res.quantization, Some(&utility))?,
                    "termination": res.termination,
                    "trace": output::trace(&jr, &res.trace),
                })
            };
            emit_json(&doc, out.as_ref())
        }

        Command::Pareto {
            input,
            algorithm,
            utility,
            codeword,
            grid,
            lambdas,
            final_only,
            format,
            out,
        } => {
            let jr = input.load()?.joint_range;
            let grid_values = match (&lambdas, &grid) {
                (Some(list), _) => parse_list(list)?,
                (None, Some(spec)) => parse_grid(spec)?,
                (None, None) => default_grid(),
            };
            let mut cfg = SweepConfig::new(algorithm.algorithm(), utility.choice());
            cfg.policy = codeword.policy();
            if final_only {
                cfg.mode = FrontierMode::FinalOnly;
            }
            let mut frontier = sweep(&jr, &cfg, &grid_values)?;
            frontier.dataset = input.input.as_ref().map(|p| p.display().to_string());
            if format == FormatArg::Csv {
                return emit(frontier.to_csv()?.trim_end(), out.as_ref());
            }
            let points: Vec<Value> = frontier
                .points
                .iter()
                .map(|p| {
                    json!({
                        "lambda": p.lambda,
                        "t": p.t,
                        "leakage_raw": p.leakage_raw,
                        "leakage_norm": p.leakage_norm,
                        "utility_raw": p.utility_raw,
                        "loss_norm": p.loss_norm,
                        "quantization": output::quantization(&jr, &p.quantization),
                    })
                })
                .collect();
            let doc = json!({
                "schema": output::SCHEMA,
                "manifest": manifest("pareto", &input, json!({
                    "algorithm": cfg.algorithm,
                    "utility": cfg.utility.kind,
                    "codeword": cfg.policy,
                    "mode": cfg.mode,
                    "grid": grid_values,
                })),
                "algorithm": frontier.algorithm,
                "utility": frontier.utility,
                "dataset": frontier.dataset,
                "mode": frontier.mode,
                "degenerate": frontier.degenerate,
                "leakage_reference": frontier.leakage_reference,
                "utility_reference": frontier.utility_reference,
                "points": points,
            });
            emit_json(&doc, out.as_ref())
        }

        Command::Baseline {
            input,
            k,
            codeword,
            out,
        } => {
            let jr = input.load()?.joint_range;
            let q = sweeney_baseline(&jr, k, codeword.policy(), Distance::ABSOLUTE)?;
            let doc = json!({
                "schema": output::SCHEMA,
                "manifest": manifest("baseline", &input, json!({ "k": k, "codeword": codeword.policy() })),
                "quantization": output::quantization(&jr, &q),
                "measures": output::measures(&jr, &q, None)?,
            });
            emit_json(&doc, out.as_ref())
        }

        Command::Oracle {
            input,
            problem,
            lambda,
            theta,
            utility,
            codeword,
            out,
        } => {
            let jr = input.load()?.joint_range;
            let u = utility.choice();
            let objective = match (lambda, theta) {
                (Some(l), _) => Objective::Lagrangian(LagrangianConfig::new(l, u)?.with_policy(codeword.policy())),
                (None, Some(theta)) => Objective::Constrained {
                    theta,
                    utility: u,
                    policy: codeword.policy(),
                },
                (None, None) => return Err(Error::Config("--lambda or --theta is required".into())),
            };
            let res = oracle_min(&jr, problem.problem(), &objective)?;
            let doc = json!({
                "schema": output::SCHEMA,
                "manifest": manifest("oracle", &input, json!({
                    "problem": problem.problem(),
                    "lambda": lambda,
                    "theta": theta,
                    "utility": u.kind,
                    "codeword": codeword.policy(),
                })),
                "value": res.value,
                "leakage": res.leakage,
                "utility": res.utility,
                "optimum_count": res.optimum_count,
                "partitions_searched": res.partitions_searched,
                "quantization": output::quantization(&jr, &res.quantization),
                "measures": output::measures(&jr, &res.quantization, Some(&u))?,
            });
            emit_json(&doc, out.as_ref())
        }
    }
}

fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|v| {
            v.parse::<f64>()
                .map_err(|_| Error::Config(format!("{v:?} is not a number")))
        })
        .collect()
}

fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    let bad = || Error::Config(format!("grid {spec:?} is not count,min,max[,geometric|linear]"));
    if !(3..=4).contains(&parts.len()) {
        return Err(bad());
    }
    let count: usize = parts[0].parse().map_err(|_| bad())?;
    let min: f64 = parts[1].parse().map_err(|_| bad())?;
    let max: f64 = parts[2].parse().map_err(|_| bad())?;
    match parts.get(3).copied().unwrap_or("geometric") {
        "geometric" | "geom" | "log" => geometric_grid(count, min, max),
        "linear" | "lin" => linear_grid(count, min, max),
        _ => Err(bad()),
    }
}
