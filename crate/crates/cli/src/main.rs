//! `linksched` command line interface.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use linksched::baselines::{run_baseline, BaselineKind};
use linksched::centralized::{app_schedule, exhaustive_opt, theorem1_bound};
use linksched::distributed::{
    run_distributed, run_distributed_frame, theorem3_bound, theorem3_bound_value, ProtocolParams,
};
use linksched::experiment::{emit_results, run_experiment, summary_path, ExperimentConfig};
use linksched::feasibility::{check_all, throughput, Schedule};
use linksched::scenario::{
    format_scenario, format_schedule, generate_scenario, parse_scenario, parse_schedule,
};
use linksched::{Error, NetworkInstance};

#[derive(Parser)]
#[command(
    name = "linksched",
    version,
    about = "Link scheduling under the SINR interference model"
)]
struct Cli {
    /// TOML configuration with `[scenario]` and `[experiment]` tables.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; overrides the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    App,
    Pm,
    Pg,
    Pcg,
    Opt,
    Dist,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random scenario file.
    Gen {
        /// Pair count; overrides the configuration.
        #[arg(long)]
        pairs: Option<usize>,
    },
    /// Compute a schedule for a scenario file.
    Schedule {
        #[arg(long)]
        algo: Algo,
        #[arg(long)]
        scenario: PathBuf,
        /// Frame length T; overrides the configuration.
        #[arg(long)]
        frame: Option<usize>,
    },
    /// Run the distributed protocol and write its slot trace.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        /// Run exactly this many slots instead of stopping at full coverage.
        #[arg(long)]
        frame: Option<usize>,
        /// Slot budget when running to coverage; defaults to |E| times
        /// `theorem3_bound` for the scenario.
        #[arg(long)]
        max_slots: Option<usize>,
    },
    /// Evaluate a probability (1) or slot-count (3) bound.
    Bound {
        #[arg(long, value_parser = ["1", "3"])]
        theorem: String,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        delta_ratio: Option<f64>,
        #[arg(long)]
        a_hat: Option<f64>,
        /// Scenario for `--theorem 3`; alternatively pass --d-max.
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long)]
        d_max: Option<f64>,
    },
    /// Check a schedule file against a scenario; exits 1 on any violation.
    Check {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
    },
    /// Run the configured experiment and write results plus a summary.
    Experiment,
}

#[derive(Debug)]
enum CliError {
    Lib(Error),
    Usage(String),
    Violations(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

type CliResult<T> = Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
        .into()
    })
}

fn load_scenario(path: &Path) -> CliResult<NetworkInstance> {
    parse_scenario(&read(path)?).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| {
            Error::Io {
                path: path.display().to_string(),
                source,
            }
            .into()
        }),
        None => {
            let _ = std::io::stdout().write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn load_config(cli: &Cli) -> CliResult<ExperimentConfig> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.scenario.seed = seed;
    }
    Ok(config)
}

fn run(cli: &Cli) -> CliResult<()> {
    let mut config = load_config(cli)?;
    let seed = config.scenario.seed;
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Gen { pairs } => {
            if let Some(n) = pairs {
                config.scenario.pairs = *n;
            }
            let inst = generate_scenario(&config.scenario, seed)?;
            emit(out, &format_scenario(&inst))
        }
        Command::Schedule {
            algo,
            scenario,
            frame,
        } => {
            let inst = load_scenario(scenario)?;
            let t = frame.unwrap_or(config.scenario.frame_length);
            let (schedule, uncovered, extra): (Schedule, Vec<usize>, String) = match algo {
                Algo::App => {
                    let o = app_schedule(&inst, t, seed)?;
                    let extra = format!(" lp_bound={} delta_ratio={}", o.a_hat, o.delta_ratio());
                    (o.schedule, o.uncovered, extra)
                }
                Algo::Pm | Algo::Pg | Algo::Pcg => {
                    let kind = match algo {
                        Algo::Pm => BaselineKind::ProtocolModel,
                        Algo::Pg => BaselineKind::PhysicalGreedy,
                        _ => BaselineKind::PhysicalConflictGraph,
                    };
                    let b = run_baseline(kind, &inst, config.scenario.interference_range, t)?;
                    let extra = format!(" colors={}", b.colors);
                    (b.schedule, b.uncovered, extra)
                }
                Algo::Opt => match exhaustive_opt(&inst, t)? {
                    Some(o) => (o.schedule, Vec::new(), String::new()),
                    None => {
                        return Err(CliError::Violations(format!(
                            "no schedule covers every link within {t} slots"
                        )))
                    }
                },
                Algo::Dist => {
                    let params = ProtocolParams::for_instance(&inst)?;
                    let trace = run_distributed_frame(&inst, &params, t, seed)?;
                    let extra = match trace.slots_used {
                        Some(s) => format!(" slots_used={s}"),
                        None => String::new(),
                    };
                    (trace.schedule(), trace.uncovered(), extra)
                }
            };
            eprintln!(
                "throughput={} uncovered={:?}{extra}",
                throughput(&inst, &schedule)?,
                uncovered
            );
            emit(out, &format_schedule(&schedule))
        }
        Command::Simulate {
            scenario,
            frame,
            max_slots,
        } => {
            let inst = load_scenario(scenario)?;
            let params = ProtocolParams::for_instance(&inst)?;
            let trace = match frame {
                Some(t) => run_distributed_frame(&inst, &params, *t, seed)?,
                None => {
                    let budget = max_slots.unwrap_or_else(|| {
                        (inst.num_links() as f64 * theorem3_bound(&inst, &params)).ceil() as usize
                    });
                    run_distributed(&inst, &params, budget, seed)?
                }
            };
            eprintln!(
                "slots={} complete={} slots_used={:?} uncovered={:?}",
                trace.slots.len(),
                trace.complete,
                trace.slots_used,
                trace.uncovered()
            );
            emit(out, &trace.to_text())
        }
        Command::Bound {
            theorem,
            theta,
            delta_ratio,
            a_hat,
            scenario,
            d_max,
        } => {
            let value = if theorem == "1" {
                let need = |v: Option<f64>, name: &str| {
                    v.ok_or_else(|| CliError::Usage(format!("--theorem 1 needs --{name}")))
                };
                theorem1_bound(
                    need(*theta, "theta")?,
                    delta_ratio.unwrap_or(0.0),
                    need(*a_hat, "a-hat")?,
                )?
            } else {
                match (scenario, d_max) {
                    (Some(path), _) => {
                        let inst = load_scenario(path)?;
                        theorem3_bound(&inst, &ProtocolParams::for_instance(&inst)?)
                    }
                    (None, Some(d)) => {
                        let r = config.scenario.radio()?;
                        theorem3_bound_value(*d, r.alpha, r.beta)?
                    }
                    (None, None) => {
                        return Err(CliError::Usage(
                            "--theorem 3 needs --scenario or --d-max".into(),
                        ))
                    }
                }
            };
            emit(out, &format!("{value}\n"))
        }
        Command::Check { scenario, schedule } => {
            let inst = load_scenario(scenario)?;
            let sched = parse_schedule(&read(schedule)?)
                .map_err(|e| CliError::Usage(format!("{}: {e}", schedule.display())))?;
            let report = check_all(&inst, &sched)?;
            let mut text = String::new();
            text.push_str(&format!(
                "coverage: {} uncovered {:?}\n",
                report.uncovered.len(),
                report.uncovered
            ));
            let r = &report.radio;
            for (name, list) in [
                ("multiple receptions", &r.multiple_receptions),
                ("multiple transmissions", &r.multiple_transmissions),
                ("half duplex", &r.half_duplex),
            ] {
                text.push_str(&format!("{name}: {}", list.len()));
                for w in list.iter() {
                    text.push_str(&format!(" (slot {} node {})", w.slot, w.node));
                }
                text.push('\n');
            }
            text.push_str(&format!("sinr: {}", report.sinr.len()));
            for w in &report.sinr {
                text.push_str(&format!(
                    " (slot {} link {} sinr {:.4})",
                    w.slot, w.link, w.sinr
                ));
            }
            text.push('\n');
            text.push_str(&format!("throughput: {}\n", throughput(&inst, &sched)?));
            text.push_str(&format!("feasible: {}\n", report.feasible));
            emit(out, &text)?;
            if report.feasible {
                Ok(())
            } else {
                Err(CliError::Violations(
                    "schedule violates the constraints above".into(),
                ))
            }
        }
        Command::Experiment => {
            let path =
                out.ok_or_else(|| CliError::Usage("experiment needs --out <results.csv>".into()))?;
            let table = run_experiment(&config)?;
            emit_results(&table, path)?;
            eprintln!(
                "{} rows written to {} and {}",
                table.rows.len(),
                path.display(),
                summary_path(path).display()
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Violations(msg)) => {
            eprintln!("linksched: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Lib(e)) => {
            eprintln!("linksched: error: {e}");
            ExitCode::from(2)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("linksched: error: {msg}");
            ExitCode::from(2)
        }
    }
}
