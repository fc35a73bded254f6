//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 infeasible
//! configuration, 3 guard or internal invariant failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::allocation::{AllocationReport, CsitAllocation, RemovalMode, RemovalPlan};
use crate::channel::{AntennaConfig, ChannelMatrix};
use crate::error::{Error, Result};
use crate::experiments::{feedback_size_sweep, rate_vs_snr, FeedbackSweepSpec, RateSweepSpec, ResultTable};
use crate::feasibility::{self, Classification, FeasibilityReport};
use crate::precoding::{distributed_precode, BeamformerSet, SolverOptions, SubSolve};
use crate::rng::RNG_ID;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

/// Environment variable holding the default worker count for simulations.
pub const WORKERS_ENV: &str = "IACSIT_WORKERS";

#[derive(Parser, Debug)]
#[command(name = "iacsit", about = "Interference alignment with incomplete CSIT sharing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether single-stream IA is feasible for a configuration.
    Feasibility {
        /// Configuration such as "[(2,2)^3]", or a file containing one.
        config: String,
        /// Check every subset pair instead of the polynomial test.
        #[arg(long)]
        brute_force: bool,
        /// Print a JSON report.
        #[arg(long)]
        json: bool,
    },
    /// Compute an incomplete CSIT allocation.
    Allocate {
        /// Configuration such as "[(2,2)^3]", or a file containing one.
        config: String,
        /// Antenna removal search for super-feasible configurations.
        #[arg(long, value_enum, default_value_t = Mode::Heuristic)]
        mode: Mode,
        /// Print a JSON report.
        #[arg(long)]
        json: bool,
    },
    /// Run the distributed precoder on a random channel.
    Precode {
        /// Configuration such as "[(2,2)^3]", or a file containing one.
        config: String,
        /// Allocation JSON written by `allocate --json`, or `auto`.
        #[arg(long)]
        alloc: String,
        /// Seed for the channel draw and the solver starting points.
        #[arg(long)]
        seed: u64,
        /// Stop once the interference leakage falls to this value.
        #[arg(long, default_value_t = SolverOptions::default().tolerance)]
        tol: f64,
        /// Iteration cap for each sub-IC solve.
        #[arg(long, default_value_t = SolverOptions::default().max_iterations)]
        max_iter: usize,
        /// Print a JSON report.
        #[arg(long)]
        json: bool,
    },
    /// Average rate per user against SNR.
    SimulateRate(SimulateArgs),
    /// Average CSIT allocation size against the number of antennas.
    SimulateFeedback(SimulateArgs),
}

#[derive(clap::Args, Debug)]
struct SimulateArgs {
    /// Sweep specification (key = value lines or JSON).
    spec: PathBuf,
    /// Output path; writes `<stem>.csv` and `<stem>.json`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (defaults to all cores).
    #[arg(long, env = WORKERS_ENV)]
    workers: Option<usize>,
    /// Print the JSON document instead of CSV when no --out is given.
    #[arg(long, conflicts_with = "out")]
    json: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Heuristic,
    Exhaustive,
}

impl From<Mode> for RemovalMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Heuristic => RemovalMode::Heuristic,
            Mode::Exhaustive => RemovalMode::Exhaustive,
        }
    }
}

pub fn version_line() -> String {
    format!("{} (rng: {RNG_ID})", env!("CARGO_PKG_VERSION"))
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let version: &'static str = Box::leak(version_line().into_boxed_str());
    let matches = match Cli::command().version(version).try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            use clap::error::ErrorKind;
            let informational = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let sink: &mut dyn Write = if informational { out } else { err };
            let _ = write!(sink, "{}", e.render());
            return if informational { EXIT_OK } else { EXIT_USAGE };
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return EXIT_USAGE;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Infeasible(_) => EXIT_INFEASIBLE,
        e if e.is_internal() => EXIT_INTERNAL,
        _ => EXIT_USAGE,
    }
}

/// Inline configuration, or the contents of a file when the argument is not
/// bracketed.
fn read_config(arg: &str) -> Result<AntennaConfig> {
    let trimmed = arg.trim();
    if !trimmed.starts_with('[') && Path::new(trimmed).is_file() {
        return std::fs::read_to_string(trimmed)?.trim().parse();
    }
    trimmed.parse()
}

fn print_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

/// JSON form of the `feasibility` command.
#[derive(Debug, Serialize, serde::Deserialize, PartialEq)]
pub struct FeasibilityOutput {
    pub config: AntennaConfig,
    pub method: String,
    #[serde(flatten)]
    pub report: FeasibilityReport,
}

/// JSON form of the `precode` command.
#[derive(Debug, Serialize)]
pub struct PrecodeOutput<'a> {
    pub config: &'a AntennaConfig,
    pub seed: u64,
    pub solver: SolverOptions,
    pub allocation: &'a AllocationReport,
    pub converged: bool,
    pub leakage: f64,
    pub replication_consistent: bool,
    pub beamformers: &'a BeamformerSet,
    pub solves: &'a [SubSolve],
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Feasibility {
            config,
            brute_force,
            json,
        } => {
            let config = read_config(&config)?;
            let report = if brute_force {
                feasibility::is_feasible_bruteforce(&config)?
            } else {
                feasibility::is_feasible(&config)
            };
            let feasible = report.feasible;
            if json {
                let method = if brute_force { "brute-force" } else { "polynomial" };
                print_json(
                    out,
                    &FeasibilityOutput {
                        config,
                        method: method.into(),
                        report,
                    },
                )?;
            } else {
                writeln!(out, "{config}: {}", classification_text(report.classification))?;
                if let (Some(w), Some(c)) = (report.witness, report.counts) {
                    let role = if feasible { "tight sub-IC" } else { "violating sub-IC" };
                    writeln!(out, "{role}: {w} (variables {}, equations {})", c.n_var, c.n_eq)?;
                }
            }
            Ok(if feasible { EXIT_OK } else { EXIT_INFEASIBLE })
        }
        Command::Allocate { config, mode, json } => {
            let config = read_config(&config)?;
            let report = AllocationReport::build(&config, mode.into())?;
            if json {
                print_json(out, &report)?;
            } else {
                write_allocation(out, &report)?;
            }
            Ok(EXIT_OK)
        }
        Command::Precode {
            config,
            alloc,
            seed,
            tol,
            max_iter,
            json,
        } => {
            let config = read_config(&config)?;
            let report = load_allocation(&config, &alloc)?;
            let opts = SolverOptions {
                tolerance: tol,
                max_iterations: max_iter,
                init_seed: seed,
            };
            let h = ChannelMatrix::draw(&config, seed);
            let plan = (report.plan.removed() > 0).then_some(&report.plan);
            let d = distributed_precode(&config, &report.masks, plan, &h, &opts)?;
            let output = PrecodeOutput {
                config: &config,
                seed,
                solver: opts,
                allocation: &report,
                converged: d.all_solves_converged(),
                leakage: d.leakage,
                replication_consistent: d.replication_consistent(),
                beamformers: &d.beamformers,
                solves: &d.solves,
            };
            if json {
                print_json(out, &output)?;
            } else {
                writeln!(out, "{config}, channel seed {seed}")?;
                for s in output.solves {
                    let (iters, leak) = s
                        .trace
                        .as_ref()
                        .map_or((0, 0.0), |t| (t.iterations_used, t.final_leakage()));
                    writeln!(
                        out,
                        "TX {}: mask {}, {iters} iterations, leakage {leak:.3e}",
                        s.tx + 1,
                        s.subic
                    )?;
                }
                writeln!(out, "converged: {}", output.converged)?;
                writeln!(out, "leakage: {:.3e}", output.leakage)?;
                writeln!(out, "replicas consistent: {}", output.replication_consistent)?;
            }
            Ok(EXIT_OK)
        }
        Command::SimulateRate(args) => {
            let spec = RateSweepSpec::parse(&std::fs::read_to_string(&args.spec)?)?;
            let table = rate_vs_snr(&spec, args.workers)?;
            emit_table(out, &table, &args)
        }
        Command::SimulateFeedback(args) => {
            let spec = FeedbackSweepSpec::parse(&std::fs::read_to_string(&args.spec)?)?;
            let table = feedback_size_sweep(&spec, args.workers)?;
            emit_table(out, &table, &args)
        }
    }
}

fn classification_text(c: Classification) -> &'static str {
    match c {
        Classification::Infeasible => "INFEASIBLE",
        Classification::Tight => "TIGHT (feasible)",
        Classification::Super => "SUPER (feasible)",
    }
}

fn write_allocation(out: &mut dyn Write, r: &AllocationReport) -> Result<()> {
    writeln!(
        out,
        "configuration: {} ({})",
        r.config,
        classification_text(r.classification)
    )?;
    if r.plan.removed() > 0 {
        let list = |v: &[usize]| v.iter().map(|k| (k + 1).to_string()).collect::<Vec<_>>().join(",");
        writeln!(
            out,
            "removed antennas: RX [{}], TX [{}] -> {}",
            list(&r.plan.rx_removals),
            list(&r.plan.tx_removals),
            r.plan.reduced_config
        )?;
    }
    let k = r.config.users();
    for m in r.masks.masks() {
        let scope = if m.is_complete() {
            "COMPLETE".to_string()
        } else {
            m.subic(k).to_string()
        };
        writeln!(out, "TX {}: {scope}", m.owner_tx + 1)?;
    }
    writeln!(out, "size: {}", r.size)?;
    writeln!(out, "complete size: {}", r.complete_size)?;
    writeln!(out, "reduction: {:.1}%", 100.0 * r.reduction_ratio)?;
    Ok(())
}

/// `auto`, an [`AllocationReport`] as written by `allocate --json`, or a
/// bare list of masks for a tightly-feasible configuration.
fn load_allocation(config: &AntennaConfig, source: &str) -> Result<AllocationReport> {
    if source == "auto" {
        return AllocationReport::build(config, RemovalMode::Heuristic);
    }
    let text = std::fs::read_to_string(source)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let report = if value.is_array() {
        let masks: CsitAllocation = serde_json::from_value(value)?;
        let plan = RemovalPlan::identity(config);
        let size = crate::allocation::allocation_size(config, &masks);
        let complete = crate::allocation::complete_size(config);
        AllocationReport {
            config: config.clone(),
            classification: feasibility::is_feasible(config).classification,
            mode: RemovalMode::Heuristic,
            plan,
            masks,
            size,
            complete_size: complete,
            reduction_ratio: if complete == 0 {
                0.0
            } else {
                1.0 - size as f64 / complete as f64
            },
        }
    } else {
        serde_json::from_value(value)?
    };
    if &report.config != config {
        return Err(Error::InvalidArgument(format!(
            "allocation was computed for {} but the configuration is {config}",
            report.config
        )));
    }
    report.validate()?;
    Ok(report)
}

fn emit_table(out: &mut dyn Write, table: &ResultTable, args: &SimulateArgs) -> Result<i32> {
    match &args.out {
        Some(path) => {
            let csv = path.with_extension("csv");
            let json = path.with_extension("json");
            std::fs::write(&csv, table.to_csv())?;
            std::fs::write(&json, serde_json::to_string_pretty(table)? + "\n")?;
            writeln!(out, "wrote {} and {}", csv.display(), json.display())?;
        }
        None if args.json => print_json(out, table)?,
        None => write!(out, "{}", table.to_csv())?,
    }
    Ok(EXIT_OK)
}
