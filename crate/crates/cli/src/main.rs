//! Command-line interface over the `bisimctl` library.
//!
//! Every subcommand reads the line-oriented text documents (`system`,
//! `morphism`, `relation`), runs one library operation, and prints a
//! deterministic report: identical inputs produce byte-identical output.
//!
//! Exit codes, for scripting:
//!
//! * 0 - the requested property holds / the output was produced
//! * 1 - the property fails (`false`, `NONE`, `NO_CONTROLLER`, FAIL verdict)
//! * 2 - input or parse errors (bad documents, invalid morphisms)
//! * 3 - precondition violations (mismatched label sets, non-identity label
//!   maps, mismatched endpoints, nondeterministic plant)

use std::fmt;
use std::fs;
use std::io::{self, Read, Write};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};

use bisimctl::{
    greatest_bisimulation, greatest_simulation, parallel, parse_morphism, parse_relation,
    parse_system, parse_system_lenient, pullback, serialize_relation, serialize_system,
    CanonicalMediator, Error as CoreError, Morphism, ParseError, Relation, SynthesisProblem,
    SynthesisResult, TransitionSystem,
};

#[derive(Parser)]
#[command(
    name = "bisimctl",
    version,
    about = "Simulation, bisimulation, pullback composition, and controller synthesis \
             for finite labeled transition systems"
)]
struct Cli {
    /// Suppress stdout reports; exit codes still carry the verdict.
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a system document for well-formedness.
    Validate {
        /// System document path, or `-` for stdin.
        file: String,
    },
    /// Print `true` iff the system is deterministic.
    Deterministic {
        /// System document path, or `-` for stdin.
        file: String,
    },
    /// Print the restriction of a system to its reachable states.
    Reachable {
        /// System document path, or `-` for stdin.
        file: String,
    },
    /// Enumerate all runs up to a length bound, one `run <label>...` line each.
    Runs {
        /// Maximum run length.
        #[arg(long)]
        max: usize,
        /// System document path, or `-` for stdin.
        file: String,
    },
    /// Synchronous parallel composition of two systems over the same labels.
    Compose {
        /// Left system document.
        left: String,
        /// Right system document.
        right: String,
    },
    /// Pullback of two systems over a shared mediator system.
    Pullback {
        /// Left system document.
        left: String,
        /// Right system document.
        right: String,
        /// Mediator system document.
        #[arg(long)]
        mediator: String,
        /// Morphism document: left system into the mediator.
        #[arg(long)]
        left_map: String,
        /// Morphism document: right system into the mediator.
        #[arg(long)]
        right_map: String,
        /// Warn instead of failing when a morphism document violates the
        /// morphism conditions.
        #[arg(long)]
        no_check: bool,
    },
    /// Greatest simulation of one system by another, or `NONE`.
    Sim {
        /// Simulated system document.
        #[arg(long)]
        from: String,
        /// Simulating system document.
        #[arg(long)]
        to: String,
        /// Relation document restricting the admissible pairs.
        #[arg(long)]
        compat: Option<String>,
    },
    /// Greatest bisimulation between two systems, or `NONE`.
    Bisim {
        /// Left system document.
        left: String,
        /// Right system document.
        right: String,
    },
    /// Print `true` iff a morphism has the path-lifting (zig-zag) property.
    CheckOpen {
        /// Source system document.
        #[arg(long)]
        source: String,
        /// Target system document.
        #[arg(long)]
        target: String,
        /// Morphism document from source to target.
        #[arg(long)]
        map: String,
        /// Warn instead of failing when the morphism document violates the
        /// morphism conditions.
        #[arg(long)]
        no_check: bool,
    },
    /// Synthesize a controller whose closed loop is bisimilar to the spec.
    Synthesize {
        /// Specification system document.
        #[arg(long)]
        spec: String,
        /// Plant system document (must be deterministic).
        #[arg(long)]
        plant: String,
        /// Mediator system document; defaults to the canonical one-state
        /// mediator over the shared label set (requires --spec-map and
        /// --plant-map when given).
        #[arg(long)]
        mediator: Option<String>,
        /// Morphism document: spec into the mediator.
        #[arg(long)]
        spec_map: Option<String>,
        /// Morphism document: plant into the mediator.
        #[arg(long)]
        plant_map: Option<String>,
        /// Warn instead of failing when a morphism document violates the
        /// morphism conditions.
        #[arg(long)]
        no_check: bool,
    },
    /// Verify a candidate controller against a synthesis problem.
    Verify {
        /// Controller system document.
        #[arg(long)]
        controller: String,
        /// Specification system document.
        #[arg(long)]
        spec: String,
        /// Plant system document.
        #[arg(long)]
        plant: String,
        /// Mediator system document; defaults to the canonical one-state
        /// mediator (requires the three map options when given).
        #[arg(long)]
        mediator: Option<String>,
        /// Morphism document: controller into the mediator.
        #[arg(long)]
        controller_map: Option<String>,
        /// Morphism document: spec into the mediator.
        #[arg(long)]
        spec_map: Option<String>,
        /// Morphism document: plant into the mediator.
        #[arg(long)]
        plant_map: Option<String>,
        /// Warn instead of failing when a morphism document violates the
        /// morphism conditions.
        #[arg(long)]
        no_check: bool,
    },
}

/// A failed invocation: message for stderr plus the exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<CoreError> for Failure {
    fn from(err: CoreError) -> Self {
        let code = match err {
            CoreError::FaithfulnessUnverified { .. }
            | CoreError::LabelSetMismatch { .. }
            | CoreError::LabelMapNotIdentity { .. }
            | CoreError::TargetMismatch { .. }
            | CoreError::SourceMismatch { .. }
            | CoreError::ComposeMismatch { .. } => 3,
            _ => 2,
        };
        Failure {
            code,
            message: err.to_string(),
        }
    }
}

/// Stdout wrapper honoring `--quiet`. When the reader closes the pipe early
/// (`bisimctl ... | head`), the remaining output has no consumer, so the
/// process exits quietly instead of panicking on the broken pipe.
struct Out {
    quiet: bool,
}

impl Out {
    fn line(&self, content: impl fmt::Display) {
        if !self.quiet {
            Self::deliver(writeln!(io::stdout(), "{content}"));
        }
    }

    /// Prints an already newline-terminated document.
    fn doc(&self, content: &str) {
        if !self.quiet {
            Self::deliver(io::stdout().write_all(content.as_bytes()));
        }
    }

    fn deliver(result: io::Result<()>) {
        if let Err(err) = result {
            if err.kind() == io::ErrorKind::BrokenPipe {
                std::process::exit(0);
            }
            eprintln!("error: stdout: {err}");
            std::process::exit(2);
        }
    }
}

fn read_input(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Failure::input(format!("stdin: {e}")))?;
        return Ok(buf);
    }
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{path}: {e}")))
}

fn parse_failure(path: &str, err: ParseError) -> Failure {
    Failure::input(format!("{path}: {err}"))
}

fn load_system(path: &str) -> Result<Arc<TransitionSystem>, Failure> {
    let text = read_input(path)?;
    parse_system(&text)
        .map(Arc::new)
        .map_err(|e| parse_failure(path, e))
}

/// Loads a morphism document and gates on the morphism conditions. With
/// `no_check` the violations go to stderr and the morphism is used as-is.
fn load_morphism(
    path: &str,
    source: &Arc<TransitionSystem>,
    target: &Arc<TransitionSystem>,
    no_check: bool,
) -> Result<Morphism, Failure> {
    let text = read_input(path)?;
    let morphism = parse_morphism(&text, source, target).map_err(|e| parse_failure(path, e))?;
    let report = morphism.check();
    if !report.is_empty() {
        if no_check {
            for violation in report.violations() {
                eprintln!("warning: {path}: {violation}");
            }
        } else {
            return Err(Failure::input(format!(
                "{path}: invalid morphism `{}` -> `{}`: {}",
                morphism.source().name(),
                morphism.target().name(),
                report.violations()[0]
            )));
        }
    }
    Ok(morphism)
}

fn load_relation(
    path: &str,
    left: &Arc<TransitionSystem>,
    right: &Arc<TransitionSystem>,
) -> Result<Relation, Failure> {
    let text = read_input(path)?;
    parse_relation(&text, left, right).map_err(|e| parse_failure(path, e))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = Out { quiet: cli.quiet };
    match run(cli.command, &out) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn run(command: Command, out: &Out) -> Result<u8, Failure> {
    match command {
        Command::Validate { file } => {
            let text = read_input(&file)?;
            let sys = parse_system_lenient(&text).map_err(|e| parse_failure(&file, e))?;
            let report = sys.validate();
            out.line(&report);
            Ok(if report.is_empty() { 0 } else { 1 })
        }
        Command::Deterministic { file } => {
            let sys = load_system(&file)?;
            let deterministic = sys.is_deterministic();
            out.line(deterministic);
            Ok(if deterministic { 0 } else { 1 })
        }
        Command::Reachable { file } => {
            let sys = load_system(&file)?;
            out.doc(&serialize_system(&sys.reachable()));
            Ok(0)
        }
        Command::Runs { max, file } => {
            let sys = load_system(&file)?;
            for word in sys.enumerate_runs(max) {
                let mut line = String::from("run");
                for label in &word {
                    line.push(' ');
                    line.push_str(label.as_str());
                }
                out.line(line);
            }
            Ok(0)
        }
        Command::Compose { left, right } => {
            let left = load_system(&left)?;
            let right = load_system(&right)?;
            let result = parallel(&left, &right)?;
            out.doc(&serialize_system(result.product()));
            Ok(0)
        }
        Command::Pullback {
            left,
            right,
            mediator,
            left_map,
            right_map,
            no_check,
        } => {
            let left = load_system(&left)?;
            let right = load_system(&right)?;
            let mediator = load_system(&mediator)?;
            let f = load_morphism(&left_map, &left, &mediator, no_check)?;
            let g = load_morphism(&right_map, &right, &mediator, no_check)?;
            let result = pullback(&f, &g)?;
            out.doc(&serialize_system(result.product()));
            Ok(0)
        }
        Command::Sim { from, to, compat } => {
            let from = load_system(&from)?;
            let to = load_system(&to)?;
            let compat = match compat {
                Some(path) => Some(load_relation(&path, &from, &to)?),
                None => None,
            };
            match greatest_simulation(&from, &to, compat.as_ref())? {
                Some(relation) => {
                    out.doc(&serialize_relation(&relation));
                    Ok(0)
                }
                None => {
                    out.line("NONE");
                    Ok(1)
                }
            }
        }
        Command::Bisim { left, right } => {
            let left = load_system(&left)?;
            let right = load_system(&right)?;
            match greatest_bisimulation(&left, &right)? {
                Some(relation) => {
                    out.doc(&serialize_relation(&relation));
                    Ok(0)
                }
                None => {
                    out.line("NONE");
                    Ok(1)
                }
            }
        }
        Command::CheckOpen {
            source,
            target,
            map,
            no_check,
        } => {
            let source = load_system(&source)?;
            let target = load_system(&target)?;
            let morphism = load_morphism(&map, &source, &target, no_check)?;
            let open = morphism.is_open()?;
            out.line(open);
            Ok(if open { 0 } else { 1 })
        }
        Command::Synthesize {
            spec,
            plant,
            mediator,
            spec_map,
            plant_map,
            no_check,
        } => {
            let spec = load_system(&spec)?;
            let plant = load_system(&plant)?;
            let problem = build_problem(&spec, &plant, mediator, spec_map, plant_map, no_check)?;
            match problem.synthesize()? {
                SynthesisResult::Success {
                    controller_map,
                    closed_loop,
                    witness,
                    verification,
                } => {
                    out.line("SUCCESS");
                    out.line(format_args!(
                        "controller: {}",
                        controller_map.source().name()
                    ));
                    out.line(&verification);
                    out.line("witness:");
                    out.doc(&serialize_relation(&witness));
                    out.line("closed loop (reachable):");
                    out.doc(&serialize_system(&closed_loop.product().reachable()));
                    Ok(0)
                }
                SynthesisResult::NoController {
                    initial_pair,
                    unmatched,
                } => {
                    out.line("NO_CONTROLLER");
                    out.line(format_args!(
                        "initial pair: ({},{})",
                        initial_pair.0, initial_pair.1
                    ));
                    if let Some(transition) = unmatched {
                        out.line(format_args!("unmatched: {transition}"));
                    }
                    Ok(1)
                }
            }
        }
        Command::Verify {
            controller,
            spec,
            plant,
            mediator,
            controller_map,
            spec_map,
            plant_map,
            no_check,
        } => {
            let controller = load_system(&controller)?;
            let spec = load_system(&spec)?;
            let plant = load_system(&plant)?;
            let (problem, c_map) = match mediator {
                None => {
                    require_absent(&controller_map, "--controller-map", "--mediator")?;
                    require_absent(&spec_map, "--spec-map", "--mediator")?;
                    require_absent(&plant_map, "--plant-map", "--mediator")?;
                    let canonical = CanonicalMediator::new(spec.labels());
                    let problem =
                        SynthesisProblem::canonical(Arc::clone(&spec), Arc::clone(&plant))?;
                    let c_map = canonical.morphism_from(&controller)?;
                    (problem, c_map)
                }
                Some(path) => {
                    let mediator = load_system(&path)?;
                    let controller_map_path =
                        require_present(controller_map, "--controller-map", "--mediator")?;
                    let spec_map_path = require_present(spec_map, "--spec-map", "--mediator")?;
                    let plant_map_path = require_present(plant_map, "--plant-map", "--mediator")?;
                    let s_map = load_morphism(&spec_map_path, &spec, &mediator, no_check)?;
                    let p_map = load_morphism(&plant_map_path, &plant, &mediator, no_check)?;
                    let c_map =
                        load_morphism(&controller_map_path, &controller, &mediator, no_check)?;
                    (SynthesisProblem::new(s_map, p_map)?, c_map)
                }
            };
            let report = problem.verify_controller(&c_map)?;
            out.line(format_args!("bisimilar={}", report.bisimilar()));
            out.line(format_args!(
                "mediator_commutes={}",
                report.mediator_commutes()
            ));
            out.line(format_args!(
                "faithfulness_checked={}",
                report.faithfulness_checked()
            ));
            let passes = report.passes();
            out.line(format_args!(
                "verdict: {}",
                if passes { "PASS" } else { "FAIL" }
            ));
            Ok(if passes { 0 } else { 1 })
        }
    }
}

/// Assembles the synthesis problem from either the canonical mediator or an
/// explicit mediator document with its two morphism documents.
fn build_problem(
    spec: &Arc<TransitionSystem>,
    plant: &Arc<TransitionSystem>,
    mediator: Option<String>,
    spec_map: Option<String>,
    plant_map: Option<String>,
    no_check: bool,
) -> Result<SynthesisProblem, Failure> {
    match mediator {
        None => {
            require_absent(&spec_map, "--spec-map", "--mediator")?;
            require_absent(&plant_map, "--plant-map", "--mediator")?;
            Ok(SynthesisProblem::canonical(
                Arc::clone(spec),
                Arc::clone(plant),
            )?)
        }
        Some(path) => {
            let mediator = load_system(&path)?;
            let spec_map_path = require_present(spec_map, "--spec-map", "--mediator")?;
            let plant_map_path = require_present(plant_map, "--plant-map", "--mediator")?;
            let s_map = load_morphism(&spec_map_path, spec, &mediator, no_check)?;
            let p_map = load_morphism(&plant_map_path, plant, &mediator, no_check)?;
            Ok(SynthesisProblem::new(s_map, p_map)?)
        }
    }
}

fn require_present(value: Option<String>, flag: &str, with: &str) -> Result<String, Failure> {
    value.ok_or_else(|| Failure::input(format!("{flag} is required when {with} is given")))
}

fn require_absent(value: &Option<String>, flag: &str, without: &str) -> Result<(), Failure> {
    if value.is_some() {
        return Err(Failure::input(format!(
            "{flag} requires {without} to be given as well"
        )));
    }
    Ok(())
}
