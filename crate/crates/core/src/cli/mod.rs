//! The `dlw` command line: parse a JSON document, run one stage, report.
//!
//! Exit codes: 0 success, 1 mathematical negative, 2 input error, 3
//! internal invariant failure.

mod commands;
pub mod document;
mod selftest;

use std::io::Read;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

pub use commands::{cmd_coherence, cmd_delta, cmd_lim, cmd_partition, cmd_propagate, CmdResult, Failure, Report, Status};
pub use document::{AnyProblem, Document, Loaded, Options, Problem};
pub use selftest::{selftest, Check};

use crate::error::Error;
use crate::omega::NegligibleIdeal;
use crate::synth::{pipeline_scenario, planted_uniform, random_omega_system, random_points, seeded, OmegaParams, PipelineParams};

#[derive(Parser, Debug)]
#[command(name = "dlw", version, about = "Exact cohomology of inverse systems of abelian groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Input document (standard input if omitted).
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Highest cohomological degree for `lim`.
    #[arg(long, global = true)]
    pub n_max: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Compare alternating and limit cohomology degree by degree.
    Lim,
    /// Coherence and both kinds of triviality for the family.
    Coherence,
    /// Check a uniform Δ-system, or search for one.
    Delta,
    /// Validate a partition instance against the family's colouring.
    Partition,
    /// Extract, trivialize on A and propagate to the target points.
    Propagate,
    /// Run the built-in invariant suite.
    Selftest,
    /// Print a generated document.
    Synth {
        #[arg(long, value_enum, default_value_t = SynthKind::Pipeline)]
        kind: SynthKind,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthKind {
    Pipeline,
    Lim,
    Delta,
}

/// What a run prints and how it exits.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub code: i32,
    pub output: String,
}

fn render(format: Format, json: serde_json::Value, text: Vec<String>) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(&json).expect("reports serialize") + "\n",
        Format::Text => text.join("\n") + "\n",
    }
}

fn failure_outcome(format: Format, f: Failure) -> Outcome {
    let json = json!({"error": {"stage": f.stage, "exit_code": f.code, "message": f.error.to_string()}});
    let text = vec![format!("error in {}: {}", f.stage, f.error)];
    Outcome {
        code: f.code,
        output: render(format, json, text),
    }
}

/// Generate a document; deterministic in the seed.
pub fn synth_document(kind: SynthKind, seed: u64) -> Result<Document, Error> {
    let mut rng = seeded(seed);
    let loaded = match kind {
        SynthKind::Pipeline => {
            let sc = pipeline_scenario(&mut rng, &PipelineParams::default())?;
            Loaded {
                problem: Some(AnyProblem::OmegaRat(Problem {
                    system: sc.system,
                    index_set: sc.instance.points.clone(),
                    ideal: NegligibleIdeal::empty(),
                    family: Some(sc.phi),
                })),
                partition: Some(sc.instance),
                delta: None,
                options: Options {
                    n_max: None,
                    target: Some(sc.target),
                },
            }
        }
        SynthKind::Lim => {
            let params = OmegaParams {
                kappa: 2,
                max_height: 2,
                max_rank: 2,
                entry_bound: 2,
            };
            let system = random_omega_system(&mut rng, &params);
            let index_set = random_points(&mut rng, &system, 3);
            Loaded {
                problem: Some(AnyProblem::OmegaInt(Problem {
                    system,
                    index_set,
                    ideal: NegligibleIdeal::empty(),
                    family: None,
                })),
                partition: None,
                delta: None,
                options: Options::default(),
            }
        }
        SynthKind::Delta => {
            let p = planted_uniform(&mut rng, (0..6).collect(), 2, 3);
            Loaded {
                problem: None,
                partition: None,
                delta: Some(document::DeltaInput {
                    n: p.n,
                    h: p.h,
                    u: p.u,
                    witness: Some(p.witness),
                    color: None,
                    target: None,
                }),
                options: Options::default(),
            }
        }
    };
    Ok(loaded.to_document())
}

/// Run a command on document text.
pub fn run_on_text(command: Command, text: &str, cli: &Cli) -> Outcome {
    let format = cli.format;
    let result = (|| -> CmdResult {
        let doc = Document::from_json(text).map_err(|e| Failure::from_error("parse", e))?;
        let loaded = doc.load().map_err(|e| Failure::from_error("parse", e))?;
        match command {
            Command::Lim => cmd_lim(&loaded, cli.n_max),
            Command::Coherence => cmd_coherence(&loaded),
            Command::Delta => cmd_delta(&loaded),
            Command::Partition => cmd_partition(&loaded),
            Command::Propagate => cmd_propagate(&loaded),
            Command::Selftest | Command::Synth { .. } => unreachable!("these commands take no document"),
        }
    })();
    match result {
        Ok(r) => Outcome {
            code: if r.status == Status::Success { 0 } else { 1 },
            output: render(format, r.json, r.text),
        },
        Err(f) => failure_outcome(format, f),
    }
}

/// Everything except writing the output.
pub fn run(cli: &Cli) -> Outcome {
    match cli.command {
        Command::Selftest => {
            let checks = selftest(cli.seed);
            let ok = checks.iter().all(Check::passed);
            let json = json!({
                "command": "selftest",
                "passed": ok,
                "checks": checks.iter().map(|c| json!({
                    "name": c.name, "cases": c.cases.to_string(), "failures": c.failures.to_string(),
                    "error": c.error, "passed": c.passed(),
                })).collect::<Vec<_>>(),
            });
            let text = checks
                .iter()
                .map(|c| format!("{} {} ({} cases, {} failures)", if c.passed() { "PASS" } else { "FAIL" }, c.name, c.cases, c.failures))
                .collect();
            Outcome {
                code: if ok { 0 } else { 3 },
                output: render(cli.format, json, text),
            }
        }
        Command::Synth { kind } => match synth_document(kind, cli.seed) {
            Ok(doc) => Outcome {
                code: 0,
                output: doc.to_json() + "\n",
            },
            Err(e) => failure_outcome(cli.format, Failure::from_error("synth", e)),
        },
        command => {
            let text = match &cli.input {
                Some(path) => std::fs::read_to_string(path),
                None => {
                    let mut s = String::new();
                    std::io::stdin().read_to_string(&mut s).map(|_| s)
                }
            };
            match text {
                Ok(text) => run_on_text(command, &text, cli),
                Err(e) => failure_outcome(cli.format, Failure::from_error("input", Error::parse("input", e.to_string()))),
            }
        }
    }
}

/// Parse arguments, run, write the output; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = run(&cli);
    match &cli.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &outcome.output) {
                eprintln!("cannot write {}: {e}", path.display());
                return 2;
            }
        }
        None => print!("{}", outcome.output),
    }
    outcome.code
}
