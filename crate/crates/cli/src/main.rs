//! `gramconv`: recover, transform, mutate and converge grammars from the
//! command line.
//!
//! Exit status is 0 on success, 1 when the operation itself fails, 2 on
//! usage errors and unreadable input, 3 when convergence leaves a residue.

mod pipeline;

use std::io::IsTerminal;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use gramconv::converge::{guided_converge_phases, prodsig_table, sig_metrics};
use gramconv::grammar::{from_json, to_json, Grammar};
use gramconv::metasyntax::{parse_spec, NotationSpec};
use gramconv::mutate::{mutate, Mutation};
use gramconv::recovery::{recover, HeuristicEvent, Warning};
use gramconv::transform::{apply_script, script_from_json, script_to_json, Step};

#[derive(Parser)]
#[command(name = "gramconv", version, about = "Grammar recovery, transformation and convergence")]
struct Cli {
    /// Dump intermediate grammars on stderr
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recover a grammar from text written in the notation of an .edd file
    Recover {
        input: PathBuf,
        #[arg(long)]
        notation: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write warnings and applied heuristics as JSON
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Apply one grammar mutation, `kind[:args]`
    Mutate {
        input: PathBuf,
        #[arg(long, value_parser = parse_mutation)]
        mutation: Mutation,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay a transformation script
    Transform {
        input: PathBuf,
        #[arg(long)]
        script: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Normalize the servant and match it against the master
    Converge {
        master: PathBuf,
        servant: PathBuf,
        /// Write the match report as JSON
        #[arg(long)]
        report: Option<PathBuf>,
        /// Write the converged servant grammar
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the production signatures of a grammar
    Prodsig {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print signature metrics of a grammar as JSON
    Metrics {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the stages of a pipeline configuration
    Pipeline { config: PathBuf },
}

fn parse_mutation(s: &str) -> Result<Mutation, String> {
    s.parse()
}

/// A failed command with its exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Failure {
        Failure { code: 2, message: message.into() }
    }

    pub fn domain(message: impl Into<String>) -> Failure {
        Failure { code: 1, message: message.into() }
    }
}

pub type Outcome = Result<u8, Failure>;

fn color() -> bool {
    std::env::var("GRAMCONV_COLOR").map_or(true, |v| v != "0") && std::io::stderr().is_terminal()
}

fn paint(code: &str, text: &str) -> String {
    if color() {
        format!("\x1b[{code}m{text}\x1b[0m")
    } else {
        text.to_string()
    }
}

pub fn warn(message: &str) {
    eprintln!("{} {message}", paint("33", "warning:"));
}

pub fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

pub fn read_grammar(path: &Path) -> Result<Grammar, Failure> {
    from_json(&read_text(path)?).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

pub fn read_spec(path: &Path) -> Result<NotationSpec, Failure> {
    parse_spec(&read_text(path)?).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

pub fn read_script(path: &Path) -> Result<Vec<Step>, Failure> {
    script_from_json(&read_text(path)?).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

/// Write `text` to `out`, or to stdout.
fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => write_text(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn sidecar(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".trace.json");
    PathBuf::from(s)
}

/// Grammar to `out` plus the steps that produced it next to it.
fn emit_grammar(out: Option<&Path>, g: &Grammar, trace: &[Step]) -> Result<(), Failure> {
    emit(out, &to_json(g))?;
    if let Some(p) = out {
        write_text(&sidecar(p), &script_to_json(trace))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct RecoveryLog<'a> {
    warnings: &'a [Warning],
    heuristics: &'a [HeuristicEvent],
}

pub fn cmd_recover(input: &Path, notation: &Path, out: Option<&Path>, report: Option<&Path>, verbose: bool) -> Outcome {
    let spec = read_spec(notation)?;
    let text = read_text(input)?;
    let rep = recover(&text, &spec).map_err(|e| Failure::domain(format!("{}: {e}", input.display())))?;
    for w in &rep.warnings {
        warn(&format!("{}:{}: {}", input.display(), w.line, w.message));
    }
    if verbose {
        for h in &rep.heuristics {
            eprintln!("{}:{}: {}: {}", input.display(), h.line, h.heuristic, h.detail);
        }
    }
    emit(out, &to_json(&rep.grammar))?;
    if let Some(p) = report {
        let log = RecoveryLog { warnings: &rep.warnings, heuristics: &rep.heuristics };
        write_text(p, &(serde_json::to_string_pretty(&log).expect("log serializes") + "\n"))?;
    }
    Ok(0)
}

pub fn cmd_mutate(input: &Path, m: &Mutation, out: Option<&Path>, verbose: bool) -> Outcome {
    let g = read_grammar(input)?;
    let res = mutate(&g, m).map_err(|e| Failure::domain(format!("{m}: {e}")))?;
    if verbose {
        eprintln!("{m}: {} change(s)", res.changed_count);
        for s in &res.trace {
            eprintln!("  {s}");
        }
    }
    emit_grammar(out, &res.grammar, &res.trace)?;
    Ok(0)
}

pub fn cmd_transform(input: &Path, script: &Path, out: Option<&Path>, verbose: bool) -> Outcome {
    let g = read_grammar(input)?;
    let steps = read_script(script)?;
    let res = apply_script(&g, &steps).map_err(|e| Failure::domain(e.to_string()))?;
    if verbose {
        eprintln!("{} step(s) applied", steps.len());
    }
    emit_grammar(out, &res, &steps)?;
    Ok(0)
}

pub fn cmd_converge(master: &Path, servant: &Path, report: Option<&Path>, out: Option<&Path>, verbose: bool) -> Outcome {
    let m = read_grammar(master)?;
    let s = read_grammar(servant)?;
    let (rep, phases) = guided_converge_phases(&m, &s).map_err(|e| Failure::domain(e.to_string()))?;
    if verbose {
        for ph in &phases {
            eprintln!("== {}\n{}", ph.name, ph.grammar);
        }
    }
    for w in &rep.warnings {
        warn(w);
    }
    print!("{}", rep.render());
    if let Some(p) = report {
        write_text(p, &rep.to_json())?;
    }
    if let Some(p) = out {
        let converged = &phases.last().expect("phases are recorded").grammar;
        let mut trace = rep.anf_trace.clone();
        trace.extend(rep.structural_trace.iter().cloned());
        emit_grammar(Some(p), converged, &trace)?;
    }
    Ok(if rep.is_complete() { 0 } else { 3 })
}

pub fn cmd_prodsig(input: &Path, out: Option<&Path>) -> Outcome {
    emit(out, &prodsig_table(&read_grammar(input)?))?;
    Ok(0)
}

pub fn cmd_metrics(input: &Path, out: Option<&Path>) -> Outcome {
    let m = sig_metrics(&read_grammar(input)?);
    emit(out, &(serde_json::to_string_pretty(&m).expect("metrics serialize") + "\n"))?;
    Ok(0)
}

fn run(cli: Cli) -> Outcome {
    let v = cli.verbose;
    match cli.command {
        Command::Recover { input, notation, out, report } => cmd_recover(&input, &notation, out.as_deref(), report.as_deref(), v),
        Command::Mutate { input, mutation, out } => cmd_mutate(&input, &mutation, out.as_deref(), v),
        Command::Transform { input, script, out } => cmd_transform(&input, &script, out.as_deref(), v),
        Command::Converge { master, servant, report, out } => cmd_converge(&master, &servant, report.as_deref(), out.as_deref(), v),
        Command::Prodsig { input, out } => cmd_prodsig(&input, out.as_deref()),
        Command::Metrics { input, out } => cmd_metrics(&input, out.as_deref()),
        Command::Pipeline { config } => pipeline::run(&config, v),
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors by itself
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("{} {}", paint("31", "error:"), f.message);
            ExitCode::from(f.code)
        }
    }
}
