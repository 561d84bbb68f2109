//! Pipelines: a JSON list of stages run in order.
//!
//! ```json
//! {"stages": [
//!   {"stage": "recover", "input": "fl.bnf", "notation": "fl.edd", "output": "fl.json"},
//!   {"stage": "mutate", "input": "jaxb.json", "mutation": "normalize-anf", "output": "anf.json"},
//!   {"stage": "converge", "master": "fl.json", "servant": "jaxb.json", "report": "match.json"}
//! ]}
//! ```
//!
//! Relative paths are taken from the directory of the configuration file.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use gramconv::mutate::Mutation;

use crate::{cmd_converge, cmd_metrics, cmd_mutate, cmd_prodsig, cmd_recover, cmd_transform, read_text, Failure, Outcome};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub stages: Vec<Stage>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "stage", rename_all = "lowercase", deny_unknown_fields)]
pub enum Stage {
    Recover { input: PathBuf, notation: PathBuf, output: PathBuf, report: Option<PathBuf> },
    Mutate { input: PathBuf, mutation: Mutation, output: PathBuf },
    Transform { input: PathBuf, script: PathBuf, output: PathBuf },
    Converge { master: PathBuf, servant: PathBuf, report: Option<PathBuf>, output: Option<PathBuf> },
    Prodsig { input: PathBuf, output: Option<PathBuf> },
    Metrics { input: PathBuf, output: Option<PathBuf> },
}

impl Stage {
    fn name(&self) -> &'static str {
        match self {
            Stage::Recover { .. } => "recover",
            Stage::Mutate { .. } => "mutate",
            Stage::Transform { .. } => "transform",
            Stage::Converge { .. } => "converge",
            Stage::Prodsig { .. } => "prodsig",
            Stage::Metrics { .. } => "metrics",
        }
    }

    fn inputs(&self) -> Vec<&PathBuf> {
        match self {
            Stage::Recover { input, notation, .. } => vec![input, notation],
            Stage::Mutate { input, .. } | Stage::Prodsig { input, .. } | Stage::Metrics { input, .. } => vec![input],
            Stage::Transform { input, script, .. } => vec![input, script],
            Stage::Converge { master, servant, .. } => vec![master, servant],
        }
    }

    fn outputs(&self) -> Vec<&PathBuf> {
        match self {
            Stage::Recover { output, report, .. } => std::iter::once(output).chain(report).collect(),
            Stage::Mutate { output, .. } | Stage::Transform { output, .. } => vec![output],
            Stage::Converge { report, output, .. } => report.iter().chain(output).collect(),
            Stage::Prodsig { output, .. } | Stage::Metrics { output, .. } => output.iter().collect(),
        }
    }
}

/// Every input must exist already or be written by an earlier stage.
fn check_inputs(stages: &[Stage], base: &Path) -> Result<(), Failure> {
    let mut produced: BTreeSet<PathBuf> = BTreeSet::new();
    for (i, s) in stages.iter().enumerate() {
        for input in s.inputs() {
            let p = base.join(input);
            if !produced.contains(&p) && !p.is_file() {
                return Err(Failure::usage(format!(
                    "stage {} ({}): input {} neither exists nor is produced earlier",
                    i + 1,
                    s.name(),
                    input.display()
                )));
            }
        }
        produced.extend(s.outputs().into_iter().map(|o| base.join(o)));
    }
    Ok(())
}

pub fn run(config: &Path, verbose: bool) -> Outcome {
    let text = read_text(config)?;
    let cfg: PipelineConfig =
        serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", config.display())))?;
    let base = config.parent().unwrap_or(Path::new("."));
    check_inputs(&cfg.stages, base)?;
    let at = |p: &PathBuf| base.join(p);
    let opt = |p: &Option<PathBuf>| p.as_ref().map(|p| base.join(p));
    let mut status = 0;
    for (i, s) in cfg.stages.iter().enumerate() {
        if verbose {
            eprintln!("stage {}: {}", i + 1, s.name());
        }
        let code = match s {
            Stage::Recover { input, notation, output, report } => {
                cmd_recover(&at(input), &at(notation), Some(&at(output)), opt(report).as_deref(), verbose)
            }
            Stage::Mutate { input, mutation, output } => cmd_mutate(&at(input), mutation, Some(&at(output)), verbose),
            Stage::Transform { input, script, output } => cmd_transform(&at(input), &at(script), Some(&at(output)), verbose),
            Stage::Converge { master, servant, report, output } => {
                cmd_converge(&at(master), &at(servant), opt(report).as_deref(), opt(output).as_deref(), verbose)
            }
            Stage::Prodsig { input, output } => cmd_prodsig(&at(input), opt(output).as_deref()),
            Stage::Metrics { input, output } => cmd_metrics(&at(input), opt(output).as_deref()),
        }
        .map_err(|f| Failure { code: f.code, message: format!("stage {} ({}): {}", i + 1, s.name(), f.message) })?;
        status = status.max(code);
    }
    Ok(status)
}
