use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::Args;
use dualflow::benchio::{self, locate_sequence, EvalResult};
use dualflow::{FlowError, SolverKind};

use crate::overrides::Overrides;
use crate::run::{estimate, load_inputs};

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Matrix file: `sequences = [...]` plus one `[section]` per algorithm
    pub config: PathBuf,
    /// Dataset root; overrides `data_root` in the matrix file
    #[arg(long, env = benchio::DATA_ROOT_ENV)]
    pub data_root: Option<PathBuf>,
    /// Write the report here instead of stdout
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub label: String,
    pub kind: SolverKind,
    pub overrides: Overrides,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Matrix {
    pub data_root: Option<PathBuf>,
    pub sequences: Vec<String>,
    pub entries: Vec<Entry>,
}

fn config_err(path: &Path, msg: impl std::fmt::Display) -> FlowError {
    FlowError::Config(format!("{}: {msg}", path.display()))
}

/// Parses a matrix file. Each table is an algorithm section; its name is
/// the row label and, unless an `algorithm` key is given, the algorithm.
pub fn parse_matrix(text: &str, path: &Path) -> Result<Matrix, FlowError> {
    let table: toml::Table = text.parse().map_err(|e| config_err(path, e))?;
    let mut matrix = Matrix::default();
    for (key, value) in table {
        match (key.as_str(), value) {
            ("data_root", toml::Value::String(s)) => matrix.data_root = Some(PathBuf::from(s)),
            ("sequences", toml::Value::Array(items)) => {
                for item in items {
                    let toml::Value::String(name) = item else {
                        return Err(config_err(path, "sequences must be strings"));
                    };
                    matrix.sequences.push(name);
                }
            }
            (_, toml::Value::Table(mut section)) => {
                let algorithm = match section.remove("algorithm") {
                    Some(toml::Value::String(a)) => a,
                    Some(_) => return Err(config_err(path, format!("[{key}] algorithm must be a string"))),
                    None => key.clone(),
                };
                let kind: SolverKind = algorithm.parse().map_err(|e| config_err(path, format!("[{key}] {e}")))?;
                let overrides: Overrides = toml::Value::Table(section)
                    .try_into()
                    .map_err(|e| config_err(path, format!("[{key}] {e}")))?;
                overrides.config_for(kind).map_err(|e| config_err(path, format!("[{key}] {e}")))?;
                matrix.entries.push(Entry {
                    label: key,
                    kind,
                    overrides,
                });
            }
            (other, _) => return Err(config_err(path, format!("unexpected top-level key '{other}'"))),
        }
    }
    Ok(matrix)
}

#[derive(Clone, Debug)]
pub struct Cell {
    pub sequence: String,
    pub label: String,
    pub outcome: Result<(Option<EvalResult>, f64), String>,
}

fn fmt_opt(x: Option<f64>, digits: usize) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{v:.digits$}"))
}

/// Delimited table with one row per cell, then the per-sequence best values.
pub fn render(cells: &[Cell], sequences: &[String]) -> String {
    let mut out = String::from("sequence|algorithm|AAE|EPE|seconds|status\n");
    for c in cells {
        let row = match &c.outcome {
            Ok((eval, secs)) => format!(
                "{}|{}|{}|{}|{secs:.3}|ok",
                c.sequence,
                c.label,
                fmt_opt(eval.map(|e| e.aae_deg), 3),
                fmt_opt(eval.map(|e| e.epe_px), 3)
            ),
            Err(reason) => format!("{}|{}|-|-|-|failed: {}", c.sequence, c.label, reason.replace(['|', '\n'], " ")),
        };
        out.push_str(&row);
        out.push('\n');
    }
    if cells.is_empty() {
        return out;
    }
    out.push_str("\nbest|sequence|AAE|EPE|seconds\n");
    for seq in sequences {
        let ok: Vec<(&str, Option<EvalResult>, f64)> = cells
            .iter()
            .filter(|c| &c.sequence == seq)
            .filter_map(|c| c.outcome.as_ref().ok().map(|(e, s)| (c.label.as_str(), *e, *s)))
            .collect();
        let best = |key: &dyn Fn(&(&str, Option<EvalResult>, f64)) -> Option<f64>, digits: usize| {
            ok.iter()
                .filter_map(|c| key(c).map(|v| (v, c.0)))
                .min_by(|a, b| a.0.total_cmp(&b.0))
                .map_or_else(|| "-".to_string(), |(v, label)| format!("{v:.digits$} ({label})"))
        };
        let _ = writeln!(
            out,
            "best|{seq}|{}|{}|{}",
            best(&|c| c.1.map(|e| e.aae_deg), 3),
            best(&|c| c.1.map(|e| e.epe_px), 3),
            best(&|c| Some(c.2), 3)
        );
    }
    out
}

pub fn cmd_bench(args: &BenchArgs) -> Result<String, FlowError> {
    let text = std::fs::read_to_string(&args.config).map_err(|e| FlowError::Ingestion {
        path: args.config.display().to_string(),
        reason: e.to_string(),
    })?;
    let matrix = parse_matrix(&text, &args.config)?;
    let root = args.data_root.clone().or(matrix.data_root.clone());
    if root.is_none() && !matrix.sequences.is_empty() && !matrix.entries.is_empty() {
        return Err(FlowError::Config(format!(
            "no dataset root: set data_root, --data-root or {}",
            benchio::DATA_ROOT_ENV
        )));
    }

    let mut cells = Vec::new();
    for seq in &matrix.sequences {
        if matrix.entries.is_empty() {
            break;
        }
        let root = root.as_deref().expect("checked above");
        let inputs = locate_sequence(root, seq)
            .and_then(|p| load_inputs(&p.frame0, &p.frame1, p.ground_truth.as_deref()));
        for entry in &matrix.entries {
            let outcome = match &inputs {
                Ok(inputs) => estimate(entry.kind, &entry.overrides, inputs)
                    .map(|(_, secs, eval)| (eval, secs))
                    .map_err(|e| e.to_string()),
                Err(e) => Err(e.to_string()),
            };
            if let Err(reason) = &outcome {
                eprintln!("{seq} / {}: failed: {reason}", entry.label);
            }
            cells.push(Cell {
                sequence: seq.clone(),
                label: entry.label.clone(),
                outcome,
            });
        }
    }
    Ok(render(&cells, &matrix.sequences))
}
