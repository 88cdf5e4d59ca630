//! Locating Middlebury sequences on disk.

use std::path::{Path, PathBuf};

use crate::error::{FlowError, Result};

/// Environment variable naming the default dataset root.
pub const DATA_ROOT_ENV: &str = "DUALFLOW_DATA";

/// Frame pair and optional ground truth of one sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequencePaths {
    pub name: String,
    pub frame0: PathBuf,
    pub frame1: PathBuf,
    pub ground_truth: Option<PathBuf>,
}

/// The dataset root from [`DATA_ROOT_ENV`], if set and non-empty.
pub fn data_root_from_env() -> Option<PathBuf> {
    std::env::var_os(DATA_ROOT_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
}

fn first_existing(candidates: &[PathBuf]) -> Option<PathBuf> {
    candidates.iter().find(|p| p.is_file()).cloned()
}

/// Finds `name` under `root`, accepting the benchmark's split layout
/// (`other-data/<name>/frame10.png`, `other-gt-flow/<name>/flow10.flo`) or a
/// flat `<name>/` directory holding both.
pub fn locate_sequence(root: &Path, name: &str) -> Result<SequencePaths> {
    let dirs = [root.join("other-data").join(name), root.join(name)];
    let frame = |stem: &str| {
        let candidates: Vec<PathBuf> = dirs
            .iter()
            .flat_map(|d| ["png", "pgm", "ppm"].map(|ext| d.join(format!("{stem}.{ext}"))))
            .collect();
        first_existing(&candidates)
    };
    let (Some(frame0), Some(frame1)) = (frame("frame10"), frame("frame11")) else {
        return Err(FlowError::Ingestion {
            path: root.join(name).display().to_string(),
            reason: format!("sequence '{name}' has no frame10/frame11 image (png, pgm or ppm)"),
        });
    };
    let ground_truth = first_existing(&[
        root.join("other-gt-flow").join(name).join("flow10.flo"),
        root.join(name).join("flow10.flo"),
    ]);
    Ok(SequencePaths {
        name: name.to_string(),
        frame0,
        frame1,
        ground_truth,
    })
}
