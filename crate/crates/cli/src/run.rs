use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Args;
use dualflow::benchio::{self, locate_sequence, EvalResult};
use dualflow::{FlowError, FlowField, ScalarField, SolverKind};
use serde::Serialize;

use crate::overrides::Overrides;

#[derive(Args, Debug)]
pub struct RunArgs {
    /// First frame (PNG, PGM or PPM)
    #[arg(long, required_unless_present = "sequence")]
    pub frame0: Option<PathBuf>,
    /// Second frame
    #[arg(long, required_unless_present = "sequence")]
    pub frame1: Option<PathBuf>,
    /// Ground-truth `.flo` file; enables AAE/EPE
    #[arg(long)]
    pub gt: Option<PathBuf>,
    /// Sequence name under the dataset root (frames and ground truth)
    #[arg(long, conflicts_with_all = ["frame0", "frame1"])]
    pub sequence: Option<String>,
    /// Dataset root for --sequence
    #[arg(long, env = benchio::DATA_ROOT_ENV)]
    pub data_root: Option<PathBuf>,
    /// pADMM, rpADMMI, rpADMMII, Zach-pADMM or pDR
    #[arg(long, default_value = "pADMM")]
    pub algorithm: String,
    #[command(flatten)]
    pub overrides: Overrides,
    /// Estimated flow output
    #[arg(long, short, default_value = "flow.flo")]
    pub output: PathBuf,
    /// Color-coded flow PNG
    #[arg(long)]
    pub color: Option<PathBuf>,
    /// Saturation magnitude for --color (default: largest flow)
    #[arg(long)]
    pub max_flow: Option<f64>,
    /// JSON metrics record
    #[arg(long)]
    pub metrics: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct Metrics {
    pub algorithm: String,
    pub width: usize,
    pub height: usize,
    pub runtime_seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aae_deg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epe_px: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub valid_pixels: Option<usize>,
}

/// Frames and optional ground truth of one run.
pub struct Inputs {
    pub frame0: ScalarField,
    pub frame1: ScalarField,
    pub gt: Option<FlowField>,
}

pub fn load_inputs(frame0: &Path, frame1: &Path, gt: Option<&Path>) -> Result<Inputs, FlowError> {
    Ok(Inputs {
        frame0: benchio::read_gray_image(frame0)?,
        frame1: benchio::read_gray_image(frame1)?,
        gt: gt.map(benchio::read_flo).transpose()?,
    })
}

/// Solves one pair; the runtime covers `solve_flow` only.
pub fn estimate(
    kind: SolverKind,
    overrides: &Overrides,
    inputs: &Inputs,
) -> Result<(FlowField, f64, Option<EvalResult>), FlowError> {
    let cfg = overrides.config_for(kind)?;
    let start = Instant::now();
    let solution = dualflow::solve_flow(&inputs.frame0, &inputs.frame1, &cfg)?;
    let seconds = start.elapsed().as_secs_f64();
    let eval = inputs.gt.as_ref().map(|gt| benchio::evaluate(&solution.flow, gt)).transpose()?;
    Ok((solution.flow, seconds, eval))
}

fn resolve_paths(args: &RunArgs) -> Result<(PathBuf, PathBuf, Option<PathBuf>), FlowError> {
    match &args.sequence {
        Some(name) => {
            let root = args.data_root.as_ref().ok_or_else(|| {
                FlowError::Config(format!("--sequence needs --data-root or {}", benchio::DATA_ROOT_ENV))
            })?;
            let seq = locate_sequence(root, name)?;
            Ok((seq.frame0, seq.frame1, args.gt.clone().or(seq.ground_truth)))
        }
        None => Ok((
            args.frame0.clone().expect("clap requires frame0"),
            args.frame1.clone().expect("clap requires frame1"),
            args.gt.clone(),
        )),
    }
}

pub fn cmd_run(args: &RunArgs) -> Result<Metrics, FlowError> {
    let kind: SolverKind = args.algorithm.parse()?;
    args.overrides.config_for(kind)?;
    let (frame0, frame1, gt) = resolve_paths(args)?;
    let inputs = load_inputs(&frame0, &frame1, gt.as_deref())?;
    let (flow, seconds, eval) = estimate(kind, &args.overrides, &inputs)?;

    benchio::write_flo(&args.output, &flow)?;
    if let Some(path) = &args.color {
        benchio::write_color_png(&benchio::flow_to_color(&flow, args.max_flow), path)?;
    }
    let (width, height) = flow.dims();
    let metrics = Metrics {
        algorithm: kind.name().to_string(),
        width,
        height,
        runtime_seconds: seconds,
        aae_deg: eval.map(|e| e.aae_deg),
        epe_px: eval.map(|e| e.epe_px),
        valid_pixels: eval.map(|e| e.valid_pixel_count),
    };
    if let Some(path) = &args.metrics {
        let json = serde_json::to_string_pretty(&metrics).expect("metrics serialize");
        std::fs::write(path, json + "\n")?;
    }
    Ok(metrics)
}
