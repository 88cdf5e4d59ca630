use std::process::ExitCode;

use dualflow::FlowError;

pub const CONFIG: u8 = 2;
pub const INGESTION: u8 = 3;
pub const FORMAT: u8 = 4;
pub const NUMERICAL: u8 = 5;

/// Exit status for each error family.
pub fn code_for(err: &FlowError) -> u8 {
    match err {
        FlowError::Config(_) => CONFIG,
        FlowError::Ingestion { .. } | FlowError::Io(_) | FlowError::Dimension { .. } => INGESTION,
        FlowError::Format { .. } | FlowError::InvalidField(_) | FlowError::Evaluation(_) => FORMAT,
        FlowError::Numerical(_) => NUMERICAL,
    }
}

pub fn report(err: &FlowError) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(code_for(err))
}
