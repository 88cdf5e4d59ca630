use clap::Args;
use dualflow::{FlowError, PyramidConfig64, SolverKind};
use serde::Deserialize;

/// Solver and pyramid parameters that replace the per-algorithm defaults.
#[derive(Args, Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    /// Data term weight
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Illumination weight (must be 0 for Zach-pADMM)
    #[arg(long)]
    pub beta: Option<f64>,
    /// ADMM penalty
    #[arg(long)]
    pub c: Option<f64>,
    /// Preconditioner weight for (p, q), at least 8
    #[arg(long)]
    pub a: Option<f64>,
    /// rpADMMI relaxation in (0, 1.618...)
    #[arg(long)]
    pub r: Option<f64>,
    /// rpADMMII relaxation in (0, 2)
    #[arg(long)]
    pub rho: Option<f64>,
    /// pDR primal step
    #[arg(long)]
    pub sigma: Option<f64>,
    /// pDR dual step
    #[arg(long)]
    pub tau: Option<f64>,
    /// SRBGS passes per pDR iteration
    #[arg(long)]
    pub srbgs_sweeps: Option<usize>,
    /// Pyramid levels (default: coarsest side near 16 px)
    #[arg(long)]
    pub levels: Option<usize>,
    /// Downsampling factor between levels
    #[arg(long)]
    pub scale_factor: Option<f64>,
    /// Warps per pyramid level
    #[arg(long)]
    pub warps: Option<usize>,
    /// Residual tolerance per warp
    #[arg(long)]
    pub tol: Option<f64>,
    /// Iteration cap per warp
    #[arg(long)]
    pub max_iters: Option<usize>,
}

impl Overrides {
    /// Defaults for `kind` with every given field replaced, validated.
    pub fn config_for(&self, kind: SolverKind) -> Result<PyramidConfig64, FlowError> {
        let mut cfg = PyramidConfig64::for_kind(kind);
        let s = &mut cfg.solver;
        macro_rules! set {
            ($($field:ident => $target:expr),* $(,)?) => {
                $(if let Some(v) = self.$field { $target = v; })*
            };
        }
        set!(
            lambda => s.lambda,
            beta => s.beta,
            c => s.c,
            a => s.a,
            r => s.r,
            rho => s.rho,
            sigma => s.sigma,
            tau => s.tau,
            srbgs_sweeps => s.srbgs_sweeps,
            tol => s.tol,
            max_iters => s.max_iters,
            scale_factor => cfg.scale_factor,
            warps => cfg.warps_per_level,
        );
        if self.levels.is_some() {
            cfg.levels = self.levels;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
