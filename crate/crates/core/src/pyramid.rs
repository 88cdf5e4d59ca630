//! Coarse-to-fine driver with warping.

use crate::error::{FlowError, Result};
use crate::operators::{build_pyramid, compute_derivatives, default_levels, resize_bilinear, upsample_flow};
use crate::scalar::Real;
use crate::solvers::{primal_energy, solve, SolverConfig, SolverKind, SolverState};

pub use crate::grid::{FlowField, ScalarField};

/// Pyramid and solver settings for [`solve_flow`].
#[derive(Clone, Debug, PartialEq)]
pub struct PyramidConfig<T> {
    /// Number of levels; `None` picks the depth whose coarsest side is closest to 16 px.
    pub levels: Option<usize>,
    pub scale_factor: f64,
    pub warps_per_level: usize,
    pub solver_kind: SolverKind,
    pub solver: SolverConfig<T>,
}

impl<T: Real> PyramidConfig<T> {
    /// Defaults for a solver variant. Zach-pADMM gets `beta = 0`.
    pub fn for_kind(kind: SolverKind) -> Self {
        let mut solver = SolverConfig::default();
        if !kind.uses_illumination() {
            solver.beta = T::zero();
        }
        Self {
            levels: None,
            scale_factor: 0.5,
            warps_per_level: 5,
            solver_kind: kind,
            solver,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale_factor > 0.0 && self.scale_factor < 1.0) {
            return Err(FlowError::config(format!(
                "scale_factor = {} outside (0, 1)",
                self.scale_factor
            )));
        }
        if self.warps_per_level == 0 {
            return Err(FlowError::config("warps_per_level must be at least 1"));
        }
        if self.levels == Some(0) {
            return Err(FlowError::config("levels must be at least 1"));
        }
        self.solver.validate_for(self.solver_kind)
    }
}

impl<T: Real> Default for PyramidConfig<T> {
    fn default() -> Self {
        Self::for_kind(SolverKind::Padmm)
    }
}

/// Diagnostics for one warp.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WarpTrace<T> {
    /// Pyramid level, 0 = finest.
    pub level: usize,
    pub warp: usize,
    pub iterations: usize,
    pub residual: T,
    pub converged: bool,
    /// Energy of the linearized problem at the warm start of this warp.
    pub initial_energy: T,
    /// Energy of the linearized problem at the returned iterate.
    pub energy: T,
}

#[derive(Clone, Debug)]
pub struct FlowSolution<T> {
    pub flow: FlowField<T>,
    /// Illumination field `w`; identically zero for Zach-pADMM.
    pub illumination: ScalarField<T>,
    pub trace: Vec<WarpTrace<T>>,
}

/// Estimates the flow from `frame0` to `frame1` (intensities in `[0, 1]`).
///
/// At each level, coarsest first, every warp re-linearizes about the current
/// flow and runs the configured solver to its stopping rule. The flow is read
/// from the multipliers `(u, v)`. Flow and `w` are prolongated to the next
/// level; the duals restart at zero.
pub fn solve_flow<T: Real>(
    frame0: &ScalarField<T>,
    frame1: &ScalarField<T>,
    cfg: &PyramidConfig<T>,
) -> Result<FlowSolution<T>> {
    frame0.check_same_shape(frame1)?;
    cfg.validate()?;
    let (width, height) = frame0.dims();
    let levels = cfg
        .levels
        .unwrap_or_else(|| default_levels(width, height, cfg.scale_factor, 16));
    let pyr0 = build_pyramid(frame0, levels, cfg.scale_factor)?;
    let pyr1 = build_pyramid(frame1, levels, cfg.scale_factor)?;

    let (cw, ch) = pyr0[levels - 1].dims();
    let mut flow = FlowField::zeros(cw, ch);
    let mut illumination = ScalarField::zeros(cw, ch);
    let mut trace = Vec::new();
    let beta = cfg.solver.beta;

    for level in (0..levels).rev() {
        let (i0, i1) = (&pyr0[level], &pyr1[level]);
        let (w, h) = i0.dims();
        if flow.dims() != (w, h) {
            flow = upsample_flow(&flow, w, h);
            illumination = resize_bilinear(&illumination, w, h);
        }
        let mut state = SolverState::warm_start(illumination, flow)?;
        for warp in 0..cfg.warps_per_level {
            let data = compute_derivatives(i0, i1, &state.flow, beta)?;
            let initial_energy = primal_energy(&state.w, &state.flow, cfg.solver.lambda, &data)?;
            let report = solve(cfg.solver_kind, &mut state, &cfg.solver, &data)?;
            let energy = primal_energy(&state.w, &state.flow, cfg.solver.lambda, &data)?;
            trace.push(WarpTrace {
                level,
                warp,
                iterations: report.iterations,
                residual: report.residual,
                converged: report.converged,
                initial_energy,
                energy,
            });
        }
        flow = state.flow;
        illumination = state.w;
    }

    Ok(FlowSolution {
        flow,
        illumination,
        trace,
    })
}
