//! Single-level solver engines for the linearized TV-L1 problem
//!
//! ```text
//! min_{w,u,v} ||grad w||_1 + ||(grad u, grad v)||_1 + lambda ||Ix u + Iy v + beta w + It||_1
//! ```
//!
//! and its dual `max <It, s>` subject to `beta s = div p`, `Ix s = div q1`,
//! `Iy s = div q2`, `|p| <= 1`, `|q| <= 1`, `|s| <= lambda`.

mod admm;
mod pdr;
mod srbgs;

use std::fmt;
use std::str::FromStr;

pub use admm::{rpadmm1_step, rpadmm2_step, zach_padmm_step};
pub use pdr::pdr_step;
pub use srbgs::{srbgs_apply, srbgs_in_place, srbgs_preconditioner_inverse};

use crate::error::{FlowError, Result};
use crate::grid::{check_dims, Field, FlowField, ScalarField, VectorField2, VectorField4};
use crate::operators::{divergence, gradient, ImageData};
use crate::prox::DualState;
use crate::scalar::Real;

/// Bound on `||grad grad^*||` for the forward-difference gradient.
pub const GRAD_NORM_BOUND: f64 = 8.0;

/// Upper end of the admissible multiplier relaxation interval, `(sqrt(5) + 1) / 2`.
pub fn golden_ratio<T: Real>() -> T {
    (T::lit(5.0).sqrt() + T::one()) / T::lit(2.0)
}

/// The solver variants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SolverKind {
    /// rpADMMI without relaxation (`r = 1`).
    Padmm,
    /// Preconditioned ADMM with relaxed multiplier update, `r in (0, golden ratio)`.
    RpadmmI,
    /// Preconditioned ADMM with Douglas-Rachford type relaxation, `rho in (0, 2)`.
    RpadmmII,
    /// Preconditioned ADMM for the model without illumination field (`beta = 0`).
    ZachPadmm,
    /// Preconditioned Douglas-Rachford splitting with SRBGS.
    Pdr,
}

impl SolverKind {
    pub const ALL: [SolverKind; 5] = [
        SolverKind::Padmm,
        SolverKind::RpadmmI,
        SolverKind::RpadmmII,
        SolverKind::ZachPadmm,
        SolverKind::Pdr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Padmm => "pADMM",
            SolverKind::RpadmmI => "rpADMMI",
            SolverKind::RpadmmII => "rpADMMII",
            SolverKind::ZachPadmm => "Zach-pADMM",
            SolverKind::Pdr => "pDR",
        }
    }

    /// Whether the variant solves the model with illumination field `w`.
    pub fn uses_illumination(self) -> bool {
        self != SolverKind::ZachPadmm
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = FlowError;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "padmm" => Ok(SolverKind::Padmm),
            "rpadmmi" | "rpadmm1" => Ok(SolverKind::RpadmmI),
            "rpadmmii" | "rpadmm2" => Ok(SolverKind::RpadmmII),
            "zachpadmm" | "zach" => Ok(SolverKind::ZachPadmm),
            "pdr" => Ok(SolverKind::Pdr),
            _ => Err(FlowError::config(format!(
                "unknown algorithm '{s}' (expected one of pADMM, rpADMMI, rpADMMII, Zach-pADMM, pDR)"
            ))),
        }
    }
}

/// Parameters of one solver run.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig<T> {
    /// Data term weight, `> 0`.
    pub lambda: T,
    /// Illumination weight, `>= 0`; must be 0 for Zach-pADMM.
    pub beta: T,
    /// ADMM penalty, `> 0`.
    pub c: T,
    /// Preconditioner weight for `y = (p, q)`, must satisfy `a >= 8`.
    pub a: T,
    /// Preconditioner weight for `s`; `None` uses `max Ms` of the level.
    pub a_tilde: Option<T>,
    /// rpADMMI multiplier relaxation in `(0, (sqrt(5)+1)/2)`.
    pub r: T,
    /// rpADMMII relaxation in `(0, 2)`.
    pub rho: T,
    /// pDR primal step.
    pub sigma: T,
    /// pDR dual step.
    pub tau: T,
    pub srbgs_sweeps: usize,
    /// Iteration cap per solve (one warp).
    pub max_iters: usize,
    /// Stop once the largest constraint residual drops below this.
    pub tol: T,
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            lambda: T::lit(40.0),
            beta: T::lit(0.05),
            c: T::lit(0.05),
            a: T::lit(GRAD_NORM_BOUND),
            a_tilde: None,
            r: T::lit(1.618),
            rho: T::lit(1.9),
            sigma: T::lit(2.0),
            tau: T::lit(0.4),
            srbgs_sweeps: 2,
            max_iters: 300,
            tol: T::lit(1e-4),
        }
    }
}

impl<T: Real> SolverConfig<T> {
    fn positive(name: &str, value: T) -> Result<()> {
        if value > T::zero() && value.is_finite() {
            Ok(())
        } else {
            Err(FlowError::config(format!("{name} = {value} must be finite and > 0")))
        }
    }

    fn check_common(&self) -> Result<()> {
        Self::positive("lambda", self.lambda)?;
        if !(self.beta >= T::zero() && self.beta.is_finite()) {
            return Err(FlowError::config(format!("beta = {} must be finite and >= 0", self.beta)));
        }
        if self.max_iters == 0 {
            return Err(FlowError::config("max_iters must be at least 1"));
        }
        if !(self.tol >= T::zero()) {
            return Err(FlowError::config(format!("tol = {} must be >= 0", self.tol)));
        }
        Ok(())
    }

    fn check_admm(&self) -> Result<()> {
        self.check_common()?;
        Self::positive("c", self.c)?;
        if !(self.a >= T::lit(GRAD_NORM_BOUND)) {
            return Err(FlowError::config(format!(
                "a = {} violates a >= ||grad grad^*||; convergence needs a >= 8",
                self.a
            )));
        }
        Ok(())
    }

    pub(crate) fn check_relaxation_r(&self) -> Result<()> {
        self.check_admm()?;
        let upper = golden_ratio::<T>();
        if self.r > T::zero() && self.r < upper {
            Ok(())
        } else {
            Err(FlowError::config(format!(
                "r = {} outside the admissible interval (0, (sqrt(5)+1)/2) = (0, {upper:.6})",
                self.r
            )))
        }
    }

    pub(crate) fn check_relaxation_rho(&self) -> Result<()> {
        self.check_admm()?;
        if self.rho > T::zero() && self.rho < T::lit(2.0) {
            Ok(())
        } else {
            Err(FlowError::config(format!(
                "rho = {} outside the admissible interval (0, 2)",
                self.rho
            )))
        }
    }

    pub(crate) fn check_zero_beta(&self) -> Result<()> {
        self.check_admm()?;
        if self.beta == T::zero() {
            Ok(())
        } else {
            Err(FlowError::config(format!(
                "Zach-pADMM solves the model without illumination field and needs beta = 0 (got {})",
                self.beta
            )))
        }
    }

    pub(crate) fn check_pdr(&self) -> Result<()> {
        self.check_common()?;
        Self::positive("sigma", self.sigma)?;
        Self::positive("tau", self.tau)?;
        if self.srbgs_sweeps == 0 {
            return Err(FlowError::config("srbgs_sweeps must be at least 1"));
        }
        Ok(())
    }

    /// Validates every parameter the given variant reads.
    pub fn validate_for(&self, kind: SolverKind) -> Result<()> {
        match kind {
            SolverKind::Padmm => self.check_admm(),
            SolverKind::RpadmmI => self.check_relaxation_r(),
            SolverKind::RpadmmII => self.check_relaxation_rho(),
            SolverKind::ZachPadmm => self.check_zero_beta(),
            SolverKind::Pdr => self.check_pdr(),
        }
    }
}

/// Preconditioner weights for the given data: `a = 8` and `a_tilde = max Ms`.
pub fn step_size_bounds<T: Real>(data: &ImageData<T>) -> (T, T) {
    (T::lit(GRAD_NORM_BOUND), data.ms().max_value().max(T::zero()))
}

/// Resolves `(a, a_tilde)` for a step, enforcing `a >= 8` and `a_tilde >= max Ms`.
pub(crate) fn resolve_step_sizes<T: Real>(cfg: &SolverConfig<T>, data: &ImageData<T>) -> Result<(T, T)> {
    if cfg.beta != data.beta() {
        return Err(FlowError::config(format!(
            "beta mismatch: config has {} but the image data was built with {}",
            cfg.beta,
            data.beta()
        )));
    }
    let (_, ms_norm) = step_size_bounds(data);
    let a_tilde = match cfg.a_tilde {
        Some(at) if at >= ms_norm && at > T::zero() => at,
        Some(at) => {
            return Err(FlowError::config(format!(
                "a_tilde = {at} violates a_tilde >= ||Ms|| = {ms_norm}"
            )))
        }
        // Ms vanishes only where the data term is void; any positive weight is feasible.
        None if ms_norm > T::zero() => ms_norm,
        None => T::one(),
    };
    Ok((cfg.a, a_tilde))
}

/// Over-bar iterates of pDR.
#[derive(Clone, Debug, PartialEq)]
pub struct ShadowState<T> {
    pub w: ScalarField<T>,
    pub flow: FlowField<T>,
    pub p: VectorField2<T>,
    pub q: VectorField4<T>,
}

impl<T: Real> ShadowState<T> {
    /// Starts the shadow sequence at the current primal and dual iterates.
    pub fn from_state(st: &SolverState<T>) -> Self {
        Self {
            w: st.w.clone(),
            flow: st.flow.clone(),
            p: st.dual.p.clone(),
            q: st.dual.q.clone(),
        }
    }
}

/// Primal iterates `(w, u, v)`, dual iterates `(p, q, s)` and, for pDR, the
/// over-bar shadow iterates.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverState<T> {
    pub w: ScalarField<T>,
    pub flow: FlowField<T>,
    pub dual: DualState<T>,
    pub shadow: Option<ShadowState<T>>,
}

impl<T: Real> SolverState<T> {
    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            w: ScalarField::zeros(width, height),
            flow: FlowField::zeros(width, height),
            dual: DualState::zeros(width, height),
            shadow: None,
        }
    }

    /// Primal fields from a previous estimate, duals zero.
    pub fn warm_start(w: ScalarField<T>, flow: FlowField<T>) -> Result<Self> {
        check_dims(w.dims(), flow.dims())?;
        let (width, height) = w.dims();
        Ok(Self {
            w,
            flow,
            dual: DualState::zeros(width, height),
            shadow: None,
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        self.w.dims()
    }

    pub(crate) fn check_dims(&self, data: &ImageData<T>) -> Result<()> {
        check_dims(data.dims(), self.w.dims())?;
        check_dims(data.dims(), self.flow.dims())?;
        check_dims(data.dims(), self.dual.s.dims())
    }

    pub(crate) fn check_finite(&self) -> Result<()> {
        if self.w.is_finite() && self.flow.u.is_finite() && self.flow.v.is_finite() && self.dual.s.is_finite() {
            Ok(())
        } else {
            Err(FlowError::Numerical("solver iterate became non-finite".into()))
        }
    }
}

/// `||grad w||_1 + ||(grad u, grad v)||_1 + lambda ||rho(w, d)||_1`.
pub fn primal_energy<T: Real>(w: &ScalarField<T>, d: &FlowField<T>, lambda: T, data: &ImageData<T>) -> Result<T> {
    check_dims(data.dims(), w.dims())?;
    check_dims(data.dims(), d.dims())?;
    let tv_w = gradient(w).l1_norm();
    let tv_d = VectorField4::from_parts(gradient(&d.u), gradient(&d.v))?.l1_norm();
    let data_term = data.residual(w, d).l1_norm();
    Ok(tv_w + tv_d + lambda * data_term)
}

/// Dual objective `<It, s>`.
pub fn dual_objective<T: Real>(s: &ScalarField<T>, data: &ImageData<T>) -> Result<T> {
    data.it().inner_product(s)
}

/// Sup-norms of the three dual constraints
/// `(beta s - div p, Ix s - div q1, Iy s - div q2)`.
pub fn residuals<T: Real>(st: &SolverState<T>, data: &ImageData<T>) -> Result<(T, T, T)> {
    st.check_dims(data)?;
    let beta = data.beta();
    let s = &st.dual.s;
    let rw = s.zip_map(&divergence(&st.dual.p), |s, d| beta * s - d).inf_norm();
    let ru = data
        .ix()
        .zip_map(s, |a, b| a * b)
        .zip_map(&divergence(st.dual.q.first()), |a, d| a - d)
        .inf_norm();
    let rv = data
        .iy()
        .zip_map(s, |a, b| a * b)
        .zip_map(&divergence(st.dual.q.second()), |a, d| a - d)
        .inf_norm();
    Ok((rw, ru, rv))
}

/// Largest of the three constraint residuals.
pub fn max_residual<T: Real>(st: &SolverState<T>, data: &ImageData<T>) -> Result<T> {
    let (a, b, c) = residuals(st, data)?;
    Ok(a.max(b).max(c))
}

/// Dispatches one iteration of the chosen variant.
pub fn step<T: Real>(kind: SolverKind, st: &mut SolverState<T>, cfg: &SolverConfig<T>, data: &ImageData<T>) -> Result<()> {
    match kind {
        SolverKind::Padmm => admm::rpadmm1_step_with(st, cfg, data, T::one()),
        SolverKind::RpadmmI => rpadmm1_step(st, cfg, data),
        SolverKind::RpadmmII => rpadmm2_step(st, cfg, data),
        SolverKind::ZachPadmm => zach_padmm_step(st, cfg, data),
        SolverKind::Pdr => pdr_step(st, cfg, data),
    }
}

/// Sup-norm change of the pDR over-bar primal iterate, which vanishes
/// exactly at a fixed point of the iteration.
fn shadow_change<T: Real>(st: &SolverState<T>, before: &(ScalarField<T>, FlowField<T>)) -> T {
    let Some(shadow) = &st.shadow else {
        return T::infinity();
    };
    let diff = |a: &ScalarField<T>, b: &ScalarField<T>| a.zip_map(b, |x, y| x - y).inf_norm();
    diff(&shadow.w, &before.0)
        .max(diff(&shadow.flow.u, &before.1.u))
        .max(diff(&shadow.flow.v, &before.1.v))
}

/// Outcome of [`solve`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveReport<T> {
    pub iterations: usize,
    pub residual: T,
    pub converged: bool,
}

/// Iterates until the largest constraint residual is below `cfg.tol` or
/// `cfg.max_iters` steps have run. For pDR the residual also includes the
/// change of the over-bar primal iterate, since the dual constraints settle
/// well before the primal does.
pub fn solve<T: Real>(
    kind: SolverKind,
    st: &mut SolverState<T>,
    cfg: &SolverConfig<T>,
    data: &ImageData<T>,
) -> Result<SolveReport<T>> {
    cfg.validate_for(kind)?;
    let mut residual = T::infinity();
    for k in 1..=cfg.max_iters {
        residual = if kind == SolverKind::Pdr {
            let before = match &st.shadow {
                Some(shadow) => (shadow.w.clone(), shadow.flow.clone()),
                None => (st.w.clone(), st.flow.clone()),
            };
            step(kind, st, cfg, data)?;
            max_residual(st, data)?.max(shadow_change(st, &before))
        } else {
            step(kind, st, cfg, data)?;
            max_residual(st, data)?
        };
        if residual < cfg.tol {
            return Ok(SolveReport {
                iterations: k,
                residual,
                converged: true,
            });
        }
    }
    Ok(SolveReport {
        iterations: cfg.max_iters,
        residual,
        converged: false,
    })
}
