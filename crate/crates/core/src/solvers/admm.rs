//! Preconditioned ADMM on the dual problem.
//!
//! The dual block `y = (p, q)` and the data dual `s` are updated by
//! linearized (preconditioned) maximization steps, each closed form: a
//! gradient-like move followed by a pointwise projection. The primal
//! variables `(w, u, v)` are the Lagrange multipliers of the constraints
//! `beta*s = div p`, `Ix*s = div q1`, `Iy*s = div q2`.

use crate::error::Result;
use crate::grid::{ScalarField, VectorField2};
use crate::operators::{divergence, gradient_into, ImageData};
use crate::prox::{project_p_in_place, project_q_in_place, project_s_in_place};
use crate::scalar::Real;
use crate::solvers::{resolve_step_sizes, SolverConfig, SolverState};

/// `field += grad(g) / a`.
fn add_scaled_gradient<T: Real>(field: &mut VectorField2<T>, g: &ScalarField<T>, inv_a: T, scratch: &mut VectorField2<T>) {
    gradient_into(g, scratch);
    field.add_scaled(inv_a, scratch);
}

/// `p <- P_p[p + (1/a) grad(div p + w/c - beta*s)]`, which is
/// `P_p[(I - grad grad^*/a) p + (grad w / c - beta grad s)/a]`.
fn update_p<T: Real>(st: &mut SolverState<T>, data: &ImageData<T>, inv_a: T, c: T, scratch: &mut VectorField2<T>) {
    let beta = data.beta();
    let inv_c = T::one() / c;
    let mut g = divergence(&st.dual.p);
    for ((g, &w), &s) in g
        .as_mut_slice()
        .iter_mut()
        .zip(st.w.as_slice())
        .zip(st.dual.s.as_slice())
    {
        *g = *g + w * inv_c - beta * s;
    }
    add_scaled_gradient(&mut st.dual.p, &g, inv_a, scratch);
    project_p_in_place(&mut st.dual.p);
}

/// Tentative `q1, q2` moves then one joint projection onto the 4-channel ball.
fn update_q<T: Real>(st: &mut SolverState<T>, data: &ImageData<T>, inv_a: T, c: T, scratch: &mut VectorField2<T>) {
    let inv_c = T::one() / c;
    let s = st.dual.s.as_slice();
    let (q1, q2) = st.dual.q.parts_mut();
    for (q, mult, deriv) in [(q1, &st.flow.u, data.ix()), (q2, &st.flow.v, data.iy())] {
        let mut g = divergence(q);
        for (k, g) in g.as_mut_slice().iter_mut().enumerate() {
            *g = *g + mult.as_slice()[k] * inv_c - s[k] * deriv.as_slice()[k];
        }
        add_scaled_gradient(q, &g, inv_a, scratch);
    }
    project_q_in_place(&mut st.dual.q);
}

struct Divergences<T> {
    p: ScalarField<T>,
    q1: ScalarField<T>,
    q2: ScalarField<T>,
}

fn divergences<T: Real>(st: &SolverState<T>) -> Divergences<T> {
    Divergences {
        p: divergence(&st.dual.p),
        q1: divergence(st.dual.q.first()),
        q2: divergence(st.dual.q.second()),
    }
}

/// One rpADMMI iteration; with `r = 1` this is plain pADMM.
///
/// The relaxation `r` only enters the multiplier updates
/// `Lambda <- Lambda - r*c*(A s + B y)`.
pub fn rpadmm1_step<T: Real>(st: &mut SolverState<T>, cfg: &SolverConfig<T>, data: &ImageData<T>) -> Result<()> {
    cfg.check_relaxation_r()?;
    rpadmm1_step_with(st, cfg, data, cfg.r)
}

pub(crate) fn rpadmm1_step_with<T: Real>(
    st: &mut SolverState<T>,
    cfg: &SolverConfig<T>,
    data: &ImageData<T>,
    r: T,
) -> Result<()> {
    let (a, a_tilde) = resolve_step_sizes(cfg, data)?;
    st.check_dims(data)?;
    let (c, lambda, beta) = (cfg.c, cfg.lambda, data.beta());
    let inv_a = T::one() / a;
    let mut scratch = VectorField2::zeros(data.dims().0, data.dims().1);

    update_p(st, data, inv_a, c, &mut scratch);
    update_q(st, data, inv_a, c, &mut scratch);
    let div = divergences(st);

    let (ix, iy, it, ms) = (data.ix().as_slice(), data.iy().as_slice(), data.it().as_slice(), data.ms().as_slice());
    let inv_atc = T::one() / (a_tilde * c);
    {
        let s = st.dual.s.as_mut_slice();
        let (w, u, v) = (st.w.as_slice(), st.flow.u.as_slice(), st.flow.v.as_slice());
        for k in 0..s.len() {
            let coupling = beta * div.p.as_slice()[k] + ix[k] * div.q1.as_slice()[k] + iy[k] * div.q2.as_slice()[k];
            s[k] = (T::one() - ms[k] / a_tilde) * s[k]
                + inv_atc * (it[k] + beta * w[k] + u[k] * ix[k] + v[k] * iy[k] + c * coupling);
        }
    }
    project_s_in_place(&mut st.dual.s, lambda);

    let rc = r * c;
    let s = st.dual.s.as_slice();
    let (w, u, v) = (st.w.as_mut_slice(), st.flow.u.as_mut_slice(), st.flow.v.as_mut_slice());
    for k in 0..s.len() {
        w[k] = w[k] - rc * (beta * s[k] - div.p.as_slice()[k]);
        u[k] = u[k] - rc * (ix[k] * s[k] - div.q1.as_slice()[k]);
        v[k] = v[k] - rc * (iy[k] * s[k] - div.q2.as_slice()[k]);
    }
    st.check_finite()
}

/// One rpADMMII iteration: the relaxation `rho` enters the `s` update and
/// the multiplier updates, which use the relaxed residual
/// `A s^{k+1} - (1 - rho) A s^k + rho B y^{k+1}`.
pub fn rpadmm2_step<T: Real>(st: &mut SolverState<T>, cfg: &SolverConfig<T>, data: &ImageData<T>) -> Result<()> {
    cfg.check_relaxation_rho()?;
    let (a, a_tilde) = resolve_step_sizes(cfg, data)?;
    st.check_dims(data)?;
    let (c, lambda, beta, rho) = (cfg.c, cfg.lambda, data.beta(), cfg.rho);
    let inv_a = T::one() / a;
    let mut scratch = VectorField2::zeros(data.dims().0, data.dims().1);

    update_p(st, data, inv_a, c, &mut scratch);
    update_q(st, data, inv_a, c, &mut scratch);
    let div = divergences(st);

    let (ix, iy, it, ms) = (data.ix().as_slice(), data.iy().as_slice(), data.it().as_slice(), data.ms().as_slice());
    let s_old = st.dual.s.clone();
    let inv_atc = T::one() / (a_tilde * c);
    {
        let s = st.dual.s.as_mut_slice();
        let (w, u, v) = (st.w.as_slice(), st.flow.u.as_slice(), st.flow.v.as_slice());
        for k in 0..s.len() {
            let coupling = beta * div.p.as_slice()[k] + ix[k] * div.q1.as_slice()[k] + iy[k] * div.q2.as_slice()[k];
            s[k] = (T::one() - rho * ms[k] / a_tilde) * s[k]
                + inv_atc * (it[k] + beta * w[k] + u[k] * ix[k] + v[k] * iy[k] + c * rho * coupling);
        }
    }
    project_s_in_place(&mut st.dual.s, lambda);

    let keep = T::one() - rho;
    let (s, s0) = (st.dual.s.as_slice(), s_old.as_slice());
    let (w, u, v) = (st.w.as_mut_slice(), st.flow.u.as_mut_slice(), st.flow.v.as_mut_slice());
    for k in 0..s.len() {
        w[k] = w[k] - c * (beta * s[k] - rho * div.p.as_slice()[k] - keep * beta * s0[k]);
        u[k] = u[k] - c * (ix[k] * s[k] - rho * div.q1.as_slice()[k] - keep * ix[k] * s0[k]);
        v[k] = v[k] - c * (iy[k] * s[k] - rho * div.q2.as_slice()[k] - keep * iy[k] * s0[k]);
    }
    st.check_finite()
}

/// One preconditioned ADMM iteration for the model without illumination
/// term (`beta = 0`). Only `q`, `s`, `u`, `v` are touched.
pub fn zach_padmm_step<T: Real>(st: &mut SolverState<T>, cfg: &SolverConfig<T>, data: &ImageData<T>) -> Result<()> {
    cfg.check_zero_beta()?;
    let (a, a_tilde) = resolve_step_sizes(cfg, data)?;
    st.check_dims(data)?;
    let (c, lambda) = (cfg.c, cfg.lambda);
    let inv_a = T::one() / a;
    let mut scratch = VectorField2::zeros(data.dims().0, data.dims().1);

    update_q(st, data, inv_a, c, &mut scratch);
    let div_q1 = divergence(st.dual.q.first());
    let div_q2 = divergence(st.dual.q.second());
    let (d1, d2) = (div_q1.as_slice(), div_q2.as_slice());

    let (ix, iy, it, ms) = (data.ix().as_slice(), data.iy().as_slice(), data.it().as_slice(), data.ms().as_slice());
    let inv_atc = T::one() / (a_tilde * c);
    {
        let s = st.dual.s.as_mut_slice();
        let (u, v) = (st.flow.u.as_slice(), st.flow.v.as_slice());
        for k in 0..s.len() {
            s[k] = (T::one() - ms[k] / a_tilde) * s[k]
                + inv_atc * (it[k] + u[k] * ix[k] + v[k] * iy[k] + c * (ix[k] * d1[k] + iy[k] * d2[k]));
        }
    }
    project_s_in_place(&mut st.dual.s, lambda);

    let s = st.dual.s.as_slice();
    let (u, v) = (st.flow.u.as_mut_slice(), st.flow.v.as_mut_slice());
    for k in 0..s.len() {
        u[k] = u[k] - c * (ix[k] * s[k] - d1[k]);
        v[k] = v[k] - c * (iy[k] * s[k] - d2[k]);
    }
    st.check_finite()
}
