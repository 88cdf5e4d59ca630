//! Preconditioned Douglas-Rachford splitting on the primal-dual saddle
//! point `min_X max_y F(X) + <K X, y> - G(y)` with `K = diag(grad, grad)`.
//!
//! The linear subproblem `T X = b`, `T = I + sigma*tau*K^*K`, is never solved
//! exactly: each iteration applies a fixed number of SRBGS passes, which is
//! the preconditioned update `X + M^{-1}(b - T X)` with a feasible `M >= T`.

use crate::error::{FlowError, Result};
use crate::grid::{FlowField, ScalarField, VectorField2, VectorField4};
use crate::operators::{divergence, gradient, ImageData};
use crate::prox::{project_p_in_place, project_q_in_place, resolvent_in_place};
use crate::scalar::Real;
use crate::solvers::srbgs::srbgs_in_place;
use crate::solvers::{ShadowState, SolverConfig, SolverState};

/// One pDR iteration.
///
/// After the step, `st.w` and `st.flow` hold the preconditioned linear
/// update, `st.dual.p` and `st.dual.q` the projected dual resolvents and
/// `st.dual.s` the data-term multiplier of the primal resolvent. The
/// over-bar iterates live in `st.shadow`.
pub fn pdr_step<T: Real>(st: &mut SolverState<T>, cfg: &SolverConfig<T>, data: &ImageData<T>) -> Result<()> {
    cfg.check_pdr()?;
    if cfg.beta != data.beta() {
        return Err(FlowError::config(format!(
            "beta mismatch: config has {} but the image data was built with {}",
            cfg.beta,
            data.beta()
        )));
    }
    st.check_dims(data)?;
    let (sigma, tau, lambda) = (cfg.sigma, cfg.tau, cfg.lambda);
    let sigma_tau = sigma * tau;
    let two = T::lit(2.0);

    if st.shadow.is_none() {
        st.shadow = Some(ShadowState::from_state(st));
    }
    let shadow = st.shadow.as_mut().unwrap();

    // X^{k+1} = X^k + M^{-1}(Xbar^k - sigma K^* ybar^k - T X^k)
    let rhs = |bar: &ScalarField<T>, dual: &VectorField2<T>| {
        let mut b = divergence(dual);
        for (b, &x) in b.as_mut_slice().iter_mut().zip(bar.as_slice()) {
            *b = x + sigma * *b;
        }
        b
    };
    let b_w = rhs(&shadow.w, &shadow.p);
    let b_u = rhs(&shadow.flow.u, shadow.q.first());
    let b_v = rhs(&shadow.flow.v, shadow.q.second());
    srbgs_in_place(&mut st.w, &b_w, sigma_tau, cfg.srbgs_sweeps);
    srbgs_in_place(&mut st.flow.u, &b_u, sigma_tau, cfg.srbgs_sweeps);
    srbgs_in_place(&mut st.flow.v, &b_v, sigma_tau, cfg.srbgs_sweeps);

    // Xbar^{k+1} = Xbar^k + J_F(2 X^{k+1} - Xbar^k) - X^{k+1}
    let reflect = |x: &ScalarField<T>, bar: &ScalarField<T>| x.zip_map(bar, |a, b| two * a - b);
    let mut res_w = reflect(&st.w, &shadow.w);
    let mut res_d = FlowField {
        u: reflect(&st.flow.u, &shadow.flow.u),
        v: reflect(&st.flow.v, &shadow.flow.v),
    };
    resolvent_in_place(&mut res_w, &mut res_d, &mut st.dual.s, sigma, lambda, data);
    for (bar, (res, x)) in [
        (&mut shadow.w, (&res_w, &st.w)),
        (&mut shadow.flow.u, (&res_d.u, &st.flow.u)),
        (&mut shadow.flow.v, (&res_d.v, &st.flow.v)),
    ] {
        for (b, (&r, &x)) in bar.as_mut_slice().iter_mut().zip(res.as_slice().iter().zip(x.as_slice())) {
            *b = *b + r - x;
        }
    }

    // ybar^{k+1} = P(ybar^k + 2 tau K X^{k+1}) - tau K X^{k+1}
    let grad_w = gradient(&st.w);
    let mut proj_p = shadow.p.clone();
    proj_p.add_scaled(two * tau, &grad_w);
    project_p_in_place(&mut proj_p);
    shadow.p = proj_p.clone();
    shadow.p.add_scaled(-tau, &grad_w);
    st.dual.p = proj_p;

    let grad_d = VectorField4::from_parts(gradient(&st.flow.u), gradient(&st.flow.v))?;
    let mut proj_q = shadow.q.clone();
    proj_q.add_scaled(two * tau, &grad_d);
    project_q_in_place(&mut proj_q);
    shadow.q = proj_q.clone();
    shadow.q.add_scaled(-tau, &grad_d);
    st.dual.q = proj_q;

    st.check_finite()
}
