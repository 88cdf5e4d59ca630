//! Closed-form proximal maps: projections onto the pointwise dual balls and
//! the resolvent of the L1 data term.

use crate::error::{FlowError, Result};
use crate::grid::{check_dims, FlowField, ScalarField, VectorField2, VectorField4};
use crate::operators::ImageData;
use crate::scalar::Real;

/// Dual variables `p` (for `w`), `q = (q1, q2)` (for `u`, `v`) and `s` (for the data term).
#[derive(Clone, Debug, PartialEq)]
pub struct DualState<T> {
    pub p: VectorField2<T>,
    pub q: VectorField4<T>,
    pub s: ScalarField<T>,
}

impl<T: Real> DualState<T> {
    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            p: VectorField2::zeros(width, height),
            q: VectorField4::zeros(width, height),
            s: ScalarField::zeros(width, height),
        }
    }

    /// Projects every component onto its ball: `|p| <= 1`, `|q| <= 1`, `|s| <= lambda`.
    pub fn project(&mut self, lambda: T) {
        project_p_in_place(&mut self.p);
        project_q_in_place(&mut self.q);
        project_s_in_place(&mut self.s, lambda);
    }

    /// Checks the ball constraints up to `eps`.
    pub fn is_feasible(&self, lambda: T, eps: T) -> bool {
        use crate::grid::Field;
        self.p.inf_norm() <= T::one() + eps
            && self.q.inf_norm() <= T::one() + eps
            && self.s.inf_norm() <= lambda + eps
    }
}

/// Pointwise clamp of `s` to `[-lambda, lambda]`.
pub fn project_s<T: Real>(s: &ScalarField<T>, lambda: T) -> ScalarField<T> {
    let mut out = s.clone();
    project_s_in_place(&mut out, lambda);
    out
}

pub fn project_s_in_place<T: Real>(s: &mut ScalarField<T>, lambda: T) {
    for x in s.as_mut_slice() {
        *x = x.max(-lambda).min(lambda);
    }
}

/// Radial projection onto the unit ball of the pointwise 2-norm.
pub fn project_p<T: Real>(p: &VectorField2<T>) -> VectorField2<T> {
    let mut out = p.clone();
    project_p_in_place(&mut out);
    out
}

pub fn project_p_in_place<T: Real>(p: &mut VectorField2<T>) {
    let (x, y) = p.channels_mut();
    for (a, b) in x.as_mut_slice().iter_mut().zip(y.as_mut_slice()) {
        if let Some([pa, pb]) = radial([*a, *b]) {
            (*a, *b) = (pa, pb);
        }
    }
}

fn euclidean<T: Real, const N: usize>(v: &[T; N]) -> T {
    v.iter().map(|&x| x * x).sum::<T>().sqrt()
}

/// Scales `v` onto the unit sphere when it lies outside the ball. The result
/// is nudged inward until its computed norm is at most 1, so projecting it
/// again is an exact no-op.
fn radial<T: Real, const N: usize>(v: [T; N]) -> Option<[T; N]> {
    let m = euclidean(&v);
    if !(m > T::one()) {
        return None;
    }
    let mut out = v.map(|x| x / m);
    while euclidean(&out) > T::one() {
        out = out.map(|x| x * (T::one() - T::epsilon()));
    }
    Some(out)
}

/// Radial projection onto the unit ball of the pointwise 4-channel norm.
pub fn project_q<T: Real>(q: &VectorField4<T>) -> VectorField4<T> {
    let mut out = q.clone();
    project_q_in_place(&mut out);
    out
}

pub fn project_q_in_place<T: Real>(q: &mut VectorField4<T>) {
    let (first, second) = q.parts_mut();
    let (a, b) = first.channels_mut();
    let (c, d) = second.channels_mut();
    let it = a
        .as_mut_slice()
        .iter_mut()
        .zip(b.as_mut_slice())
        .zip(c.as_mut_slice().iter_mut().zip(d.as_mut_slice()));
    for ((a, b), (c, d)) in it {
        if let Some([pa, pb, pc, pd]) = radial([*a, *b, *c, *d]) {
            (*a, *b, *c, *d) = (pa, pb, pc, pd);
        }
    }
}

/// Result of the data-term resolvent at one pixel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PixelResolvent<T> {
    pub w: T,
    pub u: T,
    pub v: T,
    /// Multiplier `theta` with `(w, u, v) = input - sigma * theta * e`.
    /// It lies in `[-lambda, lambda]` and plays the role of the dual `s`.
    pub theta: T,
}

/// Minimizes `lambda*|rho(w,u,v)| + ((w-w~)^2 + (u-u~)^2 + (v-v~)^2) / (2 sigma)`
/// for `rho = ix*u + iy*v + beta*w + it` at a single pixel.
///
/// The minimizer moves along `e = (beta, ix, iy)`: by `+sigma*lambda*e` or
/// `-sigma*lambda*e` when the residual is large, otherwise exactly onto
/// `rho = 0`. When `e = 0` the data term is constant and the input is returned.
#[allow(clippy::too_many_arguments)]
#[inline]
pub fn resolvent_pixel<T: Real>(
    w: T,
    u: T,
    v: T,
    beta: T,
    ix: T,
    iy: T,
    it: T,
    sigma: T,
    lambda: T,
) -> PixelResolvent<T> {
    let e2 = beta * beta + ix * ix + iy * iy;
    if e2 == T::zero() {
        let theta = if it > T::zero() {
            lambda
        } else if it < T::zero() {
            -lambda
        } else {
            T::zero()
        };
        return PixelResolvent { w, u, v, theta };
    }
    let rho = ix * u + iy * v + beta * w + it;
    let threshold = sigma * lambda * e2;
    let (step, theta) = if rho < -threshold {
        (sigma * lambda, -lambda)
    } else if rho > threshold {
        (-sigma * lambda, lambda)
    } else {
        (-rho / e2, rho / (sigma * e2))
    };
    PixelResolvent {
        w: w + step * beta,
        u: u + step * ix,
        v: v + step * iy,
        theta,
    }
}

/// Resolvent `(I + sigma dF)^{-1}` of `F(w, d) = lambda * ||rho(w, d)||_1`.
pub fn resolvent_data_term<T: Real>(
    w: &ScalarField<T>,
    d: &FlowField<T>,
    sigma: T,
    lambda: T,
    data: &ImageData<T>,
) -> Result<(ScalarField<T>, FlowField<T>)> {
    let (w, d, _) = resolvent_with_multiplier(w, d, sigma, lambda, data)?;
    Ok((w, d))
}

/// Like [`resolvent_data_term`], additionally returning the per-pixel multiplier.
pub fn resolvent_with_multiplier<T: Real>(
    w: &ScalarField<T>,
    d: &FlowField<T>,
    sigma: T,
    lambda: T,
    data: &ImageData<T>,
) -> Result<(ScalarField<T>, FlowField<T>, ScalarField<T>)> {
    if !(sigma > T::zero() && lambda > T::zero()) {
        return Err(FlowError::config(format!(
            "resolvent needs sigma > 0 and lambda > 0 (got sigma = {sigma}, lambda = {lambda})"
        )));
    }
    check_dims(data.dims(), w.dims())?;
    check_dims(data.dims(), d.dims())?;
    let mut w_out = w.clone();
    let mut d_out = d.clone();
    let mut theta = ScalarField::zeros(w.width(), w.height());
    resolvent_in_place(&mut w_out, &mut d_out, &mut theta, sigma, lambda, data);
    Ok((w_out, d_out, theta))
}

pub(crate) fn resolvent_in_place<T: Real>(
    w: &mut ScalarField<T>,
    d: &mut FlowField<T>,
    theta: &mut ScalarField<T>,
    sigma: T,
    lambda: T,
    data: &ImageData<T>,
) {
    let beta = data.beta();
    let (ix, iy, it) = (data.ix().as_slice(), data.iy().as_slice(), data.it().as_slice());
    let ws = w.as_mut_slice();
    let us = d.u.as_mut_slice();
    let vs = d.v.as_mut_slice();
    let th = theta.as_mut_slice();
    for k in 0..ws.len() {
        let r = resolvent_pixel(ws[k], us[k], vs[k], beta, ix[k], iy[k], it[k], sigma, lambda);
        ws[k] = r.w;
        us[k] = r.u;
        vs[k] = r.v;
        th[k] = r.theta;
    }
}
