//! Average angular error and average end-point error, Middlebury conventions.

use crate::benchio::flo::is_known_flow;
use crate::error::{FlowError, Result};
use crate::grid::{check_dims, FlowField};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalResult {
    /// Average angular error in degrees, in `[0, 180]`.
    pub aae_deg: f64,
    /// Average end-point error in pixels.
    pub epe_px: f64,
    pub valid_pixel_count: usize,
}

/// Angle in degrees between `(u1, v1, 1)` and `(u2, v2, 1)`, computed as
/// `atan2(|a x b|, a . b)` to stay accurate near zero.
pub fn angular_error(u1: f64, v1: f64, u2: f64, v2: f64) -> f64 {
    let dot = u1 * u2 + v1 * v2 + 1.0;
    let cross = [v1 - v2, u2 - u1, u1 * v2 - v1 * u2];
    let cross_norm = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
    cross_norm.atan2(dot).to_degrees()
}

pub fn endpoint_error(u1: f64, v1: f64, u2: f64, v2: f64) -> f64 {
    (u1 - u2).hypot(v1 - v2)
}

fn mean_over_valid<T: Real>(
    est: &FlowField<T>,
    gt: &FlowField<T>,
    err: impl Fn(f64, f64, f64, f64) -> f64,
) -> Result<(f64, usize)> {
    check_dims(gt.dims(), est.dims())?;
    let mut total = 0.0;
    let mut count = 0usize;
    for k in 0..gt.u.len() {
        let (gu, gv) = (gt.u.as_slice()[k].as_f64(), gt.v.as_slice()[k].as_f64());
        if !is_known_flow(gu, gv) {
            continue;
        }
        let (eu, ev) = (est.u.as_slice()[k].as_f64(), est.v.as_slice()[k].as_f64());
        total += err(eu, ev, gu, gv);
        count += 1;
    }
    if count == 0 {
        return Err(FlowError::Evaluation("ground truth has no valid pixels".into()));
    }
    Ok((total / count as f64, count))
}

/// Mean angular error over pixels with known ground truth, in degrees.
pub fn aae<T: Real>(est: &FlowField<T>, gt: &FlowField<T>) -> Result<f64> {
    mean_over_valid(est, gt, angular_error).map(|(m, _)| m)
}

/// Mean end-point error over pixels with known ground truth, in pixels.
pub fn epe<T: Real>(est: &FlowField<T>, gt: &FlowField<T>) -> Result<f64> {
    mean_over_valid(est, gt, endpoint_error).map(|(m, _)| m)
}

pub fn evaluate<T: Real>(est: &FlowField<T>, gt: &FlowField<T>) -> Result<EvalResult> {
    let (aae_deg, valid_pixel_count) = mean_over_valid(est, gt, angular_error)?;
    let (epe_px, _) = mean_over_valid(est, gt, endpoint_error)?;
    Ok(EvalResult {
        aae_deg,
        epe_px,
        valid_pixel_count,
    })
}
