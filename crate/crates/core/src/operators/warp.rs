//! Bilinear warping and linearization of the brightness-constancy residual.

use crate::error::Result;
use crate::grid::{check_dims, FlowField, ScalarField};
use crate::operators::ImageData;
use crate::scalar::Real;

/// Bilinear sample at fractional `(x, y)` = (column, row). Coordinates are
/// clamped to the grid first, so samples outside replicate the border.
#[inline]
pub(crate) fn sample_bilinear<T: Real>(img: &ScalarField<T>, x: T, y: T) -> T {
    let (w, h) = img.dims();
    let max_x = T::from_usize(w - 1).unwrap();
    let max_y = T::from_usize(h - 1).unwrap();
    let x = x.max(T::zero()).min(max_x);
    let y = y.max(T::zero()).min(max_y);
    let x0f = x.floor();
    let y0f = y.floor();
    let fx = x - x0f;
    let fy = y - y0f;
    let x0 = x0f.to_usize().unwrap();
    let y0 = y0f.to_usize().unwrap();
    let x1 = (x0 + 1).min(w - 1);
    let y1 = (y0 + 1).min(h - 1);
    let one = T::one();
    let top = img.get(y0, x0) * (one - fx) + img.get(y0, x1) * fx;
    let bottom = img.get(y1, x0) * (one - fx) + img.get(y1, x1) * fx;
    top * (one - fy) + bottom * fy
}

/// Samples `img` at `(x + u, y + v)` for every pixel.
pub fn warp<T: Real>(img: &ScalarField<T>, flow: &FlowField<T>) -> Result<ScalarField<T>> {
    check_dims(img.dims(), flow.dims())?;
    let (w, h) = img.dims();
    Ok(ScalarField::from_fn(w, h, |i, j| {
        let x = T::from_usize(j).unwrap() + flow.u.get(i, j);
        let y = T::from_usize(i).unwrap() + flow.v.get(i, j);
        sample_bilinear(img, x, y)
    }))
}

/// Central differences along x and y, one-sided on the border.
pub fn central_gradient<T: Real>(f: &ScalarField<T>) -> (ScalarField<T>, ScalarField<T>) {
    let (w, h) = f.dims();
    let half = T::lit(0.5);
    let diff = |a: T, b: T, span: usize| match span {
        2 => (a - b) * half,
        1 => a - b,
        _ => T::zero(),
    };
    let dx = ScalarField::from_fn(w, h, |i, j| {
        let lo = j.saturating_sub(1);
        let hi = (j + 1).min(w - 1);
        diff(f.get(i, hi), f.get(i, lo), hi - lo)
    });
    let dy = ScalarField::from_fn(w, h, |i, j| {
        let lo = i.saturating_sub(1);
        let hi = (i + 1).min(h - 1);
        diff(f.get(hi, j), f.get(lo, j), hi - lo)
    });
    (dx, dy)
}

/// Linearizes `I1(x + d) - I0(x)` about `flow0`.
///
/// The returned `It` is the full residual at `flow0` minus its first-order
/// term, so `Ix*u + Iy*v + beta*w + It` is the linearization in the total
/// flow `(u, v)`, not in an increment.
pub fn compute_derivatives<T: Real>(
    frame0: &ScalarField<T>,
    frame1: &ScalarField<T>,
    flow0: &FlowField<T>,
    beta: T,
) -> Result<ImageData<T>> {
    frame0.check_same_shape(frame1)?;
    let warped = warp(frame1, flow0)?;
    let (ix, iy) = central_gradient(&warped);
    let mut it = warped;
    for k in 0..it.len() {
        let s = it.as_slice()[k];
        let val = s
            - frame0.as_slice()[k]
            - ix.as_slice()[k] * flow0.u.as_slice()[k]
            - iy.as_slice()[k] * flow0.v.as_slice()[k];
        it.as_mut_slice()[k] = val;
    }
    ImageData::new(ix, iy, it, beta)
}
