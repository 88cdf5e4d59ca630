//! Forward-difference gradient and its negative adjoint.
//!
//! The gradient is zero in the last column (x channel) and last row (y
//! channel). The divergence is built so that `<grad f, p> = -<f, div p>`
//! holds exactly for every `f` and `p`.

use crate::grid::{ScalarField, VectorField2};
use crate::scalar::Real;

pub fn gradient<T: Real>(f: &ScalarField<T>) -> VectorField2<T> {
    let (w, h) = f.dims();
    let mut out = VectorField2::zeros(w, h);
    gradient_into(f, &mut out);
    out
}

/// Writes `grad f` into `out`, which must have the same dimensions.
pub fn gradient_into<T: Real>(f: &ScalarField<T>, out: &mut VectorField2<T>) {
    let (w, h) = f.dims();
    assert_eq!(out.dims(), (w, h));
    let src = f.as_slice();
    let (gx, gy) = out.channels_mut();
    let gx = gx.as_mut_slice();
    let gy = gy.as_mut_slice();
    for i in 0..h {
        let row = i * w;
        for j in 0..w {
            let k = row + j;
            gx[k] = if j + 1 < w { src[k + 1] - src[k] } else { T::zero() };
            gy[k] = if i + 1 < h { src[k + w] - src[k] } else { T::zero() };
        }
    }
}

pub fn divergence<T: Real>(p: &VectorField2<T>) -> ScalarField<T> {
    let (w, h) = p.dims();
    let mut out = ScalarField::zeros(w, h);
    divergence_into(p, &mut out);
    out
}

/// Writes `div p` into `out`: backward differences, with the first and last
/// rows/columns taking the one-sided boundary terms.
pub fn divergence_into<T: Real>(p: &VectorField2<T>, out: &mut ScalarField<T>) {
    let (w, h) = p.dims();
    assert_eq!(out.dims(), (w, h));
    let px = p.x().as_slice();
    let py = p.y().as_slice();
    let dst = out.as_mut_slice();
    for i in 0..h {
        let row = i * w;
        for j in 0..w {
            let k = row + j;
            let mut d = T::zero();
            if j + 1 < w {
                d = d + px[k];
            }
            if j > 0 {
                d = d - px[k - 1];
            }
            if i + 1 < h {
                d = d + py[k];
            }
            if i > 0 {
                d = d - py[k - w];
            }
            dst[k] = d;
        }
    }
}

/// `T f = f - sigma_tau * div(grad f)`, the Neumann operator `I - sigma_tau * Laplacian`.
pub fn laplacian_apply<T: Real>(f: &ScalarField<T>, sigma_tau: T) -> ScalarField<T> {
    let lap = divergence(&gradient(f));
    f.zip_map(&lap, |x, l| x - sigma_tau * l)
}

/// Applies `grad grad^* = -grad div` to a vector field.
pub fn grad_div_adjoint<T: Real>(p: &VectorField2<T>) -> VectorField2<T> {
    let mut g = gradient(&divergence(p));
    let (x, y) = g.channels_mut();
    for v in x.as_mut_slice().iter_mut().chain(y.as_mut_slice()) {
        *v = -*v;
    }
    g
}
