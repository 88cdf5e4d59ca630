//! Discrete differential operators and image-processing primitives.

mod differential;
mod resample;
mod warp;

pub use differential::{divergence, divergence_into, grad_div_adjoint, gradient, gradient_into, laplacian_apply};
pub use resample::{
    antialias_sigma, build_pyramid, default_levels, downsample, gaussian_blur, pyramid_sizes, resize_bilinear,
    upsample_flow, MIN_LEVEL_SIZE,
};
pub use warp::{central_gradient, compute_derivatives, warp};

use crate::error::{FlowError, Result};
use crate::grid::{FlowField, ScalarField};
use crate::scalar::Real;

/// Linearized data term at one pyramid level:
/// `rho(w, d) = Ix*u + Iy*v + beta*w + It`, with `Ms = beta^2 + Ix^2 + Iy^2`.
#[derive(Clone, Debug)]
pub struct ImageData<T> {
    ix: ScalarField<T>,
    iy: ScalarField<T>,
    it: ScalarField<T>,
    ms: ScalarField<T>,
    beta: T,
}

impl<T: Real> ImageData<T> {
    pub fn new(ix: ScalarField<T>, iy: ScalarField<T>, it: ScalarField<T>, beta: T) -> Result<Self> {
        ix.check_same_shape(&iy)?;
        ix.check_same_shape(&it)?;
        if !(beta >= T::zero() && beta.is_finite()) {
            return Err(FlowError::config(format!("beta = {beta} must be finite and >= 0")));
        }
        if !(ix.is_finite() && iy.is_finite() && it.is_finite()) {
            return Err(FlowError::InvalidField("non-finite image derivative".into()));
        }
        let b2 = beta * beta;
        let ms = ix.zip_map(&iy, |x, y| b2 + x * x + y * y);
        Ok(Self { ix, iy, it, ms, beta })
    }

    /// Data with all derivatives zero.
    pub fn zeros(width: usize, height: usize, beta: T) -> Self {
        let z = ScalarField::zeros(width, height);
        Self::new(z.clone(), z.clone(), z, beta).expect("valid zero data")
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        self.ix.dims()
    }

    #[inline]
    pub fn ix(&self) -> &ScalarField<T> {
        &self.ix
    }

    #[inline]
    pub fn iy(&self) -> &ScalarField<T> {
        &self.iy
    }

    #[inline]
    pub fn it(&self) -> &ScalarField<T> {
        &self.it
    }

    #[inline]
    pub fn ms(&self) -> &ScalarField<T> {
        &self.ms
    }

    #[inline]
    pub fn beta(&self) -> T {
        self.beta
    }

    /// Pointwise `rho(w, d)`.
    pub fn residual(&self, w: &ScalarField<T>, d: &FlowField<T>) -> ScalarField<T> {
        let (ix, iy, it) = (self.ix.as_slice(), self.iy.as_slice(), self.it.as_slice());
        let (ws, us, vs) = (w.as_slice(), d.u.as_slice(), d.v.as_slice());
        let (width, height) = self.dims();
        let mut k = 0;
        ScalarField::from_fn(width, height, |_, _| {
            let r = ix[k] * us[k] + iy[k] * vs[k] + self.beta * ws[k] + it[k];
            k += 1;
            r
        })
    }

    /// Recomputes `Ms` from its definition and compares.
    pub fn ms_consistent(&self) -> bool {
        let b2 = self.beta * self.beta;
        self.ms
            .as_slice()
            .iter()
            .zip(self.ix.as_slice().iter().zip(self.iy.as_slice()))
            .all(|(&m, (&x, &y))| m == b2 + x * x + y * y && m >= b2)
    }
}
