//! Gaussian pyramid construction and flow prolongation.

use crate::error::{FlowError, Result};
use crate::grid::{FlowField, ScalarField};
use crate::operators::warp::sample_bilinear;
use crate::scalar::Real;

/// Smallest admissible pyramid level, in pixels per side.
pub const MIN_LEVEL_SIZE: usize = 8;

/// Standard deviation of the anti-aliasing blur for a given scale factor.
pub fn antialias_sigma(factor: f64) -> f64 {
    0.8 * (1.0 / (factor * factor) - 1.0).max(0.0).sqrt()
}

/// Separable Gaussian blur with border replication.
pub fn gaussian_blur<T: Real>(img: &ScalarField<T>, sigma: f64) -> ScalarField<T> {
    if sigma <= 1e-6 {
        return img.clone();
    }
    let radius = (3.0 * sigma).ceil() as isize;
    let mut kernel: Vec<T> = (-radius..=radius)
        .map(|k| T::lit((-(k * k) as f64 / (2.0 * sigma * sigma)).exp()))
        .collect();
    let total: T = kernel.iter().copied().sum();
    for k in &mut kernel {
        *k = *k / total;
    }
    let (w, h) = img.dims();
    let clampi = |x: isize, n: usize| x.clamp(0, n as isize - 1) as usize;
    let horizontal = ScalarField::from_fn(w, h, |i, j| {
        kernel
            .iter()
            .enumerate()
            .map(|(t, &kv)| kv * img.get(i, clampi(j as isize + t as isize - radius, w)))
            .sum()
    });
    ScalarField::from_fn(w, h, |i, j| {
        kernel
            .iter()
            .enumerate()
            .map(|(t, &kv)| kv * horizontal.get(clampi(i as isize + t as isize - radius, h), j))
            .sum()
    })
}

/// Bilinear resize with pixel-center alignment.
pub fn resize_bilinear<T: Real>(img: &ScalarField<T>, new_width: usize, new_height: usize) -> ScalarField<T> {
    let (w, h) = img.dims();
    if (w, h) == (new_width, new_height) {
        return img.clone();
    }
    let sx = w as f64 / new_width as f64;
    let sy = h as f64 / new_height as f64;
    ScalarField::from_fn(new_width, new_height, |i, j| {
        let x = (j as f64 + 0.5) * sx - 0.5;
        let y = (i as f64 + 0.5) * sy - 0.5;
        sample_bilinear(img, T::lit(x), T::lit(y))
    })
}

fn scaled_size(size: usize, factor: f64, level: usize) -> usize {
    ((size as f64) * factor.powi(level as i32)).round() as usize
}

fn check_factor(factor: f64) -> Result<()> {
    if factor > 0.0 && factor < 1.0 {
        Ok(())
    } else {
        Err(FlowError::config(format!(
            "scale factor {factor} outside the open interval (0, 1)"
        )))
    }
}

/// Blurs and resamples to `round(size * factor)` per side.
pub fn downsample<T: Real>(img: &ScalarField<T>, factor: f64) -> Result<ScalarField<T>> {
    check_factor(factor)?;
    let (w, h) = img.dims();
    let nw = scaled_size(w, factor, 1);
    let nh = scaled_size(h, factor, 1);
    if nw == 0 || nh == 0 {
        return Err(FlowError::config(format!(
            "downsampling {w}x{h} by {factor} leaves an empty image"
        )));
    }
    Ok(resize_bilinear(&gaussian_blur(img, antialias_sigma(factor)), nw, nh))
}

/// Level sizes `round(size * factor^k)` for `k = 0..levels`, finest first.
pub fn pyramid_sizes(width: usize, height: usize, levels: usize, factor: f64) -> Result<Vec<(usize, usize)>> {
    check_factor(factor)?;
    if levels == 0 {
        return Err(FlowError::config("pyramid needs at least one level"));
    }
    let sizes: Vec<_> = (0..levels)
        .map(|k| (scaled_size(width, factor, k), scaled_size(height, factor, k)))
        .collect();
    let (cw, ch) = sizes[levels - 1];
    if levels > 1 && (cw < MIN_LEVEL_SIZE || ch < MIN_LEVEL_SIZE) {
        return Err(FlowError::config(format!(
            "{levels} levels at factor {factor} shrink {width}x{height} to {cw}x{ch}; \
             the coarsest level must be at least {MIN_LEVEL_SIZE}x{MIN_LEVEL_SIZE}"
        )));
    }
    Ok(sizes)
}

/// Number of levels that brings the smaller side closest to `target` pixels
/// without going below the minimum level size.
pub fn default_levels(width: usize, height: usize, factor: f64, target: usize) -> usize {
    let mut levels = 1;
    loop {
        let next = levels + 1;
        let smaller = scaled_size(width.min(height), factor, levels);
        if smaller < MIN_LEVEL_SIZE || smaller < target / 2 + target / 4 {
            return levels;
        }
        levels = next;
        if levels > 64 {
            return levels;
        }
    }
}

/// Image pyramid, finest level first. Level `k` is level `k-1` blurred and
/// resampled to `round(size * factor^k)`.
pub fn build_pyramid<T: Real>(img: &ScalarField<T>, levels: usize, factor: f64) -> Result<Vec<ScalarField<T>>> {
    let sizes = pyramid_sizes(img.width(), img.height(), levels, factor)?;
    let sigma = antialias_sigma(factor);
    let mut out = Vec::with_capacity(levels);
    out.push(img.clone());
    for &(w, h) in &sizes[1..] {
        let prev = out.last().unwrap();
        out.push(resize_bilinear(&gaussian_blur(prev, sigma), w, h));
    }
    Ok(out)
}

/// Resizes a flow field and rescales the displacements to the new pixel units.
pub fn upsample_flow<T: Real>(flow: &FlowField<T>, new_width: usize, new_height: usize) -> FlowField<T> {
    let (w, h) = flow.dims();
    let rx = T::lit(new_width as f64 / w as f64);
    let ry = T::lit(new_height as f64 / h as f64);
    FlowField {
        u: resize_bilinear(&flow.u, new_width, new_height).map(|x| x * rx),
        v: resize_bilinear(&flow.v, new_width, new_height).map(|x| x * ry),
    }
}
