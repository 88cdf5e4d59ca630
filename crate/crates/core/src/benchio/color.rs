//! Middlebury color-wheel rendering of flow fields.

use image::{Rgb, RgbImage};

use crate::benchio::flo::is_known_flow;
use crate::grid::FlowField;
use crate::scalar::Real;

const RY: usize = 15;
const YG: usize = 6;
const GC: usize = 4;
const CB: usize = 11;
const BM: usize = 13;
const MR: usize = 6;
pub const WHEEL_SIZE: usize = RY + YG + GC + CB + BM + MR;

/// The 55 wheel colors, red through yellow, green, cyan, blue, magenta.
pub fn color_wheel() -> Vec<[f64; 3]> {
    let ramp = |i: usize, n: usize| (255 * i / n) as f64;
    let mut wheel = Vec::with_capacity(WHEEL_SIZE);
    wheel.extend((0..RY).map(|i| [255.0, ramp(i, RY), 0.0]));
    wheel.extend((0..YG).map(|i| [255.0 - ramp(i, YG), 255.0, 0.0]));
    wheel.extend((0..GC).map(|i| [0.0, 255.0, ramp(i, GC)]));
    wheel.extend((0..CB).map(|i| [0.0, 255.0 - ramp(i, CB), 255.0]));
    wheel.extend((0..BM).map(|i| [ramp(i, BM), 0.0, 255.0]));
    wheel.extend((0..MR).map(|i| [255.0, 0.0, 255.0 - ramp(i, MR)]));
    wheel
}

/// Fractional wheel index in `[0, WHEEL_SIZE - 1]` for the direction of `(u, v)`.
pub fn wheel_position(u: f64, v: f64) -> f64 {
    let angle = (-v).atan2(-u) / std::f64::consts::PI;
    (angle + 1.0) / 2.0 * (WHEEL_SIZE - 1) as f64
}

/// Color of a flow vector already divided by the normalizing magnitude.
/// Saturation grows with magnitude and is clamped at 1.
pub fn flow_color(wheel: &[[f64; 3]], u: f64, v: f64) -> [u8; 3] {
    let radius = u.hypot(v).min(1.0);
    let fk = wheel_position(u, v);
    let k0 = fk.floor() as usize;
    let k1 = (k0 + 1) % WHEEL_SIZE;
    let f = fk - k0 as f64;
    let mut out = [0u8; 3];
    for ch in 0..3 {
        let col = ((1.0 - f) * wheel[k0][ch] + f * wheel[k1][ch]) / 255.0;
        let col = 1.0 - radius * (1.0 - col);
        out[ch] = (255.0 * col).floor().clamp(0.0, 255.0) as u8;
    }
    out
}

/// Renders `flow` with the Middlebury wheel. Magnitudes are divided by
/// `max_magnitude`, or by the largest known magnitude when `None`.
/// Unknown pixels are black.
pub fn flow_to_color<T: Real>(flow: &FlowField<T>, max_magnitude: Option<f64>) -> RgbImage {
    let (w, h) = flow.dims();
    let at = |k: usize| (flow.u.as_slice()[k].as_f64(), flow.v.as_slice()[k].as_f64());
    let scale = max_magnitude.unwrap_or_else(|| {
        (0..w * h)
            .map(at)
            .filter(|&(u, v)| is_known_flow(u, v))
            .map(|(u, v)| u.hypot(v))
            .fold(0.0, f64::max)
    });
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let wheel = color_wheel();
    RgbImage::from_fn(w as u32, h as u32, |x, y| {
        let (u, v) = at(y as usize * w + x as usize);
        if is_known_flow(u, v) {
            Rgb(flow_color(&wheel, u / scale, v / scale))
        } else {
            Rgb([0, 0, 0])
        }
    })
}
