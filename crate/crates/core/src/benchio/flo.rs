//! Middlebury `.flo` files: the float 202021.25 ("PIEH" in little-endian
//! bytes), `i32` width, `i32` height, then row-major interleaved `(u, v)`
//! `f32` pairs.

use std::fs;
use std::path::Path;

use crate::error::{FlowError, Result};
use crate::grid::{FlowField, ScalarField};
use crate::scalar::Real;

pub const FLO_MAGIC: f32 = 202021.25;
pub const FLO_HEADER_LEN: usize = 12;

/// Components at or above this magnitude mark a pixel without ground truth.
pub const UNKNOWN_FLOW_THRESHOLD: f64 = 1e9;
/// Value stored in both components of an unknown pixel after reading.
pub const UNKNOWN_FLOW: f64 = 1e10;

// Guards against absurd headers before allocating.
const MAX_PIXELS: u64 = 1 << 28;

pub fn is_known_flow(u: f64, v: f64) -> bool {
    u.is_finite() && v.is_finite() && u.abs() < UNKNOWN_FLOW_THRESHOLD && v.abs() < UNKNOWN_FLOW_THRESHOLD
}

/// Per-pixel validity of a (ground-truth) flow field.
pub fn valid_mask<T: Real>(flow: &FlowField<T>) -> Vec<bool> {
    flow.u
        .as_slice()
        .iter()
        .zip(flow.v.as_slice())
        .map(|(&u, &v)| is_known_flow(u.as_f64(), v.as_f64()))
        .collect()
}

pub fn encode_flo<T: Real>(flow: &FlowField<T>) -> Vec<u8> {
    let (w, h) = flow.dims();
    let mut out = Vec::with_capacity(FLO_HEADER_LEN + 8 * w * h);
    out.extend_from_slice(&FLO_MAGIC.to_le_bytes());
    out.extend_from_slice(&(w as i32).to_le_bytes());
    out.extend_from_slice(&(h as i32).to_le_bytes());
    for (&u, &v) in flow.u.as_slice().iter().zip(flow.v.as_slice()) {
        out.extend_from_slice(&(u.as_f64() as f32).to_le_bytes());
        out.extend_from_slice(&(v.as_f64() as f32).to_le_bytes());
    }
    out
}

fn le_f32(bytes: &[u8], at: usize) -> f32 {
    f32::from_le_bytes(bytes[at..at + 4].try_into().unwrap())
}

fn le_i32(bytes: &[u8], at: usize) -> i32 {
    i32::from_le_bytes(bytes[at..at + 4].try_into().unwrap())
}

/// Parses a `.flo` byte stream. Unknown pixels come back as [`UNKNOWN_FLOW`].
pub fn decode_flo<T: Real>(bytes: &[u8]) -> Result<FlowField<T>> {
    let fail = |offset: usize, reason: String| FlowError::Format {
        offset: offset as u64,
        reason,
    };
    if bytes.len() < FLO_HEADER_LEN {
        return Err(fail(bytes.len(), format!("header needs {FLO_HEADER_LEN} bytes, file has {}", bytes.len())));
    }
    let magic = le_f32(bytes, 0);
    if magic != FLO_MAGIC {
        return Err(fail(0, format!("magic {magic} is not {FLO_MAGIC}")));
    }
    let (w, h) = (le_i32(bytes, 4), le_i32(bytes, 8));
    if w <= 0 {
        return Err(fail(4, format!("width {w} must be positive")));
    }
    if h <= 0 {
        return Err(fail(8, format!("height {h} must be positive")));
    }
    let pixels = w as u64 * h as u64;
    if pixels > MAX_PIXELS {
        return Err(fail(4, format!("{w}x{h} exceeds the supported size")));
    }
    let (w, h) = (w as usize, h as usize);
    let expected = FLO_HEADER_LEN + 8 * w * h;
    if bytes.len() < expected {
        return Err(fail(bytes.len(), format!("truncated payload: expected {expected} bytes for {w}x{h}")));
    }
    if bytes.len() > expected {
        return Err(fail(expected, format!("{} trailing bytes after the payload", bytes.len() - expected)));
    }
    let mut u = Vec::with_capacity(w * h);
    let mut v = Vec::with_capacity(w * h);
    for k in 0..w * h {
        let at = FLO_HEADER_LEN + 8 * k;
        let (a, b) = (le_f32(bytes, at) as f64, le_f32(bytes, at + 4) as f64);
        if is_known_flow(a, b) {
            u.push(T::lit(a));
            v.push(T::lit(b));
        } else {
            u.push(T::lit(UNKNOWN_FLOW));
            v.push(T::lit(UNKNOWN_FLOW));
        }
    }
    FlowField::new(ScalarField::from_vec(w, h, u)?, ScalarField::from_vec(w, h, v)?)
}

pub fn read_flo<T: Real>(path: impl AsRef<Path>) -> Result<FlowField<T>> {
    let bytes = fs::read(path)?;
    decode_flo(&bytes)
}

pub fn write_flo<T: Real>(path: impl AsRef<Path>, flow: &FlowField<T>) -> Result<()> {
    fs::write(path, encode_flo(flow))?;
    Ok(())
}
