//! Grayscale frame loading and PNG output.

use std::path::Path;

use image::{DynamicImage, ImageReader, RgbImage};

use crate::error::{FlowError, Result};
use crate::grid::ScalarField;
use crate::scalar::Real;

fn ingestion(path: &Path, reason: impl Into<String>) -> FlowError {
    FlowError::Ingestion {
        path: path.display().to_string(),
        reason: reason.into(),
    }
}

/// Converts a decoded image to intensities in `[0, 1]`.
/// Color images use luma weights 0.299, 0.587, 0.114.
pub fn to_gray<T: Real>(img: &DynamicImage) -> Result<ScalarField<T>> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let data: Vec<f64> = match img {
        DynamicImage::ImageLuma8(g) => g.pixels().map(|p| p.0[0] as f64 / 255.0).collect(),
        DynamicImage::ImageLuma16(g) => g.pixels().map(|p| p.0[0] as f64 / 65535.0).collect(),
        other => {
            let rgb = other.to_rgb32f();
            rgb.pixels()
                .map(|p| {
                    let [r, g, b] = p.0.map(|c| c as f64);
                    (0.299 * r + 0.587 * g + 0.114 * b).clamp(0.0, 1.0)
                })
                .collect()
        }
    };
    ScalarField::from_vec(w, h, data.into_iter().map(T::lit).collect())
}

/// Reads a PNG or PGM/PPM frame as grayscale in `[0, 1]`.
pub fn read_gray_image<T: Real>(path: impl AsRef<Path>) -> Result<ScalarField<T>> {
    let path = path.as_ref();
    let reader = ImageReader::open(path)
        .map_err(|e| ingestion(path, e.to_string()))?
        .with_guessed_format()
        .map_err(|e| ingestion(path, e.to_string()))?;
    let Some(format) = reader.format() else {
        return Err(ingestion(path, "unrecognized image format (expected PNG, PGM or PPM)"));
    };
    let img = reader
        .decode()
        .map_err(|e| ingestion(path, format!("cannot decode {format:?}: {e}")))?;
    to_gray(&img)
}

pub fn write_color_png(img: &RgbImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    img.save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| FlowError::Io(std::io::Error::other(format!("{}: {e}", path.display()))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use image::{GrayImage, Luma, Rgb};

    #[test]
    fn gray_png_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.png");
        GrayImage::from_fn(3, 2, |x, y| Luma([(x * 100 + y * 50) as u8])).save(&path).unwrap();
        let f: ScalarField<f64> = read_gray_image(&path).unwrap();
        assert_eq!(f.dims(), (3, 2));
        assert!((f.get(1, 2) - 250.0 / 255.0).abs() < 1e-12);
        assert_eq!(f.get(0, 0), 0.0);
    }

    #[test]
    fn color_uses_luma_weights() {
        let img = DynamicImage::ImageRgb8(RgbImage::from_pixel(1, 1, Rgb([255, 0, 0])));
        let f: ScalarField<f64> = to_gray(&img).unwrap();
        assert!((f.get(0, 0) - 0.299).abs() < 1e-6);
    }

    #[test]
    fn missing_and_garbage_files_are_ingestion_errors() {
        let dir = tempfile::tempdir().unwrap();
        let missing = read_gray_image::<f64>(dir.path().join("nope.png"));
        assert!(matches!(missing, Err(FlowError::Ingestion { .. })));
        let junk = dir.path().join("junk.png");
        std::fs::write(&junk, b"not an image at all").unwrap();
        assert!(matches!(read_gray_image::<f64>(&junk), Err(FlowError::Ingestion { .. })));
    }
}
