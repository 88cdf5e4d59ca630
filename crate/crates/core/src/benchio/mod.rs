//! Benchmark I/O: `.flo` files, error metrics, flow visualization, frames
//! and dataset layout.

pub mod color;
pub mod dataset;
pub mod flo;
pub mod image_io;
pub mod metrics;

pub use color::{flow_to_color, wheel_position};
pub use dataset::{data_root_from_env, locate_sequence, SequencePaths, DATA_ROOT_ENV};
pub use flo::{decode_flo, encode_flo, read_flo, valid_mask, write_flo};
pub use image_io::{read_gray_image, write_color_png};
pub use metrics::{aae, epe, evaluate, EvalResult};
