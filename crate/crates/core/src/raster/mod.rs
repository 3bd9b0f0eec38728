//! Raster containers, PGM and band-manifest I/O, the correlation engine,
//! kernel constructors and synthetic scenes.

mod convolve;
mod image;
pub mod kernels;
mod manifest;
mod mask;
mod pgm;
pub mod synth;

pub use convolve::convolve;
pub use image::{BandStack, BorderPolicy, GrayImage, Kernel};
pub use kernels::gaussian_kernel;
pub use manifest::{is_valid_label, load_band_stack};
pub use mask::EdgeMap;
pub use pgm::{decode_pgm, encode_pgm, load_pgm, quantize, save_pgm};
pub use synth::{synth_scene, Scene, SceneKind};
