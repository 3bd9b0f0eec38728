//! Edge-detection operators (Sobel, Prewitt, Roberts, Canny,
//! Laplacian-of-Gaussian, zero-crossing) over real-valued rasters, with
//! harnesses for threshold sweeps, band-wise scoring against ground truth,
//! salt-and-pepper robustness and wall-clock scaling.

pub mod bands;
pub mod bench;
pub mod detectors;
pub mod error;
pub mod raster;
pub mod sweep;

pub use bands::{
    band_report, band_report_with, run_per_band, score_against_truth, BandReport, Score, TruthMask,
};
pub use detectors::{detect, DetectorConfig, EdgeMap, GradientField, Method};
pub use error::{Error, Result};
pub use raster::{BandStack, BorderPolicy, GrayImage, Kernel};
pub use sweep::{extract_range, otsu_threshold, sweep, SweepResult};
