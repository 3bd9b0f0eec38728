//! The six compared operators behind one configuration type.
//!
//! Sobel, Prewitt and Roberts threshold a normalized gradient magnitude.
//! Canny smooths, takes a Sobel gradient, suppresses non-maxima and applies
//! hysteresis. LoG and zero-crossing filter with a second-derivative kernel
//! and mark sign changes.

mod canny;
mod gradient;
mod log;

use std::fmt;
use std::str::FromStr;

pub(crate) use canny::hysteresis_unchecked;
pub use canny::{
    canny, hysteresis, non_max_suppression, smoothed_gradient, DEFAULT_CANNY_SIGMA, LOW_HIGH_RATIO,
};
pub(crate) use gradient::threshold_magnitude;
pub use gradient::{gradient, threshold_edges, GradientField, GradientOperator};
pub use log::{log_kernel, zero_crossings, DEFAULT_LOG_SIGMA};

use crate::error::{Error, Result};
pub use crate::raster::EdgeMap;
use crate::raster::{convolve, BorderPolicy, GrayImage, Kernel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Sobel,
    Prewitt,
    Roberts,
    Canny,
    LoG,
    ZeroCross,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Sobel,
        Method::Prewitt,
        Method::Roberts,
        Method::Canny,
        Method::LoG,
        Method::ZeroCross,
    ];

    /// Lowercase name used on the command line and in reports.
    pub fn name(self) -> &'static str {
        match self {
            Method::Sobel => "sobel",
            Method::Prewitt => "prewitt",
            Method::Roberts => "roberts",
            Method::Canny => "canny",
            Method::LoG => "log",
            Method::ZeroCross => "zerocross",
        }
    }

    /// Row position in the comparison table: sobel, canny, roberts,
    /// prewitt, log, zerocross.
    pub fn table_rank(self) -> usize {
        match self {
            Method::Sobel => 0,
            Method::Canny => 1,
            Method::Roberts => 2,
            Method::Prewitt => 3,
            Method::LoG => 4,
            Method::ZeroCross => 5,
        }
    }

    pub fn gradient_operator(self) -> Option<GradientOperator> {
        match self {
            Method::Sobel => Some(GradientOperator::Sobel),
            Method::Prewitt => Some(GradientOperator::Prewitt),
            Method::Roberts => Some(GradientOperator::Roberts),
            _ => None,
        }
    }

    /// First-derivative methods, Canny included.
    pub fn is_gradient_family(self) -> bool {
        !matches!(self, Method::LoG | Method::ZeroCross)
    }

    pub fn is_single_threshold(self) -> bool {
        self != Method::Canny
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sobel" => Ok(Method::Sobel),
            "prewitt" => Ok(Method::Prewitt),
            "roberts" | "robert" => Ok(Method::Roberts),
            "canny" => Ok(Method::Canny),
            "log" => Ok(Method::LoG),
            "zerocross" | "zero-cross" | "zero_cross" => Ok(Method::ZeroCross),
            other => Err(format!(
                "unknown method {other:?} (expected sobel|prewitt|roberts|canny|log|zerocross)"
            )),
        }
    }
}

/// Operator choice plus its thresholds.
///
/// `threshold` drives the single-threshold methods; Canny uses `low`/`high`
/// and keeps `threshold == high`. `sigma` applies to Canny, LoG, and
/// zero-crossing when no `kernel` is supplied.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorConfig {
    pub method: Method,
    pub threshold: f64,
    pub low: f64,
    pub high: f64,
    pub sigma: f64,
    /// Second-derivative kernel for [`Method::ZeroCross`]; `None` uses
    /// [`log_kernel`].
    pub kernel: Option<Kernel>,
}

impl DetectorConfig {
    fn base(method: Method, threshold: f64, sigma: f64) -> Self {
        Self {
            method,
            threshold,
            low: 0.0,
            high: 0.0,
            sigma,
            kernel: None,
        }
    }

    pub fn gradient(op: GradientOperator, threshold: f64) -> Self {
        let method = match op {
            GradientOperator::Sobel => Method::Sobel,
            GradientOperator::Prewitt => Method::Prewitt,
            GradientOperator::Roberts => Method::Roberts,
        };
        Self::base(method, threshold, 0.0)
    }

    pub fn sobel(threshold: f64) -> Self {
        Self::gradient(GradientOperator::Sobel, threshold)
    }

    pub fn prewitt(threshold: f64) -> Self {
        Self::gradient(GradientOperator::Prewitt, threshold)
    }

    pub fn roberts(threshold: f64) -> Self {
        Self::gradient(GradientOperator::Roberts, threshold)
    }

    pub fn canny(low: f64, high: f64) -> Self {
        Self {
            low,
            high,
            ..Self::base(Method::Canny, high, DEFAULT_CANNY_SIGMA)
        }
    }

    /// Canny from a single threshold: `high = t`, `low = 0.4 * t`.
    pub fn canny_single(high: f64) -> Self {
        Self::canny(LOW_HIGH_RATIO * high, high)
    }

    pub fn log(threshold: f64, sigma: f64) -> Self {
        Self::base(Method::LoG, threshold, sigma)
    }

    pub fn zero_cross(threshold: f64, kernel: Option<Kernel>) -> Self {
        Self {
            kernel,
            ..Self::base(Method::ZeroCross, threshold, DEFAULT_LOG_SIGMA)
        }
    }

    /// Default configuration for `method` at threshold `t` (Canny: single
    /// threshold rule).
    pub fn for_method(method: Method, t: f64) -> Self {
        match method {
            Method::Sobel => Self::sobel(t),
            Method::Prewitt => Self::prewitt(t),
            Method::Roberts => Self::roberts(t),
            Method::Canny => Self::canny_single(t),
            Method::LoG => Self::log(t, DEFAULT_LOG_SIGMA),
            Method::ZeroCross => Self::zero_cross(t, None),
        }
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = sigma;
        self
    }

    /// Replaces the threshold; for Canny this sets `high = t` and
    /// `low = 0.4 * t`.
    pub fn with_threshold(mut self, t: f64) -> Self {
        self.threshold = t;
        if self.method == Method::Canny {
            self.high = t;
            self.low = LOW_HIGH_RATIO * t;
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.method {
            Method::Canny => {
                if !(0.0 <= self.low && self.low < self.high && self.high <= 1.0) {
                    return Err(Error::InvalidThresholdPair {
                        low: self.low,
                        high: self.high,
                    });
                }
            }
            _ => {
                if !(0.0..=1.0).contains(&self.threshold) {
                    return Err(Error::ThresholdOutOfRange(self.threshold));
                }
            }
        }
        let needs_sigma = match self.method {
            Method::Canny | Method::LoG => true,
            Method::ZeroCross => self.kernel.is_none(),
            _ => false,
        };
        if needs_sigma && !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::NonPositiveSigma(self.sigma));
        }
        Ok(())
    }

    /// Kernel applied before zero-crossing detection.
    pub fn second_derivative_kernel(&self) -> Result<Kernel> {
        match (&self.kernel, self.method) {
            (Some(k), Method::ZeroCross) => Ok(k.clone()),
            _ => log_kernel(self.sigma),
        }
    }
}

/// Threshold-independent intermediate of a detector, so one image can be
/// thresholded at many levels without recomputing the filter stage.
#[derive(Debug, Clone)]
pub enum Response {
    /// Gradient field for Sobel, Prewitt and Roberts.
    Gradient(GradientField),
    /// Non-maximum-suppressed magnitude for Canny.
    Suppressed(GrayImage),
    /// Second-derivative filter output for LoG and zero-crossing.
    Filtered(GrayImage),
}

impl Response {
    /// Runs the threshold-independent stages of `cfg` on `img`. Thresholds
    /// in `cfg` are not checked here.
    pub fn compute(img: &GrayImage, cfg: &DetectorConfig) -> Result<Self> {
        match cfg.method {
            Method::Sobel | Method::Prewitt | Method::Roberts => {
                let op = cfg.method.gradient_operator().expect("gradient method");
                Ok(Response::Gradient(gradient(img, op)?))
            }
            Method::Canny => {
                let gf = smoothed_gradient(img, cfg.sigma)?;
                Ok(Response::Suppressed(non_max_suppression(&gf)))
            }
            Method::LoG | Method::ZeroCross => {
                let k = cfg.second_derivative_kernel()?;
                Ok(Response::Filtered(convolve(
                    img,
                    &k,
                    BorderPolicy::Replicate,
                )?))
            }
        }
    }

    /// Edge map at threshold `t`; for Canny, `high = t` and
    /// `low = 0.4 * t` (at `t = 0` every nonzero suppressed pixel is kept).
    pub fn edges_at(&self, t: f64) -> EdgeMap {
        match self {
            Response::Gradient(gf) => threshold_magnitude(gf.magnitude(), t),
            Response::Suppressed(s) => hysteresis_unchecked(s, LOW_HIGH_RATIO * t, t),
            Response::Filtered(f) => zero_crossings(f, t).expect("non-negative threshold"),
        }
    }

    /// Edge map for the thresholds in `cfg`.
    pub fn edges(&self, cfg: &DetectorConfig) -> Result<EdgeMap> {
        match self {
            Response::Gradient(gf) => threshold_edges(gf, cfg.threshold),
            Response::Suppressed(s) => hysteresis(s, cfg.low, cfg.high),
            Response::Filtered(f) => zero_crossings(f, cfg.threshold),
        }
    }
}

/// Runs the configured detector.
pub fn detect(img: &GrayImage, cfg: &DetectorConfig) -> Result<EdgeMap> {
    cfg.validate()?;
    Response::compute(img, cfg)?.edges(cfg)
}
