use crate::error::{Error, Result};

/// Single-band raster of real-valued intensities, stored row-major.
///
/// Loaded and normalized images hold values in `[0, 1]`; filter outputs may
/// hold any real value.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 || pixels.len() != width * height {
            return Err(Error::InvalidDimensions {
                width,
                height,
                len: pixels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        Self {
            width,
            height,
            pixels: vec![value; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        let mut pixels = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                pixels.push(f(r, c));
            }
        }
        Self {
            width,
            height,
            pixels,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [f64] {
        &mut self.pixels
    }

    pub fn into_pixels(self) -> Vec<f64> {
        self.pixels
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.pixels[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.pixels[row * self.width + col] = value;
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.pixels[row * self.width..(row + 1) * self.width]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            width: self.width,
            height: self.height,
            pixels: self.pixels.iter().map(|&p| f(p)).collect(),
        }
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.pixels
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &p| {
                (lo.min(p), hi.max(p))
            })
    }

    /// Rescales to `[0, 1]`; a constant image maps to all zeros.
    pub fn normalize_minmax(&self) -> Self {
        let (lo, hi) = self.min_max();
        if hi > lo {
            let span = hi - lo;
            self.map(|p| (p - lo) / span)
        } else {
            self.map(|_| 0.0)
        }
    }

    /// Rotates 90 degrees clockwise.
    pub fn rotate90(&self) -> Self {
        let (w, h) = (self.width, self.height);
        Self::from_fn(h, w, |r, c| self.get(h - 1 - c, r))
    }

    /// Rotates 90 degrees counter-clockwise.
    pub fn rotate270(&self) -> Self {
        let (w, h) = (self.width, self.height);
        Self::from_fn(h, w, |r, c| self.get(c, w - 1 - r))
    }
}

/// Correlation mask with an anchor tap.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    width: usize,
    height: usize,
    taps: Vec<f64>,
    anchor: (usize, usize),
}

impl Kernel {
    /// Builds a kernel with the default anchor: the geometric center for odd
    /// dimensions, `(0, 0)` otherwise.
    pub fn new(width: usize, height: usize, taps: Vec<f64>) -> Result<Self> {
        let anchor = if width % 2 == 1 && height % 2 == 1 {
            (height / 2, width / 2)
        } else {
            (0, 0)
        };
        Self::with_anchor(width, height, taps, anchor)
    }

    pub fn with_anchor(
        width: usize,
        height: usize,
        taps: Vec<f64>,
        anchor: (usize, usize),
    ) -> Result<Self> {
        if width == 0 || height == 0 || taps.len() != width * height {
            return Err(Error::InvalidDimensions {
                width,
                height,
                len: taps.len(),
            });
        }
        if anchor.0 >= height || anchor.1 >= width {
            return Err(Error::InvalidDimensions {
                width,
                height,
                len: taps.len(),
            });
        }
        Ok(Self {
            width,
            height,
            taps,
            anchor,
        })
    }

    /// Builds a kernel from rows of taps (all rows the same length).
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.as_ref().len());
        let mut taps = Vec::with_capacity(width * height);
        for row in rows {
            if row.as_ref().len() != width {
                return Err(Error::InvalidDimensions {
                    width,
                    height,
                    len: taps.len() + row.as_ref().len(),
                });
            }
            taps.extend_from_slice(row.as_ref());
        }
        Self::new(width, height, taps)
    }

    pub fn identity() -> Self {
        Self {
            width: 1,
            height: 1,
            taps: vec![1.0],
            anchor: (0, 0),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    /// `(row, col)` of the center tap.
    pub fn anchor(&self) -> (usize, usize) {
        self.anchor
    }

    #[inline]
    pub fn tap(&self, row: usize, col: usize) -> f64 {
        self.taps[row * self.width + col]
    }

    pub fn transpose(&self) -> Self {
        let mut taps = Vec::with_capacity(self.taps.len());
        for c in 0..self.width {
            for r in 0..self.height {
                taps.push(self.tap(r, c));
            }
        }
        Self {
            width: self.height,
            height: self.width,
            taps,
            anchor: (self.anchor.1, self.anchor.0),
        }
    }

    pub fn sum(&self) -> f64 {
        self.taps.iter().sum()
    }
}

/// How reads outside the image are resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BorderPolicy {
    /// Clamp to the nearest edge pixel.
    #[default]
    Replicate,
    /// Mirror about the edge pixel without repeating it (`dcb|abcd|cba`).
    Reflect,
    /// Out-of-range reads are zero.
    Zero,
}

/// Co-registered bands with unique labels.
#[derive(Debug, Clone)]
pub struct BandStack {
    bands: Vec<GrayImage>,
    labels: Vec<String>,
}

impl BandStack {
    pub fn new(labels: Vec<String>, bands: Vec<GrayImage>) -> Result<Self> {
        if labels.len() != bands.len() {
            return Err(Error::InvalidDimensions {
                width: labels.len(),
                height: 1,
                len: bands.len(),
            });
        }
        if let Some(first) = bands.first() {
            for band in &bands[1..] {
                if band.dims() != first.dims() {
                    return Err(Error::DimensionMismatch {
                        expected: first.dims(),
                        found: band.dims(),
                    });
                }
            }
        }
        for (i, label) in labels.iter().enumerate() {
            if labels[..i].contains(label) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        Ok(Self { bands, labels })
    }

    pub fn bands(&self) -> &[GrayImage] {
        &self.bands
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.bands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bands.is_empty()
    }

    /// `(width, height)` shared by every band, `None` for an empty stack.
    pub fn dims(&self) -> Option<(usize, usize)> {
        self.bands.first().map(GrayImage::dims)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &GrayImage)> {
        self.labels
            .iter()
            .map(String::as_str)
            .zip(self.bands.iter())
    }

    pub fn push(&mut self, label: impl Into<String>, band: GrayImage) -> Result<()> {
        let label = label.into();
        if let Some(dims) = self.dims() {
            if band.dims() != dims {
                return Err(Error::DimensionMismatch {
                    expected: dims,
                    found: band.dims(),
                });
            }
        }
        if self.labels.contains(&label) {
            return Err(Error::DuplicateLabel(label));
        }
        self.labels.push(label);
        self.bands.push(band);
        Ok(())
    }
}
