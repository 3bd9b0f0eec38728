use crate::error::{Error, Result};
use crate::raster::GrayImage;

/// Binary raster; `true` marks an edge pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeMap {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl EdgeMap {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 || bits.len() != width * height {
            return Err(Error::InvalidDimensions {
                width,
                height,
                len: bits.len(),
            });
        }
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    pub fn empty(width: usize, height: usize) -> Self {
        assert!(width > 0 && height > 0, "mask dimensions must be positive");
        Self {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::empty(width, height);
        for r in 0..height {
            for c in 0..width {
                m.bits[r * width + c] = f(r, c);
            }
        }
        m
    }

    /// Pixels `>= 0.5` become edges.
    pub fn from_image(img: &GrayImage) -> Self {
        Self {
            width: img.width(),
            height: img.height(),
            bits: img.pixels().iter().map(|&p| p >= 0.5).collect(),
        }
    }

    /// Edge pixels map to 1.0, others to 0.0.
    pub fn to_image(&self) -> GrayImage {
        let pixels = self
            .bits
            .iter()
            .map(|&b| if b { 1.0 } else { 0.0 })
            .collect();
        GrayImage::new(self.width, self.height, pixels).expect("dimensions already validated")
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

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        self.bits[row * self.width + col] = value;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_clear(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    /// Fraction of pixels set.
    pub fn density(&self) -> f64 {
        self.count() as f64 / self.bits.len() as f64
    }

    /// Set pixels as `(row, col)` in row-major order.
    pub fn positions(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let w = self.width;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| (i / w, i % w))
    }

    /// Marks every pixel within Chebyshev distance `radius` of a set pixel.
    pub fn dilate(&self, radius: usize) -> Self {
        if radius == 0 {
            return self.clone();
        }
        let (w, h) = (self.width, self.height);
        let horiz = box_any(&self.bits, w, h, radius, 1, w);
        let bits = box_any(&horiz, h, w, radius, w, 1);
        Self {
            width: w,
            height: h,
            bits,
        }
    }
}

/// For each of `lines` lines of length `len` (element stride `step`, line
/// stride `line_stride`), sets an output bit if any input bit within
/// `radius` along the line is set.
fn box_any(
    bits: &[bool],
    len: usize,
    lines: usize,
    radius: usize,
    step: usize,
    line_stride: usize,
) -> Vec<bool> {
    let mut out = vec![false; bits.len()];
    let mut prefix = vec![0usize; len + 1];
    for line in 0..lines {
        let base = line * line_stride;
        for i in 0..len {
            prefix[i + 1] = prefix[i] + bits[base + i * step] as usize;
        }
        for i in 0..len {
            let lo = i.saturating_sub(radius);
            let hi = (i + radius + 1).min(len);
            out[base + i * step] = prefix[hi] > prefix[lo];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dilation_matches_brute_force() {
        let m = EdgeMap::from_fn(9, 7, |r, c| (r * 31 + c * 17) % 11 == 0);
        for radius in 0..4 {
            let d = m.dilate(radius);
            for r in 0..7usize {
                for c in 0..9usize {
                    let expected = m
                        .positions()
                        .any(|(pr, pc)| pr.abs_diff(r).max(pc.abs_diff(c)) <= radius);
                    assert_eq!(d.get(r, c), expected, "radius {radius} at ({r},{c})");
                }
            }
        }
    }

    #[test]
    fn image_conversion() {
        let m = EdgeMap::from_fn(3, 2, |r, c| r == c);
        let img = m.to_image();
        assert_eq!(img.pixels(), &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        assert_eq!(EdgeMap::from_image(&img), m);
        assert_eq!(m.count(), 2);
        assert!((m.density() - 2.0 / 6.0).abs() < 1e-15);
    }
}
