//! Canny pipeline: Gaussian smoothing, Sobel gradient, 4-sector
//! non-maximum suppression and 8-connected hysteresis.

use std::collections::VecDeque;

use crate::detectors::gradient::{gradient, GradientField, GradientOperator};
use crate::error::{Error, Result};
use crate::raster::{convolve, gaussian_kernel, BorderPolicy, EdgeMap, GrayImage};

/// Sigma used when a Canny configuration does not name one.
pub const DEFAULT_CANNY_SIGMA: f64 = std::f64::consts::SQRT_2;

/// `low = LOW_HIGH_RATIO * high` when only one threshold is given.
pub const LOW_HIGH_RATIO: f64 = 0.4;

/// Neighbor offsets `(dr, dc)` along the quantized gradient direction.
fn sector_offsets(direction: f64) -> [(isize, isize); 2] {
    let mut deg = direction.to_degrees();
    if deg < 0.0 {
        deg += 180.0;
    }
    if deg >= 180.0 {
        deg -= 180.0;
    }
    if !(22.5..157.5).contains(&deg) {
        [(0, -1), (0, 1)]
    } else if deg < 67.5 {
        [(1, 1), (-1, -1)]
    } else if deg < 112.5 {
        [(-1, 0), (1, 0)]
    } else {
        [(1, -1), (-1, 1)]
    }
}

/// Keeps a magnitude only if it is `>=` both in-bounds neighbors along the
/// quantized gradient direction; everything else becomes 0.
pub fn non_max_suppression(gf: &GradientField) -> GrayImage {
    let mag = gf.magnitude();
    let dir = gf.direction();
    let (w, h) = mag.dims();
    GrayImage::from_fn(w, h, |r, c| {
        let m = mag.get(r, c);
        if m == 0.0 {
            return 0.0;
        }
        let dominated = sector_offsets(dir.get(r, c)).iter().any(|&(dr, dc)| {
            let nr = r as isize + dr;
            let nc = c as isize + dc;
            if nr < 0 || nc < 0 || nr >= h as isize || nc >= w as isize {
                return false;
            }
            mag.get(nr as usize, nc as usize) > m
        });
        if dominated {
            0.0
        } else {
            m
        }
    })
}

/// Strong pixels (`> high`) plus weak pixels (`> low`) 8-connected to a
/// strong pixel through weak or strong pixels.
pub fn hysteresis(suppressed: &GrayImage, low: f64, high: f64) -> Result<EdgeMap> {
    if !(0.0 <= low && low < high && high <= 1.0) {
        return Err(Error::InvalidThresholdPair { low, high });
    }
    Ok(hysteresis_unchecked(suppressed, low, high))
}

pub(crate) fn hysteresis_unchecked(suppressed: &GrayImage, low: f64, high: f64) -> EdgeMap {
    let (w, h) = suppressed.dims();
    let mut out = EdgeMap::empty(w, h);
    let mut queue = VecDeque::new();
    for r in 0..h {
        for c in 0..w {
            if suppressed.get(r, c) > high {
                out.set(r, c, true);
                queue.push_back((r, c));
            }
        }
    }
    while let Some((r, c)) = queue.pop_front() {
        for nr in r.saturating_sub(1)..=(r + 1).min(h - 1) {
            for nc in c.saturating_sub(1)..=(c + 1).min(w - 1) {
                if !out.get(nr, nc) && suppressed.get(nr, nc) > low {
                    out.set(nr, nc, true);
                    queue.push_back((nr, nc));
                }
            }
        }
    }
    out
}

/// Smoothed Sobel gradient that Canny suppresses and thresholds.
pub fn smoothed_gradient(img: &GrayImage, sigma: f64) -> Result<GradientField> {
    let smoothed = convolve(img, &gaussian_kernel(sigma)?, BorderPolicy::Replicate)?;
    gradient(&smoothed, GradientOperator::Sobel)
}

pub fn canny(img: &GrayImage, low: f64, high: f64, sigma: f64) -> Result<EdgeMap> {
    if !(0.0 <= low && low < high && high <= 1.0) {
        return Err(Error::InvalidThresholdPair { low, high });
    }
    let gf = smoothed_gradient(img, sigma)?;
    hysteresis(&non_max_suppression(&gf), low, high)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn field(mag: &[f64], w: usize, h: usize, angle: f64) -> GradientField {
        // gx/gy chosen so the normalized magnitude reproduces `mag`
        // (mag already has max 1 and min 0)
        let gx = GrayImage::new(w, h, mag.iter().map(|m| m * angle.cos()).collect()).unwrap();
        let gy = GrayImage::new(w, h, mag.iter().map(|m| m * angle.sin()).collect()).unwrap();
        GradientField::from_components(gx, gy).unwrap()
    }

    #[test]
    fn nms_keeps_ridge() {
        #[rustfmt::skip]
        let mag = [
            0.0, 0.0, 0.0,
            0.2, 0.9, 0.2,
            0.0, 0.0, 1.0,
        ];
        let gf = field(&mag, 3, 3, 0.0);
        let out = non_max_suppression(&gf);
        let m = gf.magnitude();
        assert_eq!(out.get(1, 1), m.get(1, 1));
        assert_eq!(out.get(1, 0), 0.0);
        assert_eq!(out.get(1, 2), 0.0);
    }

    #[test]
    fn nms_plateau_kept() {
        // one zero pixel keeps the normalized plateau at exactly 1
        let mut mag = vec![1.0; 16];
        mag[15] = 0.0;
        for angle in [0.0, 0.7, FRAC_PI_2, 2.3, -2.9] {
            let gf = field(&mag, 4, 4, angle);
            let out = non_max_suppression(&gf);
            assert_eq!(out.pixels(), gf.magnitude().pixels(), "angle {angle}");
        }
    }

    #[test]
    fn nms_zero_field() {
        let gf = field(&[0.0; 9], 3, 3, 0.0);
        assert!(non_max_suppression(&gf).pixels().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn nms_vertical_direction_uses_rows() {
        // column ridge with vertical gradient: each row compared up/down
        #[rustfmt::skip]
        let mag = [
            0.3, 0.3, 0.3,
            1.0, 1.0, 1.0,
            0.3, 0.3, 0.3,
        ];
        let gf = field(&mag, 3, 3, FRAC_PI_2);
        let out = non_max_suppression(&gf);
        assert_eq!(out.row(1), &[1.0, 1.0, 1.0]);
        assert_eq!(out.row(0), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn sector_boundaries() {
        let deg = |d: f64| sector_offsets(d.to_radians());
        assert_eq!(deg(0.0), [(0, -1), (0, 1)]);
        assert_eq!(deg(180.0), [(0, -1), (0, 1)]);
        assert_eq!(deg(-170.0), [(0, -1), (0, 1)]);
        assert_eq!(deg(45.0), [(1, 1), (-1, -1)]);
        assert_eq!(deg(-135.0), [(1, 1), (-1, -1)]);
        assert_eq!(deg(90.0), [(-1, 0), (1, 0)]);
        assert_eq!(deg(-90.0), [(-1, 0), (1, 0)]);
        assert_eq!(deg(135.0), [(1, -1), (-1, 1)]);
    }

    #[test]
    fn hysteresis_chain() {
        let img = GrayImage::new(4, 1, vec![0.9, 0.5, 0.5, 0.5]).unwrap();
        let e = hysteresis(&img, 0.3, 0.7).unwrap();
        assert_eq!(e.count(), 4);
    }

    #[test]
    fn hysteresis_isolated_weak() {
        let mut img = GrayImage::filled(5, 5, 0.0);
        img.set(2, 2, 0.5);
        assert!(hysteresis(&img, 0.3, 0.7).unwrap().is_clear());
    }

    #[test]
    fn hysteresis_diagonal_link() {
        let mut img = GrayImage::filled(4, 4, 0.0);
        img.set(0, 0, 0.9);
        img.set(1, 1, 0.5);
        img.set(2, 2, 0.5);
        img.set(3, 0, 0.5);
        let e = hysteresis(&img, 0.3, 0.7).unwrap();
        assert!(e.get(2, 2));
        assert!(!e.get(3, 0));
    }

    #[test]
    fn hysteresis_bad_pair() {
        let img = GrayImage::filled(2, 2, 0.0);
        assert!(matches!(
            hysteresis(&img, 0.7, 0.3),
            Err(Error::InvalidThresholdPair { .. })
        ));
        assert!(hysteresis(&img, 0.3, 0.3).is_err());
        assert!(hysteresis(&img, -0.1, 0.3).is_err());
    }

    #[test]
    fn canny_constant_is_empty() {
        let img = GrayImage::filled(32, 32, 0.6);
        assert!(canny(&img, 0.1, 0.3, 1.4).unwrap().is_clear());
    }

    #[test]
    fn canny_paper_pair_accepted() {
        let img = crate::raster::Scene::disk(48, 48, (24.0, 24.0), 12.0, 0.2, 0.8)
            .render()
            .unwrap();
        let e = canny(&img, 0.0250, 0.0625, DEFAULT_CANNY_SIGMA).unwrap();
        assert!(e.count() > 0);
    }
}
