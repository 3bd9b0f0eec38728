use crate::error::{Error, Result};
use crate::raster::{EdgeMap, GrayImage, Kernel};

/// Sigma used for LoG and zero-crossing configurations that do not name one.
pub const DEFAULT_LOG_SIGMA: f64 = 2.0;

/// Laplacian-of-Gaussian kernel with half-width `ceil(4 * sigma)`.
///
/// Taps follow `(r^2 - 2 sigma^2) / sigma^4 * exp(-r^2 / (2 sigma^2))`, are
/// mean-subtracted so they sum to zero, then scaled so the positive taps sum
/// to 1/2. With that scale any input in `[0, 1]` filters into
/// `[-1/2, 1/2]`, so neighbor differences never exceed 1.
pub fn log_kernel(sigma: f64) -> Result<Kernel> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::NonPositiveSigma(sigma));
    }
    let half = (4.0 * sigma).ceil() as isize;
    let size = (2 * half + 1) as usize;
    let s2 = sigma * sigma;
    let mut taps = Vec::with_capacity(size * size);
    for y in -half..=half {
        for x in -half..=half {
            let r2 = (x * x + y * y) as f64;
            taps.push((r2 - 2.0 * s2) / (s2 * s2) * (-r2 / (2.0 * s2)).exp());
        }
    }
    let mean = taps.iter().sum::<f64>() / taps.len() as f64;
    taps.iter_mut().for_each(|t| *t -= mean);
    let positive: f64 = taps.iter().filter(|&&t| t > 0.0).sum();
    taps.iter_mut().for_each(|t| *t *= 0.5 / positive);
    Kernel::new(size, size, taps)
}

#[inline]
fn signum(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Marks sign changes between 4-neighbors whose jump exceeds `t`.
///
/// The crossing is attributed to the smaller-magnitude side; equal
/// magnitudes go to the pixel that comes first in row-major order. Zero is
/// its own sign, so the result is unchanged by negating the input.
pub fn zero_crossings(filtered: &GrayImage, t: f64) -> Result<EdgeMap> {
    if !(t >= 0.0) {
        return Err(Error::NegativeThreshold(t));
    }
    let (w, h) = filtered.dims();
    let mut out = EdgeMap::empty(w, h);
    // visit each horizontal and vertical pair once; `a` precedes `b`
    let mut check = |ar: usize, ac: usize, br: usize, bc: usize| {
        let a = filtered.get(ar, ac);
        let b = filtered.get(br, bc);
        if signum(a) == signum(b) || !((a - b).abs() > t) {
            return;
        }
        if a.abs() <= b.abs() {
            out.set(ar, ac, true);
        } else {
            out.set(br, bc, true);
        }
    };
    for r in 0..h {
        for c in 0..w {
            if c + 1 < w {
                check(r, c, r, c + 1);
            }
            if r + 1 < h {
                check(r, c, r + 1, c);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::{convolve, BorderPolicy, Scene};

    #[test]
    fn log_kernel_zero_sum() {
        for sigma in [0.5, 1.0, 1.5, 2.0, 3.0] {
            let k = log_kernel(sigma).unwrap();
            assert!(k.sum().abs() < 1e-12, "sigma {sigma}: {}", k.sum());
            assert_eq!(k.width(), 2 * (4.0 * sigma as f64).ceil() as usize + 1);
        }
    }

    #[test]
    fn log_kernel_center_is_min() {
        let k = log_kernel(1.2).unwrap();
        let (ar, ac) = k.anchor();
        let center = k.tap(ar, ac);
        assert!(center < 0.0);
        assert!(k.taps().iter().all(|&t| t >= center));
        let pos: f64 = k.taps().iter().filter(|&&t| t > 0.0).sum();
        assert!((pos - 0.5).abs() < 1e-12);
    }

    #[test]
    fn log_of_constant_is_zero() {
        let img = GrayImage::filled(20, 20, 0.37);
        let out = convolve(&img, &log_kernel(1.0).unwrap(), BorderPolicy::Replicate).unwrap();
        assert!(out.pixels().iter().all(|p| p.abs() < 1e-9));
    }

    #[test]
    fn tie_goes_to_first_pixel() {
        let img = GrayImage::new(2, 1, vec![-1.0, 1.0]).unwrap();
        let e = zero_crossings(&img, 0.5).unwrap();
        assert!(e.get(0, 0));
        assert!(!e.get(0, 1));
    }

    #[test]
    fn smaller_magnitude_side() {
        let img = GrayImage::new(2, 1, vec![-0.1, 2.0]).unwrap();
        let e = zero_crossings(&img, 0.5).unwrap();
        assert!(e.get(0, 0));
        assert!(!e.get(0, 1));
        let img = GrayImage::new(2, 1, vec![2.0, -0.1]).unwrap();
        let e = zero_crossings(&img, 0.5).unwrap();
        assert!(!e.get(0, 0));
        assert!(e.get(0, 1));
    }

    #[test]
    fn slope_threshold_is_strict() {
        let img = GrayImage::new(2, 1, vec![-0.25, 0.25]).unwrap();
        assert!(zero_crossings(&img, 0.5).unwrap().is_clear());
        assert_eq!(zero_crossings(&img, 0.49).unwrap().count(), 1);
    }

    #[test]
    fn negative_threshold() {
        let img = GrayImage::filled(2, 2, 0.0);
        assert!(matches!(
            zero_crossings(&img, -0.1),
            Err(Error::NegativeThreshold(_))
        ));
    }

    #[test]
    fn step_has_crossing_near_boundary() {
        let img = Scene::vstep(32, 32, 16, 0.0, 1.0).render().unwrap();
        let filtered = convolve(&img, &log_kernel(1.0).unwrap(), BorderPolicy::Replicate).unwrap();
        let e = zero_crossings(&filtered, 0.0).unwrap();
        for r in 1..31 {
            assert!((14..=16).any(|c| e.get(r, c)), "row {r}");
        }
    }
}
