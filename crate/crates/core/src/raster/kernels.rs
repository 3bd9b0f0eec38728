//! Kernel constructors. All masks are in correlation form.

use crate::error::{Error, Result};
use crate::raster::Kernel;

/// Normalized Gaussian with half-width `ceil(3 * sigma)`.
pub fn gaussian_kernel(sigma: f64) -> Result<Kernel> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::NonPositiveSigma(sigma));
    }
    let half = (3.0 * sigma).ceil() as isize;
    let size = (2 * half + 1) as usize;
    let denom = 2.0 * sigma * sigma;
    let mut taps = Vec::with_capacity(size * size);
    for y in -half..=half {
        for x in -half..=half {
            let r2 = (x * x + y * y) as f64;
            taps.push((-r2 / denom).exp());
        }
    }
    let total: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= total);
    Kernel::new(size, size, taps)
}

pub fn sobel_x() -> Kernel {
    Kernel::from_rows(&[[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]]).unwrap()
}

pub fn sobel_y() -> Kernel {
    sobel_x().transpose()
}

pub fn prewitt_x() -> Kernel {
    Kernel::from_rows(&[[-1.0, 0.0, 1.0], [-1.0, 0.0, 1.0], [-1.0, 0.0, 1.0]]).unwrap()
}

pub fn prewitt_y() -> Kernel {
    prewitt_x().transpose()
}

/// Roberts cross, first diagonal. Anchor `(0, 0)`.
pub fn roberts_1() -> Kernel {
    Kernel::from_rows(&[[1.0, 0.0], [0.0, -1.0]]).unwrap()
}

/// Roberts cross, second diagonal. Anchor `(0, 0)`.
pub fn roberts_2() -> Kernel {
    Kernel::from_rows(&[[0.0, 1.0], [-1.0, 0.0]]).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_sums_to_one() {
        for sigma in [0.3, 0.5, 1.0, 1.4, std::f64::consts::SQRT_2, 2.0, 3.7] {
            let k = gaussian_kernel(sigma).unwrap();
            assert!((k.sum() - 1.0).abs() < 1e-12, "sigma {sigma}");
        }
    }

    #[test]
    fn gaussian_size_and_ratio() {
        let k = gaussian_kernel(1.0).unwrap();
        assert_eq!((k.width(), k.height()), (7, 7));
        assert_eq!(k.anchor(), (3, 3));
        let ratio = k.tap(3, 3) / k.tap(3, 6);
        assert!((ratio - 4.5f64.exp()).abs() < 1e-9);
        assert!((ratio - 90.017).abs() < 1e-3);
    }

    #[test]
    fn gaussian_symmetry_is_exact() {
        let k = gaussian_kernel(1.3).unwrap();
        let n = k.width();
        for r in 0..n {
            for c in 0..n {
                let v = k.tap(r, c);
                assert_eq!(v, k.tap(r, n - 1 - c));
                assert_eq!(v, k.tap(n - 1 - r, c));
                assert_eq!(v, k.tap(c, r));
            }
        }
    }

    #[test]
    fn gaussian_rejects_bad_sigma() {
        assert!(matches!(
            gaussian_kernel(0.0),
            Err(Error::NonPositiveSigma(_))
        ));
        assert!(matches!(
            gaussian_kernel(-1.0),
            Err(Error::NonPositiveSigma(_))
        ));
        assert!(gaussian_kernel(f64::NAN).is_err());
    }

    #[test]
    fn gradient_masks() {
        assert_eq!(
            sobel_y().taps(),
            &[-1.0, -2.0, -1.0, 0.0, 0.0, 0.0, 1.0, 2.0, 1.0]
        );
        assert_eq!(
            prewitt_y().taps(),
            &[-1.0, -1.0, -1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0]
        );
        assert_eq!(roberts_1().anchor(), (0, 0));
        assert_eq!(roberts_2().taps(), &[0.0, 1.0, -1.0, 0.0]);
    }
}
