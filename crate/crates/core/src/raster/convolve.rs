use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::raster::{BorderPolicy, GrayImage, Kernel};

/// Maps a possibly out-of-range coordinate onto `0..n` under `border`.
/// `None` means the read is zero.
#[inline]
pub(crate) fn resolve_index(i: isize, n: usize, border: BorderPolicy) -> Option<usize> {
    let n_i = n as isize;
    if (0..n_i).contains(&i) {
        return Some(i as usize);
    }
    match border {
        BorderPolicy::Zero => None,
        BorderPolicy::Replicate => Some(i.clamp(0, n_i - 1) as usize),
        BorderPolicy::Reflect => {
            if n == 1 {
                return Some(0);
            }
            let period = 2 * (n_i - 1);
            let m = i.rem_euclid(period);
            Some(if m < n_i { m } else { period - m } as usize)
        }
    }
}

/// Correlates `img` with `k` (taps applied as written, no flip).
///
/// `out[r][c] = sum_ij k[i][j] * img[r + i - anchor.row][c + j - anchor.col]`,
/// with out-of-range reads resolved by `border`. Output is not clamped.
pub fn convolve(img: &GrayImage, k: &Kernel, border: BorderPolicy) -> Result<GrayImage> {
    let (w, h) = img.dims();
    if k.width() > w || k.height() > h {
        return Err(Error::KernelLargerThanImage {
            kernel: (k.width(), k.height()),
            image: (w, h),
        });
    }
    let (ar, ac) = k.anchor();
    let (kw, kh) = (k.width(), k.height());
    let pw = w + kw - 1;
    let ph = h + kh - 1;

    // pad once so the inner loop runs over contiguous slices
    let col_map: Vec<Option<usize>> = (0..pw)
        .map(|pc| resolve_index(pc as isize - ac as isize, w, border))
        .collect();
    let mut padded = vec![0.0; pw * ph];
    for (pr, dst) in padded.chunks_exact_mut(pw).enumerate() {
        if let Some(sr) = resolve_index(pr as isize - ar as isize, h, border) {
            let src = img.row(sr);
            for (d, m) in dst.iter_mut().zip(&col_map) {
                if let Some(sc) = *m {
                    *d = src[sc];
                }
            }
        }
    }

    let taps: Vec<(usize, usize, f64)> = (0..kh)
        .flat_map(|i| (0..kw).map(move |j| (i, j)))
        .map(|(i, j)| (i, j, k.tap(i, j)))
        .filter(|&(_, _, t)| t != 0.0)
        .collect();

    let mut out = vec![0.0; w * h];
    out.par_chunks_mut(w).enumerate().for_each(|(r, acc)| {
        for &(i, j, t) in &taps {
            let start = (r + i) * pw + j;
            let src = &padded[start..start + w];
            for (a, &s) in acc.iter_mut().zip(src) {
                *a += t * s;
            }
        }
    });
    GrayImage::new(w, h, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::kernels::sobel_x;

    #[test]
    fn resolve_policies() {
        assert_eq!(resolve_index(-1, 4, BorderPolicy::Replicate), Some(0));
        assert_eq!(resolve_index(5, 4, BorderPolicy::Replicate), Some(3));
        assert_eq!(resolve_index(-1, 4, BorderPolicy::Reflect), Some(1));
        assert_eq!(resolve_index(-2, 4, BorderPolicy::Reflect), Some(2));
        assert_eq!(resolve_index(4, 4, BorderPolicy::Reflect), Some(2));
        assert_eq!(resolve_index(6, 4, BorderPolicy::Reflect), Some(0));
        assert_eq!(resolve_index(-1, 1, BorderPolicy::Reflect), Some(0));
        assert_eq!(resolve_index(-1, 4, BorderPolicy::Zero), None);
        assert_eq!(resolve_index(2, 4, BorderPolicy::Zero), Some(2));
    }

    #[test]
    fn identity_kernel() {
        let img = GrayImage::from_fn(5, 4, |r, c| (r as f64) * 0.3 - (c as f64) * 0.7);
        for border in [
            BorderPolicy::Replicate,
            BorderPolicy::Reflect,
            BorderPolicy::Zero,
        ] {
            assert_eq!(convolve(&img, &Kernel::identity(), border).unwrap(), img);
        }
    }

    #[test]
    fn constant_sobel_is_zero() {
        let img = GrayImage::filled(6, 6, 0.5);
        let out = convolve(&img, &sobel_x(), BorderPolicy::Replicate).unwrap();
        assert!(out.pixels().iter().all(|&p| p == 0.0));
    }

    #[test]
    fn step_sobel_response() {
        let img = GrayImage::from_fn(8, 8, |_, c| if c >= 4 { 1.0 } else { 0.0 });
        let out = convolve(&img, &sobel_x(), BorderPolicy::Replicate).unwrap();
        for r in 0..8 {
            for c in 0..8 {
                let expected = if c == 3 || c == 4 { 4.0 } else { 0.0 };
                assert_eq!(out.get(r, c), expected, "({r},{c})");
            }
        }
    }

    #[test]
    fn zero_border_creates_frame_response() {
        let img = GrayImage::filled(5, 5, 1.0);
        let out = convolve(&img, &sobel_x(), BorderPolicy::Zero).unwrap();
        assert!(out.get(2, 0) > 0.0);
        assert!(out.get(2, 4) < 0.0);
        assert_eq!(out.get(2, 2), 0.0);
    }

    #[test]
    fn kernel_too_large() {
        let img = GrayImage::filled(2, 5, 0.0);
        let err = convolve(&img, &sobel_x(), BorderPolicy::Replicate).unwrap_err();
        assert!(matches!(err, Error::KernelLargerThanImage { .. }));
    }
}
