use crate::error::{Error, Result};
use crate::raster::{convolve, kernels, BorderPolicy, EdgeMap, GrayImage, Kernel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GradientOperator {
    Sobel,
    Prewitt,
    Roberts,
}

impl GradientOperator {
    /// The two masks `(gx, gy)` in correlation form.
    pub fn masks(self) -> (Kernel, Kernel) {
        match self {
            GradientOperator::Sobel => (kernels::sobel_x(), kernels::sobel_y()),
            GradientOperator::Prewitt => (kernels::prewitt_x(), kernels::prewitt_y()),
            GradientOperator::Roberts => (kernels::roberts_1(), kernels::roberts_2()),
        }
    }

    fn mask_size(self) -> usize {
        match self {
            GradientOperator::Roberts => 2,
            _ => 3,
        }
    }
}

/// Per-pixel gradient components, normalized magnitude and direction.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    gx: GrayImage,
    gy: GrayImage,
    magnitude: GrayImage,
    direction: GrayImage,
}

impl GradientField {
    /// Builds the field from raw components. Magnitude is min-max
    /// normalized; direction is `atan2(gy, gx)` in `(-pi, pi]`.
    pub fn from_components(gx: GrayImage, gy: GrayImage) -> Result<Self> {
        if gx.dims() != gy.dims() {
            return Err(Error::DimensionMismatch {
                expected: gx.dims(),
                found: gy.dims(),
            });
        }
        // -0.0 would put atan2 at -pi
        let gx = gx.map(|v| v + 0.0);
        let gy = gy.map(|v| v + 0.0);
        let (w, h) = gx.dims();
        let raw: Vec<f64> = gx
            .pixels()
            .iter()
            .zip(gy.pixels())
            .map(|(x, y)| x.hypot(*y))
            .collect();
        let magnitude = GrayImage::new(w, h, raw)?.normalize_minmax();
        let dir: Vec<f64> = gx
            .pixels()
            .iter()
            .zip(gy.pixels())
            .map(|(x, y)| y.atan2(*x))
            .collect();
        let direction = GrayImage::new(w, h, dir)?;
        Ok(Self {
            gx,
            gy,
            magnitude,
            direction,
        })
    }

    pub fn gx(&self) -> &GrayImage {
        &self.gx
    }

    pub fn gy(&self) -> &GrayImage {
        &self.gy
    }

    /// Magnitude in `[0, 1]`; max is exactly 1 unless the field is zero.
    pub fn magnitude(&self) -> &GrayImage {
        &self.magnitude
    }

    pub fn direction(&self) -> &GrayImage {
        &self.direction
    }

    pub fn dims(&self) -> (usize, usize) {
        self.magnitude.dims()
    }
}

pub fn gradient(img: &GrayImage, op: GradientOperator) -> Result<GradientField> {
    let n = op.mask_size();
    if img.width() < n || img.height() < n {
        return Err(Error::ImageTooSmall {
            image: img.dims(),
            mask: (n, n),
        });
    }
    let (kx, ky) = op.masks();
    let gx = convolve(img, &kx, BorderPolicy::Replicate)?;
    let gy = convolve(img, &ky, BorderPolicy::Replicate)?;
    GradientField::from_components(gx, gy)
}

/// Marks pixels whose normalized magnitude is strictly above `t`.
pub fn threshold_edges(gf: &GradientField, t: f64) -> Result<EdgeMap> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::ThresholdOutOfRange(t));
    }
    Ok(threshold_magnitude(gf.magnitude(), t))
}

pub(crate) fn threshold_magnitude(mag: &GrayImage, t: f64) -> EdgeMap {
    let bits = mag.pixels().iter().map(|&m| m > t).collect();
    EdgeMap::new(mag.width(), mag.height(), bits).expect("same dimensions as magnitude")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::Scene;

    fn step8() -> GrayImage {
        Scene::vstep(8, 8, 4, 0.0, 1.0).render().unwrap()
    }

    #[test]
    fn constant_image_has_zero_magnitude() {
        let img = GrayImage::filled(6, 5, 0.4);
        for op in [
            GradientOperator::Sobel,
            GradientOperator::Prewitt,
            GradientOperator::Roberts,
        ] {
            let gf = gradient(&img, op).unwrap();
            assert!(gf.magnitude().pixels().iter().all(|&m| m == 0.0));
        }
    }

    #[test]
    fn step_magnitude_sobel_and_prewitt() {
        for op in [GradientOperator::Sobel, GradientOperator::Prewitt] {
            let gf = gradient(&step8(), op).unwrap();
            for r in 0..8 {
                for c in 0..8 {
                    let expected = if c == 3 || c == 4 { 1.0 } else { 0.0 };
                    assert_eq!(gf.magnitude().get(r, c), expected, "{op:?} ({r},{c})");
                }
            }
        }
        let raw = gradient(&step8(), GradientOperator::Prewitt).unwrap();
        assert_eq!(raw.gx().get(4, 3), 3.0);
        assert_eq!(raw.gx().get(4, 4), 3.0);
    }

    #[test]
    fn direction_matches_atan2_and_range() {
        let img = GrayImage::from_fn(9, 9, |r, c| ((r * 7 + c * 3) % 5) as f64 / 4.0);
        let gf = gradient(&img, GradientOperator::Sobel).unwrap();
        for i in 0..img.len() {
            let d = gf.direction().pixels()[i];
            assert_eq!(d, gf.gy().pixels()[i].atan2(gf.gx().pixels()[i]));
            assert!(d > -std::f64::consts::PI && d <= std::f64::consts::PI);
        }
    }

    #[test]
    fn roberts_diagonal_response() {
        let gf = gradient(&step8(), GradientOperator::Roberts).unwrap();
        // only column 3 sees the step through the 2x2 window
        for r in 0..8 {
            for c in 0..8 {
                let expected = if c == 3 { 1.0 } else { 0.0 };
                assert_eq!(gf.magnitude().get(r, c), expected);
            }
        }
    }

    #[test]
    fn threshold_rules() {
        let gf = gradient(&step8(), GradientOperator::Sobel).unwrap();
        let all = threshold_edges(&gf, 0.0).unwrap();
        assert_eq!(all.count(), 16);
        assert!(threshold_edges(&gf, 1.0).unwrap().is_clear());
        let half = threshold_edges(&gf, 0.5).unwrap();
        assert!(half.positions().all(|(_, c)| c == 3 || c == 4));
        assert_eq!(half.count(), 16);
        assert!(matches!(
            threshold_edges(&gf, 1.5),
            Err(Error::ThresholdOutOfRange(_))
        ));
        assert!(threshold_edges(&gf, -0.1).is_err());
    }

    #[test]
    fn too_small() {
        let img = GrayImage::filled(2, 2, 0.0);
        assert!(matches!(
            gradient(&img, GradientOperator::Sobel),
            Err(Error::ImageTooSmall { .. })
        ));
        assert!(gradient(&img, GradientOperator::Roberts).is_ok());
    }
}
