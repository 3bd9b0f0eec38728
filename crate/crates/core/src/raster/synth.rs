//! Deterministic synthetic test scenes with analytic boundaries.
//!
//! Every scene is a foreground region at intensity `hi` over a background at
//! `lo`. The truth boundary of a scene is the set of background pixels that
//! have a 4-neighbor in the foreground (for a vertical step, the last
//! low-side column).

use crate::error::{Error, Result};
use crate::raster::{EdgeMap, GrayImage};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SceneKind {
    /// Columns `< split` are background, the rest foreground.
    VStep { split: usize },
    /// Straight strip through the image center, shifted by `offset` pixels
    /// along its normal. `angle_deg` is measured from the horizontal.
    Ribbon {
        width: f64,
        angle_deg: f64,
        offset: f64,
    },
    /// Filled circle; `center` is `(x, y)` = `(col, row)` in pixel units.
    Disk { center: (f64, f64), radius: f64 },
    /// Alternating square blocks; the top-left block is background.
    Checker { block: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scene {
    pub kind: SceneKind,
    pub width: usize,
    pub height: usize,
    pub lo: f64,
    pub hi: f64,
}

impl Scene {
    pub fn new(kind: SceneKind, width: usize, height: usize, lo: f64, hi: f64) -> Self {
        Self {
            kind,
            width,
            height,
            lo,
            hi,
        }
    }

    pub fn vstep(width: usize, height: usize, split: usize, lo: f64, hi: f64) -> Self {
        Self::new(SceneKind::VStep { split }, width, height, lo, hi)
    }

    pub fn ribbon(
        width: usize,
        height: usize,
        strip: f64,
        angle_deg: f64,
        lo: f64,
        hi: f64,
    ) -> Self {
        Self::new(
            SceneKind::Ribbon {
                width: strip,
                angle_deg,
                offset: 0.0,
            },
            width,
            height,
            lo,
            hi,
        )
    }

    pub fn disk(
        width: usize,
        height: usize,
        center: (f64, f64),
        radius: f64,
        lo: f64,
        hi: f64,
    ) -> Self {
        Self::new(SceneKind::Disk { center, radius }, width, height, lo, hi)
    }

    pub fn checker(width: usize, height: usize, block: usize, lo: f64, hi: f64) -> Self {
        Self::new(SceneKind::Checker { block }, width, height, lo, hi)
    }

    fn validate(&self) -> Result<()> {
        let (w, h) = (self.width, self.height);
        if w == 0 || h == 0 {
            return Err(Error::GeometryOutOfBounds(format!("image size {w}x{h}")));
        }
        match self.kind {
            SceneKind::VStep { split } => {
                if split == 0 || split >= w {
                    return Err(Error::GeometryOutOfBounds(format!(
                        "split {split} must be in 1..{w}"
                    )));
                }
            }
            SceneKind::Ribbon {
                width,
                angle_deg,
                offset,
            } => {
                if !(width > 0.0) || !angle_deg.is_finite() || !offset.is_finite() {
                    return Err(Error::GeometryOutOfBounds(format!(
                        "ribbon width {width}, angle {angle_deg}, offset {offset}"
                    )));
                }
                let (s, c) = sin_cos_deg(angle_deg);
                let extent = (s.abs() * (w - 1) as f64 + c.abs() * (h - 1) as f64) / 2.0 + 0.5;
                if offset.abs() + width / 2.0 > extent {
                    return Err(Error::GeometryOutOfBounds(format!(
                        "ribbon of width {width} at offset {offset} leaves the frame"
                    )));
                }
            }
            SceneKind::Disk { center, radius } => {
                let (cx, cy) = center;
                if !(radius > 0.0)
                    || cx - radius < 0.0
                    || cy - radius < 0.0
                    || cx + radius > (w - 1) as f64
                    || cy + radius > (h - 1) as f64
                {
                    return Err(Error::GeometryOutOfBounds(format!(
                        "disk center ({cx}, {cy}) radius {radius} exceeds {w}x{h}"
                    )));
                }
            }
            SceneKind::Checker { block } => {
                if block == 0 || block > w.min(h) {
                    return Err(Error::GeometryOutOfBounds(format!(
                        "checker block {block} must be in 1..={}",
                        w.min(h)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Foreground membership per pixel.
    pub fn foreground(&self) -> Result<EdgeMap> {
        self.validate()?;
        let (w, h) = (self.width, self.height);
        let m = match self.kind {
            SceneKind::VStep { split } => EdgeMap::from_fn(w, h, |_, c| c >= split),
            SceneKind::Ribbon {
                width,
                angle_deg,
                offset,
            } => {
                let (s, co) = sin_cos_deg(angle_deg);
                let cx = (w - 1) as f64 / 2.0;
                let cy = (h - 1) as f64 / 2.0;
                let half = width / 2.0;
                EdgeMap::from_fn(w, h, |r, c| {
                    let d = (c as f64 - cx) * -s + (r as f64 - cy) * co - offset;
                    -half <= d && d < half
                })
            }
            SceneKind::Disk { center, radius } => {
                let (cx, cy) = center;
                EdgeMap::from_fn(w, h, |r, c| {
                    let dx = c as f64 - cx;
                    let dy = r as f64 - cy;
                    dx * dx + dy * dy <= radius * radius
                })
            }
            SceneKind::Checker { block } => {
                EdgeMap::from_fn(w, h, |r, c| (r / block + c / block) % 2 == 1)
            }
        };
        Ok(m)
    }

    pub fn render(&self) -> Result<GrayImage> {
        let fg = self.foreground()?;
        let (lo, hi) = (self.lo, self.hi);
        Ok(GrayImage::from_fn(self.width, self.height, |r, c| {
            if fg.get(r, c) {
                hi
            } else {
                lo
            }
        }))
    }

    /// Background pixels 4-adjacent to the foreground.
    pub fn truth(&self) -> Result<EdgeMap> {
        let fg = self.foreground()?;
        let (w, h) = (self.width, self.height);
        Ok(EdgeMap::from_fn(w, h, |r, c| {
            if fg.get(r, c) {
                return false;
            }
            (r > 0 && fg.get(r - 1, c))
                || (r + 1 < h && fg.get(r + 1, c))
                || (c > 0 && fg.get(r, c - 1))
                || (c + 1 < w && fg.get(r, c + 1))
        }))
    }
}

pub fn synth_scene(scene: &Scene) -> Result<GrayImage> {
    scene.render()
}

/// `sin`/`cos` of an angle in degrees, exact at multiples of 90.
fn sin_cos_deg(deg: f64) -> (f64, f64) {
    let quarter = deg / 90.0;
    if quarter.fract() == 0.0 {
        match (quarter as i64).rem_euclid(4) {
            0 => (0.0, 1.0),
            1 => (1.0, 0.0),
            2 => (0.0, -1.0),
            _ => (-1.0, 0.0),
        }
    } else {
        deg.to_radians().sin_cos()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vstep_matches_step_example() {
        let img = synth_scene(&Scene::vstep(8, 8, 4, 0.0, 1.0)).unwrap();
        for r in 0..8 {
            assert_eq!(img.row(r), &[0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0]);
        }
    }

    #[test]
    fn vstep_truth_is_last_low_column() {
        let truth = Scene::vstep(64, 64, 32, 0.0, 1.0).truth().unwrap();
        assert_eq!(truth.count(), 64);
        assert!(truth.positions().all(|(_, c)| c == 31));
    }

    #[test]
    fn disk_out_of_bounds() {
        let err = Scene::disk(64, 64, (32.0, 32.0), 40.0, 0.0, 1.0)
            .render()
            .unwrap_err();
        assert!(matches!(err, Error::GeometryOutOfBounds(_)));
    }

    #[test]
    fn ribbon_pixel_count() {
        let img = synth_scene(&Scene::ribbon(64, 64, 3.0, 0.0, 0.2, 0.8)).unwrap();
        assert_eq!(img.pixels().iter().filter(|&&p| p == 0.8).count(), 3 * 64);
        let vertical = synth_scene(&Scene::ribbon(64, 64, 3.0, 90.0, 0.2, 0.8)).unwrap();
        assert_eq!(
            vertical.pixels().iter().filter(|&&p| p == 0.8).count(),
            3 * 64
        );
    }

    #[test]
    fn ribbon_truth_has_both_sides() {
        let scene = Scene::ribbon(32, 32, 4.0, 0.0, 0.2, 0.8);
        let truth = scene.truth().unwrap();
        let rows: std::collections::BTreeSet<usize> = truth.positions().map(|(r, _)| r).collect();
        assert_eq!(rows.len(), 2);
        assert_eq!(truth.count(), 64);
    }

    #[test]
    fn bad_geometry() {
        assert!(Scene::vstep(8, 8, 0, 0.0, 1.0).render().is_err());
        assert!(Scene::vstep(8, 8, 8, 0.0, 1.0).render().is_err());
        assert!(Scene::checker(8, 8, 0, 0.0, 1.0).render().is_err());
        assert!(Scene::checker(8, 8, 9, 0.0, 1.0).render().is_err());
        assert!(Scene::ribbon(16, 16, 40.0, 0.0, 0.0, 1.0).render().is_err());
    }

    #[test]
    fn checker_alternates() {
        let img = synth_scene(&Scene::checker(4, 4, 2, 0.0, 1.0)).unwrap();
        assert_eq!(img.row(0), &[0.0, 0.0, 1.0, 1.0]);
        assert_eq!(img.row(2), &[1.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn deterministic() {
        let s = Scene::ribbon(40, 30, 5.0, 33.0, 0.1, 0.9);
        let a = synth_scene(&s).unwrap();
        let b = synth_scene(&s).unwrap();
        assert!(a
            .pixels()
            .iter()
            .zip(b.pixels())
            .all(|(x, y)| x.to_bits() == y.to_bits()));
    }
}
