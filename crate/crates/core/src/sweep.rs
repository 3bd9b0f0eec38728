//! Threshold sweeps and extraction of the (min, ideal, max) threshold triple.
//!
//! `t_max` is where edges vanish, `t_min` is the last threshold at which the
//! density curve is still on its low-threshold plateau, and `t_ideal` comes
//! from Otsu on the gradient magnitude (gradient family) or the geometric
//! mean of the range (second-derivative family).

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::detectors::{smoothed_gradient, DetectorConfig, GradientField, Method, Response};
use crate::error::{Error, Result};
use crate::raster::GrayImage;

pub const DEFAULT_ELIMINATION_EPS: f64 = 1e-4;
pub const DEFAULT_PLATEAU_FRAC: f64 = 0.95;
pub const DEFAULT_GRID_POINTS: usize = 101;

/// How `t_ideal` was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdealSource {
    Otsu,
    GeometricMean,
    /// Otsu was requested but the magnitude was degenerate; `t_min` used.
    Fallback,
    Manual,
}

impl IdealSource {
    pub fn name(self) -> &'static str {
        match self {
            IdealSource::Otsu => "otsu",
            IdealSource::GeometricMean => "geometric-mean",
            IdealSource::Fallback => "fallback-min",
            IdealSource::Manual => "manual",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdTriple {
    pub t_min: f64,
    pub t_ideal: f64,
    pub t_max: f64,
    pub ideal_source: IdealSource,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub method: Method,
    pub thresholds: Vec<f64>,
    /// Edge-pixel fraction per threshold; empty until [`sweep`] fills it.
    pub densities: Vec<f64>,
    /// Otsu threshold of the (smoothed, for Canny) gradient magnitude;
    /// `None` for second-derivative methods or a degenerate magnitude.
    pub magnitude_otsu: Option<f64>,
    pub triple: Option<ThresholdTriple>,
}

impl SweepResult {
    /// Injects a manually chosen ideal threshold, reported verbatim.
    /// `t_min`/`t_max` keep their measured values.
    pub fn with_manual_ideal(mut self, ideal: f64) -> Self {
        let (t_min, t_max) = self
            .triple
            .map(|t| (t.t_min, t.t_max))
            .unwrap_or((ideal, ideal));
        self.triple = Some(ThresholdTriple {
            t_min,
            t_ideal: ideal,
            t_max,
            ideal_source: IdealSource::Manual,
        });
        self
    }

    /// `threshold,density` rows after a `#` comment line carrying the triple.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match &self.triple {
            Some(t) => writeln!(
                out,
                "# method={} t_min={:.6} t_ideal={:.6} t_max={:.6} ideal_source={}",
                self.method,
                t.t_min,
                t.t_ideal,
                t.t_max,
                t.ideal_source.name()
            ),
            None => writeln!(out, "# method={}", self.method),
        }
        .unwrap();
        out.push_str("threshold,density\n");
        for (t, d) in self.thresholds.iter().zip(&self.densities) {
            writeln!(out, "{t:.6},{d:.6}").unwrap();
        }
        out
    }

    /// One-row threshold table: method, min, ideal, max, features.
    pub fn to_markdown(&self, features: &str) -> String {
        let mut out = String::from(
            "| method | min | ideal | max | distinguished-features(manual) |\n\
             |---|---|---|---|---|\n",
        );
        match &self.triple {
            Some(t) => {
                writeln!(
                    out,
                    "| {} | {:.4} | {:.4} | {:.4} | {} |",
                    self.method, t.t_min, t.t_ideal, t.t_max, features
                )
                .unwrap();
                writeln!(
                    out,
                    "\nideal source: {}; min is a plateau proxy (density still saturated), not a visual judgment.",
                    t.ideal_source.name()
                )
                .unwrap();
            }
            None => {
                writeln!(out, "| {} | - | - | - | {} |", self.method, features).unwrap();
            }
        }
        out
    }
}

/// `n` evenly spaced thresholds on `[0, 1]`, both ends included.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let in_range = grid.iter().all(|t| (0.0..=1.0).contains(t));
    let ascending = grid.windows(2).all(|w| w[0] < w[1]);
    if !in_range || !ascending {
        return Err(Error::UnsortedGrid);
    }
    Ok(())
}

/// Edge density of `detect(img, cfg at t)` for every `t` in `grid`.
///
/// For Canny the grid drives `high`, with `low = 0.4 * high`.
pub fn sweep(img: &GrayImage, cfg: &DetectorConfig, grid: &[f64]) -> Result<SweepResult> {
    check_grid(grid)?;
    cfg.clone().with_threshold(1.0).validate()?;
    let response = Response::compute(img, cfg)?;
    let densities: Vec<f64> = grid
        .par_iter()
        .map(|&t| response.edges_at(t).density())
        .collect();

    let magnitude_otsu = match (&response, cfg.method) {
        (Response::Gradient(gf), _) => magnitude_otsu(gf),
        (_, Method::Canny) => magnitude_otsu(&smoothed_gradient(img, cfg.sigma)?),
        _ => None,
    };
    Ok(SweepResult {
        method: cfg.method,
        thresholds: grid.to_vec(),
        densities,
        magnitude_otsu,
        triple: None,
    })
}

fn magnitude_otsu(gf: &GradientField) -> Option<f64> {
    otsu_threshold(gf.magnitude().pixels()).ok()
}

/// Sets the (min, ideal, max) triple from a filled density curve.
pub fn extract_range(
    sr: &SweepResult,
    elimination_eps: f64,
    plateau_frac: f64,
) -> Result<SweepResult> {
    if sr.densities.is_empty() || sr.densities.len() != sr.thresholds.len() {
        return Err(Error::UnfilledDensities);
    }
    let grid = &sr.thresholds;
    let dens = &sr.densities;
    let mut out = sr.clone();

    if dens.iter().all(|&d| d == 0.0) {
        let t = grid[0];
        out.triple = Some(ThresholdTriple {
            t_min: t,
            t_ideal: t,
            t_max: t,
            ideal_source: IdealSource::Fallback,
        });
        return Ok(out);
    }

    let t_max = grid
        .iter()
        .zip(dens)
        .find(|(_, &d)| d <= elimination_eps)
        .map_or(grid[grid.len() - 1], |(&t, _)| t);
    let floor = plateau_frac * dens[0];
    let mut t_min = grid
        .iter()
        .zip(dens)
        .filter(|(_, &d)| d >= floor)
        .map(|(&t, _)| t)
        .fold(grid[0], f64::max);
    if t_min > t_max {
        t_min = t_max;
    }

    let (ideal, source) = if sr.method.is_gradient_family() {
        match sr.magnitude_otsu {
            Some(t) => (t, IdealSource::Otsu),
            None => (t_min, IdealSource::Fallback),
        }
    } else {
        ((t_min * t_max).sqrt(), IdealSource::GeometricMean)
    };
    out.triple = Some(ThresholdTriple {
        t_min,
        t_ideal: ideal.clamp(t_min, t_max),
        t_max,
        ideal_source: source,
    });
    Ok(out)
}

/// Sweep on the default grid and extract the triple with default settings.
pub fn sweep_and_extract(img: &GrayImage, cfg: &DetectorConfig) -> Result<SweepResult> {
    let sr = sweep(img, cfg, &uniform_grid(DEFAULT_GRID_POINTS))?;
    extract_range(&sr, DEFAULT_ELIMINATION_EPS, DEFAULT_PLATEAU_FRAC)
}

const OTSU_BINS: usize = 256;

/// Otsu threshold over a 256-bin histogram of samples in `[0, 1]`
/// (out-of-range samples clamp to the end bins).
///
/// Returns the midpoint of the split bin that maximizes between-class
/// variance. Ties go to the lowest split, except that a run of consecutive
/// splits with identical variance (empty bins between the classes) resolves
/// to the center of the run.
pub fn otsu_threshold(values: &[f64]) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::DegenerateInput);
    }
    let first = values[0];
    if values.iter().all(|&v| v == first) {
        return Err(Error::DegenerateInput);
    }
    let mut hist = [0u64; OTSU_BINS];
    for &v in values {
        let b = (v.clamp(0.0, 1.0) * OTSU_BINS as f64) as usize;
        hist[b.min(OTSU_BINS - 1)] += 1;
    }
    let total = values.len() as f64;
    let mid = |i: usize| (i as f64 + 0.5) / OTSU_BINS as f64;
    let mean_total: f64 = hist
        .iter()
        .enumerate()
        .map(|(i, &c)| c as f64 / total * mid(i))
        .sum();

    let n = values.len() as u64;
    let mut variances = [0.0f64; OTSU_BINS - 1];
    let (mut n0, mut sum0) = (0u64, 0.0);
    for (k, var) in variances.iter_mut().enumerate() {
        n0 += hist[k];
        sum0 += hist[k] as f64 / total * mid(k);
        if n0 > 0 && n0 < n {
            let w0 = n0 as f64 / total;
            let w1 = (n - n0) as f64 / total;
            let diff = mean_total * w0 - sum0;
            *var = diff * diff / (w0 * w1);
        }
    }

    let mut best = 0;
    for k in 1..variances.len() {
        if variances[k] > variances[best] {
            best = k;
        }
    }
    if variances[best] <= 0.0 {
        return Err(Error::DegenerateInput);
    }
    let mut end = best;
    while end + 1 < variances.len() && hist[end + 1] == 0 && variances[end + 1] == variances[best] {
        end += 1;
    }
    Ok((best + end + 1) as f64 / (2 * OTSU_BINS) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::Scene;

    fn sr(grid: &[f64], dens: &[f64], method: Method) -> SweepResult {
        SweepResult {
            method,
            thresholds: grid.to_vec(),
            densities: dens.to_vec(),
            magnitude_otsu: None,
            triple: None,
        }
    }

    #[test]
    fn grid_checks() {
        let img = GrayImage::filled(8, 8, 0.0);
        let cfg = DetectorConfig::sobel(0.1);
        assert!(matches!(sweep(&img, &cfg, &[]), Err(Error::EmptyGrid)));
        assert!(matches!(
            sweep(&img, &cfg, &[0.5, 0.2]),
            Err(Error::UnsortedGrid)
        ));
        assert!(matches!(
            sweep(&img, &cfg, &[0.5, 0.5]),
            Err(Error::UnsortedGrid)
        ));
        assert!(matches!(
            sweep(&img, &cfg, &[0.5, 1.5]),
            Err(Error::UnsortedGrid)
        ));
    }

    #[test]
    fn constant_image_all_zero() {
        let img = GrayImage::filled(24, 24, 0.3);
        for m in Method::ALL {
            let r = sweep(&img, &DetectorConfig::for_method(m, 0.1), &uniform_grid(11)).unwrap();
            assert!(r.densities.iter().all(|&d| d == 0.0), "{m}");
            let t = extract_range(&r, 1e-4, 0.95).unwrap().triple.unwrap();
            assert_eq!((t.t_min, t.t_ideal, t.t_max), (0.0, 0.0, 0.0));
        }
    }

    #[test]
    fn step_end_points() {
        let img = Scene::vstep(8, 8, 4, 0.0, 1.0).render().unwrap();
        let r = sweep(&img, &DetectorConfig::sobel(0.1), &[0.0, 1.0]).unwrap();
        assert!(r.densities[0] > 0.0);
        assert_eq!(r.densities[1], 0.0);
    }

    #[test]
    fn extract_rule_example() {
        let r = sr(&[0.0, 0.25, 0.5, 0.75], &[0.5, 0.5, 0.1, 0.0], Method::LoG);
        let t = extract_range(&r, 0.001, 0.9).unwrap().triple.unwrap();
        assert_eq!(t.t_max, 0.75);
        assert_eq!(t.t_min, 0.25);
        assert!((t.t_ideal - (0.25f64 * 0.75).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn extract_no_elimination_uses_grid_max() {
        let r = sr(&[0.0, 0.5, 0.9], &[0.5, 0.4, 0.3], Method::LoG);
        let t = extract_range(&r, 1e-4, 0.95).unwrap().triple.unwrap();
        assert_eq!(t.t_max, 0.9);
        assert_eq!(t.t_min, 0.0);
    }

    #[test]
    fn extract_clamps_ideal() {
        let mut r = sr(&[0.0, 0.1, 0.2], &[0.5, 0.2, 0.0], Method::Sobel);
        r.magnitude_otsu = Some(0.6);
        let t = extract_range(&r, 1e-4, 0.95).unwrap().triple.unwrap();
        assert_eq!(t.t_ideal, 0.2);
        assert_eq!(t.ideal_source, IdealSource::Otsu);
    }

    #[test]
    fn unfilled() {
        let r = sr(&[0.0, 0.5], &[], Method::Sobel);
        assert!(matches!(
            extract_range(&r, 1e-4, 0.95),
            Err(Error::UnfilledDensities)
        ));
    }

    #[test]
    fn otsu_two_clusters() {
        let mut v = vec![0.1; 50];
        v.extend(vec![0.9; 50]);
        let t = otsu_threshold(&v).unwrap();
        assert!((0.4..=0.6).contains(&t), "{t}");
    }

    #[test]
    fn otsu_binary_separates() {
        let v = [0.0, 1.0, 0.0, 1.0];
        let t = otsu_threshold(&v).unwrap();
        assert!(t > 0.0 && t < 1.0);
    }

    #[test]
    fn otsu_degenerate() {
        assert!(matches!(
            otsu_threshold(&[0.4; 10]),
            Err(Error::DegenerateInput)
        ));
        assert!(matches!(
            otsu_threshold(&[0.4]),
            Err(Error::DegenerateInput)
        ));
        // distinct but same bin
        assert!(matches!(
            otsu_threshold(&[0.4, 0.4001]),
            Err(Error::DegenerateInput)
        ));
    }

    #[test]
    fn manual_ideal_verbatim() {
        let r = sr(&[0.0, 0.5], &[0.2, 0.0], Method::Canny);
        let r = extract_range(&r, 1e-4, 0.95)
            .unwrap()
            .with_manual_ideal(0.35);
        let md = r.to_markdown("Roads");
        assert!(
            md.contains("| canny | 0.0000 | 0.3500 | 0.5000 | Roads |"),
            "{md}"
        );
    }

    #[test]
    fn csv_layout() {
        let r = sr(&[0.0, 0.5], &[0.25, 0.0], Method::Sobel);
        let r = extract_range(&r, 1e-4, 0.95).unwrap();
        let csv = r.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].starts_with("# method=sobel t_min="));
        assert_eq!(lines[1], "threshold,density");
        assert_eq!(lines[2], "0.000000,0.250000");
        assert_eq!(lines.len(), 4);
    }
}
