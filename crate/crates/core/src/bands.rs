//! Band-wise evaluation: detect on every band and score each against a
//! ground-truth boundary mask.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::detectors::{detect, DetectorConfig};
use crate::error::{Error, Result};
use crate::raster::{BandStack, EdgeMap, GrayImage};

/// Ground-truth edge pixels for one feature class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthMask {
    pub mask: EdgeMap,
    pub feature_label: String,
}

impl TruthMask {
    pub fn new(mask: EdgeMap, feature_label: impl Into<String>) -> Self {
        Self {
            mask,
            feature_label: feature_label.into(),
        }
    }

    /// Truth from an image thresholded at 0.5.
    pub fn from_image(img: &GrayImage, feature_label: impl Into<String>) -> Self {
        Self::new(EdgeMap::from_image(img), feature_label)
    }

    pub fn dims(&self) -> (usize, usize) {
        self.mask.dims()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Score {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandRow {
    pub label: String,
    pub score: Score,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandReport {
    pub rows: Vec<BandRow>,
    /// Label of the max-F1 band; ties go to the earliest band.
    pub best_band: String,
}

impl BandReport {
    /// `label,precision,recall,f1` rows followed by a `# best_band=` footer.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("label,precision,recall,f1\n");
        for row in &self.rows {
            writeln!(
                out,
                "{},{:.6},{:.6},{:.6}",
                row.label, row.score.precision, row.score.recall, row.score.f1
            )
            .unwrap();
        }
        writeln!(out, "# best_band={}", self.best_band).unwrap();
        out
    }
}

pub fn run_per_band(stack: &BandStack, cfg: &DetectorConfig) -> Result<Vec<EdgeMap>> {
    if stack.is_empty() {
        return Err(Error::EmptyStack);
    }
    cfg.validate()?;
    stack
        .bands()
        .par_iter()
        .map(|band| detect(band, cfg))
        .collect()
}

/// Precision, recall and F1 with Chebyshev-distance matching.
///
/// A detection is a true positive if a truth pixel lies within `tol`; a
/// truth pixel is recalled if a detection lies within `tol`. With no
/// detections precision is 1 only when truth is empty too; with empty truth
/// recall is 1 only when there are no detections.
pub fn score_against_truth(em: &EdgeMap, truth: &TruthMask, tol: usize) -> Result<Score> {
    if em.dims() != truth.dims() {
        return Err(Error::DimensionMismatch {
            expected: truth.dims(),
            found: em.dims(),
        });
    }
    let detected = em.count();
    let truth_count = truth.mask.count();
    let near_truth = truth.mask.dilate(tol);
    let near_detected = em.dilate(tol);

    let tp = em
        .bits()
        .iter()
        .zip(near_truth.bits())
        .filter(|(&d, &t)| d && t)
        .count();
    let matched = truth
        .mask
        .bits()
        .iter()
        .zip(near_detected.bits())
        .filter(|(&t, &d)| t && d)
        .count();

    let precision = match (detected, truth_count) {
        (0, 0) => 1.0,
        (0, _) => 0.0,
        _ => tp as f64 / detected as f64,
    };
    let recall = match (truth_count, detected) {
        (0, 0) => 1.0,
        (0, _) => 0.0,
        _ => matched as f64 / truth_count as f64,
    };
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok(Score {
        precision,
        recall,
        f1,
    })
}

pub fn band_report(
    stack: &BandStack,
    cfg: &DetectorConfig,
    truth: &TruthMask,
    tol: usize,
) -> Result<BandReport> {
    let cfgs = vec![cfg.clone(); stack.len()];
    band_report_with(stack, &cfgs, truth, tol)
}

/// [`band_report`] with one configuration per band, e.g. thresholds tuned
/// on each band separately.
pub fn band_report_with(
    stack: &BandStack,
    cfgs: &[DetectorConfig],
    truth: &TruthMask,
    tol: usize,
) -> Result<BandReport> {
    if stack.is_empty() {
        return Err(Error::EmptyStack);
    }
    if let Some(dims) = stack.dims() {
        if dims != truth.dims() {
            return Err(Error::DimensionMismatch {
                expected: dims,
                found: truth.dims(),
            });
        }
    }
    if cfgs.len() != stack.len() {
        return Err(Error::DimensionMismatch {
            expected: (stack.len(), 1),
            found: (cfgs.len(), 1),
        });
    }
    for cfg in cfgs {
        cfg.validate()?;
    }
    let maps = stack
        .bands()
        .par_iter()
        .zip(cfgs)
        .map(|(band, cfg)| detect(band, cfg))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(maps.len());
    for (label, em) in stack.labels().iter().zip(&maps) {
        rows.push(BandRow {
            label: label.clone(),
            score: score_against_truth(em, truth, tol)?,
        });
    }
    let mut best = 0;
    for (i, row) in rows.iter().enumerate().skip(1) {
        if row.score.f1 > rows[best].score.f1 {
            best = i;
        }
    }
    let best_band = rows[best].label.clone();
    Ok(BandReport { rows, best_band })
}
