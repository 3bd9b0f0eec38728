use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::bands::{score_against_truth, TruthMask};
use crate::bench::{median, SplitMix64};
use crate::detectors::{detect, DetectorConfig, Method};
use crate::error::{Error, Result};
use crate::raster::{EdgeMap, GrayImage};
use crate::sweep::sweep_and_extract;

/// Replaces each pixel, with probability `density`, by 0 or 1 (equally
/// likely).
///
/// Pixels are visited in row-major order with one [`SplitMix64`] stream
/// seeded by `seed`: a uniform draw `u` corrupts the pixel iff
/// `u < density`, and only then a second draw picks the value from its top
/// bit (1 = salt, 0 = pepper).
pub fn salt_pepper(img: &GrayImage, density: f64, seed: u64) -> Result<GrayImage> {
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::DensityOutOfRange(density));
    }
    let mut rng = SplitMix64::new(seed);
    let mut out = img.clone();
    for p in out.pixels_mut() {
        if rng.next_f64() < density {
            *p = (rng.next_u64() >> 63) as f64;
        }
    }
    Ok(out)
}

/// Adds zero-mean Gaussian noise (ChaCha8 stream, unclamped).
pub fn gaussian_noise(img: &GrayImage, sigma: f64, seed: u64) -> GrayImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma).expect("finite non-negative sigma");
    let mut out = img.clone();
    for p in out.pixels_mut() {
        *p += normal.sample(&mut rng);
    }
    out
}

/// Fraction of detected pixels with no truth pixel within Chebyshev
/// distance `tol`; 0 when nothing is detected.
pub fn false_edge_rate(em: &EdgeMap, truth: &TruthMask, tol: usize) -> Result<f64> {
    if em.dims() != truth.dims() {
        return Err(Error::DimensionMismatch {
            expected: truth.dims(),
            found: em.dims(),
        });
    }
    let detected = em.count();
    if detected == 0 {
        return Ok(0.0);
    }
    let near = truth.mask.dilate(tol);
    let false_hits = em
        .bits()
        .iter()
        .zip(near.bits())
        .filter(|(&d, &n)| d && !n)
        .count();
    Ok(false_hits as f64 / detected as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseRow {
    pub method: Method,
    pub density: f64,
    pub seed: u64,
    pub false_edge_rate: f64,
    pub true_edge_recall: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSummary {
    pub method: Method,
    pub density: f64,
    pub median_false_edge_rate: f64,
    pub median_recall: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct NoiseReport {
    pub rows: Vec<NoiseRow>,
}

impl NoiseReport {
    /// Medians over seeds per (method, density), in first-seen order.
    pub fn summary(&self) -> Vec<NoiseSummary> {
        let mut keys: Vec<(Method, u64)> = Vec::new();
        let mut groups: BTreeMap<(Method, u64), (Vec<f64>, Vec<f64>)> = BTreeMap::new();
        for row in &self.rows {
            let key = (row.method, row.density.to_bits());
            let entry = groups.entry(key).or_insert_with(|| {
                keys.push(key);
                (Vec::new(), Vec::new())
            });
            entry.0.push(row.false_edge_rate);
            entry.1.push(row.true_edge_recall);
        }
        keys.into_iter()
            .map(|key| {
                let (fer, rec) = &groups[&key];
                NoiseSummary {
                    method: key.0,
                    density: f64::from_bits(key.1),
                    median_false_edge_rate: median(fer),
                    median_recall: median(rec),
                }
            })
            .collect()
    }

    /// Methods ordered by median false-edge rate at `density` (stable for
    /// ties).
    pub fn ranking(&self, density: f64) -> Vec<(Method, f64)> {
        let mut ranked: Vec<(Method, f64)> = self
            .summary()
            .into_iter()
            .filter(|s| s.density == density)
            .map(|s| (s.method, s.median_false_edge_rate))
            .collect();
        ranked.sort_by(|a, b| a.1.total_cmp(&b.1));
        ranked
    }

    pub fn densities(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for row in &self.rows {
            if !out.contains(&row.density) {
                out.push(row.density);
            }
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,density,seed,false_edge_rate,true_edge_recall\n");
        for r in &self.rows {
            writeln!(
                out,
                "{},{:.6},{},{:.6},{:.6}",
                r.method, r.density, r.seed, r.false_edge_rate, r.true_edge_recall
            )
            .unwrap();
        }
        out
    }

    /// Median table per (method, density) plus a ranking line per density.
    pub fn to_markdown(&self) -> String {
        let mut summary = self.summary();
        summary.sort_by(|a, b| {
            a.method
                .table_rank()
                .cmp(&b.method.table_rank())
                .then(a.density.total_cmp(&b.density))
        });
        let mut out = String::from(
            "| method | noise density | median false edges | median recall |\n|---|---|---|---|\n",
        );
        for s in &summary {
            writeln!(
                out,
                "| {} | {:.4} | {:.4} | {:.4} |",
                s.method, s.density, s.median_false_edge_rate, s.median_recall
            )
            .unwrap();
        }
        out.push('\n');
        for d in self.densities() {
            let ranked = self.ranking(d);
            let mut line = String::new();
            for (i, (m, v)) in ranked.iter().enumerate() {
                if i > 0 {
                    let prev = ranked[i - 1].1;
                    line.push_str(if *v > prev { " < " } else { " = " });
                }
                line.push_str(m.name());
            }
            writeln!(
                out,
                "ranking by median false edges at density {d:.4}: {line}"
            )
            .unwrap();
        }
        out
    }
}

/// Corrupts `scene` for every (method, density, seed), detects, and scores
/// false-edge rate and recall against `truth` within `tol`.
pub fn noise_study(
    methods: &[DetectorConfig],
    scene: &GrayImage,
    truth: &TruthMask,
    densities: &[f64],
    seeds: &[u64],
    tol: usize,
) -> Result<NoiseReport> {
    run_cells(methods, scene, truth, densities, seeds, tol, |cfg, _| {
        Ok(cfg.clone())
    })
}

/// Like [`noise_study`], but each corrupted image gets the ideal threshold
/// of its own sweep (default grid and extraction settings) instead of the
/// thresholds in `methods`.
pub fn noise_study_tuned(
    methods: &[DetectorConfig],
    scene: &GrayImage,
    truth: &TruthMask,
    densities: &[f64],
    seeds: &[u64],
    tol: usize,
) -> Result<NoiseReport> {
    run_cells(
        methods,
        scene,
        truth,
        densities,
        seeds,
        tol,
        |cfg, noisy| {
            let sr = sweep_and_extract(noisy, cfg)?;
            let t = sr.triple.expect("extract_range sets the triple").t_ideal;
            Ok(cfg.clone().with_threshold(t))
        },
    )
}

fn run_cells(
    methods: &[DetectorConfig],
    scene: &GrayImage,
    truth: &TruthMask,
    densities: &[f64],
    seeds: &[u64],
    tol: usize,
    choose: impl Fn(&DetectorConfig, &GrayImage) -> Result<DetectorConfig> + Sync,
) -> Result<NoiseReport> {
    if scene.dims() != truth.dims() {
        return Err(Error::DimensionMismatch {
            expected: scene.dims(),
            found: truth.dims(),
        });
    }
    for cfg in methods {
        cfg.validate()?;
    }
    if let Some(&d) = densities.iter().find(|d| !(0.0..=1.0).contains(*d)) {
        return Err(Error::DensityOutOfRange(d));
    }
    let cells: Vec<(&DetectorConfig, f64, u64)> = methods
        .iter()
        .flat_map(|cfg| {
            densities
                .iter()
                .flat_map(move |&d| seeds.iter().map(move |&s| (cfg, d, s)))
        })
        .collect();
    let rows = cells
        .into_par_iter()
        .map(|(cfg, density, seed)| {
            let noisy = salt_pepper(scene, density, seed)?;
            let em = detect(&noisy, &choose(cfg, &noisy)?)?;
            Ok(NoiseRow {
                method: cfg.method,
                density,
                seed,
                false_edge_rate: false_edge_rate(&em, truth, tol)?,
                true_edge_recall: score_against_truth(&em, truth, tol)?.recall,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NoiseReport { rows })
}
