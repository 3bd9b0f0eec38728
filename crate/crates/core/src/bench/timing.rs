use std::fmt::Write as _;
use std::time::Instant;

use crate::bench::{median, NoiseReport};
use crate::detectors::{detect, DetectorConfig, Method};
use crate::error::{Error, Result};
use crate::raster::{GrayImage, Scene};

/// Optional hook for measuring peak auxiliary memory during a run, e.g. a
/// counting global allocator installed by a binary.
pub trait MemoryProbe: Sync {
    /// Starts a new measurement window at the current allocation level.
    fn reset(&self);
    /// Peak bytes allocated above the level at the last `reset`.
    fn peak_bytes(&self) -> u64;
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingRow {
    pub method: Method,
    pub side: usize,
    pub median_seconds: f64,
    pub peak_bytes: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TimingReport {
    pub rows: Vec<TimingRow>,
    pub repeats: usize,
}

/// Scene timed at each side length: a centered disk of radius side/4 with
/// a horizontal ribbon through it.
pub fn timing_scene(side: usize) -> GrayImage {
    let c = (side as f64 - 1.0) / 2.0;
    let disk = Scene::disk(side, side, (c, c), side as f64 / 4.0, 0.2, 0.8)
        .foreground()
        .expect("disk fits");
    let ribbon = Scene::ribbon(side, side, (side / 16).max(1) as f64, 30.0, 0.2, 0.8)
        .foreground()
        .expect("ribbon fits");
    GrayImage::from_fn(side, side, |r, col| {
        0.2 + 0.35 * disk.get(r, col) as u8 as f64 + 0.35 * ribbon.get(r, col) as u8 as f64
    })
}

/// Median wall time of `detect` per method and side, run on a single worker
/// thread.
pub fn timing_study(
    methods: &[DetectorConfig],
    sides: &[usize],
    repeats: usize,
    probe: Option<&dyn MemoryProbe>,
) -> Result<TimingReport> {
    if repeats < 3 {
        return Err(Error::TooFewRepeats(repeats));
    }
    if sides.is_empty() || sides.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::UnsortedSides);
    }
    for cfg in methods {
        cfg.validate()?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .expect("single-thread pool");
    pool.install(|| {
        let mut rows = Vec::new();
        for cfg in methods {
            for &side in sides {
                let img = timing_scene(side);
                let peak_bytes = match probe {
                    Some(p) => {
                        p.reset();
                        detect(&img, cfg)?;
                        Some(p.peak_bytes())
                    }
                    None => None,
                };
                let mut times = Vec::with_capacity(repeats);
                for _ in 0..repeats {
                    let start = Instant::now();
                    let em = detect(&img, cfg)?;
                    times.push(start.elapsed().as_secs_f64());
                    std::hint::black_box(em);
                }
                rows.push(TimingRow {
                    method: cfg.method,
                    side,
                    median_seconds: median(&times),
                    peak_bytes,
                });
            }
        }
        Ok(TimingReport { rows, repeats })
    })
}

impl TimingReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,side,median_seconds,peak_bytes\n");
        for r in &self.rows {
            let peak = r.peak_bytes.map(|b| b.to_string()).unwrap_or_default();
            writeln!(
                out,
                "{},{},{:.9},{}",
                r.method, r.side, r.median_seconds, peak
            )
            .unwrap();
        }
        out
    }

    /// Methods in comparison-table order (sobel, canny, roberts, prewitt,
    /// log, zerocross), keeping only those present.
    pub fn methods(&self) -> Vec<Method> {
        let mut ms: Vec<Method> = Vec::new();
        for r in &self.rows {
            if !ms.contains(&r.method) {
                ms.push(r.method);
            }
        }
        ms.sort_by_key(|m| m.table_rank());
        ms
    }

    pub fn rows_for(&self, method: Method) -> impl Iterator<Item = &TimingRow> {
        self.rows.iter().filter(move |r| r.method == method)
    }

    /// True if median time strictly increases with side for `method`.
    pub fn is_monotonic(&self, method: Method) -> bool {
        let times: Vec<f64> = self.rows_for(method).map(|r| r.median_seconds).collect();
        times.windows(2).all(|w| w[0] < w[1])
    }

    /// Comparison table (method, time, space, noise sensitivity, false
    /// edges) at the largest side, followed by the per-side scaling table.
    ///
    /// Noise columns come from `noise` when given: sensitivity is the rise
    /// in median false-edge rate from the lowest to the highest density,
    /// false edges the median rate at the highest density.
    pub fn to_markdown(&self, noise: Option<&NoiseReport>) -> String {
        let largest = self.rows.iter().map(|r| r.side).max().unwrap_or(0);
        let summary = noise.map(|n| n.summary()).unwrap_or_default();
        let mut out = String::new();
        writeln!(
            out,
            "| method | time (s, side {largest}) | space (peak aux bytes) | noise sensitivity | false edges |"
        )
        .unwrap();
        out.push_str("|---|---|---|---|---|\n");
        for m in self.methods() {
            let row = self.rows_for(m).find(|r| r.side == largest);
            let time = row.map_or("-".into(), |r| format!("{:.6}", r.median_seconds));
            let space = row
                .and_then(|r| r.peak_bytes)
                .map_or("-".into(), |b| b.to_string());
            let mut per_density: Vec<_> = summary.iter().filter(|s| s.method == m).collect();
            per_density.sort_by(|a, b| a.density.total_cmp(&b.density));
            let (sens, fe) = match (per_density.first(), per_density.last()) {
                (Some(lo), Some(hi)) => {
                    let sens = if per_density.len() > 1 {
                        format!(
                            "{:+.4}",
                            hi.median_false_edge_rate - lo.median_false_edge_rate
                        )
                    } else {
                        "-".into()
                    };
                    (sens, format!("{:.4}", hi.median_false_edge_rate))
                }
                _ => ("-".into(), "-".into()),
            };
            writeln!(out, "| {m} | {time} | {space} | {sens} | {fe} |").unwrap();
        }
        out.push_str("\n| method | side | median time (s) | peak aux bytes |\n|---|---|---|---|\n");
        for m in self.methods() {
            for r in self.rows_for(m) {
                let peak = r.peak_bytes.map_or("-".into(), |b| b.to_string());
                writeln!(
                    out,
                    "| {m} | {} | {:.6} | {peak} |",
                    r.side, r.median_seconds
                )
                .unwrap();
            }
        }
        writeln!(
            out,
            "\nmedian over {} repeats on one worker thread.",
            self.repeats
        )
        .unwrap();
        out
    }
}
