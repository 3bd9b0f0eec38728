use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use edgebench::bench::{gaussian_noise, noise_study, noise_study_tuned, timing_study};
use edgebench::detectors::{gradient, smoothed_gradient};
use edgebench::raster::{load_band_stack, load_pgm, save_pgm, Scene, SceneKind};
use edgebench::sweep::{extract_range, otsu_threshold, sweep_and_extract, uniform_grid};
use edgebench::{band_report_with, DetectorConfig, GrayImage, Kernel, Method, TruthMask};

use crate::alloc::AllocProbe;
use crate::manifest::RunManifest;
use crate::{
    usage, write_text, BandsArgs, BenchArgs, DetectArgs, DetectorArgs, Failure, Kind, NoiseArgs,
    SweepArgs, SynthArgs, Tuning,
};

type CmdResult = Result<(), Failure>;

fn uses_sigma(cfg: &DetectorConfig) -> bool {
    match cfg.method {
        Method::Canny | Method::LoG => true,
        Method::ZeroCross => cfg.kernel.is_none(),
        _ => false,
    }
}

/// Parses a kernel file: one row per line, taps separated by whitespace or
/// commas, `#` to end of line ignored.
pub fn parse_kernel(text: &str) -> Result<Kernel, String> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| format!("line {}: bad tap {s:?}", i + 1))
            })
            .collect::<Result<Vec<f64>, String>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err("no taps".into());
    }
    Kernel::from_rows(&rows).map_err(|e| e.to_string())
}

fn load_kernel(path: &Path) -> Result<Kernel, Failure> {
    let text = std::fs::read_to_string(path).map_err(|source| {
        Failure::Run(match source.kind() {
            std::io::ErrorKind::NotFound => edgebench::Error::MissingFile(path.to_path_buf()),
            _ => edgebench::Error::IoFailure {
                path: path.to_path_buf(),
                source,
            },
        })
    })?;
    parse_kernel(&text).map_err(|e| usage(format!("kernel {}: {e}", path.display())))
}

/// Detector configuration from flags, and whether a threshold was given.
pub fn build_config(method: Method, a: &DetectorArgs) -> Result<(DetectorConfig, bool), Failure> {
    if method != Method::Canny && (a.low.is_some() || a.high.is_some()) {
        return Err(usage(format!(
            "--low/--high apply only to canny, not {method}"
        )));
    }
    if a.kernel.is_some() && method != Method::ZeroCross {
        return Err(usage(format!(
            "--kernel applies only to zerocross, not {method}"
        )));
    }
    let mut cfg = DetectorConfig::for_method(method, 0.0);
    let explicit = match method {
        Method::Canny => match (a.threshold, a.low, a.high) {
            (None, Some(low), Some(high)) => {
                cfg = DetectorConfig::canny(low, high);
                true
            }
            (Some(high), None, None) | (None, None, Some(high)) => {
                cfg = DetectorConfig::canny_single(high);
                true
            }
            (None, None, None) => false,
            (None, Some(_), None) => return Err(usage("--low needs --high")),
            _ => return Err(usage("give either --threshold or --low/--high")),
        },
        _ => match a.threshold {
            Some(t) => {
                cfg = cfg.with_threshold(t);
                true
            }
            None => false,
        },
    };
    if let Some(path) = &a.kernel {
        cfg.kernel = Some(load_kernel(path)?);
    }
    if let Some(sigma) = a.sigma {
        if !uses_sigma(&cfg) {
            return Err(usage(format!("--sigma does not apply to {method}")));
        }
        cfg = cfg.with_sigma(sigma);
    }
    if explicit {
        cfg.validate()?;
    } else {
        cfg.clone().with_threshold(0.5).validate()?;
    }
    Ok((cfg, explicit))
}

/// Picks a threshold for a configuration given without one: Otsu of the
/// gradient magnitude (smoothed for canny), else the sweep ideal.
pub fn auto_threshold(
    img: &GrayImage,
    cfg: DetectorConfig,
) -> Result<(DetectorConfig, String), Failure> {
    let field = match (cfg.method.gradient_operator(), cfg.method) {
        (Some(op), _) => Some(gradient(img, op)?),
        (None, Method::Canny) => Some(smoothed_gradient(img, cfg.sigma)?),
        _ => None,
    };
    if let Some(gf) = field {
        if let Ok(t) = otsu_threshold(gf.magnitude().pixels()) {
            return Ok((cfg.with_threshold(t), "otsu".into()));
        }
    }
    let triple = sweep_and_extract(img, &cfg)?.triple.expect("triple set");
    let mut t = triple.t_ideal;
    if cfg.method == Method::Canny && t <= 0.0 {
        // degenerate magnitude: any pair gives the same (empty) map
        t = 1.0;
    }
    Ok((
        cfg.with_threshold(t),
        format!("sweep-{}", triple.ideal_source.name()),
    ))
}

fn config_json(cfg: &DetectorConfig) -> Value {
    let mut v = json!({ "method": cfg.method.name(), "border": "replicate" });
    if cfg.method == Method::Canny {
        v["low"] = json!(cfg.low);
        v["high"] = json!(cfg.high);
    } else {
        v["threshold"] = json!(cfg.threshold);
    }
    if uses_sigma(cfg) {
        v["sigma"] = json!(cfg.sigma);
    }
    if let Some(k) = &cfg.kernel {
        v["kernel"] = json!({ "width": k.width(), "height": k.height(), "taps": k.taps() });
    }
    v
}

/// `1,2,3`, `a..b` (half-open) or `a..=b`.
pub fn parse_seeds(spec: &str) -> Result<Vec<u64>, Failure> {
    let bad = || usage(format!("bad seed list {spec:?}; use 1,2,3 or 0..20"));
    let spec = spec.trim();
    let seeds: Vec<u64> = if let Some((a, b)) = spec.split_once("..=") {
        let (a, b) = (
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        );
        (a..=b).collect()
    } else if let Some((a, b)) = spec.split_once("..") {
        let (a, b) = (
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        );
        (a..b).collect()
    } else {
        spec.split(',')
            .map(|s| s.trim().parse().map_err(|_| bad()))
            .collect::<Result<_, _>>()?
    };
    if seeds.is_empty() {
        return Err(bad());
    }
    Ok(seeds)
}

fn write_markdown(path: Option<&PathBuf>, md: &str, manifest: &mut RunManifest) -> CmdResult {
    match path {
        Some(p) => {
            write_text(p, md)?;
            manifest.output(p);
        }
        None => print!("{md}"),
    }
    Ok(())
}

pub fn detect(a: DetectArgs) -> CmdResult {
    let (cfg, explicit) = build_config(a.method, &a.detector)?;
    let img = load_pgm(&a.input)?;
    let (cfg, source) = if explicit {
        (cfg, "flag".to_string())
    } else {
        auto_threshold(&img, cfg)?
    };
    let em = edgebench::detect(&img, &cfg)?;
    save_pgm(&em.to_image(), &a.out)?;

    let mut m = RunManifest::new("detect");
    m.param("detector", config_json(&cfg))
        .param("threshold_source", source.as_str())
        .param("edge_pixels", em.count())
        .input(&a.input)
        .output(&a.out);
    m.write_beside(&a.out)?;
    println!(
        "{}: {} edge pixels ({:.2}%), threshold from {source} -> {}",
        cfg.method,
        em.count(),
        100.0 * em.density(),
        a.out.display()
    );
    Ok(())
}

pub fn sweep(a: SweepArgs) -> CmdResult {
    let args = DetectorArgs {
        sigma: a.sigma,
        kernel: a.kernel.clone(),
        ..DetectorArgs::default()
    };
    let (cfg, _) = build_config(a.method, &args)?;
    if !(a.eps >= 0.0) {
        return Err(usage(format!("--eps must be >= 0, got {}", a.eps)));
    }
    if !(a.plateau > 0.0 && a.plateau <= 1.0) {
        return Err(usage(format!(
            "--plateau must be in (0, 1], got {}",
            a.plateau
        )));
    }
    if let Some(i) = a.ideal {
        if !(0.0..=1.0).contains(&i) {
            return Err(usage(format!("--ideal must be in [0, 1], got {i}")));
        }
    }
    let img = load_pgm(&a.input)?;
    let raw = edgebench::sweep(&img, &cfg, &uniform_grid(a.grid_points))?;
    let mut sr = extract_range(&raw, a.eps, a.plateau)?;
    if let Some(ideal) = a.ideal {
        sr = sr.with_manual_ideal(ideal);
    }
    write_text(&a.out, &sr.to_csv())?;

    let triple = sr.triple.expect("triple set");
    let mut m = RunManifest::new("sweep");
    m.param("detector", config_json(&cfg))
        .param("grid_points", a.grid_points)
        .param("eps", a.eps)
        .param("plateau", a.plateau)
        .param("ideal_override", a.ideal)
        .param("features", a.features.as_str())
        .param(
            "triple",
            json!({
                "t_min": triple.t_min,
                "t_ideal": triple.t_ideal,
                "t_max": triple.t_max,
                "ideal_source": triple.ideal_source.name(),
            }),
        )
        .input(&a.input)
        .output(&a.out);
    write_markdown(a.markdown.as_ref(), &sr.to_markdown(&a.features), &mut m)?;
    m.write_beside(&a.out)?;
    Ok(())
}

pub fn bands(a: BandsArgs) -> CmdResult {
    let (cfg, explicit) = build_config(a.method, &a.detector)?;
    if !edgebench::raster::is_valid_label(&a.feature) {
        return Err(usage(format!(
            "feature label {:?} must match [A-Za-z0-9_/]+",
            a.feature
        )));
    }
    let stack = load_band_stack(&a.manifest)?;
    let truth = TruthMask::from_image(&load_pgm(&a.truth)?, a.feature.clone());
    let mut cfgs = Vec::with_capacity(stack.len());
    let mut sources = Vec::with_capacity(stack.len());
    for band in stack.bands() {
        if explicit {
            cfgs.push(cfg.clone());
            sources.push("flag".to_string());
        } else {
            let (c, s) = auto_threshold(band, cfg.clone())?;
            cfgs.push(c);
            sources.push(s);
        }
    }
    let report = band_report_with(&stack, &cfgs, &truth, a.tol)?;
    write_text(&a.out, &report.to_csv())?;

    let per_band: Vec<Value> = stack
        .labels()
        .iter()
        .zip(&cfgs)
        .zip(&sources)
        .map(|((label, c), s)| json!({ "label": label, "detector": config_json(c), "threshold_source": s }))
        .collect();
    let mut m = RunManifest::new("bands");
    m.param("bands", per_band)
        .param("tol", a.tol)
        .param("feature", a.feature.as_str())
        .param("best_band", report.best_band.as_str())
        .input(&a.manifest)
        .input(&a.truth)
        .output(&a.out);
    m.write_beside(&a.out)?;
    print!("{}", report.to_csv());
    Ok(())
}

/// Built-in noise scene: 64x64 vertical step at column 32, 0.25 | 0.75.
fn default_noise_scene() -> (GrayImage, TruthMask, Value) {
    let scene = Scene::vstep(64, 64, 32, 0.25, 0.75);
    let img = scene.render().expect("valid scene");
    let truth = TruthMask::new(scene.truth().expect("valid scene"), "step");
    let desc =
        json!({ "kind": "vstep", "width": 64, "height": 64, "split": 32, "lo": 0.25, "hi": 0.75 });
    (img, truth, desc)
}

fn check_densities(densities: &[f64]) -> CmdResult {
    match densities.iter().find(|d| !(0.0..=1.0).contains(*d)) {
        Some(&d) => Err(Failure::Run(edgebench::Error::DensityOutOfRange(d))),
        None => Ok(()),
    }
}

pub fn noise(a: NoiseArgs) -> CmdResult {
    let seeds = parse_seeds(&a.seeds)?;
    match (a.tuning, a.threshold) {
        (Tuning::Fixed, None) => return Err(usage("--tuning fixed needs --threshold")),
        (Tuning::PerImage | Tuning::Clean, Some(_)) => {
            return Err(usage("--threshold only applies with --tuning fixed"))
        }
        _ => {}
    }
    if a.methods.is_empty() || a.densities.is_empty() {
        return Err(usage("--methods and --densities must not be empty"));
    }
    check_densities(&a.densities)?;
    let mut cfgs = Vec::new();
    for &method in &a.methods {
        let mut cfg = DetectorConfig::for_method(method, a.threshold.unwrap_or(0.5));
        if let (Some(s), true) = (a.sigma, uses_sigma(&cfg)) {
            cfg = cfg.with_sigma(s);
        }
        cfg.validate()?;
        cfgs.push(cfg);
    }

    let mut m = RunManifest::new("noise");
    let (scene, truth, scene_desc) = match (&a.input, &a.truth) {
        (Some(input), Some(truth_path)) => {
            m.input(input).input(truth_path);
            let truth = TruthMask::from_image(&load_pgm(truth_path)?, "truth");
            (load_pgm(input)?, truth, json!("input"))
        }
        _ => default_noise_scene(),
    };
    if a.tuning == Tuning::Clean {
        for cfg in &mut cfgs {
            let t = sweep_and_extract(&scene, cfg)?
                .triple
                .expect("triple set")
                .t_ideal;
            *cfg = cfg.clone().with_threshold(t);
            cfg.validate()?;
        }
    }
    let report = match a.tuning {
        Tuning::PerImage => noise_study_tuned(&cfgs, &scene, &truth, &a.densities, &seeds, a.tol)?,
        Tuning::Clean | Tuning::Fixed => {
            noise_study(&cfgs, &scene, &truth, &a.densities, &seeds, a.tol)?
        }
    };
    write_text(&a.out, &report.to_csv())?;

    let detectors: Vec<Value> = cfgs.iter().map(config_json).collect();
    m.param("detectors", detectors)
        .param("tuning", a.tuning.name())
        .param("densities", a.densities.clone())
        .param("seeds", seeds)
        .param("tol", a.tol)
        .param("scene", scene_desc)
        .output(&a.out);
    write_markdown(a.markdown.as_ref(), &report.to_markdown(), &mut m)?;
    m.write_beside(&a.out)?;
    Ok(())
}

pub fn bench(a: BenchArgs) -> CmdResult {
    if a.methods.is_empty() {
        return Err(usage("--methods must not be empty"));
    }
    let cfgs: Vec<DetectorConfig> = a
        .methods
        .iter()
        .map(|&m| DetectorConfig::for_method(m, a.threshold))
        .collect();
    check_densities(&a.noise_densities)?;
    let noise_seeds = parse_seeds(&a.noise_seeds)?;
    let report = timing_study(&cfgs, &a.sides, a.repeats, Some(&AllocProbe))?;
    let noise = if a.skip_noise || a.noise_densities.is_empty() {
        None
    } else {
        let (scene, truth, _) = default_noise_scene();
        Some(noise_study_tuned(
            &cfgs,
            &scene,
            &truth,
            &a.noise_densities,
            &noise_seeds,
            1,
        )?)
    };
    write_text(&a.out, &report.to_csv())?;

    let mut m = RunManifest::new("bench");
    let detectors: Vec<Value> = cfgs.iter().map(config_json).collect();
    m.param("detectors", detectors)
        .param("sides", a.sides.clone())
        .param("repeats", a.repeats)
        .param("worker_threads", 1)
        .output(&a.out);
    if noise.is_some() {
        m.param("noise_densities", a.noise_densities.clone())
            .param("noise_seeds", noise_seeds)
            .param("noise_tuning", "per-image")
            .param("noise_tol", 1)
            .param("noise_scene", default_noise_scene().2);
    }
    write_markdown(
        a.markdown.as_ref(),
        &report.to_markdown(noise.as_ref()),
        &mut m,
    )?;
    m.write_beside(&a.out)?;
    Ok(())
}

fn truth_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scene".into());
    out.with_file_name(format!("{stem}_truth.pgm"))
}

pub fn synth(a: SynthArgs) -> CmdResult {
    let (w, h) = (a.width.unwrap_or(a.size), a.height.unwrap_or(a.size));
    let short = w.min(h);
    let stray = |flag: &str, set: bool| -> CmdResult {
        if set {
            Err(usage(
                format!("{flag} does not apply to --kind {:?}", a.kind).to_lowercase(),
            ))
        } else {
            Ok(())
        }
    };
    if a.kind != Kind::Vstep {
        stray("--split", a.split.is_some())?;
    }
    if a.kind != Kind::Ribbon {
        stray("--strip", a.strip.is_some())?;
    }
    if a.kind != Kind::Disk {
        stray("--center", a.center.is_some())?;
        stray("--radius", a.radius.is_some())?;
    }
    if a.kind != Kind::Checker {
        stray("--block", a.block.is_some())?;
    }
    if !(0.0..=1.0).contains(&a.lo) || !(0.0..=1.0).contains(&a.hi) {
        return Err(usage("--lo and --hi must be in [0, 1]"));
    }
    if !(a.noise_sigma >= 0.0) {
        return Err(usage("--noise-sigma must be >= 0"));
    }
    let kind = match a.kind {
        Kind::Vstep => SceneKind::VStep {
            split: a.split.unwrap_or(w / 2),
        },
        Kind::Ribbon => SceneKind::Ribbon {
            width: a.strip.unwrap_or((short / 8).max(1) as f64),
            angle_deg: a.angle,
            offset: a.offset,
        },
        Kind::Disk => SceneKind::Disk {
            center: match &a.center {
                Some(c) => (c[0], c[1]),
                None => ((w as f64 - 1.0) / 2.0, (h as f64 - 1.0) / 2.0),
            },
            radius: a.radius.unwrap_or(short as f64 / 4.0),
        },
        Kind::Checker => SceneKind::Checker {
            block: a.block.unwrap_or((short / 8).max(1)),
        },
    };
    let scene = Scene::new(kind, w, h, a.lo, a.hi);
    let mut img = scene.render()?;
    if a.noise_sigma > 0.0 {
        img = gaussian_noise(&img, a.noise_sigma, a.seed);
    }
    let truth = scene.truth()?;
    let truth_out = truth_path(&a.out);
    save_pgm(&img, &a.out)?;
    save_pgm(&truth.to_image(), &truth_out)?;

    let mut m = RunManifest::new("synth");
    m.param("scene", format!("{kind:?}"))
        .param("width", w)
        .param("height", h)
        .param("lo", a.lo)
        .param("hi", a.hi)
        .param("noise_sigma", a.noise_sigma)
        .param("seed", a.seed)
        .param("truth_pixels", truth.count())
        .output(&a.out)
        .output(&truth_out);
    m.write_beside(&a.out)?;
    println!("{} and {}", a.out.display(), truth_out.display());
    Ok(())
}
