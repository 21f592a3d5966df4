//! Wall-clock timing of the flow and the baselines on synthetic inputs.

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{Context, Result};
use pdelum::flow::{enhance_color, pde_step};
use pdelum::fmt::sig9;
use pdelum::raster::{rgb_to_hsi, ColorImage};
use pdelum::synth;

use crate::config::RunConfig;

pub const BENCH_CSV_HEADER: &str = "algo,pixels,median_ms";
pub const STEP_CSV_HEADER: &str = "pixels,median_ms,log2_pixels,log2_ms";

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub algo: String,
    pub pixels: usize,
    pub median_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRow {
    pub pixels: usize,
    pub median_ms: f64,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub steps: Vec<StepRow>,
    pub files: Vec<PathBuf>,
}

/// The square low-light images timed by `bench`, one per side length.
pub fn bench_inputs(sizes: &[usize], seed: u64) -> Vec<ColorImage> {
    sizes
        .iter()
        .map(|&s| synth::low_light_texture(s, s, seed))
        .collect()
}

pub fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

/// Median wall time of `f` over `repeats` runs, in milliseconds.
pub fn time_ms<T>(repeats: usize, mut f: impl FnMut() -> T) -> f64 {
    let samples = (0..repeats.max(1))
        .map(|_| {
            let t = Instant::now();
            std::hint::black_box(f());
            t.elapsed().as_secs_f64() * 1e3
        })
        .collect();
    median(samples)
}

/// Per-doubling-of-pixels growth factor between consecutive rows.
pub fn growth_per_pixel_doubling(steps: &[StepRow]) -> Vec<f64> {
    steps
        .windows(2)
        .map(|w| {
            let doublings = (w[1].pixels as f64 / w[0].pixels as f64).log2();
            (w[1].median_ms / w[0].median_ms).powf(1.0 / doublings)
        })
        .collect()
}

/// Times one flow step on the intensity of each bench input.
pub fn time_steps(cfg: &RunConfig) -> Result<Vec<StepRow>> {
    bench_inputs(&cfg.sizes, cfg.seed)
        .iter()
        .map(|img| {
            let intensity = rgb_to_hsi(img)?.into_planes()[2].clone();
            // Warm-up so the first size does not pay for page faults.
            pde_step(&intensity, &cfg.params);
            Ok(StepRow {
                pixels: intensity.len(),
                median_ms: time_ms(cfg.repeats, || pde_step(&intensity, &cfg.params)),
            })
        })
        .collect()
}

/// Times the flow and every configured baseline at every size, writing
/// `bench.csv` and `bench_step.csv` under `cfg.out`.
pub fn bench(cfg: &RunConfig) -> Result<BenchReport> {
    cfg.validate()?;
    let inputs = bench_inputs(&cfg.sizes, cfg.seed);
    let mut rows = Vec::new();
    for img in &inputs {
        enhance_color(img, &cfg.params, &cfg.stop, cfg.mode)?;
        for b in &cfg.baselines {
            b.apply(img)?;
        }
    }
    for img in &inputs {
        let pixels = img.width() * img.height();
        let ms = time_ms(cfg.repeats, || {
            enhance_color(img, &cfg.params, &cfg.stop, cfg.mode)
        });
        rows.push(BenchRow {
            algo: "pa".into(),
            pixels,
            median_ms: ms,
        });
    }
    for b in &cfg.baselines {
        for img in &inputs {
            let pixels = img.width() * img.height();
            let ms = time_ms(cfg.repeats, || b.apply(img));
            rows.push(BenchRow {
                algo: b.name().into(),
                pixels,
                median_ms: ms,
            });
        }
    }
    let steps = time_steps(cfg)?;

    fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?;
    let mut main = format!("{BENCH_CSV_HEADER}\n");
    for r in &rows {
        main.push_str(&format!("{},{},{}\n", r.algo, r.pixels, sig9(r.median_ms)));
    }
    let mut step = format!("{STEP_CSV_HEADER}\n");
    for s in &steps {
        step.push_str(&format!(
            "{},{},{},{}\n",
            s.pixels,
            sig9(s.median_ms),
            sig9((s.pixels as f64).log2()),
            sig9(s.median_ms.log2())
        ));
    }
    let files = vec![cfg.out.join("bench.csv"), cfg.out.join("bench_step.csv")];
    fs::write(&files[0], main).with_context(|| format!("writing {}", files[0].display()))?;
    fs::write(&files[1], step).with_context(|| format!("writing {}", files[1].display()))?;
    Ok(BenchReport { rows, steps, files })
}
