use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use pdelum::flow::enhance_color;
use pdelum::metrics::METRICS_CSV_HEADER;
use pdelum::raster::{load_ppm, save_ppm, ColorImage};
use pdelum::MetricsReport;
use rayon::prelude::*;

use crate::config::{InputSource, RunConfig};

/// Files written for one input.
#[derive(Debug)]
pub struct ImageOutcome {
    pub stem: String,
    pub files: Vec<PathBuf>,
    pub chosen_iteration: usize,
}

/// Per-input results, in input order.
#[derive(Debug, Default)]
pub struct BatchOutcome {
    pub results: Vec<(String, Result<ImageOutcome>)>,
}

impl BatchOutcome {
    pub fn failures(&self) -> usize {
        self.results.iter().filter(|(_, r)| r.is_err()).count()
    }
}

/// Rounds to 8 bits per channel, returning the PPM bytes and their decoding.
pub fn quantize(img: &ColorImage) -> Result<(Vec<u8>, ColorImage)> {
    let bytes = save_ppm(img)?;
    let decoded = load_ppm(&bytes)?;
    Ok((bytes, decoded))
}

fn prepare(cfg: &RunConfig) -> Result<()> {
    cfg.validate()?;
    let mut seen = HashSet::new();
    for src in &cfg.inputs {
        let stem = src.stem(cfg.seed);
        if !seen.insert(stem.clone()) {
            bail!("two inputs map to the same output name `{stem}`");
        }
    }
    fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))
}

fn write(dir: &Path, name: String, bytes: &[u8], files: &mut Vec<PathBuf>) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
    files.push(path);
    Ok(())
}

fn batch(
    cfg: &RunConfig,
    f: impl Fn(&InputSource) -> Result<ImageOutcome> + Sync,
) -> Result<BatchOutcome> {
    prepare(cfg)?;
    let results = cfg
        .inputs
        .par_iter()
        .map(|src| (src.to_string(), f(src)))
        .collect();
    Ok(BatchOutcome { results })
}

fn csv(rows: &[MetricsReport]) -> String {
    let mut s = String::from(METRICS_CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s
}

/// Enhances every input, writing `<stem>.pa.ppm`, `<stem>.trace.csv` and
/// `<stem>.metrics.csv`. Metrics are measured before 8-bit rounding.
pub fn enhance(cfg: &RunConfig) -> Result<BatchOutcome> {
    batch(cfg, |src| {
        let stem = src.stem(cfg.seed);
        let input = src.load(cfg.seed)?;
        let (out, trace) = enhance_color(&input, &cfg.params, &cfg.stop, cfg.mode)?;
        let report = MetricsReport::new("pa", &input, &out)?;
        let bytes = save_ppm(&out)?;
        let mut files = Vec::new();
        write(&cfg.out, format!("{stem}.pa.ppm"), &bytes, &mut files)?;
        write(
            &cfg.out,
            format!("{stem}.trace.csv"),
            trace.to_csv().as_bytes(),
            &mut files,
        )?;
        write(
            &cfg.out,
            format!("{stem}.metrics.csv"),
            csv(&[report]).as_bytes(),
            &mut files,
        )?;
        Ok(ImageOutcome {
            stem,
            files,
            chosen_iteration: trace.chosen_iteration(),
        })
    })
}

/// Runs every baseline and the flow on each input, writing one
/// `<stem>.compare.csv` with a row per algorithm (flow last).
pub fn compare(cfg: &RunConfig) -> Result<BatchOutcome> {
    batch(cfg, |src| {
        let stem = src.stem(cfg.seed);
        let input = src.load(cfg.seed)?;
        let mut rows = Vec::with_capacity(cfg.baselines.len() + 1);
        for b in &cfg.baselines {
            rows.push(MetricsReport::new(b.name(), &input, &b.apply(&input)?)?);
        }
        let (out, trace) = enhance_color(&input, &cfg.params, &cfg.stop, cfg.mode)?;
        rows.push(MetricsReport::new("pa", &input, &out)?);
        let mut files = Vec::new();
        write(
            &cfg.out,
            format!("{stem}.compare.csv"),
            csv(&rows).as_bytes(),
            &mut files,
        )?;
        Ok(ImageOutcome {
            stem,
            files,
            chosen_iteration: trace.chosen_iteration(),
        })
    })
}
