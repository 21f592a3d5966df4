//! Run configuration shared by every subcommand.

use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{anyhow, bail, ensure, Context, Result};
use pdelum::raster::ColorImage;
use pdelum::{baselines, synth, EnhanceParams, Mode, Raster, StopMode, StopPolicy};

/// A classical enhancer applied on the HSI intensity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Baseline {
    GlobalHe,
    Stretch { lo_pct: f64, hi_pct: f64 },
    GainOffset { gain: f64, offset: f64 },
    Gamma(f64),
    Homomorphic { gamma_h: f64, gamma_l: f64 },
}

impl Baseline {
    /// The five baselines with their default parameters.
    pub fn all() -> Vec<Baseline> {
        ["ghe", "lcs", "goc", "gamma", "shf"]
            .iter()
            .map(|s| s.parse().expect("built-in names parse"))
            .collect()
    }

    pub fn name(&self) -> &'static str {
        match self {
            Baseline::GlobalHe => "ghe",
            Baseline::Stretch { .. } => "lcs",
            Baseline::GainOffset { .. } => "goc",
            Baseline::Gamma(_) => "gamma",
            Baseline::Homomorphic { .. } => "shf",
        }
    }

    pub fn apply_plane(&self, plane: &Raster) -> pdelum::Result<Raster> {
        match *self {
            Baseline::GlobalHe => Ok(baselines::global_he(plane)),
            Baseline::Stretch { lo_pct, hi_pct } => {
                baselines::linear_stretch(plane, lo_pct, hi_pct)
            }
            Baseline::GainOffset { gain, offset } => {
                Ok(baselines::gain_offset(plane, gain, offset))
            }
            Baseline::Gamma(g) => baselines::gamma_correct(plane, g),
            Baseline::Homomorphic { gamma_h, gamma_l } => {
                baselines::spatial_homomorphic(plane, gamma_h, gamma_l)
            }
        }
    }

    pub fn apply(&self, img: &ColorImage) -> pdelum::Result<ColorImage> {
        baselines::on_intensity(img, |plane| self.apply_plane(plane))
    }

    fn validate(&self) -> Result<()> {
        // Run on a 2x2 probe so parameter errors surface before any file work.
        self.apply_plane(&Raster::filled(2, 2, 0.5))
            .map(|_| ())
            .map_err(|e| anyhow!("baseline `{}`: {e}", self.name()))
    }
}

impl FromStr for Baseline {
    type Err = anyhow::Error;

    /// `name[:p1[:p2]]`, e.g. `lcs:1:99`, `goc:1.5:0`, `gamma:0.5`.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.trim().split(':');
        let name = parts.next().unwrap_or_default().to_ascii_lowercase();
        let args: Vec<f64> = parts
            .map(|p| {
                p.parse::<f64>()
                    .with_context(|| format!("bad number `{p}` in baseline `{s}`"))
            })
            .collect::<Result<_>>()?;
        let arg = |i: usize, default: f64| args.get(i).copied().unwrap_or(default);
        let max_args = match name.as_str() {
            "ghe" => 0,
            "gamma" => 1,
            _ => 2,
        };
        ensure!(
            args.len() <= max_args,
            "baseline `{name}` takes at most {max_args} parameters"
        );
        Ok(match name.as_str() {
            "ghe" => Baseline::GlobalHe,
            "lcs" => Baseline::Stretch {
                lo_pct: arg(0, 0.0),
                hi_pct: arg(1, 100.0),
            },
            "goc" => Baseline::GainOffset {
                gain: arg(0, 1.5),
                offset: arg(1, 0.0),
            },
            "gamma" => Baseline::Gamma(arg(0, 0.5)),
            "shf" => Baseline::Homomorphic {
                gamma_h: arg(0, 1.5),
                gamma_l: arg(1, 0.9),
            },
            other => bail!("unknown baseline `{other}` (expected ghe, lcs, goc, gamma, shf)"),
        })
    }
}

/// Parses a comma-separated baseline list; `none` is empty, `all` the defaults.
pub fn parse_baselines(s: &str) -> Result<Vec<Baseline>> {
    match s.trim() {
        "none" | "" => Ok(Vec::new()),
        "all" => Ok(Baseline::all()),
        list => list.split(',').map(str::parse).collect(),
    }
}

/// `entropy` or `fixed:N`.
pub fn parse_stop(s: &str) -> Result<StopMode> {
    match s.trim() {
        "entropy" => Ok(StopMode::EntropyPeak),
        other => {
            let n = other
                .strip_prefix("fixed:")
                .ok_or_else(|| anyhow!("stop must be `entropy` or `fixed:N`, got `{other}`"))?;
            Ok(StopMode::FixedIterations(
                n.parse()
                    .with_context(|| format!("bad iteration count `{n}`"))?,
            ))
        }
    }
}

pub fn parse_mode(s: &str) -> Result<Mode> {
    match s.trim().to_ascii_lowercase().as_str() {
        "hsi" => Ok(Mode::Hsi),
        "rgb" => Ok(Mode::RgbPerChannel),
        other => bail!("mode must be `hsi` or `rgb`, got `{other}`"),
    }
}

/// Where an input image comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum InputSource {
    File(PathBuf),
    /// `synth:<kind>:<W>x<H>`, generated with the run seed.
    Synthetic {
        kind: SynthKind,
        width: usize,
        height: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthKind {
    Ramp,
    LowLight,
    Checker,
}

impl SynthKind {
    fn name(self) -> &'static str {
        match self {
            SynthKind::Ramp => "ramp",
            SynthKind::LowLight => "lowlight",
            SynthKind::Checker => "checker",
        }
    }
}

impl FromStr for SynthKind {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ramp" => Ok(SynthKind::Ramp),
            "lowlight" => Ok(SynthKind::LowLight),
            "checker" => Ok(SynthKind::Checker),
            other => bail!("unknown synthetic image `{other}` (expected ramp, lowlight, checker)"),
        }
    }
}

/// Builds one of the synthetic images as RGB.
pub fn synthesize(kind: SynthKind, width: usize, height: usize, seed: u64) -> ColorImage {
    match kind {
        SynthKind::Ramp => ColorImage::gray(&synth::dark_ramp(width, height, seed)),
        SynthKind::LowLight => synth::low_light_texture(width, height, seed),
        SynthKind::Checker => ColorImage::gray(&synth::checkerboard(width, height, 8, 0.05, 0.3)),
    }
}

/// Parses `WxH` (or a single side for a square).
pub fn parse_size(s: &str) -> Result<(usize, usize)> {
    let (w, h) = s.split_once('x').unwrap_or((s, s));
    let w: usize = w.parse().with_context(|| format!("bad width in `{s}`"))?;
    let h: usize = h.parse().with_context(|| format!("bad height in `{s}`"))?;
    ensure!(w > 0 && h > 0, "image size must be non-zero, got `{s}`");
    Ok((w, h))
}

impl std::fmt::Display for InputSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InputSource::File(p) => write!(f, "{}", p.display()),
            InputSource::Synthetic {
                kind,
                width,
                height,
            } => {
                write!(f, "synth:{}:{width}x{height}", kind.name())
            }
        }
    }
}

impl InputSource {
    pub fn parse(s: &str) -> Result<Self> {
        match s.strip_prefix("synth:") {
            Some(rest) => {
                let (kind, size) = rest.split_once(':').ok_or_else(|| {
                    anyhow!("synthetic input must be `synth:<kind>:<W>x<H>`, got `{s}`")
                })?;
                let (width, height) = parse_size(size)?;
                Ok(InputSource::Synthetic {
                    kind: kind.parse()?,
                    width,
                    height,
                })
            }
            None => Ok(InputSource::File(PathBuf::from(s))),
        }
    }

    /// File stem used for output names.
    pub fn stem(&self, seed: u64) -> String {
        match self {
            InputSource::File(p) => p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "image".to_string()),
            InputSource::Synthetic {
                kind,
                width,
                height,
            } => {
                format!("{}_{width}x{height}_s{seed}", kind.name())
            }
        }
    }

    pub fn load(&self, seed: u64) -> Result<ColorImage> {
        match self {
            InputSource::File(p) => {
                let bytes = std::fs::read(p).with_context(|| format!("reading {}", p.display()))?;
                pdelum::raster::load_ppm(&bytes)
                    .with_context(|| format!("decoding {}", p.display()))
            }
            &InputSource::Synthetic {
                kind,
                width,
                height,
            } => Ok(synthesize(kind, width, height, seed)),
        }
    }
}

/// Everything a subcommand needs, validated up front.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub inputs: Vec<InputSource>,
    pub out: PathBuf,
    pub params: EnhanceParams,
    pub stop: StopPolicy,
    pub mode: Mode,
    pub baselines: Vec<Baseline>,
    pub seed: u64,
    /// Square side lengths for `bench`.
    pub sizes: Vec<usize>,
    pub repeats: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            inputs: Vec::new(),
            out: PathBuf::from("out"),
            params: EnhanceParams::default(),
            stop: StopPolicy::default(),
            mode: Mode::Hsi,
            baselines: Baseline::all(),
            seed: 0,
            sizes: vec![128, 256, 512, 1024],
            repeats: 5,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.stop.validate()?;
        for b in &self.baselines {
            b.validate()?;
        }
        ensure!(self.repeats >= 1, "repeats must be >= 1");
        ensure!(
            self.sizes.iter().all(|&s| s >= 2),
            "bench sizes must be >= 2"
        );
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn baseline_parsing() {
        assert_eq!("ghe".parse::<Baseline>().unwrap(), Baseline::GlobalHe);
        assert_eq!(
            "goc:1:0".parse::<Baseline>().unwrap(),
            Baseline::GainOffset {
                gain: 1.0,
                offset: 0.0
            }
        );
        assert_eq!(
            "lcs:2:98".parse::<Baseline>().unwrap(),
            Baseline::Stretch {
                lo_pct: 2.0,
                hi_pct: 98.0
            }
        );
        assert!("ghe:1".parse::<Baseline>().is_err());
        assert!("clahe".parse::<Baseline>().is_err());
        assert!("gamma:x".parse::<Baseline>().is_err());
        assert_eq!(parse_baselines("none").unwrap(), vec![]);
        assert_eq!(parse_baselines("all").unwrap().len(), 5);
        assert_eq!(parse_baselines("ghe,gamma:2").unwrap().len(), 2);
    }

    #[test]
    fn stop_and_mode_parsing() {
        assert_eq!(parse_stop("entropy").unwrap(), StopMode::EntropyPeak);
        assert_eq!(parse_stop("fixed:7").unwrap(), StopMode::FixedIterations(7));
        assert!(parse_stop("fixed:x").is_err());
        assert!(parse_stop("forever").is_err());
        assert_eq!(parse_mode("HSI").unwrap(), Mode::Hsi);
        assert_eq!(parse_mode("rgb").unwrap(), Mode::RgbPerChannel);
        assert!(parse_mode("lab").is_err());
    }

    #[test]
    fn inputs() {
        assert_eq!(
            InputSource::parse("synth:lowlight:64x32").unwrap(),
            InputSource::Synthetic {
                kind: SynthKind::LowLight,
                width: 64,
                height: 32
            }
        );
        assert!(InputSource::parse("synth:lowlight").is_err());
        assert!(InputSource::parse("synth:plasma:8").is_err());
        let f = InputSource::parse("dir/photo.ppm").unwrap();
        assert_eq!(f.stem(0), "photo");
        assert_eq!(
            InputSource::parse("synth:ramp:16").unwrap().stem(3),
            "ramp_16x16_s3"
        );
    }

    #[test]
    fn validation_rejects_bad_flags() {
        let mut cfg = RunConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.params.lambda = 2.0;
        assert!(cfg.validate().is_err());
        let cfg = RunConfig {
            baselines: vec![Baseline::Gamma(-1.0)],
            ..RunConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = RunConfig {
            repeats: 0,
            ..RunConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
