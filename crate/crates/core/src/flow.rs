//! Explicit-Euler evolution of the illumination-correction PDE.
//!
//! With `L = A∗I` the 3×3 box mean, the right-hand side is
//!
//! ```text
//! λ·( w·(I − L) + S^(1−k)·L^k − I ) + β·(I − μ)/max(σ, ε)
//! ```
//!
//! The first term sharpens (reverse diffusion through the high-pass), the
//! power lift brightens and smooths the low-pass part, and the last term is
//! a global contrast stretch around the current mean. `μ` and `σ` are
//! recomputed from the current iterate at every step.

use std::fmt::Write as _;

use crate::error::{param, Error, Result};
use crate::fmt::sig9;
use crate::kernels::{laplacian_4, lowpass};
use crate::metrics::{entropy, moments};
use crate::raster::{rgb_to_hsi, ColorImage, ColorModel, PixelDomain, Raster, ACHROMATIC_EPS};

/// Discrete Laplacian used inside the flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LaplacianKind {
    /// `A∗I − I`; keeps `I + ∇²I` inside `[0, 1]`.
    #[default]
    Averaging,
    /// 4-neighbor stencil; `I + ∇²I` is clamped to `[0, 1]` before the lift.
    FourNeighbor,
}

/// Free parameters of the flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnhanceParams {
    /// Weight of the sharpen/lift bracket, in `(0, 1]`.
    pub lambda: f64,
    /// Weight of the global contrast-stretch term.
    pub beta: f64,
    /// Exponent of the low-pass power lift. `k < 1` brightens, `k > 1` darkens.
    pub k: f64,
    /// Weight of the high-pass term; 1 reproduces the plain flow.
    pub hp_weight: f64,
    /// Euler step size.
    pub dt: f64,
    /// Lower bound on the `σ` divisor.
    pub sigma_floor: f64,
    pub domain: PixelDomain,
    pub laplacian: LaplacianKind,
}

impl Default for EnhanceParams {
    fn default() -> Self {
        Self {
            lambda: 0.5,
            beta: 0.05,
            k: 0.5,
            hp_weight: 1.0,
            dt: 1.0,
            sigma_floor: 1e-6,
            domain: PixelDomain::UNIT,
            laplacian: LaplacianKind::Averaging,
        }
    }
}

impl EnhanceParams {
    pub fn validate(&self) -> Result<()> {
        let finite = |name, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(param(name, format!("must be finite, got {v}")))
            }
        };
        finite("lambda", self.lambda)?;
        finite("beta", self.beta)?;
        finite("k", self.k)?;
        finite("hp_weight", self.hp_weight)?;
        finite("dt", self.dt)?;
        finite("sigma_floor", self.sigma_floor)?;
        if !(self.lambda > 0.0 && self.lambda <= 1.0) {
            return Err(param(
                "lambda",
                format!("must be in (0, 1], got {}", self.lambda),
            ));
        }
        if self.beta < 0.0 {
            return Err(param("beta", format!("must be >= 0, got {}", self.beta)));
        }
        if self.k <= 0.0 {
            return Err(param("k", format!("must be > 0, got {}", self.k)));
        }
        if self.hp_weight < 0.0 {
            return Err(param(
                "hp_weight",
                format!("must be >= 0, got {}", self.hp_weight),
            ));
        }
        if self.dt <= 0.0 {
            return Err(param("dt", format!("must be > 0, got {}", self.dt)));
        }
        if self.lambda * self.dt > 1.0 {
            return Err(param(
                "dt",
                format!("lambda * dt must be <= 1, got {}", self.lambda * self.dt),
            ));
        }
        if self.sigma_floor <= 0.0 {
            return Err(param("sigma_floor", "must be > 0"));
        }
        PixelDomain::new(self.domain.scale())?;
        Ok(())
    }
}

/// When to stop iterating.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopMode {
    /// Stop once entropy has not beaten its running maximum for `patience`
    /// consecutive steps; return the maximum-entropy iterate.
    EntropyPeak,
    /// Run exactly `n` steps and return the last iterate.
    FixedIterations(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StopPolicy {
    pub mode: StopMode,
    pub max_iters: usize,
    pub patience: usize,
}

impl Default for StopPolicy {
    fn default() -> Self {
        Self {
            mode: StopMode::EntropyPeak,
            max_iters: 100,
            patience: 3,
        }
    }
}

impl StopPolicy {
    pub fn fixed(n: usize) -> Self {
        Self {
            mode: StopMode::FixedIterations(n),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(param("max_iters", "must be >= 1"));
        }
        if self.patience == 0 {
            return Err(param("patience", "must be >= 1"));
        }
        Ok(())
    }
}

/// One row of an [`EvolutionTrace`]. `mu` and `sigma` are on the 8-bit scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub iter: usize,
    pub entropy: f64,
    pub mu: f64,
    pub sigma: f64,
    pub energy: f64,
}

/// Per-iteration record of an evolution, starting with the input at
/// iteration 0.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionTrace {
    records: Vec<TraceRecord>,
    chosen_iteration: usize,
}

pub const TRACE_CSV_HEADER: &str = "iter,entropy,mu,sigma,energy";

impl EvolutionTrace {
    pub fn records(&self) -> &[TraceRecord] {
        &self.records
    }

    /// Iteration index of the returned image.
    pub fn chosen_iteration(&self) -> usize {
        self.chosen_iteration
    }

    pub fn chosen(&self) -> &TraceRecord {
        &self.records[self.chosen_iteration]
    }

    /// Number of Euler steps taken.
    pub fn steps(&self) -> usize {
        self.records.len() - 1
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(48 * (self.records.len() + 1));
        out.push_str(TRACE_CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.iter,
                sig9(r.entropy),
                sig9(r.mu),
                sig9(r.sigma),
                sig9(r.energy)
            );
        }
        out
    }

    /// Parses the CSV written by [`EvolutionTrace::to_csv`].
    ///
    /// The file does not carry the chosen iteration; it is reconstructed as
    /// the earliest maximum-entropy row, which is what entropy-peak stopping
    /// returns.
    pub fn from_csv(text: &str) -> Result<Self> {
        let csv_err = |line: usize, message: String| Error::Csv { line, message };
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim_end() == TRACE_CSV_HEADER => {}
            Some((_, h)) => {
                return Err(csv_err(
                    1,
                    format!("expected header `{TRACE_CSV_HEADER}`, got `{h}`"),
                ))
            }
            None => return Err(csv_err(1, "empty trace".into())),
        }
        let mut records = Vec::new();
        for (idx, line) in lines {
            let lineno = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.trim_end().split(',').collect();
            if fields.len() != 5 {
                return Err(csv_err(
                    lineno,
                    format!("expected 5 fields, got {}", fields.len()),
                ));
            }
            let iter = fields[0]
                .parse::<usize>()
                .map_err(|e| csv_err(lineno, format!("bad iter `{}`: {e}", fields[0])))?;
            let mut nums = [0.0; 4];
            for (slot, f) in nums.iter_mut().zip(&fields[1..]) {
                *slot = f
                    .parse::<f64>()
                    .map_err(|e| csv_err(lineno, format!("bad number `{f}`: {e}")))?;
            }
            records.push(TraceRecord {
                iter,
                entropy: nums[0],
                mu: nums[1],
                sigma: nums[2],
                energy: nums[3],
            });
        }
        if records.is_empty() {
            return Err(csv_err(2, "trace has no rows".into()));
        }
        let chosen_iteration = argmax_entropy(&records);
        Ok(Self {
            records,
            chosen_iteration,
        })
    }
}

fn argmax_entropy(records: &[TraceRecord]) -> usize {
    let mut best = 0;
    for (i, r) in records.iter().enumerate() {
        if r.entropy > records[best].entropy {
            best = i;
        }
    }
    best
}

/// `S^(1−k) · x^k`; maps `[0, S]` onto itself, increasing in `x`.
#[inline]
pub fn power_lift(x: f64, k: f64, scale: f64) -> f64 {
    if k == 1.0 {
        x
    } else if scale == 1.0 {
        x.powf(k)
    } else {
        scale.powf(1.0 - k) * x.powf(k)
    }
}

/// Low-pass estimate `I + ∇²I` and high-pass `−∇²I` for the chosen stencil.
fn split(img: &Raster, kind: LaplacianKind) -> (Raster, Raster) {
    match kind {
        LaplacianKind::Averaging => {
            let low = lowpass(img);
            let high = img.zip_map(&low, |v, l| v - l);
            (low, high)
        }
        LaplacianKind::FourNeighbor => {
            let lap = laplacian_4(img);
            let low = img.zip_map(&lap, |v, d| (v + d).clamp(0.0, 1.0));
            (low, lap.map(|d| -d))
        }
    }
}

/// Right-hand side of the flow at `img`, given its mean and standard
/// deviation on the `[0, 1]` scale.
pub fn pde_rhs(img: &Raster, p: &EnhanceParams, mu: f64, sigma: f64) -> Raster {
    let (low, high) = split(img, p.laplacian);
    let scale = p.domain.scale();
    // Exactly uniform images have no contrast to stretch.
    let stretch = if p.beta != 0.0 && !img.is_uniform() {
        Some(p.beta / sigma.max(p.sigma_floor))
    } else {
        None
    };
    let data = img
        .data()
        .iter()
        .zip(low.data())
        .zip(high.data())
        .map(|((&v, &l), &h)| {
            // Grouped so that k = 1, w = 1 cancels exactly: h + (l − v) = 0.
            let bracket = p.hp_weight * h + (power_lift(l, p.k, scale) - v);
            let mut r = p.lambda * bracket;
            if let Some(s) = stretch {
                r += s * (v - mu);
            }
            r
        })
        .collect();
    Raster::from_parts(img.width(), img.height(), data)
}

fn unit_moments(img: &Raster) -> (f64, f64) {
    moments(img.data().iter().copied())
}

fn rhs_at(img: &Raster, p: &EnhanceParams) -> Raster {
    let (mu, sigma) = unit_moments(img);
    pde_rhs(img, p, mu, sigma)
}

fn euler(img: &Raster, rhs: &Raster, dt: f64) -> Raster {
    img.zip_map(rhs, |v, r| (v + dt * r).clamp(0.0, 1.0))
}

fn mean(r: &Raster) -> f64 {
    r.data().iter().sum::<f64>() / r.len() as f64
}

/// One explicit Euler step, clamped to `[0, 1]`.
pub fn pde_step(img: &Raster, p: &EnhanceParams) -> Raster {
    euler(img, &rhs_at(img, p), p.dt)
}

/// Pixel average of the flow's integrand (the right-hand side). Recorded in
/// traces; not used for control.
pub fn energy(img: &Raster, p: &EnhanceParams) -> f64 {
    mean(&rhs_at(img, p))
}

/// How a color image is fed through the flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Evolve only the HSI intensity plane; hue and saturation are kept.
    #[default]
    Hsi,
    /// Evolve R, G and B independently with a joint stop on the mean intensity.
    RgbPerChannel,
}

struct Channel {
    plane: Raster,
    rhs: Raster,
}

impl Channel {
    fn new(plane: Raster, p: &EnhanceParams) -> Self {
        let rhs = rhs_at(&plane, p);
        Self { plane, rhs }
    }

    fn advance(&self, p: &EnhanceParams) -> Self {
        Self::new(euler(&self.plane, &self.rhs, p.dt), p)
    }
}

fn record(iter: usize, channels: &[Channel]) -> TraceRecord {
    let energy = channels.iter().map(|c| mean(&c.rhs)).sum::<f64>() / channels.len() as f64;
    let summarize = |plane: &Raster| {
        let (mu, sigma) = moments(plane.data().iter().map(|&v| 255.0 * v));
        TraceRecord {
            iter,
            entropy: entropy(plane),
            mu,
            sigma,
            energy,
        }
    };
    match channels {
        [single] => summarize(&single.plane),
        _ => summarize(&channel_mean(channels.iter().map(|c| &c.plane))),
    }
}

fn channel_mean<'a>(planes: impl Iterator<Item = &'a Raster>) -> Raster {
    let planes: Vec<&Raster> = planes.collect();
    let n = planes.len() as f64;
    let data = (0..planes[0].len())
        .map(|i| planes.iter().map(|p| p.data()[i]).sum::<f64>() / n)
        .collect();
    Raster::from_parts(planes[0].width(), planes[0].height(), data)
}

/// Shared driver: steps every channel in lockstep and decides when to stop
/// from the joint intensity.
fn run(
    planes: Vec<Raster>,
    p: &EnhanceParams,
    stop: &StopPolicy,
) -> Result<(Vec<Raster>, EvolutionTrace)> {
    p.validate()?;
    stop.validate()?;
    let mut channels: Vec<Channel> = planes.into_iter().map(|pl| Channel::new(pl, p)).collect();
    let mut records = vec![record(0, &channels)];

    let steps = match stop.mode {
        StopMode::FixedIterations(n) => n,
        StopMode::EntropyPeak => stop.max_iters,
    };
    let mut best: Option<Vec<Raster>> = None;
    let mut best_iter = 0;
    let mut stale = 0;
    for t in 1..=steps {
        channels = channels.iter().map(|c| c.advance(p)).collect();
        let rec = record(t, &channels);
        records.push(rec);
        if let StopMode::EntropyPeak = stop.mode {
            if rec.entropy > records[best_iter].entropy {
                best_iter = t;
                best = Some(channels.iter().map(|c| c.plane.clone()).collect());
                stale = 0;
            } else {
                stale += 1;
                if stale >= stop.patience {
                    break;
                }
            }
        }
    }

    let (planes, chosen_iteration) = match stop.mode {
        StopMode::FixedIterations(n) => (channels.into_iter().map(|c| c.plane).collect(), n),
        StopMode::EntropyPeak => match best {
            Some(b) => (b, best_iter),
            None => (Vec::new(), 0),
        },
    };
    Ok((
        planes,
        EvolutionTrace {
            records,
            chosen_iteration,
        },
    ))
}

/// Evolves a single plane under `stop`, returning the chosen iterate and
/// the full trace.
pub fn evolve(
    img: &Raster,
    p: &EnhanceParams,
    stop: &StopPolicy,
) -> Result<(Raster, EvolutionTrace)> {
    let (mut planes, trace) = run(vec![img.clone()], p, stop)?;
    let out = planes.pop().unwrap_or_else(|| img.clone());
    Ok((out, trace))
}

/// Rebuilds RGB from the original pixels and a new intensity plane with hue
/// and saturation unchanged.
///
/// Scaling a pixel by `I_new / I_old` is the HSI round trip with `H` and `S`
/// held fixed. Pixels that leave the gamut are pulled toward gray
/// `(I_new, I_new, I_new)` along their chroma direction, which keeps the hue.
pub(crate) fn reapply_intensity(img: &ColorImage, old: &Raster, new: &Raster) -> ColorImage {
    let n = img.width() * img.height();
    let mut planes = [
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    ];
    for i in 0..n {
        let rgb = img.pixel(i);
        let (io, inew) = (old.data()[i], new.data()[i]);
        let out = if 3.0 * io < ACHROMATIC_EPS || (rgb[0] == rgb[1] && rgb[1] == rgb[2]) {
            [inew; 3]
        } else {
            let gain = inew / io;
            let scaled = rgb.map(|v| v * gain);
            let max = scaled[0].max(scaled[1]).max(scaled[2]);
            if max > 1.0 {
                let t = (1.0 - inew) / (max - inew);
                scaled.map(|v| (inew + t * (v - inew)).clamp(0.0, 1.0))
            } else {
                scaled
            }
        };
        for (plane, v) in planes.iter_mut().zip(out) {
            plane.push(v);
        }
    }
    let [r, g, b] = planes;
    let (w, h) = (img.width(), img.height());
    ColorImage::new(
        ColorModel::Rgb,
        [
            Raster::from_parts(w, h, r),
            Raster::from_parts(w, h, g),
            Raster::from_parts(w, h, b),
        ],
    )
    .expect("planes share dimensions")
}

/// Enhances an RGB image, either through its HSI intensity or per channel.
pub fn enhance_color(
    img: &ColorImage,
    p: &EnhanceParams,
    stop: &StopPolicy,
    mode: Mode,
) -> Result<(ColorImage, EvolutionTrace)> {
    let hsi = rgb_to_hsi(img)?;
    match mode {
        Mode::Hsi => {
            let intensity = hsi.plane(2);
            let (out, trace) = evolve(intensity, p, stop)?;
            Ok((reapply_intensity(img, intensity, &out), trace))
        }
        Mode::RgbPerChannel => {
            let (planes, trace) = run(img.planes().to_vec(), p, stop)?;
            let out = match <[Raster; 3]>::try_from(planes) {
                Ok(planes) => ColorImage::new(ColorModel::Rgb, planes)?,
                Err(_) => img.clone(),
            };
            Ok((out, trace))
        }
    }
}
