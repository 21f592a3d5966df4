//! No-reference quality metrics and output/input ratios.
//!
//! Everything is computed on the 8-bit scale (`255·v`) so that magnitudes
//! line up with the usual reporting conventions: mean and deviation in
//! `[0, 255]`, entropy in bits over 256 bins, gradients in 8-bit steps.
//! Reductions run sequentially in pixel order.

use crate::error::{Error, Result};
use crate::fmt::sig9;
use crate::raster::{hue_degrees, rgb_to_hsi, ColorImage, ColorModel, Raster};

/// Mean and population standard deviation, two-pass.
pub(crate) fn moments<I>(values: I) -> (f64, f64)
where
    I: Iterator<Item = f64> + Clone,
{
    let (sum, n) = values
        .clone()
        .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    let mean = sum / n as f64;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    (mean, var.sqrt())
}

#[inline]
fn bin(v: f64) -> usize {
    (v * 255.0 + 0.5).floor().clamp(0.0, 255.0) as usize
}

pub(crate) fn histogram(img: &Raster) -> [usize; 256] {
    let mut hist = [0usize; 256];
    for &v in img.data() {
        hist[bin(v)] += 1;
    }
    hist
}

/// Shannon entropy in bits of the 256-bin histogram (`bin = ⌊255·v + ½⌋`).
pub fn entropy(img: &Raster) -> f64 {
    let n = img.len() as f64;
    let h: f64 = histogram(img)
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            p * p.log2()
        })
        .sum();
    // -0.0 for a single occupied bin.
    (-h).max(0.0)
}

/// `(μ, σ)` of `255·v`, population standard deviation.
pub fn mean_std(img: &Raster) -> (f64, f64) {
    moments(img.data().iter().map(|&v| 255.0 * v))
}

/// Mean of `sqrt((Δx² + Δy²)/2)` over forward differences on the
/// `(W−1)×(H−1)` grid, 8-bit units.
pub fn avg_gradient(img: &Raster) -> Result<f64> {
    let (w, h) = (img.width(), img.height());
    if w < 2 || h < 2 {
        return Err(Error::Dimensions {
            width: w,
            height: h,
            reason: "average gradient needs at least 2x2 pixels",
        });
    }
    let mut sum = 0.0;
    for y in 0..h - 1 {
        let (row, below) = (img.row(y), img.row(y + 1));
        for x in 0..w - 1 {
            let dx = 255.0 * (row[x + 1] - row[x]);
            let dy = 255.0 * (below[x] - row[x]);
            sum += ((dx * dx + dy * dy) / 2.0).sqrt();
        }
    }
    Ok(sum / ((w - 1) * (h - 1)) as f64)
}

/// Hasler–Süsstrunk colourfulness on 8-bit channels.
pub fn colourfulness(img: &ColorImage) -> Result<f64> {
    img.require(ColorModel::Rgb)?;
    let [r, g, b] = img.planes();
    let (r, g, b) = (r.data(), g.data(), b.data());
    let rg = (0..r.len()).map(|i| 255.0 * (r[i] - g[i]));
    let yb = (0..r.len()).map(|i| 255.0 * (0.5 * (r[i] + g[i]) - b[i]));
    let (mu_rg, sd_rg) = moments(rg);
    let (mu_yb, sd_yb) = moments(yb);
    Ok((sd_rg * sd_rg + sd_yb * sd_yb).sqrt() + 0.3 * (mu_rg * mu_rg + mu_yb * mu_yb).sqrt())
}

/// Block size of the EME partition.
pub const EME_BLOCK: usize = 8;

/// Measure of enhancement over `8×8` blocks (edge blocks may be smaller):
/// mean of `20·log10((max + 1)/(min + 1))` on the 8-bit scale.
pub fn emec(img: &Raster) -> f64 {
    let (w, h) = (img.width(), img.height());
    let mut sum = 0.0;
    let mut blocks = 0usize;
    for by in (0..h).step_by(EME_BLOCK) {
        for bx in (0..w).step_by(EME_BLOCK) {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for y in by..(by + EME_BLOCK).min(h) {
                for &v in &img.row(y)[bx..(bx + EME_BLOCK).min(w)] {
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
            }
            sum += 20.0 * ((255.0 * hi + 1.0) / (255.0 * lo + 1.0)).log10();
            blocks += 1;
        }
    }
    sum / blocks as f64
}

/// Saturation below which a pixel's hue is ignored.
pub const HUE_SATURATION_FLOOR: f64 = 1e-6;

/// Mean wrap-aware hue difference in degrees, `[0, 180]`. Pixels that are
/// achromatic in either image contribute 0.
pub fn hue_deviation(a: &ColorImage, b: &ColorImage) -> Result<f64> {
    a.check_same_dims(b)?;
    let ha = rgb_to_hsi(a)?;
    let hb = rgb_to_hsi(b)?;
    let n = a.width() * a.height();
    let mut sum = 0.0;
    for i in 0..n {
        let (pa, pb) = (ha.pixel(i), hb.pixel(i));
        if pa[1] < HUE_SATURATION_FLOOR || pb[1] < HUE_SATURATION_FLOOR {
            continue;
        }
        let d = (pa[0] - pb[0]).abs();
        sum += d.min(360.0 - d);
    }
    Ok(sum / n as f64)
}

/// Hue of an RGB triple, re-exported for callers comparing single pixels.
pub fn pixel_hue(rgb: [f64; 3]) -> f64 {
    hue_degrees(rgb[0], rgb[1], rgb[2])
}

/// Parameters `(α, β, γ1, γ2, γ3)` of the blockiness/activity quality model.
pub const PQM_COEFFS: [f64; 5] = [-245.9, 261.9, -0.0240, 0.0160, 0.0064];
/// Floor applied to B, A and Z before exponentiation.
pub const PQM_FLOOR: f64 = 1e-3;

/// Blockiness, activity and zero-crossing rate along rows of `x`
/// (`rows × cols`, row-major, 8-bit scale).
fn pqm_features(x: &[f64], rows: usize, cols: usize) -> (f64, f64, f64) {
    let d = |m: usize, n: usize| x[m * cols + n + 1] - x[m * cols + n];
    let blocks = cols / 8 - 1;

    let mut boundary = 0.0;
    let mut all = 0.0;
    let mut crossings = 0usize;
    for m in 0..rows {
        for j in 1..=blocks {
            boundary += d(m, 8 * j - 1).abs();
        }
        for n in 0..cols - 1 {
            all += d(m, n).abs();
        }
        for n in 0..cols - 2 {
            if d(m, n) * d(m, n + 1) < 0.0 {
                crossings += 1;
            }
        }
    }
    let b = boundary / (rows * blocks) as f64;
    let a = (8.0 * all / (rows * (cols - 1)) as f64 - b) / 7.0;
    let z = crossings as f64 / (rows * (cols - 2)) as f64;
    (b, a, z)
}

/// No-reference blockiness/activity quality score; 10 is nominally ideal.
///
/// Features are averaged over the horizontal and vertical directions and
/// floored at [`PQM_FLOOR`], so flat images still give a finite score.
pub fn pqm(img: &Raster) -> Result<f64> {
    let (w, h) = (img.width(), img.height());
    if w < 16 || h < 16 {
        return Err(Error::Dimensions {
            width: w,
            height: h,
            reason: "quality score needs at least 16x16 pixels",
        });
    }
    let scaled: Vec<f64> = img.data().iter().map(|&v| 255.0 * v).collect();
    let mut transposed = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            transposed[x * h + y] = scaled[y * w + x];
        }
    }
    let (bh, ah, zh) = pqm_features(&scaled, h, w);
    let (bv, av, zv) = pqm_features(&transposed, w, h);
    let b = ((bh + bv) / 2.0).max(PQM_FLOOR);
    let a = ((ah + av) / 2.0).max(PQM_FLOOR);
    let z = ((zh + zv) / 2.0).max(PQM_FLOOR);
    let [alpha, beta, g1, g2, g3] = PQM_COEFFS;
    Ok(alpha + beta * b.powf(g1) * a.powf(g2) * z.powf(g3))
}

/// Metrics of a single image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbsoluteMetrics {
    pub colourfulness: f64,
    pub mu: f64,
    pub sigma: f64,
    pub entropy: f64,
    /// `None` when the image is narrower or shorter than 2 pixels.
    pub avg_gradient: Option<f64>,
    pub emec: f64,
}

impl AbsoluteMetrics {
    /// Measures an RGB image; gray-level metrics use its HSI intensity.
    pub fn measure(img: &ColorImage) -> Result<Self> {
        let intensity = rgb_to_hsi(img)?.into_planes()[2].clone();
        let (mu, sigma) = mean_std(&intensity);
        Ok(Self {
            colourfulness: colourfulness(img)?,
            mu,
            sigma,
            entropy: entropy(&intensity),
            avg_gradient: avg_gradient(&intensity).ok(),
            emec: emec(&intensity),
        })
    }
}

/// Output-over-input ratios. `None` marks an undefined ratio (zero or
/// missing denominator).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeMetrics {
    pub cef: Option<f64>,
    pub rm: Option<f64>,
    pub rsd: Option<f64>,
    pub re: Option<f64>,
    pub rag: Option<f64>,
    /// Hue deviation in degrees.
    pub hdi: f64,
    /// Quality score of the output intensity; `None` below 16×16.
    pub pqm: Option<f64>,
    pub remec: Option<f64>,
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den != 0.0).then(|| num / den)
}

fn ratio_opt(num: Option<f64>, den: Option<f64>) -> Option<f64> {
    ratio(num?, den?)
}

/// Compares an enhanced image with its input.
pub fn relative_report(input: &ColorImage, output: &ColorImage) -> Result<RelativeMetrics> {
    input.check_same_dims(output)?;
    let a = AbsoluteMetrics::measure(input)?;
    let b = AbsoluteMetrics::measure(output)?;
    let out_intensity = rgb_to_hsi(output)?.into_planes()[2].clone();
    Ok(RelativeMetrics {
        cef: ratio(b.colourfulness, a.colourfulness),
        rm: ratio(b.mu, a.mu),
        rsd: ratio(b.sigma, a.sigma),
        re: ratio(b.entropy, a.entropy),
        rag: ratio_opt(b.avg_gradient, a.avg_gradient),
        hdi: hue_deviation(input, output)?,
        pqm: pqm(&out_intensity).ok(),
        remec: ratio(b.emec, a.emec),
    })
}

/// Header of the per-algorithm comparison CSV.
pub const METRICS_CSV_HEADER: &str = "algo,RC,PQM,RM,RSD,RE,RAG,HDI,REMEC";

/// One named row of a comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub algo: String,
    pub absolute: AbsoluteMetrics,
    pub relative: RelativeMetrics,
}

impl MetricsReport {
    pub fn new(algo: impl Into<String>, input: &ColorImage, output: &ColorImage) -> Result<Self> {
        Ok(Self {
            algo: algo.into(),
            absolute: AbsoluteMetrics::measure(output)?,
            relative: relative_report(input, output)?,
        })
    }

    /// CSV row matching [`METRICS_CSV_HEADER`]; undefined cells are empty.
    pub fn csv_row(&self) -> String {
        let cell = |v: Option<f64>| v.map(sig9).unwrap_or_default();
        let r = &self.relative;
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.algo,
            cell(r.cef),
            cell(r.pqm),
            cell(r.rm),
            cell(r.rsd),
            cell(r.re),
            cell(r.rag),
            sig9(r.hdi),
            cell(r.remec)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn entropy_cases() {
        assert_eq!(entropy(&Raster::filled(5, 5, 0.3)), 0.0);
        let half = Raster::from_fn(4, 4, |x, _| if x < 2 { 0.0 } else { 1.0 });
        assert_eq!(entropy(&half), 1.0);
        let uniform = Raster::from_fn(256, 3, |x, _| x as f64 / 255.0);
        assert_eq!(entropy(&uniform), 8.0);
    }

    #[test]
    fn entropy_is_permutation_invariant_but_gradient_is_not() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let img = Raster::from_fn(16, 16, |_, _| rng.gen::<f64>());
        let mut data = img.data().to_vec();
        data.shuffle(&mut rng);
        let shuffled = Raster::new(16, 16, data).unwrap();
        assert_eq!(entropy(&img), entropy(&shuffled));

        let ramp = synth::gamma_ramp(16, 16, 1.0);
        let mut data = ramp.data().to_vec();
        data.shuffle(&mut rng);
        let scrambled = Raster::new(16, 16, data).unwrap();
        assert!(avg_gradient(&scrambled).unwrap() > avg_gradient(&ramp).unwrap());
    }

    #[test]
    fn mean_std_cases() {
        assert_eq!(mean_std(&Raster::filled(3, 3, 0.5)), (127.5, 0.0));
        let half = Raster::from_fn(4, 4, |x, _| if x < 2 { 0.0 } else { 1.0 });
        assert_eq!(mean_std(&half), (127.5, 127.5));
        assert_eq!(mean_std(&Raster::filled(1, 1, 0.2)), (255.0 * 0.2, 0.0));
    }

    #[test]
    fn gradient_closed_forms() {
        assert_eq!(avg_gradient(&Raster::filled(5, 4, 0.7)).unwrap(), 0.0);
        let d = 3.0;
        let ramp = Raster::from_fn(20, 6, |x, _| x as f64 * d / 255.0);
        assert!((avg_gradient(&ramp).unwrap() - d / 2f64.sqrt()).abs() < 1e-9);
        let diag = Raster::from_fn(20, 20, |x, y| (x + y) as f64 * d / 255.0);
        assert!((avg_gradient(&diag).unwrap() - d).abs() < 1e-9);
        assert!(avg_gradient(&Raster::filled(1, 5, 0.0)).is_err());
    }

    #[test]
    fn colourfulness_cases() {
        let gray = ColorImage::gray(&synth::gamma_ramp(10, 10, 1.0));
        assert_eq!(colourfulness(&gray).unwrap(), 0.0);
        let red = ColorImage::filled_rgb(4, 4, [1.0, 0.0, 0.0]);
        let expected = 0.3 * (255.0f64 * 255.0 + 127.5 * 127.5).sqrt();
        assert!((colourfulness(&red).unwrap() - expected).abs() < 1e-9);
        assert!((colourfulness(&red).unwrap() - 85.53).abs() < 0.01);
        assert_eq!(
            colourfulness(&ColorImage::filled_rgb(3, 3, [0.0; 3])).unwrap(),
            0.0
        );
    }

    #[test]
    fn colourfulness_is_permutation_invariant() {
        let img = synth::low_light_texture(8, 8, 2);
        let mut idx: Vec<usize> = (0..64).collect();
        idx.reverse();
        let planes = img
            .planes()
            .clone()
            .map(|p| Raster::new(8, 8, idx.iter().map(|&i| p.data()[i]).collect()).unwrap());
        let flipped = ColorImage::new(ColorModel::Rgb, planes).unwrap();
        let (a, b) = (
            colourfulness(&img).unwrap(),
            colourfulness(&flipped).unwrap(),
        );
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn emec_cases() {
        assert_eq!(emec(&Raster::filled(20, 13, 0.4)), 0.0);
        let block = Raster::from_fn(
            8,
            8,
            |x, _| if x == 0 { 50.0 / 255.0 } else { 200.0 / 255.0 },
        );
        let expected = 20.0 * (201.0f64 / 51.0).log10();
        assert!((emec(&block) - expected).abs() < 1e-9);
        assert!((expected - 11.91).abs() < 0.01);
        let small = Raster::from_fn(
            3,
            2,
            |x, _| if x == 0 { 50.0 / 255.0 } else { 200.0 / 255.0 },
        );
        assert!((emec(&small) - expected).abs() < 1e-9);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let noisy = Raster::from_fn(19, 11, |_, _| rng.gen::<f64>());
        assert!(emec(&noisy) >= 0.0);
    }

    #[test]
    fn hue_deviation_cases() {
        let img = synth::low_light_texture(8, 8, 5);
        assert_eq!(hue_deviation(&img, &img).unwrap(), 0.0);
        let red = ColorImage::filled_rgb(2, 2, [1.0, 0.0, 0.0]);
        let green = ColorImage::filled_rgb(2, 2, [0.0, 1.0, 0.0]);
        assert!((hue_deviation(&red, &green).unwrap() - 120.0).abs() < 1e-9);
        let gray = ColorImage::filled_rgb(2, 2, [0.4; 3]);
        assert_eq!(hue_deviation(&gray, &red).unwrap(), 0.0);
        let other = synth::low_light_texture(8, 8, 6);
        assert_eq!(
            hue_deviation(&img, &other).unwrap(),
            hue_deviation(&other, &img).unwrap()
        );
        let wrong = ColorImage::filled_rgb(3, 2, [0.0; 3]);
        assert!(hue_deviation(&red, &wrong).is_err());
        // 350° vs 10° is 20° apart, not 340°.
        let a = ColorImage::filled_rgb(1, 1, [1.0, 0.0, 0.1736]);
        let b = ColorImage::filled_rgb(1, 1, [1.0, 0.1736, 0.0]);
        assert!(hue_deviation(&a, &b).unwrap() < 25.0);
    }

    #[test]
    fn pqm_behaviour() {
        let flat = pqm(&Raster::filled(16, 16, 0.5)).unwrap();
        assert!(flat.is_finite());
        assert!(pqm(&Raster::filled(15, 16, 0.5)).is_err());
        for seed in 0..5 {
            let img = synth::textured_scene(96, 96, seed, 2.5);
            let intensity = rgb_to_hsi(&img).unwrap().into_planes()[2].clone();
            let s = pqm(&intensity).unwrap();
            assert_eq!(s, pqm(&intensity).unwrap());
            assert!((7.0..=12.0).contains(&s), "seed {seed}: pqm {s}");
        }
    }

    #[test]
    fn pqm_sees_block_edges() {
        // Piecewise-constant 8x8 blocks: all activity sits on block boundaries.
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let levels: Vec<f64> = (0..64).map(|_| rng.gen::<f64>()).collect();
        let blocky = Raster::from_fn(64, 64, |x, y| levels[(y / 8) * 8 + x / 8]);
        let smooth = Raster::from_fn(64, 64, |x, y| (x + y) as f64 / 126.0);
        assert!(pqm(&blocky).unwrap() < pqm(&smooth).unwrap());
    }

    #[test]
    fn identity_ratios() {
        let img = synth::low_light_texture(24, 20, 9);
        let r = relative_report(&img, &img).unwrap();
        for v in [r.cef, r.rm, r.rsd, r.re, r.rag, r.remec] {
            assert!((v.unwrap() - 1.0).abs() <= 1e-9);
        }
        assert_eq!(r.hdi, 0.0);
        assert!(r.pqm.is_some());
    }

    #[test]
    fn zero_denominators_are_undefined() {
        let gray = ColorImage::gray(&synth::gamma_ramp(20, 20, 2.0));
        let colorful = synth::low_light_texture(20, 20, 1);
        let r = relative_report(&gray, &colorful).unwrap();
        assert_eq!(r.cef, None);
        let row = MetricsReport::new("x", &gray, &colorful).unwrap().csv_row();
        assert!(row.starts_with("x,,"), "{row}");
        assert_eq!(
            row.split(',').count(),
            METRICS_CSV_HEADER.split(',').count()
        );
    }
}
