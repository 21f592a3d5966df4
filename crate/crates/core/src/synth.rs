//! Seeded synthetic test images.
//!
//! All generators quantize to multiples of 1/255 so their output survives a
//! PPM round trip unchanged.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::raster::{ColorImage, ColorModel, Raster};

fn quantize(v: f64) -> f64 {
    (v.clamp(0.0, 1.0) * 255.0).round() / 255.0
}

/// Horizontal ramp `u ∈ [0, 1]` darkened to `u^gamma`.
pub fn gamma_ramp(width: usize, height: usize, gamma: f64) -> Raster {
    let span = (width.max(2) - 1) as f64;
    Raster::from_fn(width, height, |x, _| {
        quantize((x as f64 / span).powf(gamma))
    })
}

/// Gamma-darkened ramp (`u²`) with a little seeded noise, the reference
/// dark gray-level scene.
pub fn dark_ramp(width: usize, height: usize, seed: u64) -> Raster {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let span = (width.max(2) - 1) as f64;
    Raster::from_fn(width, height, |x, _| {
        let u = x as f64 / span;
        quantize(u * u + rng.gen_range(-2.0..2.0) / 255.0)
    })
}

/// Two-level checkerboard with square cells of `cell` pixels.
pub fn checkerboard(width: usize, height: usize, cell: usize, lo: f64, hi: f64) -> Raster {
    let cell = cell.max(1);
    Raster::from_fn(width, height, |x, y| {
        quantize(if (x / cell + y / cell).is_multiple_of(2) {
            lo
        } else {
            hi
        })
    })
}

/// Bilinear value noise on a lattice of `spacing` pixels.
struct ValueNoise {
    lattice: Vec<f64>,
    cols: usize,
    spacing: f64,
}

impl ValueNoise {
    fn new(
        rng: &mut ChaCha8Rng,
        width: usize,
        height: usize,
        spacing: usize,
        lo: f64,
        hi: f64,
    ) -> Self {
        let cols = width / spacing + 2;
        let rows = height / spacing + 2;
        Self {
            lattice: (0..cols * rows).map(|_| rng.gen_range(lo..hi)).collect(),
            cols,
            spacing: spacing as f64,
        }
    }

    fn at(&self, x: usize, y: usize) -> f64 {
        let fx = x as f64 / self.spacing;
        let fy = y as f64 / self.spacing;
        let (ix, iy) = (fx as usize, fy as usize);
        let (tx, ty) = (fx - ix as f64, fy - iy as f64);
        let l = |cx: usize, cy: usize| self.lattice[cy * self.cols + cx];
        let top = l(ix, iy) * (1.0 - tx) + l(ix + 1, iy) * tx;
        let bottom = l(ix, iy + 1) * (1.0 - tx) + l(ix + 1, iy + 1) * tx;
        top * (1.0 - ty) + bottom * ty
    }
}

/// Colored low-light scene: smooth random reflectance under a dim, uneven
/// light falling off from a random point, plus sensor noise.
pub fn low_light_texture(width: usize, height: usize, seed: u64) -> ColorImage {
    textured_scene(width, height, seed, 1.0)
}

/// The scene behind [`low_light_texture`] with its light multiplied by
/// `exposure`; around 2.5 gives a normally exposed image.
pub fn textured_scene(width: usize, height: usize, seed: u64, exposure: f64) -> ColorImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spacing = (width.min(height) / 6).clamp(2, 24);
    let reflectance: Vec<ValueNoise> = (0..3)
        .map(|_| ValueNoise::new(&mut rng, width, height, spacing, 0.15, 1.0))
        .collect();
    let detail = ValueNoise::new(&mut rng, width, height, 3, 0.9, 1.1);
    let cx = rng.gen_range(0.0..1.0) * width as f64;
    let cy = rng.gen_range(0.0..1.0) * height as f64;
    let reach = 0.6 * (width.max(height) as f64);
    let peak = rng.gen_range(0.30..0.45);

    let n = width * height;
    let mut planes = [
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    ];
    for y in 0..height {
        for x in 0..width {
            let d = ((x as f64 - cx).powi(2) + (y as f64 - cy).powi(2)).sqrt() / reach;
            let light = exposure * (0.04 + peak * (-d * d).exp());
            let grain = detail.at(x, y);
            for (plane, refl) in planes.iter_mut().zip(&reflectance) {
                let noise = rng.gen_range(-0.75..0.75) / 255.0;
                plane.push(quantize(refl.at(x, y) * grain * light + noise));
            }
        }
    }
    let [r, g, b] = planes;
    let plane = |d| Raster::new(width, height, d).expect("generator produces full planes");
    ColorImage::new(ColorModel::Rgb, [plane(r), plane(g), plane(b)])
        .expect("planes share dimensions")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::mean_std;
    use crate::raster::{load_ppm, rgb_to_hsi, save_ppm};

    #[test]
    fn generators_are_deterministic_and_quantized() {
        let a = low_light_texture(40, 30, 5);
        assert_eq!(a, low_light_texture(40, 30, 5));
        assert_ne!(a, low_light_texture(40, 30, 6));
        assert_eq!(load_ppm(&save_ppm(&a).unwrap()).unwrap(), a);
        assert_eq!(dark_ramp(20, 4, 1), dark_ramp(20, 4, 1));
        for p in a.planes() {
            assert!(p
                .data()
                .iter()
                .all(|&v| (v * 255.0 - (v * 255.0).round()).abs() < 1e-9));
        }
    }

    #[test]
    fn low_light_is_dark() {
        for seed in 0..5 {
            let img = low_light_texture(64, 64, seed);
            let (mu, _) = mean_std(&rgb_to_hsi(&img).unwrap().into_planes()[2]);
            assert!(mu < 80.0, "seed {seed}: mean {mu}");
        }
    }

    #[test]
    fn ramp_shapes() {
        let r = gamma_ramp(5, 2, 2.0);
        assert_eq!(r.get(0, 1), 0.0);
        assert_eq!(r.get(4, 0), 1.0);
        assert_eq!(r.get(2, 0), (0.25f64 * 255.0).round() / 255.0);
        assert_eq!(gamma_ramp(1, 1, 2.0).data(), &[0.0]);
        let c = checkerboard(4, 4, 2, 0.0, 1.0);
        assert_eq!(c.get(0, 0), 0.0);
        assert_eq!(c.get(2, 0), 1.0);
        assert_eq!(c.get(2, 2), 0.0);
    }
}
