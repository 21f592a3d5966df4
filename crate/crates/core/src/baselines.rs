//! Classical closed-form enhancers used as comparison rows.
//!
//! All operators take and return `[0, 1]` rasters of unchanged shape. For
//! color images they are applied to the HSI intensity through
//! [`on_intensity`], the same way the PDE enhancer's HSI mode works.

use crate::error::{param, Result};
use crate::flow::reapply_intensity;
use crate::kernels::lowpass;
use crate::metrics::histogram;
use crate::raster::{rgb_to_hsi, ColorImage, Raster};

/// Global histogram equalization over 256 bins.
///
/// Each bin maps to `(cdf − cdf_min)/(1 − cdf_min)`, where `cdf_min` is the
/// smallest non-zero cumulative frequency. A constant image maps to 0.
pub fn global_he(img: &Raster) -> Raster {
    let hist = histogram(img);
    let n = img.len() as f64;
    let mut lut = [0.0; 256];
    let mut running = 0usize;
    let mut cdf_min = None;
    for (b, &count) in hist.iter().enumerate() {
        running += count;
        let cdf = running as f64 / n;
        if count > 0 && cdf_min.is_none() {
            cdf_min = Some(cdf);
        }
        let lo = cdf_min.unwrap_or(0.0);
        lut[b] = if lo < 1.0 {
            ((cdf - lo) / (1.0 - lo)).clamp(0.0, 1.0)
        } else {
            0.0
        };
    }
    img.map(|v| lut[(v * 255.0 + 0.5).floor().clamp(0.0, 255.0) as usize])
}

/// Linearly interpolated percentile of sorted samples, `pct` in `[0, 100]`.
fn percentile(sorted: &[f64], pct: f64) -> f64 {
    let pos = pct / 100.0 * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Clips at the `lo_pct`/`hi_pct` percentiles and maps that range affinely
/// onto `[0, 1]`. `(0, 100)` is a min–max stretch. Images with a zero
/// percentile range are returned unchanged.
pub fn linear_stretch(img: &Raster, lo_pct: f64, hi_pct: f64) -> Result<Raster> {
    if !(0.0..100.0).contains(&lo_pct) || !(lo_pct < hi_pct && hi_pct <= 100.0) {
        return Err(param(
            "percentiles",
            format!("need 0 <= lo < hi <= 100, got ({lo_pct}, {hi_pct})"),
        ));
    }
    let mut sorted = img.data().to_vec();
    sorted.sort_by(f64::total_cmp);
    let lo = percentile(&sorted, lo_pct);
    let hi = percentile(&sorted, hi_pct);
    if hi - lo <= 0.0 {
        return Ok(img.clone());
    }
    let span = hi - lo;
    Ok(img.map(|v| ((v - lo) / span).clamp(0.0, 1.0)))
}

/// `clamp(gain·v + offset, 0, 1)`.
pub fn gain_offset(img: &Raster, gain: f64, offset: f64) -> Raster {
    img.map(|v| (gain * v + offset).clamp(0.0, 1.0))
}

/// `v^g`.
pub fn gamma_correct(img: &Raster, g: f64) -> Result<Raster> {
    if !(g > 0.0 && g.is_finite()) {
        return Err(param("gamma", format!("must be finite and > 0, got {g}")));
    }
    Ok(img.map(|v| if g == 1.0 { v } else { v.powf(g) }))
}

/// Spatial homomorphic filter: split `ln(1 + 255·v)` into box-mean
/// illumination and detail, weight them by `gamma_l` and `gamma_h`, and
/// exponentiate back.
pub fn spatial_homomorphic(img: &Raster, gamma_h: f64, gamma_l: f64) -> Result<Raster> {
    for (name, g) in [("gamma_h", gamma_h), ("gamma_l", gamma_l)] {
        if !(g > 0.0 && g.is_finite()) {
            return Err(param(name, format!("must be finite and > 0, got {g}")));
        }
    }
    let log = img.map(|v| (255.0 * v).ln_1p());
    let illum = lowpass(&log);
    Ok(log.zip_map(&illum, |z, l| {
        let z = gamma_h * (z - l) + gamma_l * l;
        (z.exp_m1() / 255.0).clamp(0.0, 1.0)
    }))
}

/// Applies a gray-level operator to the HSI intensity of an RGB image,
/// keeping hue and saturation.
pub fn on_intensity(
    img: &ColorImage,
    op: impl FnOnce(&Raster) -> Result<Raster>,
) -> Result<ColorImage> {
    let intensity = rgb_to_hsi(img)?.into_planes()[2].clone();
    let out = op(&intensity)?;
    Ok(reapply_intensity(img, &intensity, &out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::entropy;
    use crate::synth;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn in_unit(r: &Raster) -> bool {
        r.data().iter().all(|v| (0.0..=1.0).contains(v))
    }

    #[test]
    fn he_on_uniform_histogram_is_identity() {
        let img = Raster::from_fn(256, 2, |x, _| x as f64 / 255.0);
        let out = global_he(&img);
        for (a, b) in img.data().iter().zip(out.data()) {
            assert!((a - b).abs() <= 1.0 / 255.0);
        }
    }

    #[test]
    fn he_two_levels_hits_endpoints() {
        let img = Raster::from_fn(4, 4, |x, _| if x < 2 { 0.0 } else { 1.0 });
        assert_eq!(global_he(&img), img);
        let img = Raster::from_fn(4, 4, |x, _| if x < 2 { 0.3 } else { 0.4 });
        let out = global_he(&img);
        assert!(out.data().iter().all(|&v| v == 0.0 || v == 1.0));
        assert_eq!(
            global_he(&Raster::filled(3, 3, 0.6)),
            Raster::filled(3, 3, 0.0)
        );
    }

    #[test]
    fn he_does_not_lose_entropy() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..200 {
            let (w, h) = (rng.gen_range(2..16), rng.gen_range(1..16));
            let levels = rng.gen_range(2..256);
            let img = Raster::from_fn(w, h, |_, _| rng.gen_range(0..levels) as f64 / 255.0);
            if img.is_uniform() {
                continue;
            }
            let out = global_he(&img);
            assert!(in_unit(&out));
            assert!(entropy(&out) >= entropy(&img) - 1e-9);
        }
    }

    #[test]
    fn stretch_cases() {
        let img = Raster::from_fn(5, 1, |x, _| 0.2 + 0.1 * x as f64);
        let out = linear_stretch(&img, 0.0, 100.0).unwrap();
        let expected = [0.0, 0.25, 0.5, 0.75, 1.0];
        for (a, b) in out.data().iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
        let full = Raster::from_fn(11, 1, |x, _| x as f64 / 10.0);
        assert_eq!(linear_stretch(&full, 0.0, 100.0).unwrap(), full);
        let flat = Raster::filled(3, 3, 0.4);
        assert_eq!(linear_stretch(&flat, 1.0, 99.0).unwrap(), flat);
        assert!(linear_stretch(&full, 50.0, 50.0).is_err());
        assert!(linear_stretch(&full, -1.0, 50.0).is_err());
        assert!(linear_stretch(&full, 10.0, 101.0).is_err());
    }

    #[test]
    fn stretch_clips_outliers() {
        // 198 ramp samples in [0.3, 0.7] plus one dark and one bright outlier.
        let mut data: Vec<f64> = (0..198).map(|i| 0.3 + 0.4 * i as f64 / 197.0).collect();
        data.push(0.0);
        data.push(1.0);
        let img = Raster::new(200, 1, data).unwrap();

        // Sort-based oracle: position p/100·(n−1), linear between neighbors.
        let mut sorted = img.data().to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let pos = 0.01 * 199.0;
        let lo = sorted[1] + (pos - 1.0) * (sorted[2] - sorted[1]);
        let pos = 0.99 * 199.0;
        let hi = sorted[197] + (pos - 197.0) * (sorted[198] - sorted[197]);
        assert!(lo > 0.3 && hi < 0.7);

        let out = linear_stretch(&img, 1.0, 99.0).unwrap();
        assert_eq!(out.data()[198], 0.0);
        assert_eq!(out.data()[199], 1.0);
        for i in 2..196 {
            let expected = (img.data()[i] - lo) / (hi - lo);
            assert!((out.data()[i] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn gain_offset_cases() {
        let img = synth::gamma_ramp(9, 3, 1.5);
        assert_eq!(gain_offset(&img, 1.0, 0.0), img);
        assert_eq!(
            gain_offset(&Raster::filled(1, 1, 0.8), 1.5, 0.0).data(),
            &[1.0]
        );
        assert!((gain_offset(&Raster::filled(1, 1, 0.3), 2.0, 0.1).data()[0] - 0.7).abs() < 1e-15);
    }

    #[test]
    fn gamma_cases() {
        let img = synth::gamma_ramp(9, 3, 1.5);
        assert_eq!(gamma_correct(&img, 1.0).unwrap(), img);
        assert_eq!(
            gamma_correct(&Raster::filled(1, 1, 0.25), 0.5)
                .unwrap()
                .data(),
            &[0.5]
        );
        for g in [0.3, 2.2] {
            let ends = Raster::new(2, 1, vec![0.0, 1.0]).unwrap();
            assert_eq!(gamma_correct(&ends, g).unwrap(), ends);
        }
        assert!(gamma_correct(&img, 0.0).is_err());
    }

    #[test]
    fn homomorphic_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let img = Raster::from_fn(12, 9, |_, _| rng.gen::<f64>());
        let same = spatial_homomorphic(&img, 1.0, 1.0).unwrap();
        for (a, b) in img.data().iter().zip(same.data()) {
            assert!((a - b).abs() < 1e-12);
        }

        let c = 0.3;
        let out = spatial_homomorphic(&Raster::filled(4, 4, c), 1.7, 0.5).unwrap();
        let expected = ((1.0 + 255.0 * c).sqrt() - 1.0) / 255.0;
        assert!(out.data().iter().all(|&v| (v - expected).abs() < 1e-12));

        let impulse = Raster::from_fn(3, 3, |x, y| if x == 1 && y == 1 { 0.5 } else { 0.1 });
        let plain = spatial_homomorphic(&impulse, 1.0, 1.0).unwrap();
        let sharp = spatial_homomorphic(&impulse, 1.5, 1.0).unwrap();
        assert!(sharp.get(1, 1) > plain.get(1, 1));
        assert!(spatial_homomorphic(&impulse, 0.0, 1.0).is_err());
    }

    #[test]
    fn everything_stays_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..30 {
            let img = Raster::from_fn(10, 7, |_, _| rng.gen::<f64>());
            assert!(in_unit(&global_he(&img)));
            assert!(in_unit(&linear_stretch(&img, 2.0, 98.0).unwrap()));
            assert!(in_unit(&gain_offset(
                &img,
                rng.gen_range(0.0..3.0),
                rng.gen_range(-0.5..0.5)
            )));
            assert!(in_unit(
                &gamma_correct(&img, rng.gen_range(0.1..4.0)).unwrap()
            ));
            assert!(in_unit(
                &spatial_homomorphic(&img, rng.gen_range(0.5..3.0), rng.gen_range(0.3..1.5))
                    .unwrap()
            ));
        }
    }

    #[test]
    fn intensity_wrapper_keeps_gray_gray() {
        let img = ColorImage::gray(&synth::gamma_ramp(16, 4, 2.0));
        let out = on_intensity(&img, |r| Ok(global_he(r))).unwrap();
        assert_eq!(out.plane(0), out.plane(2));
        let id = on_intensity(&synth::low_light_texture(8, 8, 1), |r| {
            Ok(gain_offset(r, 1.0, 0.0))
        })
        .unwrap();
        assert_eq!(id, synth::low_light_texture(8, 8, 1));
    }
}
