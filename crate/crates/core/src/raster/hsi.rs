//! Gonzalez–Woods HSI model.
//!
//! `I = (R+G+B)/3`, `S = 1 − min(R,G,B)/I`, and `H` is the angle of the
//! chroma vector measured from the red axis. Hue is computed with `atan2`
//! on the chromaticity plane, which is the same angle as the textbook
//! `acos` form but stays accurate near 0° and 180°.

use super::{ColorImage, ColorModel, Raster};
use crate::error::Result;

/// Channel sums below this are treated as black (achromatic).
pub const ACHROMATIC_EPS: f64 = 1e-12;

const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Hue angle in degrees, `[0, 360)`, of an RGB triple. Returns 0 for
/// achromatic input.
pub fn hue_degrees(r: f64, g: f64, b: f64) -> f64 {
    if r == g && g == b {
        return 0.0;
    }
    let h = (SQRT_3 * (g - b)).atan2(2.0 * r - g - b).to_degrees();
    let h = if h < 0.0 { h + 360.0 } else { h };
    if h >= 360.0 {
        0.0
    } else {
        h
    }
}

fn pixel_to_hsi(r: f64, g: f64, b: f64) -> [f64; 3] {
    let sum = r + g + b;
    let i = sum / 3.0;
    let min = r.min(g).min(b);
    if sum < ACHROMATIC_EPS || min == r.max(g).max(b) {
        return [0.0, 0.0, i];
    }
    let s = (1.0 - 3.0 * min / sum).clamp(0.0, 1.0);
    if s == 0.0 {
        return [0.0, 0.0, i];
    }
    [hue_degrees(r, g, b), s, i]
}

pub(crate) fn pixel_to_rgb(h: f64, s: f64, i: f64) -> [f64; 3] {
    if s == 0.0 {
        return [i; 3];
    }
    let h = h.rem_euclid(360.0);
    let (sector, h) = if h < 120.0 {
        (0, h)
    } else if h < 240.0 {
        (1, h - 120.0)
    } else {
        (2, h - 240.0)
    };
    let low = i * (1.0 - s);
    let lead = i * (1.0 + s * h.to_radians().cos() / (60.0 - h).to_radians().cos());
    let rest = 3.0 * i - (low + lead);
    match sector {
        0 => [lead, rest, low],
        1 => [low, lead, rest],
        _ => [rest, low, lead],
    }
}

/// Converts an RGB image to HSI (`H` in degrees).
pub fn rgb_to_hsi(img: &ColorImage) -> Result<ColorImage> {
    img.require(ColorModel::Rgb)?;
    Ok(convert(img, ColorModel::Hsi, pixel_to_hsi))
}

/// Converts an HSI image back to RGB, clamping each channel to `[0, 1]`.
pub fn hsi_to_rgb(img: &ColorImage) -> Result<ColorImage> {
    img.require(ColorModel::Hsi)?;
    Ok(convert(img, ColorModel::Rgb, |h, s, i| {
        pixel_to_rgb(h, s, i).map(|v| v.clamp(0.0, 1.0))
    }))
}

fn convert(
    img: &ColorImage,
    model: ColorModel,
    f: impl Fn(f64, f64, f64) -> [f64; 3],
) -> ColorImage {
    let (w, h) = (img.width(), img.height());
    let n = w * h;
    let mut planes = [
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    ];
    for i in 0..n {
        let [a, b, c] = img.pixel(i);
        for (plane, v) in planes.iter_mut().zip(f(a, b, c)) {
            plane.push(v);
        }
    }
    let [p0, p1, p2] = planes;
    ColorImage {
        model,
        planes: [
            Raster::from_parts(w, h, p0),
            Raster::from_parts(w, h, p1),
            Raster::from_parts(w, h, p2),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Textbook `acos` hue, used as an independent oracle.
    fn gw_hue(r: f64, g: f64, b: f64) -> f64 {
        let num = 0.5 * ((r - g) + (r - b));
        let den = ((r - g).powi(2) + (r - b) * (g - b)).sqrt();
        let theta = (num / den).clamp(-1.0, 1.0).acos().to_degrees();
        if b <= g {
            theta
        } else {
            360.0 - theta
        }
    }

    fn hsi(rgb: [f64; 3]) -> [f64; 3] {
        pixel_to_hsi(rgb[0], rgb[1], rgb[2])
    }

    fn close(a: [f64; 3], b: [f64; 3], tol: f64) -> bool {
        a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn gray_is_achromatic() {
        assert_eq!(hsi([0.3, 0.3, 0.3]), [0.0, 0.0, (0.3 + 0.3 + 0.3) / 3.0]);
        assert_eq!(hsi([0.0; 3]), [0.0, 0.0, 0.0]);
        assert_eq!(pixel_to_rgb(0.0, 0.0, 0.7), [0.7; 3]);
    }

    #[test]
    fn primaries() {
        assert!(close(hsi([1.0, 0.0, 0.0]), [0.0, 1.0, 1.0 / 3.0], 1e-12));
        assert!(close(hsi([0.0, 1.0, 0.0]), [120.0, 1.0, 1.0 / 3.0], 1e-12));
        assert!(close(hsi([0.0, 0.0, 1.0]), [240.0, 1.0, 1.0 / 3.0], 1e-12));
        assert!(close(
            pixel_to_rgb(240.0, 1.0, 1.0 / 3.0),
            [0.0, 0.0, 1.0],
            1e-9
        ));
        let red = hsi([1.0, 0.0, 0.0]);
        assert!(close(
            pixel_to_rgb(red[0], red[1], red[2]),
            [1.0, 0.0, 0.0],
            1e-9
        ));
    }

    #[test]
    fn image_level_conversion() {
        let img = ColorImage::filled_rgb(2, 2, [0.2, 0.5, 0.1]);
        let h = rgb_to_hsi(&img).unwrap();
        assert_eq!(h.model(), ColorModel::Hsi);
        assert!(rgb_to_hsi(&h).is_err());
        let back = hsi_to_rgb(&h).unwrap();
        assert!(close(back.pixel(3), [0.2, 0.5, 0.1], 1e-12));
    }

    proptest! {
        #[test]
        fn hue_matches_acos_form(r in 0.0..1.0f64, g in 0.0..1.0f64, b in 0.0..1.0f64) {
            let spread = r.max(g).max(b) - r.min(g).min(b);
            prop_assume!(spread > 1e-3);
            let d = (hue_degrees(r, g, b) - gw_hue(r, g, b)).abs();
            prop_assert!(d.min(360.0 - d) < 1e-6);
        }

        #[test]
        fn intensity_is_channel_mean(r in 0.0..1.0f64, g in 0.0..1.0f64, b in 0.0..1.0f64) {
            prop_assert_eq!(hsi([r, g, b])[2], (r + g + b) / 3.0);
        }

        #[test]
        fn round_trip(r in 0.0..1.0f64, g in 0.0..1.0f64, b in 0.0..1.0f64) {
            let [h, s, i] = hsi([r, g, b]);
            let back = pixel_to_rgb(h, s, i);
            if s >= 1e-6 {
                prop_assert!(close(back, [r, g, b], 1e-6));
            } else {
                let mean = (back[0] + back[1] + back[2]) / 3.0;
                prop_assert!((mean - i).abs() <= 1e-12);
            }
        }
    }
}
