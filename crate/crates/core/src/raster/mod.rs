//! Image containers, 8-bit PPM I/O and RGB/HSI conversion.
//!
//! Samples are `f64` on the normalized `[0, 1]` scale everywhere inside the
//! crate; the 8-bit `[0, 255]` scale only appears at file I/O and in metrics.

mod hsi;
mod ppm;

pub use hsi::{hsi_to_rgb, hue_degrees, rgb_to_hsi, ACHROMATIC_EPS};
pub use ppm::{load_ppm, save_ppm};

use crate::error::{Error, Result};

/// A single-channel, row-major field of intensities.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Raster {
    /// Wraps `data` as a `width × height` raster, rejecting empty dimensions,
    /// length mismatches and non-finite samples.
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Dimensions {
                width,
                height,
                reason: "width and height must be at least 1",
            });
        }
        if width.checked_mul(height) != Some(data.len()) {
            return Err(Error::Dimensions {
                width,
                height,
                reason: "data length does not match width * height",
            });
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Constant raster.
    ///
    /// Panics if either dimension is zero.
    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Self::from_fn(width, height, |_, _| value)
    }

    /// Builds a raster by evaluating `f(x, y)` at every pixel.
    ///
    /// Panics if either dimension is zero.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(
            width > 0 && height > 0,
            "raster dimensions must be non-zero"
        );
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn row(&self, y: usize) -> &[f64] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    pub fn same_dims(&self, other: &Raster) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub(crate) fn check_same_dims(&self, other: &Raster) -> Result<()> {
        if self.same_dims(other) {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(
                self.width,
                self.height,
                other.width,
                other.height,
            ))
        }
    }

    /// Pointwise map into a new raster of the same shape.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Raster {
        Raster {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise combination of two rasters of the same shape.
    ///
    /// Panics on a shape mismatch.
    pub fn zip_map(&self, other: &Raster, f: impl Fn(f64, f64) -> f64) -> Raster {
        assert!(
            self.same_dims(other),
            "zip_map on rasters of different shape"
        );
        Raster {
            width: self.width,
            height: self.height,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// `(min, max)` over all samples.
    pub fn min_max(&self) -> (f64, f64) {
        self.data
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    /// True when every sample is bitwise equal to the first.
    pub fn is_uniform(&self) -> bool {
        let first = self.data[0];
        self.data.iter().all(|&v| v == first)
    }

    pub(crate) fn from_parts(width: usize, height: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(width * height, data.len());
        Self {
            width,
            height,
            data,
        }
    }
}

/// Color model of a [`ColorImage`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColorModel {
    /// Planes are R, G, B in `[0, 1]`.
    Rgb,
    /// Planes are hue in degrees `[0, 360)`, saturation and intensity in `[0, 1]`.
    Hsi,
}

impl ColorModel {
    pub fn name(self) -> &'static str {
        match self {
            ColorModel::Rgb => "RGB",
            ColorModel::Hsi => "HSI",
        }
    }
}

/// Three equally sized planes tagged with their color model.
#[derive(Debug, Clone, PartialEq)]
pub struct ColorImage {
    model: ColorModel,
    planes: [Raster; 3],
}

impl ColorImage {
    pub fn new(model: ColorModel, planes: [Raster; 3]) -> Result<Self> {
        planes[0].check_same_dims(&planes[1])?;
        planes[0].check_same_dims(&planes[2])?;
        Ok(Self { model, planes })
    }

    /// RGB image with every pixel set to `rgb`.
    pub fn filled_rgb(width: usize, height: usize, rgb: [f64; 3]) -> Self {
        Self {
            model: ColorModel::Rgb,
            planes: rgb.map(|v| Raster::filled(width, height, v)),
        }
    }

    /// Gray RGB image whose three planes are copies of `plane`.
    pub fn gray(plane: &Raster) -> Self {
        Self {
            model: ColorModel::Rgb,
            planes: [plane.clone(), plane.clone(), plane.clone()],
        }
    }

    pub fn model(&self) -> ColorModel {
        self.model
    }

    pub fn width(&self) -> usize {
        self.planes[0].width()
    }

    pub fn height(&self) -> usize {
        self.planes[0].height()
    }

    pub fn planes(&self) -> &[Raster; 3] {
        &self.planes
    }

    pub fn plane(&self, i: usize) -> &Raster {
        &self.planes[i]
    }

    pub fn into_planes(self) -> [Raster; 3] {
        self.planes
    }

    /// The three samples of pixel `i` (row-major index).
    #[inline]
    pub fn pixel(&self, i: usize) -> [f64; 3] {
        [
            self.planes[0].data()[i],
            self.planes[1].data()[i],
            self.planes[2].data()[i],
        ]
    }

    pub fn same_dims(&self, other: &ColorImage) -> bool {
        self.planes[0].same_dims(&other.planes[0])
    }

    pub(crate) fn check_same_dims(&self, other: &ColorImage) -> Result<()> {
        self.planes[0].check_same_dims(&other.planes[0])
    }

    pub(crate) fn require(&self, model: ColorModel) -> Result<()> {
        if self.model == model {
            Ok(())
        } else {
            Err(Error::ColorModel {
                expected: model.name(),
                actual: self.model.name(),
            })
        }
    }
}

/// Largest representable intensity, `S = D − 1`.
///
/// Internally this is `1.0`; [`PixelDomain::EIGHT_BIT`] is the file scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelDomain(f64);

impl PixelDomain {
    pub const UNIT: PixelDomain = PixelDomain(1.0);
    pub const EIGHT_BIT: PixelDomain = PixelDomain(255.0);

    pub fn new(scale: f64) -> Result<Self> {
        if scale.is_finite() && scale > 0.0 {
            Ok(Self(scale))
        } else {
            Err(crate::error::param(
                "scale",
                format!("must be finite and > 0, got {scale}"),
            ))
        }
    }

    pub fn scale(self) -> f64 {
        self.0
    }
}

impl Default for PixelDomain {
    fn default() -> Self {
        Self::UNIT
    }
}
