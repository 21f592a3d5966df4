//! 3×3 spatial kernels and the low-pass / high-pass split.
//!
//! The Laplacian used by the flow is the averaging form `A∗I − I`, with `A`
//! the 3×3 box mean, so `I + ∇²I = A∗I` stays inside `[0, 1]` and
//! `−∇²I = I − A∗I` is the unsharp high-pass. The 4-neighbor stencil is
//! kept for comparison.

use rayon::prelude::*;

use crate::error::{param, Result};
use crate::raster::Raster;

/// Rasters with at least this many pixels are filtered with one rayon task
/// per row band. Every output pixel is an independent fixed-order sum, so
/// the result does not depend on the split.
const PARALLEL_MIN_PIXELS: usize = 1 << 16;

/// Nine row-major weights; index `(dy + 1) * 3 + (dx + 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel3([f64; 9]);

impl Kernel3 {
    pub const IDENTITY: Kernel3 = Kernel3([0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
    pub const BOX_MEAN: Kernel3 = Kernel3([1.0 / 9.0; 9]);
    /// Classical 4-neighbor Laplacian stencil.
    pub const LAPLACIAN_4: Kernel3 = Kernel3([0.0, 1.0, 0.0, 1.0, -4.0, 1.0, 0.0, 1.0, 0.0]);

    pub fn new(weights: [f64; 9]) -> Result<Self> {
        if weights.iter().all(|w| w.is_finite()) {
            Ok(Self(weights))
        } else {
            Err(param("kernel", "weights must be finite"))
        }
    }

    pub fn weights(&self) -> &[f64; 9] {
        &self.0
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

/// How samples outside the raster are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryMode {
    /// Clamp coordinates to the nearest edge pixel.
    #[default]
    Replicate,
}

/// Neighbor row/column indices under edge replication.
#[inline]
fn clamp3(i: usize, n: usize) -> [usize; 3] {
    [i.saturating_sub(1), i, (i + 1).min(n - 1)]
}

fn filter_rows(img: &Raster, per_pixel: impl Fn([&[f64]; 3], [usize; 3]) -> f64 + Sync) -> Raster {
    let (w, h) = (img.width(), img.height());
    let mut out = vec![0.0; w * h];
    let fill_row = |(y, row): (usize, &mut [f64])| {
        let [a, b, c] = clamp3(y, h);
        let rows = [img.row(a), img.row(b), img.row(c)];
        for (x, o) in row.iter_mut().enumerate() {
            *o = per_pixel(rows, clamp3(x, w));
        }
    };
    if w * h >= PARALLEL_MIN_PIXELS {
        out.par_chunks_mut(w).enumerate().for_each(fill_row);
    } else {
        out.chunks_mut(w).enumerate().for_each(fill_row);
    }
    Raster::from_parts(w, h, out)
}

/// `out(x, y) = Σ k[dy][dx] · img(clamp(x + dx), clamp(y + dy))`, summed
/// row by row, left to right. Values are not clamped.
pub fn convolve3(img: &Raster, kernel: &Kernel3, boundary: BoundaryMode) -> Raster {
    let BoundaryMode::Replicate = boundary;
    let k = kernel.0;
    filter_rows(img, |rows, xs| {
        let mut acc = 0.0;
        for (r, row) in rows.iter().enumerate() {
            for (c, &x) in xs.iter().enumerate() {
                acc += k[r * 3 + c] * row[x];
            }
        }
        acc
    })
}

/// Spacing of the grid the low-pass output is rounded onto.
pub const LOWPASS_GRID: f64 = 1.0 / (1u64 << 53) as f64;

/// 3×3 box mean with edge replication.
///
/// Computed as the nine-sample sum divided by 9 rather than with the
/// rounded `1/9` weights, so inputs in `[0, 1]` stay inside `[0, 1]`
/// without a clamp. The mean is then rounded to a multiple of
/// [`LOWPASS_GRID`] (an error below `6e-17`). For any input whose samples
/// are themselves multiples of the grid, `v − lowpass` is then exact and
/// `lowpass + highpass` reproduces the input bit for bit.
pub fn lowpass(img: &Raster) -> Raster {
    const SCALE: f64 = (1u64 << 53) as f64;
    filter_rows(img, |rows, xs| {
        let mut acc = 0.0;
        for row in rows {
            for &x in &xs {
                acc += row[x];
            }
        }
        (acc / 9.0 * SCALE).round() / SCALE
    })
}

/// Averaging Laplacian `A∗I − I`.
pub fn laplacian(img: &Raster) -> Raster {
    lowpass(img).zip_map(img, |l, v| l - v)
}

/// Unsharp high-pass `I − A∗I`, the negated averaging Laplacian.
pub fn highpass(img: &Raster) -> Raster {
    img.zip_map(&lowpass(img), |v, l| v - l)
}

/// 4-neighbor Laplacian `N + S + E + W − 4I` with edge replication.
pub fn laplacian_4(img: &Raster) -> Raster {
    convolve3(img, &Kernel3::LAPLACIAN_4, BoundaryMode::Replicate)
}
