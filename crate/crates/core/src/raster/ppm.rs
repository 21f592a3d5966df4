//! Binary PPM (`P6`, maxval 255).

use super::{ColorImage, ColorModel, Raster};
use crate::error::{Error, Result};

fn parse_err(offset: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        offset,
        message: message.into(),
    }
}

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Header<'_> {
    /// Skips whitespace and `#` comments, which run to the end of the line.
    fn skip_separators(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<(usize, usize)> {
        self.skip_separators();
        let start = self.pos;
        let mut value: usize = 0;
        while let Some(&b) = self.bytes.get(self.pos) {
            if !b.is_ascii_digit() {
                break;
            }
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(usize::from(b - b'0')))
                .ok_or_else(|| parse_err(start, format!("{what} overflows")))?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(match self.bytes.get(start) {
                None => parse_err(start, format!("unexpected end of header, expected {what}")),
                Some(_) => parse_err(start, format!("expected decimal {what}")),
            });
        }
        Ok((value, start))
    }
}

/// Decodes a binary `P6` PPM with maxval 255 into an RGB image, mapping
/// each byte `v` to `v / 255`.
pub fn load_ppm(bytes: &[u8]) -> Result<ColorImage> {
    match bytes.get(..2) {
        Some(b"P6") => {}
        Some(_) => return Err(parse_err(0, "unsupported magic")),
        None => return Err(parse_err(0, "unexpected end of header, expected magic")),
    }
    let mut header = Header { bytes, pos: 2 };
    if !header
        .bytes
        .get(2)
        .is_some_and(|b| b.is_ascii_whitespace() || *b == b'#')
    {
        return Err(parse_err(2, "expected whitespace after magic"));
    }
    let (width, w_at) = header.number("width")?;
    let (height, h_at) = header.number("height")?;
    if width == 0 {
        return Err(parse_err(w_at, "width must be non-zero"));
    }
    if height == 0 {
        return Err(parse_err(h_at, "height must be non-zero"));
    }
    let (maxval, m_at) = header.number("maxval")?;
    if maxval != 255 {
        return Err(parse_err(m_at, format!("unsupported maxval {maxval}")));
    }
    match bytes.get(header.pos) {
        Some(b) if b.is_ascii_whitespace() => header.pos += 1,
        Some(_) => {
            return Err(parse_err(
                header.pos,
                "expected single whitespace after maxval",
            ))
        }
        None => {
            return Err(parse_err(
                header.pos,
                "unexpected end of header after maxval",
            ))
        }
    }

    let payload_at = header.pos;
    let pixels = width
        .checked_mul(height)
        .ok_or_else(|| parse_err(w_at, "image dimensions overflow"))?;
    let needed = pixels
        .checked_mul(3)
        .ok_or_else(|| parse_err(w_at, "image dimensions overflow"))?;
    let payload = &bytes[payload_at..];
    if payload.len() < needed {
        return Err(parse_err(
            bytes.len(),
            format!(
                "truncated payload: expected {needed} bytes, found {}",
                payload.len()
            ),
        ));
    }

    let mut planes = [
        Vec::with_capacity(pixels),
        Vec::with_capacity(pixels),
        Vec::with_capacity(pixels),
    ];
    for px in payload[..needed].chunks_exact(3) {
        for (plane, &b) in planes.iter_mut().zip(px) {
            plane.push(f64::from(b) / 255.0);
        }
    }
    let [r, g, b] = planes;
    Ok(ColorImage {
        model: ColorModel::Rgb,
        planes: [
            Raster::from_parts(width, height, r),
            Raster::from_parts(width, height, g),
            Raster::from_parts(width, height, b),
        ],
    })
}

/// 8-bit quantization used by the encoder: clamp to `[0, 1]`, scale by 255
/// and round half up.
#[inline]
pub(crate) fn to_byte(v: f64) -> u8 {
    // NaN falls through `clamp` and saturates to 0 in the cast.
    (v.clamp(0.0, 1.0) * 255.0 + 0.5).floor() as u8
}

/// Encodes an RGB image as binary `P6` PPM with maxval 255.
pub fn save_ppm(img: &ColorImage) -> Result<Vec<u8>> {
    img.require(ColorModel::Rgb)?;
    let header = format!("P6\n{} {}\n255\n", img.width(), img.height());
    let n = img.width() * img.height();
    let mut out = Vec::with_capacity(header.len() + 3 * n);
    out.extend_from_slice(header.as_bytes());
    for i in 0..n {
        out.extend(img.pixel(i).map(to_byte));
    }
    Ok(out)
}
