//! Image file I/O.
//!
//! Binary PPM (`P6`, maxval 255) is the canonical format and is handled here
//! byte for byte. The encoder always writes `P6\n<w> <h>\n255\n` followed by
//! the raw RGB rows. PNG (read/write) and BMP (read) go through the `image`
//! crate and are picked by file extension.

use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::raster::Raster;

#[derive(Debug, Error)]
pub enum CodecError {
    #[error("not a binary PPM file (expected magic \"P6\")")]
    BadMagic,

    #[error("unsupported PPM maxval {0} (only 255 is supported)")]
    UnsupportedDepth(u32),

    #[error("malformed PPM header: {0}")]
    MalformedHeader(String),

    #[error("truncated pixel data: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },

    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),

    #[error(transparent)]
    Image(#[from] image::ImageError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderCursor<'a> {
    /// Skips whitespace and `#` comments running to end of line.
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

    fn number(&mut self, what: &str) -> Result<u32, CodecError> {
        let had_separator = self.pos > 0
            && self
                .bytes
                .get(self.pos)
                .is_some_and(|b| b.is_ascii_whitespace() || *b == b'#');
        self.skip_separators();
        if !had_separator {
            return Err(CodecError::MalformedHeader(format!(
                "missing separator before {what}"
            )));
        }
        let start = self.pos;
        let mut value: u32 = 0;
        while let Some(&b) = self.bytes.get(self.pos) {
            if !b.is_ascii_digit() {
                break;
            }
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(u32::from(b - b'0')))
                .ok_or_else(|| CodecError::MalformedHeader(format!("{what} is too large")))?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(CodecError::MalformedHeader(
                match self.bytes.get(self.pos) {
                    None => format!("header ends before {what}"),
                    Some(_) => format!("{what} is not a decimal number"),
                },
            ));
        }
        Ok(value)
    }
}

/// Decodes a binary PPM. Bytes after the last pixel are ignored.
pub fn read_ppm(bytes: &[u8]) -> Result<Raster, CodecError> {
    if !bytes.starts_with(b"P6") {
        return Err(CodecError::BadMagic);
    }
    let mut cur = HeaderCursor { bytes, pos: 2 };
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval = cur.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(CodecError::MalformedHeader(format!(
            "zero dimension {width}x{height}"
        )));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(CodecError::MalformedHeader(format!(
            "maxval {maxval} out of range"
        )));
    }
    if maxval != 255 {
        return Err(CodecError::UnsupportedDepth(maxval));
    }
    match bytes.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        Some(_) => {
            return Err(CodecError::MalformedHeader(
                "maxval must be followed by one whitespace byte".into(),
            ))
        }
        None => {
            return Err(CodecError::Truncated {
                expected: pixel_bytes(width, height)?,
                found: 0,
            })
        }
    }
    let expected = pixel_bytes(width, height)?;
    let body = &bytes[cur.pos..];
    if body.len() < expected {
        return Err(CodecError::Truncated {
            expected,
            found: body.len(),
        });
    }
    Raster::from_raw(width as usize, height as usize, body[..expected].to_vec())
        .map_err(|e| CodecError::MalformedHeader(e.to_string()))
}

fn pixel_bytes(width: u32, height: u32) -> Result<usize, CodecError> {
    (width as usize)
        .checked_mul(height as usize)
        .and_then(|n| n.checked_mul(3))
        .ok_or_else(|| CodecError::MalformedHeader(format!("{width}x{height} is too large")))
}

pub fn write_ppm(r: &Raster) -> Vec<u8> {
    let header = format!("P6\n{} {}\n255\n", r.width(), r.height());
    let mut out = Vec::with_capacity(header.len() + r.data().len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(r.data());
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Ppm,
    Png,
    Bmp,
}

fn format_of(path: &Path) -> Result<Format, CodecError> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .unwrap_or_default();
    match ext.as_str() {
        "ppm" | "pnm" => Ok(Format::Ppm),
        "png" => Ok(Format::Png),
        "bmp" => Ok(Format::Bmp),
        _ => Err(CodecError::UnsupportedFormat(format!(
            "{} (expected .ppm, .png or .bmp)",
            path.display()
        ))),
    }
}

/// Reads an image, choosing the decoder from the extension.
pub fn load(path: &Path) -> Result<Raster, CodecError> {
    let format = format_of(path)?;
    let bytes = fs::read(path)?;
    match format {
        Format::Ppm => read_ppm(&bytes),
        Format::Png | Format::Bmp => {
            let kind = if format == Format::Png {
                image::ImageFormat::Png
            } else {
                image::ImageFormat::Bmp
            };
            let img = image::load_from_memory_with_format(&bytes, kind)?.into_rgb8();
            let (w, h) = img.dimensions();
            Raster::from_raw(w as usize, h as usize, img.into_raw())
                .map_err(|e| CodecError::UnsupportedFormat(e.to_string()))
        }
    }
}

/// Writes an image as PPM or PNG, choosing the encoder from the extension.
pub fn save(path: &Path, r: &Raster) -> Result<(), CodecError> {
    match format_of(path)? {
        Format::Ppm => fs::write(path, write_ppm(r))?,
        Format::Png => {
            let buf =
                image::RgbImage::from_raw(r.width() as u32, r.height() as u32, r.data().to_vec())
                    .expect("raster buffer matches its dimensions");
            buf.save_with_format(path, image::ImageFormat::Png)?;
        }
        Format::Bmp => {
            return Err(CodecError::UnsupportedFormat(
                "BMP output is not supported; use .ppm or .png".into(),
            ))
        }
    }
    Ok(())
}
