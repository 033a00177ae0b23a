//! In-memory RGB8 image and the per-channel tone accessors every spot
//! painter is written against.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// One pixel as `[r, g, b]`.
pub type Rgb = [u8; 3];

pub const WHITE: Rgb = [255, 255, 255];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Channel {
    R,
    G,
    B,
}

impl Channel {
    /// Channels in the fixed iteration order used throughout rendering.
    pub const ALL: [Channel; 3] = [Channel::R, Channel::G, Channel::B];

    #[inline]
    pub const fn index(self) -> usize {
        self as usize
    }

    fn bit(self) -> u8 {
        1 << self.index()
    }

    fn letter(self) -> char {
        match self {
            Channel::R => 'r',
            Channel::G => 'g',
            Channel::B => 'b',
        }
    }
}

/// Nonempty subset of `{R, G, B}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ChannelMask {
    bits: u8,
}

impl ChannelMask {
    pub const RGB: ChannelMask = ChannelMask { bits: 0b111 };

    pub fn new(channels: &[Channel]) -> Result<Self> {
        let bits = channels.iter().fold(0, |acc, c| acc | c.bit());
        if bits == 0 {
            return Err(Error::invalid(
                "channel mask must select at least one channel",
            ));
        }
        Ok(ChannelMask { bits })
    }

    pub fn only(channel: Channel) -> Self {
        ChannelMask {
            bits: channel.bit(),
        }
    }

    pub fn contains(self, channel: Channel) -> bool {
        self.bits & channel.bit() != 0
    }

    /// Selected channels in R, G, B order.
    pub fn iter(self) -> impl Iterator<Item = Channel> {
        Channel::ALL.into_iter().filter(move |&c| self.contains(c))
    }
}

impl Default for ChannelMask {
    fn default() -> Self {
        ChannelMask::RGB
    }
}

impl FromStr for ChannelMask {
    type Err = Error;

    /// Parses any nonempty combination of the letters `r`, `g`, `b`
    /// (case-insensitive, repeats allowed).
    fn from_str(s: &str) -> Result<Self> {
        let mut channels = Vec::with_capacity(3);
        for ch in s.chars() {
            channels.push(match ch.to_ascii_lowercase() {
                'r' => Channel::R,
                'g' => Channel::G,
                'b' => Channel::B,
                other => {
                    return Err(Error::invalid(format!(
                        "unknown channel '{other}' (expected a subset of \"rgb\")"
                    )))
                }
            });
        }
        ChannelMask::new(&channels)
    }
}

impl fmt::Display for ChannelMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in self.iter() {
            write!(f, "{}", c.letter())?;
        }
        Ok(())
    }
}

impl Serialize for ChannelMask {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Row-major RGB8 image.
#[derive(Clone, PartialEq, Eq)]
pub struct Raster {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl fmt::Debug for Raster {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Raster")
            .field("width", &self.width)
            .field("height", &self.height)
            .finish_non_exhaustive()
    }
}

impl Raster {
    pub fn new_filled(width: usize, height: usize, fill: Rgb) -> Result<Self> {
        let len = Self::checked_len(width, height)?;
        let data = fill.iter().copied().cycle().take(len).collect();
        Ok(Raster {
            width,
            height,
            data,
        })
    }

    /// Wraps an existing `width * height * 3` byte buffer.
    pub fn from_raw(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        let len = Self::checked_len(width, height)?;
        if data.len() != len {
            return Err(Error::invalid(format!(
                "buffer holds {} bytes, {width}x{height} RGB needs {len}",
                data.len()
            )));
        }
        Ok(Raster {
            width,
            height,
            data,
        })
    }

    fn checked_len(width: usize, height: usize) -> Result<usize> {
        if width == 0 || height == 0 {
            return Err(Error::invalid(format!(
                "raster dimensions must be nonzero, got {width}x{height}"
            )));
        }
        width
            .checked_mul(height)
            .and_then(|n| n.checked_mul(3))
            .ok_or_else(|| Error::invalid(format!("raster {width}x{height} is too large")))
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_raw(self) -> Vec<u8> {
        self.data
    }

    pub fn same_dimensions(&self, other: &Raster) -> bool {
        self.width == other.width && self.height == other.height
    }

    fn check(&self, x: usize, y: usize) -> Result<()> {
        if x < self.width && y < self.height {
            Ok(())
        } else {
            Err(Error::IndexOutOfBounds {
                x,
                y,
                width: self.width,
                height: self.height,
            })
        }
    }

    #[inline]
    fn offset(&self, x: usize, y: usize) -> usize {
        (y * self.width + x) * 3
    }

    /// The colour tone `b(x, y, c)`.
    pub fn get_tone(&self, x: usize, y: usize, c: Channel) -> Result<u8> {
        self.check(x, y)?;
        Ok(self.tone(x, y, c))
    }

    pub fn set_tone(&mut self, x: usize, y: usize, c: Channel, v: u8) -> Result<()> {
        self.check(x, y)?;
        self.put_tone(x, y, c, v);
        Ok(())
    }

    pub fn get_pixel(&self, x: usize, y: usize) -> Result<Rgb> {
        self.check(x, y)?;
        Ok(self.pixel(x, y))
    }

    /// Unchecked-by-`Result` read for callers that already hold an in-range
    /// index. Panics when out of range.
    #[inline]
    pub(crate) fn tone(&self, x: usize, y: usize, c: Channel) -> u8 {
        debug_assert!(x < self.width && y < self.height);
        self.data[self.offset(x, y) + c.index()]
    }

    #[inline]
    pub(crate) fn put_tone(&mut self, x: usize, y: usize, c: Channel, v: u8) {
        debug_assert!(x < self.width && y < self.height);
        let o = self.offset(x, y);
        self.data[o + c.index()] = v;
    }

    #[inline]
    pub(crate) fn pixel(&self, x: usize, y: usize) -> Rgb {
        let o = self.offset(x, y);
        [self.data[o], self.data[o + 1], self.data[o + 2]]
    }

    /// Reads a tone at a possibly out-of-image coordinate, clamped to the
    /// border.
    #[inline]
    pub fn tone_clamped(&self, x: i64, y: i64, c: Channel) -> u8 {
        self.tone(clamp_coord(x, self.width), clamp_coord(y, self.height), c)
    }

    /// Per-channel mean over all pixels, rounded down.
    pub fn mean_color(&self) -> Rgb {
        let mut sums = [0u128; 3];
        for px in self.data.chunks_exact(3) {
            for (s, &v) in sums.iter_mut().zip(px) {
                *s += u128::from(v);
            }
        }
        let n = self.pixel_count() as u128;
        sums.map(|s| (s / n) as u8)
    }
}

/// Clamps a signed coordinate into `[0, limit - 1]`.
#[inline]
pub fn clamp_coord(v: i64, limit: usize) -> usize {
    debug_assert!(limit >= 1);
    if v <= 0 {
        0
    } else {
        (v as u64).min(limit as u64 - 1) as usize
    }
}
