//! Per-pass sample placement: a regular lattice with a random stride, each
//! lattice point displaced by a bounded random jitter.
//!
//! Generator consumption order for one pass is fixed: the stride first, then
//! for every lattice point in row-major order (y outer, x inner) the x jitter
//! followed by the y jitter.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::raster::clamp_coord;
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Pixel {
    pub x: usize,
    pub y: usize,
}

impl Pixel {
    pub const fn new(x: usize, y: usize) -> Self {
        Pixel { x, y }
    }
}

impl From<(usize, usize)> for Pixel {
    fn from((x, y): (usize, usize)) -> Self {
        Pixel { x, y }
    }
}

/// A lattice point and the jittered position its spot is centred on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SamplePoint {
    pub grid: Pixel,
    pub jittered: Pixel,
}

/// Stride bounds and jitter half-width.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GridParams {
    s_min: usize,
    s_max: usize,
    delta: usize,
}

impl GridParams {
    pub fn new(s_min: usize, s_max: usize, delta: usize) -> Result<Self> {
        if s_min < 1 {
            return Err(Error::invalid("s-min must be at least 1"));
        }
        if s_max < s_min {
            return Err(Error::invalid(format!(
                "requires s-min <= s-max (got {s_min} > {s_max})"
            )));
        }
        if delta > i32::MAX as usize {
            return Err(Error::invalid("delta is too large"));
        }
        Ok(GridParams {
            s_min,
            s_max,
            delta,
        })
    }

    pub fn s_min(&self) -> usize {
        self.s_min
    }

    pub fn s_max(&self) -> usize {
        self.s_max
    }

    pub fn delta(&self) -> usize {
        self.delta
    }
}

pub fn draw_stride(rng: &mut RngStream, params: &GridParams) -> usize {
    rng.uniform_usize(params.s_min, params.s_max)
}

/// Lattice `{(i*s, j*s)}` inside the image, row-major.
pub fn grid_points(width: usize, height: usize, stride: usize) -> Vec<Pixel> {
    assert!(stride >= 1, "stride must be positive");
    let mut out = Vec::with_capacity(width.div_ceil(stride) * height.div_ceil(stride));
    for y in (0..height).step_by(stride) {
        for x in (0..width).step_by(stride) {
            out.push(Pixel { x, y });
        }
    }
    out
}

pub fn jitter_point(
    rng: &mut RngStream,
    p: Pixel,
    delta: usize,
    width: usize,
    height: usize,
) -> Pixel {
    let d = delta as i64;
    let dx = rng.uniform(-d, d);
    let dy = rng.uniform(-d, d);
    Pixel {
        x: clamp_coord(p.x as i64 + dx, width),
        y: clamp_coord(p.y as i64 + dy, height),
    }
}

/// Draws one pass worth of samples. Returns the stride used and the points in
/// scan order.
pub fn sample_pass(
    rng: &mut RngStream,
    width: usize,
    height: usize,
    params: &GridParams,
) -> (usize, Vec<SamplePoint>) {
    let stride = draw_stride(rng, params);
    let points = grid_points(width, height, stride)
        .into_iter()
        .map(|grid| SamplePoint {
            grid,
            jittered: jitter_point(rng, grid, params.delta, width, height),
        })
        .collect();
    (stride, points)
}
