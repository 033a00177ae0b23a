//! Spot shapes and painters.
//!
//! Painters read tones only from the source image and write only to the
//! canvas, so a spot's shape never depends on what earlier spots painted.
//! Each painter returns the pixels it wrote, in scan order.

use std::ops::Range;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::raster::{Channel, ChannelMask, Raster};
use crate::sampler::{Pixel, SamplePoint};

/// Value reported for a nonzero difference against a zero reference tone.
/// Exceeds every finite threshold.
pub const SATURATED_DIFF: f64 = f64::INFINITY;

/// Which of a sample's two positions supplies the reference tone and the
/// contrast measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferencePoint {
    /// The lattice point `(p_i, p_j)`.
    Source,
    /// The jittered point `(p_i', p_j')`.
    Displaced,
}

impl ReferencePoint {
    pub fn pick(self, sp: &SamplePoint) -> Pixel {
        match self {
            ReferencePoint::Source => sp.grid,
            ReferencePoint::Displaced => sp.jittered,
        }
    }
}

/// Side lengths and contrast threshold for rectangular spots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RectParams {
    lambda: usize,
    lambda_small: usize,
    lambda_big: usize,
    tau: f64,
}

impl RectParams {
    pub fn new(lambda: usize, lambda_small: usize, lambda_big: usize, tau: f64) -> Result<Self> {
        if lambda_small < 1 {
            return Err(Error::invalid("lambda-small must be at least 1"));
        }
        if lambda_small >= lambda {
            return Err(Error::invalid(format!(
                "requires lambda-small < lambda (got {lambda_small} >= {lambda})"
            )));
        }
        if lambda >= lambda_big {
            return Err(Error::invalid(format!(
                "requires lambda < lambda-big (got {lambda} >= {lambda_big})"
            )));
        }
        if lambda_big > i32::MAX as usize {
            return Err(Error::invalid("lambda-big is too large"));
        }
        check_threshold("tau", tau)?;
        Ok(RectParams {
            lambda,
            lambda_small,
            lambda_big,
            tau,
        })
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    pub fn lambda_small(&self) -> usize {
        self.lambda_small
    }

    pub fn lambda_big(&self) -> usize {
        self.lambda_big
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }
}

/// Neighbourhood half-width and tone threshold for threshold-region spots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdParams {
    pi_size: usize,
    tau_prime: f64,
}

impl ThresholdParams {
    pub fn new(pi_size: usize, tau_prime: f64) -> Result<Self> {
        if pi_size < 1 {
            return Err(Error::invalid("pi must be at least 1"));
        }
        if pi_size > i32::MAX as usize {
            return Err(Error::invalid("pi is too large"));
        }
        check_threshold("tau-prime", tau_prime)?;
        Ok(ThresholdParams { pi_size, tau_prime })
    }

    pub fn pi_size(&self) -> usize {
        self.pi_size
    }

    pub fn tau_prime(&self) -> f64 {
        self.tau_prime
    }
}

fn check_threshold(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "{name} must be a finite number >= 0, got {v}"
        )))
    }
}

/// `|other - reference| / reference`.
///
/// A zero reference gives 0 against another zero and [`SATURATED_DIFF`]
/// otherwise.
#[inline]
pub fn relative_diff(reference: u8, other: u8) -> f64 {
    let d = reference.abs_diff(other);
    match (reference, d) {
        (_, 0) => 0.0,
        (0, _) => SATURATED_DIFF,
        _ => f64::from(d) / f64::from(reference),
    }
}

/// Horizontal and vertical contrast `(A, B)` at `p`: the tone `lambda` pixels
/// to the right and `lambda` pixels below, each relative to the tone at `p`.
/// Reads past the border are clamped.
pub fn contrast_pair(src: &Raster, p: Pixel, lambda: usize, c: Channel) -> (f64, f64) {
    let (x, y) = (p.x as i64, p.y as i64);
    let l = lambda as i64;
    let b1 = src.tone(p.x, p.y, c);
    let b2 = src.tone_clamped(x + l, y, c);
    let b3 = src.tone_clamped(x, y + l, c);
    (relative_diff(b1, b2), relative_diff(b1, b3))
}

/// Spot sides `(horizontal, vertical)` from the contrast pair.
///
/// | A ≤ τ | B ≤ τ | sides      |
/// |-------|-------|------------|
/// | yes   | yes   | (Λ, Λ)     |
/// | no    | no    | (Λ', Λ')   |
/// | yes   | no    | (Λ'', Λ')  |
/// | no    | yes   | (Λ', Λ'')  |
pub fn rect_dims(a: f64, b: f64, rp: &RectParams) -> (usize, usize) {
    let flat_h = a <= rp.tau;
    let flat_v = b <= rp.tau;
    match (flat_h, flat_v) {
        (true, true) => (rp.lambda, rp.lambda),
        (false, false) => (rp.lambda_small, rp.lambda_small),
        (true, false) => (rp.lambda_big, rp.lambda_small),
        (false, true) => (rp.lambda_small, rp.lambda_big),
    }
}

/// In-image part of `[start, start + len)`.
fn clip(start: i64, len: usize, limit: usize) -> Range<usize> {
    let end = start.saturating_add(len as i64).clamp(0, limit as i64);
    let start = start.clamp(0, limit as i64);
    start as usize..end as usize
}

/// Disc of radius `rho` around the jittered point, filled with the lattice
/// point's tone on every selected channel.
pub fn paint_circle(
    canvas: &mut Raster,
    src: &Raster,
    sp: &SamplePoint,
    rho: usize,
    mask: ChannelMask,
) -> Vec<Pixel> {
    assert!(
        canvas.same_dimensions(src),
        "canvas and source differ in size"
    );
    let tone = src.pixel(sp.grid.x, sp.grid.y);
    let (cx, cy) = (sp.jittered.x as i64, sp.jittered.y as i64);
    let r = rho as i64;
    let r2 = r * r;
    let mut painted = Vec::new();
    for y in clip(cy - r, 2 * rho + 1, src.height()) {
        let dy = y as i64 - cy;
        for x in clip(cx - r, 2 * rho + 1, src.width()) {
            let dx = x as i64 - cx;
            if dx * dx + dy * dy <= r2 {
                for c in mask.iter() {
                    canvas.put_tone(x, y, c, tone[c.index()]);
                }
                painted.push(Pixel { x, y });
            }
        }
    }
    painted
}

/// Axis-aligned rectangle centred on the jittered point, sized by
/// [`rect_dims`] from the contrast at the reference point and filled with
/// the reference point's tone. Even sides extend one pixel further right /
/// down than left / up.
pub fn paint_rect(
    canvas: &mut Raster,
    src: &Raster,
    sp: &SamplePoint,
    rp: &RectParams,
    variant: ReferencePoint,
    c: Channel,
) -> Vec<Pixel> {
    assert!(
        canvas.same_dimensions(src),
        "canvas and source differ in size"
    );
    let reference = variant.pick(sp);
    let (a, b) = contrast_pair(src, reference, rp.lambda, c);
    let (w, h) = rect_dims(a, b, rp);
    let tone = src.tone(reference.x, reference.y, c);
    let x0 = sp.jittered.x as i64 - (w / 2) as i64;
    let y0 = sp.jittered.y as i64 - (h / 2) as i64;
    let xs = clip(x0, w, src.width());
    let mut painted = Vec::with_capacity(w * h);
    for y in clip(y0, h, src.height()) {
        for x in xs.clone() {
            canvas.put_tone(x, y, c, tone);
            painted.push(Pixel { x, y });
        }
    }
    painted
}

/// Every pixel of the `(2Π+1)²` square around the jittered point whose
/// source tone is within relative difference `τ'` of the reference tone
/// takes the reference tone.
pub fn paint_threshold(
    canvas: &mut Raster,
    src: &Raster,
    sp: &SamplePoint,
    tp: &ThresholdParams,
    variant: ReferencePoint,
    c: Channel,
) -> Vec<Pixel> {
    assert!(
        canvas.same_dimensions(src),
        "canvas and source differ in size"
    );
    let reference = variant.pick(sp);
    let b_ref = src.tone(reference.x, reference.y, c);
    let half = tp.pi_size as i64;
    let side = 2 * tp.pi_size + 1;
    let xs = clip(sp.jittered.x as i64 - half, side, src.width());
    let mut painted = Vec::new();
    for y in clip(sp.jittered.y as i64 - half, side, src.height()) {
        for x in xs.clone() {
            if relative_diff(b_ref, src.tone(x, y, c)) <= tp.tau_prime {
                canvas.put_tone(x, y, c, b_ref);
                painted.push(Pixel { x, y });
            }
        }
    }
    painted
}
