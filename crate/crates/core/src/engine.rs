//! Pass iteration: background setup, one sampling-and-painting cycle per
//! pass, coverage tracking and the stopping rule.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::raster::{ChannelMask, Raster, WHITE};
use crate::rng::RngStream;
use crate::sampler::{sample_pass, GridParams, Pixel};
use crate::spots::{
    paint_circle, paint_rect, paint_threshold, RectParams, ReferencePoint, ThresholdParams,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Background {
    White,
    /// Uniform fill with the source's mean colour.
    Mean,
    /// Copy of the source image.
    Source,
}

/// Spot shape with its parameter group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum SpotMode {
    Circle {
        rho: usize,
    },
    Rect {
        params: RectParams,
        reference: ReferencePoint,
    },
    Threshold {
        params: ThresholdParams,
        reference: ReferencePoint,
    },
}

impl SpotMode {
    /// CLI spelling of the mode.
    pub fn name(&self) -> &'static str {
        use ReferencePoint::*;
        match self {
            SpotMode::Circle { .. } => "circle",
            SpotMode::Rect {
                reference: Source, ..
            } => "rect-source",
            SpotMode::Rect {
                reference: Displaced,
                ..
            } => "rect-displaced",
            SpotMode::Threshold {
                reference: Source, ..
            } => "thresh-source",
            SpotMode::Threshold {
                reference: Displaced,
                ..
            } => "thresh-displaced",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum StopRule {
    /// Run exactly this many passes.
    Passes { count: usize },
    /// Stop after the first pass that brings coverage to `target`, or after
    /// `max_passes` passes.
    Coverage { target: f64, max_passes: usize },
}

impl StopRule {
    pub fn validate(&self) -> Result<()> {
        match *self {
            StopRule::Passes { count } if count < 1 => Err(Error::invalid("passes must be >= 1")),
            StopRule::Coverage { target, .. } if !(0.0..=1.0).contains(&target) => Err(
                Error::invalid(format!("coverage target must be in [0, 1], got {target}")),
            ),
            StopRule::Coverage { max_passes, .. } if max_passes < 1 => {
                Err(Error::invalid("max-passes must be >= 1"))
            }
            _ => Ok(()),
        }
    }

    fn done(&self, passes_run: usize, coverage: f64) -> bool {
        match *self {
            StopRule::Passes { count } => passes_run >= count,
            StopRule::Coverage { target, max_passes } => {
                coverage >= target || passes_run >= max_passes
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RenderConfig {
    pub mode: SpotMode,
    pub background: Background,
    pub seed: u64,
    pub grid: GridParams,
    pub mask: ChannelMask,
    pub stop: StopRule,
}

impl RenderConfig {
    /// Parameter groups validate on construction; this covers the rest.
    pub fn validate(&self) -> Result<()> {
        self.stop.validate()
    }
}

/// Which canvas pixels any spot has written, on any channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverMap {
    width: usize,
    height: usize,
    painted: Vec<bool>,
    count: usize,
}

impl CoverMap {
    pub fn new(width: usize, height: usize) -> Self {
        CoverMap {
            width,
            height,
            painted: vec![false; width * height],
            count: 0,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn mark(&mut self, p: Pixel) {
        let cell = &mut self.painted[p.y * self.width + p.x];
        if !*cell {
            *cell = true;
            self.count += 1;
        }
    }

    pub fn is_painted(&self, p: Pixel) -> bool {
        self.painted[p.y * self.width + p.x]
    }

    pub fn painted_count(&self) -> usize {
        self.count
    }

    pub fn coverage_fraction(&self) -> f64 {
        if self.painted.is_empty() {
            return 0.0;
        }
        self.count as f64 / self.painted.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PassReport {
    pub pass_index: usize,
    pub stride_used: usize,
    /// Sample points stamped this pass.
    pub spots_painted: usize,
    /// Pixels reported by every painter call, duplicates included. Rect and
    /// threshold modes paint once per selected channel, so a pixel can count
    /// once per channel.
    pub pixels_written: usize,
    /// Coverage after this pass.
    pub coverage: f64,
}

pub fn init_background(src: &Raster, mode: Background) -> Raster {
    let fill = match mode {
        Background::Source => return src.clone(),
        Background::White => WHITE,
        Background::Mean => src.mean_color(),
    };
    Raster::new_filled(src.width(), src.height(), fill).expect("source dimensions are valid")
}

/// One pass: draw the samples, then paint every spot in scan order.
pub fn run_pass(
    src: &Raster,
    canvas: &mut Raster,
    cover: &mut CoverMap,
    rng: &mut RngStream,
    cfg: &RenderConfig,
    pass_index: usize,
) -> PassReport {
    assert!(
        canvas.same_dimensions(src),
        "canvas and source differ in size"
    );
    let (stride, samples) = sample_pass(rng, src.width(), src.height(), &cfg.grid);
    let mut pixels_written = 0;
    let mut record = |painted: Vec<Pixel>, cover: &mut CoverMap| {
        pixels_written += painted.len();
        for p in painted {
            cover.mark(p);
        }
    };
    for sp in &samples {
        match cfg.mode {
            SpotMode::Circle { rho } => {
                record(paint_circle(canvas, src, sp, rho, cfg.mask), cover);
            }
            SpotMode::Rect { params, reference } => {
                for c in cfg.mask.iter() {
                    record(paint_rect(canvas, src, sp, &params, reference, c), cover);
                }
            }
            SpotMode::Threshold { params, reference } => {
                for c in cfg.mask.iter() {
                    record(
                        paint_threshold(canvas, src, sp, &params, reference, c),
                        cover,
                    );
                }
            }
        }
    }
    PassReport {
        pass_index,
        stride_used: stride,
        spots_painted: samples.len(),
        pixels_written,
        coverage: cover.coverage_fraction(),
    }
}

/// Output of [`render`].
#[derive(Debug, Clone)]
pub struct Rendering {
    pub canvas: Raster,
    pub cover: CoverMap,
    pub reports: Vec<PassReport>,
}

/// Runs passes from a fresh background until the stopping rule fires. At
/// least one pass always runs.
pub fn render(src: &Raster, cfg: &RenderConfig) -> Result<Rendering> {
    cfg.validate()?;
    let mut canvas = init_background(src, cfg.background);
    let mut cover = CoverMap::new(src.width(), src.height());
    let mut rng = RngStream::from_seed(cfg.seed);
    let mut reports = Vec::new();
    loop {
        let report = run_pass(src, &mut canvas, &mut cover, &mut rng, cfg, reports.len());
        let coverage = report.coverage;
        reports.push(report);
        if cfg.stop.done(reports.len(), coverage) {
            break;
        }
    }
    Ok(Rendering {
        canvas,
        cover,
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::Channel;

    fn circle_cfg(rho: usize, grid: GridParams, stop: StopRule) -> RenderConfig {
        RenderConfig {
            mode: SpotMode::Circle { rho },
            background: Background::White,
            seed: 7,
            grid,
            mask: ChannelMask::RGB,
            stop,
        }
    }

    fn noise(w: usize, h: usize, seed: u64) -> Raster {
        let mut g = RngStream::from_seed(seed);
        let data = (0..w * h * 3).map(|_| g.next_u64() as u8).collect();
        Raster::from_raw(w, h, data).unwrap()
    }

    #[test]
    fn backgrounds() {
        let src = Raster::from_raw(2, 1, vec![0, 0, 0, 255, 255, 255]).unwrap();
        let white = init_background(&src, Background::White);
        assert!(white.data().iter().all(|&v| v == 255));
        assert_eq!(init_background(&src, Background::Source), src);
        let mean = init_background(&src, Background::Mean);
        assert_eq!(mean.data(), &[127; 6]);
    }

    #[test]
    fn cover_map_fraction() {
        let mut m = CoverMap::new(10, 10);
        assert_eq!(m.coverage_fraction(), 0.0);
        for i in 0..25 {
            m.mark(Pixel::new(i % 10, i / 10));
            m.mark(Pixel::new(i % 10, i / 10));
        }
        assert_eq!(m.painted_count(), 25);
        assert_eq!(m.coverage_fraction(), 0.25);
        for i in 0..100 {
            m.mark(Pixel::new(i % 10, i / 10));
        }
        assert_eq!(m.coverage_fraction(), 1.0);
    }

    #[test]
    fn single_degenerate_spot() {
        let src = noise(6, 6, 1);
        let cfg = circle_cfg(
            0,
            GridParams::new(6, 6, 0).unwrap(),
            StopRule::Passes { count: 1 },
        );
        let out = render(&src, &cfg).unwrap();
        assert_eq!(out.reports.len(), 1);
        let r = &out.reports[0];
        assert_eq!(
            (r.stride_used, r.spots_painted, r.pixels_written),
            (6, 1, 1)
        );
        assert_eq!(r.coverage, 1.0 / 36.0);
        assert_eq!(
            out.canvas.get_pixel(0, 0).unwrap(),
            src.get_pixel(0, 0).unwrap()
        );
    }

    #[test]
    fn stop_rule_validation() {
        assert!(StopRule::Passes { count: 0 }.validate().is_err());
        assert!(StopRule::Coverage {
            target: 1.5,
            max_passes: 3
        }
        .validate()
        .is_err());
        assert!(StopRule::Coverage {
            target: 0.5,
            max_passes: 0
        }
        .validate()
        .is_err());
        assert!(StopRule::Coverage {
            target: f64::NAN,
            max_passes: 3
        }
        .validate()
        .is_err());
        let cfg = circle_cfg(
            1,
            GridParams::new(1, 1, 0).unwrap(),
            StopRule::Passes { count: 0 },
        );
        assert!(render(&noise(4, 4, 0), &cfg).is_err());
    }

    #[test]
    fn coverage_stop_hits_target_or_limit() {
        let src = noise(20, 20, 3);
        let grid = GridParams::new(3, 5, 1).unwrap();
        let cfg = circle_cfg(
            1,
            grid,
            StopRule::Coverage {
                target: 0.9,
                max_passes: 50,
            },
        );
        let out = render(&src, &cfg).unwrap();
        let last = out.reports.last().unwrap();
        assert!(last.coverage >= 0.9 || out.reports.len() == 50);
        // only the final pass may reach the target
        for r in &out.reports[..out.reports.len() - 1] {
            assert!(r.coverage < 0.9);
        }

        let cfg = circle_cfg(
            0,
            grid,
            StopRule::Coverage {
                target: 1.0,
                max_passes: 2,
            },
        );
        assert_eq!(render(&src, &cfg).unwrap().reports.len(), 2);
    }

    #[test]
    fn dense_circles_reach_full_coverage() {
        let src = noise(12, 12, 4);
        let cfg = circle_cfg(
            0,
            GridParams::new(1, 3, 2).unwrap(),
            StopRule::Coverage {
                target: 1.0,
                max_passes: 10_000,
            },
        );
        let out = render(&src, &cfg).unwrap();
        assert_eq!(out.cover.coverage_fraction(), 1.0);
    }

    #[test]
    fn constant_rect_source_pixel_sum() {
        // Δ = 0 so spots sit on the lattice; every spot is Λ×Λ = 3×3 placed
        // at [p - 1, p + 1] and clipped. The sum factors per axis.
        let (w, h) = (17usize, 11usize);
        let src = Raster::new_filled(w, h, [77, 77, 77]).unwrap();
        let rect = RectParams::new(3, 2, 5, 0.1).unwrap();
        let stride = 4;
        let cfg = RenderConfig {
            mode: SpotMode::Rect {
                params: rect,
                reference: ReferencePoint::Source,
            },
            background: Background::White,
            seed: 11,
            grid: GridParams::new(stride, stride, 0).unwrap(),
            mask: ChannelMask::only(Channel::R),
            stop: StopRule::Passes { count: 1 },
        };
        let axis = |limit: usize| -> usize {
            (0..limit)
                .step_by(stride)
                .map(|p| (p + 2).min(limit) - p.saturating_sub(1))
                .sum()
        };
        let out = render(&src, &cfg).unwrap();
        assert_eq!(out.reports[0].pixels_written, axis(w) * axis(h));

        let cfg = RenderConfig {
            mask: ChannelMask::RGB,
            ..cfg
        };
        let out = render(&src, &cfg).unwrap();
        assert_eq!(out.reports[0].pixels_written, 3 * axis(w) * axis(h));
    }

    #[test]
    fn untouched_pixels_keep_background() {
        let src = noise(24, 24, 9);
        for background in [Background::White, Background::Mean, Background::Source] {
            let cfg = RenderConfig {
                mode: SpotMode::Threshold {
                    params: ThresholdParams::new(2, 0.2).unwrap(),
                    reference: ReferencePoint::Displaced,
                },
                background,
                seed: 5,
                grid: GridParams::new(5, 8, 2).unwrap(),
                mask: ChannelMask::RGB,
                stop: StopRule::Passes { count: 3 },
            };
            let bg = init_background(&src, background);
            let out = render(&src, &cfg).unwrap();
            for y in 0..24 {
                for x in 0..24 {
                    if !out.cover.is_painted(Pixel::new(x, y)) {
                        assert_eq!(out.canvas.get_pixel(x, y), bg.get_pixel(x, y));
                    }
                }
            }
        }
    }

    #[test]
    fn reports_are_monotone_and_in_range() {
        let src = noise(30, 30, 2);
        let grid = GridParams::new(2, 7, 3).unwrap();
        let cfg = circle_cfg(1, grid, StopRule::Passes { count: 25 });
        let out = render(&src, &cfg).unwrap();
        assert_eq!(out.reports.len(), 25);
        for (i, r) in out.reports.iter().enumerate() {
            assert_eq!(r.pass_index, i);
            assert!((2..=7).contains(&r.stride_used));
        }
        for w in out.reports.windows(2) {
            assert!(w[0].coverage <= w[1].coverage);
        }
    }
}
