//! Seed-reproducible impressionist / pointillist rendering.
//!
//! A render repeatedly samples a jittered pixel grid from the source image
//! and stamps a colour spot at every sample. Spots are circles, rectangles
//! sized from local tone contrast, or threshold regions grown from the
//! sample's tone. Everything is driven by a single seeded generator, so a
//! `(source, config)` pair always yields the same canvas.

pub mod cli;
pub mod engine;
pub mod error;
pub mod imgio;
pub mod raster;
pub mod rng;
pub mod sampler;
pub mod spots;

pub use engine::{
    init_background, render, run_pass, Background, CoverMap, PassReport, RenderConfig, Rendering,
    SpotMode, StopRule,
};
pub use error::{Error, Result};
pub use raster::{clamp_coord, Channel, ChannelMask, Raster, Rgb};
pub use rng::RngStream;
pub use sampler::{GridParams, Pixel, SamplePoint};
pub use spots::{RectParams, ReferencePoint, ThresholdParams};
