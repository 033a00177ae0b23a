//! Golden-file check of a circle-mode rendering. Set
//! `IMPRESSIONIST_UPDATE_GOLDEN=1` to regenerate the stored files.

mod common;

use std::path::PathBuf;

use impressionist::imgio::{read_ppm, write_ppm};
use impressionist::{
    render, Background, ChannelMask, GridParams, Raster, RenderConfig, RngStream, SpotMode,
    StopRule,
};

fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn config(passes: usize) -> RenderConfig {
    RenderConfig {
        mode: SpotMode::Circle { rho: 2 },
        background: Background::White,
        seed: 2026,
        grid: GridParams::new(3, 5, 2).unwrap(),
        mask: ChannelMask::RGB,
        stop: StopRule::Passes { count: passes },
    }
}

fn source() -> Raster {
    let path = data_path("noise16.ppm");
    if std::env::var_os("IMPRESSIONIST_UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, write_ppm(&common::noise(16, 16, 16))).unwrap();
    }
    read_ppm(&std::fs::read(path).unwrap()).unwrap()
}

fn check_golden(name: &str, canvas: &Raster) {
    let path = data_path(name);
    let bytes = write_ppm(canvas);
    if std::env::var_os("IMPRESSIONIST_UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &bytes).unwrap();
    }
    let golden = std::fs::read(&path).unwrap();
    assert!(
        golden == bytes,
        "{name} differs from the stored golden output"
    );
}

/// Straight-line transcription of one circle pass: raw 64-bit draws with
/// explicit rejection, then every spot painted by testing all canvas pixels.
fn reference_circle_pass(
    src: &Raster,
    seed: u64,
    s_min: u64,
    s_max: u64,
    delta: i64,
    rho: i64,
) -> Raster {
    let mut g = RngStream::from_seed(seed);
    let mut draw = |lo: i64, hi: i64| -> i64 {
        let span = (hi - lo + 1) as u128;
        let limit = ((1u128 << 64) / span) * span;
        loop {
            let x = g.next_u64() as u128;
            if x < (1u128 << 64) - limit {
                continue;
            }
            return lo + (x % span) as i64;
        }
    };
    let (w, h) = (src.width() as i64, src.height() as i64);
    let s = draw(s_min as i64, s_max as i64);
    let mut canvas = Raster::new_filled(src.width(), src.height(), [255, 255, 255]).unwrap();
    let mut gy = 0;
    while gy < h {
        let mut gx = 0;
        while gx < w {
            let jx = (gx + draw(-delta, delta)).clamp(0, w - 1);
            let jy = (gy + draw(-delta, delta)).clamp(0, h - 1);
            let tone = src.get_pixel(gx as usize, gy as usize).unwrap();
            for y in 0..h {
                for x in 0..w {
                    if (x - jx).pow(2) + (y - jy).pow(2) <= rho * rho {
                        for (c, ch) in impressionist::Channel::ALL.into_iter().enumerate() {
                            canvas
                                .set_tone(x as usize, y as usize, ch, tone[c])
                                .unwrap();
                        }
                    }
                }
            }
            gx += s;
        }
        gy += s;
    }
    canvas
}

#[test]
fn single_pass_matches_reference_trace_and_golden() {
    let src = source();
    let out = render(&src, &config(1)).unwrap();
    let reference = reference_circle_pass(&src, 2026, 3, 5, 2, 2);
    assert_eq!(out.canvas, reference);
    check_golden("noise16_circle_1pass.ppm", &out.canvas);
}

#[test]
fn three_passes_match_golden() {
    let src = source();
    let out = render(&src, &config(3)).unwrap();
    assert_eq!(out.reports.len(), 3);
    check_golden("noise16_circle_3pass.ppm", &out.canvas);
}
