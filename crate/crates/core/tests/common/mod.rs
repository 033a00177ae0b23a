#![allow(dead_code)]

use impressionist::{Raster, RngStream};

/// Uniform RGB noise from a seeded stream.
pub fn noise(width: usize, height: usize, seed: u64) -> Raster {
    let mut g = RngStream::from_seed(seed);
    let data = (0..width * height * 3)
        .map(|_| g.next_u64() as u8)
        .collect();
    Raster::from_raw(width, height, data).unwrap()
}

/// Left-to-right gradient in R, top-to-bottom in G, checkerboard in B.
pub fn test_pattern(width: usize, height: usize) -> Raster {
    let mut data = Vec::with_capacity(width * height * 3);
    for y in 0..height {
        for x in 0..width {
            data.push((x * 255 / width.max(2).saturating_sub(1).max(1)) as u8);
            data.push((y * 255 / height.max(2).saturating_sub(1).max(1)) as u8);
            data.push(if (x / 8 + y / 8) % 2 == 0 { 40 } else { 210 });
        }
    }
    Raster::from_raw(width, height, data).unwrap()
}
