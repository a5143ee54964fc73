//! Synthetic equirectangular panoramas. Used by the test suites as fixture
//! inputs with known structure; handy for trying the renderer without a
//! real capture.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::equirect::EquirectImage;

fn lat_of_row(j: u32, height: u32) -> f64 {
    FRAC_PI_2 - PI * (j as f64 + 0.5) / height as f64
}

fn lon_of_col(i: u32, width: u32) -> f64 {
    -PI + 2.0 * PI * (i as f64 + 0.5) / width as f64
}

/// Encodes each pixel's own coordinates in color: `R = (sin lon + 1)/2`,
/// `G = (cos lon + 1)/2`, `B = (lat + pi/2)/pi`. Rendering this panorama
/// and decoding the colors recovers which source point fed each output
/// pixel.
pub fn coordinate_panorama(width: u32, height: u32) -> EquirectImage {
    EquirectImage::from_fn(width, height, |i, j| {
        let lon = lon_of_col(i, width);
        let lat = lat_of_row(j, height);
        [
            ((lon.sin() + 1.0) / 2.0) as f32,
            ((lon.cos() + 1.0) / 2.0) as f32,
            ((lat + FRAC_PI_2) / PI) as f32,
        ]
    })
}

/// Dark/bright grid lines over a mid-gray ground, textured everywhere
/// including the zenith rows.
pub fn grid_panorama(width: u32, height: u32) -> EquirectImage {
    EquirectImage::from_fn(width, height, |i, j| {
        let v = if (11..=12).contains(&(i % 24)) {
            0.0
        } else if (11..=12).contains(&(j % 24)) {
            1.0
        } else {
            0.5
        };
        [v, v, v]
    })
}

/// Indoor-like fixture: busy texture on the walls and floor, a nearly flat
/// low-saliency ceiling above 60 degrees latitude.
pub fn room_panorama(width: u32, height: u32) -> EquirectImage {
    EquirectImage::from_fn(width, height, |i, j| {
        let lat = lat_of_row(j, height);
        let v = if lat > PI / 3.0 {
            0.75 + 0.002 * (i as f64 * 0.05).sin()
        } else {
            0.5 + 0.45 * (i as f64 * 0.9).sin() * (j as f64 * 1.1).sin()
        };
        [v as f32, v as f32, v as f32]
    })
}

/// Smooth low-frequency waves everywhere; no flat regions.
pub fn waves_panorama(width: u32, height: u32) -> EquirectImage {
    EquirectImage::from_fn(width, height, |i, j| {
        let lon = lon_of_col(i, width);
        let lat = lat_of_row(j, height);
        let v = 0.5
            + 0.25 * (3.0 * lon).sin() * (2.0 * lat).cos()
            + 0.2 * (7.0 * lat + 1.0).sin()
            + 0.05 * (11.0 * lon).sin();
        [v.clamp(0.0, 1.0) as f32; 3]
    })
}
