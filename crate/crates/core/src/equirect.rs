//! Equirectangular panorama raster and image I/O.
//!
//! Convention (the contract every sampler and test relies on): pixel
//! `(i, j)` with `i` in `[0, W)`, `j` in `[0, H)` has its center at
//! `lon = -pi + 2 pi (i + 0.5) / W`, `lat = pi/2 - pi (j + 0.5) / H`.
//! Columns wrap in longitude; rows clamp in latitude. Row 0 is the zenith
//! side.

use std::fs;
use std::path::Path;

use crate::azimuthal::GeoCoord;
use crate::error::{Error, Result};

/// How to fetch a color between pixel centers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interpolation {
    Nearest,
    Bilinear,
}

/// An equirectangular panorama held as real-valued RGB in `[0, 1]`,
/// row-major.
#[derive(Debug, Clone)]
pub struct EquirectImage {
    width: u32,
    height: u32,
    data: Vec<f32>,
}

impl EquirectImage {
    pub fn new(width: u32, height: u32, data: Vec<f32>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::config("image dimensions must be nonzero"));
        }
        if data.len() != (width as usize) * (height as usize) * 3 {
            return Err(Error::config(format!(
                "pixel buffer length {} does not match {}x{} RGB",
                data.len(),
                width,
                height
            )));
        }
        Ok(EquirectImage {
            width,
            height,
            data,
        })
    }

    /// Builds a synthetic panorama from a per-pixel function returning RGB
    /// in `[0, 1]`.
    pub fn from_fn(width: u32, height: u32, f: impl Fn(u32, u32) -> [f32; 3]) -> Self {
        let mut data = Vec::with_capacity((width as usize) * (height as usize) * 3);
        for j in 0..height {
            for i in 0..width {
                data.extend_from_slice(&f(i, j));
            }
        }
        EquirectImage {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixel(&self, i: u32, j: u32) -> [f32; 3] {
        let idx = (j as usize * self.width as usize + i as usize) * 3;
        [self.data[idx], self.data[idx + 1], self.data[idx + 2]]
    }

    /// True when the raster has the usual 2:1 panorama shape (within one
    /// pixel) and at least two columns. Violations are worth a warning, not
    /// an error.
    pub fn is_standard_aspect(&self) -> bool {
        self.width >= 2 && (self.width as i64 - 2 * self.height as i64).abs() <= 1
    }

    /// Geodetic coordinates of a pixel center.
    pub fn pixel_center(&self, i: u32, j: u32) -> GeoCoord {
        let lon = -std::f64::consts::PI
            + 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / self.width as f64;
        let lat = std::f64::consts::FRAC_PI_2
            - std::f64::consts::PI * (j as f64 + 0.5) / self.height as f64;
        GeoCoord::normalized(lon, lat)
    }

    /// Continuous (column, row) coordinates of a geodetic point under the
    /// raster convention; columns are not yet wrapped.
    pub fn geo_to_pixel(&self, g: GeoCoord) -> (f64, f64) {
        let col = (g.lon() + std::f64::consts::PI) / (2.0 * std::f64::consts::PI)
            * self.width as f64
            - 0.5;
        let row = (std::f64::consts::FRAC_PI_2 - g.lat()) / std::f64::consts::PI
            * self.height as f64
            - 0.5;
        (col, row)
    }

    /// Nearest source pixel of a geodetic point (columns wrapped, rows
    /// clamped).
    pub fn nearest_pixel(&self, g: GeoCoord) -> (u32, u32) {
        let (col, row) = self.geo_to_pixel(g);
        let i = (col.round() as i64).rem_euclid(self.width as i64) as u32;
        let j = (row.round() as i64).clamp(0, self.height as i64 - 1) as u32;
        (i, j)
    }

    /// Samples the panorama at a geodetic point. Bilinear interpolation
    /// wraps in longitude and clamps in latitude; nearest mode is exact at
    /// pixel centers.
    pub fn sample(&self, g: GeoCoord, interp: Interpolation) -> [f64; 3] {
        match interp {
            Interpolation::Nearest => {
                let (i, j) = self.nearest_pixel(g);
                let px = self.pixel(i, j);
                [px[0] as f64, px[1] as f64, px[2] as f64]
            }
            Interpolation::Bilinear => {
                let (col, row) = self.geo_to_pixel(g);
                let c0 = col.floor();
                let r0 = row.floor();
                let fc = col - c0;
                let fr = row - r0;
                let w = self.width as i64;
                let h = self.height as i64;
                let ca = (c0 as i64).rem_euclid(w) as u32;
                let cb = (c0 as i64 + 1).rem_euclid(w) as u32;
                let ra = (r0 as i64).clamp(0, h - 1) as u32;
                let rb = (r0 as i64 + 1).clamp(0, h - 1) as u32;
                let p00 = self.pixel(ca, ra);
                let p10 = self.pixel(cb, ra);
                let p01 = self.pixel(ca, rb);
                let p11 = self.pixel(cb, rb);
                let mut out = [0.0f64; 3];
                for (k, o) in out.iter_mut().enumerate() {
                    let top = p00[k] as f64 * (1.0 - fc) + p10[k] as f64 * fc;
                    let bot = p01[k] as f64 * (1.0 - fc) + p11[k] as f64 * fc;
                    *o = top * (1.0 - fr) + bot * fr;
                }
                out
            }
        }
    }
}

/// Rendered output: 8-bit RGBA, row-major. Alpha is zero exactly on pixels
/// that received no source sample.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputImage {
    pub width: u32,
    pub height: u32,
    pub data: Vec<u8>,
}

impl OutputImage {
    pub fn filled(width: u32, height: u32, rgba: [u8; 4]) -> Self {
        let mut data = Vec::with_capacity((width as usize) * (height as usize) * 4);
        for _ in 0..(width as usize) * (height as usize) {
            data.extend_from_slice(&rgba);
        }
        OutputImage {
            width,
            height,
            data,
        }
    }

    pub fn pixel(&self, i: u32, j: u32) -> [u8; 4] {
        let idx = (j as usize * self.width as usize + i as usize) * 4;
        [
            self.data[idx],
            self.data[idx + 1],
            self.data[idx + 2],
            self.data[idx + 3],
        ]
    }
}

/// Reads a panorama from PNG or JPEG; any supported layout is converted to
/// 8-bit RGB and scaled to `[0, 1]`.
pub fn read_image(path: impl AsRef<Path>) -> Result<EquirectImage> {
    let path = path.as_ref();
    let dynimg = image::open(path).map_err(|e| Error::io(path, e))?;
    let rgb = dynimg.to_rgb8();
    let (w, h) = rgb.dimensions();
    if w == 0 || h == 0 {
        return Err(Error::io(path, "image has a zero dimension"));
    }
    let data = rgb.as_raw().iter().map(|&b| b as f32 / 255.0).collect();
    EquirectImage::new(w, h, data)
}

/// Writes an output image as RGBA PNG. The file is written to a temporary
/// sibling first and renamed into place, so failures never leave a partial
/// file at the destination.
pub fn write_image(path: impl AsRef<Path>, img: &OutputImage) -> Result<()> {
    let path = path.as_ref();
    let format = image::ImageFormat::from_path(path).unwrap_or(image::ImageFormat::Png);
    let tmp = temp_sibling(path);
    let result = image::save_buffer_with_format(
        &tmp,
        &img.data,
        img.width,
        img.height,
        image::ColorType::Rgba8,
        format,
    )
    .map_err(|e| Error::io(path, e))
    .and_then(|()| fs::rename(&tmp, path).map_err(|e| Error::io(path, e)));
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

/// Writes a scalar field as an 8-bit grayscale PNG. Values are clamped to
/// `[0, 1]` first; pass `scale` to bring unbounded fields into range.
pub fn write_gray_png(
    path: impl AsRef<Path>,
    width: u32,
    height: u32,
    values: &[f64],
    scale: f64,
) -> Result<()> {
    let path = path.as_ref();
    if values.len() != (width as usize) * (height as usize) {
        return Err(Error::config("field length does not match dimensions"));
    }
    let bytes: Vec<u8> = values
        .iter()
        .map(|&v| ((v * scale).clamp(0.0, 1.0) * 255.0).round() as u8)
        .collect();
    let tmp = temp_sibling(path);
    let result = image::save_buffer_with_format(
        &tmp,
        &bytes,
        width,
        height,
        image::ColorType::L8,
        image::ImageFormat::Png,
    )
    .map_err(|e| Error::io(path, e))
    .and_then(|()| fs::rename(&tmp, path).map_err(|e| Error::io(path, e)));
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

fn temp_sibling(path: &Path) -> std::path::PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".partial");
    path.with_file_name(name)
}
