//! Helpers shared by the CLI test binaries.

use std::path::Path;
use std::process::{Command, Output};

use birdseye_core::EquirectImage;

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_birdseye"))
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("failed to spawn birdseye")
}

/// Saves a synthetic panorama as an 8-bit RGB PNG.
pub fn save_panorama_png(img: &EquirectImage, path: &Path) {
    let mut bytes = Vec::with_capacity((img.width() * img.height() * 3) as usize);
    for j in 0..img.height() {
        for i in 0..img.width() {
            let px = img.pixel(i, j);
            for c in px {
                bytes.push((c.clamp(0.0, 1.0) * 255.0).round() as u8);
            }
        }
    }
    image::save_buffer(
        path,
        &bytes,
        img.width(),
        img.height(),
        image::ColorType::Rgb8,
    )
    .unwrap();
}

/// Peak signal-to-noise ratio between two equal-size RGBA byte buffers,
/// alpha ignored.
pub fn psnr_rgba(a: &[u8], b: &[u8]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut sum = 0.0f64;
    let mut n = 0usize;
    for (pa, pb) in a.chunks(4).zip(b.chunks(4)) {
        for k in 0..3 {
            let d = pa[k] as f64 - pb[k] as f64;
            sum += d * d;
        }
        n += 3;
    }
    let mse = sum / n as f64;
    if mse == 0.0 {
        return f64::INFINITY;
    }
    10.0 * (255.0f64 * 255.0 / mse).log10()
}

pub fn load_rgba(path: &Path) -> (u32, u32, Vec<u8>) {
    let img = image::open(path).unwrap().to_rgba8();
    let (w, h) = img.dimensions();
    (w, h, img.into_raw())
}
