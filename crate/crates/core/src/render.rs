//! The backward-sampling render pipeline: for every output pixel, walk the
//! chain plane point -> rectifier -> blended azimuthal inverse -> aspect
//! rotation -> panorama sample.

use rayon::prelude::*;

use crate::aspect::{apply_aspect, rotation_from_spec, AspectSpec};
use crate::azimuthal::{elliptical_disc_to_geo, r_from_lat, BlendBeta, DiscPoint, EllipseAxes};
use crate::equirect::{EquirectImage, Interpolation, OutputImage};
use crate::error::{Error, Result};
use crate::rectify::{rect_to_ellipse, RectifierKind};
use std::f64::consts::FRAC_PI_2;

/// Everything one render needs.
#[derive(Debug, Clone)]
pub struct ProjectionConfig {
    pub beta: BlendBeta,
    pub rectifier: RectifierKind,
    pub axes: EllipseAxes,
    pub aspect: AspectSpec,
    /// Latitude carried by the image rim; `pi/2` means no ceiling crop.
    pub ceiling_cap: f64,
    pub out_width: u32,
    pub out_height: u32,
    pub interpolation: Interpolation,
    /// Fill for pixels with no source sample (rectifier `None` outside the
    /// inscribed disc).
    pub background: [u8; 4],
}

impl ProjectionConfig {
    pub fn new(beta: BlendBeta) -> Self {
        ProjectionConfig {
            beta,
            rectifier: RectifierKind::Squircle,
            axes: EllipseAxes::unit(),
            aspect: AspectSpec::default(),
            ceiling_cap: FRAC_PI_2,
            out_width: 1024,
            out_height: 1024,
            interpolation: Interpolation::Bilinear,
            background: [0, 0, 0, 0],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.out_width == 0 || self.out_height == 0 {
            return Err(Error::config("output dimensions must be nonzero"));
        }
        self.rectifier.validate()?;
        if !self.ceiling_cap.is_finite()
            || self.ceiling_cap <= -FRAC_PI_2
            || self.ceiling_cap > FRAC_PI_2
        {
            return Err(Error::config(format!(
                "ceiling cap {} outside (-pi/2, pi/2]",
                self.ceiling_cap
            )));
        }
        if self.rectifier != RectifierKind::None {
            // The rectangle must have the ellipse's aspect ratio, to within
            // half an output pixel.
            let want_h = self.out_width as f64 * self.axes.b() / self.axes.a();
            if (self.out_height as f64 - want_h).abs() > 0.5 + 1e-9 {
                return Err(Error::config(format!(
                    "output size {}x{} does not match ellipse ratio {}:{}",
                    self.out_width,
                    self.out_height,
                    self.axes.a(),
                    self.axes.b()
                )));
            }
        }
        Ok(())
    }
}

/// Center of output pixel `(i, j)` in plane coordinates
/// `[-a, a] x [-b, b]`, `y` axis pointing up (row 0 is the top).
pub fn pixel_to_plane(
    i: u32,
    j: u32,
    out_width: u32,
    out_height: u32,
    axes: EllipseAxes,
) -> (f64, f64) {
    let x = axes.a() * (-1.0 + 2.0 * (i as f64 + 0.5) / out_width as f64);
    let y = axes.b() * (1.0 - 2.0 * (j as f64 + 0.5) / out_height as f64);
    (x, y)
}

/// Renders a panorama through the configured projection. The pixel loop is
/// data-parallel over rows; every pixel is pure in its inputs, so the result
/// is byte-identical for any thread count.
pub fn project(img: &EquirectImage, config: &ProjectionConfig) -> Result<OutputImage> {
    config.validate()?;
    let rectifier = config.rectifier.build();
    let rotation = rotation_from_spec(&config.aspect).transpose();
    let r_cap = if config.ceiling_cap >= FRAC_PI_2 - 1e-15 {
        1.0
    } else {
        r_from_lat(config.ceiling_cap, config.beta)?
    };
    let (w, h) = (config.out_width, config.out_height);
    let a = config.axes.a();
    let b = config.axes.b();

    let mut data = vec![0u8; (w as usize) * (h as usize) * 4];
    data.par_chunks_mut(w as usize * 4)
        .enumerate()
        .for_each(|(j, row)| {
            for i in 0..w {
                let (x, y) = pixel_to_plane(i, j as u32, w, h, config.axes);
                let plane = match &rectifier {
                    Some(rect) => rect_to_ellipse(x, y, config.axes, rect.as_ref()),
                    None => {
                        if x * x / (a * a) + y * y / (b * b) > 1.0 {
                            let px = &mut row[i as usize * 4..i as usize * 4 + 4];
                            px.copy_from_slice(&config.background);
                            continue;
                        }
                        DiscPoint::new(x, y)
                    }
                };
                let capped = DiscPoint::new(plane.u * r_cap, plane.v * r_cap);
                let geo = elliptical_disc_to_geo(capped, config.beta, config.axes)
                    .expect("pipeline points stay inside the ellipse");
                let src = apply_aspect(geo, &rotation);
                let rgb = img.sample(src, config.interpolation);
                let px = &mut row[i as usize * 4..i as usize * 4 + 4];
                px[0] = (rgb[0].clamp(0.0, 1.0) * 255.0).round() as u8;
                px[1] = (rgb[1].clamp(0.0, 1.0) * 255.0).round() as u8;
                px[2] = (rgb[2].clamp(0.0, 1.0) * 255.0).round() as u8;
                px[3] = 255;
            }
        });

    Ok(OutputImage {
        width: w,
        height: h,
        data,
    })
}
