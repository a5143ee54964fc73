//! Cylindrical counterparts of the azimuthal blend: Mercator (conformal),
//! Lambert cylindrical equal-area (equiareal), a blend between them, and
//! the generalized equal-area family with a standard latitude, plus a
//! panorama re-renderer through any of these.
//!
//! All projections share `x = k * lon`, `y = f(lat)`; only `f` and `k`
//! differ. The blend satisfies `y(0) = 0` exactly, is odd in latitude, and
//! stays finite at the poles for every `beta > 0`; only Mercator itself is
//! allowed infinite poles, and it is exposed as its own kernel rather than
//! as `beta = 0`.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;

use crate::azimuthal::GeoCoord;
use crate::equirect::{EquirectImage, Interpolation, OutputImage};
use crate::error::{Error, Result};

/// Projected cylindrical coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylPoint {
    pub x: f64,
    pub y: f64,
}

/// Standard latitude of the generalized equal-area family, in `[0, pi/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StdLatitude(f64);

impl StdLatitude {
    pub fn new(phi0: f64) -> Result<Self> {
        if !phi0.is_finite() || !(0.0..FRAC_PI_2).contains(&phi0) {
            return Err(Error::config(format!(
                "standard latitude {phi0} outside [0, pi/2)"
            )));
        }
        Ok(StdLatitude(phi0))
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    pub fn cos(&self) -> f64 {
        self.0.cos()
    }
}

/// Mercator: `y = ln tan(pi/4 + lat/2)`. The poles map to infinity by
/// design, reported as such rather than as an error.
pub fn mercator_forward(lat: f64) -> f64 {
    if lat >= FRAC_PI_2 {
        return f64::INFINITY;
    }
    if lat <= -FRAC_PI_2 {
        return f64::NEG_INFINITY;
    }
    lat.tan().asinh()
}

pub fn mercator_inverse(y: f64) -> f64 {
    // pi/2 - 2 atan(exp(-y)), in the numerically friendlier form.
    y.sinh().atan()
}

/// Lambert cylindrical equal-area: `y = sin lat`.
pub fn lambert_forward(lat: f64) -> f64 {
    lat.sin()
}

pub fn lambert_inverse(y: f64) -> Result<f64> {
    if y.abs() > 1.0 + 1e-12 {
        return Err(Error::domain(format!(
            "Lambert ordinate {y} outside [-1, 1]"
        )));
    }
    Ok(y.clamp(-1.0, 1.0).asin())
}

fn check_beta(beta: f64) -> Result<()> {
    if !beta.is_finite() || beta <= 0.0 || beta > 1.0 {
        return Err(Error::domain(format!(
            "cylindrical blend requires beta in (0, 1], got {beta}; use the Mercator kernel for beta = 0"
        )));
    }
    Ok(())
}

/// Blended cylindrical ordinate. Odd in latitude, zero at the equator,
/// finite at the poles for every valid `beta`; equals `sin lat` exactly at
/// `beta = 1` and converges to Mercator as `beta -> 0`.
pub fn blended_forward(lat: f64, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    if beta == 1.0 {
        return Ok(lat.sin());
    }
    let sign = if lat < 0.0 { -1.0 } else { 1.0 };
    let sp = lat.abs().min(FRAC_PI_2).sin();
    let b1 = 1.0 - beta;
    // y = (1+beta)/(2 beta) * (A^beta - B^beta) with A, B as below; evaluated
    // as B^beta * expm1(beta ln(A/B)) so the small-beta cancellation never
    // happens in floating point.
    let ratio = (b1 + sp) / (b1 * (1.0 - b1 * sp));
    let bpow = (beta * b1.ln()).exp();
    Ok(sign * (1.0 + beta) / (2.0 * beta) * bpow * (beta * ratio.ln()).exp_m1())
}

/// Inverse of [`blended_forward`].
pub fn blended_inverse(y: f64, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    if beta == 1.0 {
        return lambert_inverse(y);
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    let ymax = blended_forward(FRAC_PI_2, beta)?;
    let ay = y.abs();
    if ay > ymax * (1.0 + 1e-12) + 1e-12 {
        return Err(Error::domain(format!(
            "ordinate {y} outside the blend's range [-{ymax}, {ymax}] at beta={beta}"
        )));
    }
    // asin amplifies rounding unboundedly at the pole ordinate; snap there.
    if ay >= ymax * (1.0 - 1e-12) {
        return Ok(y.signum() * FRAC_PI_2);
    }
    let b1 = 1.0 - beta;
    // C = (1-beta)^beta + 2 beta |y| / (1+beta), then T = C^(1/beta); both in
    // log space so 1/beta up to 1000 keeps full precision.
    let g = beta * b1.ln();
    let q = 2.0 * beta * ay / (1.0 + beta);
    let ln_c = (g.exp_m1() + q).ln_1p();
    let t = (ln_c / beta).exp();
    let arg = ((t - 1.0 + beta) / (t * b1 + 1.0)).clamp(-1.0, 1.0);
    Ok(y.signum() * arg.asin())
}

/// Generalized cylindrical equal-area: `x = lon cos(phi0)`,
/// `y = sin(lat)/cos(phi0)`. `phi0 = 0` is Lambert's projection; 30 degrees
/// is Behrmann's, 45 degrees Gall-Peters.
pub fn generalized_forward(lon: f64, lat: f64, phi0: StdLatitude) -> CylPoint {
    CylPoint {
        x: lon * phi0.cos(),
        y: lat.sin() / phi0.cos(),
    }
}

pub fn generalized_inverse(p: CylPoint, phi0: StdLatitude) -> Result<GeoCoord> {
    let lat = lambert_inverse(p.y * phi0.cos())?;
    GeoCoord::new(p.x / phi0.cos(), lat)
}

/// Blend of Mercator and the generalized equal-area family:
/// `x = lon cos(phi0)^beta`, `y = blended(lat) / cos(phi0)^beta`.
pub fn blended_generalized_forward(
    lon: f64,
    lat: f64,
    beta: f64,
    phi0: StdLatitude,
) -> Result<CylPoint> {
    let cb = phi0.cos().powf(beta);
    Ok(CylPoint {
        x: lon * cb,
        y: blended_forward(lat, beta)? / cb,
    })
}

pub fn blended_generalized_inverse(p: CylPoint, beta: f64, phi0: StdLatitude) -> Result<GeoCoord> {
    let cb = phi0.cos().powf(beta);
    let lat = blended_inverse(p.y * cb, beta)?;
    GeoCoord::new(p.x / cb, lat)
}

/// A cylindrical projection the renderer can sample through.
pub trait CylindricalKernel: Send + Sync {
    fn name(&self) -> &'static str;
    /// Half the projected x extent (the full map spans `[-span, span]`).
    fn x_half_span(&self) -> f64;
    /// Largest projected ordinate (the map spans `[-y_max, y_max]`).
    fn y_max(&self) -> f64;
    fn lon_from_x(&self, x: f64) -> f64;
    fn lat_from_y(&self, y: f64) -> Result<f64>;
}

/// The blended generalized equal-area kernel.
#[derive(Debug, Clone, Copy)]
pub struct BlendedKernel {
    beta: f64,
    cb: f64,
    y_max: f64,
}

impl BlendedKernel {
    pub fn new(beta: f64, phi0: StdLatitude) -> Result<Self> {
        check_beta(beta)?;
        let cb = phi0.cos().powf(beta);
        let y_max = blended_forward(FRAC_PI_2, beta)? / cb;
        Ok(BlendedKernel { beta, cb, y_max })
    }
}

impl CylindricalKernel for BlendedKernel {
    fn name(&self) -> &'static str {
        "blended"
    }

    fn x_half_span(&self) -> f64 {
        std::f64::consts::PI * self.cb
    }

    fn y_max(&self) -> f64 {
        self.y_max
    }

    fn lon_from_x(&self, x: f64) -> f64 {
        x / self.cb
    }

    fn lat_from_y(&self, y: f64) -> Result<f64> {
        blended_inverse(y * self.cb, self.beta)
    }
}

/// Mercator kernel, cropped at a maximum latitude since the full map is
/// infinitely tall.
#[derive(Debug, Clone, Copy)]
pub struct MercatorKernel {
    y_max: f64,
}

impl MercatorKernel {
    pub fn new(max_lat: f64) -> Result<Self> {
        if !max_lat.is_finite() || max_lat <= 0.0 || max_lat >= FRAC_PI_2 {
            return Err(Error::config(format!(
                "Mercator crop latitude {max_lat} outside (0, pi/2)"
            )));
        }
        Ok(MercatorKernel {
            y_max: mercator_forward(max_lat),
        })
    }
}

impl CylindricalKernel for MercatorKernel {
    fn name(&self) -> &'static str {
        "mercator"
    }

    fn x_half_span(&self) -> f64 {
        std::f64::consts::PI
    }

    fn y_max(&self) -> f64 {
        self.y_max
    }

    fn lon_from_x(&self, x: f64) -> f64 {
        x
    }

    fn lat_from_y(&self, y: f64) -> Result<f64> {
        Ok(mercator_inverse(y))
    }
}

/// Re-renders an equirectangular panorama through a cylindrical kernel by
/// backward sampling over the kernel's full rectangle. Every output pixel
/// receives a sample.
pub fn project_cylindrical(
    img: &EquirectImage,
    kernel: &dyn CylindricalKernel,
    out_width: u32,
    out_height: u32,
    interp: Interpolation,
) -> Result<OutputImage> {
    if out_width == 0 || out_height == 0 {
        return Err(Error::config("output dimensions must be nonzero"));
    }
    let xs = kernel.x_half_span();
    let ys = kernel.y_max();
    let mut data = vec![0u8; (out_width as usize) * (out_height as usize) * 4];
    data.par_chunks_mut(out_width as usize * 4)
        .enumerate()
        .for_each(|(j, row)| {
            for i in 0..out_width {
                let x = xs * (-1.0 + 2.0 * (i as f64 + 0.5) / out_width as f64);
                let y = ys * (1.0 - 2.0 * (j as f64 + 0.5) / out_height as f64);
                let lat = kernel
                    .lat_from_y(y)
                    .expect("pixel centers stay inside the kernel range");
                let g = GeoCoord::normalized(kernel.lon_from_x(x), lat);
                let rgb = img.sample(g, interp);
                let px = &mut row[i as usize * 4..i as usize * 4 + 4];
                px[0] = (rgb[0].clamp(0.0, 1.0) * 255.0).round() as u8;
                px[1] = (rgb[1].clamp(0.0, 1.0) * 255.0).round() as u8;
                px[2] = (rgb[2].clamp(0.0, 1.0) * 255.0).round() as u8;
                px[3] = 255;
            }
        });
    Ok(OutputImage {
        width: out_width,
        height: out_height,
        data,
    })
}
