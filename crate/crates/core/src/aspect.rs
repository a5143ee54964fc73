//! Rotational aspect of the sphere.
//!
//! The projection kernels are written for the canonical south polar aspect;
//! any other orientation is obtained by rotating the sphere first. The
//! rotation that moves a chosen center `(lon0, lat0)` to the projection
//! center (the south pole) is `Rz(roll) * Ry(lat0 + pi/2) * Rz(-lon0)`;
//! rendering applies its transpose to go from canonical coordinates back to
//! the source panorama.

use std::f64::consts::FRAC_PI_2;

use crate::azimuthal::GeoCoord;
use crate::error::{Error, Result};

/// A 3x3 rotation matrix (row-major).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation3([[f64; 3]; 3]);

impl Rotation3 {
    pub fn identity() -> Self {
        Rotation3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    }

    fn rz(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Rotation3([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    }

    fn ry(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Rotation3([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        Rotation3([
            [m[0][0], m[1][0], m[2][0]],
            [m[0][1], m[1][1], m[2][1]],
            [m[0][2], m[1][2], m[2][2]],
        ])
    }

    /// `self * other` (other acts first on a column vector).
    pub fn compose(&self, other: &Rotation3) -> Self {
        let a = &self.0;
        let b = &other.0;
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
            }
        }
        Rotation3(out)
    }

    pub fn mul_vec(&self, v: [f64; 3]) -> [f64; 3] {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
        ]
    }

    /// Max deviation of `R^T R` from the identity plus `|det - 1|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let t = self.transpose().compose(self);
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((t.0[i][j] - want).abs());
            }
        }
        let m = &self.0;
        let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        worst.max((det - 1.0).abs())
    }
}

/// Which point of the sphere sits at the projection center, plus an image
/// roll. The default `(0, -pi/2, 0)` is the south polar aspect (identity).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AspectSpec {
    pub center_lon: f64,
    pub center_lat: f64,
    pub roll: f64,
}

impl Default for AspectSpec {
    fn default() -> Self {
        AspectSpec {
            center_lon: 0.0,
            center_lat: -FRAC_PI_2,
            roll: 0.0,
        }
    }
}

impl AspectSpec {
    pub fn new(center_lon: f64, center_lat: f64, roll: f64) -> Result<Self> {
        if !(center_lon.is_finite() && center_lat.is_finite() && roll.is_finite()) {
            return Err(Error::config("aspect angles must be finite"));
        }
        Ok(AspectSpec {
            center_lon,
            center_lat,
            roll,
        })
    }
}

/// Geodetic point to a unit vector:
/// `(cos lat cos lon, cos lat sin lon, sin lat)`.
pub fn geo_to_vec(g: GeoCoord) -> [f64; 3] {
    let (slat, clat) = g.lat().sin_cos();
    let (slon, clon) = g.lon().sin_cos();
    [clat * clon, clat * slon, slat]
}

/// Unit vector back to geodetic coordinates; the input is renormalized, the
/// poles return `lon = 0`.
pub fn vec_to_geo(v: [f64; 3]) -> Result<GeoCoord> {
    let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if !norm.is_finite() || norm <= 1e-12 {
        return Err(Error::domain("cannot normalize a zero vector"));
    }
    let z = (v[2] / norm).clamp(-1.0, 1.0);
    let lon = if v[0] == 0.0 && v[1] == 0.0 {
        0.0
    } else {
        v[1].atan2(v[0])
    };
    Ok(GeoCoord::new_unchecked(lon, z.asin()))
}

/// Rotation taking the spec's center to the south pole, with an extra roll
/// about the projection axis.
pub fn rotation_from_spec(spec: &AspectSpec) -> Rotation3 {
    Rotation3::rz(spec.roll)
        .compose(&Rotation3::ry(spec.center_lat + FRAC_PI_2))
        .compose(&Rotation3::rz(-spec.center_lon))
}

/// Rotates a geodetic point by `r`.
pub fn apply_aspect(g: GeoCoord, r: &Rotation3) -> GeoCoord {
    vec_to_geo(r.mul_vec(geo_to_vec(g))).expect("rotated unit vector is never zero")
}
