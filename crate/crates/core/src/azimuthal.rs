//! Polar azimuthal projection kernels.
//!
//! All projections here share the same polar form: longitude is the azimuth
//! of the planar point and latitude depends only on the distance `r` to the
//! projection center. Four latitude profiles are provided:
//!
//! * stereographic (conformal, spans the whole plane),
//! * Lambert azimuthal equal-area (equiareal, spans the unit disc),
//! * a blend of the two controlled by `beta` (spans a disc of radius `1/beta`),
//! * a normalized blend that maps to the unit disc for every `beta`.
//!
//! The south pole sits at the disc center (`r = 0`), the north pole on the
//! rim. Conventions fixed here and relied on everywhere else:
//!
//! * `lon = atan2(u, v)`, i.e. `u = r sin(lon)`, `v = r cos(lon)`; the `v`
//!   axis is the prime meridian.
//! * Latitude/longitude are radians, `lat` in `[-pi/2, pi/2]`, `lon` in
//!   `[-pi, pi]`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

/// Lower bound of the normalized blend parameter. The normalized projection
/// is undefined at `beta = 0`; the unnormalized blend accepts it.
pub const BETA_MIN: f64 = 1e-3;

/// Membership tolerance on squared radius for disc/ellipse domain checks.
pub const DISC_TOL: f64 = 1e-9;

/// Radii within this distance of the rim snap to the exact pole latitude.
const POLE_SNAP: f64 = 1e-12;

/// A point on the sphere in geodetic coordinates (radians).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoCoord {
    lon: f64,
    lat: f64,
}

impl GeoCoord {
    /// Validating constructor; rejects out-of-range coordinates.
    pub fn new(lon: f64, lat: f64) -> Result<Self> {
        if !lon.is_finite() || !lat.is_finite() {
            return Err(Error::domain("geo coordinate must be finite"));
        }
        if lon.abs() > PI + 1e-12 {
            return Err(Error::domain(format!("longitude {lon} outside [-pi, pi]")));
        }
        if lat.abs() > FRAC_PI_2 + 1e-12 {
            return Err(Error::domain(format!(
                "latitude {lat} outside [-pi/2, pi/2]"
            )));
        }
        Ok(GeoCoord {
            lon: lon.clamp(-PI, PI),
            lat: lat.clamp(-FRAC_PI_2, FRAC_PI_2),
        })
    }

    /// Wraps longitude into `[-pi, pi)` and clamps latitude; never fails on
    /// finite input.
    pub fn normalized(lon: f64, lat: f64) -> Self {
        let lon = (lon + PI).rem_euclid(2.0 * PI) - PI;
        GeoCoord {
            lon,
            lat: lat.clamp(-FRAC_PI_2, FRAC_PI_2),
        }
    }

    pub(crate) fn new_unchecked(lon: f64, lat: f64) -> Self {
        debug_assert!(lon.abs() <= PI + 1e-9 && lat.abs() <= FRAC_PI_2 + 1e-9);
        GeoCoord { lon, lat }
    }

    pub fn lon(&self) -> f64 {
        self.lon
    }

    pub fn lat(&self) -> f64 {
        self.lat
    }
}

/// A point in the projection plane (disc or ellipse interior).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscPoint {
    pub u: f64,
    pub v: f64,
}

impl DiscPoint {
    pub fn new(u: f64, v: f64) -> Self {
        DiscPoint { u, v }
    }

    pub fn radius_sq(&self) -> f64 {
        self.u * self.u + self.v * self.v
    }

    pub fn radius(&self) -> f64 {
        self.radius_sq().sqrt()
    }
}

/// Blend parameter for the normalized projection, kept in `[BETA_MIN, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlendBeta(f64);

impl BlendBeta {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || !(BETA_MIN..=1.0).contains(&value) {
            return Err(Error::config(format!(
                "blend parameter {value} outside [{BETA_MIN}, 1]"
            )));
        }
        Ok(BlendBeta(value))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// Ellipse semi-axes: `a` horizontal (major), `b` vertical (minor).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseAxes {
    a: f64,
    b: f64,
}

impl EllipseAxes {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || b <= 0.0 || a < b {
            return Err(Error::config(format!(
                "ellipse axes must satisfy a >= b > 0, got a={a}, b={b}"
            )));
        }
        Ok(EllipseAxes { a, b })
    }

    /// Unit circle.
    pub fn unit() -> Self {
        EllipseAxes { a: 1.0, b: 1.0 }
    }

    /// Normalized ellipse with `b = 1` and the given semi-major axis.
    pub fn from_semi_major(a: f64) -> Result<Self> {
        EllipseAxes::new(a, 1.0)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn is_unit(&self) -> bool {
        self.a == 1.0 && self.b == 1.0
    }
}

/// Stereographic latitude profile, south polar aspect: `lat = 2 atan(r) - pi/2`.
pub fn stereographic_lat_from_r(r: f64) -> Result<f64> {
    if r.is_nan() || r < 0.0 {
        return Err(Error::domain(format!("stereographic radius {r} < 0")));
    }
    Ok(2.0 * r.atan() - FRAC_PI_2)
}

/// Lambert azimuthal equal-area latitude profile: `lat = 2 asin(r) - pi/2`.
pub fn lambert_lat_from_r(r: f64) -> Result<f64> {
    if r.is_nan() || !(0.0..=1.0 + DISC_TOL).contains(&r) {
        return Err(Error::domain(format!("Lambert radius {r} outside [0, 1]")));
    }
    Ok(2.0 * r.min(1.0).asin() - FRAC_PI_2)
}

/// Blended latitude profile spanning `0 <= r <= 1/beta`. `beta = 0` is the
/// stereographic limit (unbounded span), `beta = 1` the Lambert profile.
pub fn blended_lat_from_r(r: f64, beta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::domain(format!(
            "blend parameter {beta} outside [0, 1]"
        )));
    }
    if r.is_nan() || r < 0.0 {
        return Err(Error::domain(format!("blended radius {r} < 0")));
    }
    // x = beta * r must stay below 1; the rim of the 1/beta disc is the pole.
    let x = beta * r;
    if x > 1.0 + DISC_TOL {
        return Err(Error::domain(format!(
            "blended radius {r} outside [0, 1/beta] for beta={beta}"
        )));
    }
    if x >= 1.0 - POLE_SNAP {
        return Ok(FRAC_PI_2);
    }
    Ok(2.0 * (r / ((1.0 - x) * (1.0 + x)).sqrt()).atan() - FRAC_PI_2)
}

/// Normalized blended latitude profile on the unit disc.
pub fn lat_from_r(r: f64, beta: BlendBeta) -> Result<f64> {
    if r.is_nan() || !(0.0..=1.0 + DISC_TOL).contains(&r) {
        return Err(Error::domain(format!("radius {r} outside [0, 1]")));
    }
    if r >= 1.0 - POLE_SNAP {
        // Analytic limit at the rim; never divide by sqrt(1 - r^2) = 0.
        return Ok(FRAC_PI_2);
    }
    let b = beta.value();
    Ok(2.0 * (r / (b * ((1.0 - r) * (1.0 + r)).sqrt())).atan() - FRAC_PI_2)
}

/// Inverse of [`lat_from_r`].
pub fn r_from_lat(lat: f64, beta: BlendBeta) -> Result<f64> {
    if !lat.is_finite() || lat.abs() > FRAC_PI_2 + 1e-12 {
        return Err(Error::domain(format!(
            "latitude {lat} outside [-pi/2, pi/2]"
        )));
    }
    let b = beta.value();
    let (s, c) = (lat.clamp(-FRAC_PI_2, FRAC_PI_2) / 2.0 + PI / 4.0).sin_cos();
    Ok((b * s / (c * c + b * b * s * s).sqrt()).min(1.0))
}

/// Inverse of [`blended_lat_from_r`]; the result spans `[0, 1/beta]`.
pub fn blended_r_from_lat(lat: f64, beta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::domain(format!(
            "blend parameter {beta} outside [0, 1]"
        )));
    }
    if !lat.is_finite() || lat.abs() > FRAC_PI_2 + 1e-12 {
        return Err(Error::domain(format!(
            "latitude {lat} outside [-pi/2, pi/2]"
        )));
    }
    let (s, c) = (lat.clamp(-FRAC_PI_2, FRAC_PI_2) / 2.0 + PI / 4.0).sin_cos();
    Ok(s / (c * c + beta * beta * s * s).sqrt())
}

/// Unit disc point to geodetic coordinates under the normalized blend.
/// The disc center returns `lon = 0` by convention.
pub fn disc_to_geo(p: DiscPoint, beta: BlendBeta) -> Result<GeoCoord> {
    let rr = p.radius_sq();
    if rr > 1.0 + DISC_TOL {
        return Err(Error::domain(format!(
            "point ({}, {}) outside the unit disc",
            p.u, p.v
        )));
    }
    let lat = lat_from_r(rr.sqrt().min(1.0), beta)?;
    Ok(GeoCoord::new_unchecked(p.u.atan2(p.v), lat))
}

/// Geodetic coordinates to the unit disc; inverse of [`disc_to_geo`].
pub fn geo_to_disc(g: GeoCoord, beta: BlendBeta) -> Result<DiscPoint> {
    let r = r_from_lat(g.lat(), beta)?;
    let (s, c) = g.lon().sin_cos();
    Ok(DiscPoint::new(r * s, r * c))
}

/// Elliptical variant of [`disc_to_geo`]: the ellipse is first scaled to the
/// unit disc, then projected. Reduces exactly to the circular case at
/// `a = b = 1`.
pub fn elliptical_disc_to_geo(
    p: DiscPoint,
    beta: BlendBeta,
    axes: EllipseAxes,
) -> Result<GeoCoord> {
    let un = p.u / axes.a();
    let vn = p.v / axes.b();
    let rr = un * un + vn * vn;
    if rr > 1.0 + DISC_TOL {
        return Err(Error::domain(format!(
            "point ({}, {}) outside ellipse with a={}, b={}",
            p.u,
            p.v,
            axes.a(),
            axes.b()
        )));
    }
    let lat = lat_from_r(rr.sqrt().min(1.0), beta)?;
    Ok(GeoCoord::new_unchecked(un.atan2(vn), lat))
}

/// Inverse of [`elliptical_disc_to_geo`].
pub fn elliptical_geo_to_disc(
    g: GeoCoord,
    beta: BlendBeta,
    axes: EllipseAxes,
) -> Result<DiscPoint> {
    let r = r_from_lat(g.lat(), beta)?;
    let (s, c) = g.lon().sin_cos();
    Ok(DiscPoint::new(axes.a() * r * s, axes.b() * r * c))
}
