//! Disc rectification: maps between the unit square `[-1,1]^2` and the unit
//! disc, moving points only along rays from the center (the radial
//! constraint), so the azimuthal structure of the projection survives
//! rectification.
//!
//! Every variant implements the [`Rectifier`] trait and is reachable by name
//! through [`by_name`], so front ends can select one at runtime.
//! An ellipse/rectangle wrapper and a numeric square-from-disc inverse are
//! provided on top.

use crate::azimuthal::DiscPoint;
use crate::elliptic::incomplete_elliptic_e;
use crate::error::{Error, Result};
use crate::EllipseAxes;

/// Points closer to the origin than this are mapped to the origin instead of
/// evaluating the 0/0 forms.
const ORIGIN_EPS: f64 = 1e-14;

/// A point in the square `[-1, 1]^2` (or the `[-a,a]x[-b,b]` rectangle for
/// the elliptical wrapper).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquarePoint {
    pub x: f64,
    pub y: f64,
}

impl SquarePoint {
    pub fn new(x: f64, y: f64) -> Self {
        SquarePoint { x, y }
    }
}

/// A square-to-disc mapping obeying the radial constraint.
pub trait Rectifier: Send + Sync {
    /// Registry name of this mapping.
    fn name(&self) -> &'static str;

    /// Maps a point of the square to a point of the closed unit disc, along
    /// the ray through the origin.
    fn to_disc(&self, p: SquarePoint) -> DiscPoint;
}

/// Contour-based mapping using Guasti's squircle family
/// `x^2 + y^2 - x^2 y^2 = s^2`: the contour through each point is carried to
/// the circle of radius `s`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Squircle;

impl Rectifier for Squircle {
    fn name(&self) -> &'static str {
        "squircle"
    }

    fn to_disc(&self, p: SquarePoint) -> DiscPoint {
        let (x, y) = (p.x, p.y);
        let l2 = x * x + y * y;
        if l2 < ORIGIN_EPS * ORIGIN_EPS {
            return DiscPoint::new(0.0, 0.0);
        }
        let s2 = (l2 - x * x * y * y).max(0.0);
        let m = (s2 / l2).sqrt();
        DiscPoint::new(x * m, y * m)
    }
}

/// Linear rim-to-rim stretch: concentric squares map to concentric circles.
/// The wall selection below fixes the sign conditions so the four cases
/// cover the whole square and agree on the diagonals.
#[derive(Debug, Clone, Copy, Default)]
pub struct Isosquare;

impl Rectifier for Isosquare {
    fn name(&self) -> &'static str {
        "isosquare"
    }

    fn to_disc(&self, p: SquarePoint) -> DiscPoint {
        let (x, y) = (p.x, p.y);
        let l2 = x * x + y * y;
        if l2 < ORIGIN_EPS * ORIGIN_EPS {
            return DiscPoint::new(0.0, 0.0);
        }
        let t = if x >= y.abs() {
            x // right wall
        } else if y >= x.abs() {
            y // top wall
        } else if -x >= y.abs() {
            -x // left wall
        } else {
            -y // bottom wall
        };
        let inv_l = 1.0 / l2.sqrt();
        DiscPoint::new(t * x * inv_l, t * y * inv_l)
    }
}

/// Isosquare output blended back toward the input point with weight
/// `tau = (u^2 + v^2)^rho`, which rounds the mapping near the center while
/// keeping the rim fixed. `rho = 0` turns the blending off. For large `rho`
/// the raw blend can leave the unit disc near the corners; the result is
/// clamped radially to the rim in that case.
#[derive(Debug, Clone, Copy)]
pub struct BlendedIsosquare {
    pub rho: f64,
}

impl Rectifier for BlendedIsosquare {
    fn name(&self) -> &'static str {
        "blended-isosquare"
    }

    fn to_disc(&self, p: SquarePoint) -> DiscPoint {
        let raw = Isosquare.to_disc(p);
        let tau = raw.radius_sq().powf(self.rho);
        let u = tau * raw.u + (1.0 - tau) * p.x;
        let v = tau * raw.v + (1.0 - tau) * p.y;
        let rr = u * u + v * v;
        if rr > 1.0 {
            let inv = 1.0 / rr.sqrt();
            DiscPoint::new(u * inv, v * inv)
        } else {
            DiscPoint::new(u, v)
        }
    }
}

/// Squircle-contour mapping with the radius re-spaced through the squircle
/// area integral, making ring areas match (up to the fixed 4/pi factor
/// between square and disc): `t = sqrt(s E(asin s, 1/s))`.
#[derive(Debug, Clone, Copy, Default)]
pub struct EquiarealSquircle;

/// Equiareal radius profile `t(s)`; exposed for tests and oracles.
pub fn equiareal_t_from_s(s: f64) -> f64 {
    if s < ORIGIN_EPS {
        return 0.0;
    }
    let s = s.min(1.0);
    // k sin(phi) = (1/s) * s = 1 always; the Carlson evaluation handles the
    // integrand's boundary zero exactly.
    let e = incomplete_elliptic_e(s.asin(), 1.0 / s).expect("s in (0,1] is always in-domain");
    (s * e).sqrt()
}

impl Rectifier for EquiarealSquircle {
    fn name(&self) -> &'static str {
        "equiareal-squircle"
    }

    fn to_disc(&self, p: SquarePoint) -> DiscPoint {
        let (x, y) = (p.x, p.y);
        let l2 = x * x + y * y;
        if l2 < ORIGIN_EPS * ORIGIN_EPS {
            return DiscPoint::new(0.0, 0.0);
        }
        let s = (l2 - x * x * y * y).max(0.0).sqrt();
        let t = equiareal_t_from_s(s);
        let m = t / l2.sqrt();
        DiscPoint::new(x * m, y * m)
    }
}

/// Rectifier selection, including `None` (keep the disc, no rectification).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RectifierKind {
    Squircle,
    Isosquare,
    BlendedIsosquare { rho: f64 },
    EquiarealSquircle,
    None,
}

impl RectifierKind {
    /// Builds the strategy object; `None` yields no rectifier.
    pub fn build(&self) -> Option<Box<dyn Rectifier>> {
        match *self {
            RectifierKind::Squircle => Some(Box::new(Squircle)),
            RectifierKind::Isosquare => Some(Box::new(Isosquare)),
            RectifierKind::BlendedIsosquare { rho } => Some(Box::new(BlendedIsosquare { rho })),
            RectifierKind::EquiarealSquircle => Some(Box::new(EquiarealSquircle)),
            RectifierKind::None => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            RectifierKind::Squircle => "squircle",
            RectifierKind::Isosquare => "isosquare",
            RectifierKind::BlendedIsosquare { .. } => "blended-isosquare",
            RectifierKind::EquiarealSquircle => "equiareal-squircle",
            RectifierKind::None => "none",
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let RectifierKind::BlendedIsosquare { rho } = self {
            if !rho.is_finite() || *rho < 0.0 {
                return Err(Error::config(format!("rho must be >= 0, got {rho}")));
            }
        }
        Ok(())
    }
}

/// Registered rectifier names, as accepted by [`by_name`].
pub const RECTIFIER_NAMES: [&str; 5] = [
    "squircle",
    "isosquare",
    "blended-isosquare",
    "equiareal-squircle",
    "none",
];

/// Looks a rectifier up by registry name. `rho` applies to
/// `blended-isosquare` only and is rejected elsewhere.
pub fn by_name(name: &str, rho: Option<f64>) -> Result<RectifierKind> {
    let kind = match name {
        "squircle" => RectifierKind::Squircle,
        "isosquare" => RectifierKind::Isosquare,
        "blended-isosquare" => RectifierKind::BlendedIsosquare {
            rho: rho.unwrap_or(1.0),
        },
        "equiareal-squircle" => RectifierKind::EquiarealSquircle,
        "none" => RectifierKind::None,
        other => {
            return Err(Error::config(format!(
                "unknown rectifier '{other}' (expected one of {})",
                RECTIFIER_NAMES.join(", ")
            )))
        }
    };
    if rho.is_some() && !matches!(kind, RectifierKind::BlendedIsosquare { .. }) {
        return Err(Error::config(
            "rho only applies to the blended-isosquare rectifier",
        ));
    }
    kind.validate()?;
    Ok(kind)
}

/// Rectangle-to-ellipse wrapper: scales the rectangle to the unit square,
/// applies the base rectifier, scales back to the ellipse.
pub fn rect_to_ellipse(x: f64, y: f64, axes: EllipseAxes, base: &dyn Rectifier) -> DiscPoint {
    let p = base.to_disc(SquarePoint::new(x / axes.a(), y / axes.b()));
    DiscPoint::new(axes.a() * p.u, axes.b() * p.v)
}

/// Numeric inverse of a rectifier: finds the square point on the ray at the
/// disc point's azimuth whose image has the same radius. Bisection on the
/// ray parameter; radius grows from 0 at the origin to 1 where the ray meets
/// the square rim.
pub fn disc_to_square_numeric(p: DiscPoint, kind: RectifierKind) -> Result<SquarePoint> {
    let rect = match kind.build() {
        Some(r) => r,
        None => return Ok(SquarePoint::new(p.u, p.v)),
    };
    let r_target = p.radius();
    if r_target < ORIGIN_EPS {
        return Ok(SquarePoint::new(0.0, 0.0));
    }
    if r_target > 1.0 + 1e-9 {
        return Err(Error::domain(format!(
            "disc point ({}, {}) outside the unit disc",
            p.u, p.v
        )));
    }
    let r_target = r_target.min(1.0);
    let dx = p.u / r_target;
    let dy = p.v / r_target;
    let m_max = 1.0 / dx.abs().max(dy.abs());
    let radius_at = |m: f64| rect.to_disc(SquarePoint::new(m * dx, m * dy)).radius();

    let mut lo = 0.0;
    let mut hi = m_max;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if radius_at(mid) < r_target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    let m = 0.5 * (lo + hi);
    let result = SquarePoint::new(m * dx, m * dy);
    let back = rect.to_disc(result);
    if (back.u - p.u).hypot(back.v - p.v) > 1e-8 {
        return Err(Error::numeric(format!(
            "rectifier inverse did not converge for ({}, {})",
            p.u, p.v
        )));
    }
    Ok(result)
}
