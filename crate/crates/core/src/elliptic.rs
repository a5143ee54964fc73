//! Legendre incomplete elliptic integral of the second kind, via Carlson
//! symmetric forms (duplication method). Valid wherever the integrand stays
//! real, i.e. `k * sin(phi) <= 1`; note `k > 1` is allowed then.

use crate::error::{Error, Result};

const DUP_TOL: f64 = 2.5e-4; // relative spread; series error ~ tol^6

/// Carlson symmetric integral R_F(x, y, z). Arguments nonnegative, at most
/// one of them zero.
fn carlson_rf(x: f64, y: f64, z: f64) -> f64 {
    let (mut x, mut y, mut z) = (x, y, z);
    let (mu, dx, dy, dz) = loop {
        let sx = x.sqrt();
        let sy = y.sqrt();
        let sz = z.sqrt();
        let lam = sx * (sy + sz) + sy * sz;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
        let mu = (x + y + z) / 3.0;
        let dx = 1.0 - x / mu;
        let dy = 1.0 - y / mu;
        let dz = 1.0 - z / mu;
        if dx.abs().max(dy.abs()).max(dz.abs()) < DUP_TOL {
            break (mu, dx, dy, dz);
        }
    };
    let e2 = dx * dy - dz * dz;
    let e3 = dx * dy * dz;
    (1.0 + (e2 / 24.0 - 0.1 - 3.0 * e3 / 44.0) * e2 + e3 / 14.0) / mu.sqrt()
}

/// Carlson symmetric integral R_D(x, y, z). `z > 0`, at most one of `x`, `y`
/// zero.
fn carlson_rd(x: f64, y: f64, z: f64) -> f64 {
    let (mut x, mut y, mut z) = (x, y, z);
    let mut sum = 0.0;
    let mut fac = 1.0;
    let (mu, dx, dy, dz) = loop {
        let sx = x.sqrt();
        let sy = y.sqrt();
        let sz = z.sqrt();
        let lam = sx * (sy + sz) + sy * sz;
        sum += fac / (sz * (z + lam));
        fac *= 0.25;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
        let mu = (x + y + 3.0 * z) / 5.0;
        let dx = 1.0 - x / mu;
        let dy = 1.0 - y / mu;
        let dz = 1.0 - z / mu;
        if dx.abs().max(dy.abs()).max(dz.abs()) < DUP_TOL {
            break (mu, dx, dy, dz);
        }
    };
    let ea = dx * dy;
    let eb = dz * dz;
    let ec = ea - eb;
    let ed = ea - 6.0 * eb;
    let ee = ed + ec + ec;
    3.0 * sum
        + fac
            * (1.0
                + ed * (-3.0 / 14.0 + 9.0 / 88.0 * ed - 4.5 / 26.0 * dz * ee)
                + dz * (1.0 / 6.0 * ee + dz * (-9.0 / 22.0 * ec + 3.0 / 26.0 * dz * ea)))
            / (mu * mu.sqrt())
}

/// Incomplete elliptic integral of the second kind,
/// `E(phi, k) = integral 0..phi of sqrt(1 - k^2 sin^2 t) dt`.
///
/// Requires `phi` in `[0, pi/2]`, `k >= 0` and `k sin(phi) <= 1` (the
/// integrand would go imaginary beyond that). Accuracy is limited only by
/// the Carlson duplication series, well below 1e-10.
pub fn incomplete_elliptic_e(phi: f64, k: f64) -> Result<f64> {
    if !(0.0..=std::f64::consts::FRAC_PI_2 + 1e-12).contains(&phi) {
        return Err(Error::domain(format!(
            "elliptic phi {phi} outside [0, pi/2]"
        )));
    }
    if k.is_nan() || k < 0.0 {
        return Err(Error::domain(format!("elliptic modulus {k} < 0")));
    }
    let s = phi.sin().min(1.0);
    if s == 0.0 {
        return Ok(0.0);
    }
    if k == 0.0 {
        return Ok(phi);
    }
    let ks = k * s;
    if ks > 1.0 + 1e-9 {
        return Err(Error::domain(format!(
            "elliptic integrand imaginary: k sin(phi) = {ks} > 1"
        )));
    }
    let c = phi.cos().max(0.0);
    let cc = c * c;
    // q = 1 - k^2 sin^2(phi), in factored form for accuracy near the edge.
    let q = ((1.0 - ks) * (1.0 + ks)).max(0.0);
    if q == 0.0 && cc < 1e-30 {
        // phi = pi/2 with k = 1: E = 1 exactly.
        return Ok(s);
    }
    let kk = k * k;
    Ok(s * (carlson_rf(cc, q, 1.0) - kk * s * s / 3.0 * carlson_rd(cc, q, 1.0)))
}
