//! Distortion metrics and the blend-parameter search.
//!
//! The composed mapping square -> disc -> sphere is treated as a surface
//! parameterization; its first fundamental form is estimated by central
//! finite differences, the eigenvalues of that 2x2 form quantify local
//! length/angle/area behavior, and two `[0, 1]` errors fall out: a conformal
//! error (eigenvalue ratio away from 1) and an equiareal error (eigenvalue
//! product away from 1). The total error weights these per grid point by
//! the saliency of the panorama pixel the point samples, so distortion only
//! counts where the image has content.

use std::f64::consts::FRAC_PI_2;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::azimuthal::{blended_lat_from_r, lat_from_r, BlendBeta, BETA_MIN};
use crate::equirect::EquirectImage;
use crate::error::{Error, Result};
use crate::rectify::{Rectifier, SquarePoint, Squircle};

/// Default step for the central finite differences.
pub const FD_STEP: f64 = 1e-5;

/// First fundamental form coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundamentalForm {
    pub e: f64,
    pub f: f64,
    pub g: f64,
}

/// Eigenvalues of the fundamental form, ordered `sigma1 >= sigma2 >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaPair {
    pub sigma1: f64,
    pub sigma2: f64,
}

/// One metric cell: (e_c, e_q, pulled saliency, sigma1, sigma2).
type CellMetrics = (f64, f64, f64, f64, f64);

/// Per-grid-cell distortion fields at the metric resolution.
#[derive(Debug, Clone)]
pub struct DistortionField {
    pub width: u32,
    pub height: u32,
    pub e_c: Vec<f64>,
    pub e_q: Vec<f64>,
    pub e1: Vec<f64>,
    pub sigma1: Vec<f64>,
    pub sigma2: Vec<f64>,
}

/// Knobs for the metric evaluation and the blend search.
#[derive(Debug, Clone)]
pub struct OptimizerConfig {
    /// Weight of the conformal error.
    pub k_c: f64,
    /// Weight of the equiareal error.
    pub k_q: f64,
    pub beta_min: f64,
    pub beta_max: f64,
    /// Width of the final search bracket.
    pub tolerance: f64,
    /// Points in the coarse scan.
    pub grid: usize,
    /// Metric grid resolution per axis.
    pub resolution: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            k_c: 2.0,
            k_q: 1.0,
            beta_min: BETA_MIN,
            beta_max: 1.0,
            tolerance: 0.005,
            grid: 16,
            resolution: 128,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let weight_sum = self.k_c + self.k_q;
        if self.k_c.is_nan()
            || self.k_q.is_nan()
            || self.k_c < 0.0
            || self.k_q < 0.0
            || weight_sum <= 0.0
        {
            return Err(Error::config(
                "weights must be nonnegative with k_c + k_q > 0",
            ));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::config("tolerance must be positive"));
        }
        if self.grid < 2 || self.resolution < 2 {
            return Err(Error::config("grid and resolution must be at least 2"));
        }
        let range_ok =
            self.beta_min >= BETA_MIN && self.beta_min < self.beta_max && self.beta_max <= 1.0;
        if !range_ok {
            return Err(Error::config(format!(
                "beta range [{}, {}] must lie inside [{BETA_MIN}, 1]",
                self.beta_min, self.beta_max
            )));
        }
        Ok(())
    }
}

/// Point on the radius-1/2 sphere reached from square coordinates through
/// the squircle rectifier and the normalized blended projection, in closed
/// form.
pub fn surface_point(x: f64, y: f64, beta: BlendBeta) -> [f64; 3] {
    let b = beta.value();
    let l2 = x * x + y * y;
    if l2 < 1e-28 {
        return [0.0, 0.0, -0.5];
    }
    let s2 = (l2 - x * x * y * y).max(0.0);
    let d = b * b + (1.0 - b * b) * s2;
    // (x^2 - 1)(y^2 - 1) equals 1 - s2; the factored form is stabler.
    let root = (s2 * (1.0 - s2)).max(0.0).sqrt();
    let scale = b * root / (l2.sqrt() * d);
    [
        y * scale,
        x * scale,
        ((1.0 + b * b) * s2 - b * b) / (2.0 * d),
    ]
}

/// Same surface point, entered at the disc (the rectifier skipped).
pub fn surface_point_disc(u: f64, v: f64, beta: BlendBeta) -> [f64; 3] {
    let b = beta.value();
    let rr = (u * u + v * v).min(1.0);
    let d = b * b + (1.0 - b * b) * rr;
    let root = (1.0 - rr).max(0.0).sqrt();
    [
        b * v * root / d,
        b * u * root / d,
        ((1.0 + b * b) * rr - b * b) / (2.0 * d),
    ]
}

/// Disc-entered surface point under the unnormalized blend (the profile
/// whose `beta -> 0` limit on the unit disc is exactly stereographic).
/// This is the path the conformal/equiareal limit checks use.
pub fn surface_point_disc_blended(u: f64, v: f64, beta: f64) -> [f64; 3] {
    let rr = u * u + v * v;
    let den = 1.0 + (1.0 - beta * beta) * rr;
    let root = (1.0 - beta * beta * rr).max(0.0).sqrt();
    [
        v * root / den,
        u * root / den,
        0.5 * ((1.0 + beta * beta) * rr - 1.0) / den,
    ]
}

/// First fundamental form of a surface map by central differences of step
/// `h`. The evaluation point must keep the whole stencil inside the square,
/// i.e. stay at least `2h` from the boundary.
pub fn fundamental_form(
    f: impl Fn(f64, f64) -> [f64; 3],
    x: f64,
    y: f64,
    h: f64,
) -> Result<FundamentalForm> {
    if x.abs() > 1.0 - 2.0 * h || y.abs() > 1.0 - 2.0 * h {
        return Err(Error::domain(format!(
            "({x}, {y}) is within 2h of the square boundary"
        )));
    }
    let xp = f(x + h, y);
    let xm = f(x - h, y);
    let yp = f(x, y + h);
    let ym = f(x, y - h);
    let inv = 1.0 / (2.0 * h);
    let mut e = 0.0;
    let mut ff = 0.0;
    let mut g = 0.0;
    for k in 0..3 {
        let fx = (xp[k] - xm[k]) * inv;
        let fy = (yp[k] - ym[k]) * inv;
        e += fx * fx;
        ff += fx * fy;
        g += fy * fy;
    }
    Ok(FundamentalForm { e, f: ff, g })
}

/// Eigenvalues of the symmetric positive semi-definite form; for such
/// matrices these coincide with the singular values.
pub fn singular_values(form: FundamentalForm) -> SigmaPair {
    let tr = form.e + form.g;
    let det_part = ((form.e - form.g).powi(2) + 4.0 * form.f * form.f).sqrt();
    SigmaPair {
        sigma1: 0.5 * (tr + det_part),
        sigma2: (0.5 * (tr - det_part)).max(0.0),
    }
}

/// Conformal and equiareal errors in `[0, 1]`:
/// `e_c = 1 - min(sigma2/sigma1, 1)`, `e_q = 1 - min(p, 1/p)` with
/// `p = sigma1 sigma2`. Degenerate forms count as maximally distorted.
pub fn errors_from_sigma(s: SigmaPair) -> (f64, f64) {
    if !s.sigma1.is_finite() || s.sigma1 <= 0.0 {
        return (1.0, 1.0);
    }
    let ratio = (s.sigma2 / s.sigma1).clamp(0.0, 1.0);
    let p = s.sigma1 * s.sigma2;
    let product = if p > 0.0 { p.min(1.0 / p) } else { 0.0 };
    (1.0 - ratio, 1.0 - product.clamp(0.0, 1.0))
}

/// Saliency of every panorama pixel: the L1 norm of the grayscale image
/// gradient. Horizontal differences wrap in longitude; vertical ones are
/// one-sided at the top and bottom rows. The kernel is the undivided
/// difference `I(+1) - I(-1)`.
pub fn saliency_e1(img: &EquirectImage) -> Vec<f64> {
    let w = img.width() as usize;
    let h = img.height() as usize;
    let gray: Vec<f64> = (0..w * h)
        .map(|idx| {
            let px = img.pixel((idx % w) as u32, (idx / w) as u32);
            (px[0] as f64 + px[1] as f64 + px[2] as f64) / 3.0
        })
        .collect();
    let mut out = vec![0.0; w * h];
    for j in 0..h {
        for i in 0..w {
            let right = gray[j * w + (i + 1) % w];
            let left = gray[j * w + (i + w - 1) % w];
            let down = gray[(j + 1).min(h - 1) * w + i];
            let up = gray[j.saturating_sub(1) * w + i];
            out[j * w + i] = (right - left).abs() + (down - up).abs();
        }
    }
    out
}

/// Metric grid coordinates: `resolution` points spanning the square with an
/// interior margin of `2h` so the difference stencil stays evaluable.
pub fn metric_grid(resolution: usize) -> Vec<f64> {
    let lo = -1.0 + 2.0 * FD_STEP;
    let hi = 1.0 - 2.0 * FD_STEP;
    (0..resolution)
        .map(|k| lo + (hi - lo) * k as f64 / (resolution - 1) as f64)
        .collect()
}

fn pull_saliency(img: &EquirectImage, e1: &[f64], x: f64, y: f64, beta: BlendBeta) -> f64 {
    let p = Squircle.to_disc(SquarePoint::new(x, y));
    let lat = lat_from_r(p.radius().min(1.0), beta).unwrap_or(FRAC_PI_2);
    let g = crate::azimuthal::GeoCoord::normalized(p.u.atan2(p.v), lat);
    let (i, j) = img.nearest_pixel(g);
    e1[j as usize * img.width() as usize + i as usize]
}

fn total_error_with_saliency(
    img: &EquirectImage,
    e1: &[f64],
    beta: BlendBeta,
    cfg: &OptimizerConfig,
) -> f64 {
    let coords = metric_grid(cfg.resolution);
    let row_sums: Vec<f64> = coords
        .par_iter()
        .map(|&y| {
            let mut acc = 0.0;
            for &x in &coords {
                let form = fundamental_form(|a, b| surface_point(a, b, beta), x, y, FD_STEP)
                    .expect("grid points keep the stencil inside the square");
                let (ec, eq) = errors_from_sigma(singular_values(form));
                let w = pull_saliency(img, e1, x, y, beta);
                acc += w * (cfg.k_c * ec + cfg.k_q * eq);
            }
            acc
        })
        .collect();
    // Summed in row order, so the result is independent of thread count.
    row_sums.iter().sum()
}

/// Saliency-weighted total distortion of the squircle-rectified projection
/// at blend `beta`, summed over the metric grid.
pub fn total_error(img: &EquirectImage, beta: BlendBeta, cfg: &OptimizerConfig) -> Result<f64> {
    cfg.validate()?;
    let e1 = saliency_e1(img);
    Ok(total_error_with_saliency(img, &e1, beta, cfg))
}

/// Searches for the blend parameter minimizing [`total_error`]: a coarse
/// scan over the configured range, then golden-section refinement around the
/// best coarse point. Ties break toward the larger blend value.
pub fn optimize_beta(img: &EquirectImage, cfg: &OptimizerConfig) -> Result<(BlendBeta, f64)> {
    cfg.validate()?;
    let e1 = saliency_e1(img);
    let mut evals: Vec<(f64, f64)> = Vec::new();
    let eval = |b: f64, evals: &mut Vec<(f64, f64)>| -> f64 {
        let beta = BlendBeta::new(b).expect("search stays inside the valid range");
        let v = total_error_with_saliency(img, &e1, beta, cfg);
        evals.push((b, v));
        v
    };

    let n = cfg.grid;
    let step = (cfg.beta_max - cfg.beta_min) / (n - 1) as f64;
    let mut best = 0usize;
    for k in 0..n {
        let b = if k == n - 1 {
            cfg.beta_max
        } else {
            cfg.beta_min + step * k as f64
        };
        let v = eval(b, &mut evals);
        // `<=` so equal values prefer the larger beta.
        if v <= evals[best].1 {
            best = evals.len() - 1;
        }
    }

    let lo = evals[best.saturating_sub(1)].0.max(cfg.beta_min);
    let hi = evals[(best + 1).min(n - 1)].0;
    if hi > lo {
        const INV_PHI: f64 = 0.618_033_988_749_894_9;
        let (mut lo, mut hi) = (lo, hi);
        let mut c = hi - INV_PHI * (hi - lo);
        let mut d = lo + INV_PHI * (hi - lo);
        let mut fc = eval(c, &mut evals);
        let mut fd = eval(d, &mut evals);
        while hi - lo > cfg.tolerance {
            if fc < fd {
                hi = d;
                d = c;
                fd = fc;
                c = hi - INV_PHI * (hi - lo);
                fc = eval(c, &mut evals);
            } else {
                // On ties this keeps the right half: larger beta wins.
                lo = c;
                c = d;
                fc = fd;
                d = lo + INV_PHI * (hi - lo);
                fd = eval(d, &mut evals);
            }
        }
    }

    let (mut best_b, mut best_v) = evals[0];
    for &(b, v) in &evals[1..] {
        if v < best_v || (v == best_v && b > best_b) {
            best_b = b;
            best_v = v;
        }
    }
    Ok((BlendBeta::new(best_b)?, best_v))
}

/// Evaluates the full per-cell distortion field at the metric resolution.
pub fn distortion_field(
    img: &EquirectImage,
    beta: BlendBeta,
    cfg: &OptimizerConfig,
) -> Result<DistortionField> {
    cfg.validate()?;
    let e1 = saliency_e1(img);
    let coords = metric_grid(cfg.resolution);
    let n = cfg.resolution;
    let rows: Vec<Vec<CellMetrics>> = coords
        .par_iter()
        .map(|&y| {
            coords
                .iter()
                .map(|&x| {
                    let form = fundamental_form(|a, b| surface_point(a, b, beta), x, y, FD_STEP)
                        .expect("grid points keep the stencil inside the square");
                    let s = singular_values(form);
                    let (ec, eq) = errors_from_sigma(s);
                    let w = pull_saliency(img, &e1, x, y, beta);
                    (ec, eq, w, s.sigma1, s.sigma2)
                })
                .collect()
        })
        .collect();

    let mut field = DistortionField {
        width: n as u32,
        height: n as u32,
        e_c: Vec::with_capacity(n * n),
        e_q: Vec::with_capacity(n * n),
        e1: Vec::with_capacity(n * n),
        sigma1: Vec::with_capacity(n * n),
        sigma2: Vec::with_capacity(n * n),
    };
    for row in rows {
        for (ec, eq, w, s1, s2) in row {
            field.e_c.push(ec);
            field.e_q.push(eq);
            field.e1.push(w);
            field.sigma1.push(s1);
            field.sigma2.push(s2);
        }
    }
    Ok(field)
}

/// Writes one scalar field as CSV with a `row,col,value` header.
pub fn write_field_csv(
    path: impl AsRef<Path>,
    width: u32,
    height: u32,
    values: &[f64],
) -> Result<()> {
    let path = path.as_ref();
    if values.len() != (width as usize) * (height as usize) {
        return Err(Error::config("field length does not match dimensions"));
    }
    let mut out = String::from("row,col,value\n");
    for j in 0..height as usize {
        for i in 0..width as usize {
            out.push_str(&format!("{},{},{}\n", j, i, values[j * width as usize + i]));
        }
    }
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(out.as_bytes())
        .map_err(|e| Error::io(path, e))
}

/// Mean conformal/equiareal errors of a disc-entered surface map over an
/// interior grid (points with radius at most `margin`). Shared by the
/// blend-limit checks.
pub fn disc_metric_means(
    f: impl Fn(f64, f64) -> [f64; 3] + Sync,
    resolution: usize,
    margin: f64,
) -> (f64, f64) {
    let coords: Vec<f64> = (0..resolution)
        .map(|k| -margin + 2.0 * margin * k as f64 / (resolution - 1) as f64)
        .collect();
    let cells: Vec<(f64, f64)> = coords
        .par_iter()
        .flat_map_iter(|&v| {
            let f = &f;
            coords.iter().filter_map(move |&u| {
                if u * u + v * v > margin * margin {
                    return None;
                }
                let form = fundamental_form(f, u, v, FD_STEP).ok()?;
                Some(errors_from_sigma(singular_values(form)))
            })
        })
        .collect();
    let n = cells.len().max(1) as f64;
    let sum_c: f64 = cells.iter().map(|c| c.0).sum();
    let sum_q: f64 = cells.iter().map(|c| c.1).sum();
    (sum_c / n, sum_q / n)
}

/// Convenience wrapper used by the limit tests: means over the blended
/// (unnormalized) disc path.
pub fn blended_disc_metric_means(beta: f64, resolution: usize, margin: f64) -> (f64, f64) {
    // Touch the profile itself so the path under test is unambiguous.
    debug_assert!(blended_lat_from_r(0.5, beta).is_ok());
    disc_metric_means(
        move |u, v| surface_point_disc_blended(u, v, beta),
        resolution,
        margin,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn beta(v: f64) -> BlendBeta {
        BlendBeta::new(v).unwrap()
    }

    #[test]
    fn surface_point_known_values() {
        for b in [BETA_MIN, 0.4, 1.0] {
            assert_eq!(surface_point(0.0, 0.0, beta(b)), [0.0, 0.0, -0.5]);
            let p = surface_point(1.0, 0.0, beta(b));
            assert_abs_diff_eq!(p[0], 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(p[1], 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(p[2], 0.5, epsilon = 1e-15);
        }
        let p = surface_point(0.5, 0.5, beta(0.5));
        let norm = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
        assert_abs_diff_eq!(norm, 0.25, epsilon = 1e-12);
    }

    #[test]
    fn surface_norm_is_quarter_everywhere() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20_000 {
            let x = rng.random::<f64>() * 2.0 - 1.0;
            let y = rng.random::<f64>() * 2.0 - 1.0;
            let b = beta(BETA_MIN + rng.random::<f64>() * (1.0 - BETA_MIN));
            for p in [
                surface_point(x, y, b),
                surface_point_disc(x * 0.7, y * 0.7, b),
                surface_point_disc_blended(x * 0.7, y * 0.7, rng.random::<f64>()),
            ] {
                let norm = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
                assert_abs_diff_eq!(norm, 0.25, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn disc_variant_matches_square_on_axes() {
        // The squircle is the identity on the axes, so both entries agree.
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..2_000 {
            let y = rng.random::<f64>() * 1.8 - 0.9;
            let b = beta(0.1 + rng.random::<f64>() * 0.9);
            let sq = surface_point(0.0, y, b);
            let di = surface_point_disc(0.0, y, b);
            for k in 0..3 {
                assert_abs_diff_eq!(sq[k], di[k], epsilon = 1e-12);
            }
        }
        // Module-level example: the equator circle through the disc entry.
        let p = surface_point_disc(0.0, 0.4472135954999579, beta(0.5));
        assert_abs_diff_eq!(p[2], 0.0, epsilon = 1e-10);
        assert_eq!(surface_point_disc(0.0, 0.0, beta(0.5))[2], -0.5);
    }

    #[test]
    fn fundamental_form_is_gram_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..2_000 {
            let x = rng.random::<f64>() * 1.8 - 0.9;
            let y = rng.random::<f64>() * 1.8 - 0.9;
            let b = beta(0.2 + rng.random::<f64>() * 0.8);
            let form = fundamental_form(|a, c| surface_point(a, c, b), x, y, FD_STEP).unwrap();
            assert!(form.e >= 0.0 && form.g >= 0.0);
            assert!(form.e * form.g - form.f * form.f >= -1e-12);
        }
        assert!(fundamental_form(
            |a, c| surface_point(a, c, beta(0.5)),
            0.9999999,
            0.0,
            FD_STEP
        )
        .is_err());
    }

    #[test]
    fn lambert_disc_determinant_constant() {
        // beta = 1 disc path is equiareal: det I_f = 1 at interior points.
        let coords = [-0.9, -0.5, -0.2, 0.1, 0.4, 0.75];
        for &u in &coords {
            for &v in &coords {
                if u * u + v * v > 0.9025 {
                    continue;
                }
                let form =
                    fundamental_form(|a, c| surface_point_disc(a, c, beta(1.0)), u, v, FD_STEP)
                        .unwrap();
                let det = form.e * form.g - form.f * form.f;
                assert_abs_diff_eq!(det, 1.0, epsilon = 1e-6);
            }
        }
    }

    #[test]
    #[allow(clippy::excessive_precision)]
    fn fd_matches_symbolic_oracle_at_spot_points() {
        // Frozen from symbolic differentiation of the surface functions.
        let table = [
            (
                -0.7,
                0.1,
                0.5,
                1.2506189513244714,
                -0.046233176614064235,
                0.3240284529225513,
            ),
            (
                0.15,
                0.1,
                1.0,
                1.0017488741662753,
                0.0212058344593201,
                0.97125050078932733,
            ),
            (
                0.8,
                -0.25,
                0.1,
                0.057377095451945221,
                -0.0047649398798585759,
                0.0073567898235825455,
            ),
        ];
        for &(x, y, b, we, wf, wg) in &table {
            let form =
                fundamental_form(|a, c| surface_point(a, c, beta(b)), x, y, FD_STEP).unwrap();
            assert!((form.e - we).abs() / we.abs() < 1e-6);
            assert!((form.f - wf).abs() / wf.abs() < 1e-6);
            assert!((form.g - wg).abs() / wg.abs() < 1e-6);
        }
    }

    #[test]
    fn sigma_and_errors_examples() {
        let s = singular_values(FundamentalForm {
            e: 1.0,
            f: 0.0,
            g: 1.0,
        });
        assert_eq!((s.sigma1, s.sigma2), (1.0, 1.0));
        let s = singular_values(FundamentalForm {
            e: 4.0,
            f: 0.0,
            g: 1.0,
        });
        assert_eq!((s.sigma1, s.sigma2), (4.0, 1.0));

        assert_eq!(
            errors_from_sigma(SigmaPair {
                sigma1: 1.0,
                sigma2: 1.0
            }),
            (0.0, 0.0)
        );
        let (ec, eq) = errors_from_sigma(SigmaPair {
            sigma1: 2.0,
            sigma2: 0.5,
        });
        assert_abs_diff_eq!(ec, 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(eq, 0.0, epsilon = 1e-15);
        let (ec, eq) = errors_from_sigma(SigmaPair {
            sigma1: 2.0,
            sigma2: 2.0,
        });
        assert_abs_diff_eq!(ec, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(eq, 0.75, epsilon = 1e-15);
        assert_eq!(
            errors_from_sigma(SigmaPair {
                sigma1: 0.0,
                sigma2: 0.0
            }),
            (1.0, 1.0)
        );
    }

    #[test]
    fn sigma_matches_brute_eigensolver() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        for _ in 0..10_000 {
            // Random SPD Gram matrix from a random 2x2 factor.
            let (a, b, c, d) = (
                rng.random::<f64>() * 4.0 - 2.0,
                rng.random::<f64>() * 4.0 - 2.0,
                rng.random::<f64>() * 4.0 - 2.0,
                rng.random::<f64>() * 4.0 - 2.0,
            );
            let form = FundamentalForm {
                e: a * a + c * c,
                f: a * b + c * d,
                g: b * b + d * d,
            };
            let s = singular_values(form);
            // Oracle: eigenvalues from the characteristic polynomial solved
            // with the numerically careful quadratic formula.
            let tr = form.e + form.g;
            let det = form.e * form.g - form.f * form.f;
            let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
            let l1 = 0.5 * (tr + disc);
            let l2 = if l1 > 0.0 { det / l1 } else { 0.0 };
            assert_abs_diff_eq!(s.sigma1, l1, epsilon = 1e-12);
            assert_abs_diff_eq!(s.sigma2, l2.max(0.0), epsilon = 1e-9);
            assert!(s.sigma1 >= s.sigma2 && s.sigma2 >= 0.0);
        }
    }

    #[test]
    fn saliency_kernel_fixture() {
        // Constant image: all zero.
        let img = EquirectImage::from_fn(8, 4, |_, _| [0.3, 0.3, 0.3]);
        assert!(saliency_e1(&img).iter().all(|&v| v == 0.0));

        // Vertical step edge of height 1 between columns 3 and 4: the two
        // adjacent columns see |dx| = 1 under the undivided central kernel.
        let img = EquirectImage::from_fn(8, 4, |i, _| if i < 4 { [0.0; 3] } else { [1.0; 3] });
        let e1 = saliency_e1(&img);
        for j in 1..3usize {
            assert_abs_diff_eq!(e1[j * 8 + 3], 1.0, epsilon = 1e-6);
            assert_abs_diff_eq!(e1[j * 8 + 4], 1.0, epsilon = 1e-6);
            assert_abs_diff_eq!(e1[j * 8 + 1], 0.0, epsilon = 1e-6);
        }

        // A single bright pixel is seen exactly by its 4-neighborhood cross.
        let img = EquirectImage::from_fn(
            9,
            7,
            |i, j| {
                if (i, j) == (4, 3) {
                    [1.0; 3]
                } else {
                    [0.0; 3]
                }
            },
        );
        let e1 = saliency_e1(&img);
        let nonzero: Vec<usize> = e1
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 0.0)
            .map(|(k, _)| k)
            .collect();
        let expect: Vec<usize> = vec![2 * 9 + 4, 3 * 9 + 3, 3 * 9 + 5, 4 * 9 + 4];
        assert_eq!(nonzero, expect);
    }

    #[test]
    fn total_error_constant_image_is_zero() {
        let img = EquirectImage::from_fn(64, 32, |_, _| [0.5; 3]);
        let cfg = OptimizerConfig {
            resolution: 32,
            ..OptimizerConfig::default()
        };
        for b in [BETA_MIN, 0.5, 1.0] {
            assert_eq!(total_error(&img, beta(b), &cfg).unwrap(), 0.0);
        }
    }

    #[test]
    fn total_error_weight_extremes_order_the_ends() {
        let cfg_q = OptimizerConfig {
            k_c: 0.0,
            k_q: 1.0,
            resolution: 64,
            ..OptimizerConfig::default()
        };
        let cfg_c = OptimizerConfig {
            k_c: 1.0,
            k_q: 0.0,
            resolution: 64,
            ..OptimizerConfig::default()
        };
        // The equiareal-end preference needs saliency at the zenith rows:
        // at small beta nearly every metric cell samples the zenith, so an
        // image with a featureless ceiling scores low there no matter the
        // weights. Assert it on the fixtures textured all the way up.
        for img in [
            synth::grid_panorama(512, 256),
            synth::waves_panorama(512, 256),
        ] {
            let e1 = total_error(&img, beta(1.0), &cfg_q).unwrap();
            let e02 = total_error(&img, beta(0.2), &cfg_q).unwrap();
            assert!(e1 < e02, "equiareal end not preferred: {e1} vs {e02}");
        }
        // Conformal-only error prefers the stereographic end over beta = 1.
        for img in [
            synth::grid_panorama(512, 256),
            synth::room_panorama(512, 256),
            synth::waves_panorama(512, 256),
        ] {
            let emin = total_error(&img, beta(BETA_MIN), &cfg_c).unwrap();
            let e1c = total_error(&img, beta(1.0), &cfg_c).unwrap();
            assert!(emin < e1c, "conformal end not preferred: {emin} vs {e1c}");
        }
    }

    #[test]
    fn optimizer_constant_image_breaks_ties_up() {
        let img = EquirectImage::from_fn(32, 16, |_, _| [0.1; 3]);
        let cfg = OptimizerConfig {
            resolution: 16,
            ..OptimizerConfig::default()
        };
        let (b, e) = optimize_beta(&img, &cfg).unwrap();
        assert_eq!(b.value(), 1.0);
        assert_eq!(e, 0.0);
    }

    #[test]
    fn optimizer_matches_dense_scan() {
        let img = synth::waves_panorama(256, 128);
        let cfg = OptimizerConfig {
            resolution: 32,
            ..OptimizerConfig::default()
        };
        let (b, _) = optimize_beta(&img, &cfg).unwrap();
        let e1 = saliency_e1(&img);
        let mut best = (0.0, f64::INFINITY);
        for k in 0..128 {
            let bb = cfg.beta_min + (cfg.beta_max - cfg.beta_min) * k as f64 / 127.0;
            let v = total_error_with_saliency(&img, &e1, beta(bb), &cfg);
            if v < best.1 || (v == best.1 && bb > best.0) {
                best = (bb, v);
            }
        }
        let spacing = (cfg.beta_max - cfg.beta_min) / (cfg.grid - 1) as f64;
        assert!(
            (b.value() - best.0).abs() <= cfg.tolerance.max(spacing) + 1.0 / 127.0,
            "optimizer {} vs dense argmin {}",
            b.value(),
            best.0
        );
    }

    #[test]
    fn field_and_csv_export() {
        let img = synth::grid_panorama(64, 32);
        let cfg = OptimizerConfig {
            resolution: 8,
            ..OptimizerConfig::default()
        };
        let field = distortion_field(&img, beta(0.5), &cfg).unwrap();
        assert_eq!(field.e_c.len(), 64);
        assert!(field.e_c.iter().all(|v| (0.0..=1.0).contains(v)));
        assert!(field.e_q.iter().all(|v| (0.0..=1.0).contains(v)));
        assert!(field
            .sigma1
            .iter()
            .zip(&field.sigma2)
            .all(|(s1, s2)| s1 >= s2 && *s2 >= 0.0));

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ec.csv");
        write_field_csv(&path, field.width, field.height, &field.e_c).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("row,col,value"));
        assert_eq!(lines.count(), 64);
    }
}
