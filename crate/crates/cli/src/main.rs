//! Batch front end: render revolvable panoramas, search the blend
//! parameter, export distortion fields, and re-render through the
//! cylindrical blends.
//!
//! Exit codes: 0 success, 2 invalid arguments or configuration, 3 I/O
//! failure, 4 numeric failure. Every failure prints a single diagnostic
//! line on standard error. Angles are degrees on the command line and
//! radians inside.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use birdseye_core::cylindrical::{BlendedKernel, CylindricalKernel, MercatorKernel, StdLatitude};
use birdseye_core::distortion::{self, distortion_field, saliency_e1};
use birdseye_core::equirect::write_gray_png;
use birdseye_core::{
    optimize_beta, project, read_image, rectify, write_image, AspectSpec, BlendBeta, EllipseAxes,
    EquirectImage, Error, Interpolation, OptimizerConfig, ProjectionConfig,
};

#[derive(Parser)]
#[command(
    name = "birdseye",
    version,
    about = "Revolvable overhead views of spherical panoramas"
)]
struct Cli {
    /// Worker threads for the pixel and metric loops (default: all cores).
    /// Results are byte-identical for any thread count.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Project a panorama into a revolvable square/rectangular image.
    Render(RenderArgs),
    /// Search for the blend parameter minimizing weighted distortion.
    Optimize(OptimizeArgs),
    /// Export per-cell distortion fields as heatmaps and CSV.
    Metrics(MetricsArgs),
    /// Re-render through the blended cylindrical projection.
    Cyl(CylArgs),
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Blend parameter in [0.001, 1]; 1 is the equal-area end.
    #[arg(long, default_value_t = 0.5, conflicts_with = "auto_beta")]
    beta: f64,
    /// Run the optimizer first and render with its result.
    #[arg(long)]
    auto_beta: bool,
    #[arg(long, default_value = "squircle")]
    rectifier: String,
    /// Roundness control, blended-isosquare only.
    #[arg(long)]
    rho: Option<f64>,
    /// Ellipse semi-major axis (b is fixed at 1): rectangular output.
    #[arg(long, default_value_t = 1.0)]
    ellipse: f64,
    /// Output size as WxH; defaults to 1024 wide at the ellipse ratio.
    #[arg(long, value_parser = parse_size)]
    size: Option<(u32, u32)>,
    /// Latitude of the projection center, degrees (default: nadir).
    #[arg(long, default_value_t = -90.0)]
    center_lat: f64,
    #[arg(long, default_value_t = 0.0)]
    center_lon: f64,
    #[arg(long, default_value_t = 0.0)]
    roll: f64,
    /// Latitude carried by the image rim, degrees; below 90 crops the
    /// ceiling.
    #[arg(long, default_value_t = 90.0)]
    crop_lat: f64,
    #[arg(long, default_value = "bilinear", value_parser = parse_interp)]
    interp: Interpolation,
}

#[derive(Args)]
struct OptimizeArgs {
    #[arg(long)]
    input: PathBuf,
    /// Conformal error weight.
    #[arg(long, default_value_t = 2.0)]
    kc: f64,
    /// Equiareal error weight.
    #[arg(long, default_value_t = 1.0)]
    kq: f64,
    #[arg(long, default_value_t = birdseye_core::BETA_MIN)]
    beta_min: f64,
    #[arg(long, default_value_t = 1.0)]
    beta_max: f64,
    /// Width of the final search bracket.
    #[arg(long, default_value_t = 0.005)]
    tol: f64,
    /// Coarse scan points.
    #[arg(long, default_value_t = 16)]
    grid: usize,
    /// Metric grid resolution per axis.
    #[arg(long, default_value_t = 128)]
    resolution: usize,
}

#[derive(Args)]
struct MetricsArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    beta: f64,
    /// Conformal-error heatmap PNG (metric resolution).
    #[arg(long)]
    heatmap_ec: Option<PathBuf>,
    /// Equiareal-error heatmap PNG (metric resolution).
    #[arg(long)]
    heatmap_eq: Option<PathBuf>,
    /// Saliency heatmap PNG (input resolution, normalized to its max).
    #[arg(long)]
    heatmap_e1: Option<PathBuf>,
    /// Combined CSV: row,col,e_c,e_q,e1 over the metric grid.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long, default_value_t = 128)]
    resolution: usize,
}

#[derive(Args)]
struct CylArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Blend parameter in (0, 1]; 1 is the equal-area end.
    #[arg(long, conflicts_with = "mercator")]
    beta: Option<f64>,
    /// Render the Mercator endpoint instead of the blend.
    #[arg(long)]
    mercator: bool,
    /// Standard latitude of the equal-area end, degrees.
    #[arg(long, default_value_t = 0.0)]
    phi0: f64,
    #[arg(long, default_value = "1024x512", value_parser = parse_size)]
    size: (u32, u32),
    /// Mercator crop latitude, degrees.
    #[arg(long, default_value_t = 85.0)]
    max_lat: f64,
    #[arg(long, default_value = "bilinear", value_parser = parse_interp)]
    interp: Interpolation,
}

fn parse_size(s: &str) -> Result<(u32, u32), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WxH, got '{s}'"))?;
    let w: u32 = w.trim().parse().map_err(|_| format!("bad width '{w}'"))?;
    let h: u32 = h.trim().parse().map_err(|_| format!("bad height '{h}'"))?;
    if w == 0 || h == 0 {
        return Err("size must be nonzero".into());
    }
    Ok((w, h))
}

fn parse_interp(s: &str) -> Result<Interpolation, String> {
    match s {
        "nearest" => Ok(Interpolation::Nearest),
        "bilinear" => Ok(Interpolation::Bilinear),
        other => Err(format!("expected nearest|bilinear, got '{other}'")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: failed to configure thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match cli.command {
        Command::Render(args) => cmd_render(args),
        Command::Optimize(args) => cmd_optimize(args),
        Command::Metrics(args) => cmd_metrics(args),
        Command::Cyl(args) => cmd_cyl(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Domain(_) | Error::Config(_) => 2,
                Error::Io { .. } => 3,
                Error::Numeric(_) => 4,
            };
            ExitCode::from(code)
        }
    }
}

fn read_input(path: &Path) -> Result<EquirectImage, Error> {
    let img = read_image(path)?;
    if !img.is_standard_aspect() {
        eprintln!(
            "warning: {} is {}x{}, not the usual 2:1 equirectangular shape",
            path.display(),
            img.width(),
            img.height()
        );
    }
    Ok(img)
}

fn cmd_render(args: RenderArgs) -> Result<(), Error> {
    let rectifier = rectify::by_name(&args.rectifier, args.rho)?;
    let axes = EllipseAxes::from_semi_major(args.ellipse)?;
    let (out_w, out_h) = args.size.unwrap_or_else(|| {
        let w = 1024u32;
        (w, (w as f64 * axes.b() / axes.a()).round() as u32)
    });
    let img = read_input(&args.input)?;

    let beta = if args.auto_beta {
        let (b, _) = optimize_beta(&img, &OptimizerConfig::default())?;
        b
    } else {
        BlendBeta::new(args.beta)?
    };

    let config = ProjectionConfig {
        beta,
        rectifier,
        axes,
        aspect: AspectSpec::new(
            args.center_lon.to_radians(),
            args.center_lat.to_radians(),
            args.roll.to_radians(),
        )?,
        ceiling_cap: args.crop_lat.to_radians(),
        out_width: out_w,
        out_height: out_h,
        interpolation: args.interp,
        background: [0, 0, 0, 0],
    };
    config.validate()?;
    let out = project(&img, &config)?;
    write_image(&args.output, &out)?;
    println!(
        "rendered {} beta={:.6}",
        args.output.display(),
        beta.value()
    );
    Ok(())
}

fn optimizer_config(args: &OptimizeArgs) -> OptimizerConfig {
    OptimizerConfig {
        k_c: args.kc,
        k_q: args.kq,
        beta_min: args.beta_min,
        beta_max: args.beta_max,
        tolerance: args.tol,
        grid: args.grid,
        resolution: args.resolution,
    }
}

fn cmd_optimize(args: OptimizeArgs) -> Result<(), Error> {
    let cfg = optimizer_config(&args);
    cfg.validate()?;
    let img = read_input(&args.input)?;
    let (beta, e_total) = optimize_beta(&img, &cfg)?;
    println!("beta={:.6} e_total={:.6}", beta.value(), e_total);
    Ok(())
}

fn cmd_metrics(args: MetricsArgs) -> Result<(), Error> {
    if args.heatmap_ec.is_none()
        && args.heatmap_eq.is_none()
        && args.heatmap_e1.is_none()
        && args.csv.is_none()
    {
        return Err(Error::Config(
            "nothing to export: pass --heatmap-ec/--heatmap-eq/--heatmap-e1 and/or --csv".into(),
        ));
    }
    let beta = BlendBeta::new(args.beta)?;
    let cfg = OptimizerConfig {
        resolution: args.resolution,
        ..OptimizerConfig::default()
    };
    cfg.validate()?;
    let img = read_input(&args.input)?;
    let field = distortion_field(&img, beta, &cfg)?;

    if let Some(path) = &args.heatmap_ec {
        write_gray_png(path, field.width, field.height, &field.e_c, 1.0)?;
    }
    if let Some(path) = &args.heatmap_eq {
        write_gray_png(path, field.width, field.height, &field.e_q, 1.0)?;
    }
    if let Some(path) = &args.heatmap_e1 {
        let e1 = saliency_e1(&img);
        let max = e1.iter().cloned().fold(0.0f64, f64::max);
        let scale = if max > 0.0 { 1.0 / max } else { 1.0 };
        write_gray_png(path, img.width(), img.height(), &e1, scale)?;
    }
    if let Some(path) = &args.csv {
        write_metrics_csv(path, &field)?;
    }
    Ok(())
}

fn write_metrics_csv(path: &Path, field: &distortion::DistortionField) -> Result<(), Error> {
    let mut text = String::from("row,col,e_c,e_q,e1\n");
    let w = field.width as usize;
    for j in 0..field.height as usize {
        for i in 0..w {
            let k = j * w + i;
            text.push_str(&format!(
                "{},{},{},{},{}\n",
                j, i, field.e_c[k], field.e_q[k], field.e1[k]
            ));
        }
    }
    let mut tmp = path.as_os_str().to_os_string();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, text)
        .and_then(|()| fs::rename(&tmp, path))
        .map_err(|e| {
            let _ = fs::remove_file(&tmp);
            Error::io(path, e)
        })
}

fn cmd_cyl(args: CylArgs) -> Result<(), Error> {
    let phi0 = StdLatitude::new(args.phi0.to_radians())?;
    let kernel: Box<dyn CylindricalKernel> = if args.mercator {
        Box::new(MercatorKernel::new(args.max_lat.to_radians())?)
    } else {
        match args.beta {
            Some(b) => {
                if b == 0.0 {
                    return Err(Error::Config(
                        "beta=0 is the Mercator endpoint; pass --mercator instead".into(),
                    ));
                }
                Box::new(BlendedKernel::new(b, phi0)?)
            }
            None => return Err(Error::Config("pass --beta <0..1] or --mercator".into())),
        }
    };
    let img = read_input(&args.input)?;
    let (w, h) = args.size;
    let out =
        birdseye_core::cylindrical::project_cylindrical(&img, kernel.as_ref(), w, h, args.interp)?;
    write_image(&args.output, &out)?;
    match args.beta {
        Some(b) => println!("rendered {} beta={:.6}", args.output.display(), b),
        None => println!("rendered {} mercator", args.output.display()),
    }
    Ok(())
}
