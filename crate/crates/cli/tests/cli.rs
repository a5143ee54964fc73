//! Exit codes, flag validation, and the stable stdout line formats.

mod common;

use std::f64::consts::PI;
use std::fs;

use birdseye_core::synth;
use birdseye_core::{EquirectImage, GeoCoord, Interpolation};
use common::{load_rgba, psnr_rgba, run, save_panorama_png};

#[test]
fn render_happy_path_and_status_line() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("pano.png");
    save_panorama_png(&synth::waves_panorama(128, 64), &input);
    let output = dir.path().join("out.png");
    let out = run(&[
        "render",
        "--input",
        input.to_str().unwrap(),
        "--output",
        output.to_str().unwrap(),
        "--beta",
        "1.0",
        "--size",
        "64x64",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        stdout,
        format!("rendered {} beta=1.000000\n", output.display())
    );
    let (w, h, data) = load_rgba(&output);
    assert_eq!((w, h), (64, 64));
    assert!(data.chunks(4).all(|px| px[3] == 255));

    // JPEG input is accepted too.
    let jpeg = dir.path().join("pano.jpg");
    let rgb = image::open(&input).unwrap().to_rgb8();
    rgb.save(&jpeg).unwrap();
    let out = run(&[
        "render",
        "--input",
        jpeg.to_str().unwrap(),
        "--output",
        output.to_str().unwrap(),
        "--size",
        "32x32",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn nonstandard_aspect_warns_but_renders() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("square-ish.png");
    save_panorama_png(&synth::waves_panorama(100, 64), &input);
    let output = dir.path().join("out.png");
    let out = run(&[
        "render",
        "--input",
        input.to_str().unwrap(),
        "--output",
        output.to_str().unwrap(),
        "--size",
        "32x32",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(
        stderr.contains("warning") && stderr.contains("2:1"),
        "{stderr}"
    );
}

#[test]
fn invalid_flag_combinations_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("pano.png");
    save_panorama_png(&synth::waves_panorama(64, 32), &input);
    let output = dir.path().join("out.png");
    let base = [
        "--input",
        input.to_str().unwrap(),
        "--output",
        output.to_str().unwrap(),
    ];

    // rho without the blended-isosquare rectifier
    let mut args = vec!["render"];
    args.extend_from_slice(&base);
    args.extend_from_slice(&["--rho", "2", "--rectifier", "squircle"]);
    let out = run(&args);
    assert_eq!(out.status.code(), Some(2));
    assert!(!output.exists());

    // beta outside (0, 1]
    let mut args = vec!["render"];
    args.extend_from_slice(&base);
    args.extend_from_slice(&["--beta", "1.5"]);
    assert_eq!(run(&args).status.code(), Some(2));

    // ellipse ratio vs size mismatch
    let mut args = vec!["render"];
    args.extend_from_slice(&base);
    args.extend_from_slice(&["--ellipse", "1.5", "--size", "700x512"]);
    assert_eq!(run(&args).status.code(), Some(2));

    // matching size is accepted
    let mut args = vec!["render"];
    args.extend_from_slice(&base);
    args.extend_from_slice(&["--ellipse", "1.5", "--size", "768x512"]);
    let out = run(&args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let (w, h, _) = load_rgba(&output);
    assert_eq!((w, h), (768, 512));

    // missing required flag: usage error from the parser
    let out = run(&["render", "--output", "x.png"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn io_failures_exit_3_and_leave_no_partial_file() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.png");
    let output = dir.path().join("out.png");
    let out = run(&[
        "render",
        "--input",
        missing.to_str().unwrap(),
        "--output",
        output.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("nope.png"));
    assert_eq!(stderr.lines().count(), 1);

    // Truncated input file
    let bad = dir.path().join("bad.png");
    fs::write(&bad, b"\x89PNG\r\n\x1a\nnot really").unwrap();
    let out = run(&[
        "render",
        "--input",
        bad.to_str().unwrap(),
        "--output",
        output.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));

    // Unwritable output directory: fails, and nothing is left behind.
    let input = dir.path().join("pano.png");
    save_panorama_png(&synth::waves_panorama(64, 32), &input);
    let ghost_dir = dir.path().join("no-such-dir");
    let ghost = ghost_dir.join("out.png");
    let out = run(&[
        "render",
        "--input",
        input.to_str().unwrap(),
        "--output",
        ghost.to_str().unwrap(),
        "--size",
        "16x16",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!ghost_dir.exists());
}

#[test]
fn optimize_output_format_and_tie_break() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("flat.png");
    save_panorama_png(&EquirectImage::from_fn(64, 32, |_, _| [0.5; 3]), &input);
    let out = run(&[
        "optimize",
        "--input",
        input.to_str().unwrap(),
        "--resolution",
        "16",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "beta=1.000000 e_total=0.000000\n"
    );

    let out = run(&["optimize"]);
    assert_eq!(out.status.code(), Some(2));

    // --auto-beta feeds the optimizer result into the render.
    let rendered = dir.path().join("auto.png");
    let out = run(&[
        "render",
        "--input",
        input.to_str().unwrap(),
        "--output",
        rendered.to_str().unwrap(),
        "--auto-beta",
        "--size",
        "32x32",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.ends_with("beta=1.000000\n"), "{stdout}");
}

#[test]
fn metrics_exports() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("grid.png");
    save_panorama_png(&synth::grid_panorama(128, 64), &input);

    // No export flag: nothing to do.
    let out = run(&[
        "metrics",
        "--input",
        input.to_str().unwrap(),
        "--beta",
        "0.5",
    ]);
    assert_eq!(out.status.code(), Some(2));

    let csv = dir.path().join("m.csv");
    let ec = dir.path().join("ec.png");
    let eq = dir.path().join("eq.png");
    let e1 = dir.path().join("e1.png");
    let out = run(&[
        "metrics",
        "--input",
        input.to_str().unwrap(),
        "--beta",
        "0.5",
        "--resolution",
        "24",
        "--csv",
        csv.to_str().unwrap(),
        "--heatmap-ec",
        ec.to_str().unwrap(),
        "--heatmap-eq",
        eq.to_str().unwrap(),
        "--heatmap-e1",
        e1.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("row,col,e_c,e_q,e1"));
    assert_eq!(lines.count(), 24 * 24);

    let ec_img = image::open(&ec).unwrap().to_luma8();
    assert_eq!(ec_img.dimensions(), (24, 24));
    let e1_img = image::open(&e1).unwrap().to_luma8();
    assert_eq!(e1_img.dimensions(), (128, 64));
    assert!(image::open(&eq).is_ok());
}

#[test]
fn cyl_flags_and_lambert_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("pano.png");
    let pano = synth::waves_panorama(256, 128);
    save_panorama_png(&pano, &input);
    let output = dir.path().join("cyl.png");

    // beta = 0 is rejected with a pointer at --mercator.
    let out = run(&[
        "cyl",
        "--input",
        input.to_str().unwrap(),
        "--output",
        output.to_str().unwrap(),
        "--beta",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("--mercator"));

    // Neither beta nor mercator.
    let out = run(&[
        "cyl",
        "--input",
        input.to_str().unwrap(),
        "--output",
        output.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));

    // Mercator endpoint renders.
    let out = run(&[
        "cyl",
        "--input",
        input.to_str().unwrap(),
        "--output",
        output.to_str().unwrap(),
        "--mercator",
        "--size",
        "128x64",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .ends_with("mercator\n"));

    // beta=1, phi0=0 against a direct sin-latitude remap oracle.
    let out = run(&[
        "cyl",
        "--input",
        input.to_str().unwrap(),
        "--output",
        output.to_str().unwrap(),
        "--beta",
        "1",
        "--phi0",
        "0",
        "--size",
        "256x128",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let (w, h, got) = load_rgba(&output);
    // The oracle samples the PNG-quantized panorama the same way the
    // renderer reads it.
    let disk = birdseye_core::read_image(&input).unwrap();
    let mut want = vec![0u8; got.len()];
    for j in 0..h {
        for i in 0..w {
            let lon = PI * (-1.0 + 2.0 * (i as f64 + 0.5) / w as f64);
            let y = 1.0 - 2.0 * (j as f64 + 0.5) / h as f64;
            let rgb = disk.sample(GeoCoord::normalized(lon, y.asin()), Interpolation::Bilinear);
            let k = ((j * w + i) * 4) as usize;
            for c in 0..3 {
                want[k + c] = (rgb[c].clamp(0.0, 1.0) * 255.0).round() as u8;
            }
            want[k + 3] = 255;
        }
    }
    let p = psnr_rgba(&got, &want);
    assert!(p > 45.0, "cyl beta=1 vs Lambert remap oracle: PSNR {p}");
}
