use std::ops::Range;
use std::path::{Path, PathBuf};

use dmdscan::controller::{
    estimate_time, full_scan_plan, load_observation, plan_intervals, run_acquisition, save_record,
    ScanGeometry, ScanPlan, TimingParams,
};
use dmdscan::image::{Mask, Plane};
use dmdscan::metrics::{band_sweep, nrmsd};
use dmdscan::optics::pnm::encode_pnm;
use dmdscan::optics::{Instrument, JitterKind, JitterModel, Readout, SensorParams};
use dmdscan::reconstruct::{assemble, diagnostics_csv, fill_gaps, AssembleOptions};
use dmdscan::roi::{
    canny, labels_pgm, region_columns, region_mean_spectrum, segment, spectrum_csv, CannyParams,
    RegionLabelMap,
};
use dmdscan::scene::{
    parse_scene_spec, read_cube, rgb_render, roi_field_demo, synth_scene, three_leaf_demo, write_cube,
    RgbImage, RgbResponse, SpectralCube,
};
use dmdscan::{write_atomic, Error, Result};

use crate::args::*;

pub fn run(cli: &Cli) -> Result<()> {
    let seed = cli.seed;
    let out = |default: &str| cli.out.clone().unwrap_or_else(|| PathBuf::from(default));
    match &cli.command {
        Command::Synth(a) => synth(a, seed, &out("scene.cube")),
        Command::Acquire(a) => acquire(a, seed.unwrap_or(0), &out("acquisition")),
        Command::Reconstruct(a) => reconstruct(a, &out("reconstruction")),
        Command::Evaluate(a) => evaluate(a, &out("sweep.csv")),
        Command::PlanRoi(a) => plan_roi(a, &out("roi")),
        Command::Spectra(a) => spectra(a, &out("spectra")),
        Command::Timing(a) => timing(a),
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn timing_params(a: &TimingArgs) -> Result<TimingParams> {
    let t = TimingParams {
        dmd_max_pattern_hz: a.dmd_hz,
        sensor_fps: a.fps,
        exposure_ms: a.exposure_ms,
        overhead_ms: a.overhead_ms,
        ..TimingParams::default()
    };
    t.validate()?;
    Ok(t)
}

fn synth(a: &SynthArgs, seed: Option<u64>, out: &Path) -> Result<()> {
    let mut spec = match (&a.spec, a.demo) {
        (Some(path), _) => parse_scene_spec(&read_text(path)?)?,
        (None, Some(Demo::ThreeLeaf)) => three_leaf_demo(),
        (None, Some(Demo::RoiField)) => roi_field_demo(),
        (None, None) => return Err(Error::Parameter("give a scene file or --demo".into())),
    };
    if let Some(s) = seed {
        spec.seed = s;
    }
    let cube = synth_scene(&spec)?;
    write_cube(&cube, out)?;
    println!(
        "wrote {} ({}x{}x{}, {} objects)",
        out.display(),
        cube.width(),
        cube.height(),
        cube.bands(),
        spec.primitives.len()
    );
    Ok(())
}

/// ROI plan file: `slit_width w` then one `interval start end` line per column range.
fn plan_text(slit_width: usize, intervals: &[Range<usize>]) -> String {
    let mut s = format!("# dmdscan roi plan\nslit_width {slit_width}\n");
    for r in intervals {
        s.push_str(&format!("interval {} {}\n", r.start, r.end));
    }
    s
}

fn parse_plan(text: &str) -> Result<(usize, Vec<Range<usize>>)> {
    let mut width = None;
    let mut intervals = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let toks: Vec<&str> = line.split('#').next().unwrap_or("").split_whitespace().collect();
        let bad = |m: &str| Error::Parse {
            line: i + 1,
            message: m.to_string(),
        };
        let num = |t: &str| t.parse::<usize>().map_err(|_| bad(&format!("'{t}' is not a column count")));
        match toks.as_slice() {
            [] => {}
            ["slit_width", w] => width = Some(num(w)?),
            ["interval", a, b] => {
                let (a, b) = (num(a)?, num(b)?);
                if a >= b {
                    return Err(bad("interval end must exceed its start"));
                }
                intervals.push(a..b);
            }
            _ => return Err(bad(&format!("unrecognised line '{}'", line.trim()))),
        }
    }
    let width = width.ok_or_else(|| Error::Parse {
        line: 0,
        message: "missing slit_width".into(),
    })?;
    Ok((width, intervals))
}

fn load_plan(path: &Path, timing: &TimingParams) -> Result<ScanPlan> {
    let (w, intervals) = parse_plan(&read_text(path)?)?;
    let plan = plan_intervals(&intervals, w, timing, ScanGeometry::default())?;
    if plan.is_empty() {
        return Err(Error::EmptyPlan(format!("{} has no intervals", path.display())));
    }
    Ok(plan)
}

fn readout(a: &SensorArgs, scene: &SpectralCube, slit_width: usize, exposure_ms: f64, seed: u64) -> Result<Readout> {
    if let ReadoutKind::Float = a.readout {
        return Ok(Readout::Float);
    }
    // radiance 1.0 in every column of the slit lands on full scale
    let mut s = SensorParams {
        bit_depth: a.bit_depth,
        full_well: a.full_well,
        read_noise_sigma: a.read_noise,
        gain: a.full_well / (exposure_ms * slit_width as f64),
        exposure_ms,
        shot_noise: a.shot_noise,
        seed,
    };
    if let Some(db) = a.snr_db {
        let n = scene.data().len() as f64;
        let mean = scene.data().iter().map(|&v| v as f64).sum::<f64>() / n;
        let mean_sq = scene.data().iter().map(|&v| (v as f64).powi(2)).sum::<f64>() / n;
        let (_, max) = scene.min_max();
        s = s.with_target_snr(db, mean, mean_sq, max as f64 * slit_width as f64);
    }
    s.validate()?;
    Ok(Readout::Sensor(s))
}

fn jitter_model(a: &JitterArgs, seed: u64) -> Result<JitterModel> {
    let m = JitterModel {
        kind: a.jitter.parse::<JitterKind>()?,
        amplitude: a.jitter_amplitude,
        step_sigma: a.jitter_step,
        period_frames: a.jitter_period,
        subpixel: a.jitter_subpixel,
        seed,
    };
    m.validate()?;
    Ok(m)
}

fn acquire(a: &AcquireArgs, seed: u64, out: &Path) -> Result<()> {
    let scene = read_cube(&a.cube)?;
    let t = timing_params(&a.timing)?;
    let plan = match &a.plan {
        Some(p) => load_plan(p, &t)?,
        None => full_scan_plan(scene.width(), a.timing.slit_width, &t)?,
    };
    let inst = Instrument::new(scene.wavelengths()).with_readout(readout(
        &a.sensor,
        &scene,
        plan.slit_width,
        t.exposure_ms,
        seed,
    )?);
    let jitter = jitter_model(&a.jitter, seed)?;
    let record = run_acquisition(&scene, &plan, &t, &inst, &jitter)?;
    save_record(&record, out)?;
    println!("patterns: {}", plan.len());
    println!("dwell per pattern: {} ms", t.dwell_ms());
    println!("estimated scan time: {} ms", estimate_time(&plan, &t));
    println!("wrote {}", out.display());
    Ok(())
}

/// Band scaled to 0..255 by its own range.
fn band_pgm(cube: &SpectralCube, band: usize) -> Vec<u8> {
    let data = cube.band(band);
    let (lo, hi) = data
        .iter()
        .fold((f32::INFINITY, f32::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    let span = if hi > lo { hi - lo } else { 1.0 };
    let scaled: Vec<f32> = data.iter().map(|&v| (v - lo) / span * 255.0).collect();
    encode_pnm(cube.width(), cube.height(), 255, &[&scaled])
}

fn nearest_band(wavelengths: &[f32], nm: f64) -> usize {
    (0..wavelengths.len())
        .min_by(|&a, &b| {
            let da = (wavelengths[a] as f64 - nm).abs();
            let db = (wavelengths[b] as f64 - nm).abs();
            da.total_cmp(&db)
        })
        .unwrap_or(0)
}

fn reconstruct(a: &ReconstructArgs, out: &Path) -> Result<()> {
    let obs = load_observation(&a.record)?;
    let opts = AssembleOptions {
        reference_index: a.reference,
        search_radius: a.search_radius,
        stripe_threshold: a.stripe_threshold,
    };
    let mut rc = assemble(&obs, &opts)?;
    let uncovered = rc.uncovered_columns();
    println!("frames placed: {} of {}", rc.placed_frames(), obs.frames.len());
    println!("uncovered columns: {uncovered}");
    if a.fill_gaps && uncovered > 0 {
        rc = fill_gaps(rc)?;
        println!("interpolated columns: {}", rc.interpolated.iter().filter(|&&i| i).count());
    }
    create_dir(out)?;
    write_atomic(&out.join("diagnostics.csv"), diagnostics_csv(&rc.diagnostics).as_bytes())?;
    let cube_path = out.join("reconstructed.cube");
    write_cube(&rc.cube, &cube_path)?;
    for &nm in &a.band_images {
        let b = nearest_band(rc.cube.wavelengths(), nm);
        let name = format!("band_{:.0}nm.pgm", rc.cube.wavelengths()[b]);
        write_atomic(&out.join(name), &band_pgm(&rc.cube, b))?;
    }
    if let Some(truth) = &a.truth {
        let truth = read_cube(truth)?;
        println!("nrmsd: {:.6}", nrmsd(&rc.cube, &truth)?);
    }
    println!("wrote {}", out.display());
    Ok(())
}

fn evaluate(a: &EvaluateArgs, out: &Path) -> Result<()> {
    let truth = read_cube(&a.truth)?;
    let recon = read_cube(&a.recon)?;
    let sweep = band_sweep(&truth, &recon, &a.counts)?;
    write_atomic(out, sweep.to_csv().as_bytes())?;
    println!("n_bands  nrmsd");
    for (n, v) in &sweep.points {
        println!("{n:>7}  {v:.6}");
    }
    println!("max nrmsd: {:.6}", sweep.max_nrmsd());
    println!("wrote {}", out.display());
    Ok(())
}

fn preview(cube: &SpectralCube) -> Result<RgbImage> {
    rgb_render(cube, &RgbResponse::gaussian(cube.wavelengths()))
}

fn canny_params(a: &SegmentArgs) -> CannyParams {
    CannyParams {
        low: a.canny_low,
        high: a.canny_high,
        blur_sigma: a.canny_sigma,
    }
}

fn preview_ppm(img: &RgbImage) -> Vec<u8> {
    let max = img
        .channels
        .iter()
        .flat_map(|c| c.data().iter())
        .fold(0f32, |m, &v| m.max(v));
    let scale = if max > 0.0 { 255.0 / max } else { 0.0 };
    let planes: Vec<Plane> = img.channels.iter().map(|c| c.map(|v| v * scale)).collect();
    encode_pnm(img.width(), img.height(), 255, &[planes[0].data(), planes[1].data(), planes[2].data()])
}

fn mask_pgm(m: &Mask) -> Vec<u8> {
    let data: Vec<f32> = (0..m.width() * m.height())
        .map(|i| if m.get(i % m.width(), i / m.width()) { 255.0 } else { 0.0 })
        .collect();
    encode_pnm(m.width(), m.height(), 255, &[&data])
}

fn segment_cube(cube: &SpectralCube, a: &SegmentArgs) -> Result<(RgbImage, RegionLabelMap)> {
    let rgb = preview(cube)?;
    let labels = segment(&rgb.luminance(), &canny_params(a), a.min_area)?;
    Ok((rgb, labels))
}

fn plan_roi(a: &PlanRoiArgs, out: &Path) -> Result<()> {
    let cube = read_cube(&a.cube)?;
    let t = timing_params(&a.timing)?;
    let (rgb, labels) = segment_cube(&cube, &a.segment)?;
    let edges = canny(&rgb.luminance(), &canny_params(&a.segment))?;
    println!("regions: {}", labels.count());
    for r in labels.regions() {
        println!(
            "  region {}: {} px, columns {}..{}, rows {}..{}",
            r.label, r.pixel_count, r.x0, r.x1, r.y0, r.y1
        );
    }
    let selected: Vec<u32> = if a.regions.is_empty() {
        labels.regions().iter().map(|r| r.label).collect()
    } else {
        a.regions.clone()
    };
    let intervals = region_columns(&labels, &selected, a.margin)?;
    let plan = plan_intervals(&intervals, a.timing.slit_width, &t, ScanGeometry::default())?;
    let full = full_scan_plan(cube.width(), a.timing.slit_width, &t)?;
    let (roi_ms, full_ms) = (estimate_time(&plan, &t), estimate_time(&full, &t));

    create_dir(out)?;
    write_atomic(&out.join("plan.txt"), plan_text(a.timing.slit_width, &intervals).as_bytes())?;
    write_atomic(&out.join("labels.pgm"), &labels_pgm(&labels))?;
    write_atomic(&out.join("edges.pgm"), &mask_pgm(&edges))?;
    write_atomic(&out.join("preview.ppm"), &preview_ppm(&rgb))?;
    println!("patterns: {} (full scan {})", plan.len(), full.len());
    println!("estimated scan time: {roi_ms} ms (full scan {full_ms} ms)");
    println!("time ratio: {:.4}, speed-up {:.2}x", roi_ms / full_ms, full_ms / roi_ms);
    println!("wrote {}", out.display());
    Ok(())
}

fn spectra(a: &SpectraArgs, out: &Path) -> Result<()> {
    let cube = read_cube(&a.cube)?;
    let seg_source = match &a.segment_from {
        Some(p) => read_cube(p)?,
        None => cube.clone(),
    };
    let (_, labels) = segment_cube(&seg_source, &a.segment)?;
    create_dir(out)?;
    write_atomic(&out.join("labels.pgm"), &labels_pgm(&labels))?;
    let mut written = 0;
    for r in labels.regions() {
        match region_mean_spectrum(&cube, &labels, r.label, a.block) {
            Ok(s) => {
                let name = format!("region_{}.csv", r.label);
                write_atomic(&out.join(&name), spectrum_csv(cube.wavelengths(), &s).as_bytes())?;
                written += 1;
                println!("region {}: {name}", r.label);
            }
            Err(e @ Error::RegionTooSmall { .. }) => eprintln!("skipped: {e}"),
            Err(e) => return Err(e),
        }
    }
    println!("regions: {}, spectra written: {written}", labels.count());
    println!("wrote {}", out.display());
    Ok(())
}

fn timing(a: &TimingCmdArgs) -> Result<()> {
    let t = timing_params(&a.timing)?;
    let plan = match &a.plan {
        Some(p) => load_plan(p, &t)?,
        None => full_scan_plan(a.columns, a.timing.slit_width, &t)?,
    };
    println!("patterns: {}", plan.len());
    println!("dwell per pattern: {} ms", t.dwell_ms());
    println!("estimated scan time: {} ms", estimate_time(&plan, &t));
    Ok(())
}
