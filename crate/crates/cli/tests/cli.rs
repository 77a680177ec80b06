use std::path::Path;
use std::process::{Command, Output};

fn dmdscan(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dmdscan"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn ok(o: Output) -> Output {
    assert!(o.status.success(), "stdout:\n{}\nstderr:\n{}", stdout(&o), stderr(&o));
    o
}

const SMALL_SCENE: &str = "size 48 24\ngrid 400 900 12\nseed 3\ntexture 0.1\n\
    background flat 0.3\ndisk 14 12 6 flat 0.8\nrect 34 12 10 8 gauss 600 80 0.6\n";

#[test]
fn timing_prints_full_scan_estimates() {
    let dir = tempfile::tempdir().unwrap();
    let o = ok(dmdscan(dir.path(), &["timing"]));
    assert!(stdout(&o).contains("estimated scan time: 16000 ms"), "{}", stdout(&o));
    let o = ok(dmdscan(dir.path(), &["timing", "--slit-width", "4"]));
    assert!(stdout(&o).contains("patterns: 100"));
    assert!(stdout(&o).contains("estimated scan time: 4000 ms"));
}

#[test]
fn synth_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("s.scene"), SMALL_SCENE).unwrap();
    ok(dmdscan(dir.path(), &["synth", "s.scene", "--out", "a.cube"]));
    ok(dmdscan(dir.path(), &["synth", "s.scene", "--out", "b.cube"]));
    ok(dmdscan(dir.path(), &["synth", "s.scene", "--out", "c.cube", "--seed", "9"]));
    let read = |n: &str| std::fs::read(dir.path().join(n)).unwrap();
    assert_eq!(read("a.cube"), read("b.cube"));
    assert_ne!(read("a.cube"), read("c.cube"));
}

#[test]
fn flat_background_gives_constant_cube() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("flat.scene"), "size 8 6\ngrid 400 900 5\nbackground flat 0.25\n").unwrap();
    ok(dmdscan(dir.path(), &["synth", "flat.scene"]));
    let cube = dmdscan::scene::read_cube(dir.path().join("scene.cube")).unwrap();
    assert!(cube.data().iter().all(|&v| v == 0.25));
}

#[test]
fn malformed_spec_reports_line_and_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.scene"), "size 8 6\ngrid 400 900 5\ndisk 1 2 flat 0.5\n").unwrap();
    let o = dmdscan(dir.path(), &["synth", "bad.scene"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn missing_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = dmdscan(dir.path(), &["acquire", "missing.cube"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error:"));
}

#[test]
fn unknown_flag_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(dmdscan(dir.path(), &["timing", "--bogus"]).status.code(), Some(3));
    assert_eq!(dmdscan(dir.path(), &["timing", "--fps", "90"]).status.code(), Some(3));
}

#[test]
fn lossless_pipeline_reports_zero_nrmsd() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("s.scene"), SMALL_SCENE).unwrap();
    ok(dmdscan(dir.path(), &["synth", "s.scene"]));
    let o = ok(dmdscan(dir.path(), &["acquire", "scene.cube", "--readout", "float"]));
    assert!(stdout(&o).contains("patterns: 48"));
    assert!(dir.path().join("acquisition/manifest").exists());
    let o = ok(dmdscan(dir.path(), &["reconstruct", "acquisition", "--truth", "scene.cube", "--band-images", "600"]));
    assert!(stdout(&o).contains("frames placed: 48 of 48"), "{}", stdout(&o));
    assert!(stdout(&o).contains("nrmsd: 0.000000"), "{}", stdout(&o));
    let recon = dir.path().join("reconstruction");
    assert!(recon.join("reconstructed.cube").exists());
    let csv = std::fs::read_to_string(recon.join("diagnostics.csv")).unwrap();
    assert_eq!(csv.lines().count(), 49);
    assert!(std::fs::read_dir(&recon).unwrap().any(|e| e.unwrap().file_name().to_string_lossy().starts_with("band_")));

    let o = ok(dmdscan(dir.path(), &["evaluate", "scene.cube", "reconstruction/reconstructed.cube", "--counts", "3,6,12"]));
    assert!(stdout(&o).contains("max nrmsd: 0.000000"));
    let sweep = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let rows: Vec<&str> = sweep.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.split(',').nth(1).unwrap().parse::<f64>().unwrap() == 0.0));
}

#[test]
fn evaluate_of_identical_cubes_is_all_zero() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("s.scene"), SMALL_SCENE).unwrap();
    ok(dmdscan(dir.path(), &["synth", "s.scene"]));
    ok(dmdscan(dir.path(), &["evaluate", "scene.cube", "scene.cube", "--counts", "12,4", "--out", "z.csv"]));
    let csv = std::fs::read_to_string(dir.path().join("z.csv")).unwrap();
    assert!(csv.starts_with("n_bands,nrmsd\n"));
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn noisy_jittered_acquisition_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("s.scene"), SMALL_SCENE).unwrap();
    ok(dmdscan(dir.path(), &["synth", "s.scene"]));
    let args = ["acquire", "scene.cube", "--snr-db", "25", "--jitter", "walk", "--jitter-amplitude", "2", "--seed", "5"];
    ok(dmdscan(dir.path(), &[&args[..], &["--out", "a"]].concat()));
    ok(dmdscan(dir.path(), &[&args[..], &["--out", "b"]].concat()));
    for f in ["manifest", "jitter.log", "rgb_00017.ppm"] {
        let a = std::fs::read(dir.path().join("a").join(f)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
}

#[test]
fn plan_roi_finds_three_leaves_and_drives_acquisition() {
    let dir = tempfile::tempdir().unwrap();
    ok(dmdscan(dir.path(), &["synth", "--demo", "three-leaf"]));
    let o = ok(dmdscan(dir.path(), &["plan-roi", "scene.cube"]));
    assert!(stdout(&o).contains("regions: 3"), "{}", stdout(&o));
    for f in ["plan.txt", "labels.pgm", "edges.pgm", "preview.ppm"] {
        assert!(dir.path().join("roi").join(f).exists(), "{f}");
    }
    let o = ok(dmdscan(dir.path(), &["timing", "--plan", "roi/plan.txt"]));
    assert!(stdout(&o).contains("patterns: 159"), "{}", stdout(&o));

    let o = ok(dmdscan(dir.path(), &["spectra", "scene.cube", "--out", "sp"]));
    assert!(stdout(&o).contains("spectra written: 3"));
    let csv = std::fs::read_to_string(dir.path().join("sp/region_1.csv")).unwrap();
    assert_eq!(csv.lines().count(), 301);
}

#[test]
fn algorithmic_failure_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("flat.scene"), "size 16 8\ngrid 400 900 4\nbackground flat 0.5\n").unwrap();
    ok(dmdscan(dir.path(), &["synth", "flat.scene"]));
    ok(dmdscan(dir.path(), &["acquire", "scene.cube", "--readout", "float"]));
    let o = dmdscan(dir.path(), &["reconstruct", "acquisition"]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn config_fills_unset_options_only() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.cfg"), "# faster sensor\nslit-width = 2\nfps = 50\n").unwrap();
    let o = ok(dmdscan(dir.path(), &["timing", "--config", "c.cfg"]));
    assert!(stdout(&o).contains("estimated scan time: 4000 ms"), "{}", stdout(&o));
    let o = ok(dmdscan(dir.path(), &["--config", "c.cfg", "timing", "--slit-width", "1"]));
    assert!(stdout(&o).contains("estimated scan time: 8000 ms"), "{}", stdout(&o));

    std::fs::write(dir.path().join("bad.cfg"), "bands = 3\n").unwrap();
    assert_eq!(dmdscan(dir.path(), &["timing", "--config", "bad.cfg"]).status.code(), Some(3));
    assert_eq!(dmdscan(dir.path(), &["timing", "--config", "none.cfg"]).status.code(), Some(2));
}

#[test]
fn help_lists_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let o = ok(dmdscan(dir.path(), &["acquire", "--help"]));
    let help = stdout(&o);
    for needle in ["--slit-width", "[default: 1]", "[default: 25]", "[default: 10]", "--jitter", "--seed", "--config"] {
        assert!(help.contains(needle), "missing {needle}");
    }
    let o = ok(dmdscan(dir.path(), &["--help"]));
    for cmd in ["synth", "acquire", "reconstruct", "evaluate", "plan-roi", "spectra", "timing"] {
        assert!(stdout(&o).contains(cmd), "missing {cmd}");
    }
}
