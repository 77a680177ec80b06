//! Acquisition directories: `manifest`, `slice_%05d.*`, `rgb_%05d.*`, `jitter.log`.
//!
//! Quantised frames are stored as PGM/PPM, float frames as PFM.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use super::acquire::{AcquisitionRecord, FrameEntry, Observation};
use super::plan::{ScanGeometry, ScanPlan, TimingParams};
use crate::error::{Error, Result};
use crate::fsutil::write_atomic;
use crate::optics::{make_pattern, DmdDims, JitterOffset, MirrorMapping, Readout, RgbFrame, SensorParams, SliceFrame};

pub const MANIFEST: &str = "manifest";
pub const JITTER_LOG: &str = "jitter.log";

fn frame_names(k: usize, quantized: bool) -> (String, String) {
    if quantized {
        (format!("slice_{k:05}.pgm"), format!("rgb_{k:05}.ppm"))
    } else {
        (format!("slice_{k:05}.pfm"), format!("rgb_{k:05}.pfm"))
    }
}

fn manifest_text(obs: &Observation) -> String {
    let mut s = String::from("# dmdscan acquisition\nversion 1\n");
    let _ = writeln!(s, "scene {} {}", obs.scene_width, obs.scene_height);
    let wl: Vec<String> = obs.wavelengths.iter().map(|w| w.to_string()).collect();
    let _ = writeln!(s, "wavelengths {}", wl.join(" "));
    let g = &obs.plan.geometry;
    let _ = writeln!(s, "dmd {} {}", g.dmd.width, g.dmd.height);
    let _ = writeln!(s, "mirror_group {}", g.mapping.group);
    let _ = writeln!(s, "slit_width {}", obs.plan.slit_width);
    let _ = writeln!(s, "dwell_ms {}", obs.plan.dwell_ms);
    let t = &obs.timing;
    let _ = writeln!(
        s,
        "timing {} {} {} {} {} {}",
        t.dmd_max_pattern_hz, t.sensor_min_fps, t.sensor_max_fps, t.sensor_fps, t.exposure_ms, t.overhead_ms
    );
    let _ = writeln!(s, "stripe_alpha {}", obs.stripe_alpha);
    match &obs.readout {
        Readout::Float => s.push_str("readout float\n"),
        Readout::Sensor(p) => {
            let _ = writeln!(
                s,
                "readout sensor {} {} {} {} {} {} {}",
                p.bit_depth,
                p.full_well,
                p.read_noise_sigma,
                p.gain,
                p.exposure_ms,
                u8::from(p.shot_noise),
                p.seed
            );
        }
    }
    let _ = writeln!(s, "frames {}", obs.frames.len());
    for (k, f) in obs.frames.iter().enumerate() {
        let p = &f.slice.pattern;
        let _ = writeln!(s, "frame {k} {} {} {}", p.slit_start(), p.slit_width(), f.timestamp_ms);
    }
    s
}

/// Writes the record directory (created if missing).
pub fn save_record(record: &AcquisitionRecord, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let obs = record.observation();
    let quantized = obs.readout.sensor().is_some();
    for (k, f) in obs.frames.iter().enumerate() {
        let (sn, rn) = frame_names(k, quantized);
        write_atomic(&dir.join(sn), &f.slice.to_netpbm())?;
        write_atomic(&dir.join(rn), &f.rgb.to_netpbm())?;
    }
    let mut log = String::new();
    for o in record.hidden_jitter_log() {
        let _ = writeln!(log, "{} {}", o.dx, o.dy);
    }
    write_atomic(&dir.join(JITTER_LOG), log.as_bytes())?;
    // manifest last: its presence marks a complete directory
    write_atomic(&dir.join(MANIFEST), manifest_text(obs).as_bytes())
}

struct Manifest {
    fields: HashMap<String, (usize, Vec<String>)>,
    frames: Vec<(usize, Vec<String>)>,
}

impl Manifest {
    fn parse(text: &str) -> Result<Self> {
        let mut fields = HashMap::new();
        let mut frames = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let content = line.split('#').next().unwrap_or("").trim();
            let mut toks = content.split_whitespace().map(str::to_owned);
            let Some(key) = toks.next() else { continue };
            let rest: Vec<String> = toks.collect();
            if key == "frame" {
                frames.push((line_no, rest));
            } else if fields.insert(key.clone(), (line_no, rest)).is_some() {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("duplicate manifest key '{key}'"),
                });
            }
        }
        Ok(Self { fields, frames })
    }

    fn get(&self, key: &str) -> Result<&(usize, Vec<String>)> {
        self.fields.get(key).ok_or_else(|| Error::Parse {
            line: 0,
            message: format!("manifest is missing '{key}'"),
        })
    }

    fn nums<T: std::str::FromStr>(&self, key: &str, n: usize) -> Result<Vec<T>> {
        let (line, vals) = self.get(key)?;
        parse_list(*line, key, vals, Some(n))
    }
}

fn parse_list<T: std::str::FromStr>(line: usize, key: &str, vals: &[String], n: Option<usize>) -> Result<Vec<T>> {
    if let Some(n) = n {
        if vals.len() != n {
            return Err(Error::Parse {
                line,
                message: format!("'{key}' expects {n} values, found {}", vals.len()),
            });
        }
    }
    vals.iter()
        .map(|v| {
            v.parse().map_err(|_| Error::Parse {
                line,
                message: format!("'{key}': bad value '{v}'"),
            })
        })
        .collect()
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

/// Loads the instrument-visible part of a record directory; `jitter.log` is not touched.
pub fn load_observation(dir: impl AsRef<Path>) -> Result<Observation> {
    let dir = dir.as_ref();
    let text = std::fs::read_to_string(dir.join(MANIFEST)).map_err(|e| Error::io(dir.join(MANIFEST), e))?;
    let m = Manifest::parse(&text)?;
    let version: Vec<u32> = m.nums("version", 1)?;
    if version[0] != 1 {
        return Err(Error::Format(format!("unsupported manifest version {}", version[0])));
    }
    let scene: Vec<usize> = m.nums("scene", 2)?;
    let (wl_line, wl_vals) = m.get("wavelengths")?;
    let wavelengths: Vec<f32> = parse_list(*wl_line, "wavelengths", wl_vals, None)?;
    let dmd: Vec<usize> = m.nums("dmd", 2)?;
    let group: Vec<usize> = m.nums("mirror_group", 1)?;
    let slit_width: Vec<usize> = m.nums("slit_width", 1)?;
    let dwell: Vec<f64> = m.nums("dwell_ms", 1)?;
    let t: Vec<f64> = m.nums("timing", 6)?;
    let alpha: Vec<f64> = m.nums("stripe_alpha", 1)?;
    let (ro_line, ro) = m.get("readout")?;
    let readout = match ro.first().map(String::as_str) {
        Some("float") if ro.len() == 1 => Readout::Float,
        Some("sensor") if ro.len() == 8 => {
            let v: Vec<f64> = parse_list(*ro_line, "readout", &ro[1..7], None)?;
            let seed: Vec<u64> = parse_list(*ro_line, "readout", &ro[7..], None)?;
            let sensor = SensorParams {
                bit_depth: v[0] as u8,
                full_well: v[1],
                read_noise_sigma: v[2],
                gain: v[3],
                exposure_ms: v[4],
                shot_noise: v[5] != 0.0,
                seed: seed[0],
            };
            sensor.validate()?;
            Readout::Sensor(sensor)
        }
        _ => {
            return Err(Error::Parse {
                line: *ro_line,
                message: "readout must be 'float' or 'sensor' with 7 parameters".into(),
            })
        }
    };
    let n_frames: Vec<usize> = m.nums("frames", 1)?;
    if m.frames.len() != n_frames[0] {
        return Err(Error::Format(format!(
            "manifest announces {} frames but lists {}",
            n_frames[0],
            m.frames.len()
        )));
    }
    let geometry = ScanGeometry {
        dmd: DmdDims {
            width: dmd[0],
            height: dmd[1],
        },
        mapping: MirrorMapping { group: group[0] },
    };
    let timing = TimingParams {
        dmd_max_pattern_hz: t[0],
        sensor_min_fps: t[1],
        sensor_max_fps: t[2],
        sensor_fps: t[3],
        exposure_ms: t[4],
        overhead_ms: t[5],
    };
    let quantized = readout.sensor().is_some();
    let mut patterns = Vec::with_capacity(m.frames.len());
    let mut frames = Vec::with_capacity(m.frames.len());
    for (k, (line, vals)) in m.frames.iter().enumerate() {
        if vals.len() != 4 {
            return Err(Error::Parse {
                line: *line,
                message: "frame expects: index slit_start slit_width timestamp_ms".into(),
            });
        }
        let ints: Vec<usize> = parse_list(*line, "frame", &vals[..3], None)?;
        let ts: Vec<f64> = parse_list(*line, "frame", &vals[3..], None)?;
        if ints[0] != k {
            return Err(Error::Parse {
                line: *line,
                message: format!("frame index {} out of order (expected {k})", ints[0]),
            });
        }
        let pattern = make_pattern(ints[1], ints[2], geometry.dmd)?;
        let (sn, rn) = frame_names(k, quantized);
        let slice = SliceFrame::from_netpbm(&read_file(&dir.join(sn))?, pattern, k)?;
        let rgb = RgbFrame::from_netpbm(&read_file(&dir.join(rn))?, k, ts[0])?;
        if rgb.width() != scene[0] || rgb.height() != scene[1] || slice.rows != scene[1] {
            return Err(Error::Shape(format!("frame {k} does not match the {}x{} scene", scene[0], scene[1])));
        }
        patterns.push(pattern);
        frames.push(FrameEntry {
            slice,
            rgb,
            timestamp_ms: ts[0],
        });
    }
    Ok(Observation {
        scene_width: scene[0],
        scene_height: scene[1],
        wavelengths,
        plan: ScanPlan {
            patterns,
            slit_width: slit_width[0],
            dwell_ms: dwell[0],
            geometry,
        },
        timing,
        readout,
        stripe_alpha: alpha[0],
        frames,
    })
}

/// Loads the observation together with `jitter.log`.
pub fn load_record(dir: impl AsRef<Path>) -> Result<AcquisitionRecord> {
    let dir = dir.as_ref();
    let obs = load_observation(dir)?;
    let path = dir.join(JITTER_LOG);
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let mut log = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let v: Vec<f64> = parse_list(i + 1, "jitter", &line.split_whitespace().map(str::to_owned).collect::<Vec<_>>(), Some(2))?;
        log.push(JitterOffset::new(v[0], v[1]));
    }
    AcquisitionRecord::new(obs, log)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::controller::{full_scan_plan, run_acquisition};
    use crate::optics::{Instrument, JitterModel};
    use crate::scene::{uniform_wavelengths, SpectralCube};

    fn record(readout: Readout) -> AcquisitionRecord {
        let data = (0..9 * 4 * 5).map(|i| ((i * 13) % 29) as f32 / 29.0).collect();
        let c = SpectralCube::from_data(9, 4, uniform_wavelengths(400.0, 900.0, 5), data).unwrap();
        let t = TimingParams::default();
        let plan = full_scan_plan(9, 2, &t).unwrap();
        let inst = Instrument::new(c.wavelengths()).with_readout(readout);
        run_acquisition(&c, &plan, &t, &inst, &JitterModel::random_walk(1.0, 2)).unwrap()
    }

    #[test]
    fn round_trip_quantised_and_float() {
        for readout in [Readout::Float, Readout::Sensor(SensorParams::default())] {
            let rec = record(readout);
            let dir = tempfile::tempdir().unwrap();
            save_record(&rec, dir.path()).unwrap();
            assert_eq!(load_record(dir.path()).unwrap(), rec);
        }
    }

    #[test]
    fn observation_ignores_missing_jitter_log() {
        let rec = record(Readout::Float);
        let dir = tempfile::tempdir().unwrap();
        save_record(&rec, dir.path()).unwrap();
        std::fs::remove_file(dir.path().join(JITTER_LOG)).unwrap();
        assert_eq!(&load_observation(dir.path()).unwrap(), rec.observation());
        assert!(load_record(dir.path()).is_err());
    }

    #[test]
    fn missing_frame_file_is_io() {
        let rec = record(Readout::Sensor(SensorParams::default()));
        let dir = tempfile::tempdir().unwrap();
        save_record(&rec, dir.path()).unwrap();
        std::fs::remove_file(dir.path().join("rgb_00002.ppm")).unwrap();
        assert!(matches!(load_observation(dir.path()), Err(Error::Io { .. })));
    }
}
