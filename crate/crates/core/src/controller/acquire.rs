use rayon::prelude::*;

use super::plan::{ScanPlan, TimingParams};
use crate::error::{Error, Result};
use crate::optics::{Instrument, JitterModel, JitterOffset, Readout, RgbFrame, SliceFrame};
use crate::scene::{rgb_render, SpectralCube};

/// One trigger: the pattern shown and both frames it produced.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameEntry {
    pub slice: SliceFrame,
    pub rgb: RgbFrame,
    pub timestamp_ms: f64,
}

/// Everything the instruments report: what reconstruction is allowed to see.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub scene_width: usize,
    pub scene_height: usize,
    pub wavelengths: Vec<f32>,
    pub plan: ScanPlan,
    pub timing: TimingParams,
    pub readout: Readout,
    pub stripe_alpha: f64,
    pub frames: Vec<FrameEntry>,
}

impl Observation {
    pub fn bands(&self) -> usize {
        self.wavelengths.len()
    }
}

/// An observation plus the simulator's true jitter offsets.
///
/// The jitter log exists for oracle tests only; reconstruction takes an
/// [`Observation`] and cannot reach it.
#[derive(Debug, Clone, PartialEq)]
pub struct AcquisitionRecord {
    observation: Observation,
    jitter_log: Vec<JitterOffset>,
}

impl AcquisitionRecord {
    pub fn new(observation: Observation, jitter_log: Vec<JitterOffset>) -> Result<Self> {
        if jitter_log.len() != observation.frames.len() {
            return Err(Error::Shape(format!(
                "{} jitter entries for {} frames",
                jitter_log.len(),
                observation.frames.len()
            )));
        }
        Ok(Self {
            observation,
            jitter_log,
        })
    }

    pub fn observation(&self) -> &Observation {
        &self.observation
    }

    pub fn hidden_jitter_log(&self) -> &[JitterOffset] {
        &self.jitter_log
    }

    pub fn into_observation(self) -> Observation {
        self.observation
    }
}

/// Runs the plan against the scene: one slice/RGB pair per pattern, in plan order.
///
/// Frames are rendered in parallel; each uses a noise stream derived from its
/// index, so the record does not depend on scheduling.
pub fn run_acquisition(
    scene: &SpectralCube,
    plan: &ScanPlan,
    timing: &TimingParams,
    instrument: &Instrument,
    jitter: &JitterModel,
) -> Result<AcquisitionRecord> {
    timing.validate()?;
    instrument.validate()?;
    if !plan.is_monotone_disjoint() {
        return Err(Error::Parameter(
            "plan patterns must be disjoint and left to right".into(),
        ));
    }
    if plan.geometry.mapping != instrument.mapping || plan.geometry.dmd != instrument.dmd {
        return Err(Error::Parameter(
            "plan geometry does not match the instrument".into(),
        ));
    }
    let offsets = jitter.offsets(plan.len())?;
    let render = rgb_render(scene, &instrument.rgb)?;
    let dwell = timing.dwell_ms();
    let frames = plan
        .patterns
        .par_iter()
        .zip(offsets.par_iter())
        .enumerate()
        .map(|(k, (pattern, &offset))| {
            let (slice, mut rgb) =
                instrument.capture_with_render(scene, &render, pattern, offset, k)?;
            let timestamp_ms = k as f64 * dwell;
            rgb.timestamp_ms = timestamp_ms;
            Ok(FrameEntry {
                slice,
                rgb,
                timestamp_ms,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let observation = Observation {
        scene_width: scene.width(),
        scene_height: scene.height(),
        wavelengths: scene.wavelengths().to_vec(),
        plan: plan.clone(),
        timing: timing.clone(),
        readout: instrument.readout.clone(),
        stripe_alpha: instrument.stripe_alpha,
        frames,
    };
    AcquisitionRecord::new(observation, offsets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::controller::full_scan_plan;
    use crate::optics::SensorParams;
    use crate::scene::uniform_wavelengths;

    fn cube() -> SpectralCube {
        let data = (0..12 * 5 * 4).map(|i| ((i * 37) % 101) as f32 / 101.0 + 0.01).collect();
        SpectralCube::from_data(12, 5, uniform_wavelengths(400.0, 900.0, 4), data).unwrap()
    }

    #[test]
    fn one_entry_per_pattern_with_increasing_time() {
        let c = cube();
        let t = TimingParams::default();
        let plan = full_scan_plan(12, 1, &t).unwrap();
        let rec = run_acquisition(&c, &plan, &t, &Instrument::new(c.wavelengths()), &JitterModel::none()).unwrap();
        let frames = &rec.observation().frames;
        assert_eq!(frames.len(), 12);
        assert!(frames.windows(2).all(|w| w[1].timestamp_ms > w[0].timestamp_ms));
        for (k, f) in frames.iter().enumerate() {
            assert_eq!(f.slice.frame_index, k);
            assert_eq!(f.rgb.frame_index, k);
            assert_eq!(f.slice.pattern, plan.patterns[k]);
            assert_eq!(f.timestamp_ms, 40.0 * k as f64);
        }
    }

    #[test]
    fn stacked_slices_reproduce_scene() {
        let c = cube();
        let t = TimingParams::default();
        let plan = full_scan_plan(12, 1, &t).unwrap();
        let rec = run_acquisition(&c, &plan, &t, &Instrument::new(c.wavelengths()), &JitterModel::none()).unwrap();
        for (x, f) in rec.observation().frames.iter().enumerate() {
            for y in 0..5 {
                for b in 0..4 {
                    assert_eq!(f.slice.get(y, b), c.get(x, y, b));
                }
            }
        }
    }

    #[test]
    fn zero_amplitude_walk_logs_zeros() {
        let c = cube();
        let t = TimingParams::default();
        let plan = full_scan_plan(12, 1, &t).unwrap();
        let rec = run_acquisition(
            &c,
            &plan,
            &t,
            &Instrument::new(c.wavelengths()),
            &JitterModel::random_walk(0.0, 3),
        )
        .unwrap();
        assert!(rec.hidden_jitter_log().iter().all(|o| *o == JitterOffset::ZERO));
    }

    #[test]
    fn fixed_seed_is_bitwise_reproducible() {
        let c = cube();
        let t = TimingParams::default();
        let plan = full_scan_plan(12, 2, &t).unwrap();
        let inst = Instrument::new(c.wavelengths()).with_readout(Readout::Sensor(SensorParams {
            seed: 99,
            ..SensorParams::default()
        }));
        let j = JitterModel::random_walk(2.0, 4);
        let a = run_acquisition(&c, &plan, &t, &inst, &j).unwrap();
        let b = run_acquisition(&c, &plan, &t, &inst, &j).unwrap();
        assert_eq!(a, b);
    }
}
