use std::ops::Range;

use crate::error::{Error, Result};
use crate::optics::{DmdDims, DmdPattern, MirrorMapping};

/// Trigger timing of the DMD and the sensor pair.
#[derive(Debug, Clone, PartialEq)]
pub struct TimingParams {
    pub dmd_max_pattern_hz: f64,
    pub sensor_min_fps: f64,
    pub sensor_max_fps: f64,
    /// Operating frame rate, within `[sensor_min_fps, sensor_max_fps]`.
    pub sensor_fps: f64,
    pub exposure_ms: f64,
    pub overhead_ms: f64,
}

impl Default for TimingParams {
    fn default() -> Self {
        Self {
            dmd_max_pattern_hz: 9_523.0,
            sensor_min_fps: 25.0,
            sensor_max_fps: 60.0,
            sensor_fps: 25.0,
            exposure_ms: 10.0,
            overhead_ms: 0.0,
        }
    }
}

impl TimingParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            self.dmd_max_pattern_hz,
            self.sensor_min_fps,
            self.sensor_max_fps,
            self.sensor_fps,
            self.exposure_ms,
        ];
        if positive.iter().any(|v| !(*v > 0.0 && v.is_finite())) || !(self.overhead_ms >= 0.0) {
            return Err(Error::Parameter(
                "timing rates and exposure must be positive, overhead non-negative".into(),
            ));
        }
        if self.sensor_min_fps > self.sensor_max_fps {
            return Err(Error::Parameter(format!(
                "sensor frame-rate range {}..{} is inverted",
                self.sensor_min_fps, self.sensor_max_fps
            )));
        }
        if !(self.sensor_min_fps..=self.sensor_max_fps).contains(&self.sensor_fps) {
            return Err(Error::Parameter(format!(
                "sensor rate {} fps outside {}..{} fps",
                self.sensor_fps, self.sensor_min_fps, self.sensor_max_fps
            )));
        }
        Ok(())
    }

    /// Time per pattern: the slowest of exposure, sensor frame period and DMD
    /// pattern period, plus overhead.
    pub fn dwell_ms(&self) -> f64 {
        self.exposure_ms
            .max(1000.0 / self.sensor_fps)
            .max(1000.0 / self.dmd_max_pattern_hz)
            + self.overhead_ms
    }
}

/// Where plans are laid out: mirror array and mirror-to-scene mapping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ScanGeometry {
    pub dmd: DmdDims,
    pub mapping: MirrorMapping,
}

/// Ordered, non-overlapping slit sequence with a common dwell.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanPlan {
    pub patterns: Vec<DmdPattern>,
    pub slit_width: usize,
    pub dwell_ms: f64,
    pub geometry: ScanGeometry,
}

impl ScanPlan {
    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    /// Scene columns of each pattern, in plan order.
    pub fn scene_columns(&self) -> Vec<Range<usize>> {
        self.patterns
            .iter()
            .map(|p| {
                self.geometry
                    .mapping
                    .scene_columns(p)
                    .expect("plan patterns align to mirror groups")
            })
            .collect()
    }

    /// Patterns are pairwise disjoint and ordered left to right.
    pub fn is_monotone_disjoint(&self) -> bool {
        self.patterns
            .windows(2)
            .all(|w| w[0].slit_start() + w[0].slit_width() <= w[1].slit_start())
    }
}

/// Tiles each scene-column interval left to right with slits of `slit_width`;
/// the last slit of an interval is clipped to its end.
pub fn plan_intervals(
    intervals: &[Range<usize>],
    slit_width: usize,
    timing: &TimingParams,
    geometry: ScanGeometry,
) -> Result<ScanPlan> {
    if slit_width == 0 {
        return Err(Error::range("slit width", "must be at least one column"));
    }
    timing.validate()?;
    let mut sorted: Vec<Range<usize>> = intervals.iter().filter(|r| !r.is_empty()).cloned().collect();
    sorted.sort_by_key(|r| r.start);
    if let Some(w) = sorted.windows(2).find(|w| w[0].end > w[1].start) {
        return Err(Error::Parameter(format!(
            "scan intervals {:?} and {:?} overlap",
            w[0], w[1]
        )));
    }
    let mut patterns = Vec::new();
    for r in &sorted {
        let mut start = r.start;
        while start < r.end {
            let width = slit_width.min(r.end - start);
            patterns.push(geometry.mapping.pattern_for(start, width, geometry.dmd)?);
            start += width;
        }
    }
    Ok(ScanPlan {
        patterns,
        slit_width,
        dwell_ms: timing.dwell_ms(),
        geometry,
    })
}

/// Full left-to-right scan of `scene_width` columns on the default mirror array.
pub fn full_scan_plan(scene_width: usize, slit_width: usize, timing: &TimingParams) -> Result<ScanPlan> {
    full_scan_plan_with(scene_width, slit_width, timing, ScanGeometry::default())
}

pub fn full_scan_plan_with(
    scene_width: usize,
    slit_width: usize,
    timing: &TimingParams,
    geometry: ScanGeometry,
) -> Result<ScanPlan> {
    if slit_width == 0 || slit_width > scene_width {
        return Err(Error::range(
            "slit width",
            format!("{slit_width} not in 1..={scene_width}"),
        ));
    }
    plan_intervals(&[0..scene_width], slit_width, timing, geometry)
}

/// Total acquisition time in milliseconds.
pub fn estimate_time(plan: &ScanPlan, timing: &TimingParams) -> f64 {
    plan.len() as f64 * timing.dwell_ms()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pattern_counts() {
        let t = TimingParams::default();
        let p = full_scan_plan(400, 1, &t).unwrap();
        assert_eq!(p.len(), 400);
        assert!(p
            .patterns
            .iter()
            .enumerate()
            .all(|(i, q)| q.slit_start() == i && q.slit_width() == 1));
        assert_eq!(full_scan_plan(400, 4, &t).unwrap().len(), 100);
        let clipped = full_scan_plan(5, 2, &t).unwrap();
        assert_eq!(clipped.len(), 3);
        assert_eq!(clipped.patterns[2].slit_width(), 1);
        assert!(matches!(full_scan_plan(5, 0, &t), Err(Error::Range { .. })));
    }

    #[test]
    fn dwell_rule() {
        let t = TimingParams::default();
        assert_eq!(t.dwell_ms(), 40.0);
        let p = full_scan_plan(400, 1, &t).unwrap();
        assert_eq!(estimate_time(&p, &t), 16_000.0);
        let fast = TimingParams {
            sensor_fps: 60.0,
            exposure_ms: 30.0,
            overhead_ms: 1.5,
            ..t.clone()
        };
        assert_eq!(fast.dwell_ms(), 31.5);
        let one = full_scan_plan(1, 1, &t).unwrap();
        assert_eq!(estimate_time(&one, &t), t.dwell_ms());
    }

    #[test]
    fn tiling_is_exact() {
        let t = TimingParams::default();
        for w in 1..=9 {
            let p = full_scan_plan(37, w, &t).unwrap();
            let mut covered = [0u8; 37];
            for r in p.scene_columns() {
                for c in r {
                    covered[c] += 1;
                }
            }
            assert!(covered.iter().all(|&c| c == 1), "width {w}");
            assert!(p.is_monotone_disjoint());
        }
    }

    #[test]
    fn timing_validation() {
        let bad = TimingParams {
            sensor_fps: 100.0,
            ..TimingParams::default()
        };
        assert!(bad.validate().is_err());
        let inverted = TimingParams {
            sensor_min_fps: 70.0,
            ..TimingParams::default()
        };
        assert!(inverted.validate().is_err());
    }

    #[test]
    fn wide_scene_needs_room_on_the_dmd() {
        let g = ScanGeometry {
            mapping: MirrorMapping { group: 8 },
            ..ScanGeometry::default()
        };
        assert!(full_scan_plan_with(240, 1, &TimingParams::default(), g).is_ok());
        assert!(full_scan_plan_with(241, 1, &TimingParams::default(), g).is_err());
    }
}
