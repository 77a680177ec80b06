use std::ops::Range;

use crate::error::{Error, Result};

/// Mirror array size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DmdDims {
    pub width: usize,
    pub height: usize,
}

impl Default for DmdDims {
    fn default() -> Self {
        Self {
            width: 1920,
            height: 1080,
        }
    }
}

/// Tilt state of a single mirror.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MirrorState {
    /// +12 degrees, light goes to the grating and the spectral sensor.
    TowardGrating,
    /// -12 degrees, light goes to the auxiliary colour sensor.
    TowardAuxiliary,
}

impl MirrorState {
    pub fn tilt_deg(self) -> f64 {
        match self {
            MirrorState::TowardGrating => 12.0,
            MirrorState::TowardAuxiliary => -12.0,
        }
    }
}

/// A slit: mirror columns `[slit_start, slit_start + slit_width)` tilted toward the grating.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DmdPattern {
    slit_start: usize,
    slit_width: usize,
    dims: DmdDims,
}

pub fn make_pattern(slit_start: usize, slit_width: usize, dims: DmdDims) -> Result<DmdPattern> {
    if slit_width == 0 {
        return Err(Error::range("slit width", "must be at least one column"));
    }
    if dims.width == 0 || dims.height == 0 {
        return Err(Error::range("DMD size", "mirror array must be non-empty"));
    }
    match slit_start.checked_add(slit_width) {
        Some(end) if end <= dims.width => Ok(DmdPattern {
            slit_start,
            slit_width,
            dims,
        }),
        _ => Err(Error::range(
            "slit",
            format!(
                "columns {slit_start}..{} exceed the {}-column mirror array",
                slit_start.saturating_add(slit_width),
                dims.width
            ),
        )),
    }
}

impl DmdPattern {
    pub fn slit_start(&self) -> usize {
        self.slit_start
    }

    pub fn slit_width(&self) -> usize {
        self.slit_width
    }

    pub fn dims(&self) -> DmdDims {
        self.dims
    }

    pub fn columns(&self) -> Range<usize> {
        self.slit_start..self.slit_start + self.slit_width
    }

    pub fn mirror_state(&self, column: usize) -> MirrorState {
        if self.columns().contains(&column) {
            MirrorState::TowardGrating
        } else {
            MirrorState::TowardAuxiliary
        }
    }

    pub fn overlaps(&self, other: &DmdPattern) -> bool {
        self.slit_start < other.slit_start + other.slit_width
            && other.slit_start < self.slit_start + self.slit_width
    }
}

/// Maps mirror columns onto scene columns: scene column `j` sees mirrors
/// `[j * group, (j + 1) * group)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MirrorMapping {
    pub group: usize,
}

impl Default for MirrorMapping {
    fn default() -> Self {
        Self { group: 1 }
    }
}

impl MirrorMapping {
    /// Scene columns covered by the pattern; the slit must align to whole groups.
    pub fn scene_columns(&self, pattern: &DmdPattern) -> Result<Range<usize>> {
        let g = self.group.max(1);
        if !pattern.slit_start.is_multiple_of(g) || !pattern.slit_width.is_multiple_of(g) {
            return Err(Error::range(
                "slit",
                format!(
                    "columns {:?} do not align to mirror groups of {g}",
                    pattern.columns()
                ),
            ));
        }
        Ok(pattern.slit_start / g..(pattern.slit_start + pattern.slit_width) / g)
    }

    /// Pattern for scene columns `[start, start + width)`.
    pub fn pattern_for(&self, start: usize, width: usize, dims: DmdDims) -> Result<DmdPattern> {
        let g = self.group.max(1);
        make_pattern(start * g, width * g, dims)
    }
}
