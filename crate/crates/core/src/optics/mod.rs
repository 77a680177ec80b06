//! Instrument forward model: DMD slit patterns, grating dispersion, the
//! dark-stripe RGB frame, platform jitter and sensor readout.

mod capture;
mod frame;
mod jitter;
mod pattern;
pub mod pnm;
mod sensor;

pub use capture::{disperse_slit, translate_cube, translate_plane, Instrument, RGB_STREAM, SLICE_STREAM};
pub use frame::{RgbFrame, SliceFrame};
pub use jitter::{JitterKind, JitterModel, JitterOffset};
pub use pattern::{make_pattern, DmdDims, DmdPattern, MirrorMapping, MirrorState};
pub use sensor::{apply_noise, NoiseKey, Readout, SensorParams};
