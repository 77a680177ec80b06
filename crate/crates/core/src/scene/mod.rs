//! Hyperspectral cube model, synthetic scenes, spectral rebinning, RGB rendering and cube files.

mod cube;
mod io;
mod rebin;
mod rgb;
mod synth;
mod text;

pub use cube::{default_wavelengths, uniform_wavelengths, SpectralCube};
pub use io::{decode_cube, encode_cube, read_cube, write_cube, CUBE_MAGIC};
pub use rebin::{even_groups, fixed_groups, group_wavelengths, rebin_groups, rebin_spectral};
pub use rgb::{rgb_render, RgbImage, RgbResponse};
pub use synth::{
    synth_scene, Primitive, SceneSpec, Shape, Spectrum, SpectrumTerm, WavelengthGrid,
};
pub use text::{parse_scene_spec, roi_field_demo, three_leaf_demo, ROI_FIELD_DEMO, THREE_LEAF_DEMO};
