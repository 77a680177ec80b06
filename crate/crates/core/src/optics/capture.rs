//! Forward model for one trigger: spectral slice plus auxiliary RGB frame.

use super::frame::{RgbFrame, SliceFrame};
use super::jitter::JitterOffset;
use super::pattern::{DmdDims, DmdPattern, MirrorMapping};
use super::sensor::{NoiseKey, Readout};
use crate::error::{Error, Result};
use crate::image::Plane;
use crate::scene::{rgb_render, RgbImage, RgbResponse, SpectralCube};

pub const SLICE_STREAM: u64 = 0;
pub const RGB_STREAM: u64 = 1;

/// Static description of the instrument.
#[derive(Debug, Clone, PartialEq)]
pub struct Instrument {
    pub dmd: DmdDims,
    pub mapping: MirrorMapping,
    /// Fraction of slit light still reaching the colour sensor.
    pub stripe_alpha: f64,
    pub rgb: RgbResponse,
    pub readout: Readout,
}

impl Instrument {
    /// Default mirror array, identity mapping, full diversion, float readout.
    pub fn new(wavelengths: &[f32]) -> Self {
        Self {
            dmd: DmdDims::default(),
            mapping: MirrorMapping::default(),
            stripe_alpha: 0.0,
            rgb: RgbResponse::gaussian(wavelengths),
            readout: Readout::Float,
        }
    }

    pub fn with_readout(mut self, readout: Readout) -> Self {
        self.readout = readout;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.stripe_alpha) {
            return Err(Error::Parameter(format!(
                "stripe attenuation {} outside [0, 1]",
                self.stripe_alpha
            )));
        }
        if let Some(s) = self.readout.sensor() {
            s.validate()?;
        }
        Ok(())
    }

    /// Captures the slice/RGB pair for `pattern` with the scene displaced by `offset`.
    pub fn capture_pair(
        &self,
        scene: &SpectralCube,
        pattern: &DmdPattern,
        offset: JitterOffset,
        frame_index: usize,
    ) -> Result<(SliceFrame, RgbFrame)> {
        let render = rgb_render(scene, &self.rgb)?;
        self.capture_with_render(scene, &render, pattern, offset, frame_index)
    }

    /// As [`capture_pair`](Self::capture_pair) with the undisplaced RGB render precomputed.
    pub fn capture_with_render(
        &self,
        scene: &SpectralCube,
        render: &RgbImage,
        pattern: &DmdPattern,
        offset: JitterOffset,
        frame_index: usize,
    ) -> Result<(SliceFrame, RgbFrame)> {
        if self.rgb.bands() != scene.bands() {
            return Err(Error::Shape(format!(
                "instrument configured for {} bands, scene has {}",
                self.rgb.bands(),
                scene.bands()
            )));
        }
        let cols = self.mapping.scene_columns(pattern)?;
        if cols.end > scene.width() {
            return Err(Error::range(
                "slit",
                format!(
                    "scene columns {cols:?} fall outside the {}-column scene",
                    scene.width()
                ),
            ));
        }
        if !(offset.dx.is_finite() && offset.dy.is_finite()) {
            return Err(Error::Parameter("jitter offset must be finite".into()));
        }

        let slice = disperse_slit(scene, cols.start, cols.len(), offset);
        let (mut data, bit_depth) = (slice, self.readout.sensor().map(|s| s.bit_depth));
        data = self.readout.read(
            data,
            NoiseKey {
                frame: frame_index as u64,
                stream: SLICE_STREAM,
            },
        );
        let slice = SliceFrame {
            rows: scene.height(),
            spectral_pixels: scene.bands() + cols.len() - 1,
            data,
            bit_depth,
            pattern: *pattern,
            frame_index,
        };

        let (w, h) = (scene.width(), scene.height());
        let mut rgb: Vec<f32> = Vec::with_capacity(3 * w * h);
        for plane in &render.channels {
            let mut moved = translate_plane(plane, offset);
            let alpha = self.stripe_alpha as f32;
            for y in 0..h {
                for x in cols.clone() {
                    moved[(x, y)] *= alpha;
                }
            }
            rgb.extend_from_slice(moved.data());
        }
        let rgb = self.readout.read(
            rgb,
            NoiseKey {
                frame: frame_index as u64,
                stream: RGB_STREAM,
            },
        );
        let mut chunks = rgb.chunks_exact(w * h).map(|c| Plane::from_vec(w, h, c.to_vec()));
        let channels = [
            chunks.next().unwrap(),
            chunks.next().unwrap(),
            chunks.next().unwrap(),
        ];
        let rgb = RgbFrame {
            image: RgbImage { channels },
            bit_depth,
            frame_index,
            timestamp_ms: 0.0,
        };
        Ok((slice, rgb))
    }
}

/// Value of the displaced scene `H'(x, y) = H(x - dx, y - dy)`, zero outside.
fn displaced(scene: &SpectralCube, band: usize, x: usize, y: usize, offset: JitterOffset) -> f64 {
    let sx = x as f64 - offset.dx;
    let sy = y as f64 - offset.dy;
    if offset.is_integer() {
        let (w, h) = (scene.width() as f64, scene.height() as f64);
        if sx < 0.0 || sy < 0.0 || sx >= w || sy >= h {
            0.0
        } else {
            scene.get(sx as usize, sy as usize, band) as f64
        }
    } else {
        bilinear(|xi, yi| {
            if xi < 0 || yi < 0 || xi >= scene.width() as isize || yi >= scene.height() as isize {
                0.0
            } else {
                scene.get(xi as usize, yi as usize, band) as f64
            }
        }, sx, sy)
    }
}

fn bilinear(f: impl Fn(isize, isize) -> f64, sx: f64, sy: f64) -> f64 {
    let (x0, y0) = (sx.floor(), sy.floor());
    let (fx, fy) = (sx - x0, sy - y0);
    let (x0, y0) = (x0 as isize, y0 as isize);
    let top = f(x0, y0) * (1.0 - fx) + f(x0 + 1, y0) * fx;
    let bottom = f(x0, y0 + 1) * (1.0 - fx) + f(x0 + 1, y0 + 1) * fx;
    top * (1.0 - fy) + bottom * fy
}

/// Noiseless shift-and-add dispersion of scene columns `[start, start + width)`.
///
/// Detector column `u` of row `y` receives band `u - j` of slit column `j`.
pub fn disperse_slit(
    scene: &SpectralCube,
    start: usize,
    width: usize,
    offset: JitterOffset,
) -> Vec<f32> {
    let bands = scene.bands();
    let spectral = bands + width - 1;
    let rows = scene.height();
    let mut out = vec![0f32; rows * spectral];
    for y in 0..rows {
        let row = &mut out[y * spectral..(y + 1) * spectral];
        for (u, o) in row.iter_mut().enumerate() {
            let mut acc = 0f64;
            for j in 0..width {
                if u >= j && u - j < bands {
                    acc += displaced(scene, u - j, start + j, y, offset);
                }
            }
            *o = acc as f32;
        }
    }
    out
}

/// Displaces a plane by `offset` (zero fill; bilinear when fractional).
pub fn translate_plane(plane: &Plane, offset: JitterOffset) -> Plane {
    let (w, h) = (plane.width(), plane.height());
    if offset == JitterOffset::ZERO {
        return plane.clone();
    }
    Plane::from_fn(w, h, |x, y| {
        let sx = x as f64 - offset.dx;
        let sy = y as f64 - offset.dy;
        if offset.is_integer() {
            if sx < 0.0 || sy < 0.0 || sx >= w as f64 || sy >= h as f64 {
                0.0
            } else {
                plane.get(sx as usize, sy as usize)
            }
        } else {
            bilinear(
                |xi, yi| {
                    if xi < 0 || yi < 0 || xi >= w as isize || yi >= h as isize {
                        0.0
                    } else {
                        plane.get(xi as usize, yi as usize) as f64
                    }
                },
                sx,
                sy,
            ) as f32
        }
    })
}

/// Displaces every band of a cube (used by tests and by the equivariance checks).
pub fn translate_cube(scene: &SpectralCube, offset: JitterOffset) -> SpectralCube {
    let (w, h) = (scene.width(), scene.height());
    let mut data = Vec::with_capacity(scene.data().len());
    for b in 0..scene.bands() {
        for y in 0..h {
            for x in 0..w {
                data.push(displaced(scene, b, x, y, offset) as f32);
            }
        }
    }
    SpectralCube::from_data(w, h, scene.wavelengths().to_vec(), data)
        .expect("translation preserves shape")
}
