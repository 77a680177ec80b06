use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::cube::{uniform_wavelengths, SpectralCube};
use crate::error::{Error, Result};

/// One additive term of a parametric spectrum.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumTerm {
    Flat(f64),
    /// Gaussian peak of height `peak` centred at `center_nm`.
    Gaussian {
        center_nm: f64,
        fwhm_nm: f64,
        peak: f64,
    },
    /// Logistic step from `low` to `high` around `edge_nm`; `width_nm` is the 10-90 rise.
    RedEdge {
        edge_nm: f64,
        low: f64,
        high: f64,
        width_nm: f64,
    },
}

pub const DEFAULT_RED_EDGE_WIDTH_NM: f64 = 30.0;

impl SpectrumTerm {
    pub fn eval(&self, nm: f64) -> f64 {
        match *self {
            SpectrumTerm::Flat(v) => v,
            SpectrumTerm::Gaussian {
                center_nm,
                fwhm_nm,
                peak,
            } => {
                let sigma = fwhm_nm / (2.0 * (2.0 * std::f64::consts::LN_2).sqrt());
                let d = (nm - center_nm) / sigma;
                peak * (-0.5 * d * d).exp()
            }
            SpectrumTerm::RedEdge {
                edge_nm,
                low,
                high,
                width_nm,
            } => {
                // logistic 10-90 rise is 2 ln 9 scale units
                let scale = width_nm / (2.0 * 9f64.ln());
                low + (high - low) / (1.0 + (-(nm - edge_nm) / scale).exp())
            }
        }
    }
}

/// Sum of terms, clamped to [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub terms: Vec<SpectrumTerm>,
}

impl Spectrum {
    pub fn flat(v: f64) -> Self {
        Self {
            terms: vec![SpectrumTerm::Flat(v)],
        }
    }

    pub fn gaussian(center_nm: f64, fwhm_nm: f64, peak: f64) -> Self {
        Self {
            terms: vec![SpectrumTerm::Gaussian {
                center_nm,
                fwhm_nm,
                peak,
            }],
        }
    }

    pub fn eval(&self, nm: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.eval(nm))
            .sum::<f64>()
            .clamp(0.0, 1.0)
    }

    pub fn sample(&self, wavelengths: &[f32]) -> Vec<f32> {
        wavelengths.iter().map(|&w| self.eval(w as f64) as f32).collect()
    }

    fn validate(&self, lo_nm: f64, hi_nm: f64) -> std::result::Result<(), String> {
        if self.terms.is_empty() {
            return Err("spectrum has no terms".into());
        }
        for t in &self.terms {
            match *t {
                SpectrumTerm::Flat(v) if !(0.0..=1.0).contains(&v) => {
                    return Err(format!("flat level {v} outside [0, 1]"))
                }
                SpectrumTerm::Gaussian {
                    center_nm,
                    fwhm_nm,
                    peak,
                } => {
                    if !(lo_nm..=hi_nm).contains(&center_nm) {
                        return Err(format!(
                            "peak centre {center_nm} nm outside [{lo_nm}, {hi_nm}] nm"
                        ));
                    }
                    if !(fwhm_nm > 0.0) {
                        return Err(format!("FWHM {fwhm_nm} must be positive"));
                    }
                    if !(0.0..=1.0).contains(&peak) {
                        return Err(format!("peak height {peak} outside [0, 1]"));
                    }
                }
                SpectrumTerm::RedEdge {
                    edge_nm,
                    low,
                    high,
                    width_nm,
                } => {
                    if !(lo_nm..=hi_nm).contains(&edge_nm) {
                        return Err(format!("edge {edge_nm} nm outside [{lo_nm}, {hi_nm}] nm"));
                    }
                    if !(0.0..=1.0).contains(&low) || !(0.0..=1.0).contains(&high) {
                        return Err(format!("red-edge levels {low}/{high} outside [0, 1]"));
                    }
                    if !(width_nm > 0.0) {
                        return Err(format!("red-edge width {width_nm} must be positive"));
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Disk {
        cx: f64,
        cy: f64,
        radius: f64,
    },
    /// Axis-aligned rectangle covering `[cx - w/2, cx + w/2) x [cy - h/2, cy + h/2)`.
    Rect { cx: f64, cy: f64, w: f64, h: f64 },
    /// Lens-shaped leaf with pointed tips; `angle_deg` rotates the long axis from +x.
    Leaf {
        cx: f64,
        cy: f64,
        length: f64,
        width: f64,
        angle_deg: f64,
    },
}

impl Shape {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        match *self {
            Shape::Disk { cx, cy, radius } => {
                let (dx, dy) = (x - cx, y - cy);
                dx * dx + dy * dy <= radius * radius
            }
            Shape::Rect { cx, cy, w, h } => {
                x >= cx - w / 2.0 && x < cx + w / 2.0 && y >= cy - h / 2.0 && y < cy + h / 2.0
            }
            Shape::Leaf {
                cx,
                cy,
                length,
                width,
                angle_deg,
            } => {
                let (s, c) = angle_deg.to_radians().sin_cos();
                let (dx, dy) = (x - cx, y - cy);
                let u = dx * c + dy * s;
                let v = -dx * s + dy * c;
                let t = 2.0 * u / length;
                t.abs() <= 1.0 && v.abs() <= 0.5 * width * (1.0 - t * t)
            }
        }
    }

    /// Axis-aligned extent `(x0, y0, x1, y1)` in continuous pixel coordinates.
    pub fn extent(&self) -> (f64, f64, f64, f64) {
        match *self {
            Shape::Disk { cx, cy, radius } => (cx - radius, cy - radius, cx + radius, cy + radius),
            Shape::Rect { cx, cy, w, h } => (cx - w / 2.0, cy - h / 2.0, cx + w / 2.0, cy + h / 2.0),
            Shape::Leaf {
                cx,
                cy,
                length,
                width,
                angle_deg,
            } => {
                let (s, c) = angle_deg.to_radians().sin_cos();
                let hx = (0.5 * length * c).abs() + (0.5 * width * s).abs();
                let hy = (0.5 * length * s).abs() + (0.5 * width * c).abs();
                (cx - hx, cy - hy, cx + hx, cy + hy)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Primitive {
    pub shape: Shape,
    pub spectrum: Spectrum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavelengthGrid {
    pub start_nm: f64,
    pub end_nm: f64,
    pub bands: usize,
}

impl Default for WavelengthGrid {
    fn default() -> Self {
        Self {
            start_nm: 400.0,
            end_nm: 900.0,
            bands: 500,
        }
    }
}

impl WavelengthGrid {
    pub fn wavelengths(&self) -> Vec<f32> {
        uniform_wavelengths(self.start_nm, self.end_nm, self.bands)
    }
}

/// Declarative description of a synthetic scene.
///
/// `texture` is the amplitude of a seeded per-pixel multiplicative
/// modulation `1 + texture * u`, `u ~ U(-1, 1)`; zero gives piecewise-flat
/// spectra.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub width: usize,
    pub height: usize,
    pub grid: WavelengthGrid,
    pub background: Spectrum,
    pub primitives: Vec<Primitive>,
    pub texture: f64,
    pub seed: u64,
}

impl Default for SceneSpec {
    fn default() -> Self {
        Self {
            width: 400,
            height: 400,
            grid: WavelengthGrid::default(),
            background: Spectrum::flat(0.1),
            primitives: Vec::new(),
            texture: 0.0,
            seed: 0,
        }
    }
}

impl SceneSpec {
    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::Parameter(format!(
                "scene size {}x{} must be positive",
                self.width, self.height
            )));
        }
        let g = &self.grid;
        if g.bands == 0 || !(g.end_nm > g.start_nm) {
            return Err(Error::Parameter(format!(
                "wavelength grid {}..{} nm with {} bands is invalid",
                g.start_nm, g.end_nm, g.bands
            )));
        }
        if !(0.0..=1.0).contains(&self.texture) {
            return Err(Error::Parameter(format!(
                "texture {} outside [0, 1]",
                self.texture
            )));
        }
        self.background
            .validate(g.start_nm, g.end_nm)
            .map_err(|m| Error::Parameter(format!("background: {m}")))?;
        for (index, p) in self.primitives.iter().enumerate() {
            let (x0, y0, x1, y1) = p.shape.extent();
            let (w, h) = (self.width as f64, self.height as f64);
            if x0 < 0.0 || y0 < 0.0 || x1 > w || y1 > h {
                return Err(Error::InvalidPrimitive {
                    index,
                    message: format!(
                        "extent ({x0:.1}, {y0:.1})-({x1:.1}, {y1:.1}) leaves the {}x{} frame",
                        self.width, self.height
                    ),
                });
            }
            p.spectrum
                .validate(g.start_nm, g.end_nm)
                .map_err(|message| Error::InvalidPrimitive { index, message })?;
        }
        Ok(())
    }
}

/// Renders the ground-truth cube. Later primitives overwrite earlier ones.
pub fn synth_scene(spec: &SceneSpec) -> Result<SpectralCube> {
    spec.validate()?;
    let wavelengths = spec.grid.wavelengths();
    let (w, h, nb) = (spec.width, spec.height, wavelengths.len());

    // index 0 is the background, i + 1 is primitive i
    let mut spectra = Vec::with_capacity(spec.primitives.len() + 1);
    spectra.push(spec.background.sample(&wavelengths));
    spectra.extend(spec.primitives.iter().map(|p| p.spectrum.sample(&wavelengths)));

    let mut owner = vec![0usize; w * h];
    for y in 0..h {
        for x in 0..w {
            let (px, py) = (x as f64, y as f64);
            if let Some(i) = spec.primitives.iter().rposition(|p| p.shape.contains(px, py)) {
                owner[y * w + x] = i + 1;
            }
        }
    }

    let modulation: Option<Vec<f32>> = (spec.texture > 0.0).then(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        (0..w * h)
            .map(|_| (1.0 + spec.texture * rng.random_range(-1.0..1.0)) as f32)
            .collect()
    });

    let mut data = vec![0f32; w * h * nb];
    for b in 0..nb {
        let plane = &mut data[b * w * h..(b + 1) * w * h];
        for (i, v) in plane.iter_mut().enumerate() {
            let base = spectra[owner[i]][b];
            *v = match &modulation {
                Some(m) => (base * m[i]).clamp(0.0, 1.0),
                None => base,
            };
        }
    }
    SpectralCube::from_data(w, h, wavelengths, data)
}
