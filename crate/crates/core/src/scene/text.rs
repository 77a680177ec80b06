//! Line-oriented scene description format.
//!
//! ```text
//! # comment
//! size 200 200
//! grid 400 900 300          # start_nm end_nm bands
//! seed 7
//! texture 0.05
//! background flat 0.12
//! disk cx cy r <spectrum>
//! rect cx cy w h <spectrum>
//! leaf cx cy length width angle_deg <spectrum>
//! ```
//!
//! A `<spectrum>` is one or more terms joined by `+`:
//! `flat v`, `gauss center_nm fwhm_nm [peak]`, `rededge edge_nm low high [width_nm]`.

use super::synth::{
    Primitive, SceneSpec, Shape, Spectrum, SpectrumTerm, WavelengthGrid,
    DEFAULT_RED_EDGE_WIDTH_NM,
};
use crate::error::{Error, Result};

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn nums<const N: usize>(line: usize, what: &str, toks: &[&str]) -> Result<[f64; N]> {
    if toks.len() < N {
        return Err(err(
            line,
            format!("{what} needs {N} numbers, found {}", toks.len()),
        ));
    }
    let mut out = [0.0; N];
    for (o, t) in out.iter_mut().zip(toks) {
        *o = t
            .parse::<f64>()
            .map_err(|_| err(line, format!("{what}: '{t}' is not a number")))?;
        if !o.is_finite() {
            return Err(err(line, format!("{what}: '{t}' is not finite")));
        }
    }
    Ok(out)
}

fn parse_term(line: usize, toks: &[&str]) -> Result<SpectrumTerm> {
    let (kind, args) = toks
        .split_first()
        .ok_or_else(|| err(line, "empty spectrum term"))?;
    let opt = |i: usize, default: f64| -> Result<f64> {
        match args.get(i) {
            Some(t) => t
                .parse()
                .map_err(|_| err(line, format!("'{t}' is not a number"))),
            None => Ok(default),
        }
    };
    let term = match *kind {
        "flat" => {
            if args.len() != 1 {
                return Err(err(line, "flat takes exactly one level"));
            }
            SpectrumTerm::Flat(nums::<1>(line, "flat", args)?[0])
        }
        "gauss" => {
            if !(2..=3).contains(&args.len()) {
                return Err(err(line, "gauss takes center_nm fwhm_nm [peak]"));
            }
            let [center_nm, fwhm_nm] = nums::<2>(line, "gauss", args)?;
            SpectrumTerm::Gaussian {
                center_nm,
                fwhm_nm,
                peak: opt(2, 1.0)?,
            }
        }
        "rededge" => {
            if !(3..=4).contains(&args.len()) {
                return Err(err(line, "rededge takes edge_nm low high [width_nm]"));
            }
            let [edge_nm, low, high] = nums::<3>(line, "rededge", args)?;
            SpectrumTerm::RedEdge {
                edge_nm,
                low,
                high,
                width_nm: opt(3, DEFAULT_RED_EDGE_WIDTH_NM)?,
            }
        }
        other => return Err(err(line, format!("unknown spectrum term '{other}'"))),
    };
    Ok(term)
}

fn parse_spectrum(line: usize, toks: &[&str]) -> Result<Spectrum> {
    if toks.is_empty() {
        return Err(err(line, "missing spectrum"));
    }
    let terms = toks
        .split(|t| *t == "+")
        .map(|chunk| parse_term(line, chunk))
        .collect::<Result<Vec<_>>>()?;
    Ok(Spectrum { terms })
}

/// Parses a scene description. Validation of bounds is left to [`SceneSpec::validate`].
pub fn parse_scene_spec(text: &str) -> Result<SceneSpec> {
    let mut spec = SceneSpec::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = content.split_whitespace().collect();
        let Some((&key, rest)) = toks.split_first() else {
            continue;
        };
        match key {
            "size" => {
                let [w, h] = nums::<2>(line, "size", rest)?;
                if rest.len() != 2 || w < 1.0 || h < 1.0 || w.fract() != 0.0 || h.fract() != 0.0 {
                    return Err(err(line, "size takes two positive integers"));
                }
                spec.width = w as usize;
                spec.height = h as usize;
            }
            "grid" => {
                let [start_nm, end_nm, bands] = nums::<3>(line, "grid", rest)?;
                if rest.len() != 3 || bands < 1.0 || bands.fract() != 0.0 {
                    return Err(err(line, "grid takes start_nm end_nm bands"));
                }
                spec.grid = WavelengthGrid {
                    start_nm,
                    end_nm,
                    bands: bands as usize,
                };
            }
            "seed" => {
                if rest.len() != 1 {
                    return Err(err(line, "seed takes one integer"));
                }
                spec.seed = rest[0]
                    .parse()
                    .map_err(|_| err(line, format!("'{}' is not a seed", rest[0])))?;
            }
            "texture" => {
                if rest.len() != 1 {
                    return Err(err(line, "texture takes one amplitude"));
                }
                spec.texture = nums::<1>(line, "texture", rest)?[0];
            }
            "background" => spec.background = parse_spectrum(line, rest)?,
            "disk" => {
                let [cx, cy, radius] = nums::<3>(line, "disk", rest)?;
                spec.primitives.push(Primitive {
                    shape: Shape::Disk { cx, cy, radius },
                    spectrum: parse_spectrum(line, &rest[3..])?,
                });
            }
            "rect" => {
                let [cx, cy, w, h] = nums::<4>(line, "rect", rest)?;
                spec.primitives.push(Primitive {
                    shape: Shape::Rect { cx, cy, w, h },
                    spectrum: parse_spectrum(line, &rest[4..])?,
                });
            }
            "leaf" => {
                let [cx, cy, length, width, angle_deg] = nums::<5>(line, "leaf", rest)?;
                spec.primitives.push(Primitive {
                    shape: Shape::Leaf {
                        cx,
                        cy,
                        length,
                        width,
                        angle_deg,
                    },
                    spectrum: parse_spectrum(line, &rest[5..])?,
                });
            }
            other => return Err(err(line, format!("unknown directive '{other}'"))),
        }
    }
    Ok(spec)
}

/// Three separated leaves on a soil-like background, 200x200 pixels, 300 bands.
pub const THREE_LEAF_DEMO: &str = include_str!("../../demos/three_leaf.scene");

pub fn three_leaf_demo() -> SceneSpec {
    parse_scene_spec(THREE_LEAF_DEMO).expect("bundled demo parses")
}

/// 400-column field whose three leaves cover about 30% of the columns.
pub const ROI_FIELD_DEMO: &str = include_str!("../../demos/roi_field.scene");

pub fn roi_field_demo() -> SceneSpec {
    parse_scene_spec(ROI_FIELD_DEMO).expect("bundled demo parses")
}
