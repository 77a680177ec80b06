//! Integer translation between a frame and the reference by masked
//! normalised cross-correlation of luminance.

use std::ops::Range;

use super::stripe::StripeEstimate;
use crate::error::{Error, Result};
use crate::image::Plane;
use crate::optics::RgbFrame;

pub const DEFAULT_SEARCH_RADIUS: usize = 8;

/// Motion of a frame relative to the reference: `frame(x, y) = ref(x - dx, y - dy)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameAlignment {
    pub dx: i32,
    pub dy: i32,
    /// Correlation at the peak.
    pub confidence: f64,
}

pub fn register_frame(
    rgb: &RgbFrame,
    reference: &RgbFrame,
    stripe: &StripeEstimate,
    ref_stripe: &StripeEstimate,
    radius: usize,
) -> Result<FrameAlignment> {
    if rgb.width() != reference.width() || rgb.height() != reference.height() {
        return Err(Error::Shape(format!(
            "frame {}x{} vs reference {}x{}",
            rgb.width(),
            rgb.height(),
            reference.width(),
            reference.height()
        )));
    }
    let w = rgb.width();
    register_planes(
        &rgb.luminance(),
        &reference.luminance(),
        stripe.masked_columns(w),
        ref_stripe.masked_columns(w),
        radius,
    )
}

/// Masked NCC at a single shift, or `None` when either side is constant or
/// the overlap is under half the frame along either axis.
pub fn masked_ncc(
    frame: &Plane,
    reference: &Plane,
    frame_mask: &[bool],
    ref_mask: &[bool],
    dx: i32,
    dy: i32,
) -> Option<f64> {
    let (w, h) = (frame.width() as i64, frame.height() as i64);
    let (dx, dy) = (dx as i64, dy as i64);
    let x0 = dx.max(0);
    let x1 = (w + dx).min(w);
    let y0 = dy.max(0);
    let y1 = (h + dy).min(h);
    if 2 * (x1 - x0) < w || 2 * (y1 - y0) < h {
        return None;
    }
    // columns usable in frame coordinates
    let cols: Vec<usize> = (x0..x1)
        .filter(|&x| !frame_mask[x as usize] && !ref_mask[(x - dx) as usize])
        .map(|x| x as usize)
        .collect();
    if cols.is_empty() {
        return None;
    }
    let (mut sf, mut sr, mut sff, mut srr, mut sfr) = (0f64, 0f64, 0f64, 0f64, 0f64);
    let mut n = 0usize;
    for y in y0..y1 {
        let fr = frame.row(y as usize);
        let rr = reference.row((y - dy) as usize);
        for &x in &cols {
            let f = fr[x] as f64;
            let r = rr[(x as i64 - dx) as usize] as f64;
            sf += f;
            sr += r;
            sff += f * f;
            srr += r * r;
            sfr += f * r;
        }
        n += cols.len();
    }
    let n = n as f64;
    let vf = sff - sf * sf / n;
    let vr = srr - sr * sr / n;
    let cov = sfr - sf * sr / n;
    // relative floor guards against rounding residue on constant overlaps
    let eps = 1e-12 * n;
    if vf <= eps || vr <= eps {
        return None;
    }
    Some(cov / (vf * vr).sqrt())
}

fn column_mask(width: usize, cols: &Range<usize>) -> Vec<bool> {
    (0..width).map(|x| cols.contains(&x)).collect()
}

/// Exhaustive search over `[-radius, radius]^2`; ties go to the smallest
/// `|dx| + |dy|`, then the smallest `dx`, then the smallest `dy`.
pub fn register_planes(
    frame: &Plane,
    reference: &Plane,
    frame_masked: Range<usize>,
    ref_masked: Range<usize>,
    radius: usize,
) -> Result<FrameAlignment> {
    if !frame.same_shape(reference) {
        return Err(Error::Shape("frame and reference differ in size".into()));
    }
    let fm = column_mask(frame.width(), &frame_masked);
    let rm = column_mask(frame.width(), &ref_masked);
    let r = radius as i32;
    let mut best: Option<FrameAlignment> = None;
    for dy in -r..=r {
        for dx in -r..=r {
            let Some(c) = masked_ncc(frame, reference, &fm, &rm, dx, dy) else {
                continue;
            };
            let cand = FrameAlignment {
                dx,
                dy,
                confidence: c,
            };
            best = Some(match best {
                None => cand,
                Some(b) if better(&cand, &b) => cand,
                Some(b) => b,
            });
        }
    }
    best.ok_or(Error::NoSignal)
}

fn better(a: &FrameAlignment, b: &FrameAlignment) -> bool {
    if a.confidence != b.confidence {
        return a.confidence > b.confidence;
    }
    let key = |f: &FrameAlignment| (f.dx.abs() + f.dy.abs(), f.dx, f.dy);
    key(a) < key(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn textured(w: usize, h: usize, seed: u64) -> Plane {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        Plane::from_fn(w, h, |_, _| rng.random_range(0.1f32..0.9))
    }

    fn shift(p: &Plane, dx: i32, dy: i32) -> Plane {
        Plane::from_fn(p.width(), p.height(), |x, y| {
            let sx = x as i32 - dx;
            let sy = y as i32 - dy;
            if sx < 0 || sy < 0 || sx >= p.width() as i32 || sy >= p.height() as i32 {
                0.0
            } else {
                p.get(sx as usize, sy as usize)
            }
        })
    }

    #[test]
    fn self_registration() {
        let p = textured(40, 30, 1);
        let a = register_planes(&p, &p, 10..13, 10..13, 4).unwrap();
        assert_eq!((a.dx, a.dy), (0, 0));
        assert!((a.confidence - 1.0).abs() < 1e-9);
    }

    #[test]
    fn recovers_known_shift_against_brute_force() {
        let r = textured(48, 36, 2);
        let f = shift(&r, 3, -2);
        let a = register_planes(&f, &r, 20..21, 20..21, 5).unwrap();
        assert_eq!((a.dx, a.dy), (3, -2));
        // independent brute force over the window confirms the peak is unique
        let (fm, rm) = (column_mask(48, &(20..21)), column_mask(48, &(20..21)));
        let mut scores = Vec::new();
        for dy in -5..=5 {
            for dx in -5..=5 {
                if let Some(c) = masked_ncc(&f, &r, &fm, &rm, dx, dy) {
                    scores.push(((dx, dy), c));
                }
            }
        }
        let top = scores.iter().filter(|(_, c)| *c > 0.999).collect::<Vec<_>>();
        assert_eq!(top.len(), 1);
        assert_eq!(top[0].0, (3, -2));
    }

    #[test]
    fn constant_frames_have_no_signal() {
        let p = Plane::filled(20, 20, 0.4);
        assert!(matches!(
            register_planes(&p, &p, 3..5, 3..5, 2),
            Err(Error::NoSignal)
        ));
    }

    #[test]
    fn ties_prefer_small_shifts() {
        // a pure vertical ramp correlates perfectly at every dx
        let p = Plane::from_fn(30, 30, |_, y| y as f32);
        let a = register_planes(&p, &p, 0..0, 0..0, 3).unwrap();
        assert_eq!((a.dx, a.dy), (0, 0));
        let q = Plane::from_fn(30, 30, |x, _| x as f32);
        let f = shift(&q, 2, 0);
        let a = register_planes(&f, &q, 0..0, 0..0, 3).unwrap();
        // any dy matches a column ramp equally; the smallest |dy| wins
        assert_eq!(a.dy, 0);
    }

    #[test]
    fn tie_order_is_dx_then_dy() {
        let a = FrameAlignment { dx: -1, dy: 0, confidence: 0.5 };
        let b = FrameAlignment { dx: 1, dy: 0, confidence: 0.5 };
        let c = FrameAlignment { dx: 0, dy: -1, confidence: 0.5 };
        assert!(better(&a, &b));
        assert!(better(&a, &c));
        assert!(better(&c, &b));
    }
}
