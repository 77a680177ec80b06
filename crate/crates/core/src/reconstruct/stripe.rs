use crate::error::{Error, Result};
use crate::image::Plane;
use crate::optics::RgbFrame;

pub const DEFAULT_STRIPE_THRESHOLD: f64 = 0.2;

/// Where the dark stripe sits in a frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripeEstimate {
    /// Sub-pixel centre in frame columns; a slit covering `[p, p + w)` has centre `p + (w - 1) / 2`.
    pub center: f64,
    pub width: usize,
    /// `(median - min) / median` of the column luminance profile.
    pub contrast: f64,
}

impl StripeEstimate {
    /// Integer start column of the stripe.
    pub fn start(&self) -> isize {
        (self.center - (self.width as f64 - 1.0) / 2.0).round() as isize
    }

    /// Stripe columns dilated by one on each side, clipped to `0..width`.
    pub fn masked_columns(&self, frame_width: usize) -> std::ops::Range<usize> {
        let s = self.start() - 1;
        let e = self.start() + self.width as isize + 1;
        let clip = |v: isize| v.clamp(0, frame_width as isize) as usize;
        clip(s)..clip(e)
    }
}

/// Mean over rows of each column.
pub fn column_profile(lum: &Plane) -> Vec<f64> {
    let (w, h) = (lum.width(), lum.height());
    let mut acc = vec![0f64; w];
    for y in 0..h {
        for (a, &v) in acc.iter_mut().zip(lum.row(y)) {
            *a += v as f64;
        }
    }
    acc.iter_mut().for_each(|a| *a /= h as f64);
    acc
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn argmin(values: &[f64], range: std::ops::Range<usize>) -> Option<usize> {
    range.min_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)))
}

/// Lengths of the near-black runs touching the left and right frame edges.
///
/// A column counts as black when it sits within a quarter of the way from the
/// darkest column to the median; zero fill and the stripe share the same
/// noise statistics, so this holds for both.
pub fn edge_dark_runs(profile: &[f64]) -> (usize, usize) {
    if profile.is_empty() {
        return (0, 0);
    }
    let med = median(profile);
    let min = profile.iter().cloned().fold(f64::INFINITY, f64::min);
    let floor = min + 0.25 * (med - min);
    let left = profile.iter().take_while(|&&v| v <= floor).count();
    let right = profile[left..].iter().rev().take_while(|&&v| v <= floor).count();
    (left, right)
}

/// Like [`locate_stripe_in`] but only considers stripes lying inside `allowed` columns.
pub fn locate_stripe_within(
    lum: &Plane,
    expected_width: usize,
    threshold: f64,
    allowed: std::ops::Range<usize>,
) -> Result<StripeEstimate> {
    let (w, h) = (lum.width(), lum.height());
    if w < 3 || h < 3 {
        return Err(Error::Shape(format!("frame {w}x{h} is smaller than 3x3")));
    }
    let end = allowed.end.min(w);
    if expected_width == 0 || allowed.start + expected_width > end {
        return Err(Error::range(
            "expected stripe width",
            format!("{expected_width} does not fit in columns {allowed:?}"),
        ));
    }
    let cols = column_profile(lum);
    let boxed = box_filter(&cols, expected_width);
    let med = median(&cols);
    let last = end - expected_width;
    let best = argmin(&boxed, allowed.start..last + 1).expect("non-empty range");
    let mut est = finish(&boxed, best, med, expected_width, threshold)?;
    // a neighbour outside the allowed span says nothing about sub-pixel position
    if best == allowed.start || best == last {
        est.center = best as f64 + (expected_width as f64 - 1.0) / 2.0;
    }
    Ok(est)
}

fn box_filter(cols: &[f64], width: usize) -> Vec<f64> {
    (0..cols.len() + 1 - width)
        .map(|i| cols[i..i + width].iter().sum::<f64>() / width as f64)
        .collect()
}

fn finish(boxed: &[f64], best: usize, med: f64, width: usize, threshold: f64) -> Result<StripeEstimate> {
    let n = boxed.len();
    let contrast = if med > 0.0 { (med - boxed[best]) / med } else { 0.0 };
    if !(contrast >= threshold) {
        return Err(Error::NoStripe {
            contrast,
            threshold,
        });
    }
    let mut delta = 0.0;
    if best > 0 && best + 1 < n {
        let (l, c, r) = (boxed[best - 1], boxed[best], boxed[best + 1]);
        let curv = l - 2.0 * c + r;
        if curv > 0.0 {
            delta = (0.5 * (l - r) / curv).clamp(-0.5, 0.5);
        }
    }
    Ok(StripeEstimate {
        center: best as f64 + delta + (width as f64 - 1.0) / 2.0,
        width,
        contrast,
    })
}

pub fn locate_stripe(rgb: &RgbFrame, expected_width: usize) -> Result<StripeEstimate> {
    locate_stripe_in(&rgb.luminance(), expected_width, DEFAULT_STRIPE_THRESHOLD)
}

/// Finds the darkest `expected_width`-wide run of columns in a luminance plane.
/// Ties go to the leftmost run.
pub fn locate_stripe_in(lum: &Plane, expected_width: usize, threshold: f64) -> Result<StripeEstimate> {
    let (w, h) = (lum.width(), lum.height());
    if w < 3 || h < 3 {
        return Err(Error::Shape(format!("frame {w}x{h} is smaller than 3x3")));
    }
    if expected_width == 0 || expected_width > w {
        return Err(Error::range(
            "expected stripe width",
            format!("{expected_width} not in 1..={w}"),
        ));
    }
    let cols = column_profile(lum);
    let n = w - expected_width + 1;
    let boxed = box_filter(&cols, expected_width);
    let med = median(&cols);
    let best = argmin(&boxed, 0..n).expect("non-empty profile");
    finish(&boxed, best, med, expected_width, threshold)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame_with_dark(w: usize, cols: &[usize]) -> Plane {
        Plane::from_fn(w, 8, |x, _| if cols.contains(&x) { 0.0 } else { 0.5 })
    }

    #[test]
    fn symmetric_two_column_stripe() {
        let p = frame_with_dark(300, &[100, 101]);
        let s = locate_stripe_in(&p, 2, 0.2).unwrap();
        assert!((s.center - 100.5).abs() < 0.01, "{}", s.center);
        assert!((s.contrast - 1.0).abs() < 1e-12);
        assert_eq!(s.masked_columns(300), 99..103);
    }

    #[test]
    fn uniform_frame_has_no_stripe() {
        let p = Plane::filled(50, 10, 0.5);
        assert!(matches!(
            locate_stripe_in(&p, 1, 0.2),
            Err(Error::NoStripe { .. })
        ));
    }

    #[test]
    fn stripe_at_left_edge() {
        let p = frame_with_dark(40, &[0]);
        let s = locate_stripe_in(&p, 1, 0.2).unwrap();
        assert!((0.0..1.0).contains(&s.center));
    }

    #[test]
    fn parabolic_refinement_is_bounded() {
        // asymmetric shoulders pull the vertex toward the darker side, never past half a pixel
        let p = Plane::from_fn(20, 4, |x, _| match x {
            9 => 0.1,
            10 => 0.0,
            _ => 0.5,
        });
        let s = locate_stripe_in(&p, 1, 0.2).unwrap();
        assert!(s.center < 10.0 && s.center > 9.5);
    }

    #[test]
    fn restricted_search_skips_fill() {
        // zero fill in 0..3 with the stripe right next to it at 3
        let p = frame_with_dark(40, &[0, 1, 2, 3]);
        let s = locate_stripe_within(&p, 1, 0.2, 3..40).unwrap();
        assert_eq!(s.start(), 3);
        assert_eq!(edge_dark_runs(&column_profile(&p)), (4, 0));
    }

    #[test]
    fn shape_and_width_errors() {
        assert!(locate_stripe_in(&Plane::new(2, 5), 1, 0.2).is_err());
        assert!(locate_stripe_in(&Plane::filled(10, 5, 1.0), 0, 0.2).is_err());
        assert!(locate_stripe_in(&Plane::filled(10, 5, 1.0), 11, 0.2).is_err());
    }
}
