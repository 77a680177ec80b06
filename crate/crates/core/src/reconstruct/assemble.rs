use std::fmt::Write as _;
use std::ops::Range;

use rayon::prelude::*;

use super::register::{register_planes, FrameAlignment, DEFAULT_SEARCH_RADIUS};
use super::stripe::{
    column_profile, edge_dark_runs, locate_stripe_in, locate_stripe_within, StripeEstimate,
    DEFAULT_STRIPE_THRESHOLD,
};
use crate::controller::Observation;
use crate::error::{Error, Result};
use crate::image::Plane;
use crate::scene::{fixed_groups, group_wavelengths, SpectralCube};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssembleOptions {
    /// Plan position of the frame that defines scene coordinates.
    pub reference_index: usize,
    pub search_radius: usize,
    pub stripe_threshold: f64,
}

impl Default for AssembleOptions {
    fn default() -> Self {
        Self {
            reference_index: 0,
            search_radius: DEFAULT_SEARCH_RADIUS,
            stripe_threshold: DEFAULT_STRIPE_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameStatus {
    Placed,
    NoStripe,
    NoSignal,
    /// Registered outside the scene.
    OutOfBounds,
}

impl FrameStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            FrameStatus::Placed => "placed",
            FrameStatus::NoStripe => "no-stripe",
            FrameStatus::NoSignal => "no-signal",
            FrameStatus::OutOfBounds => "out-of-bounds",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameDiagnostic {
    pub frame_index: usize,
    pub stripe: Option<StripeEstimate>,
    pub alignment: Option<FrameAlignment>,
    /// First registered scene column, `round(s - (w - 1) / 2 - dx)`.
    pub column: Option<isize>,
    pub status: FrameStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructedCube {
    pub cube: SpectralCube,
    /// Number of slices written to each column.
    pub coverage: Vec<f32>,
    /// Frame indices that contributed to each column, in plan order.
    pub provenance: Vec<Vec<usize>>,
    /// Columns filled by interpolation rather than measurement.
    pub interpolated: Vec<bool>,
    pub diagnostics: Vec<FrameDiagnostic>,
}

impl ReconstructedCube {
    pub fn placed_frames(&self) -> usize {
        self.diagnostics
            .iter()
            .filter(|d| d.status == FrameStatus::Placed)
            .count()
    }

    pub fn uncovered_columns(&self) -> usize {
        self.coverage.iter().filter(|&&c| c == 0.0).count()
    }
}

/// Per-frame diagnostics as CSV.
pub fn diagnostics_csv(diagnostics: &[FrameDiagnostic]) -> String {
    let mut s = String::from("frame,stripe_center,contrast,dx,dy,confidence,column,status\n");
    for d in diagnostics {
        let (center, contrast) = match d.stripe {
            Some(st) => (format!("{:.3}", st.center), format!("{:.4}", st.contrast)),
            None => (String::new(), String::new()),
        };
        let (dx, dy, conf) = match d.alignment {
            Some(a) => (a.dx.to_string(), a.dy.to_string(), format!("{:.4}", a.confidence)),
            None => (String::new(), String::new(), String::new()),
        };
        let col = d.column.map(|c| c.to_string()).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{center},{contrast},{dx},{dy},{conf},{col},{}",
            d.frame_index,
            d.status.as_str()
        );
    }
    s
}

/// Output band groups for a plan slit width: `ceil(bands / w)` groups of `w`.
pub fn output_groups(bands: usize, slit_width: usize) -> Vec<Range<usize>> {
    fixed_groups(bands, slit_width.max(1))
}

/// Detector pixel and band count used to estimate group `g` from a slice of width `w_k`.
fn group_source(g: &Range<usize>, w_k: usize, bands: usize) -> (usize, usize) {
    let u = if w_k >= g.len() {
        g.start + w_k - 1
    } else {
        g.end - 1
    };
    let lo = (u + 1).saturating_sub(w_k);
    let count = u.min(bands - 1) + 1 - lo.min(bands);
    (u, count.max(1))
}

/// First-pass result for one frame.
struct Initial {
    stripe: StripeEstimate,
    alignment: Option<FrameAlignment>,
    /// Near-black runs at the left and right frame edges.
    runs: (usize, usize),
}

impl Initial {
    /// The stripe sits clear of both edge runs, so the runs are pure zero fill.
    fn is_clean(&self, frame_width: usize) -> bool {
        let s = self.stripe.start();
        s > self.runs.0 as isize
            && s + (self.stripe.width as isize) < frame_width as isize - self.runs.1 as isize
    }
}

struct FrameContext<'a> {
    reference: &'a Plane,
    ref_stripe: &'a StripeEstimate,
    opts: &'a AssembleOptions,
    scene_width: usize,
}

impl FrameContext<'_> {
    fn register(&self, lum: &Plane, stripe: &StripeEstimate) -> Result<Option<FrameAlignment>> {
        let w = lum.width();
        match register_planes(
            lum,
            self.reference,
            stripe.masked_columns(w),
            self.ref_stripe.masked_columns(w),
            self.opts.search_radius,
        ) {
            Ok(a) => Ok(Some(a)),
            Err(Error::NoSignal) => Ok(None),
            Err(e) => Err(e),
        }
    }

    fn initial(&self, lum: &Plane, width: usize) -> Result<Option<Initial>> {
        let stripe = match locate_stripe_in(lum, width, self.opts.stripe_threshold) {
            Ok(s) => s,
            Err(Error::NoStripe { .. }) => return Ok(None),
            Err(e) => return Err(e),
        };
        Ok(Some(Initial {
            stripe,
            alignment: self.register(lum, &stripe)?,
            runs: edge_dark_runs(&column_profile(lum)),
        }))
    }

    /// Stripe, alignment and registered column of one frame, given the
    /// horizontal platform offset of the reference frame.
    fn place(
        &self,
        frame_index: usize,
        lum: &Plane,
        width: usize,
        init: Option<&Initial>,
        ref_offset: isize,
    ) -> Result<FrameDiagnostic> {
        let mut diag = FrameDiagnostic {
            frame_index,
            stripe: None,
            alignment: None,
            column: None,
            status: FrameStatus::NoStripe,
        };
        let Some(init) = init else {
            return Ok(diag);
        };
        let mut stripe = init.stripe;
        diag.stripe = Some(stripe);
        let Some(mut alignment) = init.alignment else {
            diag.status = FrameStatus::NoSignal;
            return Ok(diag);
        };

        // The absolute offset fixes how many edge columns are zero fill; a
        // stripe found inside that band is the fill itself, so look again outside it.
        let w = lum.width();
        let shift = alignment.dx as isize + ref_offset;
        let (left, right) = (shift.max(0) as usize, (-shift).max(0) as usize);
        let start = stripe.start();
        let in_fill = (left > 0 && start < left as isize)
            || (right > 0 && start + width as isize > w as isize - right as isize);
        if in_fill {
            let found = if left + right + width <= w {
                locate_stripe_within(lum, width, self.opts.stripe_threshold, left..w - right).ok()
            } else {
                None
            };
            match found {
                // the true stripe is as dark as the fill; anything fainter means the slit sat in the fill
                Some(s) if s.contrast >= 0.5 * stripe.contrast => {
                    if s.start() != stripe.start() {
                        stripe = s;
                        diag.stripe = Some(s);
                        match self.register(lum, &stripe)? {
                            Some(a) => alignment = a,
                            None => {
                                diag.status = FrameStatus::NoSignal;
                                return Ok(diag);
                            }
                        }
                    }
                }
                _ => {
                    diag.alignment = Some(alignment);
                    diag.status = FrameStatus::OutOfBounds;
                    return Ok(diag);
                }
            }
        }
        diag.alignment = Some(alignment);
        let start = stripe.center - (width as f64 - 1.0) / 2.0;
        let column = (start - alignment.dx as f64).round() as isize;
        diag.column = Some(column);
        diag.status = if column < self.scene_width as isize && column + width as isize > 0 {
            FrameStatus::Placed
        } else {
            FrameStatus::OutOfBounds
        };
        Ok(diag)
    }
}

/// Horizontal offset of the reference frame, from frames whose edge runs are
/// pure zero fill: each gives `left - right - dx`. Zero when none qualify.
fn reference_offset(initial: &[Option<Initial>], frame_width: usize) -> isize {
    let mut votes: Vec<isize> = initial
        .iter()
        .flatten()
        .filter(|i| i.is_clean(frame_width))
        .filter_map(|i| {
            i.alignment
                .map(|a| i.runs.0 as isize - i.runs.1 as isize - a.dx as isize)
        })
        .collect();
    if votes.is_empty() {
        return 0;
    }
    votes.sort_unstable();
    votes[votes.len() / 2]
}

/// Places every slice at its registered scene column and averages collisions.
///
/// Frames whose stripe or registration fails are skipped and reported in the
/// diagnostics; the result is identical to sequential plan-order processing.
pub fn assemble(obs: &Observation, opts: &AssembleOptions) -> Result<ReconstructedCube> {
    let n = obs.frames.len();
    if n == 0 {
        return Err(Error::EmptyPlan("observation has no frames".into()));
    }
    if opts.reference_index >= n {
        return Err(Error::range(
            "reference index",
            format!("{} not below frame count {n}", opts.reference_index),
        ));
    }
    let (w, h, bands) = (obs.scene_width, obs.scene_height, obs.bands());
    for f in &obs.frames {
        if f.rgb.width() != w || f.rgb.height() != h || f.slice.rows != h {
            return Err(Error::Shape(format!(
                "frame {} does not match the {w}x{h} scene",
                f.slice.frame_index
            )));
        }
    }
    let mapping = obs.plan.geometry.mapping;

    let widths: Vec<usize> = obs
        .frames
        .iter()
        .map(|f| {
            let width = mapping.scene_columns(&f.slice.pattern)?.len();
            if f.slice.spectral_pixels != bands + width - 1 {
                return Err(Error::Shape(format!(
                    "frame {} has {} spectral pixels, expected {}",
                    f.slice.frame_index,
                    f.slice.spectral_pixels,
                    bands + width - 1
                )));
            }
            Ok(width)
        })
        .collect::<Result<_>>()?;

    let ref_idx = opts.reference_index;
    let reference = obs.frames[ref_idx].rgb.luminance();
    let ref_stripe = locate_stripe_in(&reference, widths[ref_idx], opts.stripe_threshold)
        .map_err(|e| match e {
            Error::NoStripe { .. } => {
                Error::DegenerateReference(format!("no stripe found in reference frame {ref_idx}"))
            }
            other => other,
        })?;
    let ctx = FrameContext {
        reference: &reference,
        ref_stripe: &ref_stripe,
        opts,
        scene_width: w,
    };

    let lums: Vec<Plane> = obs.frames.par_iter().map(|f| f.rgb.luminance()).collect();
    let initial: Vec<Option<Initial>> = lums
        .par_iter()
        .zip(&widths)
        .map(|(lum, &width)| ctx.initial(lum, width))
        .collect::<Result<_>>()?;
    let ref_offset = reference_offset(&initial, w);
    let diagnostics: Vec<FrameDiagnostic> = (0..n)
        .into_par_iter()
        .map(|k| {
            ctx.place(
                obs.frames[k].slice.frame_index,
                &lums[k],
                widths[k],
                initial[k].as_ref(),
                ref_offset,
            )
        })
        .collect::<Result<_>>()?;

    if diagnostics.iter().all(|d| d.status != FrameStatus::Placed) {
        return Err(Error::AllFramesFailed { frames: n });
    }

    let groups = output_groups(bands, obs.plan.slit_width);
    let out_bands = groups.len();
    let plane = w * h;
    let mut sum = vec![0f64; out_bands * plane];
    let mut coverage = vec![0f32; w];
    let mut provenance = vec![Vec::new(); w];

    for ((f, &width), d) in obs.frames.iter().zip(&widths).zip(&diagnostics) {
        if d.status != FrameStatus::Placed {
            continue;
        }
        let col0 = d.column.expect("placed frames have a column");
        let dy = d.alignment.expect("placed frames are registered").dy as isize;
        let sources: Vec<(usize, f64)> = groups
            .iter()
            .map(|g| {
                let (u, count) = group_source(g, width, bands);
                (u, count as f64)
            })
            .collect();
        for x in col0.max(0)..(col0 + width as isize).min(w as isize) {
            let x = x as usize;
            coverage[x] += 1.0;
            provenance[x].push(f.slice.frame_index);
            for y in 0..h {
                let sy = (y as isize + dy).clamp(0, h as isize - 1) as usize;
                let row = f.slice.row(sy);
                for (b, &(u, count)) in sources.iter().enumerate() {
                    let v = obs.readout.to_radiance(row[u]) as f64 / count;
                    sum[b * plane + y * w + x] += v;
                }
            }
        }
    }

    let data: Vec<f32> = sum
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let c = coverage[i % plane % w];
            if c > 0.0 {
                (s / c as f64).max(0.0) as f32
            } else {
                0.0
            }
        })
        .collect();
    let wavelengths = if out_bands == bands {
        obs.wavelengths.clone()
    } else {
        group_wavelengths(&obs.wavelengths, &groups)
    };
    let cube = SpectralCube::from_data(w, h, wavelengths, data)?;
    Ok(ReconstructedCube {
        cube,
        coverage,
        provenance,
        interpolated: vec![false; w],
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_source_full_and_clipped() {
        // w = 1: one detector pixel per band
        assert_eq!(group_source(&(3..4), 1, 10), (3, 1));
        // w = 3, full group: pixel g.start + 2 sums bands g.start..g.start+3
        assert_eq!(group_source(&(3..6), 3, 10), (5, 3));
        // last partial group of 2 with a full-width slice
        assert_eq!(group_source(&(9..10), 3, 10), (11, 1));
        assert_eq!(group_source(&(8..10), 3, 10), (10, 2));
        // clipped slice of width 2 in a group of 3
        assert_eq!(group_source(&(3..6), 2, 10), (5, 2));
    }

    #[test]
    fn csv_has_header_and_rows() {
        let d = FrameDiagnostic {
            frame_index: 4,
            stripe: None,
            alignment: None,
            column: None,
            status: FrameStatus::NoStripe,
        };
        let csv = diagnostics_csv(&[d]);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[1], "4,,,,,,,no-stripe");
    }
}
