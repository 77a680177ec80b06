use std::ops::Range;

use super::segment::RegionLabelMap;
use crate::controller::{plan_intervals, ScanGeometry, ScanPlan, TimingParams};
use crate::error::{Error, Result};

/// Union of the selected regions' column spans, each widened by `margin`
/// and clipped to the map; touching or overlapping spans are merged.
pub fn region_columns(labels: &RegionLabelMap, selected: &[u32], margin: usize) -> Result<Vec<Range<usize>>> {
    if selected.is_empty() {
        return Err(Error::EmptyPlan("no regions selected".into()));
    }
    let mut spans = Vec::with_capacity(selected.len());
    for &label in selected {
        let r = labels
            .region(label)
            .ok_or_else(|| Error::Parameter(format!("region {label} does not exist")))?;
        spans.push(r.x0.saturating_sub(margin)..(r.x1 + margin).min(labels.width()));
    }
    spans.sort_by_key(|r| r.start);
    let mut merged: Vec<Range<usize>> = Vec::new();
    for s in spans {
        match merged.last_mut() {
            Some(last) if s.start <= last.end => last.end = last.end.max(s.end),
            _ => merged.push(s),
        }
    }
    Ok(merged)
}

/// Scan plan restricted to the columns of the selected regions.
pub fn regions_to_plan(
    labels: &RegionLabelMap,
    selected: &[u32],
    slit_width: usize,
    margin: usize,
    timing: &TimingParams,
    geometry: ScanGeometry,
) -> Result<ScanPlan> {
    let cols = region_columns(labels, selected, margin)?;
    plan_intervals(&cols, slit_width, timing, geometry)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::Mask;
    use crate::roi::label_regions;

    fn map(spans: &[Range<usize>]) -> RegionLabelMap {
        label_regions(
            &Mask::from_fn(400, 40, |x, y| (10..30).contains(&y) && spans.iter().any(|s| s.contains(&x))),
            25,
        )
    }

    #[test]
    fn single_region_pattern_counts() {
        let l = map(&[120..180]);
        let t = TimingParams::default();
        let g = ScanGeometry::default();
        assert_eq!(regions_to_plan(&l, &[1], 1, 0, &t, g).unwrap().len(), 60);
        assert_eq!(regions_to_plan(&l, &[1], 4, 0, &t, g).unwrap().len(), 15);
        assert_eq!(regions_to_plan(&l, &[1], 7, 0, &t, g).unwrap().len(), 9);
    }

    #[test]
    fn disjoint_regions_sum_ceilings() {
        let l = map(&[10..15, 100..111]);
        let p = regions_to_plan(&l, &[1, 2], 4, 0, &TimingParams::default(), ScanGeometry::default()).unwrap();
        assert_eq!(p.len(), 2 + 3);
        assert!(p.is_monotone_disjoint());
    }

    #[test]
    fn margins_merge_and_clip() {
        let l = map(&[0..10, 14..20]);
        let cols = region_columns(&l, &[2, 1], 2).unwrap();
        assert_eq!(cols, vec![0..22]);
    }

    #[test]
    fn empty_or_unknown_selection() {
        let l = map(&[0..10]);
        let t = TimingParams::default();
        assert!(matches!(
            regions_to_plan(&l, &[], 1, 0, &t, ScanGeometry::default()),
            Err(Error::EmptyPlan(_))
        ));
        assert!(regions_to_plan(&l, &[5], 1, 0, &t, ScanGeometry::default()).is_err());
    }
}
