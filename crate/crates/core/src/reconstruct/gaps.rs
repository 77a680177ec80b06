use super::assemble::ReconstructedCube;
use crate::error::{Error, Result};
use crate::scene::SpectralCube;

/// Fills uncovered columns by linear interpolation between the nearest covered
/// columns on each side; edge gaps copy the nearest covered column.
pub fn fill_gaps(mut rc: ReconstructedCube) -> Result<ReconstructedCube> {
    let covered: Vec<usize> = (0..rc.coverage.len()).filter(|&x| rc.coverage[x] > 0.0).collect();
    if covered.is_empty() {
        return Err(Error::EmptyReconstruction);
    }
    let (w, h, bands) = (rc.cube.width(), rc.cube.height(), rc.cube.bands());
    let mut data = rc.cube.data().to_vec();
    let plane = w * h;
    for x in 0..w {
        if rc.coverage[x] > 0.0 {
            continue;
        }
        let right = covered.partition_point(|&c| c < x);
        let (a, b, t) = match (right.checked_sub(1).map(|i| covered[i]), covered.get(right)) {
            (Some(l), Some(&r)) => (l, r, (x - l) as f32 / (r - l) as f32),
            (Some(l), None) => (l, l, 0.0),
            (None, Some(&r)) => (r, r, 0.0),
            (None, None) => unreachable!("at least one covered column"),
        };
        for band in 0..bands {
            for y in 0..h {
                let base = band * plane + y * w;
                data[base + x] = data[base + a] * (1.0 - t) + data[base + b] * t;
            }
        }
        rc.interpolated[x] = true;
    }
    rc.cube = SpectralCube::from_data(w, h, rc.cube.wavelengths().to_vec(), data)?;
    Ok(rc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rc(values: &[f32], coverage: &[f32]) -> ReconstructedCube {
        let w = values.len();
        let cube = SpectralCube::from_data(w, 1, vec![500.0], values.to_vec()).unwrap();
        ReconstructedCube {
            cube,
            coverage: coverage.to_vec(),
            provenance: vec![Vec::new(); w],
            interpolated: vec![false; w],
            diagnostics: Vec::new(),
        }
    }

    #[test]
    fn no_gaps_is_identity() {
        let r = rc(&[1.0, 2.0, 3.0], &[1.0, 1.0, 2.0]);
        assert_eq!(fill_gaps(r.clone()).unwrap(), r);
    }

    #[test]
    fn midpoint_gap() {
        let r = fill_gaps(rc(&[1.0, 0.0, 3.0], &[1.0, 0.0, 1.0])).unwrap();
        assert_eq!(r.cube.get(1, 0, 0), 2.0);
        assert_eq!(r.interpolated, vec![false, true, false]);
        assert_eq!(r.coverage[1], 0.0);
    }

    #[test]
    fn edge_gaps_copy() {
        let r = fill_gaps(rc(&[0.0, 0.0, 4.0, 6.0, 0.0], &[0.0, 0.0, 1.0, 1.0, 0.0])).unwrap();
        assert_eq!(r.cube.data(), &[4.0, 4.0, 4.0, 6.0, 6.0]);
    }

    #[test]
    fn nothing_covered_fails() {
        assert!(matches!(
            fill_gaps(rc(&[0.0, 0.0], &[0.0, 0.0])),
            Err(Error::EmptyReconstruction)
        ));
    }
}
