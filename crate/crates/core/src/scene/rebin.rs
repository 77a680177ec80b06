use std::ops::Range;

use super::cube::SpectralCube;
use crate::error::{Error, Result};

/// `n` contiguous groups covering `0..bands`, sizes differing by at most one,
/// larger groups first.
pub fn even_groups(bands: usize, n: usize) -> Vec<Range<usize>> {
    let (q, r) = (bands / n, bands % n);
    let mut start = 0;
    (0..n)
        .map(|k| {
            let len = q + usize::from(k < r);
            let g = start..start + len;
            start += len;
            g
        })
        .collect()
}

/// Consecutive groups of `factor` bands; the last group may be shorter.
pub fn fixed_groups(bands: usize, factor: usize) -> Vec<Range<usize>> {
    (0..bands.div_ceil(factor))
        .map(|k| k * factor..((k + 1) * factor).min(bands))
        .collect()
}

/// Mean wavelength of each group.
pub fn group_wavelengths(wavelengths: &[f32], groups: &[Range<usize>]) -> Vec<f32> {
    groups
        .iter()
        .map(|g| {
            let s: f64 = wavelengths[g.clone()].iter().map(|&w| w as f64).sum();
            (s / g.len() as f64) as f32
        })
        .collect()
}

/// Averages the cube's bands within each group.
pub fn rebin_groups(cube: &SpectralCube, groups: &[Range<usize>]) -> Result<SpectralCube> {
    let plane = cube.width() * cube.height();
    let mut data = vec![0f32; plane * groups.len()];
    let mut acc = vec![0f64; plane];
    for (k, g) in groups.iter().enumerate() {
        acc.iter_mut().for_each(|a| *a = 0.0);
        for b in g.clone() {
            for (a, &v) in acc.iter_mut().zip(cube.band(b)) {
                *a += v as f64;
            }
        }
        let n = g.len() as f64;
        for (o, a) in data[k * plane..(k + 1) * plane].iter_mut().zip(&acc) {
            *o = (a / n) as f32;
        }
    }
    SpectralCube::from_data(
        cube.width(),
        cube.height(),
        group_wavelengths(cube.wavelengths(), groups),
        data,
    )
}

/// Reduces the cube to `n_bands` by unweighted averaging over even contiguous groups.
pub fn rebin_spectral(cube: &SpectralCube, n_bands: usize) -> Result<SpectralCube> {
    if n_bands == 0 || n_bands > cube.bands() {
        return Err(Error::range(
            "n_bands",
            format!("{n_bands} not in 1..={}", cube.bands()),
        ));
    }
    rebin_groups(cube, &even_groups(cube.bands(), n_bands))
}
