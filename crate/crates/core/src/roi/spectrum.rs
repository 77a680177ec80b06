use std::fmt::Write as _;

use super::segment::RegionLabelMap;
use crate::error::{Error, Result};
use crate::optics::pnm::encode_pnm;
use crate::scene::SpectralCube;

/// Side of the square averaging block (16 pixels).
pub const DEFAULT_BLOCK: usize = 4;

/// Top-left corner of the `block x block` square used for `label`: centred on
/// the centroid when it fits inside the region, otherwise the fitting position
/// whose centre is nearest the centroid (raster order on ties).
pub fn block_origin(labels: &RegionLabelMap, label: u32, block: usize) -> Result<(usize, usize)> {
    let r = labels
        .region(label)
        .ok_or_else(|| Error::Parameter(format!("region {label} does not exist")))?;
    let too_small = || Error::RegionTooSmall { label, block };
    if block == 0 || r.x1 - r.x0 < block || r.y1 - r.y0 < block {
        return Err(too_small());
    }
    let fits = |x0: usize, y0: usize| (y0..y0 + block).all(|y| (x0..x0 + block).all(|x| labels.get(x, y) == label));
    let half = (block as f64 - 1.0) / 2.0;
    let (cx, cy) = r.centroid;
    let preferred = ((cx - half).round(), (cy - half).round());
    if preferred.0 >= r.x0 as f64 && preferred.1 >= r.y0 as f64 {
        let (x0, y0) = (preferred.0 as usize, preferred.1 as usize);
        if x0 + block <= r.x1 && y0 + block <= r.y1 && fits(x0, y0) {
            return Ok((x0, y0));
        }
    }
    let mut best: Option<(f64, usize, usize)> = None;
    for y0 in r.y0..=r.y1 - block {
        for x0 in r.x0..=r.x1 - block {
            let d = (x0 as f64 + half - cx).powi(2) + (y0 as f64 + half - cy).powi(2);
            if best.is_some_and(|(bd, _, _)| d >= bd) || !fits(x0, y0) {
                continue;
            }
            best = Some((d, x0, y0));
        }
    }
    best.map(|(_, x, y)| (x, y)).ok_or_else(too_small)
}

/// Per-band mean over the region's averaging block.
pub fn region_mean_spectrum(cube: &SpectralCube, labels: &RegionLabelMap, label: u32, block: usize) -> Result<Vec<f32>> {
    if cube.width() != labels.width() || cube.height() != labels.height() {
        return Err(Error::Shape(format!(
            "cube {}x{} vs label map {}x{}",
            cube.width(),
            cube.height(),
            labels.width(),
            labels.height()
        )));
    }
    let (x0, y0) = block_origin(labels, label, block)?;
    let n = (block * block) as f64;
    Ok((0..cube.bands())
        .map(|b| {
            let mut s = 0f64;
            for y in y0..y0 + block {
                for x in x0..x0 + block {
                    s += cube.get(x, y, b) as f64;
                }
            }
            (s / n) as f32
        })
        .collect())
}

/// `wavelength_nm,value` rows.
pub fn spectrum_csv(wavelengths: &[f32], values: &[f32]) -> String {
    let mut s = String::from("wavelength_nm,value\n");
    for (w, v) in wavelengths.iter().zip(values) {
        let _ = writeln!(s, "{w},{v}");
    }
    s
}

/// Label map as a PGM with labels as grey levels (16-bit above 255 regions).
pub fn labels_pgm(labels: &RegionLabelMap) -> Vec<u8> {
    let maxval = if labels.count() > 255 { u16::MAX } else { 255 };
    let data: Vec<f32> = labels.labels().iter().map(|&l| l as f32).collect();
    encode_pnm(labels.width(), labels.height(), maxval, &[&data])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::Mask;
    use crate::optics::pnm::decode_pnm;
    use crate::roi::label_regions;
    use crate::scene::uniform_wavelengths;

    fn square_map() -> RegionLabelMap {
        label_regions(&Mask::from_fn(20, 20, |x, y| (4..14).contains(&x) && (6..16).contains(&y)), 25)
    }

    #[test]
    fn uniform_region_returns_its_spectrum() {
        let l = square_map();
        let wl = uniform_wavelengths(400.0, 900.0, 3);
        let mut c = SpectralCube::zeros(20, 20, wl).unwrap();
        for y in 0..20 {
            for x in 0..20 {
                for b in 0..3 {
                    c.set(x, y, b, 0.1 * (b + 1) as f32);
                }
            }
        }
        let s = region_mean_spectrum(&c, &l, 1, 4).unwrap();
        for (b, v) in s.iter().enumerate() {
            assert!((v - 0.1 * (b + 1) as f32).abs() < 1e-6);
        }
    }

    #[test]
    fn half_and_half_block_averages() {
        let l = square_map();
        let (x0, y0) = block_origin(&l, 1, 4).unwrap();
        assert_eq!((x0, y0), (7, 9));
        let mut c = SpectralCube::zeros(20, 20, vec![550.0]).unwrap();
        for y in 0..20 {
            for x in 0..20 {
                c.set(x, y, 0, if x < x0 + 2 { 1.0 } else { 3.0 });
            }
        }
        assert_eq!(region_mean_spectrum(&c, &l, 1, 4).unwrap(), vec![2.0]);
    }

    #[test]
    fn centroid_outside_region_falls_back() {
        // an L shape whose centroid sits in the notch
        let m = Mask::from_fn(30, 30, |x, y| (x < 6 && y < 24) || ((18..24).contains(&y) && x < 24));
        let l = label_regions(&m, 25);
        let (x0, y0) = block_origin(&l, 1, 4).unwrap();
        assert!((y0..y0 + 4).all(|y| (x0..x0 + 4).all(|x| l.get(x, y) == 1)));
    }

    #[test]
    fn too_small_region() {
        let l = label_regions(&Mask::from_fn(20, 20, |x, y| x < 30 && (2..5).contains(&y)), 25);
        assert!(matches!(block_origin(&l, 1, 4), Err(Error::RegionTooSmall { .. })));
    }

    #[test]
    fn exports() {
        let l = square_map();
        let img = decode_pnm(&labels_pgm(&l)).unwrap();
        assert_eq!(img.planes[0][7 * 20 + 5], 1.0);
        let csv = spectrum_csv(&[500.0, 600.0], &[0.25, 0.5]);
        assert_eq!(csv, "wavelength_nm,value\n500,0.25\n600,0.5\n");
    }
}
