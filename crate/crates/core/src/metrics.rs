//! Cube and frame comparison metrics.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::scene::{rebin_spectral, SpectralCube};

/// Band counts of the default resolution sweep.
pub const DEFAULT_SWEEP: [usize; 6] = [50, 100, 150, 200, 250, 300];

/// Reported in place of infinity when a frame has no noise.
pub const SNR_SATURATED_DB: f64 = 300.0;

/// Root-mean-square difference normalised by the reference's dynamic range.
pub fn nrmsd(a: &SpectralCube, reference: &SpectralCube) -> Result<f64> {
    if !a.same_shape(reference) || a.wavelengths() != reference.wavelengths() {
        return Err(Error::Shape(format!(
            "cube {}x{}x{} vs reference {}x{}x{} (or differing wavelengths)",
            a.width(),
            a.height(),
            a.bands(),
            reference.width(),
            reference.height(),
            reference.bands()
        )));
    }
    let (lo, hi) = reference.min_max();
    if !(hi > lo) {
        return Err(Error::DegenerateReference(format!(
            "reference is constant at {lo}"
        )));
    }
    let sq: f64 = a
        .data()
        .iter()
        .zip(reference.data())
        .map(|(&x, &y)| (x as f64 - y as f64).powi(2))
        .sum();
    Ok((sq / a.data().len() as f64).sqrt() / (hi as f64 - lo as f64))
}

/// `10 log10(sum clean^2 / sum (noisy - clean)^2)`.
pub fn snr_db(clean: &[f32], noisy: &[f32]) -> Result<f64> {
    if clean.len() != noisy.len() {
        return Err(Error::Shape(format!(
            "{} clean samples vs {} noisy",
            clean.len(),
            noisy.len()
        )));
    }
    let signal: f64 = clean.iter().map(|&c| (c as f64).powi(2)).sum();
    if signal == 0.0 {
        return Err(Error::Degenerate("clean signal is all zero".into()));
    }
    let noise: f64 = clean
        .iter()
        .zip(noisy)
        .map(|(&c, &n)| (n as f64 - c as f64).powi(2))
        .sum();
    if noise == 0.0 {
        return Ok(SNR_SATURATED_DB);
    }
    Ok((10.0 * (signal / noise).log10()).min(SNR_SATURATED_DB))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandSweepResult {
    /// `(n_bands, nrmsd)` with strictly increasing band counts.
    pub points: Vec<(usize, f64)>,
}

impl BandSweepResult {
    pub fn max_nrmsd(&self) -> f64 {
        self.points.iter().map(|p| p.1).fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("n_bands,nrmsd\n");
        for (n, v) in &self.points {
            let _ = writeln!(s, "{n},{v:.6}");
        }
        s
    }
}

/// NRMSD between rebinned reconstruction and rebinned truth at each band count.
pub fn band_sweep(truth: &SpectralCube, recon: &SpectralCube, band_counts: &[usize]) -> Result<BandSweepResult> {
    let mut counts = band_counts.to_vec();
    counts.sort_unstable();
    counts.dedup();
    let points = counts
        .into_iter()
        .map(|n| {
            let t = rebin_spectral(truth, n)?;
            let r = rebin_spectral(recon, n)?;
            Ok((n, nrmsd(&r, &t)?))
        })
        .collect::<Result<_>>()?;
    Ok(BandSweepResult { points })
}
