use crate::error::{Error, Result};

/// Dense hyperspectral cube, stored band-sequential (band, row, column).
///
/// `width` is the scan axis (x), `height` the slit axis (y).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCube {
    width: usize,
    height: usize,
    wavelengths: Vec<f32>,
    data: Vec<f32>,
}

pub(crate) fn check_wavelengths(wavelengths: &[f32]) -> Result<()> {
    if let Some(i) = wavelengths.iter().position(|w| !w.is_finite()) {
        return Err(Error::NonIncreasingWavelengths { index: i });
    }
    match wavelengths.windows(2).position(|w| w[1] <= w[0]) {
        Some(i) => Err(Error::NonIncreasingWavelengths { index: i + 1 }),
        None => Ok(()),
    }
}

impl SpectralCube {
    /// Zero-filled cube.
    pub fn zeros(width: usize, height: usize, wavelengths: Vec<f32>) -> Result<Self> {
        let n = width * height * wavelengths.len();
        Self::from_data(width, height, wavelengths, vec![0.0; n])
    }

    pub fn from_data(
        width: usize,
        height: usize,
        wavelengths: Vec<f32>,
        data: Vec<f32>,
    ) -> Result<Self> {
        if width == 0 || height == 0 || wavelengths.is_empty() {
            return Err(Error::Shape(format!(
                "cube dimensions must be positive, got {width}x{height}x{}",
                wavelengths.len()
            )));
        }
        check_wavelengths(&wavelengths)?;
        let expected = width * height * wavelengths.len();
        if data.len() != expected {
            return Err(Error::Shape(format!(
                "data length {} does not match {width}x{height}x{}",
                data.len(),
                wavelengths.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::range(
                "radiance",
                format!("voxel {i} is {} (must be finite and >= 0)", data[i]),
            ));
        }
        Ok(Self {
            width,
            height,
            wavelengths,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bands(&self) -> usize {
        self.wavelengths.len()
    }

    pub fn wavelengths(&self) -> &[f32] {
        &self.wavelengths
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize, band: usize) -> usize {
        (band * self.height + y) * self.width + x
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, band: usize) -> f32 {
        self.data[self.index(x, y, band)]
    }

    /// Callers are responsible for keeping values non-negative.
    #[inline]
    pub fn set(&mut self, x: usize, y: usize, band: usize, value: f32) {
        let i = self.index(x, y, band);
        self.data[i] = value;
    }

    /// One band as a row-major `height x width` slice.
    pub fn band(&self, band: usize) -> &[f32] {
        let n = self.width * self.height;
        &self.data[band * n..(band + 1) * n]
    }

    pub fn spectrum(&self, x: usize, y: usize) -> Vec<f32> {
        (0..self.bands()).map(|b| self.get(x, y, b)).collect()
    }

    pub fn same_shape(&self, other: &SpectralCube) -> bool {
        self.width == other.width && self.height == other.height && self.bands() == other.bands()
    }

    pub fn min_max(&self) -> (f32, f32) {
        self.data
            .iter()
            .fold((f32::INFINITY, f32::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }
}

/// Band-centre wavelengths for `bands` uniform bands spanning `[start_nm, end_nm]`.
pub fn uniform_wavelengths(start_nm: f64, end_nm: f64, bands: usize) -> Vec<f32> {
    let step = (end_nm - start_nm) / bands as f64;
    (0..bands)
        .map(|i| (start_nm + (i as f64 + 0.5) * step) as f32)
        .collect()
}

/// 500 bands over 400-900 nm, 1 nm apart.
pub fn default_wavelengths() -> Vec<f32> {
    uniform_wavelengths(400.0, 900.0, 500)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_is_one_nm() {
        let w = default_wavelengths();
        assert_eq!(w.len(), 500);
        assert_eq!(w[0], 400.5);
        assert_eq!(w[499], 899.5);
        assert!(w.windows(2).all(|p| (p[1] - p[0] - 1.0).abs() < 1e-4));
    }

    #[test]
    fn rejects_non_increasing_wavelengths() {
        let err = SpectralCube::zeros(2, 2, vec![500.0, 500.0]).unwrap_err();
        assert!(matches!(err, Error::NonIncreasingWavelengths { index: 1 }));
    }

    #[test]
    fn rejects_negative_radiance() {
        let err = SpectralCube::from_data(1, 1, vec![500.0], vec![-0.1]).unwrap_err();
        assert!(matches!(err, Error::Range { .. }));
    }

    #[test]
    fn band_sequential_layout() {
        let mut c = SpectralCube::zeros(3, 2, vec![1.0, 2.0]).unwrap();
        c.set(2, 1, 1, 0.5);
        assert_eq!(c.data()[(2 + 1) * 3 + 2], 0.5);
        assert_eq!(c.band(1)[5], 0.5);
    }
}
