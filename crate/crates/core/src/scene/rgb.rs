use super::cube::SpectralCube;
use crate::error::{Error, Result};
use crate::image::Plane;

/// Per-channel spectral weights of the colour sensor; each row sums to one.
#[derive(Debug, Clone, PartialEq)]
pub struct RgbResponse {
    responses: [Vec<f64>; 3],
}

pub const RGB_CENTERS_NM: [f64; 3] = [620.0, 550.0, 460.0];
pub const RGB_FWHM_NM: f64 = 60.0;

impl RgbResponse {
    /// Normalises each row to unit sum. Rows must be non-negative and not all zero.
    pub fn new(mut responses: [Vec<f64>; 3]) -> Result<Self> {
        let bands = responses[0].len();
        for (c, row) in responses.iter_mut().enumerate() {
            if row.len() != bands {
                return Err(Error::Shape(format!(
                    "response channel {c} has {} bands, expected {bands}",
                    row.len()
                )));
            }
            if row.iter().any(|w| !(*w >= 0.0)) {
                return Err(Error::Parameter(format!(
                    "response channel {c} has a negative weight"
                )));
            }
            let s: f64 = row.iter().sum();
            if !(s > 0.0) {
                return Err(Error::Parameter(format!(
                    "response channel {c} has zero total weight"
                )));
            }
            row.iter_mut().for_each(|w| *w /= s);
        }
        Ok(Self { responses })
    }

    /// Gaussian red/green/blue responses sampled on `wavelengths`.
    ///
    /// A channel whose Gaussian falls entirely outside the grid (numerically
    /// zero everywhere) falls back to a flat response.
    pub fn gaussian(wavelengths: &[f32]) -> Self {
        let sigma = RGB_FWHM_NM / (2.0 * (2.0 * std::f64::consts::LN_2).sqrt());
        let rows = RGB_CENTERS_NM.map(|c| {
            let row: Vec<f64> = wavelengths
                .iter()
                .map(|&w| (-0.5 * ((w as f64 - c) / sigma).powi(2)).exp())
                .collect();
            if row.iter().sum::<f64>() > 1e-300 {
                row
            } else {
                vec![1.0; wavelengths.len()]
            }
        });
        Self::new(rows).expect("gaussian responses are valid")
    }

    pub fn bands(&self) -> usize {
        self.responses[0].len()
    }

    pub fn channel(&self, c: usize) -> &[f64] {
        &self.responses[c]
    }
}

/// Three-channel floating-point image, channels in R, G, B order.
#[derive(Debug, Clone, PartialEq)]
pub struct RgbImage {
    pub channels: [Plane; 3],
}

impl RgbImage {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            channels: std::array::from_fn(|_| Plane::new(width, height)),
        }
    }

    pub fn width(&self) -> usize {
        self.channels[0].width()
    }

    pub fn height(&self) -> usize {
        self.channels[0].height()
    }

    /// Mean of the three channels.
    pub fn luminance(&self) -> Plane {
        let [r, g, b] = &self.channels;
        let data = r
            .data()
            .iter()
            .zip(g.data())
            .zip(b.data())
            .map(|((r, g), b)| (r + g + b) / 3.0)
            .collect();
        Plane::from_vec(self.width(), self.height(), data)
    }
}

/// Projects the cube through the colour responses.
pub fn rgb_render(cube: &SpectralCube, resp: &RgbResponse) -> Result<RgbImage> {
    if resp.bands() != cube.bands() {
        return Err(Error::Shape(format!(
            "RGB response has {} bands, cube has {}",
            resp.bands(),
            cube.bands()
        )));
    }
    let n = cube.width() * cube.height();
    let mut out = RgbImage::new(cube.width(), cube.height());
    for (c, plane) in out.channels.iter_mut().enumerate() {
        let mut acc = vec![0f64; n];
        for (b, &w) in resp.channel(c).iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for (a, &v) in acc.iter_mut().zip(cube.band(b)) {
                *a += w * v as f64;
            }
        }
        for (o, a) in plane.data_mut().iter_mut().zip(acc) {
            *o = a as f32;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::cube::uniform_wavelengths;

    #[test]
    fn rows_normalised() {
        let r = RgbResponse::gaussian(&uniform_wavelengths(400.0, 900.0, 500));
        for c in 0..3 {
            let s: f64 = r.channel(c).iter().sum();
            assert!((s - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn constant_cube_gives_grey() {
        let wl = uniform_wavelengths(400.0, 900.0, 40);
        let cube = SpectralCube::from_data(3, 2, wl.clone(), vec![0.4; 240]).unwrap();
        let img = rgb_render(&cube, &RgbResponse::gaussian(&wl)).unwrap();
        for p in &img.channels {
            assert!(p.data().iter().all(|&v| (v - 0.4).abs() < 1e-6));
        }
    }

    #[test]
    fn single_band_scales_weight() {
        let wl = uniform_wavelengths(400.0, 900.0, 40);
        let resp = RgbResponse::gaussian(&wl);
        let mut cube = SpectralCube::zeros(2, 2, wl).unwrap();
        for y in 0..2 {
            for x in 0..2 {
                cube.set(x, y, 12, 0.8);
            }
        }
        let img = rgb_render(&cube, &resp).unwrap();
        for c in 0..3 {
            let expect = 0.8 * resp.channel(c)[12];
            assert!(img.channels[c]
                .data()
                .iter()
                .all(|&v| (v as f64 - expect).abs() < 1e-7));
        }
    }

    #[test]
    fn zero_cube_zero_image() {
        let wl = uniform_wavelengths(400.0, 900.0, 10);
        let cube = SpectralCube::zeros(4, 4, wl.clone()).unwrap();
        let img = rgb_render(&cube, &RgbResponse::gaussian(&wl)).unwrap();
        assert!(img.channels.iter().all(|p| p.data().iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn band_mismatch() {
        let cube = SpectralCube::zeros(2, 2, uniform_wavelengths(400.0, 900.0, 10)).unwrap();
        let resp = RgbResponse::gaussian(&uniform_wavelengths(400.0, 900.0, 11));
        assert!(matches!(rgb_render(&cube, &resp), Err(Error::Shape(_))));
    }
}
