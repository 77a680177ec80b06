use super::pattern::DmdPattern;
use super::pnm::{decode_pnm, encode_pfm, encode_pnm, PnmImage};
use crate::error::{Error, Result};
use crate::image::Plane;
use crate::scene::RgbImage;

/// Spatial-spectral readout of the spectral sensor for one slit position.
///
/// `data` is row-major `rows x spectral_pixels`; detector column `u` holds
/// the shift-and-add sum over slit columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceFrame {
    pub rows: usize,
    pub spectral_pixels: usize,
    pub data: Vec<f32>,
    /// Set when samples are integer sensor codes of this bit depth.
    pub bit_depth: Option<u8>,
    pub pattern: DmdPattern,
    pub frame_index: usize,
}

impl SliceFrame {
    pub fn quantized(&self) -> bool {
        self.bit_depth.is_some()
    }

    pub fn get(&self, row: usize, u: usize) -> f32 {
        self.data[row * self.spectral_pixels + u]
    }

    pub fn row(&self, row: usize) -> &[f32] {
        &self.data[row * self.spectral_pixels..(row + 1) * self.spectral_pixels]
    }

    /// P5 for quantised frames, little-endian Pf otherwise.
    pub fn to_netpbm(&self) -> Vec<u8> {
        match self.bit_depth {
            Some(b) => encode_pnm(
                self.spectral_pixels,
                self.rows,
                ((1u32 << b) - 1) as u16,
                &[&self.data],
            ),
            None => encode_pfm(self.spectral_pixels, self.rows, &[&self.data]),
        }
    }

    pub fn from_netpbm(bytes: &[u8], pattern: DmdPattern, frame_index: usize) -> Result<Self> {
        let img = decode_pnm(bytes)?;
        if img.channels != 1 {
            return Err(Error::Format("slice frame must be single-channel".into()));
        }
        let PnmImage {
            width,
            height,
            maxval,
            mut planes,
            ..
        } = img;
        Ok(Self {
            rows: height,
            spectral_pixels: width,
            data: planes.remove(0),
            bit_depth: maxval.map(bit_depth_of),
            pattern,
            frame_index,
        })
    }
}

fn bit_depth_of(maxval: u16) -> u8 {
    (16 - maxval.leading_zeros()) as u8
}

/// Auxiliary colour frame, containing the dark stripe of the active slit.
#[derive(Debug, Clone, PartialEq)]
pub struct RgbFrame {
    pub image: RgbImage,
    pub bit_depth: Option<u8>,
    pub frame_index: usize,
    pub timestamp_ms: f64,
}

impl RgbFrame {
    pub fn width(&self) -> usize {
        self.image.width()
    }

    pub fn height(&self) -> usize {
        self.image.height()
    }

    pub fn quantized(&self) -> bool {
        self.bit_depth.is_some()
    }

    pub fn luminance(&self) -> Plane {
        self.image.luminance()
    }

    /// P6 for quantised frames, little-endian PF otherwise.
    pub fn to_netpbm(&self) -> Vec<u8> {
        let [r, g, b] = &self.image.channels;
        let planes = [r.data(), g.data(), b.data()];
        match self.bit_depth {
            Some(d) => encode_pnm(self.width(), self.height(), ((1u32 << d) - 1) as u16, &planes),
            None => encode_pfm(self.width(), self.height(), &planes),
        }
    }

    pub fn from_netpbm(bytes: &[u8], frame_index: usize, timestamp_ms: f64) -> Result<Self> {
        let img = decode_pnm(bytes)?;
        if img.channels != 3 {
            return Err(Error::Format("RGB frame must have three channels".into()));
        }
        let (w, h) = (img.width, img.height);
        let mut planes = img.planes.into_iter();
        let mut next = || Plane::from_vec(w, h, planes.next().unwrap());
        let channels = [next(), next(), next()];
        Ok(Self {
            image: RgbImage { channels },
            bit_depth: img.maxval.map(bit_depth_of),
            frame_index,
            timestamp_ms,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::{make_pattern, DmdDims};

    #[test]
    fn bit_depths_from_maxval() {
        assert_eq!(bit_depth_of(255), 8);
        assert_eq!(bit_depth_of(1023), 10);
        assert_eq!(bit_depth_of(4095), 12);
        assert_eq!(bit_depth_of(65535), 16);
    }

    #[test]
    fn slice_netpbm_round_trip() {
        let pattern = make_pattern(3, 2, DmdDims::default()).unwrap();
        let s = SliceFrame {
            rows: 2,
            spectral_pixels: 3,
            data: vec![0.0, 1.0, 2.0, 250.0, 4.0, 5.0],
            bit_depth: Some(8),
            pattern,
            frame_index: 7,
        };
        assert_eq!(SliceFrame::from_netpbm(&s.to_netpbm(), pattern, 7).unwrap(), s);
        let f = SliceFrame {
            data: vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6],
            bit_depth: None,
            ..s
        };
        assert_eq!(SliceFrame::from_netpbm(&f.to_netpbm(), pattern, 7).unwrap(), f);
    }
}
