//! `HSC1` cube files: little-endian header, f32 wavelengths, band-sequential f32 data.

use std::path::Path;

use super::cube::{check_wavelengths, SpectralCube};
use crate::error::{Error, Result};
use crate::fsutil::write_atomic;

pub const CUBE_MAGIC: &[u8; 4] = b"HSC1";
const HEADER_LEN: usize = 16;

pub fn encode_cube(cube: &SpectralCube) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 4 * (cube.bands() + cube.data().len()));
    out.extend_from_slice(CUBE_MAGIC);
    for d in [cube.width(), cube.height(), cube.bands()] {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    for w in cube.wavelengths() {
        out.extend_from_slice(&w.to_le_bytes());
    }
    for v in cube.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

fn f32s(bytes: &[u8]) -> Vec<f32> {
    bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect()
}

pub fn decode_cube(bytes: &[u8]) -> Result<SpectralCube> {
    if bytes.len() < 4 || &bytes[..4] != CUBE_MAGIC {
        let n = bytes.len().min(4);
        return Err(Error::BadMagic {
            expected: String::from_utf8_lossy(CUBE_MAGIC).into_owned(),
            found: String::from_utf8_lossy(&bytes[..n]).into_owned(),
        });
    }
    if bytes.len() < HEADER_LEN {
        return Err(Error::Truncated {
            expected: HEADER_LEN,
            found: bytes.len(),
        });
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap()) as usize;
    let (width, height, bands) = (u32_at(4), u32_at(8), u32_at(12));
    let voxels = width
        .checked_mul(height)
        .and_then(|v| v.checked_mul(bands))
        .ok_or_else(|| Error::Format(format!("dimensions {width}x{height}x{bands} overflow")))?;
    let expected = HEADER_LEN + 4 * (bands + voxels);
    if bytes.len() < expected {
        return Err(Error::Truncated {
            expected,
            found: bytes.len(),
        });
    }
    if bytes.len() > expected {
        return Err(Error::Format(format!(
            "{} trailing bytes after payload",
            bytes.len() - expected
        )));
    }
    let wl_end = HEADER_LEN + 4 * bands;
    let wavelengths = f32s(&bytes[HEADER_LEN..wl_end]);
    check_wavelengths(&wavelengths)?;
    SpectralCube::from_data(width, height, wavelengths, f32s(&bytes[wl_end..]))
}

pub fn write_cube(cube: &SpectralCube, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), &encode_cube(cube))
}

pub fn read_cube(path: impl AsRef<Path>) -> Result<SpectralCube> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_cube(&bytes)
}
