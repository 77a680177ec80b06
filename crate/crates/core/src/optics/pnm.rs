//! Netpbm encoders/decoders: binary PGM (P5), PPM (P6) and PFM (Pf/PF).
//!
//! Integer formats carry sensor codes; PFM carries unquantised float frames.

use crate::error::{Error, Result};

/// Decoded image: `channels` interleaved planes, row-major, top row first.
#[derive(Debug, Clone, PartialEq)]
pub struct PnmImage {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    /// `None` for float maps.
    pub maxval: Option<u16>,
    /// One plane per channel.
    pub planes: Vec<Vec<f32>>,
}

pub fn encode_pnm(width: usize, height: usize, maxval: u16, planes: &[&[f32]]) -> Vec<u8> {
    let magic = match planes.len() {
        1 => "P5",
        3 => "P6",
        n => panic!("PNM supports 1 or 3 channels, got {n}"),
    };
    let mut out = format!("{magic}\n{width} {height}\n{maxval}\n").into_bytes();
    let wide = maxval > 255;
    for i in 0..width * height {
        for p in planes {
            let v = p[i].round().clamp(0.0, maxval as f32) as u16;
            if wide {
                out.extend_from_slice(&v.to_be_bytes());
            } else {
                out.push(v as u8);
            }
        }
    }
    out
}

/// Little-endian PFM (negative scale); rows are stored bottom-to-top.
pub fn encode_pfm(width: usize, height: usize, planes: &[&[f32]]) -> Vec<u8> {
    let magic = match planes.len() {
        1 => "Pf",
        3 => "PF",
        n => panic!("PFM supports 1 or 3 channels, got {n}"),
    };
    let mut out = format!("{magic}\n{width} {height}\n-1.0\n").into_bytes();
    for y in (0..height).rev() {
        for x in 0..width {
            for p in planes {
                out.extend_from_slice(&p[y * width + x].to_le_bytes());
            }
        }
    }
    out
}

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Header<'_> {
    fn token(&mut self) -> Result<&str> {
        loop {
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.pos < self.bytes.len() && self.bytes[self.pos] == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
                continue;
            }
            break;
        }
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Format("unexpected end of PNM header".into()));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .map_err(|_| Error::Format("non-ASCII PNM header".into()))
    }

    fn number<T: std::str::FromStr>(&mut self) -> Result<T> {
        let t = self.token()?;
        t.parse()
            .map_err(|_| Error::Format(format!("bad PNM header field '{t}'")))
    }
}

pub fn decode_pnm(bytes: &[u8]) -> Result<PnmImage> {
    let mut h = Header { bytes, pos: 0 };
    let magic = h.token()?.to_owned();
    let channels = match magic.as_str() {
        "P5" | "Pf" => 1,
        "P6" | "PF" => 3,
        other => {
            return Err(Error::BadMagic {
                expected: "P5, P6, Pf or PF".into(),
                found: other.chars().take(4).collect(),
            })
        }
    };
    let width: usize = h.number()?;
    let height: usize = h.number()?;
    let float = magic == "Pf" || magic == "PF";
    let (maxval, scale) = if float {
        (None, h.number::<f64>()?)
    } else {
        let m: u32 = h.number()?;
        if m == 0 || m > 65535 {
            return Err(Error::Format(format!("PNM maxval {m} out of range")));
        }
        (Some(m as u16), 0.0)
    };
    let data = &bytes[(h.pos + 1).min(bytes.len())..];
    let n = width * height;
    let mut planes = vec![vec![0f32; n]; channels];
    match maxval {
        Some(m) => {
            let bps = if m > 255 { 2 } else { 1 };
            let need = n * channels * bps;
            if data.len() < need {
                return Err(Error::Truncated {
                    expected: need,
                    found: data.len(),
                });
            }
            for i in 0..n {
                for (c, plane) in planes.iter_mut().enumerate() {
                    let o = (i * channels + c) * bps;
                    plane[i] = if bps == 2 {
                        u16::from_be_bytes([data[o], data[o + 1]]) as f32
                    } else {
                        data[o] as f32
                    };
                }
            }
        }
        None => {
            let need = n * channels * 4;
            if data.len() < need {
                return Err(Error::Truncated {
                    expected: need,
                    found: data.len(),
                });
            }
            let little = scale < 0.0;
            for row in 0..height {
                let y = height - 1 - row;
                for x in 0..width {
                    for (c, plane) in planes.iter_mut().enumerate() {
                        let o = ((row * width + x) * channels + c) * 4;
                        let b = [data[o], data[o + 1], data[o + 2], data[o + 3]];
                        plane[y * width + x] = if little {
                            f32::from_le_bytes(b)
                        } else {
                            f32::from_be_bytes(b)
                        };
                    }
                }
            }
        }
    }
    Ok(PnmImage {
        width,
        height,
        channels,
        maxval,
        planes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_bytes_are_exact() {
        let b = encode_pnm(3, 1, 255, &[&[0.0, 128.0, 255.0]]);
        assert_eq!(b, b"P5\n3 1\n255\n\x00\x80\xff");
    }

    #[test]
    fn ppm_interleaves_channels() {
        let b = encode_pnm(1, 1, 255, &[&[1.0], &[2.0], &[3.0]]);
        assert_eq!(&b[b.len() - 3..], &[1, 2, 3]);
        let d = decode_pnm(&b).unwrap();
        assert_eq!(d.planes, vec![vec![1.0], vec![2.0], vec![3.0]]);
    }

    #[test]
    fn sixteen_bit_and_float_round_trip() {
        let v: Vec<f32> = (0..6).map(|i| i as f32 * 1000.0).collect();
        let d = decode_pnm(&encode_pnm(3, 2, 65535, &[&v])).unwrap();
        assert_eq!(d.planes[0], v);
        let f: Vec<f32> = (0..6).map(|i| i as f32 * 0.1 + 0.01).collect();
        let d = decode_pnm(&encode_pfm(2, 3, &[&f])).unwrap();
        assert_eq!(d.maxval, None);
        assert_eq!(d.planes[0], f);
    }

    #[test]
    fn header_comments_and_errors() {
        let d = decode_pnm(b"P5\n# made by hand\n2 1\n255\n\x01\x02").unwrap();
        assert_eq!(d.planes[0], vec![1.0, 2.0]);
        assert!(matches!(decode_pnm(b"P5\n2 2\n255\n\x01"), Err(Error::Truncated { .. })));
        assert!(matches!(decode_pnm(b"P3\n1 1\n255\n1 2 3"), Err(Error::BadMagic { .. })));
    }
}
