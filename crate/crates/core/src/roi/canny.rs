use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::image::{Mask, Plane};

/// Binary edge map; 1 marks an edge pixel.
pub type EdgeMap = Mask;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CannyParams {
    /// Thresholds on gradient magnitude divided by its maximum.
    pub low: f64,
    pub high: f64,
    pub blur_sigma: f64,
}

impl Default for CannyParams {
    fn default() -> Self {
        Self {
            low: 0.1,
            high: 0.3,
            blur_sigma: 1.4,
        }
    }
}

/// Row-major f64 scratch image.
struct Grid {
    w: usize,
    h: usize,
    v: Vec<f64>,
}

impl Grid {
    fn at(&self, x: isize, y: isize) -> f64 {
        let x = x.clamp(0, self.w as isize - 1) as usize;
        let y = y.clamp(0, self.h as isize - 1) as usize;
        self.v[y * self.w + x]
    }
}

fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    if sigma <= 0.0 {
        return vec![1.0];
    }
    let r = (3.0 * sigma).ceil() as isize;
    let k: Vec<f64> = (-r..=r)
        .map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let s: f64 = k.iter().sum();
    k.into_iter().map(|v| v / s).collect()
}

/// Separable blur with clamped borders.
fn blur(g: Grid, sigma: f64) -> Grid {
    let k = gaussian_kernel(sigma);
    if k.len() == 1 {
        return g;
    }
    let r = (k.len() / 2) as isize;
    let (w, h) = (g.w, g.h);
    let mut tmp = Grid { w, h, v: vec![0.0; w * h] };
    for y in 0..h {
        for x in 0..w {
            tmp.v[y * w + x] = k
                .iter()
                .enumerate()
                .map(|(i, &kv)| kv * g.at(x as isize + i as isize - r, y as isize))
                .sum();
        }
    }
    let mut out = Grid { w, h, v: vec![0.0; w * h] };
    for y in 0..h {
        for x in 0..w {
            out.v[y * w + x] = k
                .iter()
                .enumerate()
                .map(|(i, &kv)| kv * tmp.at(x as isize, y as isize + i as isize - r))
                .sum();
        }
    }
    out
}

#[derive(Clone, Copy)]
enum Sector {
    Horizontal,
    Vertical,
    /// Gradient along (1, 1).
    Diagonal,
    /// Gradient along (1, -1).
    AntiDiagonal,
}

fn sector(gx: f64, gy: f64) -> Sector {
    // tan(22.5 deg); comparisons on magnitudes keep the result sign-symmetric
    const T: f64 = 0.414_213_562_373_095;
    let (ax, ay) = (gx.abs(), gy.abs());
    if ay <= T * ax {
        Sector::Horizontal
    } else if ax <= T * ay {
        Sector::Vertical
    } else if (gx > 0.0) == (gy > 0.0) {
        Sector::Diagonal
    } else {
        Sector::AntiDiagonal
    }
}

/// Canny edge detector on a grey image.
///
/// The image is referenced to its first pixel before blurring, so adding a
/// constant or negating the image leaves the result bit-identical.
pub fn canny(gray: &Plane, params: &CannyParams) -> Result<EdgeMap> {
    let (w, h) = (gray.width(), gray.height());
    if w < 3 || h < 3 {
        return Err(Error::Shape(format!("image {w}x{h} is smaller than 3x3")));
    }
    if !(params.low >= 0.0 && params.low <= params.high) {
        return Err(Error::Parameter(format!(
            "canny thresholds need 0 <= low <= high, got {} and {}",
            params.low, params.high
        )));
    }
    if !(params.blur_sigma >= 0.0) {
        return Err(Error::Parameter("blur sigma must be non-negative".into()));
    }
    let origin = gray.data()[0] as f64;
    let g = blur(
        Grid {
            w,
            h,
            v: gray.data().iter().map(|&v| v as f64 - origin).collect(),
        },
        params.blur_sigma,
    );

    let mut gx = vec![0f64; w * h];
    let mut gy = vec![0f64; w * h];
    let mut mag = vec![0f64; w * h];
    for y in 0..h as isize {
        for x in 0..w as isize {
            let p = |dx: isize, dy: isize| g.at(x + dx, y + dy);
            let sx = (p(1, -1) + 2.0 * p(1, 0) + p(1, 1)) - (p(-1, -1) + 2.0 * p(-1, 0) + p(-1, 1));
            let sy = (p(-1, 1) + 2.0 * p(0, 1) + p(1, 1)) - (p(-1, -1) + 2.0 * p(0, -1) + p(1, -1));
            let i = y as usize * w + x as usize;
            gx[i] = sx;
            gy[i] = sy;
            mag[i] = sx.hypot(sy);
        }
    }
    let max = mag.iter().cloned().fold(0.0, f64::max);
    let mut edges = Mask::new(w, h);
    if max <= 0.0 {
        return Ok(edges);
    }

    // non-maximum suppression; on a plateau the pixel further along the
    // gradient (toward the brighter side) is kept
    let m = |x: isize, y: isize| -> f64 {
        if x < 0 || y < 0 || x >= w as isize || y >= h as isize {
            0.0
        } else {
            mag[y as usize * w + x as usize]
        }
    };
    let mut thin = vec![0f64; w * h];
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let v = mag[i];
            if v == 0.0 {
                continue;
            }
            let (dx, dy) = match sector(gx[i], gy[i]) {
                Sector::Horizontal => (1, 0),
                Sector::Vertical => (0, 1),
                Sector::Diagonal => (1, 1),
                Sector::AntiDiagonal => (1, -1),
            };
            // orient (dx, dy) along the gradient
            let along = gx[i] * dx as f64 + gy[i] * dy as f64;
            let (dx, dy) = if along >= 0.0 { (dx, dy) } else { (-dx, -dy) };
            let (xi, yi) = (x as isize, y as isize);
            let fwd = m(xi + dx, yi + dy);
            let back = m(xi - dx, yi - dy);
            if v >= fwd && v > back {
                thin[i] = v / max;
            }
        }
    }

    // hysteresis with 8-connectivity
    let mut queue = VecDeque::new();
    for (i, &t) in thin.iter().enumerate() {
        if t >= params.high && t > 0.0 {
            edges.set(i % w, i / w, true);
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        let (x, y) = ((i % w) as isize, (i / w) as isize);
        for dy in -1..=1 {
            for dx in -1..=1 {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                    continue;
                }
                let (nx, ny) = (nx as usize, ny as usize);
                let j = ny * w + nx;
                if !edges.get(nx, ny) && thin[j] >= params.low && thin[j] > 0.0 {
                    edges.set(nx, ny, true);
                    queue.push_back(j);
                }
            }
        }
    }
    Ok(edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_image_has_no_edges() {
        let e = canny(&Plane::filled(20, 20, 0.7), &CannyParams::default()).unwrap();
        assert_eq!(e.count(), 0);
    }

    #[test]
    fn vertical_step_gives_one_column() {
        let c = 15;
        let img = Plane::from_fn(32, 24, |x, _| if x < c { 0.2 } else { 0.8 });
        let p = CannyParams {
            blur_sigma: 1.0,
            ..CannyParams::default()
        };
        let e = canny(&img, &p).unwrap();
        let cols: Vec<usize> = (0..32).filter(|&x| (0..24).any(|y| e.get(x, y))).collect();
        assert_eq!(cols.len(), 1, "{cols:?}");
        assert!((cols[0] as isize - c as isize).abs() <= 1);
        assert!((0..24).all(|y| e.get(cols[0], y)));
    }

    #[test]
    fn kernel_is_normalised_with_three_sigma_radius() {
        let k = gaussian_kernel(1.4);
        assert_eq!(k.len(), 2 * 5 + 1);
        assert!((k.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(gaussian_kernel(0.0), vec![1.0]);
    }

    #[test]
    fn rejects_inverted_thresholds() {
        let p = CannyParams {
            low: 0.5,
            high: 0.2,
            ..CannyParams::default()
        };
        assert!(matches!(
            canny(&Plane::new(5, 5), &p),
            Err(Error::Parameter(_))
        ));
    }
}
