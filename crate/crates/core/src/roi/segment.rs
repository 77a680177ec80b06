use std::collections::VecDeque;

use super::canny::{canny, CannyParams};
use crate::error::Result;
use crate::image::{Mask, Plane};

pub const DEFAULT_MIN_AREA: usize = 25;

#[derive(Debug, Clone, PartialEq)]
pub struct RegionInfo {
    pub label: u32,
    pub pixel_count: usize,
    /// Half-open bounding box `x0..x1`, `y0..y1`.
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
    pub centroid: (f64, f64),
}

impl RegionInfo {
    pub fn columns(&self) -> std::ops::Range<usize> {
        self.x0..self.x1
    }
}

/// Integer labels per pixel, 0 for background, regions numbered `1..=count`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionLabelMap {
    width: usize,
    height: usize,
    labels: Vec<u32>,
    regions: Vec<RegionInfo>,
}

impl RegionLabelMap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn count(&self) -> usize {
        self.regions.len()
    }

    pub fn regions(&self) -> &[RegionInfo] {
        &self.regions
    }

    pub fn region(&self, label: u32) -> Option<&RegionInfo> {
        label
            .checked_sub(1)
            .and_then(|i| self.regions.get(i as usize))
    }
}

fn dilate(m: &Mask) -> Mask {
    let (w, h) = (m.width(), m.height());
    Mask::from_fn(w, h, |x, y| {
        (y.saturating_sub(1)..(y + 2).min(h))
            .any(|yy| (x.saturating_sub(1)..(x + 2).min(w)).any(|xx| m.get(xx, yy)))
    })
}

/// Pixels outside the image count as foreground, so erosion never eats
/// into shapes that touch the border.
fn erode(m: &Mask) -> Mask {
    let (w, h) = (m.width(), m.height());
    Mask::from_fn(w, h, |x, y| {
        (y.saturating_sub(1)..(y + 2).min(h))
            .all(|yy| (x.saturating_sub(1)..(x + 2).min(w)).all(|xx| m.get(xx, yy)))
    })
}

/// 3x3 morphological closing.
pub fn close3(m: &Mask) -> Mask {
    erode(&dilate(m))
}

/// Sets background pixels not 4-connected to the image border.
pub fn fill_holes(m: &Mask) -> Mask {
    let (w, h) = (m.width(), m.height());
    let mut outside = Mask::new(w, h);
    let mut queue = VecDeque::new();
    let seed = |x: usize, y: usize, outside: &mut Mask, queue: &mut VecDeque<(usize, usize)>| {
        if !m.get(x, y) && !outside.get(x, y) {
            outside.set(x, y, true);
            queue.push_back((x, y));
        }
    };
    for x in 0..w {
        seed(x, 0, &mut outside, &mut queue);
        seed(x, h - 1, &mut outside, &mut queue);
    }
    for y in 0..h {
        seed(0, y, &mut outside, &mut queue);
        seed(w - 1, y, &mut outside, &mut queue);
    }
    while let Some((x, y)) = queue.pop_front() {
        for (nx, ny) in neighbours4(x, y, w, h) {
            seed(nx, ny, &mut outside, &mut queue);
        }
    }
    Mask::from_fn(w, h, |x, y| !outside.get(x, y))
}

fn neighbours4(x: usize, y: usize, w: usize, h: usize) -> impl Iterator<Item = (usize, usize)> {
    [(-1isize, 0isize), (1, 0), (0, -1), (0, 1)]
        .into_iter()
        .filter_map(move |(dx, dy)| {
            let (nx, ny) = (x as isize + dx, y as isize + dy);
            (nx >= 0 && ny >= 0 && nx < w as isize && ny < h as isize).then_some((nx as usize, ny as usize))
        })
}

/// 4-connected components of a binary mask, numbered in raster order of
/// their first pixel; components under `min_area` pixels are dropped.
pub fn connected_components(m: &Mask, min_area: usize) -> RegionLabelMap {
    let (w, h) = (m.width(), m.height());
    let mut labels = vec![0u32; w * h];
    let mut visited = vec![false; w * h];
    let mut regions = Vec::new();
    for start in 0..w * h {
        if visited[start] || !m.get(start % w, start / w) {
            continue;
        }
        let mut pixels = vec![start];
        visited[start] = true;
        let mut head = 0;
        while head < pixels.len() {
            let i = pixels[head];
            head += 1;
            for (nx, ny) in neighbours4(i % w, i / w, w, h) {
                let j = ny * w + nx;
                if !visited[j] && m.get(nx, ny) {
                    visited[j] = true;
                    pixels.push(j);
                }
            }
        }
        if pixels.len() < min_area {
            continue;
        }
        let label = regions.len() as u32 + 1;
        let (mut x0, mut y0, mut x1, mut y1) = (w, h, 0, 0);
        let (mut sx, mut sy) = (0f64, 0f64);
        for &i in &pixels {
            let (x, y) = (i % w, i / w);
            labels[i] = label;
            x0 = x0.min(x);
            y0 = y0.min(y);
            x1 = x1.max(x + 1);
            y1 = y1.max(y + 1);
            sx += x as f64;
            sy += y as f64;
        }
        let n = pixels.len() as f64;
        regions.push(RegionInfo {
            label,
            pixel_count: pixels.len(),
            x0,
            y0,
            x1,
            y1,
            centroid: (sx / n, sy / n),
        });
    }
    RegionLabelMap {
        width: w,
        height: h,
        labels,
        regions,
    }
}

/// Closing, hole filling, then connected components.
pub fn label_regions(mask: &Mask, min_area: usize) -> RegionLabelMap {
    connected_components(&fill_holes(&close3(mask)), min_area)
}

/// Edge detection followed by [`label_regions`] on a grey preview.
///
/// Contour pixels straddle the true boundary, so each region is then
/// refined: pixels on its contour, and background pixels touching it, join
/// the region when their grey level is nearer the region's interior mean than
/// the mean of its surroundings.
pub fn segment(gray: &Plane, params: &CannyParams, min_area: usize) -> Result<RegionLabelMap> {
    let edges = canny(gray, params)?;
    let coarse = label_regions(&edges, min_area);
    let (w, h) = (gray.width(), gray.height());
    let mut mask = Mask::from_fn(w, h, |x, y| coarse.get(x, y) != 0);
    for r in coarse.regions() {
        let near = |x: usize, y: usize, label: u32| {
            neighbours8(x, y, w, h).any(|(nx, ny)| coarse.get(nx, ny) == label)
        };
        let (mut si, mut ni, mut so, mut no) = (0f64, 0usize, 0f64, 0usize);
        let mut candidates = Vec::new();
        for y in r.y0.saturating_sub(2)..(r.y1 + 2).min(h) {
            for x in r.x0.saturating_sub(2)..(r.x1 + 2).min(w) {
                let l = coarse.get(x, y);
                let v = gray.get(x, y) as f64;
                if l == r.label {
                    if edges.get(x, y) || neighbours8(x, y, w, h).any(|(nx, ny)| coarse.get(nx, ny) != r.label) {
                        candidates.push((x, y));
                    } else {
                        si += v;
                        ni += 1;
                    }
                } else if l == 0 && near(x, y, r.label) {
                    candidates.push((x, y));
                    // background two pixels out is clear of the blurred edge
                } else if l == 0 && !near(x, y, r.label) && ring2(&coarse, x, y, r.label) {
                    so += v;
                    no += 1;
                }
            }
        }
        if ni == 0 || no == 0 {
            continue;
        }
        let (inner, outer) = (si / ni as f64, so / no as f64);
        for (x, y) in candidates {
            let v = gray.get(x, y) as f64;
            mask.set(x, y, (v - inner).abs() <= (v - outer).abs());
        }
    }
    Ok(connected_components(&mask, min_area))
}

fn neighbours8(x: usize, y: usize, w: usize, h: usize) -> impl Iterator<Item = (usize, usize)> {
    (-1isize..=1)
        .flat_map(|dy| (-1isize..=1).map(move |dx| (dx, dy)))
        .filter(|&d| d != (0, 0))
        .filter_map(move |(dx, dy)| {
            let (nx, ny) = (x as isize + dx, y as isize + dy);
            (nx >= 0 && ny >= 0 && nx < w as isize && ny < h as isize).then_some((nx as usize, ny as usize))
        })
}

/// Within Chebyshev distance 2 of a pixel carrying `label`.
fn ring2(map: &RegionLabelMap, x: usize, y: usize, label: u32) -> bool {
    let (w, h) = (map.width(), map.height());
    (y.saturating_sub(2)..(y + 3).min(h)).any(|yy| (x.saturating_sub(2)..(x + 3).min(w)).any(|xx| map.get(xx, yy) == label))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn squares() -> Mask {
        Mask::from_fn(30, 20, |x, y| {
            ((2..8).contains(&x) && (3..9).contains(&y)) || ((15..27).contains(&x) && (5..15).contains(&y))
        })
    }

    #[test]
    fn empty_mask_has_no_regions() {
        assert_eq!(label_regions(&Mask::new(10, 10), 25).count(), 0);
    }

    #[test]
    fn two_squares_exact_counts() {
        let l = label_regions(&squares(), 25);
        assert_eq!(l.count(), 2);
        assert_eq!(l.regions()[0].pixel_count, 36);
        assert_eq!(l.regions()[1].pixel_count, 120);
        assert_eq!(l.get(3, 4), 1);
        assert_eq!(l.get(20, 10), 2);
        assert_eq!(l.regions()[1].columns(), 15..27);
    }

    #[test]
    fn small_components_dropped() {
        let l = label_regions(&squares(), 40);
        assert_eq!(l.count(), 1);
        assert_eq!(l.regions()[0].label, 1);
        assert_eq!(l.get(3, 4), 0);
        assert_eq!(l.get(20, 10), 1);
    }

    #[test]
    fn outline_is_filled() {
        let ring = Mask::from_fn(20, 20, |x, y| {
            let on_x = (x == 4 || x == 14) && (4..=14).contains(&y);
            let on_y = (y == 4 || y == 14) && (4..=14).contains(&x);
            on_x || on_y
        });
        let l = label_regions(&ring, 25);
        assert_eq!(l.count(), 1);
        assert_eq!(l.regions()[0].pixel_count, 11 * 11);
    }

    #[test]
    fn closing_bridges_one_pixel_gaps() {
        let broken = Mask::from_fn(20, 20, |x, y| {
            let on_x = (x == 4 || x == 14) && (4..=14).contains(&y) && y != 9;
            let on_y = (y == 4 || y == 14) && (4..=14).contains(&x);
            on_x || on_y
        });
        let l = label_regions(&broken, 25);
        assert_eq!(l.count(), 1);
        assert_eq!(l.regions()[0].pixel_count, 11 * 11);
    }

    #[test]
    fn border_touching_shape_survives_closing() {
        let m = Mask::from_fn(10, 10, |x, _| x < 4);
        assert_eq!(close3(&m), m);
    }
}
