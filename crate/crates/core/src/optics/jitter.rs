//! Platform motion between frames.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JitterKind {
    None,
    /// Starts at the origin; Gaussian steps, clamped to the amplitude box.
    RandomWalk,
    /// `dx = A sin(2 pi k / P)`, `dy = A sin(pi k / P)`.
    Sinusoid,
    /// Independent uniform offsets in `[-A, A]` per axis and frame; frame 0 is at rest.
    Uniform,
}

impl std::str::FromStr for JitterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(JitterKind::None),
            "walk" | "random-walk" => Ok(JitterKind::RandomWalk),
            "sine" | "sinusoid" => Ok(JitterKind::Sinusoid),
            "uniform" => Ok(JitterKind::Uniform),
            other => Err(Error::Parameter(format!("unknown jitter kind '{other}'"))),
        }
    }
}

/// Translation of the scene as seen by both sensors, in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct JitterOffset {
    pub dx: f64,
    pub dy: f64,
}

impl JitterOffset {
    pub const ZERO: JitterOffset = JitterOffset { dx: 0.0, dy: 0.0 };

    pub fn new(dx: f64, dy: f64) -> Self {
        Self { dx, dy }
    }

    pub fn is_integer(&self) -> bool {
        self.dx.fract() == 0.0 && self.dy.fract() == 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JitterModel {
    pub kind: JitterKind,
    pub amplitude: f64,
    pub step_sigma: f64,
    /// Sinusoid period in frames.
    pub period_frames: f64,
    pub subpixel: bool,
    pub seed: u64,
}

impl Default for JitterModel {
    fn default() -> Self {
        Self {
            kind: JitterKind::None,
            amplitude: 0.0,
            step_sigma: 1.0,
            period_frames: 50.0,
            subpixel: false,
            seed: 0,
        }
    }
}

impl JitterModel {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn random_walk(amplitude: f64, seed: u64) -> Self {
        Self {
            kind: JitterKind::RandomWalk,
            amplitude,
            seed,
            ..Self::default()
        }
    }

    pub fn uniform(amplitude: f64, seed: u64) -> Self {
        Self {
            kind: JitterKind::Uniform,
            amplitude,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude >= 0.0) || !(self.step_sigma >= 0.0) {
            return Err(Error::Parameter(
                "jitter amplitude and step sigma must be non-negative".into(),
            ));
        }
        if self.kind == JitterKind::Sinusoid && !(self.period_frames > 0.0) {
            return Err(Error::Parameter("sinusoid period must be positive".into()));
        }
        Ok(())
    }

    /// Offsets for frames `0..n`.
    pub fn offsets(&self, n: usize) -> Result<Vec<JitterOffset>> {
        self.validate()?;
        let a = self.amplitude;
        // integer offsets must stay inside the box after rounding
        let bound = if self.subpixel { a } else { a.floor() };
        let emit = |v: f64| {
            if self.subpixel {
                v
            } else {
                v.round().clamp(-bound, bound)
            }
        };
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let out = match self.kind {
            JitterKind::None => vec![JitterOffset::ZERO; n],
            JitterKind::RandomWalk => {
                let step = Normal::new(0.0, self.step_sigma)
                    .map_err(|e| Error::Parameter(e.to_string()))?;
                let (mut x, mut y) = (0.0f64, 0.0f64);
                let mut v = Vec::with_capacity(n);
                for k in 0..n {
                    if k > 0 {
                        x = (x + step.sample(&mut rng)).clamp(-a, a);
                        y = (y + step.sample(&mut rng)).clamp(-a, a);
                    }
                    v.push(JitterOffset::new(emit(x), emit(y)));
                }
                v
            }
            JitterKind::Sinusoid => (0..n)
                .map(|k| {
                    let ph = std::f64::consts::PI * k as f64 / self.period_frames;
                    JitterOffset::new(emit(a * (2.0 * ph).sin()), emit(a * ph.sin()))
                })
                .collect(),
            JitterKind::Uniform => {
                let ai = a.floor() as i64;
                (0..n)
                    .map(|k| {
                        if k == 0 {
                            JitterOffset::ZERO
                        } else if self.subpixel {
                            JitterOffset::new(rng.random_range(-a..=a), rng.random_range(-a..=a))
                        } else {
                            JitterOffset::new(
                                rng.random_range(-ai..=ai) as f64,
                                rng.random_range(-ai..=ai) as f64,
                            )
                        }
                    })
                    .collect()
            }
        };
        // -0.0 from rounding small negatives would print oddly in logs
        Ok(out
            .into_iter()
            .map(|o| JitterOffset::new(o.dx + 0.0, o.dy + 0.0))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_amplitude_walk_is_still() {
        let m = JitterModel::random_walk(0.0, 5);
        assert!(m.offsets(100).unwrap().iter().all(|o| *o == JitterOffset::ZERO));
    }

    #[test]
    fn integer_unless_subpixel() {
        for kind in [JitterKind::RandomWalk, JitterKind::Sinusoid, JitterKind::Uniform] {
            let m = JitterModel {
                kind,
                amplitude: 3.5,
                seed: 9,
                ..JitterModel::default()
            };
            let offs = m.offsets(200).unwrap();
            assert!(offs.iter().all(|o| o.is_integer()), "{kind:?}");
            assert!(offs.iter().all(|o| o.dx.abs() <= 3.5 && o.dy.abs() <= 3.5));
            let sub = JitterModel {
                subpixel: true,
                ..m
            };
            assert!(sub.offsets(200).unwrap().iter().any(|o| !o.is_integer()));
        }
    }

    #[test]
    fn walk_starts_at_origin_and_moves() {
        let offs = JitterModel::random_walk(3.0, 1).offsets(300).unwrap();
        assert_eq!(offs[0], JitterOffset::ZERO);
        assert!(offs.iter().any(|o| o.dx != 0.0));
    }

    #[test]
    fn every_kind_starts_at_rest() {
        for kind in [JitterKind::RandomWalk, JitterKind::Sinusoid, JitterKind::Uniform] {
            let m = JitterModel {
                kind,
                amplitude: 4.0,
                seed: 2,
                ..JitterModel::default()
            };
            assert_eq!(m.offsets(5).unwrap()[0], JitterOffset::ZERO, "{kind:?}");
        }
    }

    #[test]
    fn uniform_covers_box() {
        let offs = JitterModel::uniform(5.0, 3).offsets(2000).unwrap();
        for v in -5..=5 {
            assert!(offs.iter().any(|o| o.dx == v as f64));
            assert!(offs.iter().any(|o| o.dy == v as f64));
        }
    }

    #[test]
    fn rejects_negative_amplitude() {
        assert!(JitterModel::random_walk(-1.0, 0).offsets(3).is_err());
    }
}
