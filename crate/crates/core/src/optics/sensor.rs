//! Sensor readout: photo-electron conversion, shot and read noise, quantisation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SensorParams {
    pub bit_depth: u8,
    /// Electrons mapped to the largest code.
    pub full_well: f64,
    pub read_noise_sigma: f64,
    /// Electrons per unit radiance per millisecond of exposure.
    pub gain: f64,
    pub exposure_ms: f64,
    /// Gaussian-approximated Poisson noise with variance equal to the signal.
    pub shot_noise: bool,
    pub seed: u64,
}

impl Default for SensorParams {
    /// 8-bit sensor where radiance 1.0 lands exactly on full scale.
    fn default() -> Self {
        Self {
            bit_depth: 8,
            full_well: 10_000.0,
            read_noise_sigma: 5.0,
            gain: 2_000.0,
            exposure_ms: 5.0,
            shot_noise: true,
            seed: 0,
        }
    }
}

impl SensorParams {
    /// Quantising readout with all noise switched off.
    pub fn noiseless(bit_depth: u8) -> Self {
        Self {
            bit_depth,
            read_noise_sigma: 0.0,
            shot_noise: false,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if ![8, 10, 12, 16].contains(&self.bit_depth) {
            return Err(Error::Parameter(format!(
                "bit depth {} not one of 8, 10, 12, 16",
                self.bit_depth
            )));
        }
        if !(self.full_well > 0.0) || !(self.gain >= 0.0) || !(self.read_noise_sigma >= 0.0) {
            return Err(Error::Parameter(
                "full well must be positive, gain and read noise non-negative".into(),
            ));
        }
        if !(self.exposure_ms > 0.0) {
            return Err(Error::Parameter(format!(
                "exposure {} ms must be positive",
                self.exposure_ms
            )));
        }
        Ok(())
    }

    pub fn max_code(&self) -> u32 {
        (1u32 << self.bit_depth) - 1
    }

    /// Electrons collected per unit radiance.
    pub fn electrons_per_unit(&self) -> f64 {
        self.gain * self.exposure_ms
    }

    /// Inverse of the noiseless transfer: code -> radiance.
    pub fn code_to_radiance(&self, code: f32) -> f32 {
        (code as f64 / self.max_code() as f64 * self.full_well / self.electrons_per_unit()) as f32
    }

    /// Noiseless, unrounded code for a radiance.
    pub fn ideal_code(&self, value: f64) -> f64 {
        self.electrons_per_unit() * value / self.full_well * self.max_code() as f64
    }

    /// Expected SNR in dB of a flat field at `value` under the shot + read variance law.
    pub fn predicted_snr_db(&self, value: f64) -> f64 {
        let e = self.electrons_per_unit() * value;
        let var = if self.shot_noise { e } else { 0.0 } + self.read_noise_sigma.powi(2);
        10.0 * (e * e / var).log10()
    }

    /// Chooses gain (at the current exposure) so that a signal with the given
    /// first and second moments reaches `target_db` overall, and sets the full
    /// well so that radiance `full_scale` maps to the largest code.
    pub fn with_target_snr(mut self, target_db: f64, mean: f64, mean_sq: f64, full_scale: f64) -> Self {
        let s = 10f64.powf(target_db / 10.0);
        let m1 = if self.shot_noise { mean } else { 0.0 };
        let var_r = self.read_noise_sigma.powi(2);
        // k^2 m2 = s (k m1 + var_r), solved for electrons-per-unit k
        let k = (s * m1 + (s * s * m1 * m1 + 4.0 * mean_sq * s * var_r).sqrt()) / (2.0 * mean_sq);
        self.gain = k / self.exposure_ms;
        self.full_well = k * full_scale;
        self
    }
}

/// Identifies an independent noise stream: one per frame and per sensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoiseKey {
    pub frame: u64,
    pub stream: u64,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn stream_rng(seed: u64, key: NoiseKey) -> ChaCha8Rng {
    let s = splitmix(splitmix(splitmix(seed) ^ key.frame) ^ key.stream.wrapping_mul(0x2545_F491_4F6C_DD1D));
    ChaCha8Rng::seed_from_u64(s)
}

/// Converts radiance to digital codes with noise drawn from the keyed stream.
pub fn apply_noise(values: &[f32], sensor: &SensorParams, key: NoiseKey) -> Vec<f32> {
    let mut rng = stream_rng(sensor.seed, key);
    let k = sensor.electrons_per_unit();
    let scale = sensor.max_code() as f64 / sensor.full_well;
    let max = sensor.max_code() as f64;
    let read = sensor.read_noise_sigma;
    values
        .iter()
        .map(|&v| {
            let e = k * v.max(0.0) as f64;
            let mut noisy = e;
            if sensor.shot_noise && e > 0.0 {
                let z: f64 = StandardNormal.sample(&mut rng);
                noisy += e.sqrt() * z;
            }
            if read > 0.0 {
                let z: f64 = StandardNormal.sample(&mut rng);
                noisy += read * z;
            }
            (noisy * scale).round().clamp(0.0, max) as f32
        })
        .collect()
}

/// How frames leave the detectors.
#[derive(Debug, Clone, PartialEq)]
pub enum Readout {
    /// Radiance passed through unchanged (no noise, no quantisation).
    Float,
    Sensor(SensorParams),
}

impl Readout {
    pub fn sensor(&self) -> Option<&SensorParams> {
        match self {
            Readout::Float => None,
            Readout::Sensor(s) => Some(s),
        }
    }

    pub fn read(&self, values: Vec<f32>, key: NoiseKey) -> Vec<f32> {
        match self {
            Readout::Float => values,
            Readout::Sensor(s) => apply_noise(&values, s, key),
        }
    }

    /// Converts frame samples back to radiance units.
    pub fn to_radiance(&self, sample: f32) -> f32 {
        match self {
            Readout::Float => sample,
            Readout::Sensor(s) => s.code_to_radiance(sample),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const KEY: NoiseKey = NoiseKey { frame: 0, stream: 0 };

    #[test]
    fn noiseless_full_scale() {
        for bits in [8u8, 10, 12, 16] {
            let s = SensorParams::noiseless(bits);
            assert_eq!(s.electrons_per_unit(), s.full_well);
            let codes = apply_noise(&[1.0, 0.0, 0.2, 2.0], &s, KEY);
            let max = s.max_code() as f32;
            assert_eq!(codes[0], max);
            assert_eq!(codes[1], 0.0);
            assert_eq!(codes[2], (0.2 * max).round());
            assert_eq!(codes[3], max, "saturation clamps");
        }
    }

    #[test]
    fn zero_input_without_read_noise() {
        let s = SensorParams {
            read_noise_sigma: 0.0,
            ..SensorParams::default()
        };
        assert!(apply_noise(&vec![0.0; 1000], &s, KEY).iter().all(|&c| c == 0.0));
    }

    #[test]
    fn deterministic_per_key() {
        let s = SensorParams::default();
        let v = vec![0.3f32; 256];
        assert_eq!(apply_noise(&v, &s, KEY), apply_noise(&v, &s, KEY));
        let other = NoiseKey { frame: 1, stream: 0 };
        assert_ne!(apply_noise(&v, &s, KEY), apply_noise(&v, &s, other));
    }

    #[test]
    fn monte_carlo_snr_matches_variance_law() {
        // 16-bit so quantisation is negligible against the noise
        let s = SensorParams {
            bit_depth: 16,
            full_well: 10_000.0,
            gain: 40.0,
            exposure_ms: 5.0,
            read_noise_sigma: 5.0,
            ..SensorParams::default()
        };
        let v = 0.5;
        let codes = apply_noise(&vec![v as f32; 10_000], &s, KEY);
        let clean = s.ideal_code(v);
        let noise: f64 = codes.iter().map(|&c| (c as f64 - clean).powi(2)).sum::<f64>() / 10_000.0;
        let measured = clean * clean / noise;
        let e = 40.0 * 5.0 * v;
        let analytic = e * e / (e + 25.0);
        assert!(
            (measured / analytic - 1.0).abs() < 0.1,
            "measured {measured} analytic {analytic}"
        );
    }

    #[test]
    fn target_snr_solution() {
        let s = SensorParams::default().with_target_snr(20.0, 0.5, 0.25, 1.0);
        let k = s.electrons_per_unit();
        let snr = k * k * 0.25 / (k * 0.5 + 25.0);
        assert!((10.0 * snr.log10() - 20.0).abs() < 1e-9);
        assert!((s.full_well - k).abs() < 1e-9);
    }

    #[test]
    fn validation() {
        assert!(SensorParams::default().validate().is_ok());
        let bad = SensorParams {
            bit_depth: 9,
            ..SensorParams::default()
        };
        assert!(bad.validate().is_err());
        let bad = SensorParams {
            exposure_ms: 0.0,
            ..SensorParams::default()
        };
        assert!(bad.validate().is_err());
    }
}
