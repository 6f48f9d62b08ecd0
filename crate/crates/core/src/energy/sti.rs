use serde::{Deserialize, Serialize};

use super::SnrSource;

pub const STI_MIN: f64 = 0.15;
pub const STI_MAX: f64 = 1.0;

/// Inputs of the reverberation/noise STI approximation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StiInputs {
    pub rt60_s: f64,
    pub snr_db: f64,
    pub snr_source: SnrSource,
}

/// Proxy speech transmission index from RT60 and SNR.
///
/// `0.15 + 0.85 * (0.65 * rt + 0.35 * sn)` with
/// `rt = 1 / (1 + (RT60 / 0.8)^1.6)` and `sn = 1 / (1 + 10^(-(SNR - 15) / 10))`.
/// Not a substitute for the full modulation-transfer STI.
pub fn sti_proxy(inputs: &StiInputs) -> f64 {
    let rt60 = inputs.rt60_s.max(0.0);
    let reverb = 1.0 / (1.0 + (rt60 / 0.8).powf(1.6));
    let noise = 1.0 / (1.0 + 10f64.powf(-(inputs.snr_db - 15.0) / 10.0));
    (STI_MIN + 0.85 * (0.65 * reverb + 0.35 * noise)).clamp(STI_MIN, STI_MAX)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sti(rt60_s: f64, snr_db: f64) -> f64 {
        sti_proxy(&StiInputs {
            rt60_s,
            snr_db,
            snr_source: SnrSource::UserSupplied,
        })
    }

    #[test]
    fn neutral_point() {
        assert!((sti(0.8, 15.0) - 0.575).abs() < 1e-12);
    }

    #[test]
    fn limits() {
        assert!((sti(1e-9, f64::INFINITY) - 1.0).abs() < 1e-9);
        assert!((sti(1e6, f64::NEG_INFINITY) - STI_MIN).abs() < 1e-9);
        assert!((sti(1e-9, 200.0) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn strictly_decreasing_in_rt60() {
        let grid: Vec<f64> = (1..200).map(|i| i as f64 * 0.025).collect();
        for snr in [0.0, 15.0, 30.0] {
            for w in grid.windows(2) {
                assert!(sti(w[1], snr) < sti(w[0], snr));
            }
        }
    }
}
