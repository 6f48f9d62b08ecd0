use serde::{Deserialize, Serialize};

/// Weights of the reverberation, STI, definition, and clarity terms.
pub const WELLNESS_WEIGHTS: [f64; 4] = [0.45, 0.25, 0.20, 0.10];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WellnessInputs {
    pub rt60_s: f64,
    pub sti: f64,
    pub d50: f64,
    pub c80_db: f64,
    /// Must be positive.
    pub volume_m3: f64,
}

/// `1 / (1 + max(0, V - 300) / 800)`: rooms up to 300 m^3 are unpenalized.
pub fn volume_adjustment(volume_m3: f64) -> f64 {
    1.0 / (1.0 + (volume_m3 - 300.0).max(0.0) / 800.0)
}

/// Composite 0..100 rating; higher is better.
pub fn wellness_score(inputs: &WellnessInputs) -> f64 {
    let reverb = 1.0 / (1.0 + (inputs.rt60_s.max(0.0) / 0.9).powf(1.8));
    let speech = inputs.sti.clamp(0.0, 1.0);
    let definition = inputs.d50.clamp(0.0, 1.0);
    let clarity = ((inputs.c80_db + 2.0) / 10.0).clamp(0.0, 1.0);
    let [wr, ws, wd, wc] = WELLNESS_WEIGHTS;
    let blend = wr * reverb + ws * speech + wd * definition + wc * clarity;
    (100.0 * volume_adjustment(inputs.volume_m3) * blend).clamp(0.0, 100.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_one() {
        assert!((WELLNESS_WEIGHTS.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn volume_adjustment_values() {
        assert_eq!(volume_adjustment(300.0), 1.0);
        assert_eq!(volume_adjustment(120.0), 1.0);
        assert_eq!(volume_adjustment(1100.0), 0.5);
    }

    #[test]
    fn reference_room() {
        let w = wellness_score(&WellnessInputs {
            rt60_s: 0.9,
            sti: 1.0,
            d50: 1.0,
            c80_db: 8.0,
            volume_m3: 100.0,
        });
        assert!((w - 77.5).abs() < 1e-12);
    }

    #[test]
    fn clipped_terms() {
        let w = wellness_score(&WellnessInputs {
            rt60_s: 0.0,
            sti: 2.0,
            d50: 1.5,
            c80_db: 40.0,
            volume_m3: 50.0,
        });
        assert!((w - 100.0).abs() < 1e-12);
    }
}
