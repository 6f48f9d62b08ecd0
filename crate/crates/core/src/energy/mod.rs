//! Early/late energy ratios, the SNR estimate feeding the STI proxy, and
//! the composite wellness score.

mod sti;
mod wellness;

pub use sti::{sti_proxy, StiInputs, STI_MAX, STI_MIN};
pub use wellness::{volume_adjustment, wellness_score, WellnessInputs, WELLNESS_WEIGHTS};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::ImpulseResponse;

/// Ratios beyond this magnitude are clamped and flagged as saturated.
pub const RATIO_LIMIT_DB: f64 = 100.0;

/// An energy part below this fraction of the total counts as absent.
const VANISHING_FRACTION: f64 = 1e-12;

/// Half-width of the direct-sound window around the peak, in seconds.
pub const DIRECT_HALF_WINDOW_S: f64 = 0.0025;

/// SNR assumed when it cannot be estimated, in dB.
pub const DEFAULT_SNR_DB: f64 = 15.0;

/// Shortest response for which the SNR is estimated, in seconds.
pub const MIN_SNR_DURATION_S: f64 = 0.2;

/// A level ratio in dB, clamped to +/-[`RATIO_LIMIT_DB`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelRatio {
    pub db: f64,
    pub saturated: bool,
}

impl LevelRatio {
    fn from_energies(first: f64, second: f64) -> Self {
        let total = first + second;
        if second < VANISHING_FRACTION * total {
            return Self { db: RATIO_LIMIT_DB, saturated: true };
        }
        if first < VANISHING_FRACTION * total {
            return Self { db: -RATIO_LIMIT_DB, saturated: true };
        }
        let db = 10.0 * (first / second).log10();
        Self {
            db: db.clamp(-RATIO_LIMIT_DB, RATIO_LIMIT_DB),
            saturated: db.abs() > RATIO_LIMIT_DB,
        }
    }
}

fn energy_split(h: &[f64], boundary: usize) -> Result<(f64, f64)> {
    let cut = (boundary + 1).min(h.len());
    let early: f64 = h[..cut].iter().map(|s| s * s).sum();
    let late: f64 = h[cut..].iter().map(|s| s * s).sum();
    if early + late <= 0.0 {
        return Err(Error::DegenerateInput("signal has zero energy".into()));
    }
    Ok((early, late))
}

/// Index of the last early sample for a boundary at `seconds`.
fn boundary_index(seconds: f64, sample_rate: u32) -> usize {
    (seconds * sample_rate as f64).floor() as usize
}

/// Clarity: early (0..=80 ms) over late energy, in dB.
pub fn clarity_c80(rir: &ImpulseResponse) -> Result<LevelRatio> {
    let h = rir.mono_samples()?;
    let (early, late) = energy_split(h, boundary_index(0.080, rir.sample_rate()))?;
    Ok(LevelRatio::from_energies(early, late))
}

/// Definition: fraction of the total energy in the first 50 ms (inclusive).
pub fn definition_d50(rir: &ImpulseResponse) -> Result<f64> {
    let h = rir.mono_samples()?;
    let (early, late) = energy_split(h, boundary_index(0.050, rir.sample_rate()))?;
    Ok((early / (early + late)).clamp(0.0, 1.0))
}

/// Direct-sound window `[start, end)` around the absolute peak.
fn direct_window(h: &[f64], sample_rate: u32) -> (usize, usize) {
    let peak = h
        .iter()
        .enumerate()
        .fold((0, 0.0_f64), |(bi, bv), (i, s)| {
            if s.abs() > bv {
                (i, s.abs())
            } else {
                (bi, bv)
            }
        })
        .0;
    let half = (DIRECT_HALF_WINDOW_S * sample_rate as f64).round() as usize;
    (peak.saturating_sub(half), (peak + half + 1).min(h.len()))
}

/// Direct-to-reverberant ratio with the direct part taken as the peak
/// sample +/- 2.5 ms (truncated at the signal bounds).
pub fn drr(rir: &ImpulseResponse) -> Result<LevelRatio> {
    let h = rir.mono_samples()?;
    let (start, end) = direct_window(h, rir.sample_rate());
    let direct: f64 = h[start..end].iter().map(|s| s * s).sum();
    let rest: f64 = h[..start].iter().chain(&h[end..]).map(|s| s * s).sum();
    if direct + rest <= 0.0 {
        return Err(Error::DegenerateInput("signal has zero energy".into()));
    }
    Ok(LevelRatio::from_energies(direct, rest))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SnrSource {
    Estimated,
    UserSupplied,
    /// Estimation was impossible and [`DEFAULT_SNR_DB`] was used.
    Default,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnrEstimate {
    pub snr_db: f64,
    pub source: SnrSource,
}

/// Peak direct-sound energy over the mean-square of the final 10 % of the
/// response, clamped to `[0, 60]` dB. Responses shorter than 0.2 s get the
/// default of 15 dB.
///
/// The ratio is scale-free, so normalized and raw signals give the same
/// result.
pub fn estimate_snr(rir: &ImpulseResponse) -> Result<SnrEstimate> {
    let h = rir.mono_samples()?;
    if rir.duration_s() < MIN_SNR_DURATION_S {
        return Ok(SnrEstimate {
            snr_db: DEFAULT_SNR_DB,
            source: SnrSource::Default,
        });
    }
    let (start, end) = direct_window(h, rir.sample_rate());
    let signal = h[start..end].iter().fold(0.0_f64, |m, s| m.max(s * s));
    if signal <= 0.0 {
        return Err(Error::DegenerateInput("signal has zero energy".into()));
    }
    let tail = &h[h.len() - (h.len() / 10).max(1)..];
    let noise = tail.iter().map(|s| s * s).sum::<f64>() / tail.len() as f64;
    let snr_db = if noise > 0.0 {
        (10.0 * (signal / noise).log10()).clamp(0.0, 60.0)
    } else {
        60.0
    };
    Ok(SnrEstimate {
        snr_db,
        source: SnrSource::Estimated,
    })
}
