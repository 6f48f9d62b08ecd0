//! Octave-band decay analysis.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::decay::{decay_metrics, schroeder_edc, DecayMetrics};
use crate::error::{Error, Result};
use crate::filter::SosFilter;
use crate::signal::ImpulseResponse;

pub const OCTAVE_CENTERS_HZ: [f64; 6] = [125.0, 250.0, 500.0, 1000.0, 2000.0, 4000.0];

/// Prototype order of the bandpass design.
pub const BUTTERWORTH_ORDER: usize = 4;

/// `(lower, upper)` edges of the octave centered at `center_hz`; the ratio
/// is exactly two.
pub fn band_edges(center_hz: f64) -> (f64, f64) {
    let lower = center_hz / SQRT_2;
    (lower, 2.0 * lower)
}

pub fn octave_bandpass(center_hz: f64, sample_rate: u32) -> Result<SosFilter> {
    let nyquist = sample_rate as f64 / 2.0;
    let (lower, upper) = band_edges(center_hz);
    if !(center_hz > 0.0) || upper >= nyquist {
        return Err(Error::BandOutOfRange {
            center_hz,
            nyquist_hz: nyquist,
        });
    }
    Ok(SosFilter::butterworth_bandpass(
        BUTTERWORTH_ORDER,
        lower,
        upper,
        sample_rate as f64,
    ))
}

/// Filters a mono response through one octave band, causally, once.
pub fn octave_filter(rir: &ImpulseResponse, center_hz: f64) -> Result<ImpulseResponse> {
    let h = rir.mono_samples()?;
    let filter = octave_bandpass(center_hz, rir.sample_rate())?;
    ImpulseResponse::mono(filter.apply(h), rir.sample_rate())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OctaveBandResult {
    pub center_hz: f64,
    pub lower_hz: f64,
    pub upper_hz: f64,
    pub metrics: DecayMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmittedBand {
    pub center_hz: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OctaveAnalysis {
    pub bands: Vec<OctaveBandResult>,
    pub omitted: Vec<OmittedBand>,
}

/// EDT/T20/T30 for each standard octave band. Bands that do not fit below
/// Nyquist, or whose filtered output carries no energy, are listed in
/// `omitted` with the reason.
pub fn octave_band_analysis(rir: &ImpulseResponse) -> Result<OctaveAnalysis> {
    rir.mono_samples()?;
    let mut bands = Vec::new();
    let mut omitted = Vec::new();
    for &center in &OCTAVE_CENTERS_HZ {
        let band = octave_filter(rir, center).and_then(|filtered| schroeder_edc(&filtered));
        match band {
            Ok(edc) => {
                let (lower_hz, upper_hz) = band_edges(center);
                bands.push(OctaveBandResult {
                    center_hz: center,
                    lower_hz,
                    upper_hz,
                    metrics: decay_metrics(&edc),
                });
            }
            Err(e) => omitted.push(OmittedBand {
                center_hz: center,
                reason: e.to_string(),
            }),
        }
    }
    Ok(OctaveAnalysis { bands, omitted })
}
