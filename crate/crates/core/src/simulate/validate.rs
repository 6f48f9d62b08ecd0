use serde::{Deserialize, Serialize};

use super::RirRecord;
use crate::decay::{decay_metrics, schroeder_edc};
use crate::geometry::{RoomGeometry, SPEED_OF_SOUND};
use crate::signal::preprocess;
use crate::spatial::{first_order_reflections, room_modes};
use crate::spectral::{magnitude_spectrum, Smoothing};
use crate::stats::{median, pearson};

/// Highest frequency searched for modal peaks, Hz.
const MODAL_SEARCH_MAX_HZ: f64 = 150.0;
const MODAL_PEAKS: usize = 5;
/// Half-width of the power average applied before peak picking, Hz.
const MODAL_SMOOTHING_HZ: f64 = 1.0;

/// Sabine reverberation time `0.161 V / sum(S_i a_i)`.
pub fn sabine_rt60(geom: &RoomGeometry, absorption: &[f64; 6]) -> f64 {
    let (l, w, h) = (geom.length, geom.width, geom.height);
    let areas = [w * h, w * h, l * h, l * h, l * w, l * w];
    let sabins: f64 = areas.iter().zip(absorption).map(|(s, a)| s * a).sum();
    0.161 * l * w * h / sabins
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModalCheck {
    pub record_index: usize,
    pub peaks_hz: Vec<f64>,
    pub nearest_mode_hz: Vec<f64>,
    pub mean_abs_error_hz: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub n_records: usize,
    /// r^2 of the T30 regression, per record.
    pub edc_r2: Vec<Option<f64>>,
    pub median_edc_r2: Option<f64>,
    pub measured_t30_s: Vec<Option<f64>>,
    pub sabine_rt60_s: Vec<f64>,
    pub t30_sabine_correlation: Option<f64>,
    pub first_reflection_error_samples: Vec<Option<f64>>,
    pub max_first_reflection_error_samples: Option<f64>,
    pub modal: Option<ModalCheck>,
}

/// Distance in samples between the first reflection found in the response
/// and the earliest first-order path predicted by the geometry.
///
/// The direct sound is rendered from the geometry alone and subtracted, so
/// the first sample left standing belongs to the earliest reflection.
pub fn first_reflection_error_samples(record: &RirRecord) -> Option<f64> {
    let geom = &record.config.geom;
    let fs = record.config.sample_rate as f64;
    let h = record.rir.channel(0);
    let paths = first_order_reflections(geom);
    let expected = paths.earliest_reflection()?.arrival_s * fs;

    let d = geom.source_receiver_distance();
    let pos = d / SPEED_OF_SOUND * fs;
    let n0 = pos.floor() as usize;
    let frac = pos - n0 as f64;
    let mut residual = h.to_vec();
    if n0 < residual.len() {
        residual[n0] -= (1.0 - frac) / d;
    }
    if n0 + 1 < residual.len() {
        residual[n0 + 1] -= frac / d;
    }
    let threshold = 1e-5 / d;
    let found = residual.iter().position(|s| s.abs() > threshold)?;
    Some((found as f64 - expected).abs())
}

fn modal_check(record: &RirRecord) -> Option<ModalCheck> {
    let modes = room_modes(&record.config.geom, MODAL_SEARCH_MAX_HZ);
    let first_mode = modes.first()?.f_hz;
    let spectrum = magnitude_spectrum(&record.rir, Smoothing::None).ok()?;
    let df = spectrum.freqs_hz[1];
    let half = ((MODAL_SMOOTHING_HZ / df).round() as usize).max(1);
    let power: Vec<f64> = spectrum.magnitude_db.iter().map(|db| 10f64.powf(db / 10.0)).collect();
    let smooth: Vec<f64> = (0..power.len())
        .map(|k| {
            let lo = k.saturating_sub(half);
            let hi = (k + half).min(power.len() - 1);
            power[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect();
    let lo_bin = ((0.8 * first_mode / df).floor() as usize).max(1);
    let hi_bin = ((MODAL_SEARCH_MAX_HZ / df).ceil() as usize).min(smooth.len() - 2);
    let mut peaks_hz = Vec::new();
    for k in lo_bin..=hi_bin {
        if smooth[k] > smooth[k - 1] && smooth[k] >= smooth[k + 1] {
            peaks_hz.push(spectrum.freqs_hz[k]);
            if peaks_hz.len() == MODAL_PEAKS {
                break;
            }
        }
    }
    let nearest_mode_hz: Vec<f64> = peaks_hz
        .iter()
        .map(|&p| {
            modes
                .iter()
                .map(|m| m.f_hz)
                .min_by(|a, b| (a - p).abs().total_cmp(&(b - p).abs()))
                .unwrap_or(f64::NAN)
        })
        .collect();
    let errors: Vec<f64> = peaks_hz.iter().zip(&nearest_mode_hz).map(|(p, m)| (p - m).abs()).collect();
    Some(ModalCheck {
        record_index: record.index,
        mean_abs_error_hz: (!errors.is_empty()).then(|| errors.iter().sum::<f64>() / errors.len() as f64),
        peaks_hz,
        nearest_mode_hz,
    })
}

/// Runs the decay-linearity, Sabine, reflection-timing and modal checks
/// over a batch. The modal check uses the first record.
pub fn validate_batch(records: &[RirRecord]) -> ValidationReport {
    let mut edc_r2 = Vec::with_capacity(records.len());
    let mut measured_t30_s = Vec::with_capacity(records.len());
    for r in records {
        let t30 = preprocess(&r.rir)
            .and_then(|(clean, _)| schroeder_edc(&clean))
            .map(|edc| decay_metrics(&edc).t30)
            .ok();
        edc_r2.push(t30.as_ref().and_then(|f| f.r2));
        measured_t30_s.push(t30.and_then(|f| f.seconds));
    }
    let sabine_rt60_s: Vec<f64> = records
        .iter()
        .map(|r| sabine_rt60(&r.config.geom, &r.config.absorption))
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = measured_t30_s
        .iter()
        .zip(&sabine_rt60_s)
        .filter_map(|(m, s)| m.map(|m| (m, *s)))
        .unzip();
    let r2_values: Vec<f64> = edc_r2.iter().flatten().copied().collect();
    let first_reflection_error_samples: Vec<Option<f64>> =
        records.iter().map(first_reflection_error_samples).collect();
    let max_first_reflection_error_samples = first_reflection_error_samples
        .iter()
        .flatten()
        .copied()
        .reduce(f64::max);
    ValidationReport {
        n_records: records.len(),
        median_edc_r2: median(&r2_values),
        edc_r2,
        measured_t30_s,
        t30_sabine_correlation: pearson(&xs, &ys),
        sabine_rt60_s,
        first_reflection_error_samples,
        max_first_reflection_error_samples,
        modal: records.first().and_then(modal_check),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::{generate_dataset, DatasetOptions};

    #[test]
    fn sabine_reference_value() {
        let g = RoomGeometry::new([10.0, 8.0, 3.0], [1.0; 3], [5.0, 4.0, 1.5]).unwrap();
        // S = 2 (80 + 30 + 24) = 268; 0.161 * 240 / (268 * 0.2)
        let t = sabine_rt60(&g, &[0.2; 6]);
        assert!((t - 0.161 * 240.0 / 53.6).abs() < 1e-12);
    }

    #[test]
    fn small_batch_checks() {
        let options = DatasetOptions {
            sample_rate: 16_000,
            ..DatasetOptions::new(10, 21)
        };
        let records = generate_dataset(&options).unwrap();
        let report = validate_batch(&records);
        assert_eq!(report.n_records, 10);
        assert!(report.median_edc_r2.unwrap() > 0.98, "{:?}", report.edc_r2);
        assert!(report.max_first_reflection_error_samples.unwrap() <= 1.0);
        let modal = report.modal.unwrap();
        assert!(!modal.peaks_hz.is_empty());
        assert_eq!(modal.peaks_hz.len(), modal.nearest_mode_hz.len());
    }
}
