use std::time::Instant;

use super::{
    Broadband, ComplianceRow, Fingerprint, InputInfo, Measured, MetricsReport, ModesSummary,
    Rt60Summary, SchroederReport, SpatialReport, SpectralSummary, StageTiming, StiReport, Timings,
    VolumeSource, WellnessReport, SCHEMA_VERSION,
};
use crate::compliance::{check_all, ComplianceMetrics};
use crate::decay::{decay_metrics, schroeder_edc, EnergyDecayCurve};
use crate::energy::{
    clarity_c80, definition_d50, drr, estimate_snr, sti_proxy, volume_adjustment, wellness_score,
    SnrEstimate, SnrSource, StiInputs, WellnessInputs,
};
use crate::error::Result;
use crate::geometry::RoomGeometry;
use crate::octave::octave_band_analysis;
use crate::signal::{preprocess, to_mono, ImpulseResponse};
use crate::spatial::{
    first_order_reflections, iacc, mode_counts, room_modes, schroeder_frequency, RoomMode,
    SchroederFormula, EARLY_IACC_LIMIT_S,
};
use crate::spectral::{
    magnitude_spectrum, spectrogram, Smoothing, SpectrumFrame, TimeFrequencyGrid, DEFAULT_HOP_S,
    DEFAULT_WINDOW_S,
};

/// Modes listed inline in the report; the full list is exported separately.
const LOWEST_MODES: usize = 10;
/// Volume at or below which the wellness volume adjustment is 1.
const NEUTRAL_VOLUME_M3: f64 = 300.0;

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzeOptions {
    pub geometry: Option<RoomGeometry>,
    /// Overrides the geometry's volume for wellness and Schroeder frequency.
    pub volume_m3: Option<f64>,
    pub snr_db: Option<f64>,
    pub iacc_limit_s: f64,
    pub schroeder_formula: SchroederFormula,
    pub modes_max_hz: f64,
    pub window_s: f64,
    pub hop_s: f64,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self {
            geometry: None,
            volume_m3: None,
            snr_db: None,
            iacc_limit_s: EARLY_IACC_LIMIT_S,
            schroeder_formula: SchroederFormula::Classic,
            modes_max_hz: 300.0,
            window_s: DEFAULT_WINDOW_S,
            hop_s: DEFAULT_HOP_S,
        }
    }
}

/// The report together with the intermediate data the exporters need.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub report: MetricsReport,
    /// Preprocessed response with its original channel layout.
    pub processed: ImpulseResponse,
    pub mono: ImpulseResponse,
    pub edc: EnergyDecayCurve,
    pub spectrum: Option<SpectrumFrame>,
    pub smoothed_spectrum: Option<SpectrumFrame>,
    pub spectrogram: Option<TimeFrequencyGrid>,
    pub modes: Vec<RoomMode>,
}

struct Stopwatch {
    stages: Vec<StageTiming>,
    last: Instant,
}

impl Stopwatch {
    fn new() -> Self {
        Self {
            stages: Vec::new(),
            last: Instant::now(),
        }
    }

    fn lap(&mut self, stage: &str) {
        let now = Instant::now();
        self.stages.push(StageTiming {
            stage: stage.into(),
            ms: (now - self.last).as_secs_f64() * 1e3,
        });
        self.last = now;
    }
}

const NO_GEOMETRY: &str = "room geometry not provided";

/// Runs preprocessing, broadband and octave-band decay, energy ratios,
/// spectral views, spatial metrics, wellness and compliance.
///
/// Only an unusable signal is an error; metrics that cannot be computed
/// are recorded with a reason.
pub fn analyze(rir: &ImpulseResponse, source: &str, options: &AnalyzeOptions) -> Result<Analysis> {
    let started = Instant::now();
    let mut watch = Stopwatch::new();

    let (processed, pre) = preprocess(rir)?;
    let mono = if processed.num_channels() == 1 {
        processed.clone()
    } else {
        to_mono(&processed)
    };
    watch.lap("preprocess");

    let edc = schroeder_edc(&mono)?;
    let decay = decay_metrics(&edc);
    let rt60 = match decay.rt60() {
        Some((seconds, estimate)) => Measured::ok(Rt60Summary {
            seconds,
            estimate: estimate.into(),
        }),
        None => Measured::missing(format!(
            "neither T30 nor T20 available: {}",
            decay.t20.reason.as_deref().unwrap_or("unknown")
        )),
    };
    let rt60_s = rt60.value.as_ref().map(|r| r.seconds);
    let c80 = clarity_c80(&mono)?;
    let d50 = definition_d50(&mono)?;
    let direct = drr(&mono)?;
    let snr = match options.snr_db {
        Some(snr_db) => SnrEstimate {
            snr_db,
            source: SnrSource::UserSupplied,
        },
        None => estimate_snr(&mono)?,
    };
    let sti_inputs = rt60_s.map(|rt60_s| StiInputs {
        rt60_s,
        snr_db: snr.snr_db,
        snr_source: snr.source,
    });
    let sti = StiReport {
        value: match &sti_inputs {
            Some(inputs) => Measured::ok(sti_proxy(inputs)),
            None => Measured::missing("RT60 unavailable"),
        },
        inputs: sti_inputs,
    };
    let sti_value = sti.value.value;
    watch.lap("broadband");

    let octave = octave_band_analysis(&mono)?;
    watch.lap("octave");

    let spectrum = magnitude_spectrum(&mono, Smoothing::None);
    let smoothed_spectrum = magnitude_spectrum(&mono, Smoothing::SixthOctave).ok();
    let grid = spectrogram(&mono, options.window_s, options.hop_s);
    let spectral = match (&spectrum, &grid) {
        (Ok(s), Ok(g)) => {
            let (k, _) = s
                .magnitude_db
                .iter()
                .enumerate()
                .skip(1)
                .fold((0, f64::NEG_INFINITY), |(bk, bv), (k, &v)| if v > bv { (k, v) } else { (bk, bv) });
            Measured::ok(SpectralSummary {
                fft_len: s.fft_len,
                peak_hz: s.freqs_hz[k],
                window_s: options.window_s,
                hop_s: options.hop_s,
                spectrogram_frames: g.times_s.len(),
            })
        }
        (Err(e), _) | (_, Err(e)) => Measured::missing(e.to_string()),
    };
    watch.lap("spectral");

    let iacc_value = if processed.num_channels() == 2 {
        Measured::from_result(iacc(&processed, options.iacc_limit_s))
    } else {
        Measured::missing("mono input; IACC needs two channels")
    };
    let volume = options.volume_m3.or(options.geometry.map(|g| g.volume()));
    let (modes, modes_summary, reflections) = match &options.geometry {
        Some(geom) => {
            let modes = room_modes(geom, options.modes_max_hz);
            let [axial, tangential, oblique] = mode_counts(&modes);
            let summary = ModesSummary {
                f_max_hz: options.modes_max_hz,
                total: modes.len(),
                axial,
                tangential,
                oblique,
                lowest: modes.iter().take(LOWEST_MODES).copied().collect(),
            };
            (modes, Measured::ok(summary), Measured::ok(first_order_reflections(geom)))
        }
        None => (Vec::new(), Measured::missing(NO_GEOMETRY), Measured::missing(NO_GEOMETRY)),
    };
    let schroeder = match (rt60_s, volume) {
        (Some(t), Some(v)) => Measured::ok(SchroederReport {
            hz: schroeder_frequency(t, v, options.schroeder_formula),
            formula: options.schroeder_formula,
            expression: options.schroeder_formula.label().into(),
        }),
        (None, _) => Measured::missing("RT60 unavailable"),
        (_, None) => Measured::missing("room volume not provided"),
    };
    let spatial = SpatialReport {
        iacc: iacc_value,
        iacc_limit_s: options.iacc_limit_s,
        geometry: options.geometry,
        volume_m3: volume,
        modes: modes_summary,
        schroeder,
        reflections,
    };
    watch.lap("spatial");

    let (volume_source, volume_m3, mut notes) = match (options.volume_m3, options.geometry) {
        (Some(v), _) => (VolumeSource::UserSupplied, v, Vec::new()),
        (None, Some(g)) => (VolumeSource::Geometry, g.volume(), Vec::new()),
        (None, None) => (
            VolumeSource::Assumed,
            NEUTRAL_VOLUME_M3,
            vec!["room volume not provided; volume adjustment taken as 1".to_string()],
        ),
    };
    let wellness_inputs = match (rt60_s, sti_value) {
        (Some(rt60_s), Some(sti)) => Some(WellnessInputs {
            rt60_s,
            sti,
            d50,
            c80_db: c80.db,
            volume_m3,
        }),
        _ => None,
    };
    if let Some(inputs) = &wellness_inputs {
        notes.push(format!("volume adjustment {:.3}", volume_adjustment(inputs.volume_m3)));
    }
    let wellness = WellnessReport {
        score: match &wellness_inputs {
            Some(inputs) => Measured::ok(wellness_score(inputs)),
            None => Measured::missing("RT60 unavailable"),
        },
        inputs: wellness_inputs,
        volume_source,
        notes,
    };
    watch.lap("wellness");

    let compliance_metrics = ComplianceMetrics {
        rt60_s,
        rt60_estimate: rt60.value.as_ref().map(|r| r.estimate.clone()),
        sti: sti_value,
    };
    let compliance: Vec<ComplianceRow> = check_all(&compliance_metrics)
        .into_iter()
        .map(ComplianceRow::from)
        .collect();
    watch.lap("compliance");

    let fingerprint = Fingerprint {
        clarity: ((c80.db + 2.0) / 10.0).clamp(0.0, 1.0),
        definition: d50.clamp(0.0, 1.0),
        spatial: match spatial.iacc.value {
            Some(v) => Measured::ok((1.0 - v).clamp(0.0, 1.0)),
            None => Measured::missing("mono input"),
        },
        intelligibility: match sti_value {
            Some(v) => Measured::ok(v.clamp(0.0, 1.0)),
            None => Measured::missing("STI unavailable"),
        },
    };

    let report = MetricsReport {
        schema_version: SCHEMA_VERSION.into(),
        source: source.into(),
        input: InputInfo {
            channels: rir.num_channels(),
            sample_rate: rir.sample_rate(),
            samples: rir.len(),
            duration_s: rir.duration_s(),
        },
        preprocess: pre,
        broadband: Broadband {
            decay,
            rt60,
            c80_db: c80,
            d50,
            drr_db: direct,
            snr,
            sti,
        },
        octave_bands: octave.bands,
        omitted_bands: octave.omitted,
        spectral,
        spatial,
        wellness,
        compliance,
        fingerprint,
        timings_ms: Timings {
            stages: watch.stages,
            total_ms: started.elapsed().as_secs_f64() * 1e3,
        },
    };
    Ok(Analysis {
        report,
        processed,
        mono,
        edc,
        spectrum: spectrum.ok(),
        smoothed_spectrum,
        spectrogram: grid.ok(),
        modes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::{simulate_ism, SimulationConfig, TailModel};

    fn classroom() -> SimulationConfig {
        SimulationConfig {
            geom: RoomGeometry::new([9.0, 7.0, 3.0], [2.0, 3.5, 1.5], [6.5, 2.5, 1.2]).unwrap(),
            absorption: [0.3, 0.3, 0.3, 0.3, 0.2, 0.6],
            max_order: 10,
            sample_rate: 48_000,
            tail: TailModel::ExponentialNoise,
            seed: 3,
        }
    }

    #[test]
    fn simulated_classroom_with_geometry() {
        let c = classroom();
        let rir = simulate_ism(&c).unwrap();
        let options = AnalyzeOptions {
            geometry: Some(c.geom),
            ..AnalyzeOptions::default()
        };
        let a = analyze(&rir, "sim", &options).unwrap();
        let r = &a.report;
        assert_eq!(r.octave_bands.len(), 6);
        assert!(r.spatial.modes.value.as_ref().unwrap().total >= 1);
        assert_eq!(r.compliance.len(), 10);
        assert_eq!(r.spatial.reflections.value.as_ref().unwrap().reflections.len(), 6);
        assert!(r.wellness.score.value.is_some());
        assert_eq!(r.wellness.volume_source, VolumeSource::Geometry);
        assert!(r.fingerprint.spatial.value.is_none());
        for v in [r.fingerprint.clarity, r.fingerprint.definition, r.fingerprint.intelligibility.value.unwrap()] {
            assert!((0.0..=1.0).contains(&v));
        }
        let stage_sum: f64 = r.timings_ms.stages.iter().map(|s| s.ms).sum();
        assert!(r.timings_ms.stages.iter().all(|s| s.ms >= 0.0));
        assert!((r.timings_ms.total_ms - stage_sum).abs() < 5.0);
    }

    #[test]
    fn without_geometry_marks_spatial_unavailable() {
        let rir = simulate_ism(&classroom()).unwrap();
        let a = analyze(&rir, "sim", &AnalyzeOptions::default()).unwrap();
        let s = &a.report.spatial;
        assert_eq!(s.modes.reason.as_deref(), Some(NO_GEOMETRY));
        assert_eq!(s.reflections.reason.as_deref(), Some(NO_GEOMETRY));
        assert_eq!(a.report.wellness.volume_source, VolumeSource::Assumed);
        let json = a.report.to_json().unwrap();
        assert_eq!(MetricsReport::from_json(&json).unwrap(), a.report);
    }

    #[test]
    fn stereo_input_reports_iacc() {
        let rir = simulate_ism(&classroom()).unwrap();
        let h = rir.channel(0).to_vec();
        let mut shifted = vec![0.0; 5];
        shifted.extend_from_slice(&h[..h.len() - 5]);
        let stereo = ImpulseResponse::stereo(h, shifted, 48_000).unwrap();
        let a = analyze(&stereo, "stereo", &AnalyzeOptions::default()).unwrap();
        let iacc = a.report.spatial.iacc.value.unwrap();
        assert!(iacc > 0.9);
        assert!((a.report.fingerprint.spatial.value.unwrap() - (1.0 - iacc)).abs() < 1e-12);
    }

    #[test]
    fn user_snr_is_recorded() {
        let rir = simulate_ism(&classroom()).unwrap();
        let options = AnalyzeOptions {
            snr_db: Some(25.0),
            ..AnalyzeOptions::default()
        };
        let a = analyze(&rir, "sim", &options).unwrap();
        let inputs = a.report.broadband.sti.inputs.unwrap();
        assert_eq!(inputs.snr_db, 25.0);
        assert_eq!(inputs.snr_source, SnrSource::UserSupplied);
    }

    #[test]
    fn silence_is_an_error() {
        let rir = ImpulseResponse::mono(vec![0.0; 1000], 48_000).unwrap();
        assert!(analyze(&rir, "zeros", &AnalyzeOptions::default()).is_err());
    }
}
