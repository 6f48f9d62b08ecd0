//! The aggregate metrics report, the pipeline that fills it, and its
//! Markdown, CSV and JSON renderings.

mod export;
mod markdown;
mod pipeline;

pub use export::{emit, EmitFormat, EmitKind, EmitRequest};
pub use markdown::render_markdown;
pub use pipeline::{analyze, Analysis, AnalyzeOptions};

use serde::{Deserialize, Serialize};

use crate::compliance::{ComplianceMetrics, ComplianceOutcome, Verdict};
use crate::decay::DecayMetrics;
use crate::energy::{LevelRatio, SnrEstimate, StiInputs, WellnessInputs};
use crate::error::{Error, Result};
use crate::geometry::RoomGeometry;
use crate::octave::{OctaveBandResult, OmittedBand};
use crate::signal::PreprocessReport;
use crate::spatial::{FirstOrderPaths, RoomMode, SchroederFormula};

pub const SCHEMA_VERSION: &str = "1";

/// A value, or the reason it could not be computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measured<T> {
    pub value: Option<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl<T> Measured<T> {
    pub fn ok(value: T) -> Self {
        Self {
            value: Some(value),
            reason: None,
        }
    }

    pub fn missing(reason: impl Into<String>) -> Self {
        Self {
            value: None,
            reason: Some(reason.into()),
        }
    }

    pub fn from_result(r: Result<T>) -> Self {
        match r {
            Ok(v) => Self::ok(v),
            Err(e) => Self::missing(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputInfo {
    pub channels: usize,
    pub sample_rate: u32,
    pub samples: usize,
    pub duration_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rt60Summary {
    pub seconds: f64,
    /// "T30" or "T20".
    pub estimate: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StiReport {
    pub value: Measured<f64>,
    pub inputs: Option<StiInputs>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Broadband {
    pub decay: DecayMetrics,
    pub rt60: Measured<Rt60Summary>,
    pub c80_db: LevelRatio,
    pub d50: f64,
    pub drr_db: LevelRatio,
    pub snr: SnrEstimate,
    pub sti: StiReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub fft_len: usize,
    pub peak_hz: f64,
    pub window_s: f64,
    pub hop_s: f64,
    pub spectrogram_frames: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModesSummary {
    pub f_max_hz: f64,
    pub total: usize,
    pub axial: usize,
    pub tangential: usize,
    pub oblique: usize,
    pub lowest: Vec<RoomMode>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchroederReport {
    pub hz: f64,
    pub formula: SchroederFormula,
    pub expression: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialReport {
    pub iacc: Measured<f64>,
    pub iacc_limit_s: f64,
    pub geometry: Option<RoomGeometry>,
    pub volume_m3: Option<f64>,
    pub modes: Measured<ModesSummary>,
    pub schroeder: Measured<SchroederReport>,
    pub reflections: Measured<FirstOrderPaths>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VolumeSource {
    Geometry,
    UserSupplied,
    /// No volume known; the volume adjustment is taken as 1.
    Assumed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WellnessReport {
    pub score: Measured<f64>,
    pub inputs: Option<WellnessInputs>,
    pub volume_source: VolumeSource,
    #[serde(default)]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub rt60_min_s: Option<f64>,
    pub rt60_max_s: Option<f64>,
    pub sti_min: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PassFlags {
    pub rt60: Option<bool>,
    pub sti: Option<bool>,
    pub overall: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplianceRow {
    pub space_type: String,
    pub standard: Option<String>,
    pub thresholds: Thresholds,
    pub measured: ComplianceMetrics,
    pub pass: PassFlags,
    pub advisory: Vec<String>,
}

impl From<ComplianceOutcome> for ComplianceRow {
    fn from(o: ComplianceOutcome) -> Self {
        Self {
            space_type: o.rule.space_type,
            standard: o.rule.standard,
            thresholds: Thresholds {
                rt60_min_s: o.rule.rt60_min_s,
                rt60_max_s: o.rule.rt60_max_s,
                sti_min: o.rule.sti_min,
            },
            measured: o.measured,
            pass: PassFlags {
                rt60: o.rt60_pass,
                sti: o.sti_pass,
                overall: o.overall,
            },
            advisory: o.advisory_flags,
        }
    }
}

/// Radar-chart axes, each scaled to `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fingerprint {
    pub clarity: f64,
    pub definition: f64,
    pub spatial: Measured<f64>,
    pub intelligibility: Measured<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub stages: Vec<StageTiming>,
    pub total_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsReport {
    pub schema_version: String,
    pub source: String,
    pub input: InputInfo,
    pub preprocess: PreprocessReport,
    pub broadband: Broadband,
    pub octave_bands: Vec<OctaveBandResult>,
    pub omitted_bands: Vec<OmittedBand>,
    pub spectral: Measured<SpectralSummary>,
    pub spatial: SpatialReport,
    pub wellness: WellnessReport,
    pub compliance: Vec<ComplianceRow>,
    pub fingerprint: Fingerprint,
    pub timings_ms: Timings,
}

impl MetricsReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Parses a report, rejecting other schema versions and shapes.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Schema(format!("not JSON: {e}")))?;
        match value.get("schema_version").and_then(|v| v.as_str()) {
            Some(SCHEMA_VERSION) => {}
            Some(other) => {
                return Err(Error::Schema(format!(
                    "schema_version {other:?}, expected {SCHEMA_VERSION:?}"
                )))
            }
            None => return Err(Error::Schema("schema_version missing".into())),
        }
        serde_json::from_value(value).map_err(|e| Error::Schema(e.to_string()))
    }
}
