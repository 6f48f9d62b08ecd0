//! The sampled impulse response and the preprocessing pipeline applied
//! before any analysis: leading-silence trim, 10 s truncation, and peak
//! normalization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shortest signal any analysis will accept, per channel.
pub const MIN_SAMPLES: usize = 16;

/// Leading samples below this fraction of the peak are trimmed.
pub const TRIM_THRESHOLD: f64 = 1e-4;

/// Longest response kept by [`preprocess`], in seconds.
pub const MAX_DURATION_S: f64 = 10.0;

/// A sampled impulse response with one or two channels of equal length.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpulseResponse {
    channels: Vec<Vec<f64>>,
    sample_rate: u32,
}

impl ImpulseResponse {
    /// Builds a response from per-channel sample vectors.
    ///
    /// Fails unless there are one or two channels of equal length, each with
    /// at least [`MIN_SAMPLES`] finite samples, and `sample_rate > 0`.
    pub fn new(channels: Vec<Vec<f64>>, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::InvalidSignal("sample rate must be positive".into()));
        }
        if channels.is_empty() || channels.len() > 2 {
            return Err(Error::ChannelCount {
                expected: 2,
                actual: channels.len(),
            });
        }
        let len = channels[0].len();
        if channels.iter().any(|c| c.len() != len) {
            return Err(Error::InvalidSignal(
                "all channels must have equal length".into(),
            ));
        }
        if len < MIN_SAMPLES {
            return Err(Error::TooShort {
                required: MIN_SAMPLES,
                actual: len,
            });
        }
        if channels.iter().flatten().any(|s| !s.is_finite()) {
            return Err(Error::InvalidSignal("samples must be finite".into()));
        }
        Ok(Self {
            channels,
            sample_rate,
        })
    }

    pub fn mono(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        Self::new(vec![samples], sample_rate)
    }

    pub fn stereo(left: Vec<f64>, right: Vec<f64>, sample_rate: u32) -> Result<Self> {
        Self::new(vec![left, right], sample_rate)
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn num_channels(&self) -> usize {
        self.channels.len()
    }

    /// Samples per channel.
    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn duration_s(&self) -> f64 {
        self.len() as f64 / self.sample_rate as f64
    }

    pub fn channel(&self, index: usize) -> &[f64] {
        &self.channels[index]
    }

    pub fn channels(&self) -> &[Vec<f64>] {
        &self.channels
    }

    pub fn into_channels(self) -> Vec<Vec<f64>> {
        self.channels
    }

    /// The single channel of a mono response.
    pub fn mono_samples(&self) -> Result<&[f64]> {
        if self.channels.len() != 1 {
            return Err(Error::ChannelCount {
                expected: 1,
                actual: self.channels.len(),
            });
        }
        Ok(&self.channels[0])
    }

    /// Largest absolute sample value across all channels.
    pub fn peak(&self) -> f64 {
        self.channels
            .iter()
            .flatten()
            .fold(0.0_f64, |m, s| m.max(s.abs()))
    }

    /// Sum of squared samples over all channels.
    pub fn energy(&self) -> f64 {
        self.channels.iter().flatten().map(|s| s * s).sum()
    }

    /// Same channels multiplied by `gain`.
    pub fn scaled(&self, gain: f64) -> Result<Self> {
        let channels = self
            .channels
            .iter()
            .map(|c| c.iter().map(|s| s * gain).collect())
            .collect();
        Self::new(channels, self.sample_rate)
    }
}

/// Averages the channels into one. Mono input is returned unchanged.
pub fn to_mono(rir: &ImpulseResponse) -> ImpulseResponse {
    if rir.num_channels() == 1 {
        return rir.clone();
    }
    let (left, right) = (rir.channel(0), rir.channel(1));
    let mixed = left
        .iter()
        .zip(right)
        .map(|(l, r)| 0.5 * (l + r))
        .collect();
    ImpulseResponse {
        channels: vec![mixed],
        sample_rate: rir.sample_rate,
    }
}

/// What [`preprocess`] did to its input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprocessReport {
    pub samples_trimmed_leading: usize,
    pub truncated: bool,
    pub peak_before_normalize: f64,
    pub original_sample_rate: u32,
    pub original_length: usize,
}

/// Trims leading silence, truncates to [`MAX_DURATION_S`], and normalizes
/// the joint peak of all channels to 1.0.
///
/// Trimming removes every sample strictly before the first one (in any
/// channel) whose magnitude reaches `TRIM_THRESHOLD * peak`. Trailing
/// samples are never trimmed. The operation is idempotent.
pub fn preprocess(rir: &ImpulseResponse) -> Result<(ImpulseResponse, PreprocessReport)> {
    let peak = rir.peak();
    if peak <= 0.0 {
        return Err(Error::DegenerateInput("signal is all zeros".into()));
    }
    let threshold = TRIM_THRESHOLD * peak;
    let start = (0..rir.len())
        .find(|&n| rir.channels.iter().any(|c| c[n].abs() >= threshold))
        .expect("peak sample always crosses the threshold");

    let max_len = (MAX_DURATION_S * rir.sample_rate as f64).round() as usize;
    let kept = rir.len() - start;
    let truncated = kept > max_len;
    let end = start + kept.min(max_len);
    if end - start < MIN_SAMPLES {
        return Err(Error::DegenerateInput(format!(
            "only {} samples remain after trimming",
            end - start
        )));
    }

    let window: Vec<&[f64]> = rir.channels.iter().map(|c| &c[start..end]).collect();
    let kept_peak = window
        .iter()
        .flat_map(|c| c.iter())
        .fold(0.0_f64, |m, s| m.max(s.abs()));
    let channels = window
        .iter()
        .map(|c| c.iter().map(|s| s / kept_peak).collect())
        .collect();

    let report = PreprocessReport {
        samples_trimmed_leading: start,
        truncated,
        peak_before_normalize: kept_peak,
        original_sample_rate: rir.sample_rate,
        original_length: rir.len(),
    };
    Ok((
        ImpulseResponse {
            channels,
            sample_rate: rir.sample_rate,
        },
        report,
    ))
}
