//! Magnitude spectrum, STFT spectrogram, and cumulative spectral decay.

use std::f64::consts::PI;

use realfft::num_complex::Complex64;
use realfft::RealFftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::ImpulseResponse;
use crate::stats::next_pow2;

/// Lowest level reported, in dB.
pub const SPECTRAL_FLOOR_DB: f64 = -140.0;

pub const MIN_SPECTRUM_SAMPLES: usize = 64;
pub const MIN_WATERFALL_SAMPLES: usize = 256;
pub const DEFAULT_WINDOW_S: f64 = 0.025;
pub const DEFAULT_HOP_S: f64 = 0.010;
pub const DEFAULT_WATERFALL_SLICES: usize = 40;

/// Fade-in applied to every waterfall slice after the first, seconds.
pub const WATERFALL_FADE_S: f64 = 0.001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Smoothing {
    #[default]
    None,
    /// Moving average of dB values over +/- 1/12 octave around each bin.
    SixthOctave,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumFrame {
    pub freqs_hz: Vec<f64>,
    pub magnitude_db: Vec<f64>,
    pub fft_len: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeFrequencyGrid {
    pub times_s: Vec<f64>,
    pub freqs_hz: Vec<f64>,
    /// One row per time, one column per frequency.
    pub magnitude_db: Vec<Vec<f64>>,
}

fn to_db(c: Complex64) -> f64 {
    let m = c.norm();
    if m > 0.0 {
        (20.0 * m.log10()).max(SPECTRAL_FLOOR_DB)
    } else {
        SPECTRAL_FLOOR_DB
    }
}

fn bin_freqs(fft_len: usize, sample_rate: u32) -> Vec<f64> {
    let df = sample_rate as f64 / fft_len as f64;
    (0..=fft_len / 2).map(|k| k as f64 * df).collect()
}

/// Complex one-sided spectrum of `x` zero-padded to `fft_len`.
pub(crate) fn rfft(planner: &mut RealFftPlanner<f64>, x: &[f64], fft_len: usize) -> Vec<Complex64> {
    let plan = planner.plan_fft_forward(fft_len);
    let mut input = plan.make_input_vec();
    input[..x.len()].copy_from_slice(x);
    let mut out = plan.make_output_vec();
    plan.process(&mut input, &mut out).expect("buffer sizes come from the plan");
    out
}

fn smooth_sixth_octave(freqs: &[f64], db: &[f64]) -> Vec<f64> {
    if freqs.len() < 2 {
        return db.to_vec();
    }
    let df = freqs[1] - freqs[0];
    let mut prefix = vec![0.0; db.len() + 1];
    for (i, v) in db.iter().enumerate() {
        prefix[i + 1] = prefix[i] + v;
    }
    let last = db.len() - 1;
    let ratio = 2f64.powf(1.0 / 12.0);
    db.iter()
        .enumerate()
        .map(|(k, &v)| {
            if k == 0 {
                return v;
            }
            let f = freqs[k];
            let lo = ((f / ratio / df).ceil() as usize).clamp(1, k);
            let hi = ((f * ratio / df).floor() as usize).clamp(k, last);
            (prefix[hi + 1] - prefix[lo]) / (hi + 1 - lo) as f64
        })
        .collect()
}

/// dB magnitude of one FFT over the whole response, zero-padded to the next
/// power of two.
pub fn magnitude_spectrum(rir: &ImpulseResponse, smoothing: Smoothing) -> Result<SpectrumFrame> {
    let h = rir.mono_samples()?;
    if h.len() < MIN_SPECTRUM_SAMPLES {
        return Err(Error::TooShort {
            required: MIN_SPECTRUM_SAMPLES,
            actual: h.len(),
        });
    }
    let fft_len = next_pow2(h.len());
    let mut planner = RealFftPlanner::new();
    let db: Vec<f64> = rfft(&mut planner, h, fft_len).into_iter().map(to_db).collect();
    let freqs_hz = bin_freqs(fft_len, rir.sample_rate());
    let magnitude_db = match smoothing {
        Smoothing::None => db,
        Smoothing::SixthOctave => smooth_sixth_octave(&freqs_hz, &db),
    };
    Ok(SpectrumFrame {
        freqs_hz,
        magnitude_db,
        fft_len,
    })
}

/// Periodic Hann window.
fn hann(len: usize) -> Vec<f64> {
    (0..len)
        .map(|n| 0.5 - 0.5 * (2.0 * PI * n as f64 / len as f64).cos())
        .collect()
}

/// Hann-windowed STFT magnitude in dB. Frames start at multiples of the
/// hop and are reported at their centers; partial trailing frames are
/// dropped.
pub fn spectrogram(rir: &ImpulseResponse, window_s: f64, hop_s: f64) -> Result<TimeFrequencyGrid> {
    let h = rir.mono_samples()?;
    if !(window_s > 0.0 && hop_s > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "window and hop must be positive, got {window_s} s and {hop_s} s"
        )));
    }
    let fs = rir.sample_rate() as f64;
    let win_len = ((window_s * fs).round() as usize).max(2);
    let hop = ((hop_s * fs).round() as usize).max(1);
    if h.len() < win_len {
        return Err(Error::TooShort {
            required: win_len,
            actual: h.len(),
        });
    }
    let fft_len = next_pow2(win_len);
    let window = hann(win_len);
    let mut planner = RealFftPlanner::new();
    let mut frame = vec![0.0; win_len];
    let mut times_s = Vec::new();
    let mut rows = Vec::new();
    let mut start = 0;
    while start + win_len <= h.len() {
        for ((f, x), w) in frame.iter_mut().zip(&h[start..]).zip(&window) {
            *f = x * w;
        }
        rows.push(rfft(&mut planner, &frame, fft_len).into_iter().map(to_db).collect());
        times_s.push((start as f64 + win_len as f64 / 2.0) / fs);
        start += hop;
    }
    Ok(TimeFrequencyGrid {
        times_s,
        freqs_hz: bin_freqs(fft_len, rir.sample_rate()),
        magnitude_db: rows,
    })
}

/// Cumulative spectral decay. Slice `k` is the spectrum of the response
/// from offset `k * duration / n_slices` onward, faded in over 1 ms (slice
/// 0 is left untouched). All slices share the FFT length of the full
/// response so their bins line up.
pub fn waterfall(rir: &ImpulseResponse, n_slices: usize) -> Result<TimeFrequencyGrid> {
    let h = rir.mono_samples()?;
    if h.len() < MIN_WATERFALL_SAMPLES {
        return Err(Error::TooShort {
            required: MIN_WATERFALL_SAMPLES,
            actual: h.len(),
        });
    }
    if n_slices == 0 {
        return Err(Error::InvalidArgument("waterfall needs at least one slice".into()));
    }
    let fs = rir.sample_rate() as f64;
    let n = h.len();
    let fft_len = next_pow2(n);
    let fade_len = ((WATERFALL_FADE_S * fs).round() as usize).max(1);
    let fade: Vec<f64> = hann(2 * fade_len)[..fade_len].to_vec();
    let mut planner = RealFftPlanner::new();
    let mut times_s = Vec::with_capacity(n_slices);
    let mut rows = Vec::with_capacity(n_slices);
    for k in 0..n_slices {
        let offset = ((k as f64 * n as f64 / n_slices as f64).round() as usize).min(n - 1);
        let mut seg = h[offset..].to_vec();
        if k > 0 {
            for (s, w) in seg.iter_mut().zip(&fade) {
                *s *= w;
            }
        }
        rows.push(rfft(&mut planner, &seg, fft_len).into_iter().map(to_db).collect());
        times_s.push(offset as f64 / fs);
    }
    Ok(TimeFrequencyGrid {
        times_s,
        freqs_hz: bin_freqs(fft_len, rir.sample_rate()),
        magnitude_db: rows,
    })
}
