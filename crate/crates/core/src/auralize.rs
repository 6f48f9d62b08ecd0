//! Offline convolution of dry audio with a room impulse response.

use realfft::RealFftPlanner;

use crate::error::{Error, Result};
use crate::signal::ImpulseResponse;
use crate::spectral::rfft;
use crate::stats::next_pow2;

/// Peak level of the convolved output.
pub const OUTPUT_PEAK: f64 = 0.95;

/// Full linear convolution through one zero-padded FFT.
pub fn fft_convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let out_len = a.len() + b.len() - 1;
    let n = next_pow2(out_len);
    let mut planner = RealFftPlanner::new();
    let fa = rfft(&mut planner, a, n);
    let fb = rfft(&mut planner, b, n);
    let mut product: Vec<_> = fa.iter().zip(&fb).map(|(x, y)| x * y).collect();
    // Both ends of a real spectrum are real; drop rounding residue.
    product[0].im = 0.0;
    let last = product.len() - 1;
    product[last].im = 0.0;
    let inverse = planner.plan_fft_inverse(n);
    let mut out = inverse.make_output_vec();
    inverse
        .process(&mut product, &mut out)
        .expect("buffer sizes come from the plan");
    out.truncate(out_len);
    let scale = 1.0 / n as f64;
    out.iter_mut().for_each(|s| *s *= scale);
    out
}

/// Linear-interpolation resampler. Adequate for impulse responses whose
/// energy sits well below both Nyquist frequencies; it neither band-limits
/// nor compensates the interpolation droop.
pub fn resample_linear(x: &[f64], from_hz: u32, to_hz: u32) -> Vec<f64> {
    if from_hz == to_hz || x.is_empty() {
        return x.to_vec();
    }
    let ratio = from_hz as f64 / to_hz as f64;
    let out_len = ((x.len() as f64) / ratio).ceil().max(1.0) as usize;
    (0..out_len)
        .map(|m| {
            let pos = m as f64 * ratio;
            let i = pos.floor() as usize;
            let frac = pos - i as f64;
            let a = x.get(i).copied().unwrap_or(0.0);
            let b = x.get(i + 1).copied().unwrap_or(0.0);
            a + (b - a) * frac
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Auralization {
    /// Convolved audio at the dry signal's rate, peak `OUTPUT_PEAK`.
    pub output: ImpulseResponse,
    /// Gain applied to reach the output peak.
    pub gain: f64,
    /// Set when the response was resampled to the dry rate.
    pub resampled_from_hz: Option<u32>,
}

/// Convolves every channel of `dry` with the mono `rir` and normalizes the
/// joint peak to 0.95.
pub fn convolve(dry: &ImpulseResponse, rir: &ImpulseResponse) -> Result<Auralization> {
    let h = rir.mono_samples()?;
    if rir.energy() <= 0.0 {
        return Err(Error::DegenerateInput("impulse response has zero energy".into()));
    }
    if dry.energy() <= 0.0 {
        return Err(Error::DegenerateInput("dry signal has zero energy".into()));
    }
    let (h, resampled_from_hz) = if rir.sample_rate() == dry.sample_rate() {
        (h.to_vec(), None)
    } else {
        (
            resample_linear(h, rir.sample_rate(), dry.sample_rate()),
            Some(rir.sample_rate()),
        )
    };
    let wet: Vec<Vec<f64>> = dry.channels().iter().map(|x| fft_convolve(x, &h)).collect();
    let peak = wet.iter().flatten().fold(0.0_f64, |m, s| m.max(s.abs()));
    if peak <= 0.0 {
        return Err(Error::DegenerateInput("convolution produced silence".into()));
    }
    let gain = OUTPUT_PEAK / peak;
    let scaled = wet
        .into_iter()
        .map(|c| c.into_iter().map(|s| s * gain).collect())
        .collect();
    Ok(Auralization {
        output: ImpulseResponse::new(scaled, dry.sample_rate())?,
        gain,
        resampled_from_hz,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn direct(a: &[f64], b: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }

    fn random(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> Vec<f64> {
        (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    #[test]
    fn matches_direct_convolution() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let a = random(&mut rng, 4096);
        let b = random(&mut rng, 1024);
        let fast = fft_convolve(&a, &b);
        let slow = direct(&a, &b);
        let scale = slow.iter().fold(0.0_f64, |m, s| m.max(s.abs()));
        let err = fast.iter().zip(&slow).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
        assert_eq!(fast.len(), 5119);
        assert!(err / scale < 1e-6);
    }

    #[test]
    fn impulse_and_shift() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        let x = random(&mut rng, 500);
        let dry = ImpulseResponse::mono(x.clone(), 48_000).unwrap();
        let peak = x.iter().fold(0.0_f64, |m, s| m.max(s.abs()));

        let mut delta = vec![0.0; 32];
        delta[0] = 1.0;
        let out = convolve(&dry, &ImpulseResponse::mono(delta, 48_000).unwrap()).unwrap();
        assert_eq!(out.output.len(), 531);
        for (y, x) in out.output.channel(0).iter().zip(&x) {
            assert!((y - x * OUTPUT_PEAK / peak).abs() < 1e-9);
        }

        let mut shifted = vec![0.0; 32];
        shifted[7] = 0.3;
        let out = convolve(&dry, &ImpulseResponse::mono(shifted, 48_000).unwrap()).unwrap();
        let y = out.output.channel(0);
        assert!(y[..7].iter().all(|s| s.abs() < 1e-9));
        for (y, x) in y[7..].iter().zip(&x) {
            assert!((y - x * OUTPUT_PEAK / peak).abs() < 1e-9);
        }
    }

    #[test]
    fn stereo_uses_joint_peak() {
        let dry = ImpulseResponse::stereo(vec![0.5; 20], vec![-1.0; 20], 8000).unwrap();
        let mut h = vec![0.0; 16];
        h[0] = 1.0;
        let out = convolve(&dry, &ImpulseResponse::mono(h, 8000).unwrap()).unwrap();
        assert!((out.output.channel(0)[0] - 0.475).abs() < 1e-12);
        assert!((out.output.channel(1)[0] + 0.95).abs() < 1e-12);
        assert!((out.output.peak() - OUTPUT_PEAK).abs() < 1e-12);
    }

    #[test]
    fn resamples_mismatched_rates() {
        let dry = ImpulseResponse::mono(vec![1.0; 64], 48_000).unwrap();
        let mut h = vec![0.0; 100];
        h[10] = 1.0;
        let out = convolve(&dry, &ImpulseResponse::mono(h, 16_000).unwrap()).unwrap();
        assert_eq!(out.resampled_from_hz, Some(16_000));
        assert_eq!(out.output.len(), 64 + 300 - 1);
        assert_eq!(resample_linear(&[0.0, 1.0], 1, 2), vec![0.0, 0.5, 1.0, 0.5]);
    }

    #[test]
    fn zero_rir_is_degenerate() {
        let dry = ImpulseResponse::mono(vec![1.0; 64], 48_000).unwrap();
        let rir = ImpulseResponse::mono(vec![0.0; 64], 48_000).unwrap();
        assert!(matches!(convolve(&dry, &rir), Err(Error::DegenerateInput(_))));
    }
}
