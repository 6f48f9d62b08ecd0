//! Butterworth bandpass design as a cascade of second-order sections.
//!
//! The analog lowpass prototype of order `N` is mapped to a bandpass with
//! the lowpass-to-bandpass substitution `s -> (s^2 + w0^2) / (s * bw)`,
//! using band edges prewarped for the bilinear transform. Each prototype
//! pole yields two bandpass poles; every bandpass pole is paired with its
//! conjugate into one biquad with zeros at DC and Nyquist. Each section is
//! scaled to unit gain at the digital center frequency.

use std::f64::consts::PI;

use realfft::num_complex::Complex64;

/// One biquad, `b0 + b1 z^-1 + b2 z^-2` over `1 + a1 z^-1 + a2 z^-2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub b: [f64; 3],
    pub a: [f64; 2],
}

impl Biquad {
    /// Complex frequency response at normalized angular frequency `w`.
    pub fn response(&self, w: f64) -> Complex64 {
        let z1 = Complex64::from_polar(1.0, -w);
        let z2 = z1 * z1;
        let num = self.b[0] + z1 * self.b[1] + z2 * self.b[2];
        let den = 1.0 + z1 * self.a[0] + z2 * self.a[1];
        num / den
    }
}

/// Cascade of biquads applied with transposed direct form II state.
#[derive(Debug, Clone, PartialEq)]
pub struct SosFilter {
    pub sections: Vec<Biquad>,
}

impl SosFilter {
    /// Butterworth bandpass with prototype order `order` (even), giving
    /// `order` sections and `2 * order` poles overall.
    pub fn butterworth_bandpass(order: usize, low_hz: f64, high_hz: f64, sample_rate: f64) -> Self {
        assert!(order >= 2 && order.is_multiple_of(2), "prototype order must be even");
        assert!(0.0 < low_hz && low_hz < high_hz && high_hz < sample_rate / 2.0);

        let fs2 = 2.0 * sample_rate;
        let w_low = fs2 * (PI * low_hz / sample_rate).tan();
        let w_high = fs2 * (PI * high_hz / sample_rate).tan();
        let bw = w_high - w_low;
        let w0_sq = w_low * w_high;
        let center = 2.0 * (w0_sq.sqrt() / fs2).atan();

        let mut sections = Vec::with_capacity(order);
        for k in 0..order / 2 {
            let theta = PI * (2 * k + order + 1) as f64 / (2 * order) as f64;
            let proto = Complex64::from_polar(1.0, theta);
            let pb = proto * bw;
            let disc = (pb * pb - 4.0 * w0_sq).sqrt();
            for analog in [(pb + disc) / 2.0, (pb - disc) / 2.0] {
                let z = (fs2 + analog) / (fs2 - analog);
                let mut sec = Biquad {
                    b: [1.0, 0.0, -1.0],
                    a: [-2.0 * z.re, z.norm_sqr()],
                };
                let gain = sec.response(center).norm();
                sec.b = [1.0 / gain, 0.0, -1.0 / gain];
                sections.push(sec);
            }
        }
        Self { sections }
    }

    pub fn response(&self, w: f64) -> Complex64 {
        self.sections
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, s| acc * s.response(w))
    }

    /// Magnitude response in dB at `freq_hz`.
    pub fn magnitude_db(&self, freq_hz: f64, sample_rate: f64) -> f64 {
        20.0 * self.response(2.0 * PI * freq_hz / sample_rate).norm().log10()
    }

    /// Causal, single-pass filtering from zero initial state.
    pub fn apply(&self, input: &[f64]) -> Vec<f64> {
        let mut out = input.to_vec();
        for s in &self.sections {
            let (mut z1, mut z2) = (0.0, 0.0);
            for v in out.iter_mut() {
                let x = *v;
                let y = s.b[0] * x + z1;
                z1 = s.b[1] * x - s.a[0] * y + z2;
                z2 = s.b[2] * x - s.a[1] * y;
                *v = y;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stable_poles_and_unit_center_gain() {
        for &(lo, hi) in &[(88.4, 176.8), (707.1, 1414.2), (2828.4, 5656.9)] {
            let f = SosFilter::butterworth_bandpass(4, lo, hi, 48_000.0);
            assert_eq!(f.sections.len(), 4);
            for s in &f.sections {
                // |pole|^2 = a2 < 1 for a complex pair inside the unit circle.
                assert!(s.a[1] < 1.0 && s.a[1] > 0.0);
            }
            let center = (lo * hi).sqrt();
            assert!(f.magnitude_db(center, 48_000.0).abs() < 1e-6);
        }
    }

    #[test]
    fn edges_are_half_power() {
        let f = SosFilter::butterworth_bandpass(4, 707.1, 1414.2, 48_000.0);
        for edge in [707.1, 1414.2] {
            let db = f.magnitude_db(edge, 48_000.0);
            assert!((db + 3.0103).abs() < 0.01, "{edge}: {db}");
        }
    }

    #[test]
    fn rolloff_matches_eighth_order_bandpass() {
        // Analog Butterworth bandpass magnitude: 1 / sqrt(1 + Q^(2N)),
        // Q = (w^2 - w0^2) / (w * bw), evaluated on prewarped frequencies.
        let fs = 48_000.0;
        let (lo, hi) = (707.1, 1414.2);
        let f = SosFilter::butterworth_bandpass(4, lo, hi, fs);
        let warp = |hz: f64| 2.0 * fs * (PI * hz / fs).tan();
        let (wl, wh) = (warp(lo), warp(hi));
        for hz in [250.0, 500.0, 2000.0, 4000.0, 8000.0] {
            let w = warp(hz);
            let q = (w * w - wl * wh) / (w * (wh - wl));
            let want = -10.0 * (1.0 + q.powi(8)).log10();
            let got = f.magnitude_db(hz, fs);
            assert!((got - want).abs() < 1e-6, "{hz}: {got} vs {want}");
        }
    }

    #[test]
    fn apply_matches_impulse_of_cascade() {
        let f = SosFilter::butterworth_bandpass(2, 500.0, 1000.0, 8000.0);
        let mut x = vec![0.0; 8];
        x[0] = 1.0;
        let y = f.apply(&x);
        // First output sample is the product of the b0 coefficients.
        let b0: f64 = f.sections.iter().map(|s| s.b[0]).product();
        assert!((y[0] - b0).abs() < 1e-15);
    }
}
