use crate::error::{Error, Result};
use crate::signal::ImpulseResponse;

/// Default integration limit (early IACC), seconds.
pub const EARLY_IACC_LIMIT_S: f64 = 0.080;

/// Largest interaural lag considered, seconds.
pub const MAX_LAG_S: f64 = 0.001;

/// Interaural cross-correlation coefficient: the largest absolute
/// normalized cross-correlation of the two channels over lags up to +/-1 ms.
///
/// Both channels are restricted to `[0, integration_limit_s]` before
/// correlating, so the result always lies in `[0, 1]` and is symmetric in
/// the channels. Lags are whole samples.
pub fn iacc(rir: &ImpulseResponse, integration_limit_s: f64) -> Result<f64> {
    if rir.num_channels() != 2 {
        return Err(Error::ChannelCount {
            expected: 2,
            actual: rir.num_channels(),
        });
    }
    if !(integration_limit_s > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "integration limit must be positive, got {integration_limit_s}"
        )));
    }
    let fs = rir.sample_rate() as f64;
    let n = ((integration_limit_s * fs).round() as usize).clamp(1, rir.len());
    let left = &rir.channel(0)[..n];
    let right = &rir.channel(1)[..n];

    let e_left: f64 = left.iter().map(|s| s * s).sum();
    let e_right: f64 = right.iter().map(|s| s * s).sum();
    if e_left <= 0.0 || e_right <= 0.0 {
        return Err(Error::DegenerateInput(
            "a channel has no energy inside the integration window".into(),
        ));
    }
    let norm = (e_left * e_right).sqrt();

    let max_lag = ((MAX_LAG_S * fs).floor() as isize).min(n as isize - 1);
    let mut best = 0.0_f64;
    for lag in -max_lag..=max_lag {
        let mut acc = 0.0;
        if lag >= 0 {
            let lag = lag as usize;
            for (l, r) in left.iter().zip(&right[lag..]) {
                acc += l * r;
            }
        } else {
            let lag = (-lag) as usize;
            for (l, r) in left[lag..].iter().zip(right) {
                acc += l * r;
            }
        }
        best = best.max((acc / norm).abs());
    }
    Ok(best.clamp(0.0, 1.0))
}
