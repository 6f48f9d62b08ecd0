//! Schroeder backward integration and regression-based decay times.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::ImpulseResponse;
use crate::stats::linear_fit;

/// Lowest level an EDC is allowed to report, in dB.
pub const EDC_FLOOR_DB: f64 = -140.0;

/// Minimum number of EDC samples inside a regression range.
pub const MIN_REGRESSION_SAMPLES: usize = 8;

/// Evaluation ranges `(upper_db, lower_db)`.
pub const EDT_RANGE: (f64, f64) = (0.0, -10.0);
pub const T20_RANGE: (f64, f64) = (-5.0, -25.0);
pub const T30_RANGE: (f64, f64) = (-5.0, -35.0);

/// Energy decay curve in dB relative to the total energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyDecayCurve {
    pub values_db: Vec<f64>,
    pub sample_rate: u32,
    pub floor_db: f64,
}

impl EnergyDecayCurve {
    pub fn len(&self) -> usize {
        self.values_db.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values_db.is_empty()
    }

    pub fn time_s(&self, index: usize) -> f64 {
        index as f64 / self.sample_rate as f64
    }

    /// Deepest level reached (the last value, since the curve is monotone).
    pub fn deepest_db(&self) -> f64 {
        self.values_db.last().copied().unwrap_or(0.0)
    }
}

/// Backward-integrates the squared response and converts to dB re. the
/// first value. Levels below [`EDC_FLOOR_DB`] are clamped to the floor.
pub fn schroeder_edc(rir: &ImpulseResponse) -> Result<EnergyDecayCurve> {
    let h = rir.mono_samples()?;
    edc_from_samples(h, rir.sample_rate())
}

pub(crate) fn edc_from_samples(h: &[f64], sample_rate: u32) -> Result<EnergyDecayCurve> {
    let mut remaining = vec![0.0; h.len()];
    let mut acc = 0.0;
    for (r, s) in remaining.iter_mut().zip(h).rev() {
        acc += s * s;
        *r = acc;
    }
    let total = acc;
    if total <= 0.0 || !total.is_finite() {
        return Err(Error::DegenerateInput("signal has zero energy".into()));
    }

    let mut values_db = Vec::with_capacity(h.len());
    let mut prev = 0.0_f64;
    for (n, e) in remaining.iter().enumerate() {
        let db = if n == 0 {
            0.0
        } else if *e > 0.0 {
            (10.0 * (e / total).log10()).max(EDC_FLOOR_DB)
        } else {
            EDC_FLOOR_DB
        };
        // log10 is not guaranteed monotone to the last ulp.
        let db = db.min(prev);
        values_db.push(db);
        prev = db;
    }
    Ok(EnergyDecayCurve {
        values_db,
        sample_rate,
        floor_db: EDC_FLOOR_DB,
    })
}

/// Result of a straight-line fit to part of an EDC.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope_db_per_s: f64,
    pub r2: f64,
    pub samples: usize,
}

/// Least-squares slope over every EDC sample with `upper_db >= L >= lower_db`.
pub fn regression_slope(
    edc: &EnergyDecayCurve,
    upper_db: f64,
    lower_db: f64,
) -> Result<SlopeFit> {
    if !(upper_db > lower_db && upper_db <= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "regression range ({upper_db}, {lower_db}) must satisfy 0 >= upper > lower"
        )));
    }
    let deepest = edc.deepest_db();
    if deepest > lower_db {
        return Err(Error::InsufficientDecayRange {
            deepest_db: deepest,
            detail: format!("need {lower_db} dB"),
        });
    }
    let (t, y): (Vec<f64>, Vec<f64>) = edc
        .values_db
        .iter()
        .enumerate()
        .filter(|(_, &v)| v <= upper_db && v >= lower_db)
        .map(|(n, &v)| (edc.time_s(n), v))
        .unzip();
    if t.len() < MIN_REGRESSION_SAMPLES {
        return Err(Error::InsufficientDecayRange {
            deepest_db: deepest,
            detail: format!(
                "{} samples between {upper_db} and {lower_db} dB, need {MIN_REGRESSION_SAMPLES}",
                t.len()
            ),
        });
    }
    let fit = linear_fit(&t, &y).expect("distinct time points");
    Ok(SlopeFit {
        slope_db_per_s: fit.slope,
        r2: fit.r2,
        samples: t.len(),
    })
}

/// One extrapolated decay time, or the reason it could not be computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub seconds: Option<f64>,
    pub r2: Option<f64>,
    pub slope_db_per_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl DecayFit {
    pub fn unavailable(reason: impl Into<String>) -> Self {
        Self {
            seconds: None,
            r2: None,
            slope_db_per_s: None,
            reason: Some(reason.into()),
        }
    }

    fn from_range(edc: &EnergyDecayCurve, (upper, lower): (f64, f64)) -> Self {
        match regression_slope(edc, upper, lower) {
            Ok(fit) if fit.slope_db_per_s < 0.0 => Self {
                seconds: Some(-60.0 / fit.slope_db_per_s),
                r2: Some(fit.r2),
                slope_db_per_s: Some(fit.slope_db_per_s),
                reason: None,
            },
            Ok(fit) => Self::unavailable(format!(
                "non-negative decay slope ({:.3} dB/s)",
                fit.slope_db_per_s
            )),
            Err(e) => Self::unavailable(e.to_string()),
        }
    }
}

/// EDT, T20 and T30 of one decay curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayMetrics {
    pub edt: DecayFit,
    pub t20: DecayFit,
    pub t30: DecayFit,
}

impl DecayMetrics {
    pub fn edt_s(&self) -> Option<f64> {
        self.edt.seconds
    }

    pub fn t20_s(&self) -> Option<f64> {
        self.t20.seconds
    }

    pub fn t30_s(&self) -> Option<f64> {
        self.t30.seconds
    }

    /// T30 when available, otherwise T20, with the name of the estimate used.
    pub fn rt60(&self) -> Option<(f64, &'static str)> {
        self.t30
            .seconds
            .map(|t| (t, "T30"))
            .or_else(|| self.t20.seconds.map(|t| (t, "T20")))
    }
}

/// Extrapolates EDT, T20 and T30 to a 60 dB decay. Metrics whose range is
/// not covered by the curve are reported unavailable rather than failing.
pub fn decay_metrics(edc: &EnergyDecayCurve) -> DecayMetrics {
    DecayMetrics {
        edt: DecayFit::from_range(edc, EDT_RANGE),
        t20: DecayFit::from_range(edc, T20_RANGE),
        t30: DecayFit::from_range(edc, T30_RANGE),
    }
}
