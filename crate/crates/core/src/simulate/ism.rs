use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{SimulationConfig, TailModel};
use crate::error::Result;
use crate::geometry::{distance, Point3, SPEED_OF_SOUND};
use crate::signal::{ImpulseResponse, MAX_DURATION_S};
use crate::stats::linear_fit;

/// One specular path from an image source to the receiver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arrival {
    pub delay_s: f64,
    pub amplitude: f64,
    pub order: u32,
    pub indices: [i32; 3],
}

/// Where the late tail's decay rate and level came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailSource {
    /// Fitted to the binned energy of the image-source arrivals.
    Envelope,
    /// Diffuse-field expectation with Eyring decay.
    Eyring,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailInfo {
    pub start_s: f64,
    pub decay_db_per_s: f64,
    /// Energy density at the splice point, amplitude^2 per second.
    pub density_at_start: f64,
    pub source: TailSource,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsmOutput {
    pub rir: ImpulseResponse,
    /// Arrivals rendered into `rir`, sorted by delay.
    pub arrivals: Vec<Arrival>,
    /// Every image source closer than `completeness_s * c` is included.
    pub completeness_s: f64,
    pub tail: Option<TailInfo>,
}

const ENVELOPE_BIN_S: f64 = 0.005;
const MIN_ENVELOPE_BINS: usize = 6;
const MIN_ENVELOPE_R2: f64 = 0.6;
/// The tail runs until it has decayed by this much.
const TAIL_RANGE_DB: f64 = 90.0;

/// Image coordinate along one axis and the bounce counts on the low and
/// high walls.
fn axis_image(i: i32, len: f64, s: f64) -> (f64, u32, u32) {
    let coord = if i.rem_euclid(2) == 0 {
        i as f64 * len + s
    } else {
        i as f64 * len + len - s
    };
    let n = i.unsigned_abs();
    let (low, high) = if i >= 0 { (n / 2, n - n / 2) } else { (n - n / 2, n / 2) };
    (coord, low, high)
}

fn image(config: &SimulationConfig, indices: [i32; 3]) -> (Point3, [u32; 6]) {
    let dims = config.geom.dims();
    let mut pos = [0.0; 3];
    let mut hits = [0; 6];
    for axis in 0..3 {
        let (c, low, high) = axis_image(indices[axis], dims[axis], config.geom.source[axis]);
        pos[axis] = c;
        hits[2 * axis] = low;
        hits[2 * axis + 1] = high;
    }
    (pos, hits)
}

fn for_each_triple(order: u32, exact: bool, mut f: impl FnMut([i32; 3])) {
    let r = order as i32;
    for i in -r..=r {
        let ri = r - i.abs();
        for j in -ri..=ri {
            let rj = ri - j.abs();
            if exact {
                f([i, j, -rj]);
                if rj != 0 {
                    f([i, j, rj]);
                }
            } else {
                for k in -rj..=rj {
                    f([i, j, k]);
                }
            }
        }
    }
}

/// All image sources with `|i| + |j| + |k| <= max_order`, sorted by delay.
pub fn image_sources(config: &SimulationConfig) -> Vec<Arrival> {
    let beta = config.reflection_coefficients();
    let mut out = Vec::new();
    for_each_triple(config.max_order, false, |indices| {
        let (pos, hits) = image(config, indices);
        let d = distance(pos, config.geom.receiver);
        let gain: f64 = beta.iter().zip(hits).map(|(b, n)| b.powi(n as i32)).product();
        out.push(Arrival {
            delay_s: d / SPEED_OF_SOUND,
            amplitude: gain / d,
            order: indices.iter().map(|i| i.unsigned_abs()).sum(),
            indices,
        });
    });
    out.sort_by(|a, b| a.delay_s.total_cmp(&b.delay_s).then(a.indices.cmp(&b.indices)));
    out
}

/// Earliest arrival among images of order `max_order + 1`. Image distance
/// grows with every index magnitude, so no image beyond `max_order` arrives
/// sooner.
pub fn completeness_time(config: &SimulationConfig) -> f64 {
    let mut best = f64::INFINITY;
    for_each_triple(config.max_order + 1, true, |indices| {
        let (pos, _) = image(config, indices);
        best = best.min(distance(pos, config.geom.receiver));
    });
    best / SPEED_OF_SOUND
}

/// Expected energy density of a diffuse field at time `t`, for a point
/// source of unit amplitude at 1 m: `4 pi c / V * (1 - a)^(c t S / 4V)`.
fn diffuse_density(config: &SimulationConfig, t: f64) -> f64 {
    let v = config.geom.volume();
    let s = config.geom.surface_area();
    let a = config.mean_absorption();
    let reflections = SPEED_OF_SOUND * t * s / (4.0 * v);
    4.0 * std::f64::consts::PI * SPEED_OF_SOUND / v * (1.0 - a).powf(reflections)
}

fn fit_tail(config: &SimulationConfig, arrivals: &[Arrival], start_s: f64) -> TailInfo {
    let first_reflection = arrivals
        .iter()
        .find(|a| a.order > 0)
        .map_or(start_s, |a| a.delay_s);
    let n_bins = ((start_s - first_reflection) / ENVELOPE_BIN_S).floor().max(0.0) as usize;
    let mut energy = vec![0.0; n_bins];
    for a in arrivals.iter().filter(|a| a.order > 0) {
        let k = ((a.delay_s - first_reflection) / ENVELOPE_BIN_S) as usize;
        if k < n_bins {
            energy[k] += a.amplitude * a.amplitude;
        }
    }
    let (t, db): (Vec<f64>, Vec<f64>) = energy
        .iter()
        .enumerate()
        .filter(|(_, e)| **e > 0.0)
        .map(|(k, e)| {
            let center = first_reflection + (k as f64 + 0.5) * ENVELOPE_BIN_S;
            (center, 10.0 * (e / ENVELOPE_BIN_S).log10())
        })
        .unzip();
    if t.len() >= MIN_ENVELOPE_BINS {
        if let Some(fit) = linear_fit(&t, &db) {
            if fit.slope < 0.0 && fit.r2 >= MIN_ENVELOPE_R2 {
                return TailInfo {
                    start_s,
                    decay_db_per_s: -fit.slope,
                    density_at_start: 10f64.powf((fit.intercept + fit.slope * start_s) / 10.0),
                    source: TailSource::Envelope,
                };
            }
        }
    }
    TailInfo {
        start_s,
        decay_db_per_s: 60.0 / config.eyring_rt60(),
        density_at_start: diffuse_density(config, start_s),
        source: TailSource::Eyring,
    }
}

fn render(buffer: &mut [f64], arrival: &Arrival, fs: f64) {
    let pos = arrival.delay_s * fs;
    let n0 = pos.floor() as usize;
    let frac = pos - n0 as f64;
    if n0 < buffer.len() {
        buffer[n0] += arrival.amplitude * (1.0 - frac);
    }
    if n0 + 1 < buffer.len() {
        buffer[n0 + 1] += arrival.amplitude * frac;
    }
}

/// Image-source simulation with full diagnostics.
pub fn simulate_ism_detailed(config: &SimulationConfig) -> Result<IsmOutput> {
    config.validate()?;
    let fs = config.sample_rate as f64;
    let max_len = (MAX_DURATION_S * fs) as usize;
    let mut arrivals = image_sources(config);
    let completeness_s = completeness_time(config);

    let tail = match config.tail {
        TailModel::None => None,
        TailModel::ExponentialNoise => Some(fit_tail(config, &arrivals, completeness_s)),
    };
    if tail.is_some() {
        arrivals.retain(|a| a.delay_s < completeness_s);
    }

    let last = arrivals.last().map_or(0.0, |a| a.delay_s);
    let end_s = match &tail {
        Some(info) => info.start_s + TAIL_RANGE_DB / info.decay_db_per_s,
        None => last,
    };
    let len = ((end_s * fs).ceil() as usize + 2).clamp(crate::signal::MIN_SAMPLES, max_len);
    let mut h = vec![0.0; len];
    for a in &arrivals {
        render(&mut h, a, fs);
    }

    if let Some(info) = &tail {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let start = (info.start_s * fs).ceil() as usize;
        let sigma0 = (info.density_at_start / fs).sqrt();
        let per_sample = 10f64.powf(-info.decay_db_per_s / (20.0 * fs));
        let mut sigma = sigma0 * 10f64.powf(-info.decay_db_per_s * (start as f64 / fs - info.start_s) / 20.0);
        for s in h.iter_mut().skip(start) {
            let g: f64 = StandardNormal.sample(&mut rng);
            *s += sigma * g;
            sigma *= per_sample;
        }
    }

    Ok(IsmOutput {
        rir: ImpulseResponse::mono(h, config.sample_rate)?,
        arrivals,
        completeness_s,
        tail,
    })
}

/// Image-source room impulse response for `config`.
pub fn simulate_ism(config: &SimulationConfig) -> Result<ImpulseResponse> {
    simulate_ism_detailed(config).map(|out| out.rir)
}
