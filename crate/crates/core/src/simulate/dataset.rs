use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{simulate_ism, SimulationConfig, TailModel, MIN_SOURCE_RECEIVER_M, MIN_WALL_CLEARANCE_M};
use crate::decay::{decay_metrics, schroeder_edc};
use crate::energy::{clarity_c80, definition_d50, drr};
use crate::error::{Error, Result};
use crate::geometry::{distance, RoomGeometry};
use crate::signal::{preprocess, to_mono, ImpulseResponse};
use crate::wav::save_wav;

pub const METADATA_FILE: &str = "metadata.jsonl";

const MAX_PLACEMENT_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetRanges {
    pub length_m: (f64, f64),
    pub width_m: (f64, f64),
    pub height_m: (f64, f64),
    /// Rooms outside this volume range are redrawn.
    pub volume_m3: Option<(f64, f64)>,
    /// Range of the per-room base absorption.
    pub absorption: (f64, f64),
    /// Each surface deviates from the base by up to this much.
    pub absorption_jitter: f64,
}

impl Default for DatasetRanges {
    fn default() -> Self {
        Self {
            length_m: (3.0, 25.0),
            width_m: (3.0, 20.0),
            height_m: (2.4, 8.0),
            volume_m3: None,
            absorption: (0.20, 0.49),
            absorption_jitter: 0.05,
        }
    }
}

impl DatasetRanges {
    /// Classroom-sized rooms between 150 and 400 m^3.
    pub fn classroom() -> Self {
        Self {
            length_m: (6.0, 14.0),
            width_m: (5.0, 11.0),
            height_m: (2.7, 3.6),
            volume_m3: Some((150.0, 400.0)),
            absorption: (0.12, 0.40),
            absorption_jitter: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetOptions {
    pub n: usize,
    pub seed: u64,
    pub ranges: DatasetRanges,
    pub max_order: u32,
    pub sample_rate: u32,
    pub tail: TailModel,
}

impl DatasetOptions {
    pub fn new(n: usize, seed: u64) -> Self {
        Self {
            n,
            seed,
            ranges: DatasetRanges::default(),
            max_order: 12,
            sample_rate: 48_000,
            tail: TailModel::ExponentialNoise,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecordMetrics {
    pub rt60_s: Option<f64>,
    pub drr_db: f64,
    pub c80_db: f64,
    pub d50: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RirRecord {
    pub index: usize,
    pub config: SimulationConfig,
    /// Stored at 32-bit float precision, exactly as written to disk.
    pub rir: ImpulseResponse,
    pub metrics: RecordMetrics,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbsorptionMeta {
    pub surfaces: [f64; 6],
    pub mean: f64,
}

/// One line of the metadata file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetadataRecord {
    pub length_m: f64,
    pub width_m: f64,
    pub height_m: f64,
    pub source_xyz_m: [f64; 3],
    pub receiver_xyz_m: [f64; 3],
    pub absorption: AbsorptionMeta,
    pub max_order: u32,
    pub rt60_s: Option<f64>,
    pub drr_db: f64,
    pub c80_db: f64,
    pub d50: f64,
    pub sample_rate: u32,
    pub wav_path: String,
}

impl RirRecord {
    pub fn wav_name(&self) -> String {
        format!("rir_{:05}.wav", self.index)
    }

    pub fn metadata(&self) -> MetadataRecord {
        let g = &self.config.geom;
        MetadataRecord {
            length_m: g.length,
            width_m: g.width,
            height_m: g.height,
            source_xyz_m: g.source,
            receiver_xyz_m: g.receiver,
            absorption: AbsorptionMeta {
                surfaces: self.config.absorption,
                mean: self.config.mean_absorption(),
            },
            max_order: self.config.max_order,
            rt60_s: self.metrics.rt60_s,
            drr_db: self.metrics.drr_db,
            c80_db: self.metrics.c80_db,
            d50: self.metrics.d50,
            sample_rate: self.config.sample_rate,
            wav_path: self.wav_name(),
        }
    }
}

/// RT60 (T30, else T20), DRR, C80 and D50 of a response, after the usual
/// preprocessing.
pub fn record_metrics(rir: &ImpulseResponse) -> Result<RecordMetrics> {
    let (clean, _) = preprocess(rir)?;
    let mono = if clean.num_channels() == 1 { clean } else { to_mono(&clean) };
    let decay = decay_metrics(&schroeder_edc(&mono)?);
    Ok(RecordMetrics {
        rt60_s: decay.rt60().map(|(t, _)| t),
        drr_db: drr(&mono)?.db,
        c80_db: clarity_c80(&mono)?.db,
        d50: definition_d50(&mono)?,
    })
}

fn uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        rng.random_range(lo..hi)
    } else {
        lo
    }
}

fn sample_config(rng: &mut ChaCha8Rng, options: &DatasetOptions) -> Result<SimulationConfig> {
    let r = &options.ranges;
    for _ in 0..MAX_PLACEMENT_ATTEMPTS {
        let dims = [uniform(rng, r.length_m), uniform(rng, r.width_m), uniform(rng, r.height_m)];
        let volume: f64 = dims.iter().product();
        if let Some((lo, hi)) = r.volume_m3 {
            if volume < lo || volume > hi {
                continue;
            }
        }
        if dims.iter().any(|d| *d <= 2.0 * MIN_WALL_CLEARANCE_M) {
            continue;
        }
        let mut point = || dims.map(|d| uniform(rng, (MIN_WALL_CLEARANCE_M, d - MIN_WALL_CLEARANCE_M)));
        let source = point();
        let receiver = point();
        if distance(source, receiver) < MIN_SOURCE_RECEIVER_M {
            continue;
        }
        let base = uniform(rng, r.absorption);
        let j = r.absorption_jitter;
        let absorption = [0; 6].map(|_| (base + uniform(rng, (-j, j))).clamp(0.01, 0.99));
        let config = SimulationConfig {
            geom: RoomGeometry::new(dims, source, receiver)?,
            absorption,
            max_order: options.max_order,
            sample_rate: options.sample_rate,
            tail: options.tail,
            seed: rng.random(),
        };
        config.validate()?;
        return Ok(config);
    }
    Err(Error::Placement {
        attempts: MAX_PLACEMENT_ATTEMPTS,
    })
}

fn quantize_f32(rir: &ImpulseResponse) -> Result<ImpulseResponse> {
    let channels = rir
        .channels()
        .iter()
        .map(|c| c.iter().map(|&s| s as f32 as f64).collect())
        .collect();
    ImpulseResponse::new(channels, rir.sample_rate())
}

/// Simulates one fixed configuration and computes its metadata metrics.
pub fn simulate_record(index: usize, config: SimulationConfig) -> Result<RirRecord> {
    let rir = quantize_f32(&simulate_ism(&config)?)?;
    let metrics = record_metrics(&rir)?;
    Ok(RirRecord {
        index,
        config,
        rir,
        metrics,
    })
}

fn generate_record(index: usize, options: &DatasetOptions) -> Result<RirRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    rng.set_stream(index as u64);
    simulate_record(index, sample_config(&mut rng, options)?)
}

/// Draws and simulates `options.n` rooms. Each record depends only on the
/// seed and its index, so the result is identical however the work is
/// scheduled.
pub fn generate_dataset(options: &DatasetOptions) -> Result<Vec<RirRecord>> {
    if options.n == 0 {
        return Err(Error::InvalidArgument("dataset size must be at least 1".into()));
    }
    let workers = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(options.n);
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<RirRecord>>>> = Mutex::new((0..options.n).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= options.n {
                    break;
                }
                let record = generate_record(i, options);
                slots.lock().expect("worker panicked")[i] = Some(record);
            });
        }
    });
    slots
        .into_inner()
        .expect("worker panicked")
        .into_iter()
        .map(|slot| slot.expect("every index is visited"))
        .collect()
}

/// Writes one WAV per record plus the JSON Lines metadata file and returns
/// the metadata path.
pub fn write_dataset(records: &[RirRecord], dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let meta_path = dir.join(METADATA_FILE);
    let mut lines = Vec::new();
    for record in records {
        save_wav(dir.join(record.wav_name()), &record.rir)?;
        serde_json::to_writer(&mut lines, &record.metadata())?;
        lines.push(b'\n');
    }
    let mut file = fs::File::create(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
    file.write_all(&lines).map_err(|e| Error::io(&meta_path, e))?;
    Ok(meta_path)
}
