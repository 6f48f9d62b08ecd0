//! WAV ingestion and export.
//!
//! Reads 16/24/32-bit integer PCM and 32-bit IEEE float, mono or stereo.
//! Integer samples are scaled by `2^(bits-1)` into `[-1, 1)`. Output is
//! always 32-bit float at the response's own sample rate.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};

use crate::error::{Error, Result};
use crate::signal::ImpulseResponse;

/// Maps decoder errors. I/O failures after the file has been opened come
/// from short reads, so they are reported as malformed data.
fn map_hound(path: &Path, err: hound::Error) -> Error {
    match err {
        hound::Error::IoError(e) => Error::Format(format!("{}: {e}", path.display())),
        hound::Error::Unsupported => {
            Error::UnsupportedFormat(format!("{}: encoding not supported", path.display()))
        }
        other => Error::Format(format!("{}: {other}", path.display())),
    }
}

pub fn load_wav(path: impl AsRef<Path>) -> Result<ImpulseResponse> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = WavReader::new(BufReader::new(file)).map_err(|e| map_hound(path, e))?;
    let spec = reader.spec();
    let channels = spec.channels as usize;
    if !(1..=2).contains(&channels) {
        return Err(Error::UnsupportedFormat(format!(
            "{} channels (only mono and stereo are supported)",
            channels
        )));
    }

    let interleaved: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Int, bits @ (16 | 24 | 32)) => {
            let scale = (1_i64 << (bits - 1)) as f64;
            reader
                .samples::<i32>()
                .map(|s| s.map(|v| v as f64 / scale))
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| map_hound(path, e))?
        }
        (SampleFormat::Float, 32) => reader
            .samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| map_hound(path, e))?,
        (fmt, bits) => {
            return Err(Error::UnsupportedFormat(format!(
                "{bits}-bit {}",
                match fmt {
                    SampleFormat::Int => "integer PCM",
                    SampleFormat::Float => "float",
                }
            )))
        }
    };

    if interleaved.is_empty() {
        return Err(Error::EmptyInput(format!(
            "{} has no sample data",
            path.display()
        )));
    }

    let mut split = vec![Vec::with_capacity(interleaved.len() / channels); channels];
    for frame in interleaved.chunks_exact(channels) {
        for (ch, &s) in split.iter_mut().zip(frame) {
            ch.push(s);
        }
    }
    ImpulseResponse::new(split, spec.sample_rate)
}

/// Writes the response as 32-bit float WAV.
pub fn save_wav(path: impl AsRef<Path>, rir: &ImpulseResponse) -> Result<()> {
    let path = path.as_ref();
    let spec = WavSpec {
        channels: rir.num_channels() as u16,
        sample_rate: rir.sample_rate(),
        bits_per_sample: 32,
        sample_format: SampleFormat::Float,
    };
    let write_err = |e: hound::Error| match e {
        hound::Error::IoError(io) => Error::io(path, io),
        other => map_hound(path, other),
    };
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = WavWriter::new(BufWriter::new(file), spec).map_err(write_err)?;
    for n in 0..rir.len() {
        for ch in rir.channels() {
            writer.write_sample(ch[n] as f32).map_err(write_err)?;
        }
    }
    writer.finalize().map_err(write_err)
}
