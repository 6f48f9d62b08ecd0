//! Image-source simulation of shoebox rooms, dataset generation, and the
//! physical-plausibility checks run on generated batches.

mod dataset;
mod ism;
mod validate;

pub use dataset::{
    generate_dataset, record_metrics, simulate_record, write_dataset, DatasetOptions, DatasetRanges, MetadataRecord,
    RecordMetrics, RirRecord, METADATA_FILE,
};
pub use ism::{
    completeness_time, image_sources, simulate_ism, simulate_ism_detailed, Arrival, IsmOutput,
    TailInfo, TailSource,
};
pub use validate::{
    first_reflection_error_samples, sabine_rt60, validate_batch, ModalCheck, ValidationReport,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::RoomGeometry;

pub const MAX_ORDER_LIMIT: u32 = 20;
pub const MIN_WALL_CLEARANCE_M: f64 = 0.5;
pub const MIN_SOURCE_RECEIVER_M: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailModel {
    None,
    /// Seeded Gaussian noise with an exponential envelope, spliced in once
    /// the image-source set stops being complete.
    #[default]
    ExponentialNoise,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub geom: RoomGeometry,
    /// Broadband absorption per surface, ordered x0, xL, y0, yW, floor, ceiling.
    pub absorption: [f64; 6],
    pub max_order: u32,
    pub sample_rate: u32,
    pub tail: TailModel,
    pub seed: u64,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        self.geom.validate()?;
        if let Some(a) = self.absorption.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
            return Err(Error::Config(format!("absorption must lie in (0, 1), got {a}")));
        }
        if self.max_order > MAX_ORDER_LIMIT {
            return Err(Error::Config(format!(
                "max_order {} exceeds {MAX_ORDER_LIMIT}",
                self.max_order
            )));
        }
        if self.sample_rate == 0 {
            return Err(Error::Config("sample rate must be positive".into()));
        }
        for (name, p) in [("source", self.geom.source), ("receiver", self.geom.receiver)] {
            let c = self.geom.wall_clearance(p);
            if c < MIN_WALL_CLEARANCE_M {
                return Err(Error::Config(format!(
                    "{name} is {c:.3} m from a wall; at least {MIN_WALL_CLEARANCE_M} m required"
                )));
            }
        }
        let d = self.geom.source_receiver_distance();
        if d < MIN_SOURCE_RECEIVER_M {
            return Err(Error::Config(format!(
                "source and receiver are {d:.3} m apart; at least {MIN_SOURCE_RECEIVER_M} m required"
            )));
        }
        Ok(())
    }

    /// Amplitude reflection coefficient `sqrt(1 - a)` per surface.
    pub fn reflection_coefficients(&self) -> [f64; 6] {
        self.absorption.map(|a| (1.0 - a).sqrt())
    }

    /// Area-weighted mean absorption.
    pub fn mean_absorption(&self) -> f64 {
        let areas = self.geom.surface_areas();
        let weighted: f64 = areas.iter().zip(self.absorption).map(|(s, a)| s * a).sum();
        weighted / self.geom.surface_area()
    }

    pub fn eyring_rt60(&self) -> f64 {
        0.161 * self.geom.volume() / (-self.geom.surface_area() * (1.0 - self.mean_absorption()).ln())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> SimulationConfig {
        SimulationConfig {
            geom: RoomGeometry::new([6.0, 4.0, 3.0], [1.0, 1.0, 1.0], [4.0, 3.0, 1.5]).unwrap(),
            absorption: [0.2, 0.2, 0.3, 0.3, 0.1, 0.6],
            max_order: 5,
            sample_rate: 48_000,
            tail: TailModel::None,
            seed: 0,
        }
    }

    #[test]
    fn accepts_valid_config() {
        base().validate().unwrap();
    }

    #[test]
    fn rejects_bad_configs() {
        let mut c = base();
        c.absorption[2] = 1.0;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let mut c = base();
        c.max_order = 21;
        assert!(c.validate().is_err());
        let mut c = base();
        c.geom.source = [0.4, 1.0, 1.0];
        assert!(c.validate().is_err());
        let mut c = base();
        c.geom.receiver = [1.5, 1.5, 1.2];
        assert!(c.validate().is_err());
    }

    #[test]
    fn mean_absorption_is_area_weighted() {
        let c = base();
        let expected = (12.0 * 0.4 + 18.0 * 0.6 + 24.0 * 0.7) / 108.0;
        assert!((c.mean_absorption() - expected).abs() < 1e-12);
    }
}
