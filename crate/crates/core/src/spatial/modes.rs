use serde::{Deserialize, Serialize};

use crate::geometry::{RoomGeometry, SPEED_OF_SOUND};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeType {
    Axial,
    Tangential,
    Oblique,
}

impl ModeType {
    pub fn from_indices(indices: [u32; 3]) -> Option<Self> {
        match indices.iter().filter(|&&n| n != 0).count() {
            1 => Some(Self::Axial),
            2 => Some(Self::Tangential),
            3 => Some(Self::Oblique),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Axial => "axial",
            Self::Tangential => "tangential",
            Self::Oblique => "oblique",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoomMode {
    pub f_hz: f64,
    pub indices: [u32; 3],
    pub mode_type: ModeType,
}

/// Eigenfrequency of mode `(nx, ny, nz)` in a rigid-walled box.
pub fn mode_frequency(dims: [f64; 3], indices: [u32; 3]) -> f64 {
    let sum: f64 = indices
        .iter()
        .zip(dims)
        .map(|(&n, d)| (n as f64 / d).powi(2))
        .sum();
    SPEED_OF_SOUND / 2.0 * sum.sqrt()
}

/// Every mode up to `f_max_hz`, ascending by frequency. Degenerate modes
/// are listed individually.
pub fn room_modes(geom: &RoomGeometry, f_max_hz: f64) -> Vec<RoomMode> {
    room_modes_for_dims(geom.dims(), f_max_hz)
}

pub fn room_modes_for_dims(dims: [f64; 3], f_max_hz: f64) -> Vec<RoomMode> {
    if !(f_max_hz > 0.0) {
        return Vec::new();
    }
    // A single index n along an axis of length d already gives c n / (2 d).
    let bound = dims.map(|d| (2.0 * f_max_hz * d / SPEED_OF_SOUND).ceil() as u32);
    let mut modes = Vec::new();
    for nx in 0..=bound[0] {
        for ny in 0..=bound[1] {
            for nz in 0..=bound[2] {
                let indices = [nx, ny, nz];
                let Some(mode_type) = ModeType::from_indices(indices) else {
                    continue;
                };
                let f_hz = mode_frequency(dims, indices);
                if f_hz <= f_max_hz {
                    modes.push(RoomMode {
                        f_hz,
                        indices,
                        mode_type,
                    });
                }
            }
        }
    }
    modes.sort_by(|a, b| a.f_hz.total_cmp(&b.f_hz).then(a.indices.cmp(&b.indices)));
    modes
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchroederFormula {
    /// `2000 * sqrt(RT60 / V)`.
    #[default]
    Classic,
    /// `4 * RT60 * V^(1/3)`. Kept for comparison; not dimensionally sound.
    CubeRootVolume,
}

impl SchroederFormula {
    pub fn label(self) -> &'static str {
        match self {
            Self::Classic => "2000*sqrt(RT60/V)",
            Self::CubeRootVolume => "4*RT60*V^(1/3)",
        }
    }
}

/// Crossover frequency below which individual modes dominate.
pub fn schroeder_frequency(rt60_s: f64, volume_m3: f64, formula: SchroederFormula) -> f64 {
    match formula {
        SchroederFormula::Classic => 2000.0 * (rt60_s / volume_m3).sqrt(),
        SchroederFormula::CubeRootVolume => 4.0 * rt60_s * volume_m3.cbrt(),
    }
}

/// Counts by mode type, in the order axial, tangential, oblique.
pub fn mode_counts(modes: &[RoomMode]) -> [usize; 3] {
    let mut counts = [0; 3];
    for m in modes {
        counts[m.mode_type as usize] += 1;
    }
    counts
}
