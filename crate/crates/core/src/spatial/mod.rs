//! Binaural correlation, room modes, and first-order reflection geometry.

mod iacc;
mod modes;
mod reflections;

pub use iacc::{iacc, EARLY_IACC_LIMIT_S, MAX_LAG_S};
pub use modes::{
    mode_counts, mode_frequency, room_modes, room_modes_for_dims, schroeder_frequency, ModeType,
    RoomMode, SchroederFormula,
};
pub use reflections::{
    first_order_reflections, DirectPath, FirstOrderPaths, ReflectionPath, Surface,
};
