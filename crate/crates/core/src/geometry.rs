use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of sound used throughout, in m/s.
pub const SPEED_OF_SOUND: f64 = 343.0;

pub type Point3 = [f64; 3];

/// A rectangular room with one source and one receiver.
///
/// Axis convention: x runs along the length, y along the width, z is height
/// with the floor at z = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoomGeometry {
    pub length: f64,
    pub width: f64,
    pub height: f64,
    pub source: Point3,
    pub receiver: Point3,
}

impl RoomGeometry {
    pub fn new(dims: [f64; 3], source: Point3, receiver: Point3) -> Result<Self> {
        let geom = Self {
            length: dims[0],
            width: dims[1],
            height: dims[2],
            source,
            receiver,
        };
        geom.validate()?;
        Ok(geom)
    }

    /// Checks positive dimensions and that both points lie strictly inside.
    pub fn validate(&self) -> Result<()> {
        let dims = self.dims();
        if dims.iter().any(|d| !d.is_finite() || *d <= 0.0) {
            return Err(Error::Geometry(format!(
                "room dimensions must be positive, got {dims:?}"
            )));
        }
        for (name, p) in [("source", self.source), ("receiver", self.receiver)] {
            let inside = p
                .iter()
                .zip(dims)
                .all(|(c, d)| c.is_finite() && *c > 0.0 && *c < d);
            if !inside {
                return Err(Error::Geometry(format!(
                    "{name} {p:?} is not strictly inside the {}x{}x{} m room",
                    dims[0], dims[1], dims[2]
                )));
            }
        }
        Ok(())
    }

    pub fn dims(&self) -> [f64; 3] {
        [self.length, self.width, self.height]
    }

    pub fn volume(&self) -> f64 {
        self.length * self.width * self.height
    }

    /// Area of each boundary in surface order x0, xL, y0, yW, floor, ceiling.
    pub fn surface_areas(&self) -> [f64; 6] {
        let (l, w, h) = (self.length, self.width, self.height);
        [w * h, w * h, l * h, l * h, l * w, l * w]
    }

    pub fn surface_area(&self) -> f64 {
        self.surface_areas().iter().sum()
    }

    pub fn source_receiver_distance(&self) -> f64 {
        distance(self.source, self.receiver)
    }

    /// Smallest distance from `p` to any of the six walls.
    pub fn wall_clearance(&self, p: Point3) -> f64 {
        p.iter()
            .zip(self.dims())
            .map(|(c, d)| c.min(d - c))
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn distance(a: Point3, b: Point3) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_bounds() {
        assert!(RoomGeometry::new([4.0, 3.0, 2.5], [1.0, 1.0, 1.0], [3.0, 2.0, 1.5]).is_ok());
        assert!(RoomGeometry::new([4.0, 3.0, 0.0], [1.0, 1.0, 1.0], [3.0, 2.0, 1.5]).is_err());
        assert!(RoomGeometry::new([4.0, 3.0, 2.5], [4.0, 1.0, 1.0], [3.0, 2.0, 1.5]).is_err());
        assert!(RoomGeometry::new([4.0, 3.0, 2.5], [1.0, 1.0, 1.0], [3.0, 2.0, -0.1]).is_err());
    }

    #[test]
    fn areas_and_clearance() {
        let g = RoomGeometry::new([5.0, 4.0, 3.0], [1.0, 2.0, 1.5], [4.0, 2.0, 1.5]).unwrap();
        assert_eq!(g.volume(), 60.0);
        assert_eq!(g.surface_area(), 2.0 * (20.0 + 15.0 + 12.0));
        assert_eq!(g.wall_clearance(g.source), 1.0);
        assert_eq!(g.source_receiver_distance(), 3.0);
    }
}
