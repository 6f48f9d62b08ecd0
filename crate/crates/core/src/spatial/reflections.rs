use serde::{Deserialize, Serialize};

use crate::geometry::{distance, Point3, RoomGeometry, SPEED_OF_SOUND};

/// Room boundaries in the order used for absorption coefficients and areas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Surface {
    #[serde(rename = "x0")]
    X0,
    #[serde(rename = "xL")]
    XL,
    #[serde(rename = "y0")]
    Y0,
    #[serde(rename = "yW")]
    YW,
    #[serde(rename = "floor")]
    Floor,
    #[serde(rename = "ceiling")]
    Ceiling,
}

impl Surface {
    pub const ALL: [Surface; 6] = [
        Surface::X0,
        Surface::XL,
        Surface::Y0,
        Surface::YW,
        Surface::Floor,
        Surface::Ceiling,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn axis(self) -> usize {
        self.index() / 2
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Surface::X0 => "x0",
            Surface::XL => "xL",
            Surface::Y0 => "y0",
            Surface::YW => "yW",
            Surface::Floor => "floor",
            Surface::Ceiling => "ceiling",
        }
    }

    /// Plane coordinate along [`Surface::axis`].
    pub fn plane(self, dims: [f64; 3]) -> f64 {
        if self.index().is_multiple_of(2) {
            0.0
        } else {
            dims[self.axis()]
        }
    }

    /// Mirror image of `p` through this boundary.
    pub fn mirror(self, p: Point3, dims: [f64; 3]) -> Point3 {
        let mut out = p;
        let axis = self.axis();
        out[axis] = 2.0 * self.plane(dims) - p[axis];
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectPath {
    pub path_length: f64,
    pub arrival_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReflectionPath {
    pub image_source: Point3,
    pub surface: Surface,
    pub path_length: f64,
    pub arrival_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirstOrderPaths {
    pub direct: DirectPath,
    /// One path per surface, in [`Surface::ALL`] order.
    pub reflections: Vec<ReflectionPath>,
}

impl FirstOrderPaths {
    pub fn earliest_reflection(&self) -> Option<&ReflectionPath> {
        self.reflections
            .iter()
            .min_by(|a, b| a.arrival_s.total_cmp(&b.arrival_s))
    }
}

/// Direct path plus the six first-order specular reflections.
pub fn first_order_reflections(geom: &RoomGeometry) -> FirstOrderPaths {
    let dims = geom.dims();
    let d = geom.source_receiver_distance();
    let reflections = Surface::ALL
        .iter()
        .map(|&surface| {
            let image_source = surface.mirror(geom.source, dims);
            let path_length = distance(image_source, geom.receiver);
            ReflectionPath {
                image_source,
                surface,
                path_length,
                arrival_s: path_length / SPEED_OF_SOUND,
            }
        })
        .collect();
    FirstOrderPaths {
        direct: DirectPath {
            path_length: d,
            arrival_s: d / SPEED_OF_SOUND,
        },
        reflections,
    }
}
