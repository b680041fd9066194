//! Chain metrics `d_ε`, the discrete length metric `d₀`, its iterates and
//! path lengths on finite samples of metric spaces.

pub mod chains;
pub mod error;
pub mod ext;
pub mod graph;
pub mod length;
pub mod matrix;
pub mod neighbors;
pub mod point;
pub mod space;
pub mod spaces;
pub mod tower;
pub mod verify;

pub use error::{Error, Result};
pub use ext::ExtReal;
pub use matrix::DistanceMatrix;
pub use point::SparsePoint;
pub use space::{FiniteMetricSpace, Metric, PointId};
