//! Intervals, tagged simplices, prisms and space-time partitions.

mod clip;
mod interval;
mod mesh;
mod partition;
mod prism;
mod simplex;

pub use clip::intersect_shifted;
pub use interval::Interval;
pub use mesh::{kuhn_cube, kuhn_square, unit_interval_mesh, unit_mesh};
pub use partition::{Cylinder, Partition, PartitionRecord, PrismRecord, SpaceDomain};
pub use prism::{robust_ceil, temporal_level, Prism};
pub use simplex::Simplex;
pub(crate) use simplex::factorial;
