//! Points, windows, configurations and the combinatorics built on them.

mod annulus;
mod cluster;
mod config;
mod ordering;
mod window;

pub use annulus::RadiiSchedule;
pub use cluster::{cluster_decompose, connected_within, neighbor_pairs, Clusters};
pub use config::{Mark, MarkedConfiguration, MarkedPoint, Point};
pub use ordering::PointOrder;
pub use window::{Mollified, Norm, Window};
