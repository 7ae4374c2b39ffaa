//! Update families, bootstrap percolation, droplet events and kinetically
//! constrained model simulation on the square lattice.

pub mod bootstrap;
pub mod droplets;
pub mod error;
pub mod events;
pub mod family;
pub mod io;
pub mod kcm;
pub mod lattice;
pub mod stats;

pub use error::{Error, Result};
pub use lattice::{
    compare_clockwise, direction_metrics, half_plane_contains, BoundaryCondition, Configuration, Direction,
    DirectionMetrics, Offset, SeededStream, Site, SiteView, Window,
};
