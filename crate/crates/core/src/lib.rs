//! Exact maximum-weight independent sets of weighted disks in convex position,
//! and max-min dispersion built on top of them.
//!
//! The pipeline: [`reductions::eliminate_arcs_z`] makes the input strongly
//! convex, [`reductions::build_aux_b`] makes every subset strongly convex, and
//! the interval dynamic program in [`dp`] solves the augmented instance.

pub mod dispersion;
pub mod dp;
mod error;
pub mod geom;
pub mod hull;
pub mod io;
pub mod oracles;
pub mod reductions;

pub use dispersion::{solve_dispersion, DispersionResult};
pub use dp::{OrderedInstance, Solution};
pub use error::{Error, Result};
pub use geom::{Disk, Point, Tolerance};
pub use hull::{disk_hull, Classification, DiskHull};
pub use reductions::{solve_convex_mwis, PipelineOptions};
