//! Point-vortex, vortex-ring and vortex-membrane dynamics with closed-form
//! oracles, adaptive integration and invariant monitoring.

pub mod diagnostics;
pub mod error;
pub mod halfplane;
pub mod integrate;
pub mod membranes;
pub mod planar;
pub mod quadrant;
pub mod rings;
pub mod scenario;
pub mod system;
pub mod trajectory;

pub use error::{Error, Result};
pub use system::{Domain, VortexSystem};
pub use trajectory::Trajectory;
