//! Surfaces in four-dimensional space forms of any signature: structure
//! equations, twistor invariants, the SO₀(3,1) → SO(3, ℂ) map, and frame
//! reconstruction.

pub mod error;
pub mod fd;
pub mod geomcore;
pub mod integrability;
pub mod io;
pub mod liegroup;
pub mod presets;
pub mod reconstruct;
pub mod spaceform;
pub mod twistor;

pub use error::{Error, Location, Result};
pub use fd::Stencil;
pub use spaceform::{FundamentalData, Grid, SpaceFormModel, SurfaceCase};
