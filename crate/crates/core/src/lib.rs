//! Doppler-only 2D imaging of rotating scenes from narrowband OFDM echoes.
//!
//! A full revolution of the transmitter (or the target) is cut into azimuth
//! sectors short enough that each scatterer's reflectivity stays constant
//! inside a sector. Each sector then carries a sum of Doppler tones whose
//! frequencies depend on the scatterer positions, so a spectral estimate per
//! sector plus an incoherent association across sectors yields an image
//! whose resolution is set by wavelength and sector width, not bandwidth.

pub mod baseline;
pub mod container;
pub mod echo;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod imaging;
pub mod linalg;
pub mod resolution;
pub mod scene;

pub use error::{Error, Result};
pub use geometry::{RadarConfig, RoiCylinder, RoiGrid, SectorPlan, SPEED_OF_LIGHT};
pub use scene::{Scatterer, ScatteringModel, Scene};

/// Code listings from the guide in `book/`, compiled and run as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/imaging.md")]
    mod imaging {}
    #[doc = include_str!("../../../book/src/resolution.md")]
    mod resolution {}
    #[doc = include_str!("../../../book/src/baselines.md")]
    mod baselines {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
