//! Configuration files, presets, run manifests and the command runners
//! behind the `bisar` binary.

pub mod config;
pub mod manifest;
pub mod presets;
pub mod run;

pub use config::{ExperimentConfig, Resolved};
pub use manifest::{FileRecord, RunManifest, RunRecorder};
pub use run::{
    compare_baselines, image, load_cube, peak_to_median, psf, resolution_sweep, simulate, validate_config,
    SimulatedPipeline, CUBE_FILE,
};
