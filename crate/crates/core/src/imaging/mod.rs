//! From echo cube to energy image: sector reshape, range compression,
//! per-sector Doppler spectra, and association over the ROI grid.

pub mod associate;
pub mod image;
pub mod sectors;
pub mod spectrum;

use ndarray::Array2;

pub use associate::{associate, associate_point, coherent_sum, BinLookup};
pub use image::{EnergyImage, ImageMetadata};
pub use sectors::{range_compress, range_compress_subcarriers, reshape_sectors, RangeCompressed, SectorCube};
pub use spectrum::{estimate_dft, estimate_iaa, AngleDopplerMap, Estimator, IaaOptions, SteeringTable};

use crate::echo::EchoCube;
use crate::error::Result;
use crate::geometry::{RoiGrid, SectorPlan};

pub fn estimate(rc: &RangeCompressed, plan: &SectorPlan, estimator: Estimator, iaa: &IaaOptions) -> Result<AngleDopplerMap> {
    match estimator {
        Estimator::Dft => estimate_dft(rc, plan),
        Estimator::Iaa => estimate_iaa(rc, plan, iaa),
    }
}

/// Narrowband pipeline: all subcarriers are averaged into one sequence per sector.
pub fn image_narrowband(
    cube: &EchoCube,
    plan: &SectorPlan,
    grid: &RoiGrid,
    estimator: Estimator,
    iaa: &IaaOptions,
) -> Result<EnergyImage> {
    let sc = reshape_sectors(cube, plan)?;
    let rc = range_compress(&sc)?;
    let map = estimate(&rc, plan, estimator, iaa)?;
    associate(&map, &cube.cfg, grid)
}

/// Wideband pipeline: each subcarrier is imaged on its own and the `N`
/// energy images are averaged.
pub fn image_wideband(
    cube: &EchoCube,
    plan: &SectorPlan,
    grid: &RoiGrid,
    estimator: Estimator,
    iaa: &IaaOptions,
) -> Result<EnergyImage> {
    let sc = reshape_sectors(cube, plan)?;
    let cfg = &cube.cfg;
    let lookup = BinLookup::new(cfg, plan, grid)?;
    let n = grid.n_cells;
    let mut sum = Array2::<f64>::zeros((n, n));
    let count = cube.n_subcarriers();
    for sub in 0..count {
        let rc = range_compress_subcarriers(&sc, sub..sub + 1)?;
        let map = estimate(&rc, plan, estimator, iaa)?;
        let mags = map.g.mapv(|v| v.norm());
        let img = associate::associate_with(&mags, &lookup, cfg, plan, grid, estimator.name());
        sum += &img.values;
    }
    sum.mapv_inplace(|v| v / count as f64);
    let mut metadata = associate::metadata(cfg, plan, estimator.name());
    metadata.method = format!("wideband_{}", estimator.name());
    Ok(EnergyImage {
        values: sum,
        grid: grid.clone(),
        metadata,
    })
}
