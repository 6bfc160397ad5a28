//! Doppler association: map every pixel to its Doppler bin in each sector.

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{RadarConfig, RoiGrid, SectorPlan};
use crate::imaging::image::{EnergyImage, ImageMetadata};
use crate::imaging::spectrum::AngleDopplerMap;

/// Azimuth of the symbol a sector is centred on. This is `Φ_k` rounded to
/// the symbol grid, which is where the sector's Doppler estimate applies.
pub(crate) fn sector_angles(plan: &SectorPlan) -> Vec<f64> {
    (0..plan.k_sectors).map(|k| plan.center_symbol_angle(k)).collect()
}

/// Bin lookup `(pixel, sector) → i` for one grid and plan.
#[derive(Debug, Clone)]
pub struct BinLookup {
    /// `n_cells² × K`, pixel index `iy·n + ix`.
    bins: Array2<u32>,
}

impl BinLookup {
    pub fn new(cfg: &RadarConfig, plan: &SectorPlan, grid: &RoiGrid) -> Result<Self> {
        plan.check_compatible(cfg)?;
        grid.check_unambiguous(cfg)?;
        let angles = sector_angles(plan);
        let coords = grid.coordinates();
        let n = grid.n_cells;
        let mut bins = Array2::zeros((n * n, plan.k_sectors));
        for (k, &phi) in angles.iter().enumerate() {
            for iy in 0..n {
                for ix in 0..n {
                    let d = cfg.doppler_frequency(coords[ix], coords[iy], phi);
                    bins[[iy * n + ix, k]] = plan.doppler_bin(d) as u32;
                }
            }
        }
        Ok(BinLookup { bins })
    }

    pub fn bin(&self, pixel: usize, k: usize) -> usize {
        self.bins[[pixel, k]] as usize
    }
}

pub(crate) fn metadata(cfg: &RadarConfig, plan: &SectorPlan, method: &str) -> ImageMetadata {
    ImageMetadata {
        config_hash: cfg.digest(),
        method: method.to_string(),
        scene_label: String::new(),
        k_sectors: plan.k_sectors,
        m_half: plan.m_half,
        doppler_bins: plan.doppler_bins,
        notes: Vec::new(),
    }
}

fn check_map(map: &AngleDopplerMap) -> Result<()> {
    if map.g.dim() != (map.plan.doppler_bins, map.plan.k_sectors) {
        return Err(Error::invalid("angle-Doppler map does not match its plan"));
    }
    Ok(())
}

/// `G(x, y) = (1/K)·Σ_k |g(bin(x, y; Φ_k), k)|`.
pub fn associate(map: &AngleDopplerMap, cfg: &RadarConfig, grid: &RoiGrid) -> Result<EnergyImage> {
    check_map(map)?;
    let lookup = BinLookup::new(cfg, &map.plan, grid)?;
    let magnitudes = map.g.mapv(|v| v.norm());
    Ok(associate_with(&magnitudes, &lookup, cfg, &map.plan, grid, map.estimator.name()))
}

pub(crate) fn associate_with(
    magnitudes: &Array2<f64>,
    lookup: &BinLookup,
    cfg: &RadarConfig,
    plan: &SectorPlan,
    grid: &RoiGrid,
    method: &str,
) -> EnergyImage {
    let n = grid.n_cells;
    let k_count = plan.k_sectors;
    let pixels: Vec<f64> = (0..n * n)
        .into_par_iter()
        .map(|p| {
            let mut acc = 0.0;
            for k in 0..k_count {
                acc += magnitudes[[lookup.bin(p, k), k]];
            }
            acc / k_count as f64
        })
        .collect();
    EnergyImage {
        values: Array2::from_shape_vec((n, n), pixels).expect("pixel count"),
        grid: grid.clone(),
        metadata: metadata(cfg, plan, method),
    }
}

/// `G` at an arbitrary point, without building a grid.
pub fn associate_point(map: &AngleDopplerMap, cfg: &RadarConfig, x: f64, y: f64) -> f64 {
    let plan = &map.plan;
    let mut acc = 0.0;
    for (k, phi) in sector_angles(plan).into_iter().enumerate() {
        let i = plan.doppler_bin(cfg.doppler_frequency(x, y, phi));
        acc += map.g[[i, k]].norm();
    }
    acc / plan.k_sectors as f64
}

/// Like [`associate`] but sums complex values over sectors before the
/// magnitude. Each sector is first rotated by the known plane-wave phase of
/// the pixel, `e^{−j(4π/λ)(R/√(R²+H²))(x cosΦ_k + y sinΦ_k)}`, so a point
/// with constant reflectivity adds up in phase.
pub fn coherent_sum(map: &AngleDopplerMap, cfg: &RadarConfig, grid: &RoiGrid) -> Result<EnergyImage> {
    check_map(map)?;
    let plan = &map.plan;
    let lookup = BinLookup::new(cfg, plan, grid)?;
    let angles = sector_angles(plan);
    let coords = grid.coordinates();
    let n = grid.n_cells;
    let k_count = plan.k_sectors;
    let wave = 4.0 * std::f64::consts::PI / cfg.wavelength() * cfg.radius_m / cfg.slant_range();
    let trig: Vec<(f64, f64)> = angles.iter().map(|a| a.sin_cos()).collect();
    let pixels: Vec<f64> = (0..n * n)
        .into_par_iter()
        .map(|p| {
            let (x, y) = (coords[p % n], coords[p / n]);
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, (s, c)) in trig.iter().enumerate() {
                let rot = Complex64::from_polar(1.0, -wave * (x * c + y * s));
                acc += map.g[[lookup.bin(p, k), k]] * rot;
            }
            acc.norm() / k_count as f64
        })
        .collect();
    Ok(EnergyImage {
        values: Array2::from_shape_vec((n, n), pixels).expect("pixel count"),
        grid: grid.clone(),
        metadata: metadata(cfg, plan, "coherent_sum"),
    })
}
