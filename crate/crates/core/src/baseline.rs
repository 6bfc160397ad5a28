//! Coherent reference reconstructions that assume isotropic scattering.
//!
//! Each sector is a short arc of the full aperture. Linearizing the
//! plane-wave phase around the sector centre turns the window into Fourier
//! samples of the scene's projection along `Φ_k + π/2`, at spatial
//! frequencies proportional to `m`. Filtered back projection then weights
//! those samples with a ramp, transforms back to the projection coordinate
//! and sums all views coherently after removing the known carrier phase.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{RadarConfig, RoiGrid};
use crate::imaging::associate::{metadata, sector_angles};
use crate::imaging::{EnergyImage, RangeCompressed};

pub use crate::imaging::associate::coherent_sum as coherent_sum_baseline;

/// Ramp `|m|` (with `¼` at `m = 0`) times a Hann taper reaching zero just
/// past `±M`, the edge of the sampled band.
pub fn ramp_hann_weights(m_half: usize) -> Vec<f64> {
    let edge = (m_half + 1) as f64;
    (-(m_half as i64)..=m_half as i64)
        .map(|m| {
            let ramp = if m == 0 { 0.25 } else { m.unsigned_abs() as f64 };
            let hann = 0.5 * (1.0 + (PI * m as f64 / edge).cos());
            ramp * hann
        })
        .collect()
}

pub const FBP_FILTER_NOTE: &str = "filter: ramp |m| (0.25 at m = 0) x Hann over m, cutoff at the Doppler Nyquist";

/// Filtered back projection over all `K` views.
pub fn fbp_reconstruct(rc: &RangeCompressed, cfg: &RadarConfig, grid: &RoiGrid) -> Result<EnergyImage> {
    let plan = &rc.plan;
    plan.check_compatible(cfg)?;
    grid.check_unambiguous(cfg)?;
    if rc.t.dim() != (plan.window_len(), plan.k_sectors) {
        return Err(Error::invalid("compressed data does not match its plan"));
    }
    let weights = ramp_hann_weights(plan.m_half);
    let filtered: Array2<Complex64> = Array2::from_shape_fn(rc.t.dim(), |(mi, k)| rc.t[[mi, k]] * weights[mi]);
    let trig: Vec<(f64, f64)> = sector_angles(plan).iter().map(|a| a.sin_cos()).collect();
    let coords = grid.coordinates();
    let n = grid.n_cells;
    let wave = 4.0 * PI / cfg.wavelength() * cfg.radius_m / cfg.slant_range();
    let t0 = plan.t0();
    let scale = cfg.doppler_scale();
    let m_half = plan.m_half as i64;
    let norm = weights.iter().sum::<f64>() * plan.k_sectors as f64;

    let pixels: Vec<f64> = (0..n * n)
        .into_par_iter()
        .map(|p| {
            let (x, y) = (coords[p % n], coords[p / n]);
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, &(s, c)) in trig.iter().enumerate() {
                let u = -x * s + y * c;
                let step = Complex64::from_polar(1.0, -2.0 * PI * scale * u * t0);
                let mut rot = Complex64::from_polar(1.0, 2.0 * PI * scale * u * t0 * m_half as f64);
                let mut view = Complex64::new(0.0, 0.0);
                for mi in 0..weights.len() {
                    view += filtered[[mi, k]] * rot;
                    rot *= step;
                }
                acc += view * Complex64::from_polar(1.0, -wave * (x * c + y * s));
            }
            acc.norm() / norm
        })
        .collect();
    let mut meta = metadata(cfg, plan, "fbp");
    meta.notes.push(FBP_FILTER_NOTE.to_string());
    Ok(EnergyImage {
        values: Array2::from_shape_vec((n, n), pixels).expect("pixel count"),
        grid: grid.clone(),
        metadata: meta,
    })
}
