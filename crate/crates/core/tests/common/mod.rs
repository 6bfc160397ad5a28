//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use bisar::imaging::{AngleDopplerMap, Estimator, RangeCompressed};
use bisar::resolution::MapPipeline;
use bisar::{RadarConfig, Scene, SectorPlan};
use ndarray::Array2;
use num_complex::Complex64;

/// Matched-filter spectrum by direct summation, with the Doppler frequency
/// and the exponential evaluated from scratch for every term.
pub fn brute_force_dft(t: &Array2<Complex64>, t0: f64, bins: usize) -> Array2<Complex64> {
    let (len, k_count) = t.dim();
    let m_half = (len / 2) as i64;
    let mut g = Array2::zeros((bins, k_count));
    for k in 0..k_count {
        for i in 0..bins {
            let d = -0.5 / t0 + i as f64 / (bins as f64 * t0);
            let mut acc = Complex64::new(0.0, 0.0);
            for (row, m) in (-m_half..=m_half).enumerate() {
                let phase = -2.0 * PI * d * t0 * m as f64;
                acc += t[[row, k]] * Complex64::new(phase.cos(), phase.sin());
            }
            g[[i, k]] = acc / len as f64;
        }
    }
    g
}

pub fn max_relative_error(a: &Array2<Complex64>, b: &Array2<Complex64>) -> f64 {
    let scale = b.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / scale
}

/// `C_R` from the continuous-aperture DFT response: the mean over azimuth
/// of `|sinc(u·sin Φ)|` falls to `1/√2` at `u = C_R/2`.
pub fn c_r_quadrature(samples: usize) -> f64 {
    let response = |u: f64| {
        (0..samples)
            .map(|j| {
                let x = PI * u * (2.0 * PI * j as f64 / samples as f64).sin();
                if x.abs() < 1e-12 {
                    1.0
                } else {
                    (x.sin() / x).abs()
                }
            })
            .sum::<f64>()
            / samples as f64
    };
    let (mut lo, mut hi) = (0.01, 2.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if response(mid) >= FRAC_1_SQRT_2 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    2.0 * lo
}

/// Range-compressed data holding the given Doppler tones in every sector.
pub fn tones(plan: &SectorPlan, tones: &[(f64, Complex64)]) -> RangeCompressed {
    let m_half = plan.m_half as i64;
    let t0 = plan.t0();
    let t = Array2::from_shape_fn((plan.window_len(), plan.k_sectors), |(row, _)| {
        let m = row as i64 - m_half;
        tones
            .iter()
            .map(|&(d, a)| a * Complex64::from_polar(1.0, 2.0 * PI * d * t0 * m as f64))
            .sum()
    });
    RangeCompressed::from_matrix(t, plan).unwrap()
}

/// 29 GHz turntable reduced to one subcarrier.
pub fn turntable_1sc() -> RadarConfig {
    RadarConfig::mmwave_turntable().with_subcarriers(1, 97.6e3)
}

pub fn pipeline(cfg: &RadarConfig, plan: &SectorPlan, est: Estimator) -> impl MapPipeline {
    let cfg = cfg.clone();
    let plan = plan.clone();
    move |scene: &Scene, noise: &bisar::echo::NoiseSpec| -> bisar::Result<AngleDopplerMap> {
        let cube = bisar::echo::synthesize_farfield(scene, &cfg, noise)?;
        let rc = bisar::imaging::range_compress(&bisar::imaging::reshape_sectors(&cube, &plan)?)?;
        bisar::imaging::estimate(&rc, &plan, est, &Default::default())
    }
}
