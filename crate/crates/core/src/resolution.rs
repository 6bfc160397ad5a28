//! Point spread functions, −3 dB contour resolution and two-point sweeps.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt::Write as _;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::echo::NoiseSpec;
use crate::error::{Error, Result};
use crate::geometry::{RadarConfig, SectorPlan, SPEED_OF_LIGHT};
use crate::imaging::{associate_point, AngleDopplerMap, Estimator};
use crate::scene::{Scatterer, ScatteringModel, Scene};

/// Empirical width constant of the DFT point spread function.
pub const C_R: f64 = 1.29;

/// `C_R·λ/(4δ_SA)·√(1 + H²/R²)`.
pub fn benchmark_resolution(cfg: &RadarConfig, plan: &SectorPlan) -> f64 {
    benchmark_resolution_for(cfg.wavelength(), plan.delta_sa_rad, cfg.elevation_factor())
}

pub fn benchmark_resolution_for(wavelength: f64, delta_sa_rad: f64, elevation_factor: f64) -> f64 {
    C_R * wavelength / (4.0 * delta_sa_rad) * elevation_factor
}

/// Bandwidth a range-only system would need for resolution `delta_m`: `c/(2δ)`.
pub fn equivalent_bandwidth(delta_m: f64) -> Result<f64> {
    if !(delta_m > 0.0) || !delta_m.is_finite() {
        return Err(Error::invalid("resolution must be positive"));
    }
    Ok(SPEED_OF_LIGHT / (2.0 * delta_m))
}

/// Resolution predicted from the benchmark and the anisotropy and
/// super-resolution factors, `κ_I·κ_S·δ_benchmark`.
pub fn predicted_resolution(benchmark_m: f64, kappa_i: f64, kappa_s: f64) -> f64 {
    kappa_i * kappa_s * benchmark_m
}

/// Metres per unit of Doppler·time: `β = (λ/(2ω))·√(1 + H²/R²)`.
pub fn beta(cfg: &RadarConfig) -> f64 {
    cfg.wavelength() / (2.0 * cfg.omega_rad_s.abs()) * cfg.elevation_factor()
}

/// Maps a scene to an angle-Doppler map; the PSF and sweep routines only
/// ever talk to the imaging chain through this.
pub trait MapPipeline: Sync {
    fn run(&self, scene: &Scene, noise: &NoiseSpec) -> Result<AngleDopplerMap>;
}

impl<F> MapPipeline for F
where
    F: Fn(&Scene, &NoiseSpec) -> Result<AngleDopplerMap> + Sync,
{
    fn run(&self, scene: &Scene, noise: &NoiseSpec) -> Result<AngleDopplerMap> {
        self(scene, noise)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsfProfile {
    pub probe: [f64; 2],
    /// `G` at the probe before normalization.
    pub peak: f64,
    pub beta: f64,
    /// Ray angles `α`, uniform over `[0, 2π)`, even count.
    pub angles: Vec<f64>,
    /// Distance from the probe to the −3 dB contour along each ray.
    pub zeta: Vec<f64>,
    /// Normalized PSF on a square patch centred on the probe, rows along y.
    pub patch: Array2<f64>,
    pub patch_half_extent: f64,
}

impl PsfProfile {
    /// `max_α ζ(α) + ζ(α + π)`.
    pub fn full_width(&self) -> f64 {
        let half = self.angles.len() / 2;
        (0..half).map(|i| self.zeta[i] + self.zeta[i + half]).fold(0.0, f64::max)
    }

    pub fn mean_full_width(&self) -> f64 {
        2.0 * self.zeta.iter().sum::<f64>() / self.zeta.len() as f64
    }

    /// Largest relative deviation of `ζ(α)` from its mean.
    pub fn contour_spread(&self) -> f64 {
        let mean = self.zeta.iter().sum::<f64>() / self.zeta.len() as f64;
        self.zeta.iter().map(|z| (z - mean).abs() / mean).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsfOptions {
    pub n_angles: usize,
    /// Initial outward step along each ray.
    pub step_m: f64,
    /// Give up on a ray beyond this distance.
    pub max_radius_m: f64,
    pub patch_cells: usize,
    pub patch_half_extent_m: f64,
}

impl PsfOptions {
    /// Defaults scaled to the expected resolution `delta`.
    pub fn for_resolution(delta: f64) -> Self {
        PsfOptions {
            n_angles: 72,
            step_m: delta / 50.0,
            max_radius_m: 3.0 * delta,
            patch_cells: 41,
            patch_half_extent_m: delta,
        }
    }
}

/// Images a single scatterer at `probe` and measures the −3 dB contour of
/// the normalized response around it.
pub fn numerical_psf(
    pipeline: &impl MapPipeline,
    cfg: &RadarConfig,
    probe: [f64; 2],
    scattering: ScatteringModel,
    opts: &PsfOptions,
) -> Result<PsfProfile> {
    if probe[0].hypot(probe[1]) >= cfg.unambiguous_radius() {
        return Err(Error::Aliasing("probe lies outside the unambiguous region".into()));
    }
    if opts.n_angles < 2 || opts.n_angles % 2 != 0 {
        return Err(Error::invalid("n_angles must be even and at least 2"));
    }
    let scene = Scene::new("psf", vec![Scatterer::new([probe[0], probe[1], 0.0], scattering)]);
    let map = pipeline.run(&scene, &NoiseSpec::NONE)?;
    let eval = |x: f64, y: f64| associate_point(&map, cfg, x, y);
    let peak = eval(probe[0], probe[1]);
    if !(peak > 0.0) {
        return Err(Error::Aliasing("no response at the probe".into()));
    }

    let n = opts.patch_cells;
    let h = opts.patch_half_extent_m;
    let coord = |i: usize| -h + 2.0 * h * i as f64 / (n - 1) as f64;
    let patch = Array2::from_shape_fn((n, n), |(iy, ix)| eval(probe[0] + coord(ix), probe[1] + coord(iy)) / peak);
    let top = patch.iter().copied().fold(0.0, f64::max);
    if top > 1.01 {
        return Err(Error::Aliasing(format!(
            "response near the probe exceeds the probe value by {:.1}%",
            (top - 1.0) * 100.0
        )));
    }

    let level = FRAC_1_SQRT_2 * peak;
    let angles: Vec<f64> = (0..opts.n_angles).map(|i| 2.0 * PI * i as f64 / opts.n_angles as f64).collect();
    let zeta = angles
        .par_iter()
        .map(|&a| {
            let (s, c) = a.sin_cos();
            let at = |r: f64| eval(probe[0] + r * c, probe[1] + r * s);
            let mut inside = 0.0;
            let mut outside = opts.step_m;
            while at(outside) >= level {
                inside = outside;
                outside += opts.step_m;
                if outside > opts.max_radius_m {
                    return Err(Error::invalid("−3 dB contour not reached within max_radius_m"));
                }
            }
            for _ in 0..50 {
                let mid = 0.5 * (inside + outside);
                if at(mid) >= level {
                    inside = mid;
                } else {
                    outside = mid;
                }
            }
            Ok(0.5 * (inside + outside))
        })
        .collect::<Result<Vec<f64>>>()?;

    Ok(PsfProfile {
        probe,
        peak,
        beta: beta(cfg),
        angles,
        zeta,
        patch,
        patch_half_extent: h,
    })
}

/// Two-point separability: both halves of `profile` must hold a maximum
/// and the lowest value between them must sit at least `saddle_db` below
/// the weaker one (amplitude decibels).
pub fn is_resolved(profile: &[f64], saddle_db: f64) -> bool {
    let n = profile.len();
    if n < 5 {
        return false;
    }
    let mid = n / 2;
    let argmax = |range: std::ops::Range<usize>| {
        range
            .clone()
            .fold(range.start, |best, i| if profile[i] > profile[best] { i } else { best })
    };
    let a = argmax(0..mid);
    let b = argmax(mid + 1..n);
    let saddle = profile[a..=b].iter().copied().fold(f64::INFINITY, f64::min);
    let weaker = profile[a].min(profile[b]);
    weaker > 0.0 && saddle <= weaker * 10f64.powf(-saddle_db / 20.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub spacings_m: Vec<f64>,
    pub trials: usize,
    pub snr_db: Option<f64>,
    pub seed: u64,
    /// Saddle depth, in dB below the weaker peak, that counts as resolved.
    pub saddle_db: f64,
    /// Pair centres are drawn uniformly from `[−j, j]²`.
    pub center_jitter_m: f64,
    /// Samples along the line through the pair, spanning twice the spacing.
    pub profile_samples: usize,
    /// Scattering of both points.
    pub scattering: ScatteringModel,
}

impl SweepSpec {
    pub fn isotropic(spacings_m: Vec<f64>, trials: usize, snr_db: Option<f64>, seed: u64) -> Self {
        SweepSpec {
            spacings_m,
            trials,
            snr_db,
            seed,
            saddle_db: 3.0,
            center_jitter_m: 0.05,
            profile_samples: 401,
            scattering: ScatteringModel::isotropic(1.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub spacing_m: f64,
    pub success_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCurve {
    pub estimator: Estimator,
    pub delta_sa_deg: f64,
    pub points: Vec<SweepPoint>,
}

pub const SUCCESS_LEVEL: f64 = 0.9;

impl SweepCurve {
    /// Smallest swept spacing from which every larger spacing succeeds in
    /// at least 90% of trials.
    pub fn resolution(&self) -> Option<f64> {
        let mut found = None;
        for p in self.points.iter().rev() {
            if p.success_rate >= SUCCESS_LEVEL {
                found = Some(p.spacing_m);
            } else {
                break;
            }
        }
        found
    }

    /// Spacing where the curve climbs through 90% for the last time,
    /// linearly interpolated between the bracketing sweep points.
    pub fn crossing(&self) -> Option<f64> {
        let first_ok = self.resolution()?;
        let idx = self.points.iter().position(|p| p.spacing_m == first_ok)?;
        if idx == 0 {
            return Some(first_ok);
        }
        let (lo, hi) = (&self.points[idx - 1], &self.points[idx]);
        let t = (SUCCESS_LEVEL - lo.success_rate) / (hi.success_rate - lo.success_rate);
        Some(lo.spacing_m + t * (hi.spacing_m - lo.spacing_m))
    }

    pub fn to_csv_rows(&self, out: &mut String) {
        for p in &self.points {
            writeln!(
                out,
                "{:.6},{:.4},{},{:.4}",
                p.spacing_m,
                p.success_rate,
                self.estimator.name(),
                self.delta_sa_deg
            )
            .unwrap();
        }
    }
}

pub const SWEEP_CSV_HEADER: &str = "spacing_m,success_rate,estimator,delta_sa_deg\n";

pub fn sweep_csv(curves: &[SweepCurve]) -> String {
    let mut out = SWEEP_CSV_HEADER.to_string();
    for c in curves {
        c.to_csv_rows(&mut out);
    }
    out
}

/// Runs `spec.trials` two-point trials per spacing. Trial `t` at spacing
/// index `s` draws its geometry and noise from stream `s·trials + t` of
/// `spec.seed`, so results do not depend on scheduling.
pub fn measure_resolution(
    pipeline: &impl MapPipeline,
    cfg: &RadarConfig,
    plan: &SectorPlan,
    estimator: Estimator,
    spec: &SweepSpec,
) -> Result<SweepCurve> {
    if spec.spacings_m.is_empty() || spec.trials == 0 {
        return Err(Error::invalid("sweep needs at least one spacing and one trial"));
    }
    let diameter = 2.0 * cfg.unambiguous_radius();
    if spec
        .spacings_m
        .iter()
        .any(|&d| !(d > 0.0) || d + 2.0 * spec.center_jitter_m * std::f64::consts::SQRT_2 >= diameter)
    {
        return Err(Error::invalid("spacings must lie in (0, unambiguous diameter)"));
    }
    let jobs: Vec<(usize, usize)> = (0..spec.spacings_m.len())
        .flat_map(|s| (0..spec.trials).map(move |t| (s, t)))
        .collect();
    let outcomes = jobs
        .par_iter()
        .map(|&(s, t)| {
            let stream = (s * spec.trials + t) as u64;
            two_point_trial(pipeline, cfg, spec.spacings_m[s], spec, stream)
        })
        .collect::<Result<Vec<bool>>>()?;
    let points = spec
        .spacings_m
        .iter()
        .enumerate()
        .map(|(s, &d)| {
            let ok = outcomes[s * spec.trials..(s + 1) * spec.trials].iter().filter(|&&b| b).count();
            SweepPoint {
                spacing_m: d,
                success_rate: ok as f64 / spec.trials as f64,
            }
        })
        .collect();
    Ok(SweepCurve {
        estimator,
        delta_sa_deg: plan.delta_sa_rad.to_degrees(),
        points,
    })
}

fn two_point_trial(pipeline: &impl MapPipeline, cfg: &RadarConfig, spacing: f64, spec: &SweepSpec, stream: u64) -> Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(stream);
    let theta: f64 = rng.random_range(0.0..PI);
    let j = spec.center_jitter_m;
    let (cx, cy): (f64, f64) = if j > 0.0 {
        (rng.random_range(-j..j), rng.random_range(-j..j))
    } else {
        (0.0, 0.0)
    };
    let noise_seed: u64 = rng.random();
    let (s, c) = theta.sin_cos();
    let half = spacing / 2.0;
    let scene = Scene::new(
        "pair",
        vec![
            Scatterer::new([cx - c * half, cy - s * half, 0.0], spec.scattering.clone()),
            Scatterer::new([cx + c * half, cy + s * half, 0.0], spec.scattering.clone()),
        ],
    );
    let noise = NoiseSpec {
        snr_db: spec.snr_db,
        seed: noise_seed,
    };
    let map = pipeline.run(&scene, &noise)?;
    let n = spec.profile_samples.max(5) | 1;
    let profile: Vec<f64> = (0..n)
        .map(|i| {
            let t = -1.0 + 2.0 * i as f64 / (n - 1) as f64;
            associate_point(&map, cfg, cx + t * spacing * c, cy + t * spacing * s)
        })
        .collect();
    Ok(is_resolved(&profile, spec.saddle_db))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolutionReport {
    pub delta_measured_m: f64,
    pub delta_benchmark_m: f64,
    /// Anisotropic over isotropic DFT resolution, when both were measured.
    pub kappa_i: Option<f64>,
    /// IAA over DFT resolution, when both were measured.
    pub kappa_s: Option<f64>,
    /// `C_R` implied by a measured isotropic DFT width.
    pub c_r_estimate: Option<f64>,
    pub esb_hz: f64,
}

impl ResolutionReport {
    pub fn new(delta_measured_m: f64, delta_benchmark_m: f64) -> Result<Self> {
        Ok(ResolutionReport {
            delta_measured_m,
            delta_benchmark_m,
            kappa_i: None,
            kappa_s: None,
            c_r_estimate: None,
            esb_hz: equivalent_bandwidth(delta_measured_m)?,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}
