//! Post-FFT echo synthesis: one complex sample per (subcarrier, symbol).

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use ndarray::{Array2, ArrayViewMut1, Axis};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use ndarray::parallel::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{RadarConfig, SPEED_OF_LIGHT};
use crate::scene::Scene;

/// Which distance model produced a cube.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fidelity {
    /// Exact range in both the carrier and the subcarrier phase.
    Exact,
    /// Exact range in the carrier phase, common range across subcarriers.
    BandLimited,
    /// Plane-wave range in the carrier phase, common range across subcarriers.
    FarField,
}

impl Fidelity {
    pub fn tag(self) -> u8 {
        match self {
            Fidelity::Exact => 0,
            Fidelity::BandLimited => 1,
            Fidelity::FarField => 2,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(Fidelity::Exact),
            1 => Some(Fidelity::BandLimited),
            2 => Some(Fidelity::FarField),
            _ => None,
        }
    }
}

/// Modulation of the transmitted data samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymbolScheme {
    UnitConstant,
    Qpsk,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Per-sample SNR relative to the mean signal power; `None` for a clean cube.
    pub snr_db: Option<f64>,
    pub seed: u64,
}

impl NoiseSpec {
    pub const NONE: NoiseSpec = NoiseSpec { snr_db: None, seed: 0 };

    pub fn snr(snr_db: f64, seed: u64) -> Self {
        NoiseSpec {
            snr_db: Some(snr_db),
            seed,
        }
    }
}

/// Received samples `s[n][ℓ]` together with the data symbols that modulated them.
#[derive(Debug, Clone, PartialEq)]
pub struct EchoCube {
    /// `N × L`.
    pub samples: Array2<Complex64>,
    pub data_symbols: Array2<Complex64>,
    pub cfg: RadarConfig,
    pub fidelity: Fidelity,
}

impl EchoCube {
    pub fn n_subcarriers(&self) -> usize {
        self.samples.nrows()
    }

    pub fn n_symbols(&self) -> usize {
        self.samples.ncols()
    }

    pub fn validate(&self) -> Result<()> {
        let shape = (self.cfg.n_subcarriers, self.cfg.n_symbols);
        if self.samples.dim() != shape || self.data_symbols.dim() != shape {
            return Err(Error::invalid(format!(
                "cube is {:?} but the configuration asks for {shape:?}",
                self.samples.dim()
            )));
        }
        if self.data_symbols.iter().any(|c| c.norm_sqr() == 0.0) {
            return Err(Error::invalid("data symbols must be non-zero"));
        }
        Ok(())
    }

    pub fn mean_power(&self) -> f64 {
        mean_power(&self.samples)
    }
}

fn mean_power(a: &Array2<Complex64>) -> f64 {
    a.iter().map(|c| c.norm_sqr()).sum::<f64>() / a.len() as f64
}

/// Seed-derived RNG with an independent stream per column, so results do
/// not depend on how columns are scheduled across threads.
fn column_rng(seed: u64, domain: u64, column: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ domain.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    rng.set_stream(column as u64);
    rng
}

const SYMBOL_DOMAIN: u64 = 1;
const NOISE_DOMAIN: u64 = 2;

/// Unit-modulus data samples `c[n][ℓ]`.
pub fn gen_data_symbols(cfg: &RadarConfig, scheme: SymbolScheme, seed: u64) -> Array2<Complex64> {
    let (n, l) = (cfg.n_subcarriers, cfg.n_symbols);
    match scheme {
        SymbolScheme::UnitConstant => Array2::from_elem((n, l), Complex64::new(1.0, 0.0)),
        SymbolScheme::Qpsk => {
            let mut out = Array2::zeros((n, l));
            out.axis_iter_mut(Axis(1))
                .into_par_iter()
                .enumerate()
                .for_each(|(ell, mut col)| {
                    let mut rng = column_rng(seed, SYMBOL_DOMAIN, ell);
                    for c in col.iter_mut() {
                        let bits: u8 = rng.random_range(0..4);
                        let re = if bits & 1 == 0 { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 };
                        let im = if bits & 2 == 0 { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 };
                        *c = Complex64::new(re, im);
                    }
                });
            out
        }
    }
}

/// Adds circular complex Gaussian noise at `noise.snr_db` below the mean
/// signal power. A spec without SNR leaves the cube untouched.
pub fn add_awgn(mut cube: EchoCube, noise: &NoiseSpec) -> Result<EchoCube> {
    let Some(snr_db) = noise.snr_db else {
        return Ok(cube);
    };
    if !snr_db.is_finite() {
        return Err(Error::invalid("snr_db must be finite"));
    }
    let power = cube.mean_power() / 10f64.powf(snr_db / 10.0);
    let sigma = (power / 2.0).sqrt();
    cube.samples
        .axis_iter_mut(Axis(1))
        .into_par_iter()
        .enumerate()
        .for_each(|(ell, mut col)| {
            let mut rng = column_rng(noise.seed, NOISE_DOMAIN, ell);
            for c in col.iter_mut() {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                *c += Complex64::new(sigma * re, sigma * im);
            }
        });
    Ok(cube)
}

/// Options shared by the synthesis entry points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthesisOptions {
    pub scheme: SymbolScheme,
    pub symbol_seed: u64,
    pub noise: NoiseSpec,
    /// Skip the narrowband extent check; set by the wideband path.
    pub allow_wide_scene: bool,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        SynthesisOptions {
            scheme: SymbolScheme::UnitConstant,
            symbol_seed: 0,
            noise: NoiseSpec::NONE,
            allow_wide_scene: false,
        }
    }
}

pub fn synthesize(scene: &Scene, cfg: &RadarConfig, fidelity: Fidelity, opts: &SynthesisOptions) -> Result<EchoCube> {
    cfg.validate()?;
    scene.validate()?;
    if scene.is_empty() {
        return Err(Error::invalid("cannot synthesize an empty scene"));
    }
    if fidelity != Fidelity::Exact && !opts.allow_wide_scene {
        let extent = scene.extent();
        let cell = cfg.range_resolution();
        if extent >= cell {
            return Err(Error::invalid(format!(
                "scene extent {extent:.3} m is not below the range resolution {cell:.3} m; \
                 use exact synthesis or the wideband path"
            )));
        }
    }
    let data_symbols = gen_data_symbols(cfg, opts.scheme, opts.symbol_seed);
    let mut samples = Array2::<Complex64>::zeros((cfg.n_subcarriers, cfg.n_symbols));
    samples
        .axis_iter_mut(Axis(1))
        .into_par_iter()
        .zip(data_symbols.axis_iter(Axis(1)))
        .enumerate()
        .for_each(|(ell, (mut col, symbols))| {
            let phi = cfg.angle_step() * ell as f64;
            match fidelity {
                Fidelity::Exact => exact_column(scene, cfg, phi, &mut col),
                _ => common_range_column(scene, cfg, phi, fidelity, &mut col),
            }
            for (s, c) in col.iter_mut().zip(symbols.iter()) {
                *s *= c * cfg.path_loss;
            }
        });
    let cube = EchoCube {
        samples,
        data_symbols,
        cfg: cfg.clone(),
        fidelity,
    };
    add_awgn(cube, &opts.noise)
}

pub fn synthesize_exact(scene: &Scene, cfg: &RadarConfig, noise: &NoiseSpec) -> Result<EchoCube> {
    let opts = SynthesisOptions {
        noise: *noise,
        ..Default::default()
    };
    synthesize(scene, cfg, Fidelity::Exact, &opts)
}

pub fn synthesize_farfield(scene: &Scene, cfg: &RadarConfig, noise: &NoiseSpec) -> Result<EchoCube> {
    let opts = SynthesisOptions {
        noise: *noise,
        ..Default::default()
    };
    synthesize(scene, cfg, Fidelity::FarField, &opts)
}

/// Exact path length from the transmitter at azimuth `phi` to `p`.
pub fn exact_range(cfg: &RadarConfig, phi: f64, p: [f64; 3]) -> f64 {
    let bs = cfg.position_at(phi);
    let d: f64 = (0..3).map(|c| (bs[c] - p[c]).powi(2)).sum();
    d.sqrt()
}

/// Plane-wave range `√(R²+H²) − (R(x cosφ + y sinφ) + Hz)/√(R²+H²)`.
pub fn farfield_range(cfg: &RadarConfig, phi: f64, p: [f64; 3]) -> f64 {
    let rho = cfg.slant_range();
    let (s, c) = phi.sin_cos();
    rho - (cfg.radius_m * (p[0] * c + p[1] * s) + cfg.height_m * p[2]) / rho
}

fn exact_column(scene: &Scene, cfg: &RadarConfig, phi: f64, col: &mut ArrayViewMut1<Complex64>) {
    let k = 4.0 * PI / cfg.wavelength();
    let tau_scale = 2.0 * PI * cfg.delta_f_hz * 2.0 / SPEED_OF_LIGHT;
    col.fill(Complex64::new(0.0, 0.0));
    for s in &scene.scatterers {
        let f = s.eval(phi);
        if f == Complex64::new(0.0, 0.0) {
            continue;
        }
        let d = exact_range(cfg, phi, s.position);
        let base = f * Complex64::from_polar(1.0, -k * d);
        let step = Complex64::from_polar(1.0, -tau_scale * d);
        let mut rot = base;
        for (n, c) in col.iter_mut().enumerate() {
            // resynchronize the phasor periodically to bound rounding drift
            if n % 64 == 0 {
                rot = base * Complex64::from_polar(1.0, -tau_scale * d * n as f64);
            }
            *c += rot;
            rot *= step;
        }
    }
}

fn common_range_column(
    scene: &Scene,
    cfg: &RadarConfig,
    phi: f64,
    fidelity: Fidelity,
    col: &mut ArrayViewMut1<Complex64>,
) {
    let k = 4.0 * PI / cfg.wavelength();
    let rho = cfg.slant_range();
    let sum: Complex64 = scene
        .scatterers
        .iter()
        .map(|s| {
            let d = match fidelity {
                Fidelity::FarField => farfield_range(cfg, phi, s.position),
                _ => exact_range(cfg, phi, s.position),
            };
            s.eval(phi) * Complex64::from_polar(1.0, -k * d)
        })
        .sum();
    let step = -2.0 * PI * cfg.delta_f_hz * 2.0 * rho / SPEED_OF_LIGHT;
    for (n, c) in col.iter_mut().enumerate() {
        *c = sum * Complex64::from_polar(1.0, step * n as f64);
    }
}
