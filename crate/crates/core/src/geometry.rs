//! Acquisition geometry: the radio/trajectory parameters of one full
//! revolution, the azimuth sector schedule, and the imaging grid.
//!
//! Conventions used throughout the crate:
//!
//! * The base station (or, equivalently, the turntable) starts at
//!   `[R, 0, H]` and symbol `ℓ` sees azimuth `φ_ℓ = ω·T0·ℓ`, unwrapped.
//! * The Doppler of a scatterer at `(x, y)` seen from azimuth `Φ` is
//!   `D = (2ω/λ)·(−x sinΦ + y cosΦ)/√(1 + H²/R²)`.
//! * `T0` alone sets the Doppler sampling interval; the cyclic prefix is
//!   carried as metadata only.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Speed of light in vacuum [m/s].
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Largest small-angle half width we accept, 3° in radians.
pub const MAX_DELTA_SA_RAD: f64 = 3.0 * PI / 180.0;

/// Radio and trajectory parameters of one acquisition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadarConfig {
    /// Carrier frequency of the first subcarrier.
    pub f0_hz: f64,
    pub delta_f_hz: f64,
    pub n_subcarriers: usize,
    pub n_symbols: usize,
    /// Interval between the symbols used for imaging.
    pub t0_s: f64,
    /// Cyclic prefix duration; kept for bookkeeping, not used by the Doppler math.
    #[serde(default)]
    pub tc_s: f64,
    pub radius_m: f64,
    pub height_m: f64,
    /// Signed angular velocity, positive for counter-clockwise motion.
    pub omega_rad_s: f64,
    #[serde(default = "unit_path_loss")]
    pub path_loss: f64,
}

fn unit_path_loss() -> f64 {
    1.0
}

/// Number of symbols needed to cover a full revolution, `⌈2π / (|ω|·T0)⌉`.
///
/// Ratios within a relative `1e-9` of an integer are treated as that integer,
/// so `ω = 2π/20`, `T0 = 5 ms` gives exactly 4000.
pub fn symbols_per_revolution(omega_rad_s: f64, t0_s: f64) -> usize {
    let ratio = 2.0 * PI / (omega_rad_s.abs() * t0_s);
    let nearest = ratio.round();
    if (ratio - nearest).abs() <= 1e-9 * ratio {
        nearest as usize
    } else {
        ratio.ceil() as usize
    }
}

impl RadarConfig {
    /// The 29 GHz turntable setup: 1024 subcarriers at 97.6 kHz, one
    /// revolution in 20 s sampled every 5 ms (4000 symbols). The range is
    /// set far enough that the plane-wave model holds for a desk-sized ROI.
    pub fn mmwave_turntable() -> Self {
        let omega = 2.0 * PI / 20.0;
        let t0 = 5e-3;
        RadarConfig {
            f0_hz: 29e9,
            delta_f_hz: 97.6e3,
            n_subcarriers: 1024,
            n_symbols: symbols_per_revolution(omega, t0),
            t0_s: t0,
            tc_s: 0.0,
            radius_m: 100.0,
            height_m: 0.0,
            omega_rad_s: omega,
            path_loss: 1.0,
        }
    }

    /// Same configuration with a different subcarrier layout.
    pub fn with_subcarriers(mut self, n_subcarriers: usize, delta_f_hz: f64) -> Self {
        self.n_subcarriers = n_subcarriers;
        self.delta_f_hz = delta_f_hz;
        self
    }

    /// Recompute `n_symbols` for a full revolution at the current `ω` and `T0`.
    pub fn full_revolution(mut self) -> Self {
        self.n_symbols = symbols_per_revolution(self.omega_rad_s, self.t0_s);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.f0_hz,
            self.delta_f_hz,
            self.t0_s,
            self.tc_s,
            self.radius_m,
            self.height_m,
            self.omega_rad_s,
            self.path_loss,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("radar parameters must be finite"));
        }
        if self.f0_hz <= 0.0 || self.delta_f_hz <= 0.0 {
            return Err(Error::invalid("f0_hz and delta_f_hz must be positive"));
        }
        if self.n_subcarriers == 0 || self.n_symbols == 0 {
            return Err(Error::invalid("n_subcarriers and n_symbols must be at least 1"));
        }
        if self.t0_s <= 0.0 || self.tc_s < 0.0 {
            return Err(Error::invalid("t0_s must be positive and tc_s non-negative"));
        }
        if self.radius_m <= 0.0 {
            return Err(Error::invalid("radius_m must be positive"));
        }
        if self.omega_rad_s == 0.0 {
            return Err(Error::invalid("omega_rad_s must be non-zero"));
        }
        if self.path_loss == 0.0 {
            return Err(Error::invalid("path_loss must be non-zero"));
        }
        Ok(())
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.f0_hz
    }

    /// `√(1 + H²/R²)`.
    pub fn elevation_factor(&self) -> f64 {
        let r = self.height_m / self.radius_m;
        (1.0 + r * r).sqrt()
    }

    /// Distance from the trajectory to the ROI centre, `√(R² + H²)`.
    pub fn slant_range(&self) -> f64 {
        self.radius_m.hypot(self.height_m)
    }

    pub fn bandwidth(&self) -> f64 {
        self.n_subcarriers as f64 * self.delta_f_hz
    }

    /// Range resolution of the occupied band, `c / (2B)`.
    pub fn range_resolution(&self) -> f64 {
        SPEED_OF_LIGHT / (2.0 * self.bandwidth())
    }

    /// Azimuth step between consecutive symbols, `ω·T0` (signed).
    pub fn angle_step(&self) -> f64 {
        self.omega_rad_s * self.t0_s
    }

    /// Doppler per metre of cross-range offset, `2ω / (λ·√(1 + H²/R²))`.
    pub fn doppler_scale(&self) -> f64 {
        2.0 * self.omega_rad_s / (self.wavelength() * self.elevation_factor())
    }

    /// Azimuth of symbol `ell`, not wrapped.
    pub fn azimuth_angle(&self, ell: usize) -> Result<f64> {
        self.check_symbol(ell)?;
        Ok(self.angle_step() * ell as f64)
    }

    /// Position of the transmitter at symbol `ell`: `R(φ_ℓ)·[R, 0, H]ᵀ`.
    pub fn bs_position(&self, ell: usize) -> Result<[f64; 3]> {
        let phi = self.azimuth_angle(ell)?;
        Ok(self.position_at(phi))
    }

    pub(crate) fn position_at(&self, phi: f64) -> [f64; 3] {
        let (s, c) = phi.sin_cos();
        [self.radius_m * c, self.radius_m * s, self.height_m]
    }

    /// Doppler frequency of a scatterer at `(x, y)` seen from azimuth `phi`.
    pub fn doppler_frequency(&self, x: f64, y: f64, phi: f64) -> f64 {
        let (s, c) = phi.sin_cos();
        self.doppler_scale() * (-x * s + y * c)
    }

    /// Radius of the disc inside which the Doppler stays below `1/(2T0)`
    /// for every azimuth: `λ·√(1 + H²/R²) / (4|ω|T0)`.
    pub fn unambiguous_radius(&self) -> f64 {
        self.wavelength() * self.elevation_factor() / (4.0 * self.omega_rad_s.abs() * self.t0_s)
    }

    fn check_symbol(&self, ell: usize) -> Result<()> {
        if ell >= self.n_symbols {
            return Err(Error::IndexOutOfRange {
                what: "symbol",
                index: ell as i64,
                len: self.n_symbols,
            });
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form, hex encoded.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}

/// Azimuth sector schedule: `K` centres `Φ_k = 2πk/K`, each observed over
/// `2M + 1` symbols, and the `I`-point Doppler grid the spectra live on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorPlan {
    pub k_sectors: usize,
    pub delta_sa_rad: f64,
    /// Symbols per half sector, `M = round(δ_SA / (|ω|·T0))`.
    pub m_half: usize,
    pub doppler_bins: usize,
    /// Doppler grid step `1 / (I·T0)`.
    pub f_delta_hz: f64,
    t0_s: f64,
    angle_step: f64,
}

impl SectorPlan {
    /// Plan from the small-angle half width `δ_SA` in radians.
    pub fn new(cfg: &RadarConfig, k_sectors: usize, delta_sa_rad: f64, doppler_bins: usize) -> Result<Self> {
        cfg.validate()?;
        if !(delta_sa_rad > 0.0) {
            return Err(Error::invalid("delta_sa must be positive"));
        }
        if delta_sa_rad > MAX_DELTA_SA_RAD * (1.0 + 1e-12) {
            return Err(Error::invalid(format!(
                "delta_sa = {:.4}° exceeds the 3° small-angle limit",
                delta_sa_rad.to_degrees()
            )));
        }
        let m_half = (delta_sa_rad / cfg.angle_step().abs()).round() as usize;
        Self::build(cfg, k_sectors, delta_sa_rad, m_half, doppler_bins)
    }

    /// Plan from an explicit half sector length `M`; `δ_SA` is set to `M·|ω|·T0`.
    pub fn from_half_width(cfg: &RadarConfig, k_sectors: usize, m_half: usize, doppler_bins: usize) -> Result<Self> {
        cfg.validate()?;
        let delta_sa_rad = m_half as f64 * cfg.angle_step().abs();
        if delta_sa_rad > MAX_DELTA_SA_RAD * (1.0 + 1e-12) {
            return Err(Error::invalid("half width exceeds the 3° small-angle limit"));
        }
        Self::build(cfg, k_sectors, delta_sa_rad, m_half, doppler_bins)
    }

    fn build(cfg: &RadarConfig, k_sectors: usize, delta_sa_rad: f64, m_half: usize, doppler_bins: usize) -> Result<Self> {
        if k_sectors == 0 {
            return Err(Error::invalid("k_sectors must be at least 1"));
        }
        if m_half == 0 {
            return Err(Error::invalid("delta_sa covers less than one symbol step"));
        }
        let window = 2 * m_half + 1;
        if window > cfg.n_symbols {
            return Err(Error::invalid(format!(
                "sector window of {window} symbols exceeds the {} available",
                cfg.n_symbols
            )));
        }
        if doppler_bins < window {
            return Err(Error::invalid(format!(
                "doppler_bins = {doppler_bins} must be at least the window length {window}"
            )));
        }
        if doppler_bins % 2 != 0 {
            return Err(Error::invalid("doppler_bins must be even so that 0 Hz is a grid point"));
        }
        Ok(SectorPlan {
            k_sectors,
            delta_sa_rad,
            m_half,
            doppler_bins,
            f_delta_hz: 1.0 / (doppler_bins as f64 * cfg.t0_s),
            t0_s: cfg.t0_s,
            angle_step: cfg.angle_step(),
        })
    }

    /// Errors unless this plan was built for `cfg`'s sampling.
    pub fn check_compatible(&self, cfg: &RadarConfig) -> Result<()> {
        if self.t0_s != cfg.t0_s || self.angle_step != cfg.angle_step() {
            return Err(Error::invalid("sector plan was built for a different radar configuration"));
        }
        if self.window_len() > cfg.n_symbols {
            return Err(Error::invalid("sector window longer than the acquisition"));
        }
        Ok(())
    }

    /// `2M + 1`.
    pub fn window_len(&self) -> usize {
        2 * self.m_half + 1
    }

    pub fn t0(&self) -> f64 {
        self.t0_s
    }

    /// `Φ_k = 2πk/K`.
    pub fn center_angle(&self, k: usize) -> f64 {
        2.0 * PI * k as f64 / self.k_sectors as f64
    }

    /// Symbol index nearest to `Φ_k`, before wrapping: `round(Φ_k / (ω·T0))`.
    pub fn center_symbol(&self, k: usize) -> i64 {
        (self.center_angle(k) / self.angle_step).round() as i64
    }

    /// Azimuth actually observed at the centre symbol of sector `k`.
    pub fn center_symbol_angle(&self, k: usize) -> f64 {
        self.center_symbol(k) as f64 * self.angle_step
    }

    /// Source symbol of window offset `m ∈ [−M, M]` in sector `k`, wrapped modulo `L`.
    pub fn symbol_index(&self, k: usize, m: i64, n_symbols: usize) -> usize {
        (self.center_symbol(k) + m).rem_euclid(n_symbols as i64) as usize
    }

    /// Window offsets `−M..=M`.
    pub fn offsets(&self) -> impl Iterator<Item = i64> + Clone {
        let m = self.m_half as i64;
        -m..=m
    }

    /// `D_i = −1/(2T0) + i/(I·T0)`.
    pub fn doppler_bin_frequency(&self, i: usize) -> f64 {
        -0.5 / self.t0_s + i as f64 * self.f_delta_hz
    }

    /// Bin holding the quantized Doppler `round(D / f_Δ)·f_Δ`.
    ///
    /// Rounding is half-away-from-zero. Frequencies beyond ±1/(2T0) wrap
    /// around the grid the same way sampled Doppler aliases.
    pub fn doppler_bin(&self, doppler_hz: f64) -> usize {
        let q = (doppler_hz / self.f_delta_hz).round() as i64;
        let half = (self.doppler_bins / 2) as i64;
        (q + half).rem_euclid(self.doppler_bins as i64) as usize
    }
}

/// Cylinder that must contain every scatterer of a scene.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoiCylinder {
    pub radius_m: f64,
    pub height_m: f64,
}

impl RoiCylinder {
    pub fn contains(&self, p: [f64; 3]) -> bool {
        p[0].hypot(p[1]) <= self.radius_m && p[2].abs() <= self.height_m / 2.0
    }
}

/// Square imaging grid centred on the origin. Nodes run from
/// `−half_extent` to `+half_extent` inclusive on both axes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoiGrid {
    pub half_extent_m: f64,
    pub n_cells: usize,
    pub cylinder: RoiCylinder,
}

impl RoiGrid {
    /// Fails when any grid node lies outside the alias-free disc of `cfg`.
    pub fn new(cfg: &RadarConfig, half_extent_m: f64, n_cells: usize, cylinder: RoiCylinder) -> Result<Self> {
        let grid = RoiGrid {
            half_extent_m,
            n_cells,
            cylinder,
        };
        grid.check_unambiguous(cfg)?;
        Ok(grid)
    }

    /// Grid whose cylinder is the circumscribed circle of the square.
    pub fn square(cfg: &RadarConfig, half_extent_m: f64, n_cells: usize) -> Result<Self> {
        let cylinder = RoiCylinder {
            radius_m: half_extent_m * std::f64::consts::SQRT_2,
            height_m: f64::INFINITY,
        };
        Self::new(cfg, half_extent_m, n_cells, cylinder)
    }

    pub fn check_unambiguous(&self, cfg: &RadarConfig) -> Result<()> {
        if !(self.half_extent_m > 0.0) || self.n_cells < 2 {
            return Err(Error::invalid("grid needs a positive half extent and at least 2 cells per axis"));
        }
        let corner = self.corner_radius();
        let limit = cfg.unambiguous_radius();
        if corner > limit {
            return Err(Error::Aliasing(format!(
                "grid corner at {corner:.4} m lies outside the unambiguous radius {limit:.4} m"
            )));
        }
        Ok(())
    }

    pub fn corner_radius(&self) -> f64 {
        self.half_extent_m * std::f64::consts::SQRT_2
    }

    pub fn cell_size(&self) -> f64 {
        2.0 * self.half_extent_m / (self.n_cells - 1) as f64
    }

    /// Coordinate of node `i` along either axis.
    pub fn coordinate(&self, i: usize) -> f64 {
        -self.half_extent_m + i as f64 * self.cell_size()
    }

    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.n_cells).map(|i| self.coordinate(i)).collect()
    }

    /// Node nearest to `v` along one axis, clamped to the grid.
    pub fn nearest_index(&self, v: f64) -> usize {
        let i = ((v + self.half_extent_m) / self.cell_size()).round();
        i.clamp(0.0, (self.n_cells - 1) as f64) as usize
    }
}
