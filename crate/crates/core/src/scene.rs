//! Point-scatterer scenes with angle-dependent complex reflectivity.

use std::f64::consts::{PI, TAU};
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{RadarConfig, RoiCylinder};

pub const SCENE_SCHEMA_VERSION: u32 = 1;

/// How a scatterer's complex reflectivity varies with the observation azimuth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "ScatteringSpec", into = "ScatteringSpec")]
pub enum ScatteringModel {
    Isotropic {
        amplitude: f64,
        phase: f64,
    },
    /// Piecewise constant over `n_sectors` equal azimuth sectors centred
    /// on `2πj/n_sectors`. Each sector draws an amplitude
    /// `mean·(1 + jitter·u)`, `u ~ U[−1, 1]`, clamped at zero, and a phase
    /// uniform on `[0, 2π)`.
    SectoredRandom {
        amplitude_mean: f64,
        amplitude_jitter: f64,
        n_sectors: usize,
        seed: u64,
        values: Vec<Complex64>,
    },
    /// Von Mises shaped gain `peak·exp(κ(cos(φ − φ_peak) − 1))` with a fixed phase.
    Lobed {
        peak_amplitude: f64,
        peak_angle: f64,
        concentration: f64,
        phase: f64,
    },
}

impl ScatteringModel {
    pub fn isotropic(amplitude: f64) -> Self {
        ScatteringModel::Isotropic { amplitude, phase: 0.0 }
    }

    pub fn sectored_random(amplitude_mean: f64, amplitude_jitter: f64, n_sectors: usize, seed: u64) -> Self {
        let n = n_sectors.max(1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..n)
            .map(|_| {
                let u: f64 = rng.random_range(-1.0..=1.0);
                let amplitude = (amplitude_mean * (1.0 + amplitude_jitter * u)).max(0.0);
                let phase: f64 = rng.random_range(0.0..TAU);
                Complex64::from_polar(amplitude, phase)
            })
            .collect();
        ScatteringModel::SectoredRandom {
            amplitude_mean,
            amplitude_jitter,
            n_sectors: n,
            seed,
            values,
        }
    }

    /// Sector count that makes every angular correlation range of half
    /// width `delta_sa` fall inside one sector.
    pub fn sectors_for_half_width(delta_sa: f64) -> usize {
        ((PI / delta_sa).floor() as usize).max(1)
    }

    pub fn eval(&self, phi: f64) -> Complex64 {
        match self {
            ScatteringModel::Isotropic { amplitude, phase } => Complex64::from_polar(*amplitude, *phase),
            ScatteringModel::SectoredRandom { values, n_sectors, .. } => values[sector_of(phi, *n_sectors)],
            ScatteringModel::Lobed {
                peak_amplitude,
                peak_angle,
                concentration,
                phase,
            } => {
                let gain = (concentration * ((phi - peak_angle).cos() - 1.0)).exp();
                Complex64::from_polar(peak_amplitude * gain, *phase)
            }
        }
    }

    /// Same model with every amplitude multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        match &mut out {
            ScatteringModel::Isotropic { amplitude, .. } => *amplitude *= factor,
            ScatteringModel::SectoredRandom {
                amplitude_mean, values, ..
            } => {
                *amplitude_mean *= factor;
                values.iter_mut().for_each(|v| *v *= factor);
            }
            ScatteringModel::Lobed { peak_amplitude, .. } => *peak_amplitude *= factor,
        }
        out
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            ScatteringModel::Isotropic { amplitude, phase } => *amplitude >= 0.0 && phase.is_finite(),
            ScatteringModel::SectoredRandom {
                amplitude_mean,
                amplitude_jitter,
                n_sectors,
                ..
            } => *amplitude_mean >= 0.0 && amplitude_jitter.is_finite() && *n_sectors >= 1,
            ScatteringModel::Lobed {
                peak_amplitude,
                peak_angle,
                concentration,
                phase,
            } => *peak_amplitude >= 0.0 && peak_angle.is_finite() && *concentration >= 0.0 && phase.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("bad scattering parameters: {self:?}")))
        }
    }
}

/// Sector `j` covers `[2π(j − ½)/n, 2π(j + ½)/n)`.
fn sector_of(phi: f64, n: usize) -> usize {
    let width = TAU / n as f64;
    let j = ((phi / width) + 0.5).floor() as i64;
    j.rem_euclid(n as i64) as usize
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum ScatteringSpec {
    Isotropic {
        amplitude: f64,
        #[serde(default)]
        phase_rad: f64,
    },
    SectoredRandom {
        amplitude_mean: f64,
        amplitude_jitter: f64,
        n_sectors: usize,
        seed: u64,
    },
    Lobed {
        peak_amplitude: f64,
        peak_angle_rad: f64,
        concentration: f64,
        #[serde(default)]
        phase_rad: f64,
    },
}

impl From<ScatteringSpec> for ScatteringModel {
    fn from(s: ScatteringSpec) -> Self {
        match s {
            ScatteringSpec::Isotropic { amplitude, phase_rad } => ScatteringModel::Isotropic {
                amplitude,
                phase: phase_rad,
            },
            ScatteringSpec::SectoredRandom {
                amplitude_mean,
                amplitude_jitter,
                n_sectors,
                seed,
            } => ScatteringModel::sectored_random(amplitude_mean, amplitude_jitter, n_sectors, seed),
            ScatteringSpec::Lobed {
                peak_amplitude,
                peak_angle_rad,
                concentration,
                phase_rad,
            } => ScatteringModel::Lobed {
                peak_amplitude,
                peak_angle: peak_angle_rad,
                concentration,
                phase: phase_rad,
            },
        }
    }
}

impl From<ScatteringModel> for ScatteringSpec {
    fn from(m: ScatteringModel) -> Self {
        match m {
            ScatteringModel::Isotropic { amplitude, phase } => ScatteringSpec::Isotropic {
                amplitude,
                phase_rad: phase,
            },
            ScatteringModel::SectoredRandom {
                amplitude_mean,
                amplitude_jitter,
                n_sectors,
                seed,
                ..
            } => ScatteringSpec::SectoredRandom {
                amplitude_mean,
                amplitude_jitter,
                n_sectors,
                seed,
            },
            ScatteringModel::Lobed {
                peak_amplitude,
                peak_angle,
                concentration,
                phase,
            } => ScatteringSpec::Lobed {
                peak_amplitude,
                peak_angle_rad: peak_angle,
                concentration,
                phase_rad: phase,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scatterer {
    #[serde(rename = "position_m")]
    pub position: [f64; 3],
    pub scattering: ScatteringModel,
}

impl Scatterer {
    pub fn new(position: [f64; 3], scattering: ScatteringModel) -> Self {
        Scatterer { position, scattering }
    }

    pub fn eval(&self, phi: f64) -> Complex64 {
        self.scattering.eval(phi)
    }

    /// Reflectivity as seen by the planar model: the height phase and the
    /// common slant-range phase folded into the scattering value.
    pub fn project_to_2d(&self, cfg: &RadarConfig, phi: f64) -> Complex64 {
        self.eval(phi) * self.projection_phase(cfg)
    }

    pub(crate) fn projection_phase(&self, cfg: &RadarConfig) -> Complex64 {
        let k = 4.0 * PI / cfg.wavelength();
        let rho = cfg.slant_range();
        let z = self.position[2];
        Complex64::from_polar(1.0, k * z * cfg.height_m / rho - k * rho)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Scene {
    pub label: String,
    pub scatterers: Vec<Scatterer>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneFile {
    schema_version: u32,
    #[serde(default)]
    label: String,
    #[serde(default)]
    scatterers: Vec<Scatterer>,
}

impl Scene {
    pub fn new(label: impl Into<String>, scatterers: Vec<Scatterer>) -> Self {
        Scene {
            label: label.into(),
            scatterers,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.scatterers.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        for s in &self.scatterers {
            if s.position.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid("scatterer position must be finite"));
            }
            s.scattering.validate()?;
        }
        Ok(())
    }

    /// Errors if any scatterer lies outside `cylinder`.
    pub fn check_inside(&self, cylinder: &RoiCylinder) -> Result<()> {
        for (i, s) in self.scatterers.iter().enumerate() {
            if !cylinder.contains(s.position) {
                return Err(Error::invalid(format!(
                    "scatterer {i} at {:?} lies outside the ROI cylinder",
                    s.position
                )));
            }
        }
        Ok(())
    }

    /// Largest distance between any two scatterers.
    pub fn extent(&self) -> f64 {
        let mut best = 0.0f64;
        for (i, a) in self.scatterers.iter().enumerate() {
            for b in &self.scatterers[i + 1..] {
                let d = (0..3).map(|c| (a.position[c] - b.position[c]).powi(2)).sum::<f64>().sqrt();
                best = best.max(d);
            }
        }
        best
    }

    /// Scene rotated by `angle` about the z axis; scattering values keep
    /// their absolute azimuth dependence.
    pub fn rotated(&self, angle: f64) -> Scene {
        let (s, c) = angle.sin_cos();
        let scatterers = self
            .scatterers
            .iter()
            .map(|p| {
                let [x, y, z] = p.position;
                Scatterer::new([c * x - s * y, s * x + c * y, z], p.scattering.clone())
            })
            .collect();
        Scene::new(self.label.clone(), scatterers)
    }

    pub fn to_toml(&self) -> String {
        let file = SceneFile {
            schema_version: SCENE_SCHEMA_VERSION,
            label: self.label.clone(),
            scatterers: self.scatterers.clone(),
        };
        toml::to_string(&file).expect("scene serializes")
    }

    pub fn from_toml(text: &str) -> Result<Scene> {
        let file: SceneFile = toml::from_str(text)?;
        if file.schema_version != SCENE_SCHEMA_VERSION {
            return Err(Error::Format(format!(
                "scene schema_version {} is not supported (expected {SCENE_SCHEMA_VERSION})",
                file.schema_version
            )));
        }
        let scene = Scene::new(file.label, file.scatterers);
        scene.validate()?;
        Ok(scene)
    }

    pub fn load(path: &Path) -> Result<Scene> {
        Scene::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_toml())?;
        Ok(())
    }
}
