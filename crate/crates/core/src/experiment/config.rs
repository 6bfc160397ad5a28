//! Experiment configuration files. Keys carry their unit as a suffix.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::echo::{Fidelity, NoiseSpec, SymbolScheme, SynthesisOptions};
use crate::error::{Error, Result};
use crate::geometry::{symbols_per_revolution, RadarConfig, RoiCylinder, RoiGrid, SectorPlan};
use crate::imaging::{Estimator, IaaOptions};
use crate::resolution::SweepSpec;
use crate::scene::{Scatterer, ScatteringModel, Scene};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadarSection {
    pub f0_hz: f64,
    pub delta_f_hz: f64,
    pub n_subcarriers: usize,
    /// Defaults to one full revolution.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_symbols: Option<usize>,
    pub t0_s: f64,
    #[serde(default)]
    pub tc_s: f64,
    pub radius_m: f64,
    #[serde(default)]
    pub height_m: f64,
    pub omega_rad_s: f64,
    #[serde(default = "one")]
    pub path_loss: f64,
}

fn one() -> f64 {
    1.0
}

impl RadarSection {
    pub fn to_config(&self) -> Result<RadarConfig> {
        if !(self.omega_rad_s != 0.0 && self.t0_s > 0.0) {
            return Err(Error::invalid("omega_rad_s must be non-zero and t0_s positive"));
        }
        let cfg = RadarConfig {
            f0_hz: self.f0_hz,
            delta_f_hz: self.delta_f_hz,
            n_subcarriers: self.n_subcarriers,
            n_symbols: self
                .n_symbols
                .unwrap_or_else(|| symbols_per_revolution(self.omega_rad_s, self.t0_s)),
            t0_s: self.t0_s,
            tc_s: self.tc_s,
            radius_m: self.radius_m,
            height_m: self.height_m,
            omega_rad_s: self.omega_rad_s,
            path_loss: self.path_loss,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl From<&RadarConfig> for RadarSection {
    fn from(c: &RadarConfig) -> Self {
        RadarSection {
            f0_hz: c.f0_hz,
            delta_f_hz: c.delta_f_hz,
            n_subcarriers: c.n_subcarriers,
            n_symbols: (c.n_symbols != symbols_per_revolution(c.omega_rad_s, c.t0_s)).then_some(c.n_symbols),
            t0_s: c.t0_s,
            tc_s: c.tc_s,
            radius_m: c.radius_m,
            height_m: c.height_m,
            omega_rad_s: c.omega_rad_s,
            path_loss: c.path_loss,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectorSection {
    pub k_sectors: usize,
    pub delta_sa_deg: f64,
    pub doppler_bins: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub half_extent_m: f64,
    pub n_cells: usize,
    /// Defaults to the circle through the grid corners.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cylinder_radius_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cylinder_height_m: Option<f64>,
}

/// Where the scatterers come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneSection {
    /// Scene file, resolved relative to the configuration file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub label: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub scatterers: Vec<Scatterer>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snr_db: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthesisSection {
    pub fidelity: Fidelity,
    pub symbols: SymbolScheme,
    /// Permit scenes wider than one range cell with the common-range models.
    #[serde(default)]
    pub allow_wide_scene: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImagingSection {
    pub estimator: Estimator,
    #[serde(default = "default_iters")]
    pub iaa_max_iters: usize,
    #[serde(default = "default_tol")]
    pub iaa_tol: f64,
    #[serde(default)]
    pub wideband: bool,
    /// Also write a binary detection map at this level below the maximum.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detection_threshold_db: Option<f64>,
    #[serde(default)]
    pub dump_map: bool,
}

fn default_iters() -> usize {
    IaaOptions::default().max_iters
}

fn default_tol() -> f64 {
    IaaOptions::default().tol
}

impl ImagingSection {
    pub fn iaa_options(&self) -> IaaOptions {
        IaaOptions {
            max_iters: self.iaa_max_iters,
            tol: self.iaa_tol,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// One curve per entry and estimator.
    pub delta_sa_deg: Vec<f64>,
    pub estimators: Vec<Estimator>,
    /// Spacings as multiples of each curve's benchmark resolution.
    pub spacing_factors: Vec<f64>,
    pub trials: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snr_db: Option<f64>,
    #[serde(default = "default_saddle")]
    pub saddle_db: f64,
    #[serde(default = "default_jitter")]
    pub center_jitter_m: f64,
}

fn default_saddle() -> f64 {
    3.0
}

fn default_jitter() -> f64 {
    0.05
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsfSection {
    /// Probe positions `[x, y]` in metres.
    pub probes_m: Vec<[f64; 2]>,
    pub estimator: Estimator,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub name: String,
    pub seed: u64,
    pub radar: RadarSection,
    pub sectors: SectorSection,
    pub grid: GridSection,
    pub scene: SceneSection,
    pub noise: NoiseSection,
    pub synthesis: SynthesisSection,
    pub imaging: ImagingSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psf: Option<PsfSection>,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

/// Everything derived from a configuration, validated and ready to use.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub radar: RadarConfig,
    pub plan: SectorPlan,
    pub grid: RoiGrid,
    pub scene: Scene,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg = Self::from_toml(&std::fs::read_to_string(path)?)?;
        if let Some(p) = &cfg.scene.path {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    cfg.scene.path = Some(dir.join(p));
                }
            }
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn radar_config(&self) -> Result<RadarConfig> {
        self.radar.to_config()
    }

    pub fn plan_for(&self, radar: &RadarConfig, delta_sa_deg: f64) -> Result<SectorPlan> {
        SectorPlan::new(
            radar,
            self.sectors.k_sectors,
            delta_sa_deg.to_radians(),
            self.sectors.doppler_bins,
        )
    }

    pub fn scene(&self) -> Result<Scene> {
        let scene = match &self.scene.path {
            Some(p) => {
                if !self.scene.scatterers.is_empty() {
                    return Err(Error::invalid("scene gives both a path and inline scatterers"));
                }
                Scene::load(p)?
            }
            None => Scene::new(self.scene.label.clone(), self.scene.scatterers.clone()),
        };
        scene.validate()?;
        Ok(scene)
    }

    pub fn grid_for(&self, radar: &RadarConfig) -> Result<RoiGrid> {
        let g = &self.grid;
        let cylinder = RoiCylinder {
            radius_m: g
                .cylinder_radius_m
                .unwrap_or(g.half_extent_m * std::f64::consts::SQRT_2),
            height_m: g.cylinder_height_m.unwrap_or(f64::INFINITY),
        };
        RoiGrid::new(radar, g.half_extent_m, g.n_cells, cylinder)
    }

    /// Checks every section and builds the runtime objects.
    pub fn resolve(&self) -> Result<Resolved> {
        let radar = self.radar_config()?;
        let plan = self.plan_for(&radar, self.sectors.delta_sa_deg)?;
        let grid = self.grid_for(&radar)?;
        let scene = self.scene()?;
        scene.check_inside(&grid.cylinder)?;
        if let Some(snr) = self.noise.snr_db {
            if !snr.is_finite() {
                return Err(Error::invalid("snr_db must be finite"));
            }
        }
        if self.imaging.iaa_max_iters == 0 {
            return Err(Error::invalid("iaa_max_iters must be at least 1"));
        }
        if let Some(sweep) = &self.sweep {
            if sweep.trials == 0 || sweep.spacing_factors.is_empty() || sweep.delta_sa_deg.is_empty() {
                return Err(Error::invalid("sweep needs trials, spacing factors and delta_sa values"));
            }
            for &d in &sweep.delta_sa_deg {
                self.plan_for(&radar, d)?;
            }
        }
        Ok(Resolved {
            radar,
            plan,
            grid,
            scene,
        })
    }

    pub fn noise_spec(&self) -> NoiseSpec {
        NoiseSpec {
            snr_db: self.noise.snr_db,
            seed: self.seed,
        }
    }

    pub fn synthesis_options(&self) -> SynthesisOptions {
        SynthesisOptions {
            scheme: self.synthesis.symbols,
            symbol_seed: self.seed,
            noise: self.noise_spec(),
            allow_wide_scene: self.synthesis.allow_wide_scene || self.imaging.wideband,
        }
    }

    pub fn sweep_spec(&self, spacings_m: Vec<f64>) -> Result<SweepSpec> {
        let sweep = self
            .sweep
            .as_ref()
            .ok_or_else(|| Error::invalid("configuration has no [sweep] section"))?;
        Ok(SweepSpec {
            spacings_m,
            trials: sweep.trials,
            snr_db: sweep.snr_db,
            seed: self.seed,
            saddle_db: sweep.saddle_db,
            center_jitter_m: sweep.center_jitter_m,
            profile_samples: 401,
            scattering: ScatteringModel::isotropic(1.0),
        })
    }

    /// Hash of everything that shapes the echo cube: radar, scene, noise,
    /// synthesis model and seed.
    pub fn acquisition_hash(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Acquisition<'a> {
            radar: RadarConfig,
            scene: Vec<Scatterer>,
            noise: &'a NoiseSection,
            synthesis: &'a SynthesisSection,
            wide: bool,
            seed: u64,
        }
        let a = Acquisition {
            radar: self.radar_config()?,
            scene: self.scene()?.scatterers,
            noise: &self.noise,
            synthesis: &self.synthesis,
            wide: self.synthesis_options().allow_wide_scene,
            seed: self.seed,
        };
        Ok(sha256_hex(&serde_json::to_vec(&a)?))
    }

    /// Hash of the whole configuration with the scene inlined.
    pub fn config_hash(&self) -> Result<String> {
        let mut inlined = self.clone();
        let scene = self.scene()?;
        inlined.scene = SceneSection {
            path: None,
            label: scene.label,
            scatterers: scene.scatterers,
        };
        inlined.output_dir = PathBuf::new();
        Ok(sha256_hex(&serde_json::to_vec(&inlined)?))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::presets;

    #[test]
    fn presets_round_trip_through_toml() {
        for name in presets::NAMES {
            let cfg = presets::preset(name).unwrap();
            let text = cfg.to_toml();
            assert!(text.contains("delta_sa_deg"), "{name}");
            let back = ExperimentConfig::from_toml(&text).unwrap();
            assert_eq!(back, cfg, "{name}");
            back.resolve().unwrap();
        }
    }

    #[test]
    fn unknown_keys_rejected() {
        let mut text = presets::preset("four-cylinders").unwrap().to_toml();
        text = text.replace("delta_sa_deg", "delta_sa");
        assert!(matches!(ExperimentConfig::from_toml(&text), Err(Error::Format(_))));
    }

    #[test]
    fn hashes_track_inputs() {
        let a = presets::preset("four-cylinders").unwrap();
        let mut b = a.clone();
        b.imaging.estimator = Estimator::Dft;
        assert_eq!(a.acquisition_hash().unwrap(), b.acquisition_hash().unwrap());
        assert_ne!(a.config_hash().unwrap(), b.config_hash().unwrap());
        b.seed += 1;
        assert_ne!(a.acquisition_hash().unwrap(), b.acquisition_hash().unwrap());
    }

    #[test]
    fn oversized_grid_rejected() {
        let mut cfg = presets::preset("four-cylinders").unwrap();
        cfg.grid.half_extent_m = 2.0;
        assert!(matches!(cfg.resolve(), Err(Error::Aliasing(_))));
    }
}
