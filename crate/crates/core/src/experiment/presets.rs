//! Built-in experiment configurations.

use std::path::PathBuf;

use crate::echo::{Fidelity, SymbolScheme};
use crate::error::{Error, Result};
use crate::geometry::RadarConfig;
use crate::imaging::{Estimator, IaaOptions};
use crate::scene::{Scatterer, ScatteringModel, Scene};

use super::config::*;

pub const NAMES: [&str; 5] = ["box", "four-cylinders", "worked-example", "psf", "sweep"];

/// Cylinder axes of the four-target turntable scene, metres.
pub const FOUR_CYLINDERS_M: [[f64; 2]; 4] = [[0.075, 0.145], [0.145, 0.095], [-0.12, -0.11], [-0.055, -0.15]];

/// Sector count used with the anisotropic presets. Sector centres then
/// fall on the symbol grid (every 50th symbol of 4000) and each
/// correlation window lies inside one scattering sector.
pub const ALIGNED_SECTORS: usize = 80;

pub fn preset(name: &str) -> Result<ExperimentConfig> {
    match name {
        "box" => Ok(box_shell()),
        "four-cylinders" => Ok(four_cylinders()),
        "worked-example" => Ok(worked_example()),
        "psf" => Ok(psf()),
        "sweep" => Ok(sweep()),
        other => Err(Error::invalid(format!(
            "unknown preset {other:?}; expected one of {}",
            NAMES.join(", ")
        ))),
    }
}

/// One `SectoredRandom` scatterer per cylinder, seeded from `seed`.
pub fn four_cylinder_scene(seed: u64, n_sectors: usize) -> Scene {
    let scatterers = FOUR_CYLINDERS_M
        .iter()
        .enumerate()
        .map(|(i, &[x, y])| {
            let model = ScatteringModel::sectored_random(1.0, 0.3, n_sectors, seed.wrapping_mul(4).wrapping_add(i as u64));
            Scatterer::new([x, y, 0.0], model)
        })
        .collect();
    Scene::new("four-cylinders", scatterers)
}

/// Points on the surface of a `0.35 × 0.41 × 0.33` m box standing on the
/// turntable, about 3 cm apart.
pub fn box_shell_scene(seed: u64, n_sectors: usize) -> Scene {
    let size = [0.35, 0.41, 0.33];
    let counts: Vec<usize> = size.iter().map(|s| (s / 0.03_f64).round() as usize + 1).collect();
    let coord = |axis: usize, i: usize| {
        let t = i as f64 / (counts[axis] - 1) as f64;
        if axis == 2 {
            t * size[2]
        } else {
            (t - 0.5) * size[axis]
        }
    };
    let mut scatterers = Vec::new();
    for iz in 0..counts[2] {
        for iy in 0..counts[1] {
            for ix in 0..counts[0] {
                let on_face = ix == 0 || iy == 0 || iz == 0 || ix + 1 == counts[0] || iy + 1 == counts[1] || iz + 1 == counts[2];
                if on_face {
                    let model = ScatteringModel::sectored_random(1.0, 0.3, n_sectors, seed.wrapping_add(scatterers.len() as u64));
                    scatterers.push(Scatterer::new([coord(0, ix), coord(1, iy), coord(2, iz)], model));
                }
            }
        }
    }
    Scene::new("box", scatterers)
}

fn inline(scene: Scene) -> SceneSection {
    SceneSection {
        path: None,
        label: scene.label,
        scatterers: scene.scatterers,
    }
}

fn imaging(estimator: Estimator) -> ImagingSection {
    let iaa = IaaOptions::default();
    ImagingSection {
        estimator,
        iaa_max_iters: iaa.max_iters,
        iaa_tol: iaa.tol,
        wideband: false,
        detection_threshold_db: None,
        dump_map: false,
    }
}

fn farfield() -> SynthesisSection {
    SynthesisSection {
        fidelity: Fidelity::FarField,
        symbols: SymbolScheme::Qpsk,
        allow_wide_scene: false,
    }
}

fn grid(half_extent_m: f64, n_cells: usize) -> GridSection {
    GridSection {
        half_extent_m,
        n_cells,
        cylinder_radius_m: None,
        cylinder_height_m: None,
    }
}

fn turntable(n_subcarriers: usize) -> RadarSection {
    let mut radar = RadarSection::from(&RadarConfig::mmwave_turntable());
    radar.n_subcarriers = n_subcarriers;
    radar
}

fn box_shell() -> ExperimentConfig {
    let seed = 11;
    ExperimentConfig {
        name: "box".into(),
        seed,
        radar: turntable(1024),
        sectors: SectorSection {
            k_sectors: ALIGNED_SECTORS,
            delta_sa_deg: 2.0,
            doppler_bins: 512,
        },
        grid: grid(0.3, 121),
        scene: inline(box_shell_scene(seed, ALIGNED_SECTORS)),
        noise: NoiseSection { snr_db: Some(10.0) },
        synthesis: farfield(),
        imaging: ImagingSection {
            detection_threshold_db: Some(3.0),
            ..imaging(Estimator::Iaa)
        },
        sweep: None,
        psf: None,
        output_dir: PathBuf::from("out/box"),
    }
}

fn four_cylinders() -> ExperimentConfig {
    let seed = 7;
    ExperimentConfig {
        name: "four-cylinders".into(),
        seed,
        radar: turntable(1024),
        sectors: SectorSection {
            k_sectors: ALIGNED_SECTORS,
            delta_sa_deg: 2.0,
            doppler_bins: 512,
        },
        grid: grid(0.25, 101),
        scene: inline(four_cylinder_scene(seed, ALIGNED_SECTORS)),
        noise: NoiseSection { snr_db: Some(0.0) },
        synthesis: farfield(),
        imaging: ImagingSection {
            detection_threshold_db: Some(3.0),
            ..imaging(Estimator::Iaa)
        },
        sweep: None,
        psf: None,
        output_dir: PathBuf::from("out/four-cylinders"),
    }
}

/// 30 GHz, `H/R = 0.1`, `δ_SA = 3°`, one isotropic point.
fn worked_example() -> ExperimentConfig {
    let mut radar = turntable(1);
    radar.f0_hz = 30e9;
    radar.height_m = 0.1 * radar.radius_m;
    ExperimentConfig {
        name: "worked-example".into(),
        seed: 5,
        radar,
        sectors: SectorSection {
            k_sectors: 90,
            delta_sa_deg: 3.0,
            doppler_bins: 512,
        },
        grid: grid(0.5, 128),
        scene: inline(Scene::new(
            "point",
            vec![Scatterer::new([0.0, 0.0, 0.0], ScatteringModel::isotropic(1.0))],
        )),
        noise: NoiseSection { snr_db: None },
        synthesis: farfield(),
        imaging: imaging(Estimator::Dft),
        sweep: None,
        psf: Some(PsfSection {
            probes_m: vec![[0.0, 0.0], [0.3, 0.0]],
            estimator: Estimator::Dft,
        }),
        output_dir: PathBuf::from("out/worked-example"),
    }
}

/// DFT point spread function at `K = 90`, `M = 20`, `I = 512` on a 128² grid.
fn psf() -> ExperimentConfig {
    let radar = turntable(1);
    let step_deg = (radar.omega_rad_s * radar.t0_s).to_degrees();
    ExperimentConfig {
        name: "psf".into(),
        seed: 3,
        radar,
        sectors: SectorSection {
            k_sectors: 90,
            delta_sa_deg: 20.0 * step_deg,
            doppler_bins: 512,
        },
        grid: grid(0.5, 128),
        scene: inline(Scene::new(
            "point",
            vec![Scatterer::new([0.0, 0.0, 0.0], ScatteringModel::isotropic(1.0))],
        )),
        noise: NoiseSection { snr_db: None },
        synthesis: farfield(),
        imaging: imaging(Estimator::Dft),
        sweep: None,
        psf: Some(PsfSection {
            probes_m: vec![[0.0, 0.0], [0.3, 0.0]],
            estimator: Estimator::Dft,
        }),
        output_dir: PathBuf::from("out/psf"),
    }
}

/// Two-point sweep at `δ_SA ∈ {2°, 3°}` for both estimators.
fn sweep() -> ExperimentConfig {
    ExperimentConfig {
        name: "sweep".into(),
        seed: 2024,
        radar: turntable(1),
        sectors: SectorSection {
            k_sectors: 90,
            delta_sa_deg: 2.0,
            doppler_bins: 512,
        },
        grid: grid(0.5, 128),
        scene: inline(Scene::new(
            "point",
            vec![Scatterer::new([0.0, 0.0, 0.0], ScatteringModel::isotropic(1.0))],
        )),
        noise: NoiseSection { snr_db: Some(20.0) },
        synthesis: farfield(),
        imaging: imaging(Estimator::Iaa),
        sweep: Some(SweepSection {
            delta_sa_deg: vec![2.0, 3.0],
            estimators: vec![Estimator::Dft, Estimator::Iaa],
            spacing_factors: (0..=12).map(|i| 0.4 + 0.1 * i as f64).collect(),
            trials: 20,
            snr_db: Some(20.0),
            saddle_db: 3.0,
            center_jitter_m: 0.05,
        }),
        psf: None,
        output_dir: PathBuf::from("out/sweep"),
    }
}
