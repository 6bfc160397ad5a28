//! Command implementations. Each writes its outputs plus a manifest into
//! the configured output directory.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use serde::Serialize;

use super::config::ExperimentConfig;
use super::manifest::{RunManifest, RunRecorder};
use crate::baseline::{coherent_sum_baseline, fbp_reconstruct};
use crate::container::{self, Header, MatrixKind};
use crate::echo::{gen_data_symbols, synthesize, EchoCube, Fidelity, NoiseSpec, SynthesisOptions};
use crate::error::{Error, Result};
use crate::geometry::{RadarConfig, SectorPlan};
use crate::imaging::{
    associate, estimate, image_wideband, range_compress, reshape_sectors, AngleDopplerMap, EnergyImage, Estimator,
    IaaOptions,
};
use crate::resolution::{
    benchmark_resolution, measure_resolution, numerical_psf, sweep_csv, MapPipeline, PsfOptions, ResolutionReport,
    SweepCurve, C_R,
};
use crate::scene::{ScatteringModel, Scene};

pub const CUBE_FILE: &str = "cube.bin";

/// Synthesis followed by the narrowband chain up to the angle-Doppler map.
#[derive(Debug, Clone)]
pub struct SimulatedPipeline {
    pub cfg: RadarConfig,
    pub plan: SectorPlan,
    pub estimator: Estimator,
    pub iaa: IaaOptions,
    pub fidelity: Fidelity,
    pub synthesis: SynthesisOptions,
}

impl SimulatedPipeline {
    pub fn new(cfg: RadarConfig, plan: SectorPlan, estimator: Estimator) -> Self {
        SimulatedPipeline {
            cfg,
            plan,
            estimator,
            iaa: IaaOptions::default(),
            fidelity: Fidelity::FarField,
            synthesis: SynthesisOptions::default(),
        }
    }
}

impl MapPipeline for SimulatedPipeline {
    fn run(&self, scene: &Scene, noise: &NoiseSpec) -> Result<AngleDopplerMap> {
        let opts = SynthesisOptions {
            noise: *noise,
            ..self.synthesis
        };
        let cube = synthesize(scene, &self.cfg, self.fidelity, &opts)?;
        let rc = range_compress(&reshape_sectors(&cube, &self.plan)?)?;
        estimate(&rc, &self.plan, self.estimator, &self.iaa)
    }
}

fn output_dir(cfg: &ExperimentConfig, override_dir: Option<&Path>) -> PathBuf {
    override_dir.map(Path::to_path_buf).unwrap_or_else(|| cfg.output_dir.clone())
}

fn json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    Ok((serde_json::to_string_pretty(value)? + "\n").into_bytes())
}

/// Synthesizes the configured scene and writes `cube.bin`.
pub fn simulate(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<RunManifest> {
    let resolved = cfg.resolve()?;
    let mut rec = RunRecorder::new(&output_dir(cfg, out), "simulate", cfg.config_hash()?)?;
    rec.stage("synthesize");
    let cube = synthesize(&resolved.scene, &resolved.radar, cfg.synthesis.fidelity, &cfg.synthesis_options())?;
    rec.stage("write");
    let header = Header {
        kind: MatrixKind::EchoCube,
        rows: cube.n_subcarriers(),
        cols: cube.n_symbols(),
        config_hash: container::hash_from_hex(&cfg.acquisition_hash()?)?,
        tag: cube.fidelity.tag(),
    };
    rec.output(CUBE_FILE, &container::encode(&header, &cube.samples)?)?;
    Ok(rec.finish(None)?.0)
}

/// Reads a cube written by [`simulate`] for the same acquisition settings.
pub fn load_cube(cfg: &ExperimentConfig, path: &Path) -> Result<EchoCube> {
    let (header, samples) = container::read(path)?;
    if header.kind != MatrixKind::EchoCube {
        return Err(Error::Format(format!("{} holds an angle-Doppler map, not a cube", path.display())));
    }
    let expected = cfg.acquisition_hash()?;
    if hex::encode(header.config_hash) != expected {
        return Err(Error::invalid(format!(
            "cube {} was produced by a different configuration (hash {}, expected {expected})",
            path.display(),
            hex::encode(header.config_hash)
        )));
    }
    let radar = cfg.radar_config()?;
    if (header.rows, header.cols) != (radar.n_subcarriers, radar.n_symbols) {
        return Err(Error::Format("cube dimensions disagree with the radar section".into()));
    }
    let fidelity =
        Fidelity::from_tag(header.tag).ok_or_else(|| Error::Format(format!("unknown fidelity tag {}", header.tag)))?;
    let cube = EchoCube {
        samples,
        data_symbols: gen_data_symbols(&radar, cfg.synthesis.symbols, cfg.seed),
        cfg: radar,
        fidelity,
    };
    cube.validate()?;
    Ok(cube)
}

fn write_image(rec: &mut RunRecorder, stem: &str, img: &EnergyImage) -> Result<()> {
    rec.output(&format!("{stem}.csv"), img.to_csv().as_bytes())?;
    rec.output(&format!("{stem}.pgm"), &img.to_pgm())?;
    rec.output(&format!("{stem}.pgm.json"), img.pgm_sidecar().as_bytes())?;
    Ok(())
}

fn mask_csv(img: &EnergyImage, mask: &Array2<bool>) -> String {
    let xs = img.grid.coordinates();
    let mut out = String::from("y\\x");
    for x in &xs {
        write!(out, ",{x:.6}").unwrap();
    }
    out.push('\n');
    for (iy, row) in mask.outer_iter().enumerate() {
        write!(out, "{:.6}", xs[iy]).unwrap();
        for &v in row {
            out.push_str(if v { ",1" } else { ",0" });
        }
        out.push('\n');
    }
    out
}

fn tag_image(img: &mut EnergyImage, cfg: &ExperimentConfig, scene_label: &str) -> Result<()> {
    img.metadata.config_hash = cfg.config_hash()?;
    img.metadata.scene_label = scene_label.to_string();
    Ok(())
}

/// Images a stored cube with the configured estimator.
pub fn image(cfg: &ExperimentConfig, cube_path: &Path, out: Option<&Path>) -> Result<RunManifest> {
    let resolved = cfg.resolve()?;
    let mut rec = RunRecorder::new(&output_dir(cfg, out), "image", cfg.config_hash()?)?;
    rec.stage("read");
    rec.input(cube_path)?;
    let cube = load_cube(cfg, cube_path)?;
    let est = cfg.imaging.estimator;
    let iaa = cfg.imaging.iaa_options();
    let plan = &resolved.plan;
    let (mut img, map) = if cfg.imaging.wideband {
        rec.stage("image_wideband");
        (image_wideband(&cube, plan, &resolved.grid, est, &iaa)?, None)
    } else {
        rec.stage("range_compress");
        let rc = range_compress(&reshape_sectors(&cube, plan)?)?;
        rec.stage("estimate");
        let map = estimate(&rc, plan, est, &iaa)?;
        rec.stage("associate");
        (associate(&map, &cube.cfg, &resolved.grid)?, Some(map))
    };
    tag_image(&mut img, cfg, &resolved.scene.label)?;
    rec.stage("write");
    let stem = format!("image_{}", img.metadata.method);
    write_image(&mut rec, &stem, &img)?;
    if let Some(db) = cfg.imaging.detection_threshold_db {
        let mask = img.detection_mask(-db.abs());
        rec.output(&format!("detect_{}.csv", img.metadata.method), mask_csv(&img, &mask).as_bytes())?;
    }
    if cfg.imaging.dump_map {
        let map = map.ok_or_else(|| Error::invalid("dump_map is not available with the wideband path"))?;
        let header = Header {
            kind: MatrixKind::AngleDopplerMap,
            rows: map.g.nrows(),
            cols: map.g.ncols(),
            config_hash: container::hash_from_hex(&cfg.config_hash()?)?,
            tag: est.tag(),
        };
        rec.output(&format!("map_{}.bin", est.name()), &container::encode(&header, &map.g)?)?;
    }
    let method = img.metadata.method.clone();
    Ok(rec.finish(Some(&method))?.0)
}

#[derive(Debug, Serialize)]
struct PsfSummary {
    probe_m: [f64; 2],
    estimator: Estimator,
    full_width_m: f64,
    mean_full_width_m: f64,
    contour_spread: f64,
    benchmark_m: f64,
    c_r_estimate: f64,
    report: ResolutionReport,
}

/// Numerical point spread functions at the configured probes.
pub fn psf(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<RunManifest> {
    let resolved = cfg.resolve()?;
    let section = cfg
        .psf
        .as_ref()
        .ok_or_else(|| Error::invalid("configuration has no [psf] section"))?;
    if section.probes_m.is_empty() {
        return Err(Error::invalid("psf needs at least one probe"));
    }
    let mut rec = RunRecorder::new(&output_dir(cfg, out), "psf", cfg.config_hash()?)?;
    let radar = &resolved.radar;
    let bench = benchmark_resolution(radar, &resolved.plan);
    let mut pipeline = SimulatedPipeline::new(radar.clone(), resolved.plan.clone(), section.estimator);
    pipeline.iaa = cfg.imaging.iaa_options();
    let opts = PsfOptions::for_resolution(bench);
    let mut summaries = Vec::new();
    for (i, &probe) in section.probes_m.iter().enumerate() {
        rec.stage(&format!("probe_{i}"));
        let profile = numerical_psf(&pipeline, radar, probe, ScatteringModel::isotropic(1.0), &opts)?;
        let width = profile.full_width();
        let mut report = ResolutionReport::new(width, bench)?;
        let c_r = width / bench * C_R;
        if section.estimator == Estimator::Dft {
            report.c_r_estimate = Some(c_r);
        }
        let mut patch = String::new();
        let n = profile.patch.nrows();
        let h = profile.patch_half_extent;
        let coord = |j: usize| -h + 2.0 * h * j as f64 / (n - 1) as f64;
        patch.push_str("dy\\dx");
        for j in 0..n {
            write!(patch, ",{:.6}", coord(j)).unwrap();
        }
        patch.push('\n');
        for (iy, row) in profile.patch.outer_iter().enumerate() {
            write!(patch, "{:.6}", coord(iy)).unwrap();
            for v in row {
                write!(patch, ",{v:e}").unwrap();
            }
            patch.push('\n');
        }
        rec.output(&format!("psf_patch_{i}.csv"), patch.as_bytes())?;
        let mut contour = String::from("alpha_rad,zeta_m\n");
        for (a, z) in profile.angles.iter().zip(&profile.zeta) {
            writeln!(contour, "{a:.6},{z:.6e}").unwrap();
        }
        rec.output(&format!("psf_contour_{i}.csv"), contour.as_bytes())?;
        summaries.push(PsfSummary {
            probe_m: probe,
            estimator: section.estimator,
            full_width_m: width,
            mean_full_width_m: profile.mean_full_width(),
            contour_spread: profile.contour_spread(),
            benchmark_m: bench,
            c_r_estimate: c_r,
            report,
        });
    }
    rec.output("psf_report.json", &json(&summaries)?)?;
    Ok(rec.finish(None)?.0)
}

#[derive(Debug, Serialize)]
struct SweepEntry {
    delta_sa_deg: f64,
    estimator: Estimator,
    delta_benchmark_m: f64,
    /// Interpolated 90% crossing, absent when the curve never settles above 90%.
    crossing_m: Option<f64>,
    report: Option<ResolutionReport>,
}

/// Two-point resolution sweeps for every configured `δ_SA` and estimator.
pub fn resolution_sweep(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<RunManifest> {
    let resolved = cfg.resolve()?;
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::invalid("configuration has no [sweep] section"))?;
    let mut rec = RunRecorder::new(&output_dir(cfg, out), "resolution-sweep", cfg.config_hash()?)?;
    let radar = &resolved.radar;
    let mut curves: Vec<SweepCurve> = Vec::new();
    let mut entries = Vec::new();
    for &delta_deg in &sweep.delta_sa_deg {
        let plan = cfg.plan_for(radar, delta_deg)?;
        let bench = benchmark_resolution(radar, &plan);
        let spacings = sweep.spacing_factors.iter().map(|f| f * bench).collect();
        let spec = cfg.sweep_spec(spacings)?;
        let mut dft_crossing = None;
        for &est in &sweep.estimators {
            rec.stage(&format!("sweep_{}_{delta_deg}", est.name()));
            let mut pipeline = SimulatedPipeline::new(radar.clone(), plan.clone(), est);
            pipeline.iaa = cfg.imaging.iaa_options();
            let curve = measure_resolution(&pipeline, radar, &plan, est, &spec)?;
            let crossing = curve.crossing();
            let report = match crossing {
                Some(d) => {
                    let mut r = ResolutionReport::new(d, bench)?;
                    match est {
                        Estimator::Dft => {
                            dft_crossing = Some(d);
                            r.c_r_estimate = Some(d / bench * C_R);
                        }
                        Estimator::Iaa => r.kappa_s = dft_crossing.map(|dft| d / dft),
                    }
                    Some(r)
                }
                None => None,
            };
            entries.push(SweepEntry {
                delta_sa_deg: delta_deg,
                estimator: est,
                delta_benchmark_m: bench,
                crossing_m: crossing,
                report,
            });
            curves.push(curve);
        }
    }
    rec.stage("write");
    rec.output("sweep.csv", sweep_csv(&curves).as_bytes())?;
    rec.output("sweep_report.json", &json(&entries)?)?;
    Ok(rec.finish(None)?.0)
}

/// Peak-to-median-background ratio.
pub fn peak_to_median(img: &EnergyImage) -> f64 {
    let median = img.median();
    if median > 0.0 {
        img.max() / median
    } else {
        f64::INFINITY
    }
}

#[derive(Debug, Serialize)]
struct BaselineScore {
    method: String,
    peak_to_median: f64,
    peak_m: (f64, f64),
}

/// Images one synthesized acquisition with the configured estimator and
/// with both coherent baselines.
pub fn compare_baselines(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<RunManifest> {
    let resolved = cfg.resolve()?;
    let mut rec = RunRecorder::new(&output_dir(cfg, out), "compare-baselines", cfg.config_hash()?)?;
    rec.stage("synthesize");
    let cube = synthesize(&resolved.scene, &resolved.radar, cfg.synthesis.fidelity, &cfg.synthesis_options())?;
    rec.stage("range_compress");
    let plan = &resolved.plan;
    let rc = range_compress(&reshape_sectors(&cube, plan)?)?;
    rec.stage("estimate");
    let map = estimate(&rc, plan, cfg.imaging.estimator, &cfg.imaging.iaa_options())?;
    rec.stage("associate");
    let da = associate(&map, &cube.cfg, &resolved.grid)?;
    rec.stage("fbp");
    let fbp = fbp_reconstruct(&rc, &cube.cfg, &resolved.grid)?;
    rec.stage("coherent_sum");
    let coherent = coherent_sum_baseline(&map, &cube.cfg, &resolved.grid)?;
    rec.stage("write");
    let mut scores = Vec::new();
    for mut img in [da, fbp, coherent] {
        tag_image(&mut img, cfg, &resolved.scene.label)?;
        let method = img.metadata.method.clone();
        write_image(&mut rec, &format!("compare_{method}"), &img)?;
        scores.push(BaselineScore {
            method,
            peak_to_median: peak_to_median(&img),
            peak_m: img.peak_position(),
        });
    }
    rec.output("compare_baselines.json", &json(&scores)?)?;
    Ok(rec.finish(None)?.0)
}

#[derive(Debug, Serialize)]
pub struct ConfigSummary {
    pub name: String,
    pub config_hash: String,
    pub acquisition_hash: String,
    pub wavelength_m: f64,
    pub unambiguous_radius_m: f64,
    pub m_half: usize,
    pub delta_sa_deg: f64,
    pub benchmark_resolution_m: f64,
    pub cell_size_m: f64,
    pub n_scatterers: usize,
}

/// Checks the configuration without writing anything.
pub fn validate_config(cfg: &ExperimentConfig) -> Result<ConfigSummary> {
    let r = cfg.resolve()?;
    Ok(ConfigSummary {
        name: cfg.name.clone(),
        config_hash: cfg.config_hash()?,
        acquisition_hash: cfg.acquisition_hash()?,
        wavelength_m: r.radar.wavelength(),
        unambiguous_radius_m: r.radar.unambiguous_radius(),
        m_half: r.plan.m_half,
        delta_sa_deg: r.plan.delta_sa_rad.to_degrees(),
        benchmark_resolution_m: benchmark_resolution(&r.radar, &r.plan),
        cell_size_m: r.grid.cell_size(),
        n_scatterers: r.scene.scatterers.len(),
    })
}
