mod common;

use std::f64::consts::TAU;

use bisar::container::{self, Header, MatrixKind};
use bisar::echo::{synthesize, Fidelity, NoiseSpec, SymbolScheme, SynthesisOptions};
use bisar::imaging::{estimate_dft, estimate_iaa, IaaOptions, RangeCompressed};
use bisar::resolution::benchmark_resolution;
use bisar::{RadarConfig, Scatterer, ScatteringModel, Scene, SectorPlan};
use ndarray::Array2;
use num_complex::Complex64;
use proptest::prelude::*;

fn small_radar() -> RadarConfig {
    RadarConfig {
        n_subcarriers: 4,
        omega_rad_s: TAU / 2.0,
        ..RadarConfig::mmwave_turntable()
    }
    .full_revolution()
}

fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

/// A plan plus matching random compressed data.
fn plan_and_data() -> impl Strategy<Value = (SectorPlan, Array2<Complex64>)> {
    (1usize..8, 1usize..4, 0usize..20).prop_flat_map(|(m_half, k, extra)| {
        let cfg = RadarConfig::mmwave_turntable();
        let window = 2 * m_half + 1;
        let bins = (window + extra + 1) & !1;
        let plan = SectorPlan::from_half_width(&cfg, k, m_half, bins).unwrap();
        proptest::collection::vec(complex(), window * k)
            .prop_map(move |v| (plan.clone(), Array2::from_shape_vec((window, k), v).unwrap()))
    })
}

fn scatterer_strategy() -> impl Strategy<Value = Scatterer> {
    (-0.3..0.3f64, -0.3..0.3f64, 0.0..0.3f64, 0.1..2.0f64, 0.0..TAU).prop_map(|(x, y, z, a, p)| {
        Scatterer::new([x, y, z], ScatteringModel::Isotropic { amplitude: a, phase: p })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn dft_matches_brute_force((plan, t) in plan_and_data()) {
        let rc = RangeCompressed::from_matrix(t.clone(), &plan).unwrap();
        let fast = estimate_dft(&rc, &plan).unwrap();
        let slow = common::brute_force_dft(&t, plan.t0(), plan.doppler_bins);
        let err = common::max_relative_error(&fast.g, &slow);
        prop_assert!(err <= 1e-10, "relative error {err:e}");
    }

    #[test]
    fn one_iaa_iteration_is_the_dft((plan, t) in plan_and_data()) {
        let rc = RangeCompressed::from_matrix(t, &plan).unwrap();
        let dft = estimate_dft(&rc, &plan).unwrap();
        let iaa = estimate_iaa(&rc, &plan, &IaaOptions::iters(1)).unwrap();
        prop_assert!(common::max_relative_error(&iaa.g, &dft.g) <= 1e-10);
    }

    #[test]
    fn iaa_output_is_finite((plan, t) in plan_and_data()) {
        let rc = RangeCompressed::from_matrix(t, &plan).unwrap();
        let iaa = estimate_iaa(&rc, &plan, &IaaOptions::default()).unwrap();
        prop_assert!(iaa.g.iter().all(|v| v.re.is_finite() && v.im.is_finite()));
    }
}

proptest! {
    #[test]
    fn bs_position_norm_is_constant(ell in 0usize..4000, h in 0.0..50.0f64) {
        let cfg = RadarConfig { height_m: h, ..RadarConfig::mmwave_turntable() };
        let p = cfg.bs_position(ell).unwrap();
        let norm = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        prop_assert!((norm - cfg.slant_range()).abs() / cfg.slant_range() < 1e-12);
    }

    #[test]
    fn azimuth_is_uniform_and_increasing(ell in 0usize..3999) {
        let cfg = RadarConfig::mmwave_turntable();
        let a = cfg.azimuth_angle(ell).unwrap();
        let b = cfg.azimuth_angle(ell + 1).unwrap();
        prop_assert!(b > a);
        prop_assert!((b - a - cfg.angle_step()).abs() < 1e-12);
        prop_assert!((0.0..TAU).contains(&a));
    }

    #[test]
    fn doppler_is_linear(
        x1 in -1.0..1.0f64, y1 in -1.0..1.0f64, x2 in -1.0..1.0f64, y2 in -1.0..1.0f64,
        a in -3.0..3.0f64, b in -3.0..3.0f64, phi in 0.0..TAU,
    ) {
        let cfg = RadarConfig::mmwave_turntable();
        let lhs = cfg.doppler_frequency(a * x1 + b * x2, a * y1 + b * y2, phi);
        let rhs = a * cfg.doppler_frequency(x1, y1, phi) + b * cfg.doppler_frequency(x2, y2, phi);
        prop_assert!((lhs - rhs).abs() < 1e-9 * (1.0 + rhs.abs()));
    }

    #[test]
    fn doppler_rotates_with_azimuth(x in -1.0..1.0f64, y in -1.0..1.0f64, phi in 0.0..TAU) {
        let cfg = RadarConfig::mmwave_turntable();
        let (s, c) = phi.sin_cos();
        let (xr, yr) = (x * c + y * s, -x * s + y * c);
        let d = cfg.doppler_frequency(x, y, phi);
        prop_assert!((d - cfg.doppler_frequency(xr, yr, 0.0)).abs() < 1e-9);
    }

    #[test]
    fn doppler_inside_region_is_below_nyquist(r_frac in 0.0..0.999f64, theta in 0.0..TAU, phi in 0.0..TAU, h in 0.0..30.0f64) {
        let cfg = RadarConfig { height_m: h, ..RadarConfig::mmwave_turntable() };
        let r = r_frac * cfg.unambiguous_radius();
        let d = cfg.doppler_frequency(r * theta.cos(), r * theta.sin(), phi);
        prop_assert!(d.abs() * cfg.t0_s < 0.5);
    }

    #[test]
    fn benchmark_depends_on_height_ratio_only(ratio in 0.0..0.5f64, r in 1.0..500.0f64, delta_deg in 0.5..3.0f64) {
        let base = RadarConfig::mmwave_turntable();
        let a = RadarConfig { radius_m: r, height_m: ratio * r, ..base.clone() };
        let b = RadarConfig { radius_m: 2.0 * r, height_m: 2.0 * ratio * r, ..base };
        let pa = SectorPlan::new(&a, 4, delta_deg.to_radians(), 512).unwrap();
        let pb = SectorPlan::new(&b, 4, delta_deg.to_radians(), 512).unwrap();
        let (da, db) = (benchmark_resolution(&a, &pa), benchmark_resolution(&b, &pb));
        prop_assert!((da - db).abs() / da < 1e-12);
    }

    #[test]
    fn container_round_trips(rows in 1usize..6, cols in 1usize..6, tag in 0u8..3, seed in any::<u64>()) {
        let data = Array2::from_shape_fn((rows, cols), |(r, c)| {
            Complex64::new((seed as f64).sin() * r as f64, -(c as f64) / 3.0)
        });
        let header = Header { kind: MatrixKind::EchoCube, rows, cols, config_hash: [tag; 32], tag };
        let bytes = container::encode(&header, &data).unwrap();
        let (h, d) = container::decode(&bytes[..]).unwrap();
        prop_assert_eq!(h, header);
        prop_assert_eq!(d, data);
    }

    #[test]
    fn scene_toml_round_trips(scatterers in proptest::collection::vec(scatterer_strategy(), 1..5), seed in 0u64..1000) {
        let mut scatterers = scatterers;
        scatterers.push(Scatterer::new([0.0, 0.1, 0.0], ScatteringModel::sectored_random(1.0, 0.3, 12, seed)));
        let scene = Scene::new("prop", scatterers);
        prop_assert_eq!(Scene::from_toml(&scene.to_toml()).unwrap(), scene);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn synthesis_is_linear(a in proptest::collection::vec(scatterer_strategy(), 1..3), b in proptest::collection::vec(scatterer_strategy(), 1..3)) {
        let cfg = small_radar();
        let opts = SynthesisOptions { scheme: SymbolScheme::Qpsk, symbol_seed: 5, ..Default::default() };
        let both: Vec<Scatterer> = a.iter().chain(b.iter()).cloned().collect();
        for fidelity in [Fidelity::Exact, Fidelity::FarField] {
            let ca = synthesize(&Scene::new("a", a.clone()), &cfg, fidelity, &opts).unwrap();
            let cb = synthesize(&Scene::new("b", b.clone()), &cfg, fidelity, &opts).unwrap();
            let cab = synthesize(&Scene::new("ab", both.clone()), &cfg, fidelity, &opts).unwrap();
            let sum = &ca.samples + &cb.samples;
            prop_assert!(common::max_relative_error(&cab.samples, &sum) < 1e-9);
        }
    }

    #[test]
    fn synthesis_scales_with_amplitude(s in proptest::collection::vec(scatterer_strategy(), 1..4), factor in 0.01..10.0f64) {
        let cfg = small_radar();
        let scaled: Vec<Scatterer> = s
            .iter()
            .map(|sc| Scatterer::new(sc.position, sc.scattering.scaled(factor)))
            .collect();
        let opts = SynthesisOptions::default();
        let base = synthesize(&Scene::new("s", s), &cfg, Fidelity::Exact, &opts).unwrap();
        let big = synthesize(&Scene::new("s", scaled), &cfg, Fidelity::Exact, &opts).unwrap();
        for (x, y) in base.samples.iter().zip(big.samples.iter()) {
            prop_assert!((y.norm() - factor * x.norm()).abs() <= 1e-9 * factor * (1.0 + x.norm()));
        }
    }

    #[test]
    fn noise_never_touches_the_signal_seed(seed in any::<u64>()) {
        let cfg = small_radar();
        let scene = Scene::new("p", vec![Scatterer::new([0.1, 0.0, 0.0], ScatteringModel::isotropic(1.0))]);
        let clean = synthesize(&scene, &cfg, Fidelity::FarField, &SynthesisOptions::default()).unwrap();
        let opts = SynthesisOptions { noise: NoiseSpec::snr(10.0, seed), ..Default::default() };
        let noisy = synthesize(&scene, &cfg, Fidelity::FarField, &opts).unwrap();
        let power = (&noisy.samples - &clean.samples).iter().map(|v| v.norm_sqr()).sum::<f64>() / clean.samples.len() as f64;
        prop_assert!((power / 0.1 - 1.0).abs() < 0.15, "noise power {power}");
    }
}
