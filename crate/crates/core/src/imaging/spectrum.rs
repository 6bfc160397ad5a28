//! Per-sector Doppler spectra: matched-filter (DFT) and IAA estimates.

use std::f64::consts::TAU;

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::SectorPlan;
use crate::imaging::sectors::RangeCompressed;
use crate::linalg::{cholesky_in_place, inverse_from_cholesky, mat_vec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    Dft,
    Iaa,
}

impl Estimator {
    pub fn tag(self) -> u8 {
        match self {
            Estimator::Dft => 0,
            Estimator::Iaa => 1,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(Estimator::Dft),
            1 => Some(Estimator::Iaa),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Estimator::Dft => "dft",
            Estimator::Iaa => "iaa",
        }
    }
}

impl std::str::FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dft" => Ok(Estimator::Dft),
            "iaa" => Ok(Estimator::Iaa),
            other => Err(Error::invalid(format!("unknown estimator {other:?}"))),
        }
    }
}

/// Complex spectrum `g[i][k]` on the Doppler grid `D_i = −1/(2T0) + i/(I·T0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleDopplerMap {
    /// `I × K`.
    pub g: Array2<Complex64>,
    pub plan: SectorPlan,
    pub estimator: Estimator,
}

impl AngleDopplerMap {
    pub fn doppler_axis(&self) -> Vec<f64> {
        (0..self.plan.doppler_bins).map(|i| self.plan.doppler_bin_frequency(i)).collect()
    }
}

/// Steering phasors `b_i[m] = e^{j2πD_i·T0·m}` on the Doppler grid.
///
/// Since `D_i·T0 = −½ + i/I`, every entry is `(−1)^m` times an `I`-th root
/// of unity, so one table of `I` roots covers all `(i, m)`.
#[derive(Debug, Clone)]
pub struct SteeringTable {
    bins: usize,
    roots: Vec<Complex64>,
}

impl SteeringTable {
    pub fn new(bins: usize) -> Self {
        let roots = (0..bins)
            .map(|q| Complex64::from_polar(1.0, TAU * q as f64 / bins as f64))
            .collect();
        SteeringTable { bins, roots }
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    #[inline]
    pub fn steer(&self, i: usize, m: i64) -> Complex64 {
        let q = (i as i64 * m).rem_euclid(self.bins as i64) as usize;
        let r = self.roots[q];
        if m & 1 == 0 {
            r
        } else {
            -r
        }
    }

    /// `out[i] = Σ_m conj(b_i[m])·u[m]` for `u` ordered `m = −M..=M`.
    pub fn project(&self, u: &[Complex64], out: &mut [Complex64]) {
        let m_half = (u.len() / 2) as i64;
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, x) in u.iter().enumerate() {
                acc += self.steer(i, j as i64 - m_half).conj() * x;
            }
            *o = acc;
        }
    }
}

fn check_plan(rc: &RangeCompressed, plan: &SectorPlan) -> Result<()> {
    if rc.t.dim() != (plan.window_len(), plan.k_sectors) {
        return Err(Error::invalid("compressed data does not match the sector plan"));
    }
    if plan.doppler_bins < plan.window_len() {
        return Err(Error::invalid("doppler_bins must be at least 2M + 1"));
    }
    Ok(())
}

fn dft_sector(table: &SteeringTable, t: &[Complex64], out: &mut [Complex64]) {
    table.project(t, out);
    let scale = 1.0 / t.len() as f64;
    out.iter_mut().for_each(|g| *g *= scale);
}

fn assemble(columns: Vec<Vec<Complex64>>, bins: usize) -> Array2<Complex64> {
    let k = columns.len();
    let mut g = Array2::zeros((bins, k));
    for (kk, col) in columns.into_iter().enumerate() {
        g.column_mut(kk).assign(&ndarray::Array1::from(col));
    }
    g
}

/// Matched-filter spectrum `g[i][k] = (1/(2M+1))·Σ_m T[m][k]·e^{−j2πD_i·T0·m}`.
pub fn estimate_dft(rc: &RangeCompressed, plan: &SectorPlan) -> Result<AngleDopplerMap> {
    check_plan(rc, plan)?;
    let table = SteeringTable::new(plan.doppler_bins);
    let columns: Vec<Vec<Complex64>> = (0..plan.k_sectors)
        .into_par_iter()
        .map(|k| {
            let t = rc.sector(k);
            let mut g = vec![Complex64::new(0.0, 0.0); plan.doppler_bins];
            dft_sector(&table, &t, &mut g);
            g
        })
        .collect();
    Ok(AngleDopplerMap {
        g: assemble(columns, plan.doppler_bins),
        plan: plan.clone(),
        estimator: Estimator::Dft,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IaaOptions {
    /// Total iterations including the first, identity-covariance pass.
    pub max_iters: usize,
    /// Stop once `max|Δg| / max|g|` falls below this.
    pub tol: f64,
    /// Diagonal loading as a fraction of `trace(R)/(2M+1)`.
    pub loading: f64,
}

impl Default for IaaOptions {
    fn default() -> Self {
        IaaOptions {
            max_iters: 15,
            tol: 1e-3,
            loading: 1e-6,
        }
    }
}

impl IaaOptions {
    pub fn iters(max_iters: usize) -> Self {
        IaaOptions {
            max_iters,
            ..Default::default()
        }
    }
}

/// Iterative adaptive approach, run independently per sector.
///
/// The first pass uses an identity covariance and therefore equals
/// [`estimate_dft`]. Later passes rebuild `R = Σ_i |g_i|²·b_i·b_iᴴ + σ²I`,
/// with `σ²` the mean power of the weakest quarter of the DFT bins, and
/// update `g_i = b_iᴴR⁻¹t / (b_iᴴR⁻¹b_i)`.
pub fn estimate_iaa(rc: &RangeCompressed, plan: &SectorPlan, opts: &IaaOptions) -> Result<AngleDopplerMap> {
    check_plan(rc, plan)?;
    if opts.max_iters == 0 {
        return Err(Error::invalid("IAA needs at least one iteration"));
    }
    let table = SteeringTable::new(plan.doppler_bins);
    let columns = (0..plan.k_sectors)
        .into_par_iter()
        .map(|k| iaa_sector(&table, &rc.sector(k), k, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(AngleDopplerMap {
        g: assemble(columns, plan.doppler_bins),
        plan: plan.clone(),
        estimator: Estimator::Iaa,
    })
}

fn iaa_sector(table: &SteeringTable, t: &[Complex64], sector: usize, opts: &IaaOptions) -> Result<Vec<Complex64>> {
    let bins = table.bins();
    let p = t.len();
    let mut g = vec![Complex64::new(0.0, 0.0); bins];
    dft_sector(table, t, &mut g);
    if opts.max_iters == 1 || t.iter().all(|v| v.norm_sqr() == 0.0) {
        return Ok(g);
    }

    let mut powers: Vec<f64> = g.iter().map(|v| v.norm_sqr()).collect();
    powers.sort_by(f64::total_cmp);
    let quarter = (bins / 4).max(1);
    let noise = powers[..quarter].iter().sum::<f64>() / quarter as f64;

    let mut r = vec![Complex64::new(0.0, 0.0); p];
    let mut cov = vec![Complex64::new(0.0, 0.0); p * p];
    let mut inv = vec![Complex64::new(0.0, 0.0); p * p];
    let mut wt = vec![Complex64::new(0.0, 0.0); p];
    let mut diag_sums = vec![Complex64::new(0.0, 0.0); p];
    let mut numer = vec![Complex64::new(0.0, 0.0); bins];
    let mut next = vec![Complex64::new(0.0, 0.0); bins];

    for iteration in 1..opts.max_iters {
        // r[τ] = Σ_i p_i·e^{j2πD_i·T0·τ}
        for (tau, rt) in r.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, gi) in g.iter().enumerate() {
                acc += table.steer(i, tau as i64) * gi.norm_sqr();
            }
            *rt = acc;
        }
        let diag = r[0].re + noise;
        let load = opts.loading * diag;
        for a in 0..p {
            for b in 0..p {
                cov[a * p + b] = if a >= b { r[a - b] } else { r[b - a].conj() };
            }
            cov[a * p + a] = Complex64::new(diag + load, 0.0);
        }
        if !cholesky_in_place(&mut cov, p) {
            return Err(Error::SingularCovariance { sector, iteration });
        }
        inverse_from_cholesky(&cov, p, &mut inv);

        mat_vec(&inv, p, t, &mut wt);
        table.project(&wt, &mut numer);

        // bᴴWb = s[0] + 2·Re Σ_{τ>0} s[τ]·e^{j2πD_i·T0·τ}, s[τ] = Σ_a W[a][a+τ]
        for (tau, s) in diag_sums.iter_mut().enumerate() {
            *s = (0..p - tau).map(|a| inv[a * p + a + tau]).sum();
        }
        for (i, out) in next.iter_mut().enumerate() {
            let mut den = diag_sums[0].re;
            for (tau, s) in diag_sums.iter().enumerate().skip(1) {
                den += 2.0 * (s * table.steer(i, tau as i64)).re;
            }
            *out = numer[i] / den;
        }

        let scale = g.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let change = next.iter().zip(&g).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        std::mem::swap(&mut g, &mut next);
        if scale > 0.0 && change / scale < opts.tol {
            break;
        }
    }
    Ok(g)
}
