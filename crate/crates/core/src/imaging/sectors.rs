//! Azimuth-sector view of an echo cube and range compression.

use std::f64::consts::PI;
use std::ops::Range;

use ndarray::Array2;
use num_complex::Complex64;

use crate::echo::EchoCube;
use crate::error::{Error, Result};
use crate::geometry::{SectorPlan, SPEED_OF_LIGHT};

/// `S[n][m][k] = s[n][ℓ(k, m)]` with `ℓ(k, m) = round(Φ_k/(ωT0)) + m` wrapped
/// modulo `L`. Holds the index map and borrows the cube, so no samples are copied.
#[derive(Debug, Clone)]
pub struct SectorCube<'a> {
    pub cube: &'a EchoCube,
    pub plan: SectorPlan,
    /// `(2M + 1) × K` source symbol indices.
    pub symbols: Array2<usize>,
}

pub fn reshape_sectors<'a>(cube: &'a EchoCube, plan: &SectorPlan) -> Result<SectorCube<'a>> {
    cube.validate()?;
    plan.check_compatible(&cube.cfg)?;
    let l = cube.n_symbols();
    let symbols = Array2::from_shape_fn((plan.window_len(), plan.k_sectors), |(mi, k)| {
        plan.symbol_index(k, mi as i64 - plan.m_half as i64, l)
    });
    Ok(SectorCube {
        cube,
        plan: plan.clone(),
        symbols,
    })
}

impl SectorCube<'_> {
    /// `S[n][m][k]` with `m` given as an offset in `−M..=M`.
    pub fn sample(&self, n: usize, m: i64, k: usize) -> Complex64 {
        let mi = (m + self.plan.m_half as i64) as usize;
        self.cube.samples[[n, self.symbols[[mi, k]]]]
    }
}

/// Range-compressed sector data `T[m][k]`, `(2M + 1) × K`.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeCompressed {
    pub t: Array2<Complex64>,
    pub plan: SectorPlan,
}

impl RangeCompressed {
    /// Sector data taken directly from a `(2M + 1) × K` matrix.
    pub fn from_matrix(t: Array2<Complex64>, plan: &SectorPlan) -> Result<Self> {
        if t.dim() != (plan.window_len(), plan.k_sectors) {
            return Err(Error::invalid(format!(
                "compressed data is {:?}, plan expects {:?}",
                t.dim(),
                (plan.window_len(), plan.k_sectors)
            )));
        }
        Ok(RangeCompressed { t, plan: plan.clone() })
    }

    /// Data vector of sector `k`, ordered `m = −M..=M`.
    pub fn sector(&self, k: usize) -> Vec<Complex64> {
        self.t.column(k).to_vec()
    }
}

/// Averages all subcarriers after removing the data symbols, the path
/// loss and the common slant-range phase.
pub fn range_compress(sc: &SectorCube<'_>) -> Result<RangeCompressed> {
    range_compress_subcarriers(sc, 0..sc.cube.n_subcarriers())
}

/// Range compression restricted to the subcarriers in `band`.
pub fn range_compress_subcarriers(sc: &SectorCube<'_>, band: Range<usize>) -> Result<RangeCompressed> {
    let cube = sc.cube;
    let cfg = &cube.cfg;
    if band.is_empty() || band.end > cube.n_subcarriers() {
        return Err(Error::invalid(format!(
            "subcarrier band {band:?} outside 0..{}",
            cube.n_subcarriers()
        )));
    }
    let step = 2.0 * PI * cfg.delta_f_hz * 2.0 * cfg.slant_range() / SPEED_OF_LIGHT;
    let derotate: Vec<Complex64> = band.clone().map(|n| Complex64::from_polar(1.0, step * n as f64)).collect();
    let scale = 1.0 / band.len() as f64;

    let mut per_symbol: Vec<Option<Complex64>> = vec![None; cube.n_symbols()];
    let mut t = Array2::zeros(sc.symbols.dim());
    for (idx, &ell) in sc.symbols.indexed_iter() {
        let v = match per_symbol[ell] {
            Some(v) => v,
            None => {
                let mut acc = Complex64::new(0.0, 0.0);
                for (r, n) in derotate.iter().zip(band.clone()) {
                    let c = cube.data_symbols[[n, ell]];
                    if c.norm_sqr() == 0.0 {
                        return Err(Error::invalid(format!("data symbol ({n}, {ell}) is zero")));
                    }
                    acc += r * cube.samples[[n, ell]] / (c * cfg.path_loss);
                }
                let v = acc * scale;
                per_symbol[ell] = Some(v);
                v
            }
        };
        t[idx] = v;
    }
    Ok(RangeCompressed {
        t,
        plan: sc.plan.clone(),
    })
}
