//! Energy images on the ROI grid and their CSV / PGM exports.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::RoiGrid;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ImageMetadata {
    /// Digest of the acquisition configuration.
    pub config_hash: String,
    /// `dft`, `iaa`, `fbp`, `coherent_sum`, or a `wideband_` prefixed variant.
    pub method: String,
    pub scene_label: String,
    pub k_sectors: usize,
    pub m_half: usize,
    pub doppler_bins: usize,
    /// Free-form processing notes, for example the FBP filter.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// Real, non-negative image `G[iy][ix]` over a [`RoiGrid`]; row `iy` is
/// `y = grid.coordinate(iy)`, so rows run from `−h` up to `+h`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyImage {
    pub values: Array2<f64>,
    pub grid: RoiGrid,
    pub metadata: ImageMetadata,
}

impl EnergyImage {
    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.values[[iy, ix]]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `(ix, iy)` of the largest value; the first one in row-major order on ties.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = (0, 0);
        let mut top = f64::NEG_INFINITY;
        for ((iy, ix), &v) in self.values.indexed_iter() {
            if v > top {
                top = v;
                best = (ix, iy);
            }
        }
        best
    }

    /// Position of the largest value in metres.
    pub fn peak_position(&self) -> (f64, f64) {
        let (ix, iy) = self.argmax();
        (self.grid.coordinate(ix), self.grid.coordinate(iy))
    }

    pub fn median(&self) -> f64 {
        let mut v: Vec<f64> = self.values.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        if n % 2 == 1 {
            v[n / 2]
        } else {
            0.5 * (v[n / 2 - 1] + v[n / 2])
        }
    }

    /// Cells that are strict-or-equal maxima of their 3×3 neighbourhood,
    /// sorted by decreasing value.
    pub fn local_maxima(&self) -> Vec<(usize, usize, f64)> {
        let (ny, nx) = self.values.dim();
        let mut out = Vec::new();
        for iy in 0..ny {
            for ix in 0..nx {
                let v = self.values[[iy, ix]];
                let mut is_max = true;
                'scan: for dy in -1i64..=1 {
                    for dx in -1i64..=1 {
                        let (yy, xx) = (iy as i64 + dy, ix as i64 + dx);
                        if (dy, dx) == (0, 0) || yy < 0 || xx < 0 || yy >= ny as i64 || xx >= nx as i64 {
                            continue;
                        }
                        if self.values[[yy as usize, xx as usize]] > v {
                            is_max = false;
                            break 'scan;
                        }
                    }
                }
                if is_max && v > 0.0 {
                    out.push((ix, iy, v));
                }
            }
        }
        out.sort_by(|a, b| b.2.total_cmp(&a.2));
        out
    }

    /// Largest value within `radius` cells (Chebyshev) of `(ix, iy)`.
    pub fn local_peak(&self, ix: usize, iy: usize, radius: usize) -> f64 {
        let n = self.grid.n_cells;
        let (x0, x1) = (ix.saturating_sub(radius), (ix + radius).min(n - 1));
        let (y0, y1) = (iy.saturating_sub(radius), (iy + radius).min(n - 1));
        let mut best = f64::NEG_INFINITY;
        for y in y0..=y1 {
            for x in x0..=x1 {
                best = best.max(self.values[[y, x]]);
            }
        }
        best
    }

    /// Binary map of cells at or above `max · 10^(threshold_db/20)`.
    pub fn detection_mask(&self, threshold_db: f64) -> Array2<bool> {
        let level = self.max() * 10f64.powf(threshold_db / 20.0);
        self.values.mapv(|v| v >= level)
    }

    /// Grid as CSV: a header row `y\x` followed by the x coordinates, then
    /// one row per y coordinate in ascending order.
    pub fn to_csv(&self) -> String {
        let xs = self.grid.coordinates();
        let mut out = String::from("y\\x");
        for x in &xs {
            write!(out, ",{x:.6}").unwrap();
        }
        out.push('\n');
        for (iy, row) in self.values.outer_iter().enumerate() {
            write!(out, "{:.6}", xs[iy]).unwrap();
            for v in row {
                write!(out, ",{v:e}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str, grid: RoiGrid) -> Result<Self> {
        let n = grid.n_cells;
        let mut values = Array2::zeros((n, n));
        let mut lines = text.lines();
        lines.next().ok_or_else(|| Error::Format("empty CSV".into()))?;
        for iy in 0..n {
            let line = lines.next().ok_or_else(|| Error::Format("CSV has too few rows".into()))?;
            let cells: Vec<&str> = line.split(',').skip(1).collect();
            if cells.len() != n {
                return Err(Error::Format(format!("CSV row {iy} has {} values, expected {n}", cells.len())));
            }
            for (ix, c) in cells.iter().enumerate() {
                values[[iy, ix]] = c
                    .trim()
                    .parse()
                    .map_err(|e| Error::Format(format!("CSV value {c:?}: {e}")))?;
            }
        }
        Ok(EnergyImage {
            values,
            grid,
            metadata: ImageMetadata::default(),
        })
    }

    /// 16-bit binary PGM, linearly scaled from `[min, max]` to `[0, 65535]`.
    /// The top row is `+y`.
    pub fn to_pgm(&self) -> Vec<u8> {
        let n = self.grid.n_cells;
        let (lo, hi) = (self.min(), self.max());
        let span = hi - lo;
        let mut out = format!("P5\n{n} {n}\n65535\n").into_bytes();
        for iy in (0..n).rev() {
            for ix in 0..n {
                let v = if span > 0.0 {
                    ((self.values[[iy, ix]] - lo) / span * 65535.0).round() as u16
                } else {
                    0
                };
                out.extend_from_slice(&v.to_be_bytes());
            }
        }
        out
    }

    /// Sidecar describing how to undo the PGM scaling.
    pub fn pgm_sidecar(&self) -> String {
        let sidecar = PgmSidecar {
            min: self.min(),
            max: self.max(),
            n_cells: self.grid.n_cells,
            half_extent_m: self.grid.half_extent_m,
            top_row: "+y".into(),
            metadata: self.metadata.clone(),
        };
        serde_json::to_string_pretty(&sidecar).expect("sidecar serializes") + "\n"
    }

    /// Writes `<stem>.csv`, `<stem>.pgm` and `<stem>.pgm.json` under `dir`
    /// and returns the paths in that order.
    pub fn write_all(&self, dir: &Path, stem: &str) -> Result<Vec<std::path::PathBuf>> {
        let csv = dir.join(format!("{stem}.csv"));
        let pgm = dir.join(format!("{stem}.pgm"));
        let side = dir.join(format!("{stem}.pgm.json"));
        std::fs::write(&csv, self.to_csv())?;
        std::fs::File::create(&pgm)?.write_all(&self.to_pgm())?;
        std::fs::write(&side, self.pgm_sidecar())?;
        Ok(vec![csv, pgm, side])
    }
}

#[derive(Serialize, Deserialize)]
struct PgmSidecar {
    min: f64,
    max: f64,
    n_cells: usize,
    half_extent_m: f64,
    top_row: String,
    metadata: ImageMetadata,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::RadarConfig;

    fn image() -> EnergyImage {
        let grid = RoiGrid::square(&RadarConfig::mmwave_turntable(), 0.2, 5).unwrap();
        let values = Array2::from_shape_fn((5, 5), |(iy, ix)| (iy * 5 + ix) as f64 * 0.5);
        EnergyImage {
            values,
            grid,
            metadata: ImageMetadata::default(),
        }
    }

    #[test]
    fn csv_round_trip() {
        let img = image();
        let text = img.to_csv();
        assert!(text.starts_with("y\\x,-0.200000,-0.100000,0.000000"));
        let back = EnergyImage::from_csv(&text, img.grid.clone()).unwrap();
        assert_eq!(back.values, img.values);
    }

    #[test]
    fn pgm_layout() {
        let img = image();
        let pgm = img.to_pgm();
        let header = b"P5\n5 5\n65535\n";
        assert_eq!(&pgm[..header.len()], header);
        let body = &pgm[header.len()..];
        assert_eq!(body.len(), 50);
        // top row is the largest y, whose last pixel is the image maximum
        assert_eq!(&body[8..10], &[0xff, 0xff]);
        assert_eq!(&body[40..42], &[0, 0]);
        assert!(img.pgm_sidecar().contains("\"max\": 12.0"));
    }

    #[test]
    fn peaks_and_statistics() {
        let img = image();
        assert_eq!(img.argmax(), (4, 4));
        assert_eq!(img.peak_position(), (0.2, 0.2));
        assert_eq!(img.median(), 6.0);
        assert_eq!(img.local_maxima()[0].0, 4);
        let mask = img.detection_mask(-3.0);
        assert!(mask[[4, 4]] && !mask[[0, 0]]);
    }
}
