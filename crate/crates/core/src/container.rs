//! Binary container for complex matrices (echo cubes and angle-Doppler maps).
//!
//! Layout, all little-endian:
//!
//! | offset | size | field |
//! |-------:|-----:|-------|
//! | 0  | 8  | magic `BISARCUB` |
//! | 8  | 4  | format version (`1`) |
//! | 12 | 4  | kind: `0` echo cube `N × L`, `1` angle-Doppler map `I × K` |
//! | 16 | 8  | rows |
//! | 24 | 8  | columns |
//! | 32 | 32 | SHA-256 of the producing configuration |
//! | 64 | 1  | tag: fidelity for cubes, estimator for maps |
//! | 65 | 7  | reserved, zero |
//! | 72 | .. | row-major `(re, im)` pairs of `f64` |

use std::io::{Read, Write};
use std::path::Path;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"BISARCUB";
pub const FORMAT_VERSION: u32 = 1;
pub const HEADER_LEN: usize = 72;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    EchoCube,
    AngleDopplerMap,
}

impl MatrixKind {
    fn code(self) -> u32 {
        match self {
            MatrixKind::EchoCube => 0,
            MatrixKind::AngleDopplerMap => 1,
        }
    }

    fn from_code(code: u32) -> Result<Self> {
        match code {
            0 => Ok(MatrixKind::EchoCube),
            1 => Ok(MatrixKind::AngleDopplerMap),
            other => Err(Error::Format(format!("unknown matrix kind {other}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Header {
    pub kind: MatrixKind,
    pub rows: usize,
    pub cols: usize,
    pub config_hash: [u8; 32],
    pub tag: u8,
}

impl Header {
    fn encode(&self) -> [u8; HEADER_LEN] {
        let mut h = [0u8; HEADER_LEN];
        h[..8].copy_from_slice(MAGIC);
        h[8..12].copy_from_slice(&FORMAT_VERSION.to_le_bytes());
        h[12..16].copy_from_slice(&self.kind.code().to_le_bytes());
        h[16..24].copy_from_slice(&(self.rows as u64).to_le_bytes());
        h[24..32].copy_from_slice(&(self.cols as u64).to_le_bytes());
        h[32..64].copy_from_slice(&self.config_hash);
        h[64] = self.tag;
        h
    }

    fn decode(h: &[u8; HEADER_LEN]) -> Result<Self> {
        if &h[..8] != MAGIC {
            return Err(Error::Format("not a bisar matrix file (bad magic)".into()));
        }
        let version = u32::from_le_bytes(h[8..12].try_into().unwrap());
        if version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported format version {version}")));
        }
        let kind = MatrixKind::from_code(u32::from_le_bytes(h[12..16].try_into().unwrap()))?;
        let rows = u64::from_le_bytes(h[16..24].try_into().unwrap()) as usize;
        let cols = u64::from_le_bytes(h[24..32].try_into().unwrap()) as usize;
        let mut config_hash = [0u8; 32];
        config_hash.copy_from_slice(&h[32..64]);
        Ok(Header {
            kind,
            rows,
            cols,
            config_hash,
            tag: h[64],
        })
    }
}

/// Parses a 64-character hex digest into the header's hash field.
pub fn hash_from_hex(hex_digest: &str) -> Result<[u8; 32]> {
    let bytes = hex::decode(hex_digest).map_err(|e| Error::Format(format!("bad hash {hex_digest:?}: {e}")))?;
    bytes
        .try_into()
        .map_err(|_| Error::Format(format!("hash {hex_digest:?} is not 32 bytes")))
}

pub fn encode(header: &Header, data: &Array2<Complex64>) -> Result<Vec<u8>> {
    if data.dim() != (header.rows, header.cols) {
        return Err(Error::invalid("matrix shape does not match header"));
    }
    let mut out = Vec::with_capacity(HEADER_LEN + data.len() * 16);
    out.extend_from_slice(&header.encode());
    for v in data.iter() {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    Ok(out)
}

pub fn decode(mut reader: impl Read) -> Result<(Header, Array2<Complex64>)> {
    let mut h = [0u8; HEADER_LEN];
    reader
        .read_exact(&mut h)
        .map_err(|_| Error::Format("file shorter than the header".into()))?;
    let header = Header::decode(&h)?;
    let count = header
        .rows
        .checked_mul(header.cols)
        .ok_or_else(|| Error::Format("matrix dimensions overflow".into()))?;
    let mut body = Vec::new();
    reader.read_to_end(&mut body)?;
    if body.len() != count * 16 {
        return Err(Error::Format(format!(
            "body holds {} bytes, header implies {}",
            body.len(),
            count * 16
        )));
    }
    let values: Vec<Complex64> = body
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect();
    let data = Array2::from_shape_vec((header.rows, header.cols), values).expect("checked length");
    Ok((header, data))
}

pub fn write(path: &Path, header: &Header, data: &Array2<Complex64>) -> Result<()> {
    let bytes = encode(header, data)?;
    let mut f = std::fs::File::create(path)?;
    f.write_all(&bytes)?;
    Ok(())
}

pub fn read(path: &Path) -> Result<(Header, Array2<Complex64>)> {
    let f = std::fs::File::open(path)?;
    decode(std::io::BufReader::new(f))
}
