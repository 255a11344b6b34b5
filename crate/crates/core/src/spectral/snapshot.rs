//! Field snapshot files.
//!
//! Binary layout, little-endian:
//!
//! | offset | size | content                     |
//! |--------|------|-----------------------------|
//! | 0      | 8    | magic `LKPZFLD1`            |
//! | 8      | 8    | dimension `N` as `u64`      |
//! | 16     | 8    | points per axis `n` as `u64`|
//! | 24     | 8    | half width `Lbox` as `f64`  |
//! | 32     | 8·nᴺ | values as `f64`, row-major  |
//!
//! A plain-text sidecar with the same metadata sits next to the binary file
//! with the extension `.txt`.

use std::fs;
use std::path::{Path, PathBuf};

use super::field::Field;
use super::grid::PeriodicGrid;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"LKPZFLD1";
pub const HEADER_LEN: usize = 32;

pub fn encode(field: &Field) -> Vec<u8> {
    let grid = field.grid();
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * grid.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(grid.dim() as u64).to_le_bytes());
    out.extend_from_slice(&(grid.n() as u64).to_le_bytes());
    out.extend_from_slice(&grid.half_width().to_le_bytes());
    for v in field.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

fn word(bytes: &[u8], offset: usize) -> [u8; 8] {
    bytes[offset..offset + 8].try_into().expect("slice of length 8")
}

pub fn decode(bytes: &[u8]) -> Result<Field> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Snapshot(format!("{} bytes is shorter than the header", bytes.len())));
    }
    if &bytes[..8] != MAGIC {
        return Err(Error::Snapshot("bad magic".into()));
    }
    let dim = u64::from_le_bytes(word(bytes, 8)) as usize;
    let n = u64::from_le_bytes(word(bytes, 16)) as usize;
    let half_width = f64::from_le_bytes(word(bytes, 24));
    let grid = PeriodicGrid::new(dim, n, half_width)?;
    let body = &bytes[HEADER_LEN..];
    if body.len() != 8 * grid.len() {
        return Err(Error::Snapshot(format!(
            "body holds {} bytes, expected {}",
            body.len(),
            8 * grid.len()
        )));
    }
    let values = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    Field::from_values(grid, values)
}

/// Text sidecar describing a snapshot.
pub fn sidecar(field: &Field, t: Option<f64>) -> String {
    let grid = field.grid();
    let mut s = format!(
        "format = LKPZFLD1\ndim = {}\nn = {}\nhalf_width = {:e}\nvalues = {}\nlayout = row-major f64 little-endian\n",
        grid.dim(),
        grid.n(),
        grid.half_width(),
        grid.len()
    );
    if let Some(t) = t {
        s.push_str(&format!("t = {t:e}\n"));
    }
    s
}

/// Writes `path` and its `.txt` sidecar; returns the sidecar path.
pub fn write(path: &Path, field: &Field, t: Option<f64>) -> Result<PathBuf> {
    fs::write(path, encode(field))?;
    let side = path.with_extension("txt");
    fs::write(&side, sidecar(field, t))?;
    Ok(side)
}

pub fn read(path: &Path) -> Result<Field> {
    decode(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        let grid = PeriodicGrid::new(2, 8, 3.5).unwrap();
        let f = Field::from_fn(grid, |x| x[0] - 2.0 * x[1]);
        let bytes = encode(&f);
        assert_eq!(bytes.len(), 32 + 8 * 64);
        assert_eq!(&bytes[..8], b"LKPZFLD1");
        assert_eq!(u64::from_le_bytes(bytes[8..16].try_into().unwrap()), 2);
        assert_eq!(u64::from_le_bytes(bytes[16..24].try_into().unwrap()), 8);
        assert_eq!(f64::from_le_bytes(bytes[24..32].try_into().unwrap()), 3.5);
        assert_eq!(decode(&bytes).unwrap(), f);
    }

    #[test]
    fn rejects_corrupt_input() {
        let grid = PeriodicGrid::new(1, 8, 1.0).unwrap();
        let mut bytes = encode(&Field::zeros(grid));
        assert!(decode(&bytes[..20]).is_err());
        bytes.pop();
        assert!(decode(&bytes).is_err());
        bytes[0] = b'X';
        assert!(decode(&bytes).is_err());
    }
}
