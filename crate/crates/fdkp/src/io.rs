//! The FDKP1 field file format.
//!
//! An ASCII header line `FDKP1 nx ny lx ly rep realTagged` followed by
//! `nx*ny` little-endian `f64` pairs `(re, im)`, row-major with x fastest.
//! `rep` is `physical` or `spectral`, `realTagged` is `0` or `1`.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::spectral::{Field, Grid2D, Rep, C};

pub fn encode(f: &Field) -> Vec<u8> {
    let g = &f.grid;
    let rep = match f.rep {
        Rep::Physical => "physical",
        Rep::Spectral => "spectral",
    };
    let mut out = format!(
        "FDKP1 {} {} {:?} {:?} {} {}\n",
        g.nx,
        g.ny,
        g.lx,
        g.ly,
        rep,
        u8::from(f.real)
    )
    .into_bytes();
    out.reserve(16 * f.values.len());
    for v in &f.values {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    out
}

pub fn write_field(path: &Path, f: &Field) -> Result<()> {
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(&encode(f)).map_err(|e| Error::io(path, e))
}

/// Reads a field; a grid with the same parameters may be supplied for reuse.
pub fn read_field(path: &Path, grid: Option<&Arc<Grid2D>>) -> Result<Field> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = BufReader::new(file);
    let mut header = String::new();
    r.read_line(&mut header).map_err(|e| Error::io(path, e))?;
    let bad = |msg: String| Error::Format {
        path: path.to_path_buf(),
        msg,
    };
    let parts: Vec<&str> = header.trim_end_matches('\n').split(' ').collect();
    if parts.len() != 7 || parts[0] != "FDKP1" {
        return Err(bad(format!("bad header {header:?}")));
    }
    let nx: usize = parts[1].parse().map_err(|_| bad("nx".into()))?;
    let ny: usize = parts[2].parse().map_err(|_| bad("ny".into()))?;
    let lx: f64 = parts[3].parse().map_err(|_| bad("lx".into()))?;
    let ly: f64 = parts[4].parse().map_err(|_| bad("ly".into()))?;
    let rep = match parts[5] {
        "physical" => Rep::Physical,
        "spectral" => Rep::Spectral,
        other => return Err(bad(format!("unknown rep {other:?}"))),
    };
    let real = match parts[6] {
        "0" => false,
        "1" => true,
        other => return Err(bad(format!("bad realTagged {other:?}"))),
    };
    let grid = match grid {
        Some(g) if g.nx == nx && g.ny == ny && g.lx == lx && g.ly == ly => g.clone(),
        Some(_) => return Err(Error::GridMismatch(format!("{} header", path.display()))),
        None => Grid2D::new(nx, ny, lx, ly)?,
    };
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes).map_err(|e| Error::io(path, e))?;
    if bytes.len() != 16 * nx * ny {
        return Err(bad(format!(
            "expected {} payload bytes, found {}",
            16 * nx * ny,
            bytes.len()
        )));
    }
    let values = bytes
        .chunks_exact(16)
        .map(|b| {
            C::new(
                f64::from_le_bytes(b[..8].try_into().unwrap()),
                f64::from_le_bytes(b[8..].try_into().unwrap()),
            )
        })
        .collect();
    Ok(Field {
        grid,
        values,
        rep,
        real,
    })
}
