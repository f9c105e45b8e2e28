//! On-disk formats.
//!
//! Grid files: the ASCII line `levelset-lab grid v1 N_g=<int>\n` followed by
//! `N_g^2` little-endian `f64` values in row-major order.
//!
//! Spectral files: the ASCII line `levelset-lab spec v1 N=<int> shape=<ball|square>\n`
//! followed by one `k1 k2 coeff` line per mode, sorted by `(k1, k2)`.
//! Coefficients use the shortest representation that parses back to the same bits.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::sync::Arc;

use super::{GridField, ModeIndexSet, SpectralField, Truncation};
use crate::error::{Error, Result};

const GRID_MAGIC: &str = "levelset-lab grid v1 N_g=";
const SPEC_MAGIC: &str = "levelset-lab spec v1 ";

pub fn write_grid<W: Write>(g: &GridField, mut w: W) -> Result<()> {
    writeln!(w, "{GRID_MAGIC}{}", g.resolution())?;
    let mut buf = Vec::with_capacity(8 * g.values().len());
    for v in g.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_grid<R: Read>(r: R) -> Result<GridField> {
    let mut r = BufReader::new(r);
    let mut header = String::new();
    r.read_line(&mut header)?;
    let n: usize = header
        .trim_end_matches('\n')
        .strip_prefix(GRID_MAGIC)
        .ok_or_else(|| Error::Parse(format!("not a grid file header: {header:?}")))?
        .parse()
        .map_err(|e| Error::Parse(format!("bad N_g: {e}")))?;
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() != 8 * n * n {
        return Err(Error::Parse(format!(
            "grid payload has {} bytes, expected {}",
            bytes.len(),
            8 * n * n
        )));
    }
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    GridField::new(n, values)
}

pub fn write_spectral<W: Write>(f: &SpectralField, mut w: W) -> Result<()> {
    let m = f.modes();
    writeln!(
        w,
        "{SPEC_MAGIC}N={} shape={}",
        m.radius(),
        m.shape().as_str()
    )?;
    for (k, c) in f.iter() {
        writeln!(w, "{} {} {:e}", k.k1, k.k2, c)?;
    }
    Ok(())
}

pub fn read_spectral<R: Read>(r: R) -> Result<SpectralField> {
    let mut lines = BufReader::new(r).lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty spectral file".into()))??;
    let rest = header
        .strip_prefix(SPEC_MAGIC)
        .ok_or_else(|| Error::Parse(format!("not a spectral file header: {header:?}")))?;
    let mut radius = None;
    let mut shape = None;
    for tok in rest.split_whitespace() {
        match tok.split_once('=') {
            Some(("N", v)) => {
                radius = Some(v.parse::<u32>().map_err(|e| Error::Parse(e.to_string()))?)
            }
            Some(("shape", v)) => shape = Some(v.parse::<Truncation>()?),
            _ => return Err(Error::Parse(format!("unexpected header token `{tok}`"))),
        }
    }
    let modes: Arc<ModeIndexSet> = ModeIndexSet::new(
        radius.ok_or_else(|| Error::Parse("header lacks N".into()))?,
        shape.ok_or_else(|| Error::Parse("header lacks shape".into()))?,
    )?;
    let mut coeffs = Vec::with_capacity(modes.len());
    for (line, expected) in lines.zip(modes.iter()) {
        let line = line?;
        let mut it = line.split_whitespace();
        let mut next = || {
            it.next()
                .ok_or_else(|| Error::Parse(format!("short line `{line}`")))
        };
        let k1: i32 = next()?.parse().map_err(|_| Error::Parse(line.clone()))?;
        let k2: i32 = next()?.parse().map_err(|_| Error::Parse(line.clone()))?;
        let c: f64 = next()?.parse().map_err(|_| Error::Parse(line.clone()))?;
        if (k1, k2) != (expected.k1, expected.k2) {
            return Err(Error::Parse(format!(
                "mode ({k1}, {k2}) out of order, expected {expected}"
            )));
        }
        coeffs.push(c);
    }
    SpectralField::from_coeffs(&modes, coeffs)
}

pub fn save_grid(g: &GridField, path: &Path) -> Result<()> {
    let f = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(f);
    write_grid(g, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load_grid(path: &Path) -> Result<GridField> {
    read_grid(std::fs::File::open(path)?)
}

pub fn save_spectral(f: &SpectralField, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    write_spectral(f, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load_spectral(path: &Path) -> Result<SpectralField> {
    read_spectral(std::fs::File::open(path)?)
}
