//! Flat binary and CSV export of grid functions.
//!
//! Binary layout: `n: u64`, `m: u64`, `L: f64`, all little-endian, followed
//! by `m^{2n}` interleaved `(re, im)` pairs of little-endian `f64`.

use super::{Grid, GridFunction};
use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use std::io::{Read, Write};
use std::path::Path;

pub fn write_binary(f: &GridFunction, mut w: impl Write) -> Result<()> {
    w.write_all(&(f.grid.n as u64).to_le_bytes())?;
    w.write_all(&(f.grid.m as u64).to_le_bytes())?;
    w.write_all(&f.grid.l.to_le_bytes())?;
    for z in &f.data {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_binary(mut r: impl Read) -> Result<GridFunction> {
    let mut b8 = [0u8; 8];
    let mut next = |r: &mut dyn Read| -> Result<[u8; 8]> {
        r.read_exact(&mut b8).map_err(|e| Error::Grid(format!("truncated grid file: {e}")))?;
        Ok(b8)
    };
    let n = u64::from_le_bytes(next(&mut r)?) as usize;
    let m = u64::from_le_bytes(next(&mut r)?) as usize;
    let l = f64::from_le_bytes(next(&mut r)?);
    let grid = Grid::new(n, l, m)?;
    let mut data = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        let re = f64::from_le_bytes(next(&mut r)?);
        let im = f64::from_le_bytes(next(&mut r)?);
        data.push(C64::new(re, im));
    }
    if r.read(&mut [0u8; 1])? != 0 {
        return Err(Error::Grid("trailing bytes after grid data".into()));
    }
    GridFunction::new(grid, data)
}

pub fn save_binary(f: &GridFunction, path: &Path) -> Result<()> {
    let file = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_binary(f, file)
}

pub fn load_binary(path: &Path) -> Result<GridFunction> {
    read_binary(std::io::BufReader::new(std::fs::File::open(path)?))
}

/// One row per sample: coordinates, then `re`, `im`.
pub fn write_csv(f: &GridFunction, mut w: impl Write) -> Result<()> {
    let g = f.grid;
    let mut header: Vec<String> = (1..=g.n).map(|k| format!("x{k}")).collect();
    header.extend((1..=g.n).map(|k| format!("y{k}")));
    header.extend(["re".to_string(), "im".to_string()]);
    writeln!(w, "{}", header.join(","))?;
    for (i, z) in f.data.iter().enumerate() {
        let mut row: Vec<String> = g.point(i).iter().map(|x| format!("{x:e}")).collect();
        row.push(format!("{:e}", z.re));
        row.push(format!("{:e}", z.im));
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_round_trip_is_bit_exact() {
        let g = Grid::new(1, 3.0, 8).unwrap();
        let f = GridFunction::from_fn(g, |v| C64::new(v[0].sin(), v[1] * 0.1 + 1e-300));
        let mut buf = Vec::new();
        write_binary(&f, &mut buf).unwrap();
        assert_eq!(buf.len(), 24 + 16 * 64);
        let back = read_binary(buf.as_slice()).unwrap();
        assert_eq!(back, f);
        assert!(read_binary(&buf[..buf.len() - 1]).is_err());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let g = Grid::new(1, 3.0, 8).unwrap();
        let mut buf = Vec::new();
        write_csv(&GridFunction::zeros(g), &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("x1,y1,re,im\n"));
        assert_eq!(s.lines().count(), 65);
    }
}
