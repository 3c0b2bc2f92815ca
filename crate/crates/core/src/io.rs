//! The `BWLAB1` array file format and CSV slice export.
//!
//! Byte layout (all integers and floats little-endian):
//!
//! ```text
//! offset  size  field
//! 0       6     magic "BWLAB1"
//! 6       4     u32 n            spatial dimension (1..=3)
//! 10      4     u32 rank         component count (1 or 1+n)
//! 14      4     u32 scalar code  0 = real f64, 1 = complex (re,im) f64 pairs
//! 18      4     u32 reserved     0
//! 22      8     u64 nt
//! 30      8*n   u64 nx[i]
//! ..      8     f64 t_lo
//! ..      8     f64 dt
//! ..      16*n  f64 x_lo[i], f64 dx[i]   (per spatial axis)
//! ..      —     payload: rank blocks, each time-major over nodes;
//!               complex values as interleaved (re, im)
//! ```
//!
//! Writing is a pure function of the field, so identical fields produce
//! byte-identical files.

use crate::error::{CoreError, Result};
use crate::field::{ComplexField, Field, RealField, Scalar};
use crate::grid::SpaceTimeGrid;
use crate::C64;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

const MAGIC: &[u8; 6] = b"BWLAB1";

fn write_header<W: Write>(w: &mut W, grid: &SpaceTimeGrid, rank: usize, code: u32) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&(grid.n() as u32).to_le_bytes())?;
    w.write_all(&(rank as u32).to_le_bytes())?;
    w.write_all(&code.to_le_bytes())?;
    w.write_all(&0u32.to_le_bytes())?;
    w.write_all(&(grid.nt() as u64).to_le_bytes())?;
    for &m in grid.nx() {
        w.write_all(&(m as u64).to_le_bytes())?;
    }
    w.write_all(&grid.t_lo().to_le_bytes())?;
    w.write_all(&grid.dt().to_le_bytes())?;
    for a in 0..grid.n() {
        w.write_all(&grid.x_lo()[a].to_le_bytes())?;
        w.write_all(&grid.dx()[a].to_le_bytes())?;
    }
    Ok(())
}

pub fn write_real_field(path: &Path, field: &RealField) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_header(&mut w, field.grid(), field.ncomp(), 0)?;
    for v in field.values() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn write_complex_field(path: &Path, field: &ComplexField) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_header(&mut w, field.grid(), field.ncomp(), 1)?;
    for v in field.values() {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    Ok(())
}

/// A field loaded from disk; the scalar code decides the variant.
pub enum LoadedField {
    Real(RealField),
    Complex(ComplexField),
}

fn read_exact_array<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    Ok(u32::from_le_bytes(read_exact_array::<4, _>(r)?))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    Ok(u64::from_le_bytes(read_exact_array::<8, _>(r)?))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    Ok(f64::from_le_bytes(read_exact_array::<8, _>(r)?))
}

pub fn read_field(path: &Path) -> Result<LoadedField> {
    let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
    let magic = read_exact_array::<6, _>(&mut r)?;
    if &magic != MAGIC {
        return Err(CoreError::BadFormat("bad magic".into()));
    }
    let n = read_u32(&mut r)? as usize;
    let rank = read_u32(&mut r)? as usize;
    let code = read_u32(&mut r)?;
    let _reserved = read_u32(&mut r)?;
    if !(1..=3).contains(&n) {
        return Err(CoreError::BadFormat(format!("spatial dimension {n}")));
    }
    if code > 1 {
        return Err(CoreError::BadFormat(format!("scalar code {code}")));
    }
    let nt = read_u64(&mut r)? as usize;
    let mut nx = Vec::with_capacity(n);
    for _ in 0..n {
        nx.push(read_u64(&mut r)? as usize);
    }
    let t_lo = read_f64(&mut r)?;
    let dt = read_f64(&mut r)?;
    let mut omega_box = Vec::with_capacity(n);
    let mut dx = Vec::with_capacity(n);
    for _ in 0..n {
        let lo = read_f64(&mut r)?;
        let d = read_f64(&mut r)?;
        omega_box.push((lo, 0.0));
        dx.push(d);
    }
    for a in 0..n {
        omega_box[a].1 = omega_box[a].0 + dx[a] * (nx[a] - 1) as f64;
    }
    let t_hi = t_lo + dt * (nt - 1) as f64;
    let grid = SpaceTimeGrid::with_origin(t_lo, t_hi, &omega_box, nt, &nx)?;
    if rank != 1 && rank != 1 + n {
        return Err(CoreError::BadFormat(format!("rank {rank}")));
    }
    let count = rank * grid.total_nodes();
    if code == 0 {
        let mut field = RealField::zeros(&grid, rank);
        for v in field.values_mut() {
            *v = read_f64(&mut r)?;
        }
        debug_assert_eq!(field.values().len(), count);
        Ok(LoadedField::Real(field))
    } else {
        let mut field = ComplexField::zeros(&grid, rank);
        for v in field.values_mut() {
            let re = read_f64(&mut r)?;
            let im = read_f64(&mut r)?;
            *v = C64::new(re, im);
        }
        debug_assert_eq!(field.values().len(), count);
        Ok(LoadedField::Complex(field))
    }
}

/// CSV export of a 1D or 2D slice: fix every axis listed in `fixed`
/// (axis index, node index); the remaining axes become columns.
pub fn write_csv_slice<T: Scalar>(
    path: &Path,
    field: &Field<T>,
    comp: usize,
    fixed: &[(usize, usize)],
) -> Result<()> {
    let grid = field.grid().clone();
    let dims = grid.dims();
    let free: Vec<usize> = (0..dims).filter(|k| !fixed.iter().any(|&(a, _)| a == *k)).collect();
    if free.is_empty() || free.len() > 2 {
        return Err(CoreError::InvalidGrid(format!(
            "csv export needs 1 or 2 free axes, got {}",
            free.len()
        )));
    }
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    let names = ["t", "x1", "x2", "x3"];
    let mut header: Vec<String> = free.iter().map(|&k| names[k].to_string()).collect();
    header.push("re".into());
    header.push("im".into());
    writeln!(w, "{}", header.join(","))?;
    let vals = field.component(comp);
    let counts: Vec<usize> = free.iter().map(|&k| grid.shape(k)).collect();
    let total: usize = counts.iter().product();
    for flat in 0..total {
        let mut idx = [0usize; 4];
        for &(a, i) in fixed {
            idx[a] = i;
        }
        let mut r = flat;
        for (j, &k) in free.iter().enumerate().rev() {
            idx[k] = r % counts[j];
            r /= counts[j];
        }
        let v = vals[grid.flat(&idx)];
        let coords: Vec<String> =
            free.iter().map(|&k| format!("{:.12e}", grid.coord(k, idx[k]))).collect();
        writeln!(w, "{},{:.16e},{:.16e}", coords.join(","), v.re(), v.im())?;
    }
    Ok(())
}

/// Read back for tests and tools.
pub fn grid_of(loaded: &LoadedField) -> Arc<SpaceTimeGrid> {
    match loaded {
        LoadedField::Real(f) => f.grid().clone(),
        LoadedField::Complex(f) => f.grid().clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_real_and_complex() {
        let dirpath = tempfile::tempdir().unwrap();
        let g = SpaceTimeGrid::new(0.8, &[(0.0, 1.0), (-1.0, 2.0)], 5, &[7, 6]).unwrap();
        let f = RealField::from_fn(&g, |p| p[0] + 2.0 * p[1] - p[2]);
        let p1 = dirpath.path().join("a.bwlab");
        write_real_field(&p1, &f).unwrap();
        match read_field(&p1).unwrap() {
            LoadedField::Real(g2) => {
                assert!(g2.grid().same_as(f.grid()));
                assert_eq!(g2.values(), f.values());
            }
            _ => panic!("wrong variant"),
        }

        let c = ComplexField::from_fn(&g, |p| C64::new(p[0], p[1] * p[2]));
        let p2 = dirpath.path().join("b.bwlab");
        write_complex_field(&p2, &c).unwrap();
        match read_field(&p2).unwrap() {
            LoadedField::Complex(c2) => assert_eq!(c2.values(), c.values()),
            _ => panic!("wrong variant"),
        }
    }

    #[test]
    fn deterministic_bytes() {
        let dirpath = tempfile::tempdir().unwrap();
        let g = SpaceTimeGrid::new(1.0, &[(0.0, 1.0)], 5, &[5]).unwrap();
        let f = RealField::from_fn(&g, |p| (p[0] * 7.0).sin() * p[1]);
        let p1 = dirpath.path().join("x1.bwlab");
        let p2 = dirpath.path().join("x2.bwlab");
        write_real_field(&p1, &f).unwrap();
        write_real_field(&p2, &f).unwrap();
        assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    }
}
