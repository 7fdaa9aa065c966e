//! Binary field snapshots.
//!
//! Layout (little endian):
//!
//! | bytes | content |
//! |-------|---------|
//! | 4     | magic `NLSF` |
//! | 4     | format version, `u32` (currently 1) |
//! | 4     | dimension `d`, `u32` |
//! | 4     | points per axis, `u32` |
//! | 8     | half width `L`, `f64` |
//! | 16 each | `(re, im)` as `f64`, row-major, `n^d` samples |

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};
use crate::spectral::field::ComplexField;
use crate::spectral::grid::GridSpec;

pub const MAGIC: &[u8; 4] = b"NLSF";
pub const VERSION: u32 = 1;

pub fn write_field<T: Real, W: Write>(f: &ComplexField<T>, mut w: W) -> Result<()> {
    let g = f.grid();
    w.write_all(MAGIC)?;
    w.write_u32::<LittleEndian>(VERSION)?;
    w.write_u32::<LittleEndian>(g.dim() as u32)?;
    w.write_u32::<LittleEndian>(g.n_per_axis() as u32)?;
    w.write_f64::<LittleEndian>(to_f64(g.half_width()))?;
    for z in f.values() {
        w.write_f64::<LittleEndian>(to_f64(z.re))?;
        w.write_f64::<LittleEndian>(to_f64(z.im))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_field<T: Real, R: Read>(mut r: R) -> Result<ComplexField<T>> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}")));
    }
    let version = r.read_u32::<LittleEndian>()?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let d = r.read_u32::<LittleEndian>()? as usize;
    let n = r.read_u32::<LittleEndian>()? as usize;
    let l = r.read_f64::<LittleEndian>()?;
    let grid = GridSpec::new(d, n, lit::<T>(l))?;
    let mut values = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        let re = r.read_f64::<LittleEndian>()?;
        let im = r.read_f64::<LittleEndian>()?;
        values.push(Complex::new(lit(re), lit(im)));
    }
    ComplexField::new(&grid, values)
}

pub fn save_field<T: Real>(f: &ComplexField<T>, path: impl AsRef<Path>) -> Result<()> {
    write_field(f, BufWriter::new(File::create(path)?))
}

pub fn load_field<T: Real>(path: impl AsRef<Path>) -> Result<ComplexField<T>> {
    read_field(BufReader::new(File::open(path)?))
}
