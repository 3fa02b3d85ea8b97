//! Little-endian binary container for matrices and signatures.
//!
//! Layout: magic `GHP1`, `u64` rows, `u64` cols, `u8` kind, then the payload.
//! Kind 0 is a complex matrix stored column-major as `(re, im)` `f64` pairs;
//! kind 1 is a signature of `rows` entries stored as `i8` values `±1`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::kernel::{ComplexMatrix, Signature, C64};
use crate::{Error, Result};

pub const MAGIC: &[u8; 4] = b"GHP1";
const KIND_MATRIX: u8 = 0;
const KIND_SIGNATURE: u8 = 1;

fn write_header(w: &mut impl Write, rows: usize, cols: usize, kind: u8) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&(rows as u64).to_le_bytes())?;
    w.write_all(&(cols as u64).to_le_bytes())?;
    w.write_all(&[kind])?;
    Ok(())
}

fn read_header(r: &mut impl Read, expect: u8) -> Result<(usize, usize)> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b8)?;
    let rows = u64::from_le_bytes(b8) as usize;
    r.read_exact(&mut b8)?;
    let cols = u64::from_le_bytes(b8) as usize;
    let mut kind = [0u8; 1];
    r.read_exact(&mut kind)?;
    if kind[0] != expect {
        return Err(Error::Format(format!("kind {} where {expect} was expected", kind[0])));
    }
    Ok((rows, cols))
}

pub fn write_matrix(w: &mut impl Write, m: &ComplexMatrix) -> Result<()> {
    write_header(w, m.rows(), m.cols(), KIND_MATRIX)?;
    for col in m.columns() {
        for z in col {
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_matrix(r: &mut impl Read) -> Result<ComplexMatrix> {
    let (rows, cols) = read_header(r, KIND_MATRIX)?;
    let mut m = ComplexMatrix::zeros(rows, cols);
    let mut b8 = [0u8; 8];
    for j in 0..cols {
        for z in m.col_mut(j) {
            r.read_exact(&mut b8)?;
            let re = f64::from_le_bytes(b8);
            r.read_exact(&mut b8)?;
            *z = C64::new(re, f64::from_le_bytes(b8));
        }
    }
    Ok(m)
}

pub fn write_signature(w: &mut impl Write, j: &Signature) -> Result<()> {
    write_header(w, j.order(), 1, KIND_SIGNATURE)?;
    let bytes: Vec<u8> = j.decode().into_iter().map(|d| d as u8).collect();
    w.write_all(&bytes)?;
    Ok(())
}

pub fn read_signature(r: &mut impl Read) -> Result<Signature> {
    let (rows, _) = read_header(r, KIND_SIGNATURE)?;
    let mut bytes = vec![0u8; rows];
    r.read_exact(&mut bytes)?;
    let diag: Vec<i8> = bytes.into_iter().map(|b| b as i8).collect();
    Signature::encode(&diag)
}

pub fn save_matrix(path: &Path, m: &ComplexMatrix) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_matrix(&mut w, m)?;
    w.flush()?;
    Ok(())
}

pub fn load_matrix(path: &Path) -> Result<ComplexMatrix> {
    read_matrix(&mut BufReader::new(File::open(path)?))
}

pub fn save_signature(path: &Path, j: &Signature) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_signature(&mut w, j)?;
    w.flush()?;
    Ok(())
}

pub fn load_signature(path: &Path) -> Result<Signature> {
    read_signature(&mut BufReader::new(File::open(path)?))
}

/// Real vector stored as an `n x 1` complex matrix with zero imaginary parts.
pub fn save_real_vector(path: &Path, v: &[f64]) -> Result<()> {
    let m = ComplexMatrix::from_fn(v.len(), 1, |i, _| C64::new(v[i], 0.0));
    save_matrix(path, &m)
}

pub fn load_real_vector(path: &Path) -> Result<Vec<f64>> {
    let m = load_matrix(path)?;
    if m.cols() != 1 {
        return Err(Error::Format("expected a single column".into()));
    }
    Ok(m.col(0).iter().map(|z| z.re).collect())
}
