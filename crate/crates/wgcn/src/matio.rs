//! Sparse matrix file formats: a little-endian binary container and a
//! MatrixMarket coordinate reader/writer for interoperability.

use std::io::{Read, Write};
use std::path::Path;

use wgcn_core::SparseMatrix;

use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"WGCM";
const VERSION: u32 = 1;

/// Binary layout: magic `WGCM`, version u32, rows/cols/nnz u64, then the
/// `rows + 1` offsets, `nnz` column indices, and `nnz` f64 values, all
/// little-endian.
pub fn write_sparse(w: &mut impl Write, m: &SparseMatrix) -> std::io::Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(m.rows() as u64).to_le_bytes())?;
    w.write_all(&(m.cols() as u64).to_le_bytes())?;
    w.write_all(&(m.nnz() as u64).to_le_bytes())?;
    for &o in m.row_offsets() {
        w.write_all(&(o as u64).to_le_bytes())?;
    }
    for &c in m.col_indices() {
        w.write_all(&(c as u64).to_le_bytes())?;
    }
    for &v in m.values() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_sparse(r: &mut impl Read, origin: &Path) -> Result<SparseMatrix> {
    let io_err = |e| Error::io(origin, e);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(io_err)?;
    if &magic != MAGIC {
        return Err(Error::format(origin, "not a WGCM matrix file"));
    }
    let mut word4 = [0u8; 4];
    r.read_exact(&mut word4).map_err(io_err)?;
    let version = u32::from_le_bytes(word4);
    if version != VERSION {
        return Err(Error::format(
            origin,
            format!("unsupported version {version}"),
        ));
    }
    let read_u64 = |r: &mut dyn Read| -> Result<u64> {
        let mut word8 = [0u8; 8];
        r.read_exact(&mut word8).map_err(|e| Error::io(origin, e))?;
        Ok(u64::from_le_bytes(word8))
    };
    let rows = read_u64(r)? as usize;
    let cols = read_u64(r)? as usize;
    let nnz = read_u64(r)? as usize;
    let mut row_offsets = Vec::with_capacity(rows + 1);
    for _ in 0..=rows {
        row_offsets.push(read_u64(r)? as usize);
    }
    let mut col_indices = Vec::with_capacity(nnz);
    for _ in 0..nnz {
        col_indices.push(read_u64(r)? as usize);
    }
    let mut values = Vec::with_capacity(nnz);
    for _ in 0..nnz {
        let mut word8 = [0u8; 8];
        r.read_exact(&mut word8).map_err(io_err)?;
        values.push(f64::from_le_bytes(word8));
    }
    SparseMatrix::from_raw_parts(rows, cols, row_offsets, col_indices, values)
        .map_err(|e| Error::format(origin, e.to_string()))
}

pub fn save_sparse(path: &Path, m: &SparseMatrix) -> Result<()> {
    let mut buf = Vec::new();
    write_sparse(&mut buf, m).map_err(|e| Error::io(path, e))?;
    crate::artifacts::atomic_write(path, &buf)
}

pub fn load_sparse(path: &Path) -> Result<SparseMatrix> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    read_sparse(&mut bytes.as_slice(), path)
}

/// MatrixMarket coordinate format, `real general`, 1-based indices. Values
/// print through Rust's shortest-roundtrip formatting, so text round-trips
/// are exact.
pub fn write_matrix_market(w: &mut impl Write, m: &SparseMatrix) -> std::io::Result<()> {
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{} {} {}", m.rows(), m.cols(), m.nnz())?;
    for (r, c, v) in m.iter_entries() {
        writeln!(w, "{} {} {}", r + 1, c + 1, v)?;
    }
    Ok(())
}

pub fn read_matrix_market(text: &str, origin: &Path) -> Result<SparseMatrix> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::format(origin, "empty file"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if !header.starts_with("%%MatrixMarket")
        || fields.len() < 5
        || fields[1] != "matrix"
        || fields[2] != "coordinate"
        || fields[3] != "real"
        || fields[4] != "general"
    {
        return Err(Error::format(
            origin,
            "expected `%%MatrixMarket matrix coordinate real general`",
        ));
    }
    let mut lines = lines.filter(|l| !l.starts_with('%') && !l.trim().is_empty());
    let dims = lines
        .next()
        .ok_or_else(|| Error::format(origin, "missing size line"))?;
    let parse = |s: &str, what: &str| {
        s.parse::<usize>()
            .map_err(|_| Error::format(origin, format!("bad {what}: `{s}`")))
    };
    let mut parts = dims.split_whitespace();
    let rows = parse(parts.next().unwrap_or(""), "row count")?;
    let cols = parse(parts.next().unwrap_or(""), "column count")?;
    let nnz = parse(parts.next().unwrap_or(""), "entry count")?;
    let mut entries = Vec::with_capacity(nnz);
    for line in lines {
        let mut parts = line.split_whitespace();
        let r = parse(parts.next().unwrap_or(""), "row index")?;
        let c = parse(parts.next().unwrap_or(""), "column index")?;
        let v: f64 = parts
            .next()
            .unwrap_or("")
            .parse()
            .map_err(|_| Error::format(origin, format!("bad value in `{line}`")))?;
        if r == 0 || c == 0 || r > rows || c > cols {
            return Err(Error::format(
                origin,
                format!("index out of range in `{line}`"),
            ));
        }
        entries.push((r - 1, c - 1, v));
    }
    if entries.len() != nnz {
        return Err(Error::format(
            origin,
            format!("size line promises {nnz} entries, found {}", entries.len()),
        ));
    }
    SparseMatrix::from_triplets(rows, cols, &entries)
        .map_err(|e| Error::format(origin, e.to_string()))
}
