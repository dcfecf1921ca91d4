//! Binary draws file.
//!
//! Layout (all integers little-endian):
//!   magic  4 bytes  "DLGG"
//!   version u16     currently 1
//!   p       u32     matrix dimension
//!   count   u64     number of stored draws
//! followed by `count` records of p(p+1)/2 little-endian f64 values: the
//! packed upper triangle (diagonal included) in row-major order.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::mat::{PrecisionMatrix, SymMatrix};

pub const DRAWS_MAGIC: [u8; 4] = *b"DLGG";
pub const DRAWS_VERSION: u16 = 1;

pub fn write_draws(path: impl AsRef<Path>, draws: &[PrecisionMatrix<f64>]) -> Result<()> {
    let path = path.as_ref();
    if draws.is_empty() {
        return Err(Error::InvalidArgument("no draws to write".into()));
    }
    let p = draws[0].dim();
    if draws.iter().any(|d| d.dim() != p) {
        return Err(Error::InvalidArgument("draws have mixed dimensions".into()));
    }
    let mut buf: Vec<u8> =
        Vec::with_capacity(18 + draws.len() * draws[0].as_sym().packed().len() * 8);
    buf.extend_from_slice(&DRAWS_MAGIC);
    buf.extend_from_slice(&DRAWS_VERSION.to_le_bytes());
    buf.extend_from_slice(&(p as u32).to_le_bytes());
    buf.extend_from_slice(&(draws.len() as u64).to_le_bytes());
    for d in draws {
        for v in d.as_sym().packed() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    let mut f = fs::File::create(path)
        .map_err(|e| Error::Io(format!("cannot create {}: {e}", path.display())))?;
    f.write_all(&buf)
        .map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

pub fn read_draws(path: impl AsRef<Path>) -> Result<Vec<PrecisionMatrix<f64>>> {
    let path = path.as_ref();
    let bytes = fs::read(path)
        .map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
    if bytes.len() < 18 {
        return Err(Error::BadFormat(format!("{} is truncated", path.display())));
    }
    if bytes[0..4] != DRAWS_MAGIC {
        return Err(Error::BadFormat(format!(
            "{} has wrong magic bytes (expected DLGG)",
            path.display()
        )));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != DRAWS_VERSION {
        return Err(Error::BadFormat(format!(
            "unsupported draws version {version} in {}",
            path.display()
        )));
    }
    let p = u32::from_le_bytes([bytes[6], bytes[7], bytes[8], bytes[9]]) as usize;
    let count = u64::from_le_bytes(bytes[10..18].try_into().expect("8 bytes")) as usize;
    if p < 2 {
        return Err(Error::BadFormat(format!("bad dimension {p} in {}", path.display())));
    }
    let packed_len = p * (p + 1) / 2;
    let expect = 18 + count * packed_len * 8;
    if bytes.len() != expect {
        return Err(Error::BadFormat(format!(
            "{}: expected {expect} bytes for {count} draws at p={p}, found {}",
            path.display(),
            bytes.len()
        )));
    }
    let mut draws = Vec::with_capacity(count);
    let mut off = 18;
    for k in 0..count {
        let mut packed = Vec::with_capacity(packed_len);
        for _ in 0..packed_len {
            packed.push(f64::from_le_bytes(
                bytes[off..off + 8].try_into().expect("8 bytes"),
            ));
            off += 8;
        }
        let m = SymMatrix::from_packed(p, packed)?;
        let pm = PrecisionMatrix::new(m).map_err(|e| {
            Error::BadFormat(format!(
                "draw {k} in {} is not positive definite: {e}",
                path.display()
            ))
        })?;
        draws.push(pm);
    }
    Ok(draws)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp(name: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join(format!("dlgg-draws-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    #[test]
    fn round_trip_is_exact() {
        let mut draws = Vec::new();
        for k in 0..5 {
            let m = SymMatrix::from_fn(3, |i, j| {
                if i == j {
                    2.0 + k as f64 * 0.1
                } else {
                    0.3 / (1.0 + i as f64 + j as f64)
                }
            })
            .unwrap();
            draws.push(PrecisionMatrix::new(m).unwrap());
        }
        let path = tmp("rt.bin");
        write_draws(&path, &draws).unwrap();
        let back = read_draws(&path).unwrap();
        assert_eq!(back.len(), 5);
        for (a, b) in draws.iter().zip(&back) {
            for i in 0..3 {
                for j in 0..3 {
                    assert_eq!(a.get(i, j).to_bits(), b.get(i, j).to_bits());
                }
            }
        }
    }

    #[test]
    fn corrupted_header_rejected() {
        let path = tmp("bad.bin");
        std::fs::write(&path, b"NOPE").unwrap();
        assert!(matches!(read_draws(&path), Err(Error::BadFormat(_))));
        std::fs::write(&path, b"NOPExxxxxxxxxxxxxxxxx").unwrap();
        assert!(matches!(read_draws(&path), Err(Error::BadFormat(_))));
    }

    #[test]
    fn truncated_body_rejected() {
        let m = SymMatrix::<f64>::identity(2).unwrap();
        let draws = vec![PrecisionMatrix::new(m).unwrap()];
        let path = tmp("trunc.bin");
        write_draws(&path, &draws).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes.pop();
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(read_draws(&path), Err(Error::BadFormat(_))));
    }
}
